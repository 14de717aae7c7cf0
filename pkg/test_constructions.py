"""
構成（L(h,p)、mod-p、組合せ、有限言語、変換）のテスト
"""

import numpy as np
import pytest

from analysis_engine import bounded_cutpoint_report, machines_agree_bounded
from classical_automata import dfa_accepts, dfa_minimize, enumerate_strings
from constructions import (BINARY, CombineOp, LhpParams, ModPMoQfaParams, build_base_dfa,
                           build_exact_finite_qfac, build_lhp_dfa, build_lhp_qfac, build_modp_moqfa,
                           check_reversible, combine_dfa_moqfa, dfa_as_qfac, is_prime,
                           kletter_to_qfac, lhp_membership, lhp_known_witnesses, modp_accept_prob,
                           modp_candidates, moqfa_as_multiletter, moqfa_as_qfac, reversible_qfac_to_mo,
                           search_modp_multipliers)
from forbidden_constructions import replay_witness
from quantum_models import Qfac, accept_probability, mo_accept_prob, qfac_accept_prob
from sample_generator import (random_dfa, random_finite_language, random_moqfa, random_multiletter,
                              random_reversible_qfac)
from toolkit_errors import ConstructionError, ModPSearchError, NonReversibleError


def test_is_prime():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


class TestLhp:
    @pytest.mark.parametrize("h", [1, 2, 3])
    @pytest.mark.parametrize("p", [2, 3, 5, 7])
    def test_minimal_size(self, h, p):
        d = build_lhp_dfa(h, p)
        assert len(d.states) == (h + 2) * p + 1
        assert len(dfa_minimize(d).states) == (h + 2) * p + 1

    @pytest.mark.parametrize("h, p", [(1, 2), (2, 3), (1, 5)])
    def test_dfa_matches_membership(self, h, p):
        d = build_lhp_dfa(h, p)
        member = lhp_membership(h, p)
        for w in enumerate_strings(BINARY, 10):
            assert dfa_accepts(d, w) == member(w), w

    def test_membership_examples(self):
        member = lhp_membership(1, 2)
        assert member("")
        assert member("0010")
        assert member("1010")
        assert not member("010")
        assert not member("0011")

    def test_base_dfa(self):
        d = build_base_dfa(2)
        assert d.states == ("q0", "q1", "q2", "q3", "qr")
        assert dfa_accepts(d, "0100")
        assert not dfa_accepts(d, "01000")

    def test_known_witnesses_replay(self):
        d = build_lhp_dfa(2, 5)
        for w in lhp_known_witnesses(2, 5):
            assert replay_witness(d, w)

    @pytest.mark.parametrize("h, p", [(1, 2), (2, 3), (1, 3), (2, 5), (4, 5)])
    def test_known_witness_has_trailing_ones(self, h, p):
        d = build_lhp_dfa(h, p)
        mm, f = lhp_known_witnesses(h, p)
        prefix = "1" + "0" * h
        assert mm.y.startswith(prefix)
        tail = mm.y[len(prefix):]
        assert tail and set(tail) == {"1"}
        assert len(mm.y) % p == 0
        assert replay_witness(d, mm)
        assert replay_witness(d, f)

    @pytest.mark.parametrize("h, p, eps", [(0, 2, 0.2), (1, 4, 0.2), (1, 3, 0.0), (1, 3, 1.0)])
    def test_invalid_params(self, h, p, eps):
        with pytest.raises(ConstructionError):
            LhpParams(h, p, eps)


class TestModP:
    def test_candidates(self):
        assert modp_candidates(2) == [1]
        assert modp_candidates(5) == [1, 3, 5]

    def test_known_multipliers(self):
        assert modp_accept_prob(3, [1, 3], 1) == pytest.approx(0.0625)
        assert modp_accept_prob(3, [1, 3], 3) == pytest.approx(1.0)

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_one_sided_error(self, p):
        params = search_modp_multipliers(p, 0.2)
        assert params.certificate <= 0.2
        m = build_modp_moqfa(p, 0.2)
        assert m.dim == 2 * params.block_count
        for z in range(101):
            prob = mo_accept_prob(m, "0" * z)
            if z % p == 0:
                assert prob == pytest.approx(1.0, abs=1e-9)
            else:
                assert prob <= params.certificate + 1e-9

    def test_seed_is_reproducible(self):
        a = search_modp_multipliers(7, 0.2, seed=11)
        b = search_modp_multipliers(7, 0.2, seed=11)
        assert a == b

    def test_budget_exhausted(self):
        with pytest.raises(ModPSearchError) as excinfo:
            search_modp_multipliers(7, 1e-6, budget=3)
        assert excinfo.value.best_certificate > 1e-6
        assert len(excinfo.value.best_multipliers) >= 3

    def test_not_prime(self):
        with pytest.raises(ConstructionError):
            search_modp_multipliers(9, 0.2)

    def test_invalid_multiplier(self):
        with pytest.raises(ConstructionError):
            ModPMoQfaParams(2, 0.2, (2,), 0.0)


class TestCombine:
    @pytest.fixture
    def modp(self):
        return build_modp_moqfa(3, 0.2, alphabet=BINARY)

    def test_operations(self, modp, binary_all_dfa, binary_empty_dfa):
        cases = [
            (binary_all_dfa, CombineOp.INTERSECT, lambda q: q),
            (binary_empty_dfa, CombineOp.INTERSECT, lambda q: 0.0),
            (binary_all_dfa, CombineOp.UNION, lambda q: 1.0),
            (binary_empty_dfa, CombineOp.UNION, lambda q: q),
            (binary_all_dfa, CombineOp.DFA_MINUS_Q, lambda q: 1.0 - q),
            (binary_empty_dfa, CombineOp.Q_MINUS_DFA, lambda q: q),
            (binary_all_dfa, CombineOp.Q_MINUS_DFA, lambda q: 0.0),
        ]
        for d, op, expected in cases:
            qfac = combine_dfa_moqfa(d, modp, op)
            for w in enumerate_strings(BINARY, 5):
                assert qfac_accept_prob(qfac, w) == pytest.approx(expected(mo_accept_prob(modp, w)), abs=1e-9)

    def test_op_by_name(self, modp, binary_all_dfa):
        assert combine_dfa_moqfa(binary_all_dfa, modp, "union").classical_states == ("a",)

    def test_lhp_qfac(self):
        qfac = build_lhp_qfac(LhpParams(1, 5, 0.2))
        assert len(qfac.classical_states) == 4
        report = bounded_cutpoint_report(qfac, lhp_membership(1, 5), 15)
        assert report.member_min_prob == pytest.approx(1.0)
        assert report.nonmember_max_prob <= 0.2 + 1e-9
        assert report.isolated
        assert accept_probability(qfac, "10010") == pytest.approx(1.0)
        assert accept_probability(qfac, "0") == pytest.approx(0.0)


class TestExactFinite:
    def test_random_languages(self, rng):
        for _ in range(20):
            max_len = int(rng.integers(0, 4))
            language = random_finite_language(BINARY, max_len, rng)
            qfac = build_exact_finite_qfac(language, BINARY)
            assert len(qfac.classical_states) == max_len + 2
            assert qfac.dim == 2 ** max_len
            for w in enumerate_strings(BINARY, 5):
                assert qfac_accept_prob(qfac, w) == pytest.approx(1.0 if w in language else 0.0, abs=1e-12)

    def test_empty_word_only(self):
        qfac = build_exact_finite_qfac({""}, BINARY)
        assert (len(qfac.classical_states), qfac.dim) == (2, 1)
        assert qfac_accept_prob(qfac, "") == pytest.approx(1.0)
        assert qfac_accept_prob(qfac, "1") == pytest.approx(0.0)

    def test_small_language(self):
        qfac = build_exact_finite_qfac({"0", "01"}, BINARY)
        assert (len(qfac.classical_states), qfac.dim) == (4, 4)

    def test_ternary_alphabet(self):
        qfac = build_exact_finite_qfac({"ab", "c"}, "abc")
        assert qfac.dim == 9
        for w in enumerate_strings("abc", 3):
            assert qfac_accept_prob(qfac, w) == pytest.approx(1.0 if w in {"ab", "c"} else 0.0, abs=1e-12)

    def test_empty_alphabet(self):
        with pytest.raises(ConstructionError):
            build_exact_finite_qfac({""}, [])


class TestConversions:
    def test_kletter(self, rng):
        for _ in range(10):
            ml = random_multiletter(2, 3, BINARY, rng)
            qfac = kletter_to_qfac(ml)
            assert len(qfac.classical_states) == 3
            assert qfac.initial_classical == "s[_]"
            assert machines_agree_bounded(ml, qfac, 7, 1e-9) is None

    def test_kletter_three(self, rng):
        ml = random_multiletter(3, 2, BINARY, rng)
        qfac = kletter_to_qfac(ml)
        assert len(qfac.classical_states) == 1 + 2 + 4
        assert machines_agree_bounded(ml, qfac, 6, 1e-9) is None

    def test_reversible(self, rng):
        for _ in range(10):
            n, dim = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            qfac = random_reversible_qfac(n, dim, BINARY, rng)
            mo = reversible_qfac_to_mo(qfac)
            assert mo.dim == n * dim
            assert machines_agree_bounded(qfac, mo, 7, 1e-9) is None

    def test_reversible_coordinate_basis(self):
        d = random_dfa(1, BINARY, np.random.default_rng(1))
        mo = reversible_qfac_to_mo(dfa_as_qfac(d))
        assert mo.basis_states == ("d0:q0",)

    def test_non_reversible(self):
        qfac = Qfac(["s0", "s1"], ["a"], ["0"], "s0", [1], {"s0": {"0": "s0"}, "s1": {"0": "s0"}},
                    {("s0", "0"): np.eye(1), ("s1", "0"): np.eye(1)}, {"s0": np.eye(1), "s1": np.eye(1)})
        with pytest.raises(NonReversibleError) as excinfo:
            check_reversible(qfac)
        assert (excinfo.value.state_a, excinfo.value.state_b, excinfo.value.symbol) == ("s0", "s1", "0")

    def test_embeddings(self, rng):
        mo = random_moqfa(3, BINARY, rng)
        assert machines_agree_bounded(mo, moqfa_as_qfac(mo), 5, 1e-12) is None
        assert machines_agree_bounded(mo, moqfa_as_multiletter(mo), 5, 1e-12) is None
        d = random_dfa(4, BINARY, rng)
        assert machines_agree_bounded(d, dfa_as_qfac(d), 6, 1e-12) is None
