"""
古典オートマトン（DFA・PFA）のテスト
"""

import numpy as np
import pytest

from classical_automata import (DEAD_STATE, Dfa, Pfa, ProductOp, dfa_accepts, dfa_complement,
                                dfa_equivalent, dfa_minimize, dfa_product, dfa_run, enumerate_strings,
                                finite_language_dfa, is_self_reachable, pfa_accept_prob, pfa_from_dfa,
                                pfa_distribution, reachable_states, run_from, unary_cycle_dfa,
                                unary_minimal_cycle)
from constructions import build_base_dfa
from sample_generator import random_dfa, random_pfa
from toolkit_errors import AlphabetError, AutomatonError


def parity_dfa() -> Dfa:
    """1 の個数が偶数"""
    return Dfa(["e", "o"], ["0", "1"], "e",
               {"e": {"0": "e", "1": "o"}, "o": {"0": "o", "1": "e"}}, {"e"})


def redundant_parity_dfa() -> Dfa:
    """parity_dfa と同じ言語で、等価な状態の重複と到達不能状態を含む"""
    return Dfa(["e1", "o1", "e2", "o2", "u"], ["0", "1"], "e1", {
        "e1": {"0": "e2", "1": "o1"},
        "o1": {"0": "o2", "1": "e1"},
        "e2": {"0": "e1", "1": "o2"},
        "o2": {"0": "o1", "1": "e2"},
        "u": {"0": "u", "1": "u"},
    }, {"e1", "e2", "u"})


class TestRun:
    def test_run_and_accept(self):
        d = parity_dfa()
        assert dfa_run(d, "0110") == "e"
        assert dfa_accepts(d, "")
        assert not dfa_accepts(d, "010")

    def test_out_of_alphabet(self):
        with pytest.raises(AlphabetError):
            dfa_run(parity_dfa(), "012")

    def test_partial_transition(self):
        d = Dfa(["a"], ["0", "1"], "a", {"a": {"0": "a"}}, {"a"})
        assert not d.is_total()
        with pytest.raises(AutomatonError):
            dfa_run(d, "1")

    def test_base_dfa_examples(self):
        d = build_base_dfa(1)
        assert len(d.states) == 4
        assert dfa_accepts(d, "")
        assert not dfa_accepts(d, "0")
        assert dfa_accepts(d, "0010")


class TestMinimize:
    def test_merges_and_drops_unreachable(self):
        m = dfa_minimize(redundant_parity_dfa())
        assert len(m.states) == 2
        assert m.initial == "e1"
        assert dfa_equivalent(m, parity_dfa())

    def test_minimal_input_keeps_names(self):
        d = parity_dfa()
        assert set(dfa_minimize(d).states) == set(d.states)

    def test_idempotent(self):
        once = dfa_minimize(redundant_parity_dfa())
        assert dfa_minimize(once).states == once.states

    def test_reachable_states_order(self):
        assert reachable_states(redundant_parity_dfa()) == ["e1", "e2", "o1", "o2"]


class TestProduct:
    def test_operations(self):
        parity = parity_dfa()
        ends_zero = Dfa(["n", "z"], ["0", "1"], "n",
                        {"n": {"0": "z", "1": "n"}, "z": {"0": "z", "1": "n"}}, {"z"})
        for op, expected in [(ProductOp.INTERSECT, lambda a, b: a and b),
                             (ProductOp.UNION, lambda a, b: a or b),
                             (ProductOp.DIFF, lambda a, b: a and not b)]:
            product = dfa_product(parity, ends_zero, op)
            for w in enumerate_strings("01", 6):
                assert dfa_accepts(product, w) == expected(dfa_accepts(parity, w), dfa_accepts(ends_zero, w))

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetError):
            dfa_product(parity_dfa(), unary_cycle_dfa(2), "intersect")

    def test_complement(self):
        d = parity_dfa()
        c = dfa_complement(d)
        assert all(dfa_accepts(c, w) != dfa_accepts(d, w) for w in enumerate_strings("01", 5))


class TestFiniteLanguage:
    def test_enumeration_order(self):
        assert list(enumerate_strings("10", 2)) == ["", "0", "1", "00", "01", "10", "11"]

    def test_finite_language_dfa(self):
        language = {"", "01", "1"}
        d = finite_language_dfa(language, "01")
        for w in enumerate_strings("01", 5):
            assert dfa_accepts(d, w) == (w in language)
        assert DEAD_STATE in d.states

    def test_minimal_size(self):
        # {00}: ε, 0, 00 の状態と死状態
        assert len(finite_language_dfa({"00"}, "01").states) == 4


class TestUnaryCycle:
    def test_pure_cycle(self):
        profile = unary_minimal_cycle(unary_cycle_dfa(3))
        assert (profile.tail_length, profile.period) == (0, 3)

    def test_rho_shape(self):
        d = Dfa(["a", "b", "c"], ["0"], "a",
                {"a": {"0": "b"}, "b": {"0": "c"}, "c": {"0": "b"}}, {"c"})
        profile = unary_minimal_cycle(d)
        assert (profile.tail_length, profile.period) == (1, 2)

    def test_non_unary(self):
        with pytest.raises(AutomatonError):
            unary_minimal_cycle(parity_dfa())


class TestSelfReachable:
    def test_finite_language(self):
        d = finite_language_dfa({"00"}, "01")
        assert not is_self_reachable(d, "")
        assert not is_self_reachable(d, "00")
        assert is_self_reachable(d, "000")

    def test_cycle(self):
        assert is_self_reachable(unary_cycle_dfa(3), "00")


class TestPfa:
    def test_dfa_encoding_agrees(self):
        d = parity_dfa()
        p = pfa_from_dfa(d)
        for w in enumerate_strings("01", 5):
            assert pfa_accept_prob(p, w) == pytest.approx(1.0 if dfa_accepts(d, w) else 0.0)

    def test_coin(self):
        p = Pfa(["a", "b"], ["0"], [1.0, 0.0], {"0": [[0.5, 0.5], [0.0, 1.0]]}, {"b"})
        assert pfa_accept_prob(p, "00") == pytest.approx(0.75)
        assert np.asarray(p.rho).sum() == pytest.approx(1.0)


def residual_count(d: Dfa) -> int:
    """総当たりで数えた異なる剰余言語 w⁻¹L の個数（接頭辞・接尾辞とも長さ |Q| まで）"""
    n = len(d.states)
    suffixes = list(enumerate_strings(d.alphabet, n))
    signatures = {tuple(dfa_accepts(d, w + z) for z in suffixes) for w in enumerate_strings(d.alphabet, n)}
    return len(signatures)


class TestRandomDfas:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_minimal_size_is_residual_count(self, rng, n):
        for _ in range(10):
            d = random_dfa(n, "01", rng)
            assert len(dfa_minimize(d).states) == residual_count(d)

    def test_minimize_preserves_language(self, rng):
        for _ in range(10):
            d = random_dfa(6, "01", rng)
            minimal = dfa_minimize(d)
            assert len(minimal.states) <= len(d.states)
            for w in enumerate_strings("01", 7):
                assert dfa_accepts(minimal, w) == dfa_accepts(d, w)

    def test_product_preserves_language(self, rng):
        ops = {ProductOp.INTERSECT: lambda a, b: a and b,
               ProductOp.UNION: lambda a, b: a or b,
               ProductOp.DIFF: lambda a, b: a and not b}
        for _ in range(10):
            left, right = random_dfa(4, "01", rng), random_dfa(3, "01", rng)
            for op, expected in ops.items():
                product = dfa_product(left, right, op)
                for w in enumerate_strings("01", 7):
                    assert dfa_accepts(product, w) == expected(dfa_accepts(left, w), dfa_accepts(right, w))


class TestUnaryCycleDivisibility:
    def test_period_divides_every_return_length(self, rng):
        for _ in range(20):
            d = random_dfa(int(rng.integers(1, 9)), "0", rng)
            profile = unary_minimal_cycle(d)
            horizon = 3 * len(d.states)
            for state in reachable_states(d):
                for length in range(1, horizon + 1):
                    if run_from(d, state, "0" * length) == state:
                        assert length % profile.period == 0

    def test_minimal_period_divides_any_period(self, rng):
        for _ in range(20):
            d = random_dfa(int(rng.integers(1, 9)), "0", rng)
            assert unary_minimal_cycle(d).period % unary_minimal_cycle(dfa_minimize(d)).period == 0

    def test_unrolled_cycle(self):
        # 6 状態の周期で 0^{3k} を受理する DFA の最小周期は 3
        d = unary_cycle_dfa(6)
        d = Dfa(d.states, d.alphabet, d.initial, d.transitions, {d.states[0], d.states[3]})
        assert unary_minimal_cycle(d).period == 6
        assert unary_minimal_cycle(dfa_minimize(d)).period == 3


class TestPfaAssociativity:
    def test_concatenation_grouping(self, rng):
        for _ in range(10):
            p = random_pfa(4, "01", rng)
            for _ in range(5):
                u = "".join(rng.choice(["0", "1"], size=int(rng.integers(0, 6))))
                v = "".join(rng.choice(["0", "1"], size=int(rng.integers(0, 6))))
                m_u, m_v = np.eye(4), np.eye(4)
                for symbol in u:
                    m_u = m_u @ p.matrix(symbol)
                for symbol in v:
                    m_v = m_v @ p.matrix(symbol)
                whole = pfa_accept_prob(p, u + v)
                assert pfa_distribution(p, u) @ m_v @ p.eta == pytest.approx(whole, abs=1e-9)
                assert p.rho @ (m_u @ m_v) @ p.eta == pytest.approx(whole, abs=1e-9)
