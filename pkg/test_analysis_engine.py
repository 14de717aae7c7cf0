"""
解析エンジン（有界レポート、t_s、上界・下界、C_L、サイクル分解）のテスト
"""

import math
from collections import defaultdict

import numpy as np
import pytest

from analysis_engine import (accept_probabilities, bounded_cutpoint_report, check_ml_dfa_bound,
                             check_qfac_dfa_bound, check_ts_bound, compute_CL, count_ts,
                             derived_dfa, finite_classical_lower_bound, machines_agree_bounded,
                             qfac_cycle_factor)
from classical_automata import (dfa_minimize, dfa_run, enumerate_strings, finite_language_dfa,
                                unary_cycle_dfa)
from constructions import (BINARY, LhpParams, build_exact_finite_qfac, build_lhp_dfa, build_lhp_qfac,
                           build_modp_moqfa, lhp_membership, moqfa_as_qfac)
from quantum_models import MoQfa
from sample_generator import random_dfa, random_finite_language
from toolkit_errors import AlphabetError, AutomatonError, LinalgError


def constant_half() -> MoQfa:
    return MoQfa(["a", "b"], BINARY, np.array([1, 1]) / math.sqrt(2),
                 {s: np.eye(2) for s in BINARY}, {"a"})


class TestAcceptProbabilities:
    def test_order_and_values(self):
        words = [w for w, _ in accept_probabilities(constant_half(), 2)]
        assert words == list(enumerate_strings(BINARY, 2))

    def test_negative_length(self):
        with pytest.raises(ValueError):
            list(accept_probabilities(constant_half(), -1))


class TestReport:
    def test_exact_finite(self):
        language = {"0", "01"}
        report = bounded_cutpoint_report(build_exact_finite_qfac(language, BINARY), language.__contains__, 5)
        assert report.cut_point == pytest.approx(0.5)
        assert report.isolation == pytest.approx(0.5)
        assert report.hardest_member == "0"
        assert (report.member_count, report.nonmember_count) == (2, 61)

    def test_modp(self):
        m = build_modp_moqfa(5, 0.2)
        report = bounded_cutpoint_report(m, lambda w: len(w) % 5 == 0, 30)
        assert report.member_min_prob == pytest.approx(1.0)
        assert report.nonmember_max_prob <= 0.2
        assert report.isolated

    def test_constant_machine_is_not_isolated(self):
        report = bounded_cutpoint_report(constant_half(), lambda w: w == "", 4)
        assert report.isolation <= 0
        assert not report.isolated

    def test_no_members(self):
        report = bounded_cutpoint_report(constant_half(), lambda w: False, 2)
        assert report.member_count == 0
        assert report.hardest_member is None
        assert report.member_min_prob == 1.0

    def test_isolation_is_monotone_in_length(self):
        m = build_lhp_qfac(LhpParams(1, 3, 0.2))
        member = lhp_membership(1, 3)
        values = [bounded_cutpoint_report(m, member, n).isolation for n in range(9)]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


class TestAgreement:
    def test_same_machine(self):
        m = build_modp_moqfa(3, 0.2)
        assert machines_agree_bounded(m, m, 6, 1e-12) is None

    def test_first_difference(self):
        m = build_modp_moqfa(3, 0.2)
        d = unary_cycle_dfa(3)
        assert machines_agree_bounded(m, d, 9, 1e-3) == "0"
        assert machines_agree_bounded(m, d, 9, 0.1) is None

    def test_empty_word_can_differ(self, binary_all_dfa, binary_empty_dfa):
        assert machines_agree_bounded(binary_all_dfa, binary_empty_dfa, 3, 1e-9) == ""

    def test_alphabet_mismatch(self, binary_all_dfa):
        with pytest.raises(AlphabetError):
            machines_agree_bounded(binary_all_dfa, unary_cycle_dfa(2), 3, 1e-9)


class TestCountTs:
    def test_against_brute_force(self, rng):
        for _ in range(20):
            classical = random_dfa(3, BINARY, rng)
            min_dfa = dfa_minimize(random_dfa(3, BINARY, rng))
            seen = defaultdict(set)
            for w in enumerate_strings(BINARY, 8):
                seen[dfa_run(classical, w)].add(dfa_run(min_dfa, w))
            counts = count_ts(classical, min_dfa)
            assert counts == {s: len(seen[s]) for s in classical.states}
            assert sum(counts.values()) >= len(min_dfa.states)

    def test_derived_dfa_accepts_same_language(self, rng):
        classical = random_dfa(3, BINARY, rng)
        min_dfa = dfa_minimize(build_lhp_dfa(1, 2))
        assert machines_agree_bounded(derived_dfa(classical, min_dfa), min_dfa, 7, 0.0) is None


class TestBounds:
    def test_ml_bound_at_equality(self):
        check = check_ml_dfa_bound(27, 2, 2, 1, 1.0)
        assert check.rhs == pytest.approx(27)
        assert check.holds
        assert check.inputs['k'] == 2

    def test_ts_bound_violated(self):
        check = check_ts_bound(10, 1, 1.0)
        assert check.rhs == pytest.approx(9)
        assert not check.holds

    def test_qfac_bound_overflow(self):
        check = check_qfac_dfa_bound(10 ** 6, 2, 10 ** 6, 1e-3)
        assert math.isinf(check.rhs)
        assert check.holds

    def test_invalid_inputs(self):
        with pytest.raises(LinalgError):
            check_ml_dfa_bound(3, 2, 0, 1, 0.5)
        with pytest.raises(LinalgError):
            check_qfac_dfa_bound(3, 1, 1, 0.0)

    def test_bound_holds_for_constructions(self):
        for h, p in [(1, 2), (1, 3), (2, 3)]:
            qfac = build_lhp_qfac(LhpParams(h, p, 0.2))
            report = bounded_cutpoint_report(qfac, lhp_membership(h, p), 9)
            m = len(dfa_minimize(build_lhp_dfa(h, p)).states)
            assert check_qfac_dfa_bound(m, len(qfac.classical_states), qfac.dim, report.isolation).holds

    def test_ts_bound_for_finite_languages(self, rng):
        for _ in range(5):
            language = random_finite_language(BINARY, int(rng.integers(1, 4)), rng)
            qfac = build_exact_finite_qfac(language, BINARY)
            min_dfa = finite_language_dfa(language, BINARY)
            counts = count_ts(qfac.classical_part(), min_dfa)
            assert all(check_ts_bound(t, qfac.dim, 0.5).holds for t in counts.values())
            assert check_qfac_dfa_bound(len(min_dfa.states), len(qfac.classical_states), qfac.dim, 0.5).holds

    def test_bound_holds_for_modp_machine(self):
        m = moqfa_as_qfac(build_modp_moqfa(5, 0.2))
        report = bounded_cutpoint_report(m, lambda w: len(w) % 5 == 0, 30)
        assert report.isolation > 0
        check = check_qfac_dfa_bound(len(unary_cycle_dfa(5).states), len(m.classical_states), m.dim,
                                     report.isolation)
        assert check.holds
        assert check.lhs == 5

    def test_bound_holds_for_exact_finite_machine(self):
        language = {"", "1", "01", "110"}
        qfac = build_exact_finite_qfac(language, BINARY)
        report = bounded_cutpoint_report(qfac, language.__contains__, 6)
        assert report.isolation == pytest.approx(0.5)
        m = len(finite_language_dfa(language, BINARY).states)
        assert check_qfac_dfa_bound(m, len(qfac.classical_states), qfac.dim, report.isolation).holds


class TestLowerBounds:
    def test_compute_cl_examples(self):
        min_dfa = finite_language_dfa({"00"}, BINARY)
        assert compute_CL(min_dfa, "00") == 3
        assert compute_CL(min_dfa, "000") == 4
        assert compute_CL(min_dfa, "0000") == 4

    def test_compute_cl_reaches_lower_bound(self, rng):
        for _ in range(10):
            language = random_finite_language(BINARY, int(rng.integers(1, 5)), rng)
            min_dfa = finite_language_dfa(language, BINARY)
            longest = max(language, key=len)
            bound = finite_classical_lower_bound(language)
            assert compute_CL(min_dfa, longest + "0") == bound
            l = bound - 2
            values = [compute_CL(min_dfa, x) for x in enumerate_strings(BINARY, l + 1) if x]
            assert max(values) == bound
            assert max(values) <= len(build_exact_finite_qfac(language, BINARY).classical_states)

    def test_compute_cl_empty_word(self):
        with pytest.raises(AutomatonError):
            compute_CL(finite_language_dfa({"0"}, BINARY), "")

    def test_finite_classical_lower_bound(self):
        assert finite_classical_lower_bound({"0", "01"}) == 4
        assert finite_classical_lower_bound({""}) == 2
        with pytest.raises(AutomatonError):
            finite_classical_lower_bound(set())


class TestCycleFactor:
    @pytest.mark.parametrize("classical, language, expected", [
        (2, 3, (6, 2, 3)),
        (1, 3, (3, 1, 3)),
        (3, 3, (3, 3, 1)),
        (2, 6, (6, 2, 3)),
    ])
    def test_examples(self, classical, language, expected):
        assert qfac_cycle_factor(unary_cycle_dfa(classical), unary_cycle_dfa(language)) == expected

    def test_requires_unary(self, binary_all_dfa):
        with pytest.raises(AutomatonError):
            qfac_cycle_factor(binary_all_dfa, binary_all_dfa)
