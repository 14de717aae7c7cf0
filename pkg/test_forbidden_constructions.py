"""
禁止構成（MM-1QFA 禁止構成・F 構成）検出のテスト
"""

import pytest

from classical_automata import Dfa, dfa_minimize, finite_language_dfa, unary_cycle_dfa
from constructions import build_lhp_dfa, lhp_known_witnesses
from forbidden_constructions import (ForbiddenWitness, WitnessKind, detect_f_construction,
                                     detect_mm_forbidden, replay_witness)

LHP_GRID = [(h, p) for h in (1, 2, 3) for p in (2, 3, 5, 7)]


@pytest.mark.parametrize("h, p", LHP_GRID)
def test_lhp_dfa_has_both_constructions(h, p):
    d = dfa_minimize(build_lhp_dfa(h, p))
    mm = detect_mm_forbidden(d)
    f = detect_f_construction(d)
    assert mm is not None and mm.kind == WitnessKind.MM_FORBIDDEN
    assert f is not None and f.kind == WitnessKind.F_CONSTRUCTION
    assert replay_witness(d, mm)
    assert replay_witness(d, f)


@pytest.mark.parametrize("h, p", [(1, 2), (2, 5), (3, 7)])
def test_known_witnesses_replay(h, p):
    d = dfa_minimize(build_lhp_dfa(h, p))
    for witness in lhp_known_witnesses(h, p):
        assert replay_witness(d, witness), witness.describe()


def test_unary_cycle_has_no_witness():
    d = unary_cycle_dfa(3)
    assert detect_mm_forbidden(d) is None
    assert detect_f_construction(d) is None


def test_one_state_dfa_has_no_witness(binary_all_dfa):
    assert detect_mm_forbidden(binary_all_dfa) is None
    assert detect_f_construction(binary_all_dfa) is None


def test_finite_language_has_no_witness():
    # {0}: p → p0 → dead。x=0 で (p, p0) は dead に合流するが dead から戻れない
    d = finite_language_dfa({"0"}, "01")
    mm = detect_mm_forbidden(d)
    assert mm is None
    f = detect_f_construction(d)
    assert f is None


def test_minimal_witness_for_simple_merge():
    # a -0-> b, b -0-> b, b -1-> a, a -1-> a
    d = Dfa(["a", "b"], ["0", "1"], "a",
            {"a": {"0": "b", "1": "a"}, "b": {"0": "b", "1": "a"}}, {"b"})
    mm = detect_mm_forbidden(d)
    assert mm == ForbiddenWitness("a", "b", "0", "1", WitnessKind.MM_FORBIDDEN)
    assert replay_witness(d, mm)
    # y は a, b を両方固定しなければならないが、"0" も "1" も合流させる
    assert detect_f_construction(d) is None


def test_replay_rejects_wrong_witness():
    d = dfa_minimize(build_lhp_dfa(1, 2))
    bogus = ForbiddenWitness("q0,0", "q1,0", "1", "1", WitnessKind.MM_FORBIDDEN)
    assert not replay_witness(d, bogus)
