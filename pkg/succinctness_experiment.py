"""
簡潔性実験モジュール
L(h,p) について最小 DFA・PFA 下界・1QFAC の状態数と観測 isolation を表にする
"""

from dataclasses import dataclass
from typing import Iterable, List

from analysis_engine import BoundCheck, bounded_cutpoint_report, check_qfac_dfa_bound
from classical_automata import dfa_minimize
from constructions import (DEFAULT_DRAW_BUDGET, DEFAULT_DRAWS_PER_SIZE, LhpParams,
                           build_lhp_dfa, build_lhp_qfac, lhp_membership)
from forbidden_constructions import detect_f_construction, detect_mm_forbidden
from logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class ExperimentRow:
    h: int
    p: int
    epsilon: float
    dfa_states: int
    pfa_lower_bound: int
    qfac_classical: int
    qfac_quantum: int
    mm_forbidden: bool
    f_construction: bool
    observed_isolation: float
    max_len: int
    seed: int

    def bound_check(self) -> BoundCheck:
        """観測 isolation を使った m ≤ k(1+2/ε)^{2n} の検査（isolation > 0 のときだけ意味を持つ）"""
        return check_qfac_dfa_bound(self.dfa_states, self.qfac_classical, self.qfac_quantum,
                                    self.observed_isolation)


def run_row(h: int, p: int, epsilon: float, max_len: int, seed: int = 7,
            budget: int = DEFAULT_DRAW_BUDGET, per_size: int = DEFAULT_DRAWS_PER_SIZE) -> ExperimentRow:
    """一つの (h, p) について構成・検出・計測を行う"""
    params = LhpParams(h, p, epsilon)
    min_dfa = dfa_minimize(build_lhp_dfa(h, p))
    qfac = build_lhp_qfac(params, seed, budget, per_size)
    report = bounded_cutpoint_report(qfac, lhp_membership(h, p), max_len)
    row = ExperimentRow(
        h=h,
        p=p,
        epsilon=epsilon,
        dfa_states=len(min_dfa.states),
        pfa_lower_bound=p,
        qfac_classical=len(qfac.classical_states),
        qfac_quantum=qfac.dim,
        mm_forbidden=detect_mm_forbidden(min_dfa) is not None,
        f_construction=detect_f_construction(min_dfa) is not None,
        observed_isolation=report.isolation,
        max_len=max_len,
        seed=seed,
    )
    logger.info(f"L({h},{p}): DFA {row.dfa_states}, 1QFAC ({row.qfac_classical}, {row.qfac_quantum}), "
                f"ε観測 {row.observed_isolation:.6f}")
    return row


def run_succinctness_experiment(h_list: Iterable[int], p_list: Iterable[int], epsilon: float,
                                max_len: int, seed: int = 7, budget: int = DEFAULT_DRAW_BUDGET,
                                per_size: int = DEFAULT_DRAWS_PER_SIZE) -> List[ExperimentRow]:
    """h_list × p_list の各組について 1 行ずつ（h ごとに p_list の順）"""
    p_values = list(p_list)
    return [run_row(h, p, epsilon, max_len, seed, budget, per_size)
            for h in h_list for p in p_values]
