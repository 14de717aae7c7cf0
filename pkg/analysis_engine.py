"""
解析エンジンモジュール
有界長の cut-point / isolation 計測、同値類数 t_s、C_L(x)、状態数の上界・下界の検査を計算
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from classical_automata import (Dfa, check_same_alphabet, check_word, is_self_reachable,
                                synchronized_product, unary_minimal_cycle)
from linalg_core import packing_bound
from logging_config import get_logger
from quantum_models import make_scanner
from toolkit_errors import AutomatonError, CycleFactorError, LinalgError

logger = get_logger(__name__)


@dataclass(frozen=True)
class RecognitionReport:
    """
    長さ max_len までの全文字列に対する受理確率の極値

    isolation ≤ 0 はその長さまでに隔離が観測されなかったことを表す。
    """
    max_len: int
    member_min_prob: float
    nonmember_max_prob: float
    cut_point: float
    isolation: float
    hardest_member: Optional[str]
    hardest_nonmember: Optional[str]
    member_count: int
    nonmember_count: int

    @property
    def isolated(self) -> bool:
        return self.isolation > 0


@dataclass(frozen=True)
class BoundCheck:
    """lhs ≤ rhs の形の状態数の不等式"""
    bound_name: str
    lhs: float
    rhs: float
    holds: bool
    inputs: Dict[str, float] = field(default_factory=dict)


def accept_probabilities(machine, max_len: int) -> Iterator[Tuple[str, float]]:
    """
    長さ優先・辞書順で max_len 以下の全文字列とその受理確率を列挙

    各長さの設定を保持して一記号ずつ進めるので、接頭辞の計算は共有される。
    """
    if max_len < 0:
        raise ValueError(f"max_len は 0 以上でなければなりません: {max_len}")
    scanner = make_scanner(machine)
    symbols = sorted(scanner.alphabet)
    level = [("", scanner.start())]
    for length in range(max_len + 1):
        for word, config in level:
            yield word, scanner.accept_prob(config)
        if length == max_len:
            break
        level = [(word + s, scanner.advance(config, s)) for word, config in level for s in symbols]


def bounded_cutpoint_report(machine, membership: Callable[[str], bool], max_len: int) -> RecognitionReport:
    """
    所属判定 membership に対する cut-point λ と isolation ε を長さ max_len まで計測

    λ = (所属の最小確率 + 非所属の最大確率)/2、ε = (所属の最小確率 − 非所属の最大確率)/2。
    所属文字列がなければ最小確率 1、非所属がなければ最大確率 0 とする。
    """
    member_min, nonmember_max = 1.0, 0.0
    hardest_member = hardest_nonmember = None
    members = nonmembers = 0
    for word, prob in accept_probabilities(machine, max_len):
        if membership(word):
            members += 1
            if hardest_member is None or prob < member_min:
                member_min, hardest_member = prob, word
        else:
            nonmembers += 1
            if hardest_nonmember is None or prob > nonmember_max:
                nonmember_max, hardest_nonmember = prob, word

    report = RecognitionReport(
        max_len=max_len,
        member_min_prob=member_min,
        nonmember_max_prob=nonmember_max,
        cut_point=(member_min + nonmember_max) / 2,
        isolation=(member_min - nonmember_max) / 2,
        hardest_member=hardest_member,
        hardest_nonmember=hardest_nonmember,
        member_count=members,
        nonmember_count=nonmembers,
    )
    logger.info(f"有界レポート: max_len={max_len}, 所属 {members} 件, 非所属 {nonmembers} 件, "
                f"λ={report.cut_point:.6f}, ε={report.isolation:.6f}")
    return report


def machines_agree_bounded(a, b, max_len: int, tol: float) -> Optional[str]:
    """
    長さ max_len までの全文字列で受理確率が tol 以内で一致するか

    Returns:
        一致しない最短・辞書順最小の文字列（すべて一致なら None）
    """
    check_same_alphabet(make_scanner(a).alphabet, make_scanner(b).alphabet)
    for (word, pa), (_, pb) in zip(accept_probabilities(a, max_len), accept_probabilities(b, max_len)):
        if abs(pa - pb) > tol:
            logger.debug("不一致: %r (%.12f vs %.12f)", word, pa, pb)
            return word
    return None


def derived_dfa(classical_part: Dfa, min_dfa: Dfa) -> Dfa:
    """古典部分と最小 DFA の到達可能な同期積（受理は最小 DFA 側）"""
    return synchronized_product(classical_part, min_dfa, lambda a, b: b)


def _reachable_pairs(classical_part: Dfa, min_dfa: Dfa) -> List[Tuple[str, str]]:
    check_same_alphabet(classical_part.alphabet, min_dfa.alphabet)
    start = (classical_part.initial, min_dfa.initial)
    order, seen = [start], {start}
    i = 0
    while i < len(order):
        s, q = order[i]
        i += 1
        for symbol in classical_part.alphabet:
            nxt = (classical_part.step(s, symbol), min_dfa.step(q, symbol))
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
    return order


def count_ts(classical_part: Dfa, min_dfa: Dfa) -> Dict[str, int]:
    """
    各古典状態 s について A_s = {x : s_x = s} の ≡_L 同値類の個数 t_s

    (s, q) が同期積で到達可能な最小 DFA 状態 q の個数に等しい。
    """
    counts = {s: 0 for s in classical_part.states}
    for s, _ in _reachable_pairs(classical_part, min_dfa):
        counts[s] += 1
    logger.debug("t_s: %s（合計 %d）", counts, sum(counts.values()))
    return counts


def check_qfac_dfa_bound(m: int, k: int, n: int, eps: float) -> BoundCheck:
    """m ≤ k(1+2/ε)^{2n}"""
    rhs = k * packing_bound(eps, n)
    return BoundCheck("qfac_dfa", m, rhs, m <= rhs, {'m': m, 'k': k, 'n': n, 'eps': eps})


def check_ml_dfa_bound(m: int, sigma_size: int, k: int, n: int, eps: float) -> BoundCheck:
    """m ≤ (Σ_{i=0}^{k−1}|Σ|^i)(1+2/ε)^{2n}"""
    if k < 1:
        raise LinalgError(f"k は 1 以上でなければなりません: {k}", {'k': k})
    if sigma_size < 1:
        raise LinalgError(f"|Σ| は 1 以上でなければなりません: {sigma_size}", {'sigma_size': sigma_size})
    windows = sum(sigma_size ** i for i in range(k))
    rhs = windows * packing_bound(eps, n)
    return BoundCheck("ml_dfa", m, rhs, m <= rhs,
                      {'m': m, 'sigma_size': sigma_size, 'k': k, 'n': n, 'eps': eps})


def check_ts_bound(t_s: int, n: int, eps: float) -> BoundCheck:
    """一つの古典状態あたり t_s ≤ (1+2/ε)^{2n}"""
    rhs = packing_bound(eps, n)
    return BoundCheck("ts", t_s, rhs, t_s <= rhs, {'t_s': t_s, 'n': n, 'eps': eps})


def compute_CL(min_dfa: Dfa, x: str) -> int:
    """
    C_L(x): 接頭辞 x[:0]…x[:|x|] を自己到達性の等しい連続区間に分け、
    自己到達的でない区間の大きさの和と自己到達的な区間の個数を足したもの
    """
    if not x:
        raise AutomatonError("C_L(x) は空でない x に対してのみ定義されます")
    check_word(min_dfa.alphabet, x)
    statuses = [is_self_reachable(min_dfa, x[:j]) for j in range(len(x) + 1)]
    total = 0
    run_start = 0
    for j in range(1, len(statuses) + 1):
        if j == len(statuses) or statuses[j] != statuses[run_start]:
            total += 1 if statuses[run_start] else j - run_start
            run_start = j
    return total


def finite_classical_lower_bound(language) -> int:
    """有限言語を認識する 1QFAC の古典状態数の下界 max|x| + 2"""
    words = list(language)
    if not words:
        raise AutomatonError("空の言語には下界を定義しません")
    return max(len(w) for w in words) + 2


def qfac_cycle_factor(classical_part: Dfa, min_dfa: Dfa) -> Tuple[int, int, int]:
    """
    単項言語で l_D = l_A·l₀ を満たす (l_D, l_A, l₀)

    l_D は古典部分と最小 DFA の導出 DFA の最小サイクル長、l_A は古典部分の最小サイクル長。

    Raises:
        CycleFactorError: l_D が l_A で割り切れない
    """
    if len(classical_part.alphabet) != 1 or len(min_dfa.alphabet) != 1:
        raise AutomatonError("単項アルファベットが必要です")
    l_d = unary_minimal_cycle(derived_dfa(classical_part, min_dfa)).period
    l_a = unary_minimal_cycle(classical_part).period
    if l_d % l_a != 0:
        raise CycleFactorError(f"サイクル長の比が整数になりません: l_D={l_d}, l_A={l_a}",
                               {'l_D': l_d, 'l_A': l_a})
    return l_d, l_a, l_d // l_a
