"""
モデル検証モジュール
機械の型不変条件（ユニタリ性、射影性、確率性、全域性、ノルム）を検査し、違反を列挙する

違反は例外ではなくデータとして返す。すべての違反を一度に報告するため。
"""

from typing import Dict, List

import numpy as np

from classical_automata import Dfa, Pfa
from linalg_core import TAU_CHECK, TAU_NORM, TAU_PROB, norm, projector_defect, unitarity_defect
from logging_config import get_logger
from quantum_models import BLANK, MmQfa, MoQfa, MultiLetterQfa, Qfac

logger = get_logger(__name__)

# ログ出力時の配列の最大表示要素数
MAX_LOG_ITEMS = 10


class Violation:
    """検証違反を表すクラス"""

    def __init__(self, error_type: str, component: str, message: str, details: Dict = None):
        """
        Args:
            error_type: 違反タイプ（例: "unitarity", "projector", "stochastic"）
            component: 違反した構成要素（例: "unitaries.0", "accept_projectors.s1"）
            message: 違反メッセージ
            details: 測定された誤差などの詳細情報
        """
        self.error_type = error_type
        self.component = component
        self.message = message
        self.details = details or {}

    def get_comparison_key(self) -> str:
        """同一違反判定用のキー（タイプと構成要素）"""
        return f"{self.error_type}:{self.component}"

    def __str__(self):
        return f"[{self.error_type}] {self.component}: {self.message}"

    def __repr__(self):
        return f"Violation({self.error_type!r}, {self.component!r})"


def truncate_for_log(items: List, max_items: int = MAX_LOG_ITEMS) -> str:
    """
    ログ出力用にリストを適切な長さに切り詰めて文字列化

    Args:
        items: 切り詰める対象のリスト
        max_items: 最大表示要素数

    Returns:
        切り詰められた文字列表現
    """
    truncated = str(items[:max_items])
    if len(items) > max_items:
        truncated += '...'
    return truncated


def validate(machine, tol: float = TAU_CHECK) -> List[Violation]:
    """
    機械の種類に応じたすべての検査を実行

    Args:
        machine: Dfa, Pfa, MoQfa, MmQfa, MultiLetterQfa, Qfac のいずれか
        tol: ユニタリ性・射影性・確率性の許容誤差

    Returns:
        Violation のリスト（空なら不変条件をすべて満たす）
    """
    if isinstance(machine, Dfa):
        violations = check_dfa(machine)
    elif isinstance(machine, Pfa):
        violations = check_pfa(machine, tol)
    elif isinstance(machine, MmQfa):
        violations = check_mmqfa(machine, tol)
    elif isinstance(machine, MoQfa):
        violations = check_moqfa(machine, tol)
    elif isinstance(machine, MultiLetterQfa):
        violations = check_multiletter(machine, tol)
    elif isinstance(machine, Qfac):
        violations = check_qfac(machine, tol)
    else:
        raise TypeError(f"未対応のモデルです: {type(machine).__name__}")

    if violations:
        logger.info(f"検証違反 {len(violations)} 件: {truncate_for_log([repr(v) for v in violations])}")
    return violations


def check_dfa(d: Dfa) -> List[Violation]:
    """DFA の全域性と状態集合の整合性"""
    violations = []
    states = set(d.states)

    if d.initial not in states:
        violations.append(Violation("membership", "initial",
                                    f"初期状態 {d.initial} が状態集合にありません"))

    extra = sorted(d.accepting - states)
    if extra:
        violations.append(Violation("membership", "accepting",
                                    f"受理状態 {extra} が状態集合にありません", {'states': extra}))

    for s in d.states:
        row = d.transitions.get(s, {})
        missing = [symbol for symbol in d.alphabet if symbol not in row]
        if missing:
            violations.append(Violation("totality", f"transitions.{s}",
                                        f"記号 {missing} の遷移がありません", {'missing': missing}))
        unknown = sorted({t for t in row.values() if t not in states})
        if unknown:
            violations.append(Violation("membership", f"transitions.{s}",
                                        f"遷移先 {unknown} が状態集合にありません", {'targets': unknown}))
    return violations


def check_pfa(p: Pfa, tol: float) -> List[Violation]:
    """PFA の初期分布と各 M(σ) の行確率性"""
    violations = []
    n = len(p.states)

    if p.rho.shape != (n,):
        violations.append(Violation("shape", "rho", f"初期分布の長さ {p.rho.shape} が状態数 {n} と一致しません"))
    else:
        if np.any(p.rho < -tol) or abs(float(p.rho.sum()) - 1.0) > TAU_PROB:
            violations.append(Violation("distribution", "rho",
                                        f"初期分布が確率分布ではありません（総和 {float(p.rho.sum()):.12f}）",
                                        {'sum': float(p.rho.sum())}))

    for symbol in p.alphabet:
        if symbol not in p.matrices:
            violations.append(Violation("totality", f"matrices.{symbol}", "確率行列がありません"))
            continue
        m = p.matrices[symbol]
        if m.shape != (n, n):
            violations.append(Violation("shape", f"matrices.{symbol}",
                                        f"行列の形 {m.shape} が ({n}, {n}) ではありません"))
            continue
        for i, row in enumerate(m):
            row_sum = float(row.sum())
            if np.any(row < -tol) or abs(row_sum - 1.0) > TAU_PROB:
                violations.append(Violation("stochastic", f"matrices.{symbol}.row{i}",
                                            f"行 {i}（状態 {p.states[i]}）が確率ベクトルではありません（総和 {row_sum:.12f}）",
                                            {'row': i, 'sum': row_sum}))

    extra = sorted(p.accepting - set(p.states))
    if extra:
        violations.append(Violation("membership", "accepting", f"受理状態 {extra} が状態集合にありません"))
    return violations


def _check_state_vector(v, dim: int, component: str) -> List[Violation]:
    if v.shape != (dim,):
        return [Violation("shape", component, f"状態ベクトルの次元 {v.shape} が {dim} ではありません")]
    length = norm(v)
    if abs(length - 1.0) > TAU_NORM:
        return [Violation("norm", component, f"状態ベクトルのノルムが 1 ではありません: {length:.12f}",
                          {'norm': length})]
    return []


def _check_unitary(u, dim: int, component: str, tol: float) -> List[Violation]:
    if u.shape != (dim, dim):
        return [Violation("shape", component, f"行列の形 {u.shape} が ({dim}, {dim}) ではありません")]
    defect = unitarity_defect(u)
    if defect > tol:
        return [Violation("unitarity", component, f"ユニタリではありません（誤差 {defect:.3e}）",
                          {'defect': defect})]
    return []


def _check_projector(p, dim: int, component: str, tol: float) -> List[Violation]:
    if p.shape != (dim, dim):
        return [Violation("shape", component, f"行列の形 {p.shape} が ({dim}, {dim}) ではありません")]
    defect = projector_defect(p)
    if defect > tol:
        return [Violation("projector", component, f"射影ではありません（誤差 {defect:.3e}）",
                          {'defect': defect})]
    return []


def _check_basis_subset(subset, basis_states, component: str) -> List[Violation]:
    extra = sorted(set(subset) - set(basis_states))
    if extra:
        return [Violation("membership", component, f"基底状態 {extra} が基底集合にありません")]
    return []


def check_moqfa(m: MoQfa, tol: float) -> List[Violation]:
    """MO-1QFA のユニタリ性と初期状態"""
    violations = _check_state_vector(m.initial_state, m.dim, "initial_state")
    for symbol in m.alphabet:
        if symbol not in m.unitaries:
            violations.append(Violation("totality", f"unitaries.{symbol}", "ユニタリがありません"))
        else:
            violations.extend(_check_unitary(m.unitaries[symbol], m.dim, f"unitaries.{symbol}", tol))
    violations.extend(_check_basis_subset(m.accepting, m.basis_states, "accepting"))
    return violations


def check_mmqfa(m: MmQfa, tol: float) -> List[Violation]:
    """MM-1QFA: MO-1QFA の検査に加えて終端ユニタリと受理・拒否集合の素性"""
    violations = _check_state_vector(m.initial_state, m.dim, "initial_state")
    for symbol in m.alphabet:
        if symbol not in m.unitaries:
            violations.append(Violation("totality", f"unitaries.{symbol}", "ユニタリがありません"))
        else:
            violations.extend(_check_unitary(m.unitaries[symbol], m.dim, f"unitaries.{symbol}", tol))
    violations.extend(_check_unitary(m.end_marker_unitary, m.dim, "end_marker_unitary", tol))
    violations.extend(_check_basis_subset(m.accepting, m.basis_states, "accepting"))
    violations.extend(_check_basis_subset(m.rejecting, m.basis_states, "rejecting"))
    overlap = sorted(m.accepting & m.rejecting)
    if overlap:
        violations.append(Violation("disjointness", "rejecting",
                                    f"受理集合と拒否集合が交わっています: {overlap}", {'overlap': overlap}))
    return violations


def required_windows(k: int, alphabet) -> List[str]:
    """走査中に現れうる窓 Λ^{k−i}·w（|w| = i, 1 ≤ i ≤ k）"""
    windows = []
    layer = [""]
    for i in range(1, k + 1):
        layer = [w + symbol for w in layer for symbol in sorted(alphabet)]
        windows.extend(BLANK * (k - i) + w for w in layer)
    return windows


def check_multiletter(m: MultiLetterQfa, tol: float) -> List[Violation]:
    """多文字 1QFA: 必要な窓がすべてあり、どれもユニタリであること"""
    violations = []
    if m.k < 1:
        return [Violation("window", "k", f"k は 1 以上でなければなりません: {m.k}")]
    violations.extend(_check_state_vector(m.initial_state, m.dim, "initial_state"))
    for window in required_windows(m.k, m.alphabet):
        if window not in m.unitaries:
            violations.append(Violation("window", f"unitaries.{window}", "窓のユニタリがありません"))
    for window, u in m.unitaries.items():
        if len(window) != m.k:
            violations.append(Violation("window", f"unitaries.{window}", f"窓の長さが k={m.k} ではありません"))
            continue
        violations.extend(_check_unitary(u, m.dim, f"unitaries.{window}", tol))
    violations.extend(_check_basis_subset(m.accepting, m.basis_states, "accepting"))
    return violations


def check_qfac(m: Qfac, tol: float) -> List[Violation]:
    """1QFAC: 古典遷移の全域性、全 U_{sσ} のユニタリ性、全 P_{s,acc} の射影性"""
    violations = []
    states = set(m.classical_states)
    if m.initial_classical not in states:
        violations.append(Violation("membership", "initial_classical",
                                    f"初期古典状態 {m.initial_classical} が状態集合にありません"))
    violations.extend(_check_state_vector(m.initial_quantum, m.dim, "initial_quantum"))

    for s in m.classical_states:
        row = m.transitions.get(s, {})
        for symbol in m.alphabet:
            if symbol not in row:
                violations.append(Violation("totality", f"transitions.{s}.{symbol}", "古典遷移がありません"))
            elif row[symbol] not in states:
                violations.append(Violation("membership", f"transitions.{s}.{symbol}",
                                            f"遷移先 {row[symbol]} が状態集合にありません"))
            key = f"unitaries.{s}|{symbol}"
            if (s, symbol) not in m.unitaries:
                violations.append(Violation("totality", key, "ユニタリがありません"))
            else:
                violations.extend(_check_unitary(m.unitaries[(s, symbol)], m.dim, key, tol))
        if s not in m.accept_projectors:
            violations.append(Violation("totality", f"accept_projectors.{s}", "受理射影がありません"))
        else:
            violations.extend(_check_projector(m.accept_projectors[s], m.dim, f"accept_projectors.{s}", tol))
    return violations
