"""
線形代数カーネルモジュール
密な複素行列・状態ベクトルの検証、テンソル積、射影測定を提供
"""

import math
from typing import Iterable, List, Optional, Sequence

import numpy as np
import numpy.typing as npt

from logging_config import get_logger
from toolkit_errors import LinalgError, MeasurementError

logger = get_logger(__name__)

Matrix = npt.NDArray[np.complex128]
StateVector = npt.NDArray[np.complex128]

# 既定の許容誤差
TAU_NORM = 1e-9   # 状態ノルム
TAU_PROB = 1e-9   # 確率の総和
TAU_CHECK = 1e-9  # ユニタリ性・射影性の検査


def as_matrix(data) -> Matrix:
    """任意の入れ子配列を読み取り専用の複素行列に変換"""
    m = np.array(data, dtype=np.complex128)
    if m.ndim != 2:
        raise LinalgError(f"行列は2次元でなければなりません: ndim={m.ndim}")
    m.setflags(write=False)
    return m


def as_state(data) -> StateVector:
    """任意の配列を読み取り専用の複素ベクトルに変換"""
    v = np.array(data, dtype=np.complex128).reshape(-1)
    v.setflags(write=False)
    return v


def max_norm(m) -> float:
    """要素ごとの絶対値の最大（空行列は 0）"""
    arr = np.asarray(m)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


def _require_square(m, what: str) -> np.ndarray:
    arr = np.asarray(m)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise LinalgError(f"{what}: 正方行列が必要です: shape={arr.shape}",
                          {'shape': tuple(arr.shape)})
    return arr


def tensor(a, b) -> Matrix:
    """テンソル積 A⊗B（ブロック (i,j) が A_ij·B）"""
    return as_matrix(np.kron(np.asarray(a), np.asarray(b)))


def unitarity_defect(m) -> float:
    """max(‖MM† − I‖_max, ‖M†M − I‖_max)"""
    arr = _require_square(m, "unitarity_defect")
    ident = np.eye(arr.shape[0])
    adj = arr.conj().T
    return max(max_norm(arr @ adj - ident), max_norm(adj @ arr - ident))


def is_unitary(m, tol: float = TAU_CHECK) -> bool:
    """ユニタリ行列かどうか"""
    return unitarity_defect(m) <= tol


def projector_defect(p) -> float:
    """max(‖P − P†‖_max, ‖P² − P‖_max)"""
    arr = _require_square(p, "projector_defect")
    return max(max_norm(arr - arr.conj().T), max_norm(arr @ arr - arr))


def is_projector(p, tol: float = TAU_CHECK) -> bool:
    """射影行列かどうか"""
    return projector_defect(p) <= tol


def norm(v) -> float:
    return float(np.linalg.norm(np.asarray(v)))


def measure(family: Sequence, v, tol: float = TAU_CHECK,
            tau_norm: float = TAU_NORM) -> List[float]:
    """
    射影測定の各結果の確率 ‖P_i v‖² を返す

    Args:
        family: 射影行列の列（総和が I、互いに直交）
        v: 単位ノルムの状態ベクトル
        tol: 射影族の検査に用いる許容誤差
        tau_norm: 状態ノルムの許容誤差

    Returns:
        確率のリスト

    Raises:
        MeasurementError: 族が不完全・非直交、または v が単位ノルムでない
    """
    vec = np.asarray(v, dtype=np.complex128).reshape(-1)
    if len(family) == 0:
        raise MeasurementError("射影族が空です")
    dim = vec.shape[0]
    total = np.zeros((dim, dim), dtype=np.complex128)
    for i, p in enumerate(family):
        arr = _require_square(p, f"family[{i}]")
        if arr.shape[0] != dim:
            raise MeasurementError(f"family[{i}] の次元 {arr.shape[0]} が状態の次元 {dim} と一致しません",
                                   {'index': i})
        defect = projector_defect(arr)
        if defect > tol:
            raise MeasurementError(f"family[{i}] は射影ではありません（誤差 {defect:.3e}）",
                                   {'index': i, 'defect': defect})
        total = total + arr
    completeness = max_norm(total - np.eye(dim))
    if completeness > tol:
        raise MeasurementError(f"射影族の総和が I になりません（誤差 {completeness:.3e}）",
                               {'defect': completeness})
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            overlap = max_norm(np.asarray(family[i]) @ np.asarray(family[j]))
            if overlap > tol:
                raise MeasurementError(f"family[{i}] と family[{j}] が直交しません（誤差 {overlap:.3e}）",
                                       {'pair': (i, j), 'defect': overlap})
    length = norm(vec)
    if abs(length - 1.0) > tau_norm:
        raise MeasurementError(f"状態ベクトルのノルムが 1 ではありません: {length:.12f}",
                               {'norm': length})
    return [float(np.vdot(pv, pv).real) for pv in (np.asarray(p) @ vec for p in family)]


def packing_bound(theta: float, n: int) -> float:
    """
    C^n の単位球に θ 以上離れて置ける点の個数の上界 (1 + 2/θ)^{2n}

    オーバーフローする場合は inf を返す。
    """
    if theta <= 0:
        raise LinalgError(f"theta は正でなければなりません: {theta}", {'theta': theta})
    if n < 1:
        raise LinalgError(f"n は 1 以上でなければなりません: {n}", {'n': n})
    try:
        return float((1.0 + 2.0 / theta) ** (2 * n))
    except OverflowError:
        return math.inf


def rotation(theta: float) -> Matrix:
    """平面回転 [[cos, −sin], [sin, cos]]"""
    c, s = math.cos(theta), math.sin(theta)
    return as_matrix([[c, -s], [s, c]])


def direct_sum(blocks: Iterable) -> Matrix:
    """ブロック対角行列（直和）"""
    arrays = [np.asarray(b, dtype=np.complex128) for b in blocks]
    size = sum(a.shape[0] for a in arrays)
    out = np.zeros((size, size), dtype=np.complex128)
    offset = 0
    for a in arrays:
        k = a.shape[0]
        out[offset:offset + k, offset:offset + k] = a
        offset += k
    return as_matrix(out)


def basis_projector(dim: int, indices: Iterable[int]) -> Matrix:
    """指定した基底ベクトルが張る部分空間への射影"""
    diag = np.zeros(dim, dtype=np.complex128)
    for i in indices:
        diag[i] = 1.0
    return as_matrix(np.diag(diag))


def basis_vector(dim: int, index: int) -> StateVector:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return as_state(v)


def householder_to_first_basis(u) -> Matrix:
    """
    単位ベクトル u を |0⟩ に移すユニタリ（Householder 反射、u が |0⟩ なら I）
    """
    vec = np.asarray(u, dtype=np.complex128).reshape(-1)
    dim = vec.shape[0]
    e0 = np.zeros(dim, dtype=np.complex128)
    e0[0] = 1.0
    # 位相を揃えてから反射する
    phase = vec[0] / abs(vec[0]) if abs(vec[0]) > 0 else 1.0
    w = vec / phase - e0
    wn = np.linalg.norm(w)
    if wn < 1e-15:
        return as_matrix(np.eye(dim) / phase)
    w = w / wn
    reflect = np.eye(dim, dtype=np.complex128) - 2.0 * np.outer(w, w.conj())
    return as_matrix(reflect / phase)


def projector_frame(p):
    """
    射影 P の値域を先頭 rank 列が張る正規直交フレーム W を返す

    P = W·diag(1,…,1,0,…,0)·W† となる。

    Returns:
        (W, rank)
    """
    arr = _require_square(p, "projector_frame")
    u, s, _ = np.linalg.svd(arr)
    rank = int(np.sum(s > 0.5))
    return as_matrix(u), rank


def is_coordinate_projector(p, tol: float = TAU_CHECK) -> bool:
    """対角要素が 0/1 の対角射影かどうか"""
    arr = np.asarray(p)
    off = arr - np.diag(np.diag(arr))
    if max_norm(off) > tol:
        return False
    diag = np.diag(arr)
    return bool(np.all((np.abs(diag) <= tol) | (np.abs(diag - 1.0) <= tol)))


def random_unitary(dim: int, rng: np.random.Generator) -> Matrix:
    """Haar 分布に従うランダムユニタリ（複素ガウス行列の QR 分解）"""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    phases = d / np.abs(d)
    return as_matrix(q * phases)


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return as_state(v / np.linalg.norm(v))


def random_projector(dim: int, rank: int, rng: np.random.Generator) -> Matrix:
    """ランダムな rank 次元部分空間への射影"""
    u = np.asarray(random_unitary(dim, rng))
    cols = u[:, :rank]
    return as_matrix(cols @ cols.conj().T)


def recurrence_search(u, eps: float, n_min: int = 2, n_max: int = 10**6) -> Optional[int]:
    """
    ‖I − Uⁿ‖_max < eps となる最初の n ∈ [n_min, n_max] を探す

    見つからなければ None（非存在の主張ではない）。
    """
    arr = _require_square(u, "recurrence_search")
    ident = np.eye(arr.shape[0])
    power = np.linalg.matrix_power(arr, n_min)
    for n in range(n_min, n_max + 1):
        if max_norm(ident - power) < eps:
            logger.debug("再帰探索: n=%d で到達", n)
            return n
        power = power @ arr
    logger.info(f"再帰探索: n ≤ {n_max} では見つかりませんでした")
    return None
