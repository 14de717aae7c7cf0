"""
構成モジュール
L(h,p) 族の DFA、mod-p MO-1QFA、DFA×MO-1QFA の組合せ、有限言語の厳密 1QFAC、
k 文字 1QFA → 1QFAC、可逆 1QFAC → MO-1QFA の変換を提供
"""

import itertools
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from classical_automata import Dfa, check_same_alphabet, check_word
from forbidden_constructions import ForbiddenWitness, WitnessKind
from linalg_core import (as_matrix, basis_projector, basis_vector, direct_sum,
                         householder_to_first_basis, is_coordinate_projector,
                         projector_frame, rotation)
from logging_config import get_logger
from quantum_models import BLANK, MoQfa, MultiLetterQfa, Qfac
from toolkit_errors import ConstructionError, ModPSearchError, NonReversibleError

logger = get_logger(__name__)

BINARY = ("0", "1")
REJECT_STATE = "qr"

# mod-p 乗数探索の既定予算
DEFAULT_DRAW_BUDGET = 200
DEFAULT_DRAWS_PER_SIZE = 20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def _check_epsilon(epsilon: float):
    if not 0 < epsilon < 1:
        raise ConstructionError(f"epsilon は (0, 1) の範囲でなければなりません: {epsilon}",
                                {'epsilon': epsilon})


def _check_prime(p: int):
    if not is_prime(p):
        raise ConstructionError(f"p は素数でなければなりません: {p}", {'p': p})


def _check_h(h: int):
    if h < 1:
        raise ConstructionError(f"h は 1 以上でなければなりません: {h}", {'h': h})


@dataclass(frozen=True)
class LhpParams:
    """L(h,p) = (1*00*10^h)* ∩ {長さが p の倍数} と許容誤差 ε"""
    h: int
    p: int
    epsilon: float

    def __post_init__(self):
        _check_h(self.h)
        _check_prime(self.p)
        _check_epsilon(self.epsilon)


@dataclass(frozen=True)
class ModPMoQfaParams:
    """
    mod-p MO-1QFA の回転乗数と証明書

    certificate は z ∈ [1, p−1] における 0^z の受理確率の最大値。
    """
    p: int
    epsilon: float
    rotation_multipliers: Tuple[int, ...]
    certificate: float
    seed: Optional[int] = None
    draws: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'rotation_multipliers', tuple(int(g) for g in self.rotation_multipliers))
        if not self.rotation_multipliers:
            raise ConstructionError("回転乗数が空です")
        for g in self.rotation_multipliers:
            if not _valid_multiplier(self.p, g):
                raise ConstructionError(f"回転乗数 {g} は p={self.p} に対して使えません",
                                        {'multiplier': g, 'p': self.p})

    @property
    def block_count(self) -> int:
        return len(self.rotation_multipliers)


# ---------------------------------------------------------------- L(h,p)

def _base_target(h: int, i: int, symbol: str) -> Optional[int]:
    """D₁ の q_i から symbol を読んだ先の番号（None は qr）"""
    if i == 0:
        return 0 if symbol == "1" else 1
    if i == 1:
        return 1 if symbol == "0" else 2
    if symbol == "1":
        return None
    return i + 1 if i <= h else 0


def build_base_dfa(h: int) -> Dfa:
    """
    (1*00*10^h)* の最小 DFA D₁

    状態は q0…q{h+1} と全拒否状態 qr。q0 が初期かつ唯一の受理状態。
    """
    _check_h(h)
    states = [f"q{i}" for i in range(h + 2)] + [REJECT_STATE]
    transitions: Dict[str, Dict[str, str]] = {REJECT_STATE: {s: REJECT_STATE for s in BINARY}}
    for i in range(h + 2):
        row = {}
        for symbol in BINARY:
            t = _base_target(h, i, symbol)
            row[symbol] = REJECT_STATE if t is None else f"q{t}"
        transitions[f"q{i}"] = row
    return Dfa(states, BINARY, "q0", transitions, {"q0"})


def build_lhp_dfa(h: int, p: int) -> Dfa:
    """
    L(h,p) の DFA D₂

    状態 q{i},{j} は D₁ の q_i と長さ mod p の j の組、qr は全拒否状態。
    状態数 (h+2)p+1 で、最小化しても減らない。
    """
    _check_h(h)
    _check_prime(p)
    name = lambda i, j: f"q{i},{j}"
    states = [name(i, j) for i in range(h + 2) for j in range(p)] + [REJECT_STATE]
    transitions: Dict[str, Dict[str, str]] = {REJECT_STATE: {s: REJECT_STATE for s in BINARY}}
    for i in range(h + 2):
        for j in range(p):
            row = {}
            for symbol in BINARY:
                t = _base_target(h, i, symbol)
                row[symbol] = REJECT_STATE if t is None else name(t, (j + 1) % p)
            transitions[name(i, j)] = row
    logger.debug("L(%d,%d) の DFA: %d 状態", h, p, len(states))
    return Dfa(states, BINARY, name(0, 0), transitions, {name(0, 0)})


def lhp_membership(h: int, p: int) -> Callable[[str], bool]:
    """L(h,p) の所属判定（正規表現と長さの検査）"""
    _check_h(h)
    _check_prime(p)
    pattern = re.compile(f"(1*00*10{{{h}}})*")
    return lambda w: bool(pattern.fullmatch(w)) and len(w) % p == 0


def lhp_known_witnesses(h: int, p: int) -> Tuple[ForbiddenWitness, ForbiddenWitness]:
    """
    D₂ 上の既知の禁止構成の組

    MM-1QFA 禁止構成: q1=q0,0, q2=q1,0, x=0^p, y=10^h1^l（l ≥ 1、|y| ≡ 0 mod p）。
    F 構成: 同じ q1, q2, x と y=(10^h10^h)^p。
    """
    _check_h(h)
    _check_prime(p)
    q1, q2 = "q0,0", "q1,0"
    x = "0" * p
    ones = (-(1 + h)) % p or p
    mm = ForbiddenWitness(q1, q2, x, "1" + "0" * h + "1" * ones, WitnessKind.MM_FORBIDDEN)
    f = ForbiddenWitness(q1, q2, x, ("1" + "0" * h) * 2 * p, WitnessKind.F_CONSTRUCTION)
    return mm, f


# ---------------------------------------------------------------- mod-p MO-1QFA

def _valid_multiplier(p: int, g: int) -> bool:
    """奇数 g ∈ [1, p]（g = p は p が奇数のときだけ）"""
    return g % 2 == 1 and 1 <= g <= p and not (g == p and p % 2 == 0)


def modp_candidates(p: int) -> List[int]:
    return [g for g in range(1, p + 1) if _valid_multiplier(p, g)]


def modp_accept_prob(p: int, multipliers: Sequence[int], z: int) -> float:
    """0^z の受理確率 |(1/d)Σ_j cos(π g_j z/p)|²"""
    d = len(multipliers)
    amplitude = sum(math.cos(math.pi * g * z / p) for g in multipliers) / d
    return amplitude * amplitude


def modp_certificate(p: int, multipliers: Sequence[int]) -> float:
    """p の倍数でない z についての受理確率の最大（z ∈ [1, p−1] で十分）"""
    return max((modp_accept_prob(p, multipliers, z) for z in range(1, p)), default=0.0)


def search_modp_multipliers(p: int, epsilon: float, seed: int = 7,
                            budget: int = DEFAULT_DRAW_BUDGET,
                            per_size: int = DEFAULT_DRAWS_PER_SIZE) -> ModPMoQfaParams:
    """
    証明書が epsilon 以下になる回転乗数を乱択で探す

    ブロック数 d を ⌈log₂ p⌉ から一つずつ増やし、各 d で per_size 回、
    合計 budget 回まで乗数を一様に引く。

    Raises:
        ModPSearchError: 予算内で見つからない（最良の証明書を保持）
    """
    _check_prime(p)
    _check_epsilon(epsilon)
    if budget < 1 or per_size < 1:
        raise ConstructionError(f"探索予算が不正です: budget={budget}, per_size={per_size}")

    rng = np.random.default_rng(seed)
    candidates = modp_candidates(p)
    d = max(1, math.ceil(math.log2(p)))
    best_cert, best = math.inf, ()
    draws = 0
    while draws < budget:
        for _ in range(min(per_size, budget - draws)):
            multipliers = tuple(int(g) for g in rng.choice(candidates, size=d))
            draws += 1
            cert = modp_certificate(p, multipliers)
            if cert < best_cert:
                best_cert, best = cert, multipliers
            if cert <= epsilon:
                logger.info(f"mod-{p} 乗数探索: d={d}, 証明書 {cert:.6f} ≤ {epsilon}（{draws} 回目）")
                return ModPMoQfaParams(p, epsilon, multipliers, cert, seed, draws)
        logger.warning(f"mod-{p} 乗数探索: d={d} では見つからず（最良 {best_cert:.6f}）")
        d += 1

    raise ModPSearchError(f"mod-{p} 乗数探索が {budget} 回で ε={epsilon} に届きませんでした"
                          f"（最良の証明書 {best_cert:.6f}）", best_cert, best,
                          {'p': p, 'epsilon': epsilon, 'seed': seed})


def moqfa_from_modp_params(params: ModPMoQfaParams, alphabet: Iterable[str] = ("0",)) -> MoQfa:
    """
    回転ブロックの直和から MO-1QFA を組み立てる

    ブロック j は角度 π·g_j/p の平面回転。各ブロック先頭ベクトルの一様重ね合わせを
    Householder 反射で基底 0 に移し、基底 0 だけを受理状態にする。
    全記号に同じユニタリを割り当てる。
    """
    d = params.block_count
    u = direct_sum(rotation(math.pi * g / params.p) for g in params.rotation_multipliers)
    start = np.zeros(2 * d, dtype=np.complex128)
    start[0::2] = 1.0 / math.sqrt(d)
    w = np.asarray(householder_to_first_basis(start))
    moved = as_matrix(w @ np.asarray(u) @ w.conj().T)
    basis = [f"b{i}" for i in range(2 * d)]
    symbols = tuple(sorted(alphabet))
    return MoQfa(basis, symbols, basis_vector(2 * d, 0), {s: moved for s in symbols}, {"b0"})


def build_modp_moqfa(p: int, epsilon: float, seed: int = 7, alphabet: Iterable[str] = ("0",),
                     budget: int = DEFAULT_DRAW_BUDGET,
                     per_size: int = DEFAULT_DRAWS_PER_SIZE) -> MoQfa:
    """L(p) = {0^{kp}} を片側誤差 epsilon で認識する MO-1QFA"""
    params = search_modp_multipliers(p, epsilon, seed, budget, per_size)
    return moqfa_from_modp_params(params, alphabet)


# ---------------------------------------------------------------- DFA × MO-1QFA

class CombineOp(str, Enum):
    INTERSECT = "intersect"
    UNION = "union"
    DFA_MINUS_Q = "dfa_minus_q"
    Q_MINUS_DFA = "q_minus_dfa"


def combine_dfa_moqfa(d: Dfa, m: MoQfa, op) -> Qfac:
    """
    古典部分を d、量子部分を m とする 1QFAC

    古典状態 s の受理射影:
        intersect   : s∈F なら P_acc、それ以外 O
        union       : s∈F なら I、それ以外 P_acc
        dfa_minus_q : s∈F なら I−P_acc、それ以外 O
        q_minus_dfa : s∉F なら P_acc、それ以外 O
    """
    op = CombineOp(op)
    check_same_alphabet(d.alphabet, m.alphabet)
    n = m.dim
    p_acc = np.asarray(m.accept_projector)
    ident, zero = np.eye(n), np.zeros((n, n))
    table = {
        CombineOp.INTERSECT: (p_acc, zero),
        CombineOp.UNION: (ident, p_acc),
        CombineOp.DFA_MINUS_Q: (ident - p_acc, zero),
        CombineOp.Q_MINUS_DFA: (zero, p_acc),
    }
    inside, outside = table[op]
    projectors = {s: (inside if s in d.accepting else outside) for s in d.states}
    unitaries = {(s, symbol): m.unitary(symbol) for s in d.states for symbol in d.alphabet}
    return Qfac(d.states, m.basis_states, d.alphabet, d.initial, m.initial_state,
                d.transitions, unitaries, projectors)


def build_lhp_qfac(params: LhpParams, seed: int = 7,
                   budget: int = DEFAULT_DRAW_BUDGET,
                   per_size: int = DEFAULT_DRAWS_PER_SIZE) -> Qfac:
    """L(h,p) を片側誤差 ε で認識する 1QFAC（古典 h+3 状態）"""
    base = build_base_dfa(params.h)
    modp = build_modp_moqfa(params.p, params.epsilon, seed, BINARY, budget, per_size)
    qfac = combine_dfa_moqfa(base, modp, CombineOp.INTERSECT)
    logger.info(f"L({params.h},{params.p}) の 1QFAC: 古典 {len(qfac.classical_states)} 状態, "
                f"量子 {qfac.dim} 次元")
    return qfac


# ---------------------------------------------------------------- 有限言語

def _swap_letter(m: int, index: int) -> np.ndarray:
    """基底文字 0 と index を入れ替える m 次元の置換"""
    perm = np.eye(m, dtype=np.complex128)
    if index:
        perm[[0, index]] = perm[[index, 0]]
    return perm


def build_exact_finite_qfac(language: Iterable[str], alphabet: Iterable[str]) -> Qfac:
    """
    有限言語 L を確率 0/1 で厳密に認識する 1QFAC

    古典状態 s0…s{l+1}（s{l+1} は吸収状態）、量子空間は l 個の |Σ| 次元因子の
    テンソル積。深さ i で σ を読むと因子 i+1 の文字 0 と σ を入れ替える。
    """
    symbols = tuple(sorted(set(alphabet)))
    if not symbols:
        raise ConstructionError("アルファベットが空です")
    words = set(language)
    for w in words:
        check_word(symbols, w)
    l = max((len(w) for w in words), default=0)
    m = len(symbols)
    dim = m ** l
    letter = {s: i for i, s in enumerate(symbols)}

    basis = ["q[" + "".join(t) + "]" for t in itertools.product(symbols, repeat=l)]
    classical = [f"s{i}" for i in range(l + 2)]
    transitions = {f"s{i}": {s: f"s{min(i + 1, l + 1)}" for s in symbols} for i in range(l + 2)}

    ident = np.eye(dim, dtype=np.complex128)
    unitaries = {}
    for i in range(l + 2):
        for s in symbols:
            if i < l:
                factor = np.kron(np.eye(m ** i), _swap_letter(m, letter[s]))
                unitaries[(f"s{i}", s)] = np.kron(factor, np.eye(m ** (l - i - 1)))
            else:
                unitaries[(f"s{i}", s)] = ident

    def word_index(w: str) -> int:
        return sum(letter[c] * m ** (l - 1 - pos) for pos, c in enumerate(w))

    projectors = {}
    for i in range(l + 1):
        block = m ** (l - i)
        indices = []
        for w in words:
            if len(w) == i:
                start = word_index(w)
                indices.extend(range(start, start + block))
        projectors[f"s{i}"] = basis_projector(dim, indices)
    projectors[f"s{l + 1}"] = np.zeros((dim, dim))

    logger.info(f"有限言語の 1QFAC: |L|={len(words)}, l={l}, 古典 {l + 2} 状態, 量子 {dim} 次元")
    return Qfac(classical, basis, symbols, "s0", basis_vector(dim, 0), transitions, unitaries, projectors)


# ---------------------------------------------------------------- 変換

def kletter_to_qfac(m: MultiLetterQfa) -> Qfac:
    """
    k 文字 1QFA と同じ受理確率の 1QFAC

    古典状態 s[w] は直前 k−1 記号の窓（先頭は BLANK で詰める）。
    U_{s_w σ} = U_{wσ}、受理射影はどの古典状態でも P_acc。
    """
    k = m.k
    suffixes: List[str] = []
    for i in range(k):
        suffixes.extend(BLANK * (k - 1 - i) + "".join(t)
                        for t in itertools.product(m.alphabet, repeat=i))
    name = lambda w: f"s[{w}]"
    transitions = {name(w): {s: name((w + s)[1:]) for s in m.alphabet} for w in suffixes}
    unitaries = {(name(w), s): m.window_unitary(w + s) for w in suffixes for s in m.alphabet}
    p_acc = m.accept_projector
    projectors = {name(w): p_acc for w in suffixes}
    logger.info(f"k={k} 文字 1QFA → 1QFAC: 古典 {len(suffixes)} 状態")
    return Qfac([name(w) for w in suffixes], m.basis_states, m.alphabet, name(BLANK * (k - 1)),
                m.initial_state, transitions, unitaries, projectors)


def check_reversible(m: Qfac):
    """各記号で古典遷移が単射か確認し、衝突があれば NonReversibleError"""
    for symbol in m.alphabet:
        seen: Dict[str, str] = {}
        for s in m.classical_states:
            t = m.step(s, symbol)
            if t in seen:
                raise NonReversibleError(
                    f"古典遷移が可逆ではありません: δ({seen[t]},{symbol}) = δ({s},{symbol}) = {t}",
                    seen[t], s, symbol)
            seen[t] = s


def reversible_qfac_to_mo(m: Qfac) -> MoQfa:
    """
    可逆な 1QFAC と同じ受理確率の MO-1QFA（基底 S×Q）

    U′_σ = Σ_s |δ(s,σ)⟩⟨s| ⊗ U_{sσ}、受理射影 Σ_s |s⟩⟨s| ⊗ P_{s,acc}。
    受理射影が座標射影でなければ、その値域が先頭に来る基底に書き換える。
    """
    check_reversible(m)
    n = m.dim
    index = {s: i for i, s in enumerate(m.classical_states)}
    size = len(m.classical_states) * n

    unitaries = {}
    for symbol in m.alphabet:
        u = np.zeros((size, size), dtype=np.complex128)
        for s in m.classical_states:
            si, ti = index[s], index[m.step(s, symbol)]
            u[ti * n:(ti + 1) * n, si * n:(si + 1) * n] = m.unitary(s, symbol)
        unitaries[symbol] = u
    p_acc = np.asarray(direct_sum(m.accept_projector(s) for s in m.classical_states))
    initial = np.kron(np.asarray(basis_vector(len(m.classical_states), index[m.initial_classical])),
                      np.asarray(m.initial_quantum))

    if is_coordinate_projector(p_acc):
        basis = [f"{s}:{q}" for s in m.classical_states for q in m.basis_states]
        accepting = {basis[i] for i in range(size) if abs(p_acc[i, i]) > 0.5}
    else:
        frame, rank = projector_frame(p_acc)
        w = np.asarray(frame)
        adj = w.conj().T
        unitaries = {symbol: adj @ u @ w for symbol, u in unitaries.items()}
        initial = adj @ initial
        basis = [f"b{i}" for i in range(size)]
        accepting = set(basis[:rank])
        logger.debug("受理射影が座標射影でないため基底を変換（rank=%d）", rank)

    logger.info(f"可逆 1QFAC → MO-1QFA: {len(m.classical_states)}×{n} = {size} 次元")
    return MoQfa(basis, m.alphabet, initial, unitaries, accepting)


def moqfa_as_qfac(m: MoQfa) -> Qfac:
    """古典状態が一つだけの 1QFAC として表す"""
    return Qfac(["s0"], m.basis_states, m.alphabet, "s0", m.initial_state,
                {"s0": {s: "s0" for s in m.alphabet}},
                {("s0", s): m.unitary(s) for s in m.alphabet},
                {"s0": m.accept_projector})


def dfa_as_qfac(d: Dfa) -> Qfac:
    """量子次元 1 の 1QFAC として表す"""
    one, zero = np.eye(1), np.zeros((1, 1))
    return Qfac(d.states, ["q0"], d.alphabet, d.initial, [1.0], d.transitions,
                {(s, symbol): one for s in d.states for symbol in d.alphabet},
                {s: (one if s in d.accepting else zero) for s in d.states})


def moqfa_as_multiletter(m: MoQfa) -> MultiLetterQfa:
    """k = 1 の多文字 1QFA として表す"""
    return MultiLetterQfa(1, m.basis_states, m.alphabet, m.initial_state,
                          {s: m.unitary(s) for s in m.alphabet}, m.accepting)
