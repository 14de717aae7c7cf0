"""
古典オートマトンモジュール
DFA・PFA の実行、最小化、積構成、単項サイクル解析、自己到達性を提供
"""

import itertools
from collections import deque
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Tuple

import numpy as np

from logging_config import get_logger
from toolkit_errors import AlphabetError, AutomatonError

logger = get_logger(__name__)

DEAD_STATE = "dead"


def check_word(alphabet: Iterable[str], x: str):
    """x の全記号がアルファベットに含まれるか確認"""
    allowed = set(alphabet)
    for pos, symbol in enumerate(x):
        if symbol not in allowed:
            raise AlphabetError(f"記号 '{symbol}'（位置 {pos}）はアルファベット {sorted(allowed)} にありません",
                                {'symbol': symbol, 'position': pos})


def check_same_alphabet(a: Iterable[str], b: Iterable[str]):
    if set(a) != set(b):
        raise AlphabetError(f"アルファベットが一致しません: {sorted(set(a))} != {sorted(set(b))}",
                            {'left': sorted(set(a)), 'right': sorted(set(b))})


def enumerate_strings(alphabet: Iterable[str], max_len: int) -> Iterator[str]:
    """長さ優先・辞書順で max_len 以下の全文字列を列挙（ε から）"""
    symbols = sorted(alphabet)
    for length in range(max_len + 1):
        for letters in itertools.product(symbols, repeat=length):
            yield "".join(letters)


def _freeze_table(table: Mapping[str, Mapping[str, str]]) -> Mapping[str, Mapping[str, str]]:
    return MappingProxyType({s: MappingProxyType(dict(row)) for s, row in table.items()})


@dataclass(frozen=True)
class Dfa:
    """
    決定性有限オートマトン

    transitions[s][σ] = δ(s, σ)。部分写像でも生成はできるが（検証で報告される）、
    実行時に遷移が欠けていれば AutomatonError になる。
    """
    states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    initial: str
    transitions: Mapping[str, Mapping[str, str]]
    accepting: FrozenSet[str]

    def __post_init__(self):
        object.__setattr__(self, 'states', tuple(self.states))
        object.__setattr__(self, 'alphabet', tuple(sorted(self.alphabet)))
        object.__setattr__(self, 'transitions', _freeze_table(self.transitions))
        object.__setattr__(self, 'accepting', frozenset(self.accepting))

    def step(self, state: str, symbol: str) -> str:
        row = self.transitions.get(state)
        if row is None or symbol not in row:
            raise AutomatonError(f"遷移 δ({state}, {symbol}) が定義されていません",
                                 {'state': state, 'symbol': symbol})
        return row[symbol]

    def is_total(self) -> bool:
        return all(symbol in self.transitions.get(s, {}) for s in self.states for symbol in self.alphabet)


class ProductOp(str, Enum):
    """積構成の集合演算"""
    INTERSECT = "intersect"
    UNION = "union"
    DIFF = "diff"


def run_from(d: Dfa, state: str, x: str) -> str:
    """状態 state から x を読んだ後の状態 δ(state, x)"""
    check_word(d.alphabet, x)
    if state not in d.states:
        raise AutomatonError(f"未知の状態です: {state}", {'state': state})
    for symbol in x:
        state = d.step(state, symbol)
    return state


def dfa_run(d: Dfa, x: str) -> str:
    """s_x = δ(s₀, x) を返す"""
    return run_from(d, d.initial, x)


def dfa_accepts(d: Dfa, x: str) -> bool:
    return dfa_run(d, x) in d.accepting


def reachable_states(d: Dfa) -> List[str]:
    """初期状態からの到達可能状態（記号昇順の幅優先順）"""
    order = [d.initial]
    seen = {d.initial}
    queue = deque([d.initial])
    while queue:
        s = queue.popleft()
        for symbol in d.alphabet:
            t = d.step(s, symbol)
            if t not in seen:
                seen.add(t)
                order.append(t)
                queue.append(t)
    return order


def dfa_minimize(d: Dfa) -> Dfa:
    """
    到達不能状態を除去し、Moore の分割細分化で等価状態を併合する

    各同値類の代表は幅優先順で最初に現れる状態で、その名前を引き継ぐ。
    """
    order = reachable_states(d)
    block = {s: (0 if s in d.accepting else 1) for s in order}
    count = len(set(block.values()))
    while True:
        signatures: Dict[Tuple, int] = {}
        refined = {}
        for s in order:
            sig = (block[s],) + tuple(block[d.step(s, symbol)] for symbol in d.alphabet)
            if sig not in signatures:
                signatures[sig] = len(signatures)
            refined[s] = signatures[sig]
        block = refined
        if len(signatures) == count:
            break
        count = len(signatures)

    representative: Dict[int, str] = {}
    states = []
    for s in order:
        if block[s] not in representative:
            representative[block[s]] = s
            states.append(s)
    transitions = {
        rep: {symbol: representative[block[d.step(rep, symbol)]] for symbol in d.alphabet}
        for rep in states
    }
    accepting = {rep for rep in states if rep in d.accepting}
    logger.debug("DFA 最小化: %d → %d 状態", len(d.states), len(states))
    return Dfa(states, d.alphabet, representative[block[d.initial]], transitions, accepting)


def synchronized_product(d1: Dfa, d2: Dfa,
                         accept: Callable[[bool, bool], bool]) -> Dfa:
    """
    到達可能な対だけからなる同期積 DFA

    状態名は "(a,b)"。accept は各成分の受理可否から積の受理可否を決める。
    """
    check_same_alphabet(d1.alphabet, d2.alphabet)
    name = lambda a, b: f"({a},{b})"
    start = (d1.initial, d2.initial)
    order = [start]
    seen = {start}
    queue = deque([start])
    transitions: Dict[str, Dict[str, str]] = {}
    while queue:
        a, b = queue.popleft()
        row = {}
        for symbol in d1.alphabet:
            nxt = (d1.step(a, symbol), d2.step(b, symbol))
            row[symbol] = name(*nxt)
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
                queue.append(nxt)
        transitions[name(a, b)] = row
    accepting = {name(a, b) for a, b in order if accept(a in d1.accepting, b in d2.accepting)}
    return Dfa([name(a, b) for a, b in order], d1.alphabet, name(*start), transitions, accepting)


_PRODUCT_ACCEPT = {
    ProductOp.INTERSECT: lambda a, b: a and b,
    ProductOp.UNION: lambda a, b: a or b,
    ProductOp.DIFF: lambda a, b: a and not b,
}


def dfa_product(d1: Dfa, d2: Dfa, op) -> Dfa:
    """二つの DFA の言語の積・和・差を認識する DFA"""
    return synchronized_product(d1, d2, _PRODUCT_ACCEPT[ProductOp(op)])


def dfa_complement(d: Dfa) -> Dfa:
    return Dfa(d.states, d.alphabet, d.initial, d.transitions, set(d.states) - d.accepting)


def dfa_equivalent(d1: Dfa, d2: Dfa) -> bool:
    """言語が等しいか（到達可能な対で受理可否が食い違わないか）"""
    check_same_alphabet(d1.alphabet, d2.alphabet)
    start = (d1.initial, d2.initial)
    seen = {start}
    queue = deque([start])
    while queue:
        a, b = queue.popleft()
        if (a in d1.accepting) != (b in d2.accepting):
            return False
        for symbol in d1.alphabet:
            nxt = (d1.step(a, symbol), d2.step(b, symbol))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return True


def finite_language_dfa(language: Iterable[str], alphabet: Iterable[str]) -> Dfa:
    """有限言語を認識する最小 DFA（接頭辞木を最小化したもの）"""
    symbols = tuple(sorted(alphabet))
    words = set(language)
    for w in words:
        check_word(symbols, w)
    prefixes = {w[:i] for w in words for i in range(len(w) + 1)}
    name = lambda w: f"p{w}"
    transitions = {DEAD_STATE: {symbol: DEAD_STATE for symbol in symbols}}
    for w in prefixes:
        transitions[name(w)] = {
            symbol: (name(w + symbol) if w + symbol in prefixes else DEAD_STATE) for symbol in symbols
        }
    states = [name(w) for w in sorted(prefixes, key=lambda w: (len(w), w))] + [DEAD_STATE]
    if "" not in prefixes:
        states = [name("")] + states
        transitions[name("")] = {symbol: DEAD_STATE for symbol in symbols}
    return dfa_minimize(Dfa(states, symbols, name(""), transitions, {name(w) for w in words}))


def unary_cycle_dfa(n: int, symbol: str = "0") -> Dfa:
    """L(n) = {symbol^{kn}} を認識する n 状態の純サイクル DFA"""
    if n < 1:
        raise AutomatonError(f"サイクル長は 1 以上でなければなりません: {n}")
    states = [f"c{i}" for i in range(n)]
    transitions = {f"c{i}": {symbol: f"c{(i + 1) % n}"} for i in range(n)}
    return Dfa(states, (symbol,), "c0", transitions, {"c0"})


@dataclass(frozen=True)
class UnaryCycleProfile:
    """単項 DFA の ρ 字型遷移列（尾の長さと最小サイクル長）"""
    tail_length: int
    period: int


def unary_minimal_cycle(d: Dfa) -> UnaryCycleProfile:
    """初期状態から唯一の記号を読み続けたときの (尾の長さ, 周期)"""
    if len(d.alphabet) != 1:
        raise AutomatonError(f"単項アルファベットが必要です: {list(d.alphabet)}",
                             {'alphabet': list(d.alphabet)})
    symbol = d.alphabet[0]
    index: Dict[str, int] = {}
    state = d.initial
    while state not in index:
        index[state] = len(index)
        state = d.step(state, symbol)
    tail = index[state]
    return UnaryCycleProfile(tail_length=tail, period=len(index) - tail)


def is_self_reachable(min_dfa: Dfa, x: str) -> bool:
    """
    x が L 自己到達的か（最小 DFA 上で s_x が空でない閉路に乗るか）

    min_dfa は呼び出し側で最小化しておくこと。
    """
    target = dfa_run(min_dfa, x)
    seen = set()
    queue = deque(min_dfa.step(target, symbol) for symbol in min_dfa.alphabet)
    while queue:
        s = queue.popleft()
        if s == target:
            return True
        if s in seen:
            continue
        seen.add(s)
        queue.extend(min_dfa.step(s, symbol) for symbol in min_dfa.alphabet)
    return False


@dataclass(frozen=True, eq=False)
class Pfa:
    """
    確率有限オートマトン

    rho は初期分布（行ベクトル）、matrices[σ] は記号ごとの行確率行列 M(σ)。
    """
    states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    rho: np.ndarray
    matrices: Mapping[str, np.ndarray]
    accepting: FrozenSet[str]

    def __post_init__(self):
        object.__setattr__(self, 'states', tuple(self.states))
        object.__setattr__(self, 'alphabet', tuple(sorted(self.alphabet)))
        rho = np.array(self.rho, dtype=float).reshape(-1)
        rho.setflags(write=False)
        object.__setattr__(self, 'rho', rho)
        frozen = {}
        for symbol, m in self.matrices.items():
            arr = np.array(m, dtype=float)
            arr.setflags(write=False)
            frozen[symbol] = arr
        object.__setattr__(self, 'matrices', MappingProxyType(frozen))
        object.__setattr__(self, 'accepting', frozenset(self.accepting))

    @property
    def eta(self) -> np.ndarray:
        """受理状態の指示列ベクトル η_F"""
        return np.array([1.0 if s in self.accepting else 0.0 for s in self.states])

    def matrix(self, symbol: str) -> np.ndarray:
        if symbol not in self.matrices:
            raise AutomatonError(f"記号 '{symbol}' の確率行列がありません", {'symbol': symbol})
        return self.matrices[symbol]


def pfa_distribution(p: Pfa, x: str) -> np.ndarray:
    """ρ·M(σ₁)···M(σₙ)"""
    check_word(p.alphabet, x)
    row = p.rho
    for symbol in x:
        row = row @ p.matrix(symbol)
    return row


def pfa_accept_prob(p: Pfa, x: str) -> float:
    """ρ·M(σ₁)···M(σₙ)·η_F"""
    return float(pfa_distribution(p, x) @ p.eta)


def pfa_from_dfa(d: Dfa) -> Pfa:
    """DFA を 0/1 行確率行列の PFA として表現"""
    index = {s: i for i, s in enumerate(d.states)}
    n = len(d.states)
    matrices = {}
    for symbol in d.alphabet:
        m = np.zeros((n, n))
        for s in d.states:
            m[index[s], index[d.step(s, symbol)]] = 1.0
        matrices[symbol] = m
    rho = np.zeros(n)
    rho[index[d.initial]] = 1.0
    return Pfa(d.states, d.alphabet, rho, matrices, d.accepting)


def state_index(d: Dfa) -> Dict[str, int]:
    return {s: i for i, s in enumerate(d.states)}


def transition_table(d: Dfa) -> List[List[int]]:
    """状態番号の遷移表 table[i][k] = δ(states[i], alphabet[k]) の番号"""
    index = state_index(d)
    return [[index[d.step(s, symbol)] for symbol in d.alphabet] for s in d.states]


