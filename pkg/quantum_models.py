"""
量子有限オートマトンモジュール
MO-1QFA・MM-1QFA・多文字 1QFA・1QFAC の受理確率と 1QFAC の実行履歴を計算する

各モデルの走査は Scanner（start / advance / accept_prob）で表し、単発の評価と
接頭辞を共有する列挙評価（analysis_engine）が同じ遷移を使う。
"""

from dataclasses import dataclass
from types import MappingProxyType
from typing import FrozenSet, List, Mapping, Tuple

import numpy as np

from classical_automata import Dfa, Pfa, check_word
from linalg_core import (Matrix, StateVector, TAU_CHECK, as_matrix, as_state,
                         basis_projector, max_norm)
from logging_config import get_logger
from toolkit_errors import AlphabetError, AutomatonError

logger = get_logger(__name__)

# 多文字 1QFA の空白記号 Λ（ファイル上の綴りも同じ）
BLANK = "_"


def _freeze_matrices(mapping) -> Mapping:
    return MappingProxyType({key: as_matrix(m) for key, m in mapping.items()})


def _projector_for(basis_states: Tuple[str, ...], subset) -> Matrix:
    index = {q: i for i, q in enumerate(basis_states)}
    return basis_projector(len(basis_states), [index[q] for q in subset if q in index])


@dataclass(frozen=True, eq=False)
class MoQfa:
    """測定一回型 1QFA"""
    basis_states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    initial_state: StateVector
    unitaries: Mapping[str, Matrix]
    accepting: FrozenSet[str]

    def __post_init__(self):
        object.__setattr__(self, 'basis_states', tuple(self.basis_states))
        object.__setattr__(self, 'alphabet', tuple(sorted(self.alphabet)))
        object.__setattr__(self, 'initial_state', as_state(self.initial_state))
        object.__setattr__(self, 'unitaries', _freeze_matrices(self.unitaries))
        object.__setattr__(self, 'accepting', frozenset(self.accepting))

    @property
    def dim(self) -> int:
        return len(self.basis_states)

    @property
    def accept_projector(self) -> Matrix:
        return _projector_for(self.basis_states, self.accepting)

    def unitary(self, symbol: str) -> Matrix:
        if symbol not in self.unitaries:
            raise AutomatonError(f"記号 '{symbol}' のユニタリがありません", {'symbol': symbol})
        return self.unitaries[symbol]


@dataclass(frozen=True, eq=False)
class MmQfa:
    """測定多数回型 1QFA（終端記号 $ のユニタリを持つ）"""
    basis_states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    initial_state: StateVector
    unitaries: Mapping[str, Matrix]
    end_marker_unitary: Matrix
    accepting: FrozenSet[str]
    rejecting: FrozenSet[str]

    def __post_init__(self):
        object.__setattr__(self, 'basis_states', tuple(self.basis_states))
        object.__setattr__(self, 'alphabet', tuple(sorted(self.alphabet)))
        object.__setattr__(self, 'initial_state', as_state(self.initial_state))
        object.__setattr__(self, 'unitaries', _freeze_matrices(self.unitaries))
        object.__setattr__(self, 'end_marker_unitary', as_matrix(self.end_marker_unitary))
        object.__setattr__(self, 'accepting', frozenset(self.accepting))
        object.__setattr__(self, 'rejecting', frozenset(self.rejecting))

    @property
    def dim(self) -> int:
        return len(self.basis_states)

    @property
    def accept_projector(self) -> Matrix:
        return _projector_for(self.basis_states, self.accepting)

    @property
    def reject_projector(self) -> Matrix:
        return _projector_for(self.basis_states, self.rejecting)

    @property
    def non_halting_projector(self) -> Matrix:
        halting = self.accepting | self.rejecting
        return _projector_for(self.basis_states, [q for q in self.basis_states if q not in halting])

    def unitary(self, symbol: str) -> Matrix:
        if symbol not in self.unitaries:
            raise AutomatonError(f"記号 '{symbol}' のユニタリがありません", {'symbol': symbol})
        return self.unitaries[symbol]


@dataclass(frozen=True, eq=False)
class MultiLetterQfa:
    """
    k 文字 1QFA

    unitaries は長さ k の窓（先頭側は BLANK で詰める）をキーに持つ。与えられて
    いない窓で発展しようとするとエラーになる。
    """
    k: int
    basis_states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    initial_state: StateVector
    unitaries: Mapping[str, Matrix]
    accepting: FrozenSet[str]

    def __post_init__(self):
        object.__setattr__(self, 'basis_states', tuple(self.basis_states))
        object.__setattr__(self, 'alphabet', tuple(sorted(self.alphabet)))
        object.__setattr__(self, 'initial_state', as_state(self.initial_state))
        object.__setattr__(self, 'unitaries', _freeze_matrices(self.unitaries))
        object.__setattr__(self, 'accepting', frozenset(self.accepting))
        if BLANK in self.alphabet:
            raise AlphabetError(f"空白記号 '{BLANK}' はアルファベットに使えません")

    @property
    def dim(self) -> int:
        return len(self.basis_states)

    @property
    def accept_projector(self) -> Matrix:
        return _projector_for(self.basis_states, self.accepting)

    def window_unitary(self, window: str) -> Matrix:
        if window not in self.unitaries:
            raise AutomatonError(f"窓 '{window}' のユニタリがありません", {'window': window})
        return self.unitaries[window]


@dataclass(frozen=True, eq=False)
class Qfac:
    """
    古典状態付き 1QFAC

    unitaries[(s, σ)] = U_{sσ}、accept_projectors[s] = P_{s,acc}。
    拒否射影は I − P_{s,acc} として導く。
    """
    classical_states: Tuple[str, ...]
    basis_states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    initial_classical: str
    initial_quantum: StateVector
    transitions: Mapping[str, Mapping[str, str]]
    unitaries: Mapping[Tuple[str, str], Matrix]
    accept_projectors: Mapping[str, Matrix]

    def __post_init__(self):
        object.__setattr__(self, 'classical_states', tuple(self.classical_states))
        object.__setattr__(self, 'basis_states', tuple(self.basis_states))
        object.__setattr__(self, 'alphabet', tuple(sorted(self.alphabet)))
        object.__setattr__(self, 'initial_quantum', as_state(self.initial_quantum))
        object.__setattr__(self, 'transitions', MappingProxyType(
            {s: MappingProxyType(dict(row)) for s, row in self.transitions.items()}))
        object.__setattr__(self, 'unitaries', _freeze_matrices(self.unitaries))
        object.__setattr__(self, 'accept_projectors', _freeze_matrices(self.accept_projectors))

    @property
    def dim(self) -> int:
        return len(self.basis_states)

    def step(self, state: str, symbol: str) -> str:
        row = self.transitions.get(state)
        if row is None or symbol not in row:
            raise AutomatonError(f"古典遷移 δ({state}, {symbol}) が定義されていません",
                                 {'state': state, 'symbol': symbol})
        return row[symbol]

    def unitary(self, state: str, symbol: str) -> Matrix:
        if (state, symbol) not in self.unitaries:
            raise AutomatonError(f"U[{state}|{symbol}] がありません", {'state': state, 'symbol': symbol})
        return self.unitaries[(state, symbol)]

    def accept_projector(self, state: str) -> Matrix:
        if state not in self.accept_projectors:
            raise AutomatonError(f"状態 {state} の受理射影がありません", {'state': state})
        return self.accept_projectors[state]

    def reject_projector(self, state: str) -> Matrix:
        return as_matrix(np.eye(self.dim) - self.accept_projector(state))

    def classical_part(self) -> Dfa:
        """古典部分の DFA 表示（受理射影が O でない状態を受理状態とする）"""
        accepting = {s for s, p in self.accept_projectors.items() if max_norm(p) > TAU_CHECK}
        return Dfa(self.classical_states, self.alphabet, self.initial_classical,
                   self.transitions, accepting)


@dataclass(frozen=True, eq=False)
class RunTrace:
    """1QFAC の実行履歴: 各接頭辞（空接頭辞を含む）の (古典状態, 量子状態)"""
    steps: Tuple[Tuple[str, StateVector], ...]

    @property
    def final_classical(self) -> str:
        return self.steps[-1][0]

    @property
    def final_quantum(self) -> StateVector:
        return self.steps[-1][1]

    @property
    def classical_path(self) -> List[str]:
        return [s for s, _ in self.steps]


@dataclass(frozen=True)
class MmStep:
    """MM-1QFA の一回の測定後の累積値"""
    symbol: str
    p_acc: float
    p_rej: float
    residual: float


def _squared_norm(v) -> float:
    return float(np.vdot(v, v).real)


class Scanner:
    """モデルごとの走査（設定 config を一記号ずつ進める）"""

    def __init__(self, machine):
        self.machine = machine

    @property
    def alphabet(self) -> Tuple[str, ...]:
        return self.machine.alphabet

    def start(self):
        raise NotImplementedError

    def advance(self, config, symbol: str):
        raise NotImplementedError

    def accept_prob(self, config) -> float:
        raise NotImplementedError

    def scan(self, x: str):
        check_word(self.alphabet, x)
        config = self.start()
        for symbol in x:
            config = self.advance(config, symbol)
        return config


class DfaScanner(Scanner):
    def start(self):
        return self.machine.initial

    def advance(self, config, symbol):
        return self.machine.step(config, symbol)

    def accept_prob(self, config):
        return 1.0 if config in self.machine.accepting else 0.0


class PfaScanner(Scanner):
    def __init__(self, machine: Pfa):
        super().__init__(machine)
        self._eta = machine.eta

    def start(self):
        return self.machine.rho

    def advance(self, config, symbol):
        return config @ self.machine.matrix(symbol)

    def accept_prob(self, config):
        return float(config @ self._eta)


class MoScanner(Scanner):
    def __init__(self, machine: MoQfa):
        super().__init__(machine)
        self._p_acc = np.asarray(machine.accept_projector)

    def start(self):
        return self.machine.initial_state

    def advance(self, config, symbol):
        return self.machine.unitary(symbol) @ config

    def accept_prob(self, config):
        return _squared_norm(self._p_acc @ config)


class MmScanner(Scanner):
    """設定は (非停止成分 v, 累積受理確率, 累積拒否確率)"""

    def __init__(self, machine: MmQfa):
        super().__init__(machine)
        self._p_acc = np.asarray(machine.accept_projector)
        self._p_rej = np.asarray(machine.reject_projector)
        self._p_non = np.asarray(machine.non_halting_projector)

    def start(self):
        return (self.machine.initial_state, 0.0, 0.0)

    def measure_after(self, config, unitary):
        v, p_acc, p_rej = config
        v = unitary @ v
        p_acc += _squared_norm(self._p_acc @ v)
        p_rej += _squared_norm(self._p_rej @ v)
        return (self._p_non @ v, p_acc, p_rej)

    def advance(self, config, symbol):
        return self.measure_after(config, self.machine.unitary(symbol))

    def finish(self, config) -> Tuple[float, float]:
        """$ を読んで測定し、残った非停止成分を拒否に加える"""
        v, p_acc, p_rej = self.measure_after(config, self.machine.end_marker_unitary)
        return p_acc, p_rej + _squared_norm(v)

    def accept_prob(self, config):
        return self.finish(config)[0]


class MultiLetterScanner(Scanner):
    """設定は (量子状態, 直前 k−1 記号の履歴)"""

    def __init__(self, machine: MultiLetterQfa):
        super().__init__(machine)
        self._p_acc = np.asarray(machine.accept_projector)

    def start(self):
        return (self.machine.initial_state, BLANK * (self.machine.k - 1))

    def advance(self, config, symbol):
        v, history = config
        window = history + symbol
        return (self.machine.window_unitary(window) @ v, window[1:])

    def accept_prob(self, config):
        return _squared_norm(self._p_acc @ config[0])


class QfacScanner(Scanner):
    """設定は (古典状態, 量子状態)"""

    def start(self):
        return (self.machine.initial_classical, self.machine.initial_quantum)

    def advance(self, config, symbol):
        s, v = config
        return (self.machine.step(s, symbol), self.machine.unitary(s, symbol) @ v)

    def accept_prob(self, config):
        s, v = config
        return _squared_norm(np.asarray(self.machine.accept_projector(s)) @ v)


_SCANNERS = (
    (Dfa, DfaScanner),
    (Pfa, PfaScanner),
    (MoQfa, MoScanner),
    (MmQfa, MmScanner),
    (MultiLetterQfa, MultiLetterScanner),
    (Qfac, QfacScanner),
)


def make_scanner(machine) -> Scanner:
    for model, scanner in _SCANNERS:
        if isinstance(machine, model):
            return scanner(machine)
    raise TypeError(f"未対応のモデルです: {type(machine).__name__}")


def model_name(machine) -> str:
    """ファイル形式での type 名"""
    names = {Dfa: "dfa", Pfa: "pfa", MoQfa: "mo1qfa", MmQfa: "mm1qfa",
             MultiLetterQfa: "ml1qfa", Qfac: "qfac"}
    return names[type(machine)]


def accept_probability(machine, x: str) -> float:
    """どのモデルでも x の受理確率を返す（MM-1QFA は p_acc）"""
    scanner = make_scanner(machine)
    return scanner.accept_prob(scanner.scan(x))


def mo_final_state(m: MoQfa, x: str) -> StateVector:
    """U_{σₙ}···U_{σ₁}|ψ₀⟩"""
    return as_state(MoScanner(m).scan(x))


def mo_accept_prob(m: MoQfa, x: str) -> float:
    """‖P_acc·U_{σₙ}···U_{σ₁}|ψ₀⟩‖²"""
    scanner = MoScanner(m)
    return scanner.accept_prob(scanner.scan(x))


def mm_accept_prob(m: MmQfa, x: str) -> Tuple[float, float]:
    """
    MM-1QFA の (受理確率, 拒否確率)

    各記号と $ の後で測定し、正規化しない非停止成分で続ける。$ の後に残った
    非停止成分は拒否として数える。
    """
    scanner = MmScanner(m)
    return scanner.finish(scanner.scan(x))


def mm_halting_trace(m: MmQfa, x: str) -> List[MmStep]:
    """各測定の直後の (累積受理, 累積拒否, 非停止成分の重み) を $ まで記録"""
    scanner = MmScanner(m)
    check_word(m.alphabet, x)
    config = scanner.start()
    trace = []
    for symbol in list(x) + ["$"]:
        unitary = m.end_marker_unitary if symbol == "$" else m.unitary(symbol)
        config = scanner.measure_after(config, unitary)
        v, p_acc, p_rej = config
        trace.append(MmStep(symbol, p_acc, p_rej, _squared_norm(v)))
    return trace


def ml_windows(k: int, x: str) -> List[str]:
    """x を走査するときに使う窓の列（先頭は Λ で詰める）"""
    padded = BLANK * (k - 1) + x
    return [padded[i:i + k] for i in range(len(x))]


def ml_final_state(m: MultiLetterQfa, x: str) -> StateVector:
    """k 文字 1QFA の最終量子状態"""
    return as_state(MultiLetterScanner(m).scan(x)[0])


def ml_accept_prob(m: MultiLetterQfa, x: str) -> float:
    return _squared_norm(np.asarray(m.accept_projector) @ ml_final_state(m, x))


def qfac_run(m: Qfac, x: str) -> RunTrace:
    """
    1QFAC の実行履歴

    σᵢ を読むとき、直前の古典状態 s の U_{sσᵢ} を適用してから s ← δ(s, σᵢ)。
    """
    scanner = QfacScanner(m)
    check_word(m.alphabet, x)
    config = scanner.start()
    steps = [config]
    for symbol in x:
        config = scanner.advance(config, symbol)
        steps.append(config)
    return RunTrace(tuple((s, as_state(v)) for s, v in steps))


def qfac_accept_prob(m: Qfac, x: str) -> float:
    """‖P_{s_x,acc}|ψ_x⟩‖²"""
    trace = qfac_run(m, x)
    return _squared_norm(np.asarray(m.accept_projector(trace.final_classical)) @ trace.final_quantum)


def qfac_reject_prob(m: Qfac, x: str) -> float:
    trace = qfac_run(m, x)
    return _squared_norm(np.asarray(m.reject_projector(trace.final_classical)) @ trace.final_quantum)


def qfac_word_operator(m: Qfac, state: str, x: str) -> Matrix:
    """U_{s,x} = U_{s_{n−1}xₙ}···U_{s x₁}（U_{s,ε} = I）"""
    if state not in m.classical_states:
        raise AutomatonError(f"未知の古典状態です: {state}", {'state': state})
    check_word(m.alphabet, x)
    op = np.eye(m.dim, dtype=np.complex128)
    for symbol in x:
        op = np.asarray(m.unitary(state, symbol)) @ op
        state = m.step(state, symbol)
    return as_matrix(op)
