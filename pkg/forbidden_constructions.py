"""
禁止構成検出モジュール
最小 DFA 上で MM-1QFA 禁止構成と F 構成を状態対オートマトンの到達可能性で探索する

探索結果は最短の x、次に最短の y を優先し、同じ長さでは記号の辞書順で決める。
"""

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

from classical_automata import Dfa, run_from, transition_table
from logging_config import get_logger

logger = get_logger(__name__)


class WitnessKind(str, Enum):
    MM_FORBIDDEN = "mm_forbidden"
    F_CONSTRUCTION = "f_construction"


@dataclass(frozen=True)
class ForbiddenWitness:
    """禁止構成の証拠 (q1, q2, x, y)"""
    q1: str
    q2: str
    x: str
    y: str
    kind: WitnessKind

    def describe(self) -> str:
        return f"{self.kind.value}: q1={self.q1} q2={self.q2} x={self.x!r} y={self.y!r}"


def replay_witness(d: Dfa, witness: ForbiddenWitness) -> bool:
    """
    証拠が定義式を満たすか DFA 上で再生して確認

    mm_forbidden: δ(q1,x)=δ(q2,x)=q2, δ(q2,y)=q1
    f_construction: δ(q1,x)=δ(q2,x)=q2, δ(q1,y)=q1, δ(q2,y)=q2（x, y は空でない）
    """
    q1, q2, x, y = witness.q1, witness.q2, witness.x, witness.y
    if q1 == q2 or q1 not in d.states or q2 not in d.states:
        return False
    merges = run_from(d, q1, x) == q2 and run_from(d, q2, x) == q2
    if witness.kind == WitnessKind.MM_FORBIDDEN:
        return merges and run_from(d, q2, y) == q1
    return (merges and len(x) > 0 and len(y) > 0
            and run_from(d, q1, y) == q1 and run_from(d, q2, y) == q2)


class _PairAutomaton:
    """状態番号の対 (a, b) 上の同期遷移"""

    def __init__(self, d: Dfa):
        self.dfa = d
        self.table = transition_table(d)
        self.n = len(d.states)
        self.k = len(d.alphabet)
        # preds[c][j] = δ(i, σ_c) = j となる i の一覧
        self.preds: List[List[List[int]]] = [[[] for _ in range(self.n)] for _ in range(self.k)]
        for i, row in enumerate(self.table):
            for c, j in enumerate(row):
                self.preds[c][j].append(i)

    def distances_to_diagonal(self, t: int) -> Dict[Tuple[int, int], int]:
        """(t, t) へ到達できる対とその最短語長（逆向き幅優先探索）"""
        dist = {(t, t): 0}
        queue = deque([(t, t)])
        while queue:
            a, b = queue.popleft()
            for c in range(self.k):
                for i in self.preds[c][a]:
                    for j in self.preds[c][b]:
                        if (i, j) not in dist:
                            dist[(i, j)] = dist[(a, b)] + 1
                            queue.append((i, j))
        return dist

    def shortest_word(self, start: Tuple[int, ...], goal: Callable[[Tuple[int, ...]], bool],
                      nonempty: bool = False) -> Optional[str]:
        """
        start から goal を満たす組への辞書順最小の最短語

        記号を昇順に展開する幅優先探索なので、各組へ最初に到達した経路が
        同じ長さの中で辞書順最小になる。
        """
        symbols = self.dfa.alphabet
        parent: Dict[Tuple[int, ...], Tuple[Tuple[int, ...], str]] = {}
        queue = deque()
        if not nonempty:
            if goal(start):
                return ""
            parent[start] = (start, "")
            queue.append(start)
        else:
            queue.append(None)
        while queue:
            node = queue.popleft()
            frontier = start if node is None else node
            for c, symbol in enumerate(symbols):
                nxt = tuple(self.table[s][c] for s in frontier)
                if nxt in parent:
                    continue
                parent[nxt] = (node, symbol)
                if goal(nxt):
                    return self._unwind(parent, nxt)
                queue.append(nxt)
        return None

    @staticmethod
    def _unwind(parent, node) -> str:
        letters = []
        while node is not None:
            prev, symbol = parent[node]
            if symbol == "":
                break
            letters.append(symbol)
            node = prev
        return "".join(reversed(letters))

    def cyclic_pairs(self) -> List[bool]:
        """各対 a*n+b が空でない閉路に乗るか（反復版 Tarjan の強連結成分分解）"""
        n, total = self.n, self.n * self.n

        def successors(v: int) -> List[int]:
            a, b = divmod(v, n)
            return [self.table[a][c] * n + self.table[b][c] for c in range(self.k)]

        index = [-1] * total
        low = [0] * total
        on_stack = [False] * total
        comp = [-1] * total
        comp_size: List[int] = []
        stack: List[int] = []
        counter = 0
        for root in range(total):
            if index[root] != -1:
                continue
            work = [(root, 0)]
            while work:
                v, ci = work.pop()
                if ci == 0:
                    index[v] = low[v] = counter
                    counter += 1
                    stack.append(v)
                    on_stack[v] = True
                succ = successors(v)
                descended = False
                for i in range(ci, len(succ)):
                    w = succ[i]
                    if index[w] == -1:
                        work.append((v, i + 1))
                        work.append((w, 0))
                        descended = True
                        break
                    if on_stack[w]:
                        low[v] = min(low[v], index[w])
                if descended:
                    continue
                if low[v] == index[v]:
                    size = 0
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp[w] = len(comp_size)
                        size += 1
                        if w == v:
                            break
                    comp_size.append(size)
                if work:
                    parent_v = work[-1][0]
                    low[parent_v] = min(low[parent_v], low[v])
        return [comp_size[comp[v]] > 1 or v in successors(v) for v in range(total)]


def _merge_candidates(pairs: _PairAutomaton, accept: Callable[[int, int], bool]) -> List[Tuple[int, int, int]]:
    """δ(q1,x)=δ(q2,x)=q2 を満たす (最短|x|, q1, q2) のうち accept を通るもの"""
    found = []
    for t in range(pairs.n):
        for (a, b), length in pairs.distances_to_diagonal(t).items():
            if b == t and a != t and accept(a, t):
                found.append((length, a, t))
    return found


def _reachable_from(pairs: _PairAutomaton, start: int) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for nxt in pairs.table[s]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def detect_mm_forbidden(min_dfa: Dfa) -> Optional[ForbiddenWitness]:
    """
    MM-1QFA 禁止構成を探す

    q1 ≠ q2, δ(q1,x)=δ(q2,x)=q2, δ(q2,y)=q1 を満たす証拠を返し、なければ None。
    """
    pairs = _PairAutomaton(min_dfa)
    reach = {t: _reachable_from(pairs, t) for t in range(pairs.n)}
    candidates = _merge_candidates(pairs, lambda a, t: a in reach[t])
    if not candidates:
        logger.debug("MM-1QFA 禁止構成なし（%d 状態）", pairs.n)
        return None
    shortest = min(c[0] for c in candidates)
    best = None
    for _, a, t in (c for c in candidates if c[0] == shortest):
        x = pairs.shortest_word((a, t), lambda node, t=t: node == (t, t))
        y = pairs.shortest_word((t,), lambda node, a=a: node == (a,))
        key = (x, len(y), y, a, t)
        if best is None or key < best:
            best = key
    x, _, y, a, t = best
    witness = ForbiddenWitness(min_dfa.states[a], min_dfa.states[t], x, y, WitnessKind.MM_FORBIDDEN)
    logger.debug("MM-1QFA 禁止構成: %s", witness.describe())
    return witness


def detect_f_construction(min_dfa: Dfa) -> Optional[ForbiddenWitness]:
    """
    F 構成を探す

    q1 ≠ q2, δ(q1,x)=δ(q2,x)=q2, δ(q1,y)=q1, δ(q2,y)=q2（y は空でない）を満たす
    証拠を返し、なければ None。
    """
    pairs = _PairAutomaton(min_dfa)
    cyclic = pairs.cyclic_pairs()
    n = pairs.n
    candidates = _merge_candidates(pairs, lambda a, t: cyclic[a * n + t])
    if not candidates:
        logger.debug("F 構成なし（%d 状態）", n)
        return None
    shortest = min(c[0] for c in candidates)
    best = None
    for _, a, t in (c for c in candidates if c[0] == shortest):
        x = pairs.shortest_word((a, t), lambda node, t=t: node == (t, t))
        y = pairs.shortest_word((a, t), lambda node, a=a, t=t: node == (a, t), nonempty=True)
        key = (x, len(y), y, a, t)
        if best is None or key < best:
            best = key
    x, _, y, a, t = best
    witness = ForbiddenWitness(min_dfa.states[a], min_dfa.states[t], x, y, WitnessKind.F_CONSTRUCTION)
    logger.debug("F 構成: %s", witness.describe())
    return witness
