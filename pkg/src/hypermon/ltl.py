"""LTL over infinite words, with indexed atoms treated as plain propositions.

A tableau in the style of Gerth, Peled, Vardi and Wolper yields a generalized
Büchi automaton with one acceptance family per Until.  Emptiness is decided
by strongly connected components and produces lasso witnesses.  A
three-verdict monitor (good/bad prefixes) is obtained by a subset
construction over the automata for the body and its negation.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .formula import Atom, Expr, Next, Not, Or, TrueF, Until, atoms, desugar, is_core

Letter = frozenset  # frozenset[tuple[str, str]]

# NNF nodes are tuples: ("true",), ("false",), ("lit", atom, positive),
# ("and", a, b), ("or", a, b), ("X", a), ("U", a, b), ("R", a, b)
N_TRUE = ("true",)
N_FALSE = ("false",)


class StateExplosion(RuntimeError):
    def __init__(self, limit: int):
        super().__init__(f"tableau exceeds {limit} nodes")
        self.limit = limit


def to_nnf(e: Expr, negate: bool = False) -> tuple:
    if not is_core(e):
        e = desugar(e)
    return _nnf(e, negate)


def _nnf(e: Expr, neg: bool) -> tuple:
    if isinstance(e, TrueF):
        return N_FALSE if neg else N_TRUE
    if isinstance(e, Atom):
        return ("lit", e, not neg)
    if isinstance(e, Not):
        return _nnf(e.arg, not neg)
    if isinstance(e, Or):
        a, b = _nnf(e.left, neg), _nnf(e.right, neg)
        return ("and", a, b) if neg else ("or", a, b)
    if isinstance(e, Next):
        return ("X", _nnf(e.arg, neg))
    if isinstance(e, Until):
        a, b = _nnf(e.left, neg), _nnf(e.right, neg)
        return ("R", a, b) if neg else ("U", a, b)
    raise TypeError(f"not a core formula: {e!r}")


def _untils(f: tuple, acc: dict) -> dict:
    if f[0] == "U":
        acc.setdefault(f)
    for c in f[1:]:
        if isinstance(c, tuple):
            _untils(c, acc)
    return acc


@dataclass(frozen=True)
class TableauNode:
    old: frozenset
    next: frozenset

    def literals(self):
        return [f for f in self.old if f[0] == "lit"]

    def consistent(self, letter: frozenset) -> bool:
        return all(((f[1].ap, f[1].var) in letter) == f[2] for f in self.literals())

    def letter(self) -> frozenset:
        return frozenset((f[1].ap, f[1].var) for f in self.literals() if f[2])


def _covers(formulas: Iterable[tuple]) -> list[TableauNode]:
    """All consistent expansions of a set of obligations for one position."""
    out: dict[TableauNode, None] = {}
    stack = [(list(formulas), frozenset(), frozenset())]
    while stack:
        todo, old, nxt = stack.pop()
        todo = list(todo)
        dead = False
        while todo:
            f = todo.pop()
            if f in old:
                continue
            tag = f[0]
            if tag == "true":
                old = old | {f}  # recorded so "right operand present" can see it
                continue
            if tag == "false":
                dead = True
                break
            if tag == "lit":
                if ("lit", f[1], not f[2]) in old:
                    dead = True
                    break
                old = old | {f}
            elif tag == "and":
                old = old | {f}
                todo.extend((f[1], f[2]))
            elif tag == "X":
                old = old | {f}
                nxt = nxt | {f[1]}
            elif tag == "or":
                stack.append((todo + [f[2]], old | {f}, nxt))
                old = old | {f}
                todo.append(f[1])
            elif tag == "U":
                # either the right side now, or the left side now and f next
                stack.append((todo + [f[1]], old | {f}, nxt | {f}))
                old = old | {f}
                todo.append(f[2])
            elif tag == "R":
                stack.append((todo + [f[2]], old | {f}, nxt | {f}))
                old = old | {f}
                todo.extend((f[1], f[2]))
        if not dead:
            out.setdefault(TableauNode(old, nxt))
    return list(out)


@dataclass
class GeneralizedBuchi:
    nodes: list[TableauNode]
    initial: list[int]
    succ: list[list[int]]
    families: list[frozenset[int]]
    untils: list[tuple] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not self.fair_sccs()

    def sccs(self) -> list[list[int]]:
        """Tarjan's algorithm, iterative."""
        index: dict[int, int] = {}
        low: dict[int, int] = {}
        on_stack: set[int] = set()
        stack: list[int] = []
        out: list[list[int]] = []
        counter = 0
        for root in range(len(self.nodes)):
            if root in index:
                continue
            work = [(root, 0)]
            index[root] = low[root] = counter
            counter += 1
            stack.append(root)
            on_stack.add(root)
            while work:
                v, i = work[-1]
                succ = self.succ[v]
                if i < len(succ):
                    work[-1] = (v, i + 1)
                    w = succ[i]
                    if w not in index:
                        index[w] = low[w] = counter
                        counter += 1
                        stack.append(w)
                        on_stack.add(w)
                        work.append((w, 0))
                    elif w in on_stack:
                        low[v] = min(low[v], index[w])
                else:
                    work.pop()
                    if work:
                        u = work[-1][0]
                        low[u] = min(low[u], low[v])
                    if low[v] == index[v]:
                        comp = []
                        while True:
                            w = stack.pop()
                            on_stack.discard(w)
                            comp.append(w)
                            if w == v:
                                break
                        out.append(comp)
        return out

    def fair_sccs(self) -> list[list[int]]:
        fair = []
        for comp in self.sccs():
            members = set(comp)
            nontrivial = len(comp) > 1 or comp[0] in self.succ[comp[0]]
            if nontrivial and all(members & fam for fam in self.families):
                fair.append(comp)
        return fair

    def live_nodes(self) -> set[int]:
        """Nodes from which some accepting run starts."""
        pred: list[list[int]] = [[] for _ in self.nodes]
        for v, ws in enumerate(self.succ):
            for w in ws:
                pred[w].append(v)
        live = {v for comp in self.fair_sccs() for v in comp}
        queue = deque(live)
        while queue:
            w = queue.popleft()
            for v in pred[w]:
                if v not in live:
                    live.add(v)
                    queue.append(v)
        return live


def build_gba(body: Expr | tuple, negate: bool = False, node_cap: int = 100_000) -> GeneralizedBuchi:
    f = body if isinstance(body, tuple) else to_nnf(body, negate)
    nodes: list[TableauNode] = []
    ids: dict[TableauNode, int] = {}
    succ: list[list[int]] = []
    cover_cache: dict[frozenset, list[int]] = {}

    def intern(n: TableauNode) -> int:
        i = ids.get(n)
        if i is None:
            if len(nodes) >= node_cap:
                raise StateExplosion(node_cap)
            i = len(nodes)
            ids[n] = i
            nodes.append(n)
            succ.append([])
            queue.append(i)
        return i

    def covers(req: frozenset) -> list[int]:
        r = cover_cache.get(req)
        if r is None:
            r = [intern(n) for n in _covers(req)]
            cover_cache[req] = r
        return r

    queue: deque[int] = deque()
    initial = covers(frozenset([f]))
    while queue:
        i = queue.popleft()
        succ[i] = covers(nodes[i].next)

    untils = list(_untils(f, {}))
    families = [frozenset(i for i, n in enumerate(nodes) if u not in n.old or u[2] in n.old)
                for u in untils]
    return GeneralizedBuchi(nodes, initial, succ, families, untils)


# ------------------------------------------------------------------ lassos


@dataclass(frozen=True)
class LassoWitness:
    prefix: tuple[Letter, ...]
    loop: tuple[Letter, ...]

    def __post_init__(self):
        if not self.loop:
            raise ValueError("lasso loop must be nonempty")

    def letter(self, i: int) -> Letter:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.loop[(i - len(self.prefix)) % len(self.loop)]

    def project(self, var: str) -> tuple[tuple[frozenset, ...], tuple[frozenset, ...]]:
        pr = lambda w: tuple(frozenset(a for a, v in l if v == var) for l in w)
        return pr(self.prefix), pr(self.loop)


def _bfs_path(g: GeneralizedBuchi, starts: Iterable[int], targets: set[int],
              allowed: set[int] | None = None) -> list[int] | None:
    parent: dict[int, int | None] = {}
    queue = deque()
    for s in starts:
        if allowed is not None and s not in allowed:
            continue
        if s not in parent:
            parent[s] = None
            queue.append(s)
    while queue:
        v = queue.popleft()
        if v in targets:
            path = [v]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for w in g.succ[v]:
            if w not in parent and (allowed is None or w in allowed):
                parent[w] = v
                queue.append(w)
    return None


def find_lasso(g: GeneralizedBuchi) -> LassoWitness | None:
    fair = g.fair_sccs()
    if not fair:
        return None
    fair_nodes = {v for comp in fair for v in comp}
    stem = _bfs_path(g, g.initial, fair_nodes)
    if stem is None:
        return None
    s = stem[-1]
    comp = next(set(c) for c in fair if s in c)
    cycle = [s]
    for fam in g.families:
        if any(v in fam for v in cycle):
            continue
        p = _bfs_path(g, [cycle[-1]], fam & comp, comp)
        cycle.extend(p[1:])
    back = _bfs_path(g, g.succ[cycle[-1]], {s}, comp)
    loop_nodes = cycle + back[:-1]
    prefix = tuple(g.nodes[v].letter() for v in stem[:-1])
    loop = tuple(g.nodes[v].letter() for v in loop_nodes)
    return LassoWitness(prefix, loop)


def is_satisfiable(body: Expr, node_cap: int = 100_000) -> LassoWitness | None:
    """A lasso model of ``body``, or ``None`` when it is unsatisfiable."""
    return find_lasso(build_gba(body, node_cap=node_cap))


def is_valid(body: Expr, node_cap: int = 100_000) -> bool:
    return find_lasso(build_gba(body, negate=True, node_cap=node_cap)) is None


def eval_on_lasso(body: Expr, w: LassoWitness) -> bool:
    """Truth of ``body`` at position 0 of ``prefix · loop^ω``."""
    if not is_core(body):
        body = desugar(body)
    P, L = len(w.prefix), len(w.loop)
    N = P + L
    succ = [i + 1 for i in range(N - 1)] + [P]
    letters = [w.letter(i) for i in range(N)]
    memo: dict[Expr, list[bool]] = {}

    def val(e: Expr) -> list[bool]:
        r = memo.get(e)
        if r is not None:
            return r
        if isinstance(e, TrueF):
            r = [True] * N
        elif isinstance(e, Atom):
            r = [(e.ap, e.var) in letters[i] for i in range(N)]
        elif isinstance(e, Not):
            r = [not x for x in val(e.arg)]
        elif isinstance(e, Or):
            a, b = val(e.left), val(e.right)
            r = [x or y for x, y in zip(a, b)]
        elif isinstance(e, Next):
            a = val(e.arg)
            r = [a[succ[i]] for i in range(N)]
        elif isinstance(e, Until):
            a, b = val(e.left), val(e.right)
            r = [False] * N
            changed = True
            while changed:
                changed = False
                for i in range(N - 1, -1, -1):
                    v = b[i] or (a[i] and r[succ[i]])
                    if v != r[i]:
                        r[i] = v
                        changed = True
        else:
            raise TypeError(f"not a core formula: {e!r}")
        memo[e] = r
        return r

    return val(body)[0]


# ------------------------------------------------------------ FSM monitor

TOP, BOTTOM, UNKNOWN = "Top", "Bottom", "Unknown"


@dataclass
class MonitorFsm:
    atoms: tuple[tuple[str, str], ...]
    states: list[tuple[frozenset, frozenset]]
    delta: list[list[int]]
    verdicts: list[str]
    initial: int = 0

    def letter_code(self, letter: Iterable[tuple[str, str]]) -> int:
        letter = set(letter)
        return sum(1 << k for k, a in enumerate(self.atoms) if a in letter)

    def step(self, state: int, letter: Iterable[tuple[str, str]]) -> int:
        return self.delta[state][self.letter_code(letter)]

    def run(self, word: Sequence[Iterable[tuple[str, str]]]) -> int:
        q = self.initial
        for l in word:
            q = self.step(q, l)
        return q

    def reachable(self, start: int) -> set[int]:
        seen = {start}
        queue = deque([start])
        while queue:
            q = queue.popleft()
            for r in self.delta[q]:
                if r not in seen:
                    seen.add(r)
                    queue.append(r)
        return seen

    def can_reach(self, targets: set[int]) -> set[int]:
        """States from which some state in ``targets`` is reachable."""
        pred: list[set[int]] = [set() for _ in self.states]
        for q, row in enumerate(self.delta):
            for r in row:
                pred[r].add(q)
        good = set(targets)
        queue = deque(targets)
        while queue:
            r = queue.popleft()
            for q in pred[r]:
                if q not in good:
                    good.add(q)
                    queue.append(q)
        return good


def build_fsm_monitor(body: Expr, node_cap: int = 100_000, state_cap: int = 100_000) -> MonitorFsm:
    if not is_core(body):
        body = desugar(body)
    pos = build_gba(body, node_cap=node_cap)
    neg = build_gba(body, negate=True, node_cap=node_cap)
    live_pos, live_neg = pos.live_nodes(), neg.live_nodes()
    atom_list = tuple(sorted((a.var, a.ap) for a in atoms(body)))
    atom_list = tuple((ap, var) for var, ap in atom_list)
    letters = [frozenset(a for k, a in enumerate(atom_list) if (code >> k) & 1)
               for code in range(1 << len(atom_list))]

    def advance(g: GeneralizedBuchi, cur: frozenset, letter: frozenset) -> frozenset:
        out = set()
        for v in cur:
            if g.nodes[v].consistent(letter):
                out.update(g.succ[v])
        return frozenset(out)

    start = (frozenset(pos.initial), frozenset(neg.initial))
    states = [start]
    index = {start: 0}
    delta: list[list[int]] = []
    i = 0
    while i < len(states):
        sp, sn = states[i]
        row = []
        for letter in letters:
            nxt = (advance(pos, sp, letter), advance(neg, sn, letter))
            j = index.get(nxt)
            if j is None:
                if len(states) >= state_cap:
                    raise StateExplosion(state_cap)
                j = len(states)
                index[nxt] = j
                states.append(nxt)
            row.append(j)
        delta.append(row)
        i += 1

    verdicts = []
    for sp, sn in states:
        if not (sp & live_pos):
            verdicts.append(BOTTOM)
        elif not (sn & live_neg):
            verdicts.append(TOP)
        else:
            verdicts.append(UNKNOWN)
    return MonitorFsm(atom_list, states, delta, verdicts)
