"""Deterministic monitor templates built by formula progression.

A state is a canonical Boolean function over *obligation* variables, one per
atom, ``X`` or ``U`` subformula that has to hold at the current position.
Reading a letter substitutes every obligation by its one-step expansion; the
result, a function over the letter's atoms and the obligations of the next
position, is cut at the atom/obligation boundary to obtain the guarded
successors.  A letter whose residual is constantly false has no
transition.

Atom variables occupy the lowest decision-diagram levels in the order
(variable index, proposition name); obligations are allocated after them on
demand.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .bdd import BDD, FALSE, TRUE
from .formula import Atom, Expr, Next, Not, Or, TrueF, Until, desugar, is_core, to_text
from .trace import Trace


class StateExplosion(RuntimeError):
    def __init__(self, limit: int):
        super().__init__(f"monitor template exceeds {limit} states")
        self.limit = limit


DEFAULT_STATE_CAP = 100_000


class MonitorTemplate:
    def __init__(self, body: Expr, vars_: Sequence[str], aps: Iterable[str],
                 state_cap: int = DEFAULT_STATE_CAP):
        if not is_core(body):
            body = desugar(body)
        self.body = body
        self.vars = tuple(vars_)
        self.aps = tuple(sorted(set(aps)))
        self.state_cap = state_cap
        self.bdd = BDD()
        self.ap_index = {a: k for k, a in enumerate(self.aps)}
        self.var_index = {v: j for j, v in enumerate(self.vars)}
        for v in self.vars:
            for a in self.aps:
                self.bdd.add_var(f"{a}[{v}]")
        self.n_atoms = len(self.vars) * len(self.aps)
        self.obligations: list[Expr] = []
        self._obl_var: dict[Expr, int] = {}
        self._exp: dict[Expr, int] = {}
        self._trans: dict[int, int] = {}
        self._step: dict[tuple[int, int], int] = {}
        self._cut: dict[int, dict[int, int]] = {}
        self.initial = self.encode(body)
        self.states: list[int] = []
        self._state_set: set[int] = set()
        self._add_state(self.initial)

    # -------------------------------------------------------------- encoding

    def atom_level(self, ap: str, var: str) -> int:
        return self.var_index[var] * len(self.aps) + self.ap_index[ap]

    def level_atom(self, level: int) -> tuple[str, str]:
        j, k = divmod(level, len(self.aps))
        return self.aps[k], self.vars[j]

    def step_code(self, step: Iterable[str], slot: int) -> int:
        base = slot * len(self.aps)
        code = 0
        for a in step:
            k = self.ap_index.get(a)
            if k is not None:
                code |= 1 << (base + k)
        return code

    def letter_code(self, letter: Iterable[tuple[str, str]]) -> int:
        code = 0
        for a, v in letter:
            if a in self.ap_index and v in self.var_index:
                code |= 1 << self.atom_level(a, v)
        return code

    def code_letter(self, code: int, levels: Iterable[int] | None = None) -> frozenset[tuple[str, str]]:
        levels = range(self.n_atoms) if levels is None else levels
        return frozenset(self.level_atom(l) for l in levels if (code >> l) & 1)

    def trace_codes(self, t: Trace, slot: int) -> list[int]:
        return [self.step_code(s, slot) for s in t.steps]

    # ----------------------------------------------------------- progression

    def _obligation(self, f: Expr) -> int:
        v = self._obl_var.get(f)
        if v is None:
            v = self.bdd.add_var(to_text(f))
            self._obl_var[f] = v
            self.obligations.append(f)
        return v

    def encode(self, f: Expr) -> int:
        """``f`` as a function of the obligations at the current position."""
        b = self.bdd
        if isinstance(f, TrueF):
            return TRUE
        if isinstance(f, Not):
            return b.neg(self.encode(f.arg))
        if isinstance(f, Or):
            return b.disj(self.encode(f.left), self.encode(f.right))
        if isinstance(f, (Atom, Next, Until)):
            return b.ithvar(self._obligation(f))
        raise TypeError(f"not a core formula: {f!r}")

    def expand(self, f: Expr) -> int:
        """One-step expansion over current atoms and next obligations."""
        r = self._exp.get(f)
        if r is not None:
            return r
        b = self.bdd
        if isinstance(f, TrueF):
            r = TRUE
        elif isinstance(f, Atom):
            r = b.ithvar(self.atom_level(f.ap, f.var))
        elif isinstance(f, Not):
            r = b.neg(self.expand(f.arg))
        elif isinstance(f, Or):
            r = b.disj(self.expand(f.left), self.expand(f.right))
        elif isinstance(f, Next):
            r = self.encode(f.arg)
        elif isinstance(f, Until):
            r = b.disj(self.expand(f.right),
                       b.conj(self.expand(f.left), b.ithvar(self._obligation(f))))
        else:
            raise TypeError(f"not a core formula: {f!r}")
        self._exp[f] = r
        return r

    def transition_function(self, q: int) -> int:
        """``q`` with every obligation replaced by its expansion."""
        r = self._trans.get(q)
        if r is None:
            subst = {v: self.expand(self.obligations[v - self.n_atoms])
                     for v in self.bdd.support(q)}
            r = self.bdd.compose(q, subst)
            self._trans[q] = r
        return r

    def cut(self, u: int) -> dict[int, int]:
        """Guarded successors of a (possibly restricted) transition function."""
        r = self._cut.get(u)
        if r is None:
            r = {s: g for s, g in self.bdd.cut(u, self.n_atoms).items() if s != FALSE}
            self._cut[u] = r
        return r

    def _add_state(self, q: int):
        if q not in self._state_set:
            if len(self.states) >= self.state_cap:
                raise StateExplosion(self.state_cap)
            self._state_set.add(q)
            self.states.append(q)

    def successors(self, q: int) -> dict[int, int]:
        out = self.cut(self.transition_function(q))
        for s in out:
            self._add_state(s)
        return out

    def step(self, q: int, code: int) -> int:
        """Successor on a fully specified letter, ``FALSE`` if none."""
        key = (q, code)
        r = self._step.get(key)
        if r is None:
            r = self.bdd.walk(self.transition_function(q), code, self.n_atoms)
            if r != FALSE:
                self._add_state(r)
            self._step[key] = r
        return r

    def explore(self) -> "MonitorTemplate":
        """Materialize every reachable state."""
        queue = deque([self.initial])
        seen = {self.initial}
        while queue:
            q = queue.popleft()
            for s in self.successors(q):
                if s not in seen:
                    seen.add(s)
                    queue.append(s)
        return self

    @property
    def transitions(self) -> dict[int, list[tuple[int, int]]]:
        return {q: [(g, s) for s, g in self.successors(q).items()] for q in list(self.states)}

    # --------------------------------------------------------------- display

    def state_text(self, q: int) -> str:
        return self.bdd.to_expr(q)

    def guard_text(self, g: int) -> str:
        return self.bdd.to_expr(g)

    def dump(self) -> str:
        self.explore()
        index = {q: i for i, q in enumerate(self.states)}
        lines = [f"template vars={','.join(self.vars)} aps={','.join(self.aps)} "
                 f"states={len(self.states)}"]
        for q in self.states:
            mark = " (initial)" if q == self.initial else ""
            lines.append(f"q{index[q]}{mark}: {self.state_text(q)}")
            for s, g in self.successors(q).items():
                lines.append(f"  --[{self.guard_text(g)}]--> q{index[s]}")
        return "\n".join(lines)


def build_template(body: Expr, vars_: Sequence[str], aps: Iterable[str],
                   state_cap: int = DEFAULT_STATE_CAP, explore: bool = True) -> MonitorTemplate:
    tpl = MonitorTemplate(body, vars_, aps, state_cap)
    return tpl.explore() if explore else tpl


def template_for(formula, state_cap: int = DEFAULT_STATE_CAP, explore: bool = False) -> MonitorTemplate:
    """Template of a quantified formula's body."""
    return build_template(formula.body, formula.vars, formula.aps, state_cap, explore)


def run_codes(tpl: MonitorTemplate, columns: Sequence[Sequence[int]]) -> tuple[bool, int, int]:
    """Run over per-slot code columns; returns (accepted, final state, steps)."""
    m = min((len(c) for c in columns), default=0)
    q = tpl.initial
    for i in range(m):
        code = 0
        for c in columns:
            code |= c[i]
        q = tpl.step(q, code)
        if q == FALSE:
            return False, q, i
    return True, q, m


def accepts_tuple(tpl: MonitorTemplate, traces: Sequence[Trace]) -> bool:
    if len(traces) != len(tpl.vars):
        raise ValueError(f"expected {len(tpl.vars)} traces, got {len(traces)}")
    columns = [tpl.trace_codes(t, j) for j, t in enumerate(traces)]
    return run_codes(tpl, columns)[0]


# ---------------------------------------------------------- instantiation


@dataclass
class InstantiatedMonitor:
    template: MonitorTemplate
    binding: dict[str, Trace]
    free_vars: tuple[str, ...] = field(init=False)
    horizon: float = field(init=False)

    def __post_init__(self):
        tpl = self.template
        unknown = set(self.binding) - set(tpl.vars)
        if unknown:
            raise ValueError(f"unknown trace variables {sorted(unknown)}")
        self.free_vars = tuple(v for v in tpl.vars if v not in self.binding)
        self.horizon = min((len(t) for t in self.binding.values()), default=float("inf"))
        self._bound_levels = [tpl.atom_level(a, v) for v in self.binding for a in tpl.aps]
        self._free_levels = [tpl.atom_level(a, v) for v in self.free_vars for a in tpl.aps]
        n = 0 if self.horizon == float("inf") else int(self.horizon)
        self._codes = [0] * n
        for v, t in self.binding.items():
            slot = tpl.var_index[v]
            for i in range(n):
                self._codes[i] |= tpl.step_code(t.steps[i], slot)
        self._restricted: dict[tuple[int, int], int] = {}

    def position_key(self, i: int) -> int:
        return self._codes[i] if i < self.horizon else -1

    def guards(self, q: int, i: int) -> dict[int, int]:
        """Guarded successors of ``q`` at position ``i`` over free atoms."""
        if q == TRUE or i >= self.horizon:
            return {TRUE: TRUE}
        tpl = self.template
        code = self._codes[i] if self.binding else 0
        key = (q, code)
        u = self._restricted.get(key)
        if u is None:
            t = tpl.transition_function(q)
            if self.binding:
                t = tpl.bdd.restrict(t, {l: bool((code >> l) & 1) for l in self._bound_levels})
            u = t
            self._restricted[key] = u
        return tpl.cut(u)

    def letter_code(self, letter: Iterable[tuple[str, str]]) -> int:
        free = set(self.free_vars)
        return self.template.letter_code((a, v) for a, v in letter if v in free)

    def accepts(self, word: Sequence[Iterable[tuple[str, str]]]) -> bool:
        tpl = self.template
        q = tpl.initial
        for i, letter in enumerate(word):
            if i >= self.horizon:
                return True
            q = tpl.step(q, self._codes[i] | self.letter_code(letter) if self.binding
                         else self.letter_code(letter))
            if q == FALSE:
                return False
        return True

    def letter_from_assignment(self, assignment: Mapping[int, bool] | None) -> frozenset[tuple[str, str]]:
        assignment = assignment or {}
        return frozenset(self.template.level_atom(l) for l in self._free_levels
                         if assignment.get(l, False))


def instantiate(tpl: MonitorTemplate, binding: Mapping[str, Trace]) -> InstantiatedMonitor:
    return InstantiatedMonitor(tpl, dict(binding))


@dataclass
class InclusionResult:
    holds: bool
    counterexample: list[frozenset[tuple[str, str]]] | None = None

    def __bool__(self) -> bool:
        return self.holds


def language_inclusion(A: InstantiatedMonitor, B: InstantiatedMonitor,
                       want_counterexample: bool = True) -> InclusionResult:
    """Decide L(A) ⊆ L(B) by search over the synchronized product."""
    if A.template is not B.template:
        raise ValueError("monitors must share one template")
    if set(A.free_vars) != set(B.free_vars):
        raise ValueError("monitors must have the same free variables")
    bdd = A.template.bdd
    hA, hB = A.horizon, B.horizon
    finite = [h for h in (hA, hB) if h != float("inf")]
    H = int(max(finite)) if finite else 0

    start = (0, A.template.initial, B.template.initial)
    parent: dict[tuple[int, int, int], tuple[tuple[int, int, int], int] | None] = {start: None}
    queue = deque([start])

    def word_to(node, last_guard):
        guards = [last_guard]
        while parent[node] is not None:
            node, g = parent[node]
            guards.append(g)
        guards.reverse()
        return [A.letter_from_assignment(bdd.pick(g)) for g in guards]

    while queue:
        node = queue.popleft()
        i, qa, qb = node
        if qb == TRUE or i >= hB:
            continue
        ga_map = A.guards(qa, i)
        gb_map = B.guards(qb, i)
        any_b = bdd.disj_all(gb_map.values())
        nxt = min(i + 1, H)
        for sa, ga in ga_map.items():
            bad = bdd.diff(ga, any_b)
            if bad != FALSE:
                if not want_counterexample:
                    return InclusionResult(False)
                return InclusionResult(False, word_to(node, bad))
            for sb, gb in gb_map.items():
                both = bdd.conj(ga, gb)
                if both == FALSE:
                    continue
                na = TRUE if i + 1 >= hA else sa
                nb = TRUE if i + 1 >= hB else sb
                key = (nxt, na, nb)
                if key not in parent:
                    parent[key] = (node, both)
                    queue.append(key)
    return InclusionResult(True)
