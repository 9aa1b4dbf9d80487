"""Specification analysis and trace analysis.

Specification analysis reduces symmetry, transitivity and reflexivity of a
universal formula to LTL unsatisfiability over indexed atoms.  Trace
analysis decides dominance between traces by language inclusion of
instantiated monitors and keeps stored trace sets minimal.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from .automata import MonitorTemplate, instantiate, language_inclusion, template_for
from .formula import (And, Expr, Iff, Not, Or, QuantifiedFormula, Quantifier, desugar,
                      substitute_variables)
from .ltl import is_satisfiable
from .trace import Trace


class UnsupportedShape(ValueError):
    pass


def _xor(a: Expr, b: Expr) -> Expr:
    return Not(Iff(a, b))


def _fresh(names: Sequence[str], base: str) -> str:
    k, name = 0, base
    while name in names:
        k += 1
        name = f"{base}{k}"
    return name


def _require_universal(phi: QuantifiedFormula):
    if not phi.universal:
        raise UnsupportedShape(f"expected a universal formula, got {phi.shape}")


def symmetry_query(phi: QuantifiedFormula) -> Expr:
    """Satisfiable iff the body changes under the swap or the rotation of
    the trace variables."""
    vs = phi.vars
    swap = dict(zip(vs, vs))
    swap[vs[0]], swap[vs[1]] = vs[1], vs[0]
    rot = {v: vs[(k + 1) % len(vs)] for k, v in enumerate(vs)}
    q: Expr = _xor(phi.body, substitute_variables(phi.body, swap))
    if len(vs) > 2:
        q = Or(q, _xor(phi.body, substitute_variables(phi.body, rot)))
    return q


def transitivity_query(phi: QuantifiedFormula) -> Expr:
    v1, v2 = phi.vars
    v3 = _fresh(phi.vars, "r")
    b = phi.body
    return And(And(b, substitute_variables(b, {v1: v2, v2: v3})),
               Not(substitute_variables(b, {v1: v1, v2: v3})))


def reflexivity_query(phi: QuantifiedFormula) -> Expr:
    first = phi.vars[0]
    return Not(substitute_variables(phi.body, {v: first for v in phi.vars}))


def check_symmetry(phi: QuantifiedFormula) -> bool:
    _require_universal(phi)
    if phi.arity < 2:
        raise ValueError("symmetry needs at least two trace variables")
    return is_satisfiable(desugar(symmetry_query(phi))) is None


def check_transitivity(phi: QuantifiedFormula) -> bool | None:
    """``None`` stands for not applicable (arity other than two)."""
    _require_universal(phi)
    if phi.arity != 2:
        return None
    return is_satisfiable(desugar(transitivity_query(phi))) is None


def check_reflexivity(phi: QuantifiedFormula) -> bool:
    _require_universal(phi)
    return is_satisfiable(desugar(reflexivity_query(phi))) is None


@dataclass
class SpecProperties:
    symmetric: bool = False
    transitive: bool | None = False
    reflexive: bool = False
    timings: dict[str, float] = field(default_factory=dict)

    def row(self) -> tuple[bool, bool, bool]:
        """Table view; not applicable counts as no."""
        return self.symmetric, bool(self.transitive), self.reflexive

    def report(self) -> str:
        def yn(v):
            return "n/a" if v is None else ("yes" if v else "no")

        lines = []
        for name in ("symmetric", "transitive", "reflexive"):
            t = self.timings.get(name)
            extra = f"  ({t * 1000:.1f} ms)" if t is not None else ""
            lines.append(f"{name}: {yn(getattr(self, name))}{extra}")
        return "\n".join(lines)


def analyze(phi: QuantifiedFormula) -> SpecProperties:
    props = SpecProperties()
    checks = [("symmetric", check_symmetry), ("transitive", check_transitivity),
              ("reflexive", check_reflexivity)]
    for name, check in checks:
        if name == "symmetric" and phi.arity < 2:
            continue
        start = time.perf_counter()
        setattr(props, name, check(phi))
        props.timings[name] = time.perf_counter() - start
    return props


# ---------------------------------------------------------------- dominance


SUPPORTED_SHAPES = ("ForallOnly", "ExistsOnly", "ForallExists", "ExistsForall")


def dominance_obligations(phi: QuantifiedFormula) -> list[tuple[str, bool]]:
    """Per variable: ``(var, forward)``; forward means L(M[t/var]) ⊆ L(M[t'/var]),
    otherwise the reverse inclusion is required."""
    if phi.shape.kind not in SUPPORTED_SHAPES:
        raise UnsupportedShape(f"no dominance criterion for {phi.shape}")
    return [(v, q is Quantifier.FORALL) for q, v in phi.prefix]


class DominanceChecker:
    """Caches instantiated monitors per (variable, trace) for one formula."""

    def __init__(self, phi: QuantifiedFormula, template: MonitorTemplate | None = None):
        self.phi = phi
        self.template = template or template_for(phi)
        self.obligations = dominance_obligations(phi)
        self._inst: dict = {}
        self.checks = 0

    def _monitor(self, var: str, t: Trace):
        key = (var, t.steps)
        m = self._inst.get(key)
        if m is None:
            m = instantiate(self.template, {var: t})
            self._inst[key] = m
        return m

    def dominates(self, t: Trace, t2: Trace) -> bool:
        """Whether ``t`` dominates ``t2`` (``t2`` is redundant given ``t``)."""
        self.checks += 1
        if t.steps == t2.steps:
            return True
        for var, forward in self.obligations:
            a, b = self._monitor(var, t), self._monitor(var, t2)
            if not forward:
                a, b = b, a
            if not language_inclusion(a, b, want_counterexample=False).holds:
                return False
        return True

    def forget(self, t: Trace):
        for var, _ in self.obligations:
            self._inst.pop((var, t.steps), None)


def dominates(t: Trace, t2: Trace, phi: QuantifiedFormula,
              template: MonitorTemplate | None = None) -> bool:
    return DominanceChecker(phi, template).dominates(t, t2)


def minimize_insert(stored: list[Trace], t: Trace, checker: DominanceChecker
                    ) -> tuple[list[Trace], bool, int]:
    """Insert ``t`` keeping the set minimal under dominance.

    Returns the new list, whether ``t`` was inserted and how many stored
    traces were removed.
    """
    for s in stored:
        if checker.dominates(s, t):
            return stored, False, 0
    kept = [s for s in stored if not checker.dominates(t, s)]
    removed = len(stored) - len(kept)
    kept.append(t)
    return kept, True, removed


# --------------------------------------------------------- tuple reduction


def reduced_index_tuples(k: int, n: int, props: SpecProperties | None = None,
                         use_symmetry: bool = False, use_reflexivity: bool = False,
                         use_transitivity: bool = False) -> list[tuple[int, ...]]:
    """Index tuples over stored traces ``0..k-1`` plus the new trace ``k``
    that have to be checked when the new trace arrives."""
    new = k
    sym = use_symmetry and props is not None and props.symmetric
    refl = use_reflexivity and props is not None and props.reflexive
    trans = (use_transitivity and props is not None and bool(props.transitive)
             and sym and refl and n == 2)
    if trans:
        return [(0, new)] if k > 0 else []
    out = []
    for tup in product(range(k + 1), repeat=n):
        if new not in tup:
            continue
        if sym and list(tup) != sorted(tup):
            continue
        if refl and all(x == new for x in tup):
            continue
        out.append(tup)
    return out


def reduced_tuple_enumeration(stored: Sequence[Trace], t_new: Trace,
                              props: SpecProperties | None, n: int) -> list[tuple[Trace, ...]]:
    pool = list(stored) + [t_new]
    idx = reduced_index_tuples(len(stored), n, props, True, True, True)
    return [tuple(pool[i] for i in tup) for tup in idx]
