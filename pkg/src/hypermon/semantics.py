"""Finite-trace semantics: a direct recursive evaluator, a linear backwards
evaluator over zipped words, and quantifier expansion over trace sets."""
from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping, Sequence

from .formula import (Atom, Expr, Next, Not, Or, QuantifiedFormula, Quantifier, TrueF,
                      Until, desugar, is_core)
from .trace import Trace


def _core(e: Expr) -> Expr:
    return e if is_core(e) else desugar(e)


def eval_recursive(assignment: Mapping[str, Trace], body: Expr) -> bool:
    """Truth of ``body`` at position 0, following the defining clauses.

    Shifting past the end of a trace yields the empty trace, whose first
    step is the empty set.  An Until searches positions until every trace
    is empty; from then on nothing changes.
    """
    body = _core(body)
    horizon = max((len(t) for t in assignment.values()), default=0)

    def ev(e: Expr, i: int) -> bool:
        if isinstance(e, TrueF):
            return True
        if isinstance(e, Atom):
            return e.ap in assignment[e.var][i]
        if isinstance(e, Not):
            return not ev(e.arg, i)
        if isinstance(e, Or):
            return ev(e.left, i) or ev(e.right, i)
        if isinstance(e, Next):
            return ev(e.arg, i + 1)
        if isinstance(e, Until):
            for k in range(i, max(i, horizon) + 1):
                if ev(e.right, k):
                    return True
                if not ev(e.left, k):
                    return False
            return False
        raise TypeError(f"not a core formula: {e!r}")

    return ev(body, 0)


def _subformulas(e: Expr) -> list[Expr]:
    """Distinct subformulas, children before parents."""
    order: list[Expr] = []
    index: set[Expr] = set()
    stack: list[tuple[Expr, bool]] = [(e, False)]
    while stack:
        node, done = stack.pop()
        if done:
            if node not in index:
                index.add(node)
                order.append(node)
            continue
        if node in index:
            continue
        stack.append((node, True))
        for c in node.children():
            stack.append((c, False))
    return order


def _eps_row(subs: list[Expr], pos: dict[Expr, int]) -> list[bool]:
    """Values on the empty suffix: atoms false, X f = f, f U g = g."""
    eps = [False] * len(subs)
    for k, f in enumerate(subs):
        if isinstance(f, TrueF):
            eps[k] = True
        elif isinstance(f, Not):
            eps[k] = not eps[pos[f.arg]]
        elif isinstance(f, Or):
            eps[k] = eps[pos[f.left]] or eps[pos[f.right]]
        elif isinstance(f, Next):
            eps[k] = eps[pos[f.arg]]
        elif isinstance(f, Until):
            eps[k] = eps[pos[f.right]]
    return eps


def _row(subs: list[Expr], pos: dict[Expr, int], letter, nxt: list[bool]) -> list[bool]:
    letter = letter if isinstance(letter, (set, frozenset)) else frozenset(letter)
    row = [False] * len(subs)
    for k, f in enumerate(subs):
        if isinstance(f, TrueF):
            row[k] = True
        elif isinstance(f, Atom):
            row[k] = (f.ap, f.var) in letter
        elif isinstance(f, Not):
            row[k] = not row[pos[f.arg]]
        elif isinstance(f, Or):
            row[k] = row[pos[f.left]] or row[pos[f.right]]
        elif isinstance(f, Next):
            row[k] = nxt[pos[f.arg]]
        elif isinstance(f, Until):
            row[k] = row[pos[f.right]] or (row[pos[f.left]] and nxt[k])
    return row


def subformula_table(word: Sequence[Iterable[tuple[str, str]]], body: Expr) -> tuple[list[Expr], list[list[bool]]]:
    """Backwards pass: ``rows[i][k]`` is subformula ``k`` at position ``i``.

    Row ``len(word)`` is the empty-suffix row.
    """
    body = _core(body)
    subs = _subformulas(body)
    pos = {f: k for k, f in enumerate(subs)}
    rows = [_eps_row(subs, pos)]
    for i in range(len(word) - 1, -1, -1):
        rows.append(_row(subs, pos, word[i], rows[-1]))
    rows.reverse()
    return subs, rows


def eval_backwards(word: Sequence[Iterable[tuple[str, str]]], body: Expr) -> bool:
    """Same pass as ``subformula_table`` keeping only the current row."""
    body = _core(body)
    subs = _subformulas(body)
    pos = {f: k for k, f in enumerate(subs)}
    row = _eps_row(subs, pos)
    for i in range(len(word) - 1, -1, -1):
        row = _row(subs, pos, word[i], row)
    return row[-1]


def eval_hyper_finite(phi: QuantifiedFormula, traces: Sequence[Trace]) -> bool:
    """Expand the quantifier prefix over ``traces``; the body is evaluated on
    the full (untruncated) traces."""
    body = _core(phi.body)

    def go(level: int, assignment: dict[str, Trace]) -> bool:
        if level == len(phi.prefix):
            return eval_recursive(assignment, body)
        q, v = phi.prefix[level]
        results = (go(level + 1, {**assignment, v: t}) for t in traces)
        return all(results) if q is Quantifier.FORALL else any(results)

    return go(0, {})


def combine(quantifiers: Sequence[Quantifier], k: int, value) -> bool:
    """Quantifier combination over index tuples ``range(k)^n``.

    ``value`` maps an index tuple to a Boolean.
    """
    n = len(quantifiers)

    def go(level: int, prefix: tuple[int, ...]) -> bool:
        if level == n:
            return value(prefix)
        results = (go(level + 1, prefix + (j,)) for j in range(k))
        return all(results) if quantifiers[level] is Quantifier.FORALL else any(results)

    return go(0, ())


def all_tuples(k: int, n: int):
    return product(range(k), repeat=n)
