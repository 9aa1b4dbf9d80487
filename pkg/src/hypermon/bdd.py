"""A small reduced ordered binary decision diagram package.

Nodes are plain integers into a shared table; ``0`` and ``1`` are the
terminals.  Variable indices double as levels, so variables created later
sit below earlier ones.  There are no complement edges, which keeps the
cut at a level boundary (``cut``) a straightforward traversal.
"""
from __future__ import annotations

import sys
from typing import Callable, Iterable, Mapping

FALSE = 0
TRUE = 1
_TERMINAL_LEVEL = sys.maxsize


class BDD:
    def __init__(self):
        self.var = [_TERMINAL_LEVEL, _TERMINAL_LEVEL]
        self.lo = [0, 1]
        self.hi = [0, 1]
        self.names: list[str] = []
        self._unique: dict[tuple[int, int, int], int] = {}
        self._ite: dict[tuple[int, int, int], int] = {}
        self._not: dict[int, int] = {}

    # ---------------------------------------------------------------- basics

    def add_var(self, name: str) -> int:
        self.names.append(name)
        return len(self.names) - 1

    @property
    def num_vars(self) -> int:
        return len(self.names)

    def __len__(self) -> int:
        return len(self.var)

    def mk(self, v: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (v, lo, hi)
        u = self._unique.get(key)
        if u is None:
            u = len(self.var)
            self.var.append(v)
            self.lo.append(lo)
            self.hi.append(hi)
            self._unique[key] = u
        return u

    def ithvar(self, v: int) -> int:
        return self.mk(v, FALSE, TRUE)

    def level(self, u: int) -> int:
        return self.var[u]

    # ------------------------------------------------------------ operators

    def ite(self, f: int, g: int, h: int) -> int:
        if f == TRUE:
            return g
        if f == FALSE:
            return h
        if g == h:
            return g
        if g == TRUE and h == FALSE:
            return f
        key = (f, g, h)
        r = self._ite.get(key)
        if r is not None:
            return r
        var = self.var
        v = min(var[f], var[g], var[h])
        f0, f1 = (self.lo[f], self.hi[f]) if var[f] == v else (f, f)
        g0, g1 = (self.lo[g], self.hi[g]) if var[g] == v else (g, g)
        h0, h1 = (self.lo[h], self.hi[h]) if var[h] == v else (h, h)
        r = self.mk(v, self.ite(f0, g0, h0), self.ite(f1, g1, h1))
        self._ite[key] = r
        return r

    def neg(self, u: int) -> int:
        if u <= 1:
            return 1 - u
        r = self._not.get(u)
        if r is None:
            r = self.mk(self.var[u], self.neg(self.lo[u]), self.neg(self.hi[u]))
            self._not[u] = r
        return r

    def conj(self, f: int, g: int) -> int:
        return self.ite(f, g, FALSE)

    def disj(self, f: int, g: int) -> int:
        return self.ite(f, TRUE, g)

    def diff(self, f: int, g: int) -> int:
        """``f and not g``."""
        return self.ite(g, FALSE, f)

    def disj_all(self, us: Iterable[int]) -> int:
        r = FALSE
        for u in us:
            r = self.disj(r, u)
        return r

    def conj_all(self, us: Iterable[int]) -> int:
        r = TRUE
        for u in us:
            r = self.conj(r, u)
        return r

    # ----------------------------------------------------- substitution etc.

    def restrict(self, u: int, values: Mapping[int, bool]) -> int:
        memo: dict[int, int] = {}

        def go(n: int) -> int:
            if n <= 1:
                return n
            r = memo.get(n)
            if r is not None:
                return r
            v = self.var[n]
            if v in values:
                r = go(self.hi[n] if values[v] else self.lo[n])
            else:
                r = self.mk(v, go(self.lo[n]), go(self.hi[n]))
            memo[n] = r
            return r

        return go(u)

    def compose(self, u: int, subst: Mapping[int, int]) -> int:
        """Simultaneously replace variables by functions."""
        memo: dict[int, int] = {}

        def go(n: int) -> int:
            if n <= 1:
                return n
            r = memo.get(n)
            if r is not None:
                return r
            v = self.var[n]
            test = subst[v] if v in subst else self.ithvar(v)
            r = self.ite(test, go(self.hi[n]), go(self.lo[n]))
            memo[n] = r
            return r

        return go(u)

    def cut(self, u: int, boundary: int) -> dict[int, int]:
        """Split ``u`` at a level boundary.

        Returns ``{sub: guard}`` where each ``sub`` is a node whose top
        variable is at or below ``boundary`` and ``guard`` (over variables
        above the boundary) is the set of paths from ``u`` reaching it.
        The guards are pairwise disjoint and cover everything.
        """
        memo: dict[int, dict[int, int]] = {}

        def go(n: int) -> dict[int, int]:
            if self.var[n] >= boundary:
                return {n: TRUE}
            r = memo.get(n)
            if r is not None:
                return r
            v = self.var[n]
            x = self.ithvar(v)
            nx = self.neg(x)
            out: dict[int, int] = {}
            for sub, g in go(self.lo[n]).items():
                out[sub] = self.disj(out.get(sub, FALSE), self.conj(nx, g))
            for sub, g in go(self.hi[n]).items():
                out[sub] = self.disj(out.get(sub, FALSE), self.conj(x, g))
            memo[n] = out
            return out

        return go(u)

    def walk(self, u: int, bits: int, boundary: int) -> int:
        """Follow ``u`` by the assignment encoded in ``bits`` until the boundary."""
        var, lo, hi = self.var, self.lo, self.hi
        while var[u] < boundary:
            u = hi[u] if (bits >> var[u]) & 1 else lo[u]
        return u

    # ------------------------------------------------------------- queries

    def evaluate(self, u: int, value: Callable[[int], bool]) -> bool:
        while u > 1:
            u = self.hi[u] if value(self.var[u]) else self.lo[u]
        return u == TRUE

    def pick(self, u: int) -> dict[int, bool] | None:
        """Some satisfying partial assignment, preferring low branches."""
        if u == FALSE:
            return None
        out: dict[int, bool] = {}
        while u > 1:
            if self.lo[u] != FALSE:
                out[self.var[u]] = False
                u = self.lo[u]
            else:
                out[self.var[u]] = True
                u = self.hi[u]
        return out

    def support(self, u: int) -> set[int]:
        seen, out, stack = set(), set(), [u]
        while stack:
            n = stack.pop()
            if n <= 1 or n in seen:
                continue
            seen.add(n)
            out.add(self.var[n])
            stack.extend((self.lo[n], self.hi[n]))
        return out

    def count(self, u: int, nvars: int) -> int:
        """Number of satisfying assignments over variables ``0..nvars-1``."""
        memo: dict[int, int] = {}

        def go(n: int, level: int) -> int:
            if n <= 1:
                return n << (nvars - level)
            key = n
            if key not in memo:
                v = self.var[n]
                memo[key] = go(self.lo[n], v + 1) + go(self.hi[n], v + 1)
            return memo[key] << (self.var[n] - level)

        return go(u, 0)

    def to_expr(self, u: int, name: Callable[[int], str] | None = None) -> str:
        """Readable sum-of-paths rendering, used in dumps."""
        if u == TRUE:
            return "true"
        if u == FALSE:
            return "false"
        name = name or (lambda v: self.names[v])
        paths: list[str] = []

        def go(n: int, lits: list[str]):
            if n == FALSE:
                return
            if n == TRUE:
                paths.append(" & ".join(lits) if lits else "true")
                return
            v = name(self.var[n])
            go(self.lo[n], lits + [f"!{v}"])
            go(self.hi[n], lits + [v])

        go(u, [])
        if len(paths) == 1:
            return paths[0]
        return " | ".join(f"({p})" if "&" in p else p for p in paths)
