"""Independent reference implementations used to freeze and cross-check values."""
from itertools import product

from hypermon.formula import (FALSE, TRUE, And, Atom, Expr, FalseF, Next, Not, Or, TrueF,
                              Until, desugar, walk)
from hypermon.trace import zip_tuple


def _simp(e: Expr) -> Expr:
    if isinstance(e, Not):
        a = e.arg
        if isinstance(a, TrueF):
            return FALSE
        if isinstance(a, FalseF):
            return TRUE
        if isinstance(a, Not):
            return a.arg
        return e
    if isinstance(e, Or):
        if TRUE in (e.left, e.right):
            return TRUE
        if isinstance(e.left, FalseF):
            return e.right
        if isinstance(e.right, FalseF):
            return e.left
    if isinstance(e, And):
        if FALSE in (e.left, e.right):
            return FALSE
        if isinstance(e.left, TrueF):
            return e.right
        if isinstance(e.right, TrueF):
            return e.left
    return e


def progress(e: Expr, letter: frozenset) -> Expr:
    """Syntactic one-letter progression on an AST, no decision diagrams."""
    if isinstance(e, (TrueF, FalseF)):
        return e
    if isinstance(e, Atom):
        return TRUE if (e.ap, e.var) in letter else FALSE
    if isinstance(e, Not):
        return _simp(Not(progress(e.arg, letter)))
    if isinstance(e, Or):
        return _simp(Or(progress(e.left, letter), progress(e.right, letter)))
    if isinstance(e, And):
        return _simp(And(progress(e.left, letter), progress(e.right, letter)))
    if isinstance(e, Next):
        return e.arg
    if isinstance(e, Until):
        return _simp(Or(progress(e.right, letter),
                        _simp(And(progress(e.left, letter), e))))
    raise TypeError(e)


def _opaque(e: Expr) -> list[Expr]:
    out, stack = [], [e]
    while stack:
        n = stack.pop()
        if isinstance(n, (Atom, Next, Until)):
            if n not in out:
                out.append(n)
        elif isinstance(n, (Not, Or, And)):
            stack.extend(n.children())
    return out


def _value(e: Expr, env: dict) -> bool:
    if isinstance(e, TrueF):
        return True
    if isinstance(e, FalseF):
        return False
    if isinstance(e, Not):
        return not _value(e.arg, env)
    if isinstance(e, Or):
        return _value(e.left, env) or _value(e.right, env)
    if isinstance(e, And):
        return _value(e.left, env) and _value(e.right, env)
    return env[e]


def propositionally_sat(e: Expr) -> bool:
    ops = _opaque(e)
    return any(_value(e, dict(zip(ops, bits))) for bits in product([False, True], repeat=len(ops)))


def progression_accepts(body: Expr, traces, vars_) -> bool:
    """Run survives over the zipped word iff no residual after a step is
    propositionally unsat; the empty word is always accepted."""
    e = desugar(body)
    for letter in zip_tuple(list(traces), list(vars_)):
        e = progress(e, letter)
        if not propositionally_sat(e):
            return False
    return True


def words(aps_vars, max_len):
    """All words over letters of (ap, var) pairs up to ``max_len``."""
    letters = [frozenset(x for x, b in zip(aps_vars, bits) if b)
               for bits in product([False, True], repeat=len(aps_vars))]
    for n in range(max_len + 1):
        yield from product(letters, repeat=n)


def lasso_value(body: Expr, prefix, loop) -> bool:
    """Infinite-word truth by unrolling the lasso far enough to reach a fixpoint."""
    n = len(prefix) + len(loop) * (len(list(walk(body))) + 2)
    word = list(prefix) + [loop[i % len(loop)] for i in range(n)]
    period, start = len(loop), len(prefix)

    def nxt(i):
        return i + 1 if i + 1 < len(word) else start + ((i + 1 - start) % period)

    memo = {}

    def ev(e, i):
        key = (e, i)
        if key in memo:
            return memo[key]
        if isinstance(e, TrueF):
            r = True
        elif isinstance(e, Atom):
            r = (e.ap, e.var) in word[i]
        elif isinstance(e, Not):
            r = not ev(e.arg, i)
        elif isinstance(e, Or):
            r = ev(e.left, i) or ev(e.right, i)
        elif isinstance(e, Next):
            r = ev(e.arg, nxt(i))
        elif isinstance(e, Until):
            r, j, seen = False, i, set()
            while j not in seen:
                seen.add(j)
                if ev(e.right, j):
                    r = True
                    break
                if not ev(e.left, j):
                    break
                j = nxt(j)
        else:
            raise TypeError(e)
        memo[key] = r
        return r

    return ev(desugar(body), 0)


def subset_verdict(acc, members, quantifiers) -> bool:
    """Quantifier expansion of an acceptance table restricted to ``members``."""
    members = sorted(members)

    def go(level, prefix):
        if level == len(quantifiers):
            return bool(acc[prefix])
        vals = (go(level + 1, prefix + (m,)) for m in members)
        return all(vals) if quantifiers[level].value == "forall" else any(vals)

    return go(0, ())


def redundant_brute(acc, t, t2, quantifiers, size) -> bool:
    """``t2`` is redundant given ``t``: adding it never changes the verdict of
    any set that already contains ``t``."""
    others = [j for j in range(size) if j not in (t, t2)]
    for bits in product([False, True], repeat=len(others)):
        base = {t} | {j for j, b in zip(others, bits) if b}
        if subset_verdict(acc, base, quantifiers) != subset_verdict(acc, base | {t2}, quantifiers):
            return False
    return True
