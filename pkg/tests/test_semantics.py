import random

from hypothesis import given, strategies as st

from conftest import random_formula, tr, trace_st
from hypermon.formula import parse_expr, parse_formula
from hypermon.semantics import (all_tuples, combine, eval_backwards, eval_hyper_finite,
                                eval_recursive, subformula_table)
from hypermon.trace import Trace, zip_tuple


def _both(body, traces, vars_):
    word = zip_tuple(traces, vars_)
    return eval_recursive(dict(zip(vars_, traces)), body), eval_backwards(word, body)


def test_empty_suffix_row():
    # atoms false, X f = f, f U g = g
    assert eval_backwards([], parse_expr("!a[p]"))
    assert not eval_backwards([], parse_expr("X a[p]"))
    assert eval_backwards([], parse_expr("a[p] U true"))
    assert eval_backwards([], parse_expr("G !a[p]"))
    assert not eval_backwards([], parse_expr("F a[p]"))


def test_examples():
    ab = tr("{a}{a}{b}")
    assert eval_recursive({"p": ab}, parse_expr("a[p] U b[p]"))
    assert not eval_recursive({"p": tr("{a}{a}")}, parse_expr("a[p] U b[p]"))
    assert eval_recursive({"p": tr("{a}")}, parse_expr("X !a[p]"))
    assert eval_recursive({"p": tr("{a}{a}"), "q": tr("{a}{a}")}, parse_expr("G (a[p] <-> a[q])"))


def test_table_shape():
    subs, rows = subformula_table(zip_tuple([tr("{a}{}")], ["p"]), parse_expr("F a[p]"))
    assert len(rows) == 3 and len(rows[0]) == len(subs)
    assert [r[-1] for r in rows] == [True, False, False]


def test_hyper_finite():
    phi = parse_formula("forall p. exists q. G (a[p] -> b[q])")
    assert eval_hyper_finite(phi, [tr("{a}{a}"), tr("{b}{b}")])
    assert not eval_hyper_finite(phi, [tr("{a}")])


def test_combine_matches_expansion():
    phi = parse_formula("forall p. exists q. a[q]")
    vals = {(0, 0): False, (0, 1): True, (1, 0): False, (1, 1): True}
    assert combine(phi.quantifiers, 2, vals.__getitem__)
    phi = parse_formula("exists p. forall q. a[q]")
    assert not combine(phi.quantifiers, 2, vals.__getitem__)
    assert len(list(all_tuples(3, 2))) == 9


@given(st.integers(0, 10**9), st.integers(1, 3), st.integers(0, 8), st.data())
def test_backwards_equals_recursive(seed, n, length, data):
    qs = "A" * n
    phi = random_formula(seed, qs, ("a", "b", "c"), 5)
    traces = [data.draw(trace_st(("a", "b", "c"), length, length)) for _ in range(n)]
    r, b = _both(phi.body, traces, list(phi.vars))
    assert r == b
