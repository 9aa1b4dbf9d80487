import random

import pytest
from hypothesis import given, strategies as st

from conftest import random_formula
from oracles import lasso_value
from hypermon.formula import Not, desugar, parse_expr
from hypermon.ltl import (BOTTOM, TOP, UNKNOWN, LassoWitness, build_fsm_monitor, build_gba,
                          eval_on_lasso, is_satisfiable, is_valid)

A = frozenset({("a", "p")})
E = frozenset()


def test_gba_examples():
    assert build_gba(parse_expr("false")).is_empty()
    assert not build_gba(parse_expr("G a[p]")).is_empty()


def test_sat_examples():
    assert is_satisfiable(parse_expr("G a[p] & F !a[p]")) is None
    w = is_satisfiable(parse_expr("F a[p]"))
    assert w is not None and eval_on_lasso(parse_expr("F a[p]"), w)
    trans = parse_expr("!(((G (a[p] <-> a[q])) & (G (a[q] <-> a[r]))) -> G (a[p] <-> a[r]))")
    assert is_satisfiable(trans) is None
    assert is_valid(parse_expr("a[p] | !a[p]"))
    assert not is_valid(parse_expr("F a[p]"))


def test_eval_on_lasso_examples():
    assert eval_on_lasso(parse_expr("F a[p]"), LassoWitness((), (A,)))
    assert eval_on_lasso(parse_expr("G a[p]"), LassoWitness((A,), (A,)))
    assert not eval_on_lasso(parse_expr("G F a[p]"), LassoWitness((), (E,)))
    with pytest.raises(ValueError):
        LassoWitness((A,), ())


def test_witness_projection():
    w = LassoWitness((frozenset({("a", "p"), ("b", "q")}),), (frozenset({("b", "q")}),))
    assert w.project("q") == ((frozenset("b"),), (frozenset("b"),))


def test_fsm_examples():
    f = build_fsm_monitor(parse_expr("a[p]"))
    assert f.verdicts[f.run([A])] == TOP
    assert f.verdicts[f.run([E])] == BOTTOM
    g = build_fsm_monitor(parse_expr("G a[p]"))
    bad = {q for q, v in enumerate(g.verdicts) if v == BOTTOM}
    assert g.reachable(g.initial) <= g.can_reach(bad)
    h = build_fsm_monitor(parse_expr("G F a[p]"))
    assert {h.verdicts[q] for q in h.reachable(h.initial)} == {UNKNOWN}


def _bodies(n, depth=4, seed=0):
    rng = random.Random(seed)
    for k in range(n):
        yield random_formula(rng.randrange(10**9), "AA", ("a",), depth).body


def test_witnesses_check_out():
    for body in _bodies(300, 5, 1):
        w = is_satisfiable(body)
        if w is not None:
            assert eval_on_lasso(body, w)
            assert lasso_value(body, w.prefix, w.loop)


def test_body_or_negation_sat():
    for body in _bodies(500, 5, 2):
        if is_satisfiable(body) is None:
            assert is_satisfiable(desugar(Not(body))) is not None


@given(st.integers(0, 10**9), st.lists(st.integers(0, 3), max_size=3),
       st.lists(st.integers(0, 3), min_size=1, max_size=3))
def test_eval_on_lasso_matches_unrolling(seed, pre, loop):
    body = random_formula(seed, "AA", ("a",), 5).body
    letters = [frozenset(x for k, x in enumerate([("a", "p0"), ("a", "p1")]) if (c >> k) & 1)
               for c in range(4)]
    p, l = tuple(letters[c] for c in pre), tuple(letters[c] for c in loop)
    assert eval_on_lasso(body, LassoWitness(p, l)) == lasso_value(body, p, l)


def test_fsm_verdict_soundness():
    rng = random.Random(5)
    for body in _bodies(40, 4, 3):
        fsm = build_fsm_monitor(body)
        letters = [frozenset(a for k, a in enumerate(fsm.atoms) if (c >> k) & 1)
                   for c in range(1 << len(fsm.atoms))]
        for _ in range(20):
            w = [rng.choice(letters) for _ in range(rng.randint(0, 4))]
            v = fsm.verdicts[fsm.run(w)]
            if v == UNKNOWN:
                continue
            for _ in range(100):
                u = [rng.choice(letters) for _ in range(rng.randint(0, 3))]
                loop = [rng.choice(letters) for _ in range(rng.randint(1, 3))]
                assert lasso_value(body, tuple(w + u), tuple(loop)) == (v == TOP)
