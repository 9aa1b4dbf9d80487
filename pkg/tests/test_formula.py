import random

import pytest
from hypothesis import given, strategies as st

from hypermon.formula import (FALSE, TRUE, And, Atom, BoundedGlobally, DuplicateVariable,
                              Finally, FormulaError, FormulaSyntaxError, Globally, Iff,
                              Implies, Next, Not, Or, Quantifier, UnboundVariable,
                              UnmappedVariable, Until, WeakUntil, atoms, depth, desugar,
                              format_formula, is_core, make_formula, parse_expr,
                              parse_formula, size, substitute_variables, to_text)
from hypermon.generators import random_body

a, b = Atom("a", "p"), Atom("b", "q")


def test_parse_basic_formula():
    f = parse_formula("forall p. forall q. G (a[p] <-> a[q])")
    assert f.vars == ("p", "q")
    assert f.quantifiers == (Quantifier.FORALL, Quantifier.FORALL)
    assert f.body == Globally(Iff(Atom("a", "p"), Atom("a", "q")))
    assert f.aps == ("a",)


@pytest.mark.parametrize("text,expected", [
    ("a[p] | b[q] & a[p]", Or(a, And(b, a))),
    ("a[p] -> b[q] -> a[p]", Implies(a, Implies(b, a))),
    ("a[p] U b[q] U a[p]", Until(a, Until(b, a))),
    ("!a[p] U b[q]", Until(Not(a), b)),
    ("a[p] <-> b[q] -> a[p]", Iff(a, Implies(b, a))),
    ("X a[p] W b[q]", WeakUntil(Next(a), b)),
    ("F G !a[p]", Finally(Globally(Not(a)))),
    ("G[<3] a[p]", BoundedGlobally(3, a)),
    ("true | false", Or(TRUE, FALSE)),
    ("(a[p] | b[q]) & a[p]", And(Or(a, b), a)),
])
def test_precedence(text, expected):
    assert parse_expr(text) == expected


def test_keyword_named_proposition():
    assert parse_expr("X[p]") == Atom("X", "p")
    assert parse_expr("G X[p]") == Globally(Atom("X", "p"))


def test_aps_pragma_orders_and_extends():
    f = parse_formula("#aps: z a\nforall p. a[p]")
    assert f.aps == ("z", "a")
    with pytest.raises(FormulaError):
        parse_formula("#aps: z\nforall p. a[p]")


def test_syntax_error_position():
    with pytest.raises(FormulaSyntaxError) as ei:
        parse_formula("forall p.\n  a[p] & ")
    assert ei.value.line == 2


def test_unbound_and_duplicate():
    with pytest.raises(UnboundVariable):
        parse_formula("forall p. a[q]")
    with pytest.raises(DuplicateVariable):
        parse_formula("forall p. exists p. a[p]")


def test_shapes():
    assert str(parse_formula("forall p. forall q. a[p]").shape) == "ForallOnly(2)"
    assert parse_formula("exists p. a[p]").shape.kind == "ExistsOnly"
    assert parse_formula("forall p. exists q. a[p]").shape.kind == "ForallExists"
    assert parse_formula("exists p. forall q. a[p]").shape.kind == "ExistsForall"
    f = parse_formula("forall p. exists q. forall r. a[p]")
    assert f.shape.kind == "Other" and f.shape.counts == (1, 1, 1)
    assert not f.alternation_free


def test_desugar_examples():
    assert desugar(Finally(a)) == Until(TRUE, a)
    assert desugar(Globally(a)) == Not(Until(TRUE, Not(a)))
    assert desugar(BoundedGlobally(2, a)) == And(a, Next(a)) or is_core(desugar(BoundedGlobally(2, a)))
    assert is_core(desugar(parse_expr("a[p] W b[q] <-> (a[p] -> b[q])")))


def test_size_depth_atoms():
    e = parse_expr("G (a[p] -> X b[q])")
    assert size(e) == 5
    assert depth(e) == 4
    assert [x.ap for x in atoms(e)] == ["a", "b"]


def test_substitution_unmapped():
    with pytest.raises(UnmappedVariable):
        substitute_variables(a, {"q": "r"})


def _bodies(seed, core=False):
    rng = random.Random(seed)
    return random_body(rng, ["p", "q", "r"], ["a", "b", "c"], 6, core)


@given(st.integers(0, 10**9))
def test_roundtrip_text(seed):
    e = _bodies(seed)
    assert parse_expr(to_text(e)) == e


def test_roundtrip_thousand_formulas():
    rng = random.Random(7)
    for k in range(1000):
        qs = "".join(rng.choice("AE") for _ in range(rng.randint(1, 3)))
        vars_ = [f"v{j}" for j in range(len(qs))]
        f = make_formula(qs, vars_, random_body(rng, vars_, ["a", "b", "c"], 6), ("a", "b", "c"))
        assert parse_formula(format_formula(f, declare_aps=True)) == f


@given(st.integers(0, 10**9))
def test_desugar_idempotent_and_core(seed):
    e = desugar(_bodies(seed))
    assert is_core(e)
    assert desugar(e) == e


@given(st.integers(0, 10**9))
def test_substitution_inverse(seed):
    e = _bodies(seed)
    m = {"p": "x", "q": "y", "r": "z"}
    inv = {v: k for k, v in m.items()}
    assert substitute_variables(substitute_variables(e, m), inv) == e
