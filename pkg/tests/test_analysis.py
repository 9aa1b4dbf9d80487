import random
from itertools import permutations

import pytest

from conftest import random_formula, tr, universe
from oracles import redundant_brute
from hypermon.analysis import (DominanceChecker, SpecProperties, UnsupportedShape, analyze,
                               check_reflexivity, check_symmetry, check_transitivity,
                               dominance_obligations, dominates, minimize_insert,
                               reduced_index_tuples, reduced_tuple_enumeration)
from hypermon.automata import accepts_tuple, template_for
from hypermon.engine import acceptance_array
from hypermon.families import (SPEC_TABLE, confman, eq, implication_ae, implication_ea,
                               obsdet1)
from hypermon.formula import parse_formula

T2, T3 = tr("{}{s}{}{}{}", "t2"), tr("{}{s}{s}{}{}", "t3")


def test_symmetry_examples():
    assert check_symmetry(obsdet1())
    assert not check_symmetry(confman())
    assert not check_symmetry(parse_formula("forall p. forall q. a[p]"))


def test_transitivity_examples():
    assert check_transitivity(eq())
    assert not check_transitivity(obsdet1())
    assert check_transitivity(parse_formula("forall p. forall q. true"))
    assert check_transitivity(parse_formula("forall p. forall q. forall r. true")) is None


def test_reflexivity_examples():
    assert check_reflexivity(eq())
    assert check_reflexivity(parse_formula("forall p. forall q. !a[p] | a[q]"))
    assert not check_reflexivity(parse_formula("forall p. forall q. a[p] & !a[q]"))


def test_report_format():
    text = analyze(eq()).report()
    lines = text.splitlines()
    assert lines[0].startswith("symmetric: yes")
    assert lines[1].startswith("transitive: yes")
    assert "ms" in lines[2]
    p = SpecProperties(True, None, True)
    assert "transitive: n/a" in p.report()


@pytest.mark.parametrize("name", [n for n in SPEC_TABLE if n != "ConfMan"])
def test_table_rows(name):
    factory, expected = SPEC_TABLE[name]
    assert analyze(factory()).row() == tuple(expected)


def test_obligations():
    assert dominance_obligations(implication_ae()) == [("p", True), ("q", False)]
    with pytest.raises(UnsupportedShape):
        dominance_obligations(parse_formula("forall p. exists q. forall r. a[p]"))


def test_dominance_examples():
    ae, ea = implication_ae(), implication_ea()
    assert dominates(tr("{a}{a}"), tr("{a}{}"), ae)
    assert dominates(tr("{b}{b}"), tr("{b}{}"), ae)
    assert dominates(tr("{a}{}"), tr("{a}{a}"), ea)
    assert dominates(tr("{b}{}"), tr("{b}{b}"), ea)
    assert dominates(T3, T2, confman())
    assert not dominates(T2, T3, confman())


def test_minimize_insert_examples():
    ch = DominanceChecker(confman())
    kept, ins, rem = minimize_insert([T3], T2, ch)
    assert (kept, ins, rem) == ([T3], False, 0)
    kept, ins, rem = minimize_insert([T2], T3, ch)
    assert (kept, ins, rem) == ([T3], True, 1)
    assert minimize_insert([], T2, ch) == ([T2], True, 0)


def test_reduced_index_counts():
    sr = SpecProperties(True, False, True)
    assert len(reduced_index_tuples(3, 2)) == 7
    assert len(reduced_index_tuples(3, 2, sr, True, True, True)) == 3
    assert reduced_index_tuples(3, 2, SpecProperties(True, True, True), True, True, True) == [(0, 3)]
    assert reduced_index_tuples(0, 2, SpecProperties(True, True, True), True, True, True) == []
    assert len(reduced_index_tuples(2, 3)) == 3 ** 3 - 2 ** 3
    tuples = reduced_tuple_enumeration([T2, T3], tr("{}"), sr, 2)
    assert len(tuples) == 2


def test_dominance_implies_redundancy():
    pool = universe(["a"], 2)
    rng = random.Random(21)
    for seed in range(6):
        phi = random_formula(rng.randrange(10**9), "AA", ("a",), 4)
        acc = acceptance_array(phi, pool)
        ch = DominanceChecker(phi)
        for i in range(len(pool)):
            for j in range(len(pool)):
                if i != j and ch.dominates(pool[i], pool[j]):
                    assert redundant_brute(acc, i, j, phi.quantifiers, len(pool))


def test_redundancy_without_inclusion():
    # {a} violates the body against itself, so every set holding it is already
    # violated; the inclusion still fails on the word {}{a}
    phi = parse_formula("forall p. forall q. G !(a[p] & a[q])")
    pool = universe(["a"], 2)
    t, t2 = pool.index(next(u for u in pool if u.steps == (frozenset("a"),))), \
        pool.index(next(u for u in pool if u.steps == (frozenset(), frozenset("a"))))
    acc = acceptance_array(phi, pool)
    assert redundant_brute(acc, t, t2, phi.quantifiers, len(pool))
    assert not DominanceChecker(phi).dominates(pool[t], pool[t2])


@pytest.mark.parametrize("qs", ["AE", "EA", "EE"])
def test_dominance_oracle_other_shapes(qs):
    pool = universe(["a"], 2)
    rng = random.Random(len(qs) * 7 + ord(qs[0]))
    mismatches = 0
    for _ in range(4):
        phi = random_formula(rng.randrange(10**9), qs, ("a",), 3)
        acc = acceptance_array(phi, pool)
        ch = DominanceChecker(phi)
        for i in range(len(pool)):
            for j in range(len(pool)):
                if i != j and ch.dominates(pool[i], pool[j]):
                    # the dominance criterion is sufficient for redundancy
                    mismatches += not redundant_brute(acc, i, j, phi.quantifiers, len(pool))
    assert mismatches == 0


def test_minimality_preserved():
    rng = random.Random(4)
    for f in range(3):
        phi = random_formula(rng.randrange(10**9), "AA", ("a", "b"), 4)
        ch = DominanceChecker(phi)
        stored = []
        for _ in range(40):
            t = tr("".join("{" + ",".join(x for x in "ab" if rng.random() < .5) + "}"
                           for _ in range(rng.randint(0, 4))))
            stored, _, _ = minimize_insert(stored, t, ch)
        for s in stored:
            for u in stored:
                if s is not u:
                    assert not ch.dominates(s, u)


def test_symmetry_soundness_on_table():
    rng = random.Random(9)
    for name, (factory, _) in SPEC_TABLE.items():
        phi = factory()
        if not check_symmetry(phi):
            continue
        tpl = template_for(phi)
        aps = phi.aps
        for _ in range(100):
            ts = [tr("".join("{" + ",".join(a for a in aps if rng.random() < .5) + "}"
                             for _ in range(4))) for _ in range(phi.arity)]
            base = accepts_tuple(tpl, ts)
            perm = rng.choice(list(permutations(range(phi.arity))))
            assert accepts_tuple(tpl, [ts[k] for k in perm]) == base


def test_reflexivity_and_transitivity_soundness():
    rng = random.Random(10)
    tpl = template_for(eq())

    def rt():
        return tr("".join("{a}" if rng.random() < .5 else "{}" for _ in range(3)))

    for _ in range(200):
        t1, t2, t3 = rt(), rt(), rt()
        assert accepts_tuple(tpl, [t1, t1])
        if accepts_tuple(tpl, [t1, t2]) and accepts_tuple(tpl, [t2, t3]):
            assert accepts_tuple(tpl, [t1, t3])
