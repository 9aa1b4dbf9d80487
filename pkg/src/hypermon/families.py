"""Formula families used throughout the experiments.

Vector equalities such as ``I_p = I_q`` are expanded bitwise over the
propositions ``i0, i1, ...`` and ``o0, o1, ...``.
"""
from __future__ import annotations

from itertools import combinations

from .formula import QuantifiedFormula, parse_formula


def _bits(prefix: str, width: int) -> list[str]:
    return [f"{prefix}{k}" for k in range(width)] if width > 1 else [prefix]


def vec_eq(prefix: str, width: int, p: str, q: str) -> str:
    parts = [f"({b}[{p}] <-> {b}[{q}])" for b in _bits(prefix, width)]
    return parts[0] if len(parts) == 1 else "(" + " & ".join(parts) + ")"


def _forall(*vars_: str) -> str:
    return "".join(f"forall {v}. " for v in vars_)


def eq(ap: str = "a") -> QuantifiedFormula:
    return parse_formula(f"{_forall('p', 'q')}G ({ap}[p] <-> {ap}[q])")


def obsdet1(i_width: int = 1, o_width: int = 1) -> QuantifiedFormula:
    return parse_formula(f"{_forall('p', 'q')}G {vec_eq('i', i_width, 'p', 'q')} -> "
                         f"G {vec_eq('o', o_width, 'p', 'q')}")


def obsdet2(i_width: int = 1, o_width: int = 1) -> QuantifiedFormula:
    return parse_formula(f"{_forall('p', 'q')}{vec_eq('i', i_width, 'p', 'q')} -> "
                         f"G {vec_eq('o', o_width, 'p', 'q')}")


def obsdet3(i_width: int = 1, o_width: int = 1) -> QuantifiedFormula:
    return parse_formula(f"{_forall('p', 'q')}{vec_eq('o', o_width, 'p', 'q')} W "
                         f"!{vec_eq('i', i_width, 'p', 'q')}")


def quant_noninf(c: int = 2, i_width: int = 1, o_width: int = 1) -> QuantifiedFormula:
    """No c+1 runs with equal inputs show pairwise different outputs."""
    vs = [f"p{k}" for k in range(c + 1)]
    same_in = [vec_eq("i", i_width, v, vs[0]) for v in vs]
    diff_out = [f"!{vec_eq('o', o_width, a, b)}" for a, b in combinations(vs, 2)]
    return parse_formula(f"{_forall(*vs)}!({' & '.join(same_in + diff_out)})")


CONFMAN_BODY = ("((!pc[p] & pc[q]) -> X G (s[p] -> X v[q])) & "
                "((pc[p] & pc[q]) -> X G (v[p] <-> v[q]))")


def confman() -> QuantifiedFormula:
    return parse_formula(f"{_forall('p', 'q')}{CONFMAN_BODY}")


def confman_alternating() -> QuantifiedFormula:
    return parse_formula("forall p. exists q. pc[q] & (!pc[p] -> X G (s[p] -> X v[q]))")


def bounded_obsdet(n: int, c: int, i_width: int = 1, o_width: int = 1) -> QuantifiedFormula:
    """Inputs agreeing for n steps force outputs agreeing for n + c steps."""
    return parse_formula(f"{_forall('p', 'q')}G[<{n}] {vec_eq('i', i_width, 'p', 'q')} -> "
                         f"G[<{n + c}] {vec_eq('o', o_width, 'p', 'q')}")


def implication_ae() -> QuantifiedFormula:
    return parse_formula("forall p. exists q. G (a[p] -> b[q])")


def implication_ea() -> QuantifiedFormula:
    return parse_formula("exists p. forall q. G (a[p] -> b[q])")


# name -> (formula, expected symmetric, transitive, reflexive) from the
# specification-analysis table, 1-bit vectors
SPEC_TABLE = {
    "ObsDet1": (obsdet1, (True, False, True)),
    "ObsDet2": (obsdet2, (True, False, True)),
    "ObsDet3": (obsdet3, (True, False, True)),
    "QuantNoninf": (quant_noninf, (True, False, True)),
    "EQ": (eq, (True, True, True)),
    "ConfMan": (confman, (False, False, False)),
}
