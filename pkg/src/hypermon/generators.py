"""Deterministic trace and formula generators for experiments and tests."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .formula import (FALSE, TRUE, And, Atom, Expr, Finally, Globally, Iff, Implies, Next,
                      Not, Or, Until, WeakUntil)
from .trace import Trace


@dataclass
class GeneratorSpec:
    kind: str = "random"  # random, perturbed, bounded_obsdet
    count: int = 10
    length: int = 10
    aps: tuple[str, ...] = ("a",)
    seed: int = 0
    flip_prob: float = 0.01
    density: float = 0.5
    n: int = 6
    c: int = 3
    i_width: int = 1
    o_width: int = 1
    noise: float = 0.002
    base: Trace | None = field(default=None, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.flip_prob <= 1.0:
            raise ValueError("flip probability must lie in [0, 1]")
        if self.kind not in ("random", "perturbed", "bounded_obsdet"):
            raise ValueError(f"unknown generator {self.kind!r}")


def random_trace(rng: random.Random, length: int, aps: Sequence[str], density: float = 0.5,
                 id: str = "t") -> Trace:
    return Trace(id, tuple(frozenset(a for a in aps if rng.random() < density)
                           for _ in range(length)))


def random_traces(count: int, length: int, aps: Sequence[str], seed: int = 0,
                  density: float = 0.5) -> list[Trace]:
    rng = random.Random(seed)
    return [random_trace(rng, length, aps, density, f"t{k}") for k in range(count)]


def perturbed_traces(count: int, length: int, aps: Sequence[str], flip_prob: float,
                     seed: int = 0, base: Trace | None = None) -> list[Trace]:
    """Copies of a base trace where every proposition bit flips independently."""
    rng = random.Random(seed)
    if base is None:
        base = random_trace(rng, length, aps)
    out = []
    for k in range(count):
        steps = []
        for step in base.steps:
            steps.append(frozenset(a for a in aps if (a in step) != (rng.random() < flip_prob)))
        out.append(Trace(f"t{k}", tuple(steps)))
    return out


def _bits(prefix: str, width: int) -> list[str]:
    return [f"{prefix}{k}" for k in range(width)] if width > 1 else [prefix]


def bounded_obsdet_traces(count: int, length: int, c: int, seed: int = 0, noise: float = 0.002,
                          i_width: int = 1, o_width: int = 1) -> list[Trace]:
    """A system whose output is its input delayed by ``c`` steps.

    Inputs are uniform random bits; each output bit is flipped with
    probability ``noise``, which is what produces violations.
    """
    rng = random.Random(seed)
    ins, outs = _bits("i", i_width), _bits("o", o_width)
    traces = []
    for k in range(count):
        inputs = [[rng.random() < 0.5 for _ in ins] for _ in range(length)]
        steps = []
        for t in range(length):
            src = inputs[t - c] if t >= c else [False] * len(ins)
            props = {a for a, b in zip(ins, inputs[t]) if b}
            for j, o in enumerate(outs):
                bit = src[j % len(src)] if src else False
                if rng.random() < noise:
                    bit = not bit
                if bit:
                    props.add(o)
            steps.append(frozenset(props))
        traces.append(Trace(f"t{k}", tuple(steps)))
    return traces


def generate(spec: GeneratorSpec) -> list[Trace]:
    if spec.kind == "random":
        return random_traces(spec.count, spec.length, spec.aps, spec.seed, spec.density)
    if spec.kind == "perturbed":
        return perturbed_traces(spec.count, spec.length, spec.aps, spec.flip_prob, spec.seed,
                                spec.base)
    return bounded_obsdet_traces(spec.count, spec.length, spec.c, spec.seed, spec.noise,
                                 spec.i_width, spec.o_width)


# ----------------------------------------------------------------- formulas

_UNARY = (Not, Next, Globally, Finally)
_BINARY = (And, Or, Implies, Iff, Until, WeakUntil)


def random_body(rng: random.Random, vars_: Sequence[str], aps: Sequence[str], depth: int,
                core_only: bool = False) -> Expr:
    """A random LTL body of depth at most ``depth``."""
    unary = (Not, Next) if core_only else _UNARY
    binary = (Or, Until) if core_only else _BINARY
    if depth <= 1 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.08:
            return TRUE
        if r < 0.12 and not core_only:
            return FALSE
        return Atom(rng.choice(list(aps)), rng.choice(list(vars_)))
    if rng.random() < 0.4:
        return rng.choice(unary)(random_body(rng, vars_, aps, depth - 1, core_only))
    cls = rng.choice(binary)
    return cls(random_body(rng, vars_, aps, depth - 1, core_only),
               random_body(rng, vars_, aps, depth - 1, core_only))
