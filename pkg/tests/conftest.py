import random
import sys
from itertools import product

import pytest
from hypothesis import settings, strategies as st

from hypermon.formula import make_formula
from hypermon.generators import random_body
from hypermon.trace import Trace

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


def steps_of(text: str) -> tuple[frozenset, ...]:
    """``"{a}{}{a,b}"`` style shorthand for tests."""
    out = []
    for chunk in text.replace("}", "}|").split("|"):
        chunk = chunk.strip()
        if chunk:
            inner = chunk.strip("{}")
            out.append(frozenset(x.strip() for x in inner.split(",") if x.strip()))
    return tuple(out)


def tr(text: str, id: str = "t") -> Trace:
    return Trace(id, steps_of(text))


def universe(aps, max_len):
    """Every trace over ``aps`` up to ``max_len`` steps, ε included."""
    letters = [frozenset(c for c, b in zip(aps, bits) if b)
               for bits in product([False, True], repeat=len(aps))]
    out = []
    for n in range(max_len + 1):
        for word in product(letters, repeat=n):
            out.append(Trace(f"u{len(out)}", tuple(word)))
    return out


def step_st(aps=("a", "b")):
    return st.frozensets(st.sampled_from(aps))


def trace_st(aps=("a", "b"), max_len=6, min_len=0, id="t"):
    return st.lists(step_st(aps), min_size=min_len, max_size=max_len).map(
        lambda s: Trace(id, tuple(s)))


def random_formula(seed, quantifiers="AA", aps=("a",), depth=4, core_only=False):
    rng = random.Random(seed)
    vars_ = [f"p{k}" for k in range(len(quantifiers))]
    body = random_body(rng, vars_, aps, depth, core_only)
    return make_formula(quantifiers, vars_, body, tuple(aps))


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(k))
