"""Symmetry / transitivity / reflexivity for the specification families."""
import argparse

from hypermon.analysis import analyze
from hypermon.families import SPEC_TABLE


def mark(v):
    return "n/a" if v is None else ("yes" if v else "no")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.parse_args()
    print(f"{'spec':<12} {'symm':>5} {'trans':>5} {'refl':>5}  {'expected':<14} {'ms':>7}")
    for name, (factory, expected) in SPEC_TABLE.items():
        p = analyze(factory())
        ms = sum(p.timings.values()) * 1000
        got = "/".join(mark(x) for x in (p.symmetric, p.transitive, p.reflexive))
        exp = "/".join(mark(x) for x in expected)
        flag = "" if tuple(bool(x) for x in p.row()) == tuple(expected) else "  <- differs"
        print(f"{name:<12} {mark(p.symmetric):>5} {mark(p.transitive):>5} {mark(p.reflexive):>5}"
              f"  {exp:<14} {ms:7.1f}{flag}")


if __name__ == "__main__":
    main()
