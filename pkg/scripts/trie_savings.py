"""Trie node count against total steps on perturbed corpora, for a range of
flip probabilities."""
import argparse

from hypermon.engine import run_parallel_online
from hypermon.families import obsdet1
from hypermon.generators import perturbed_traces
from hypermon.trie import Trie, run_trie_parallel


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, nargs="+", default=[0.0, 0.01, 0.05, 0.1, 0.2])
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--length", type=int, default=30)
    ap.add_argument("--runs", type=int, default=5)
    args = ap.parse_args()

    phi = obsdet1()
    print("p,run,nodes,steps,ratio,trie_tuples,naive_tuples,agree")
    for p in args.p:
        for run in range(args.runs):
            ts = perturbed_traces(args.count, args.length, ["i", "o"], p, seed=run)
            trie = Trie()
            for t in ts:
                trie.insert(t)
            steps = sum(len(t) for t in ts)
            vt, st_t, _ = run_trie_parallel(phi, ts)
            vn, st_n = run_parallel_online(phi, ts)
            print(f"{p},{run},{len(trie)},{steps},{len(trie) / steps:.3f},"
                  f"{st_t.tuples_checked},{st_n.tuples_checked},{vt.kind == vn.kind}")


if __name__ == "__main__":
    main()
