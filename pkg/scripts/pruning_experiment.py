"""Stored / pruned / violated traces on the bounded observational-determinism
family, one CSV row per incoming trace and guard length."""
import argparse
import csv
import sys

from hypermon.engine import MonitorOptions, SequentialMonitor
from hypermon.families import bounded_obsdet
from hypermon.generators import bounded_obsdet_traces


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[6, 8, 10])
    ap.add_argument("--c", type=int, default=3)
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--length", type=int, default=50)
    ap.add_argument("--noise", type=float, default=0.002)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="-", help="CSV path, - for stdout")
    args = ap.parse_args()

    traces = bounded_obsdet_traces(args.count, args.length, args.c, args.seed, args.noise)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["n", "seen", "stored", "pruned", "violated"])
    for n in args.n:
        mon = SequentialMonitor(bounded_obsdet(n, args.c),
                                MonitorOptions(trace_analysis=True, stop_on_violation=False))
        for t in traces:
            mon.process(t)
            st = mon.stats
            w.writerow([n, st.traces_seen, st.traces_stored, st.traces_pruned, st.violations_found])
        st = mon.stats
        print(f"n={n}: {st.traces_pruned / st.traces_seen:.1%} pruned, "
              f"{st.traces_stored} stored, {st.violations_found} violated", file=sys.stderr)
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
