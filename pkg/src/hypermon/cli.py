"""Command-line interface: ``hypermon monitor|analyze|monitorability|gen|bench``."""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from typing import Sequence, TextIO

from .analysis import UnsupportedShape, analyze
from .automata import StateExplosion, template_for
from .engine import (RUNNING, MonitorOptions, ParallelOnlineMonitor, SequentialMonitor,
                     SessionStats, Verdict, run_offline_quantified, run_offline_universal,
                     run_parallel_offline)
from .families import bounded_obsdet
from .formula import FormulaError, QuantifiedFormula, format_formula, parse_formula
from .generators import GeneratorSpec, generate
from .monitorability import classify_model_support
from .trace import (ProtocolError, Trace, format_trace, parallel_rows_to_traces,
                    read_parallel_stream, read_sequential_stream, read_trace_file,
                    traces_to_parallel, traces_to_stream, write_trace_file)
from .trie import TrieParallelMonitor, TrieSequentialMonitor

EXIT_OK, EXIT_VIOLATION, EXIT_ERROR = 0, 1, 2


@dataclass
class RunConfig:
    formula: str
    traces: str = "-"
    model: str = "sequential"
    mode: str = "online"
    bound: int | None = None
    spec_analysis: bool = False
    trace_analysis: bool = False
    trie: bool = False
    stats: str | None = None
    seed: int = 0
    jobs: int = 1
    dump_template: bool = False
    keep_going: bool = False
    timing: bool = True

    def __post_init__(self):
        if self.trie and self.trace_analysis:
            raise ValueError("--trie cannot be combined with --trace-analysis")
        if self.bound is not None and self.bound < 1:
            raise ValueError("--bound must be at least 1")
        if self.model not in ("parallel", "sequential"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.mode not in ("online", "offline"):
            raise ValueError(f"unknown mode {self.mode!r}")


def load_formula(arg: str) -> QuantifiedFormula:
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            return parse_formula(fh.read())
    return parse_formula(arg)


def _read_text(path: str) -> list[str]:
    if path == "-":
        return sys.stdin.read().splitlines()
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def _detect(lines: Sequence[str]) -> str:
    for line in lines:
        s = line.strip()
        if s.startswith("#trace"):
            return "stream"
        if s.startswith("#step"):
            return "parallel"
    return "file"


def _print_verdict(v: Verdict, out: TextIO):
    print(f"verdict: {v.kind}", file=out)
    if v.bound_exceeded:
        print("note: BoundExceeded (traces after the bound were ignored)", file=out)
    if v.violated and v.witness:
        print("witness: " + " ".join(t.id for t in v.witness), file=out)
        for t in v.witness:
            print(f"  {t.id}: {format_trace(t) or 'eps'}", file=out)


def _write_stats(path: str | None, rows: Sequence[str]):
    if path is None:
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SessionStats.header() + "\n")
        for r in rows:
            fh.write(r + "\n")


def _no_timing(rows: Sequence[str]) -> list[str]:
    return [",".join(r.split(",")[:-1] + ["0"]) for r in rows]


def cmd_monitor(cfg: RunConfig, out: TextIO = sys.stdout) -> int:
    phi = load_formula(cfg.formula)
    tpl = template_for(phi)
    if cfg.dump_template:
        print(tpl.dump(), file=out)
    lines = _read_text(cfg.traces)
    fmt = _detect(lines)
    opts = MonitorOptions(spec_analysis=cfg.spec_analysis, trace_analysis=cfg.trace_analysis,
                          trie=cfg.trie, bound=cfg.bound,
                          stop_on_violation=not cfg.keep_going)
    rows: list[str] = []

    if cfg.model == "sequential" and cfg.mode == "online":
        mon = TrieSequentialMonitor(phi, opts, tpl) if cfg.trie else SequentialMonitor(phi, opts, tpl)
        if fmt == "stream":
            events = read_sequential_stream(lines)
            for ev in events:
                if ev.kind == "begin":
                    mon.begin(ev.trace_id)
                elif ev.kind == "step":
                    mon.step(ev.step)
                else:
                    mon.end()
        else:
            traces = _load_traces(lines, fmt)
            for t in traces:
                mon.process(t)
        v = mon.finish()
        rows = mon.rows
    else:
        traces = _load_traces(lines, fmt)
        if cfg.model == "parallel" and cfg.mode == "online":
            k = len(traces)
            if cfg.trie:
                mon = TrieParallelMonitor(phi, k, tpl, [t.id for t in traces], opts)
            else:
                mon = ParallelOnlineMonitor(phi, k, tpl, [t.id for t in traces])
            m = max((len(t) for t in traces), default=0)
            for i in range(m):
                mon.feed([t.steps[i] if i < len(t) else None for t in traces])
                rows.append(mon.stats.row())
                if mon.verdict.kind != RUNNING:
                    break
            mon.steps = [list(t.steps) for t in traces]
            v = mon.finish()
        elif cfg.model == "parallel":
            v = run_parallel_offline(phi, traces)
        elif phi.universal:
            v = run_offline_universal(phi, traces, tpl, jobs=cfg.jobs)
        else:
            v = run_offline_quantified(phi, traces, tpl)
    _print_verdict(v, out)
    _write_stats(cfg.stats, rows if cfg.timing else _no_timing(rows))
    return EXIT_VIOLATION if v.violated else EXIT_OK


def _load_traces(lines: Sequence[str], fmt: str) -> list[Trace]:
    if fmt == "parallel":
        return parallel_rows_to_traces(read_parallel_stream(lines))
    if fmt == "stream":
        from .trace import traces_from_events
        return traces_from_events(read_sequential_stream(lines))
    return read_trace_file(lines)


def cmd_analyze(formula: str, out: TextIO = sys.stdout) -> int:
    phi = load_formula(formula)
    if not phi.universal:
        raise UnsupportedShape("specification analysis needs a universal formula")
    print(analyze(phi).report(), file=out)
    return EXIT_OK


def cmd_monitorability(formula: str, model: str, bound: int | None, out: TextIO = sys.stdout) -> int:
    phi = load_formula(formula)
    print(classify_model_support(phi, model, bound).describe(), file=out)
    return EXIT_OK


def cmd_gen(spec: GeneratorSpec, out_path: str | None, fmt: str, formula_out: str | None,
            out: TextIO = sys.stdout) -> int:
    traces = generate(spec)
    if fmt == "stream":
        text = traces_to_stream(traces)
    elif fmt == "parallel":
        text = traces_to_parallel(traces)
    else:
        text = write_trace_file(traces)
    if out_path and out_path != "-":
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    if spec.kind == "bounded_obsdet" and formula_out:
        phi = bounded_obsdet(spec.n, spec.c, spec.i_width, spec.o_width)
        with open(formula_out, "w", encoding="utf-8") as fh:
            fh.write(format_formula(phi, declare_aps=True) + "\n")
    return EXIT_OK


def cmd_bench(ns: Sequence[int], c: int, count: int, length: int, seed: int, noise: float,
              stats: str | None, timing: bool, out: TextIO = sys.stdout) -> int:
    """Storage experiment on the bounded observational-determinism family."""
    from .generators import bounded_obsdet_traces

    traces = bounded_obsdet_traces(count, length, c, seed, noise)
    all_rows = []
    print("n,seen,stored,pruned,violated,pruned_fraction", file=out)
    for n in ns:
        phi = bounded_obsdet(n, c)
        mon = SequentialMonitor(phi, MonitorOptions(trace_analysis=True, stop_on_violation=False))
        for t in traces:
            mon.process(t)
        mon.finish()
        st = mon.stats
        rows = mon.rows if timing else _no_timing(mon.rows)
        all_rows.extend(f"{n},{r}" for r in rows)
        print(f"{n},{st.traces_seen},{st.traces_stored},{st.traces_pruned},"
              f"{st.violations_found},{st.traces_pruned / max(st.traces_seen, 1):.3f}", file=out)
    if stats:
        with open(stats, "w", encoding="utf-8") as fh:
            fh.write("n," + SessionStats.header() + "\n")
            fh.writelines(r + "\n" for r in all_rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hypermon", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("monitor", help="monitor traces against a formula")
    m.add_argument("formula", help="formula file or formula text")
    m.add_argument("traces", nargs="?", default="-", help="trace file or stream; - for stdin")
    m.add_argument("--model", choices=["parallel", "sequential"], default="sequential")
    m.add_argument("--mode", choices=["online", "offline"], default="online")
    m.add_argument("--bound", type=int)
    m.add_argument("--spec-analysis", action="store_true")
    m.add_argument("--trace-analysis", action="store_true")
    m.add_argument("--trie", action="store_true")
    m.add_argument("--stats", help="write per-trace statistics as CSV")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--jobs", type=int, default=1)
    m.add_argument("--dump-template", action="store_true")
    m.add_argument("--keep-going", action="store_true",
                   help="continue after a violation, discarding the violating trace")
    m.add_argument("--no-timing", action="store_true", help="write 0 for runtime_ms")

    a = sub.add_parser("analyze", help="symmetry, transitivity and reflexivity")
    a.add_argument("formula")

    mo = sub.add_parser("monitorability", help="decide monitorability")
    mo.add_argument("formula")
    mo.add_argument("--model", choices=["unbounded", "bounded", "parallel"], default="unbounded")
    mo.add_argument("--bound", type=int)

    g = sub.add_parser("gen", help="generate traces")
    g.add_argument("--kind", choices=["random", "perturbed", "bounded_obsdet"], default="random")
    g.add_argument("--count", type=int, default=10)
    g.add_argument("--length", type=int, default=10)
    g.add_argument("--aps", default="a", help="comma separated propositions")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--flip-prob", type=float, default=0.01)
    g.add_argument("--density", type=float, default=0.5)
    g.add_argument("--n", type=int, default=6)
    g.add_argument("--c", type=int, default=3)
    g.add_argument("--noise", type=float, default=0.002)
    g.add_argument("--format", choices=["file", "stream", "parallel"], default="file")
    g.add_argument("--out", default="-")
    g.add_argument("--formula-out")

    b = sub.add_parser("bench", help="storage experiment on bounded observational determinism")
    b.add_argument("--n", type=int, nargs="+", default=[6, 8, 10])
    b.add_argument("--c", type=int, default=3)
    b.add_argument("--count", type=int, default=1000)
    b.add_argument("--length", type=int, default=50)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--noise", type=float, default=0.002)
    b.add_argument("--stats")
    b.add_argument("--no-timing", action="store_true")
    return p


def main(argv: Sequence[str] | None = None, out: TextIO = sys.stdout) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "monitor":
            cfg = RunConfig(args.formula, args.traces, args.model, args.mode, args.bound,
                            args.spec_analysis, args.trace_analysis, args.trie, args.stats,
                            args.seed, args.jobs, args.dump_template, args.keep_going,
                            not args.no_timing)
            return cmd_monitor(cfg, out)
        if args.command == "analyze":
            return cmd_analyze(args.formula, out)
        if args.command == "monitorability":
            return cmd_monitorability(args.formula, args.model, args.bound, out)
        if args.command == "gen":
            aps = tuple(a.strip() for a in args.aps.split(",") if a.strip())
            spec = GeneratorSpec(args.kind, args.count, args.length, aps, args.seed,
                                 args.flip_prob, args.density, args.n, args.c, noise=args.noise)
            return cmd_gen(spec, args.out, args.format, args.formula_out, out)
        if args.command == "bench":
            return cmd_bench(args.n, args.c, args.count, args.length, args.seed, args.noise,
                             args.stats, not args.no_timing, out)
    except (FormulaError, ProtocolError, UnsupportedShape, StateExplosion, ValueError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
