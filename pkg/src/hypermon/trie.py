"""Prefix-tree trace storage and trie-based monitoring.

Traces with a common prefix share one path; a monitor instantiation is
keyed by a tuple of trie nodes and forks only where the traces diverge.
"""
from __future__ import annotations

import time
from itertools import product
from typing import Iterable, Sequence

from .analysis import UnsupportedShape, analyze
from .automata import MonitorTemplate
from .bdd import FALSE
from .engine import (RUNNING, SATISFIED, VIOLATION, MonitorOptions, SessionStats, Verdict,
                     _tpl)
from .formula import QuantifiedFormula
from .trace import ProtocolError, Trace

ROOT = 0


class Trie:
    def __init__(self):
        self.parent: list[int] = [-1]
        self.label: list[frozenset[str]] = [frozenset()]
        self.depth: list[int] = [0]
        self.children: list[dict[tuple[str, ...], int]] = [{}]

    def __len__(self) -> int:
        """Number of nodes below the root."""
        return len(self.parent) - 1

    def add_value(self, node: int, step: Iterable[str]) -> int:
        step = frozenset(step)
        key = tuple(sorted(step))
        child = self.children[node].get(key)
        if child is None:
            child = len(self.parent)
            self.parent.append(node)
            self.label.append(step)
            self.depth.append(self.depth[node] + 1)
            self.children.append({})
            self.children[node][key] = child
        return child

    def insert(self, t: Trace) -> int:
        node = ROOT
        for s in t.steps:
            node = self.add_value(node, s)
        return node

    def rooted_sequence(self, node: int, id: str = "t") -> Trace:
        steps = []
        while node != ROOT:
            steps.append(self.label[node])
            node = self.parent[node]
        return Trace(id, tuple(reversed(steps)))

    def depth_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for d in self.depth[1:]:
            hist[d] = hist.get(d, 0) + 1
        return hist


def _require_universal(phi: QuantifiedFormula):
    if not phi.universal:
        raise UnsupportedShape(f"trie monitoring needs a universal formula, got {phi.shape}")


def _symmetric(phi: QuantifiedFormula, options: MonitorOptions) -> bool:
    if not options.spec_analysis or phi.arity < 2:
        return False
    props = options.properties or analyze(phi)
    return props.symmetric


# -------------------------------------------------------------- parallel


class TrieParallelMonitor:
    """Lockstep streams stored in one trie; instantiations are node tuples."""

    def __init__(self, phi: QuantifiedFormula, k: int, tpl: MonitorTemplate | None = None,
                 ids: Sequence[str] | None = None, options: MonitorOptions | None = None):
        _require_universal(phi)
        self.phi = phi
        self.options = options or MonitorOptions()
        self.tpl = _tpl(phi, tpl)
        self.k = k
        self.ids = list(ids) if ids is not None else [f"s{j}" for j in range(k)]
        self.trie = Trie()
        self.cur = [ROOT] * k
        self.ended = [False] * k
        self.steps: list[list[frozenset]] = [[] for _ in range(k)]
        self.symmetric = _symmetric(phi, self.options)
        n = phi.arity
        self.instances: dict[tuple[int, ...], tuple[tuple[int, ...], int]] = {}
        if k:
            self.instances[(ROOT,) * n] = ((ROOT,) * n, self.tpl.initial)
        self.verdict = Verdict(RUNNING)
        self.stats = SessionStats(traces_seen=k, traces_stored=k, instances_live=len(self.instances))
        self.position = 0

    def feed(self, row: Sequence[frozenset | None]) -> Verdict:
        if self.verdict.kind != RUNNING:
            return self.verdict
        if len(row) != self.k:
            raise ProtocolError(f"expected {self.k} fields, got {len(row)}")
        start = time.perf_counter()
        moves: dict[int, list[int]] = {}
        rep: dict[int, int] = {}
        for j, s in enumerate(row):
            if s is None:
                self.ended[j] = True
                continue
            if self.ended[j]:
                raise ProtocolError(f"stream {j} resumed after ending")
            self.steps[j].append(s)
            child = self.trie.add_value(self.cur[j], s)
            kids = moves.setdefault(self.cur[j], [])
            if child not in kids:
                kids.append(child)
            rep.setdefault(child, j)
            self.cur[j] = child

        tpl = self.tpl
        label = self.trie.label
        nxt: dict[tuple[int, ...], tuple[tuple[int, ...], int]] = {}
        for order, q in self.instances.values():
            options = [moves.get(node) for node in order]
            if any(o is None for o in options):
                continue  # some component's traces all ended: accepted
            for combo in product(*options):
                key = tuple(sorted(combo)) if self.symmetric else combo
                if key in nxt:
                    continue
                code = 0
                for slot, node in enumerate(combo):
                    code |= tpl.step_code(label[node], slot)
                self.stats.tuples_checked += 1
                r = tpl.step(q, code)
                if r == FALSE:
                    self.verdict = Verdict(VIOLATION, tuple(self._stream(rep[c]) for c in combo),
                                           position=self.position)
                    self.stats.violations_found = 1
                    self.instances = {}
                    self.stats.instances_live = 0
                    self.position += 1
                    return self.verdict
                nxt[key] = (combo, r)
        self.instances = nxt
        self.stats.instances_live = len(nxt)
        self.position += 1
        self.stats.runtime_ms += (time.perf_counter() - start) * 1000
        return self.verdict

    def _stream(self, j: int) -> Trace:
        return Trace(self.ids[j], tuple(self.steps[j]))

    def finish(self) -> Verdict:
        if self.verdict.kind == RUNNING:
            self.verdict = Verdict(SATISFIED)
        elif self.verdict.witness:
            ids = {t.id: j for j, t in enumerate(self._all())}
            self.verdict.witness = tuple(self._stream(ids[t.id]) for t in self.verdict.witness)
        return self.verdict

    def _all(self) -> list[Trace]:
        return [self._stream(j) for j in range(self.k)]


def run_trie_parallel(phi: QuantifiedFormula, streams: Sequence[Trace],
                      tpl: MonitorTemplate | None = None, options: MonitorOptions | None = None,
                      trace_live: list[int] | None = None):
    """Feed complete traces as lockstep streams; returns (verdict, stats, monitor).

    ``trace_live`` receives the number of live instantiations after every step.
    """
    streams = list(streams)
    mon = TrieParallelMonitor(phi, len(streams), tpl, [t.id for t in streams], options)
    m = max((len(t) for t in streams), default=0)
    for i in range(m):
        v = mon.feed([t.steps[i] if i < len(t) else None for t in streams])
        if trace_live is not None:
            trace_live.append(mon.stats.instances_live)
        if v.kind != RUNNING:
            break
    mon.steps = [list(t.steps) for t in streams]
    return mon.finish(), mon.stats, mon


# ------------------------------------------------------------ sequential

NEW = -1


class TrieSequentialMonitor:
    """Stored traces live in one trie; a new trace is checked against it by
    instantiations that contain the new trace's node at least once."""

    def __init__(self, phi: QuantifiedFormula, options: MonitorOptions | None = None,
                 tpl: MonitorTemplate | None = None):
        _require_universal(phi)
        self.phi = phi
        self.options = options or MonitorOptions(trie=True)
        if self.options.trace_analysis:
            raise ValueError("trie storage cannot be combined with trace analysis")
        self.tpl = _tpl(phi, tpl, self.options.state_cap)
        self.symmetric = _symmetric(phi, self.options)
        self.trie = Trie()
        self.stored_children: list[list[int]] = [[]]
        self.through: dict[int, int] = {}  # node -> index of a stored trace through it
        self.ends_at: set[int] = set()
        self.stored: list[Trace] = []
        self.stats = SessionStats()
        self.rows: list[str] = []
        self.verdict = Verdict(RUNNING)
        self.violations: list[tuple[Trace, ...]] = []
        self.bound_exceeded = False
        self._current: str | None = None
        self._steps: list[frozenset] = []
        self._node = ROOT
        self._instances: dict = {}
        self._hit: tuple[int, ...] | None = None
        self._hit_nodes: tuple[int, ...] | None = None
        self._skip = False
        self._t0 = 0.0

    @property
    def done(self) -> bool:
        return self.verdict.kind != RUNNING

    def _stored_kids(self, node: int) -> list[int]:
        while len(self.stored_children) < len(self.trie.parent):
            self.stored_children.append([])
        return self.stored_children[node]

    def begin(self, trace_id: str):
        if self._current is not None:
            raise ProtocolError(f"trace {self._current!r} still open")
        self._current = trace_id
        self._steps = []
        self._node = ROOT
        self._hit = None
        self._t0 = time.perf_counter()
        b = self.options.bound
        if b is not None and self.stats.traces_seen >= b:
            self.bound_exceeded = True
        self._skip = self.done or self.bound_exceeded
        if self._skip:
            return
        self.stats.traces_seen += 1
        n = self.phi.arity
        comps = [NEW, ROOT] if self.stored else [NEW]
        self._instances = {}
        for combo in product(comps, repeat=n):
            if NEW not in combo:
                continue
            key = tuple(sorted(combo)) if self.symmetric else combo
            if key not in self._instances:
                self._instances[key] = (combo, self.tpl.initial)
        self.stats.tuples_checked += len(self._instances)
        self.stats.instances_live = len(self._instances)

    def step(self, s: Iterable[str]):
        if self._current is None:
            raise ProtocolError("step outside of a trace")
        s = frozenset(s)
        self._steps.append(s)
        if self._skip:
            return
        self._node = self.trie.add_value(self._node, s)
        if self._hit is not None:
            return
        tpl, label = self.tpl, self.trie.label
        nxt: dict = {}
        for combo, q in self._instances.values():
            options = []
            for c in combo:
                options.append([NEW] if c == NEW else self._stored_kids(c))
            if any(not o for o in options):
                continue  # a stored component ended: accepted
            for child in product(*options):
                key = tuple(sorted(child)) if self.symmetric else child
                if key in nxt:
                    continue
                code = 0
                for slot, c in enumerate(child):
                    code |= tpl.step_code(s if c == NEW else label[c], slot)
                self.stats.tuples_checked += 1
                r = tpl.step(q, code)
                if r == FALSE:
                    self._hit = child
                    self._instances = {}
                    self.stats.instances_live = 0
                    return
                nxt[key] = (child, r)
        self._instances = nxt
        self.stats.instances_live = len(nxt)

    def end(self) -> Verdict:
        if self._current is None:
            raise ProtocolError("#end without an open trace")
        t = Trace(self._current, tuple(self._steps))
        self._current = None
        if self._skip:
            return self.verdict
        if self._hit is not None:
            witness = tuple(t if c == NEW else self.stored[self.through[c]] for c in self._hit)
            self.violations.append(witness)
            self.stats.violations_found += 1
            if self.options.stop_on_violation:
                self.verdict = Verdict(VIOLATION, witness)
        else:
            self._store(t)
        self._instances = {}
        self.stats.runtime_ms += (time.perf_counter() - self._t0) * 1000
        self.rows.append(self.stats.row())
        return self.verdict

    def _store(self, t: Trace):
        idx = len(self.stored)
        self.stored.append(t)
        node = ROOT
        for s in t.steps:
            child = self.trie.add_value(node, s)
            kids = self._stored_kids(node)
            if child not in kids:
                kids.append(child)
            self.through.setdefault(child, idx)
            node = child
        self.ends_at.add(node)
        self.stats.traces_stored = len(self.stored)

    def stored_node_count(self) -> int:
        return len(self.through)

    def finish(self) -> Verdict:
        if self._current is not None:
            raise ProtocolError(f"stream ended inside trace {self._current!r}")
        if self.verdict.kind == RUNNING:
            self.verdict = Verdict(VIOLATION, self.violations[0]) if self.violations \
                else Verdict(SATISFIED)
        self.verdict.bound_exceeded = self.bound_exceeded
        return self.verdict

    def process(self, t: Trace) -> Verdict:
        self.begin(t.id)
        for s in t.steps:
            self.step(s)
        return self.end()

    def consume(self, events) -> Verdict:
        for ev in events:
            if ev.kind == "begin":
                self.begin(ev.trace_id)
            elif ev.kind == "step":
                self.step(ev.step)
            else:
                self.end()
        return self.finish()


def run_trie_sequential(phi: QuantifiedFormula, traces: Iterable[Trace],
                        options: MonitorOptions | None = None,
                        tpl: MonitorTemplate | None = None):
    options = options or MonitorOptions(trie=True)
    mon = TrieSequentialMonitor(phi, options, tpl)
    for t in traces:
        mon.process(t)
        if mon.verdict.violated and options.stop_on_violation:
            break
    return mon.finish(), mon.stats, mon
