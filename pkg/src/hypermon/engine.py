"""Monitoring algorithms for the parallel and the sequential input models."""
from __future__ import annotations

import time
from dataclasses import dataclass, field, fields
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .analysis import (DominanceChecker, SpecProperties, UnsupportedShape, analyze,
                       minimize_insert, reduced_index_tuples)
from .automata import DEFAULT_STATE_CAP, MonitorTemplate, template_for
from .bdd import FALSE, TRUE
from .formula import QuantifiedFormula, Quantifier
from .semantics import eval_backwards
from .trace import ProtocolError, StreamEvent, Trace, zip_tuple

SATISFIED, VIOLATION, RUNNING = "Satisfied", "Violation", "Running"


@dataclass
class Verdict:
    kind: str
    witness: tuple[Trace, ...] | None = None
    bound_exceeded: bool = False
    position: int | None = None

    @property
    def satisfied(self) -> bool:
        return self.kind == SATISFIED

    @property
    def violated(self) -> bool:
        return self.kind == VIOLATION

    def describe(self) -> str:
        if self.kind != VIOLATION:
            return self.kind
        ids = ", ".join(t.id for t in self.witness or ())
        return f"Violation ({ids})"


@dataclass
class SessionStats:
    traces_seen: int = 0
    traces_stored: int = 0
    traces_pruned: int = 0
    violations_found: int = 0
    tuples_checked: int = 0
    instances_live: int = 0
    runtime_ms: float = 0.0

    @classmethod
    def header(cls) -> str:
        return ",".join(f.name for f in fields(cls))

    def row(self, timing: bool = True) -> str:
        vals = [getattr(self, f.name) for f in fields(self)]
        vals[-1] = f"{self.runtime_ms:.3f}" if timing else "0"
        return ",".join(str(v) for v in vals)

    def accounting_holds(self) -> bool:
        return self.traces_seen == self.traces_stored + self.traces_pruned + self.violations_found


@dataclass
class MonitorOptions:
    spec_analysis: bool = False
    trace_analysis: bool = False
    trie: bool = False
    bound: int | None = None
    stop_on_violation: bool = True
    state_cap: int = DEFAULT_STATE_CAP
    properties: SpecProperties | None = None

    def __post_init__(self):
        if self.trie and self.trace_analysis:
            raise ValueError("trie storage cannot be combined with trace analysis")
        if self.bound is not None and self.bound < 1:
            raise ValueError("bound must be at least 1")


# ------------------------------------------------------------ batch runs


class BatchRunner:
    """Vectorized stepping of many tuples through one template."""

    def __init__(self, tpl: MonitorTemplate, traces: Sequence[Trace]):
        self.tpl = tpl
        self.traces = list(traces)
        self.n = len(tpl.vars)
        self.width = len(tpl.aps)
        self.lengths = np.array([len(t) for t in traces], dtype=np.int64)
        maxlen = int(self.lengths.max()) if len(traces) else 0
        self.codes = np.zeros((len(traces), maxlen), dtype=np.int64)
        for r, t in enumerate(traces):
            for i, s in enumerate(t.steps):
                self.codes[r, i] = tpl.step_code(s, 0)
        self.maxlen = maxlen

    def letter_codes(self, tuples: np.ndarray, i: int) -> np.ndarray:
        out = np.zeros(len(tuples), dtype=np.int64)
        for j in range(self.n):
            out |= self.codes[tuples[:, j], i] << (j * self.width)
        return out

    def advance(self, states: np.ndarray, letters: np.ndarray) -> np.ndarray:
        tpl = self.tpl
        bits = tpl.n_atoms
        if bits <= 40 and len(states) > 64:
            keys = states * (1 << bits) + letters
            uniq, inv = np.unique(keys, return_inverse=True)
            nxt = np.array([tpl.step(int(k >> bits), int(k & ((1 << bits) - 1))) for k in uniq],
                           dtype=np.int64)
            return nxt[inv]
        return np.array([tpl.step(int(q), int(c)) for q, c in zip(states, letters)], dtype=np.int64)

    def run(self, tuples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Returns (accepted, death position or -1) per tuple."""
        m = self.lengths[tuples].min(axis=1) if len(tuples) else np.zeros(0, dtype=np.int64)
        states = np.full(len(tuples), self.tpl.initial, dtype=np.int64)
        alive = np.ones(len(tuples), dtype=bool)
        death = np.full(len(tuples), -1, dtype=np.int64)
        for i in range(self.maxlen):
            active = alive & (m > i) & (states != TRUE)
            if not active.any():
                break
            idx = np.nonzero(active)[0]
            nxt = self.advance(states[idx], self.letter_codes(tuples[idx], i))
            states[idx] = nxt
            dead = idx[nxt == FALSE]
            alive[dead] = False
            death[dead] = i
        return alive, death


def all_index_tuples(k: int, n: int) -> np.ndarray:
    if k == 0:
        return np.zeros((0, n), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(k)] * n, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)


def quantifier_reduce(values: np.ndarray, quantifiers: Sequence[Quantifier]) -> bool:
    """Combine an n-dimensional Boolean array innermost quantifier first."""
    v = values
    for q in reversed(quantifiers):
        v = v.all(axis=-1) if q is Quantifier.FORALL else v.any(axis=-1)
    return bool(v)


def quantifier_witness(values: np.ndarray, quantifiers: Sequence[Quantifier]) -> tuple[int, ...]:
    """For a false combination: a failing option at every universal level
    and the first option at every existential level."""
    idx: list[int] = []
    v = values
    for level, q in enumerate(quantifiers):
        rest = quantifiers[level + 1:]
        sub = [quantifier_reduce(v[j], rest) if rest else bool(v[j]) for j in range(v.shape[0])]
        if q is Quantifier.FORALL:
            j = sub.index(False)
        else:
            j = 0
        idx.append(j)
        v = v[j]
    return tuple(idx)


def _tpl(phi: QuantifiedFormula, tpl: MonitorTemplate | None, cap=DEFAULT_STATE_CAP):
    return tpl if tpl is not None else template_for(phi, cap)


def acceptance_array(phi: QuantifiedFormula, traces: Sequence[Trace],
                     tpl: MonitorTemplate | None = None) -> np.ndarray:
    """Template acceptance for every tuple, shaped ``(k,) * n``."""
    tpl = _tpl(phi, tpl)
    k, n = len(traces), phi.arity
    tuples = all_index_tuples(k, n)
    alive, _ = BatchRunner(tpl, traces).run(tuples)
    return alive.reshape((k,) * n) if k else alive.reshape((0,) * n)


def run_offline_quantified(phi: QuantifiedFormula, traces: Sequence[Trace],
                           tpl: MonitorTemplate | None = None) -> Verdict:
    """Quantifier expansion over ``traces`` with template acceptance as kernel."""
    traces = list(traces)
    if not traces:
        ok = phi.universal
        return Verdict(SATISFIED if ok else VIOLATION, None if ok else ())
    acc = acceptance_array(phi, traces, tpl)
    if quantifier_reduce(acc, phi.quantifiers):
        return Verdict(SATISFIED)
    w = quantifier_witness(acc, phi.quantifiers)
    return Verdict(VIOLATION, tuple(traces[j] for j in w))


def _universal_chunk(phi: QuantifiedFormula, traces: Sequence[Trace], lo: int, hi: int):
    tpl = template_for(phi)
    tuples = all_index_tuples(len(traces), phi.arity)[lo:hi]
    alive, death = BatchRunner(tpl, traces).run(tuples)
    bad = np.nonzero(~alive)[0]
    return (lo + int(bad[0]), int(death[bad[0]])) if len(bad) else None


def run_offline_universal(phi: QuantifiedFormula, traces: Sequence[Trace],
                          tpl: MonitorTemplate | None = None, jobs: int = 1) -> Verdict:
    """All tuples checked at once; with ``jobs > 1`` the tuple range is split
    across worker processes and the lexicographically first failure wins."""
    if not phi.universal:
        raise UnsupportedShape(f"expected a universal formula, got {phi.shape}")
    traces = list(traces)
    tuples = all_index_tuples(len(traces), phi.arity)
    if jobs > 1 and len(tuples) >= 2 * jobs:
        from concurrent.futures import ProcessPoolExecutor
        bounds = np.linspace(0, len(tuples), jobs + 1).astype(int)
        with ProcessPoolExecutor(jobs) as pool:
            futs = [pool.submit(_universal_chunk, phi, traces, int(lo), int(hi))
                    for lo, hi in zip(bounds[:-1], bounds[1:])]
            hits = [f.result() for f in futs]
        hits = [h for h in hits if h is not None]
        if not hits:
            return Verdict(SATISFIED)
        first, pos = min(hits)
        return Verdict(VIOLATION, tuple(traces[j] for j in tuples[first]), position=pos)
    tpl = _tpl(phi, tpl)
    alive, death = BatchRunner(tpl, traces).run(tuples)
    bad = np.nonzero(~alive)[0]
    if len(bad) == 0:
        return Verdict(SATISFIED)
    first = bad[0]
    return Verdict(VIOLATION, tuple(traces[j] for j in tuples[first]), position=int(death[first]))


def run_offline_alternating(phi: QuantifiedFormula, traces: Sequence[Trace],
                            tpl: MonitorTemplate | None = None) -> Verdict:
    if phi.shape.kind not in ("ForallExists", "ExistsForall"):
        raise UnsupportedShape(f"expected one quantifier alternation, got {phi.shape}")
    return run_offline_quantified(phi, traces, tpl)


def run_parallel_offline(phi: QuantifiedFormula, traces: Sequence[Trace]) -> Verdict:
    """Backwards evaluation of the body on every tuple's zip, combined per
    the quantifier prefix."""
    traces = list(traces)
    k, n = len(traces), phi.arity
    if k == 0:
        ok = phi.universal
        return Verdict(SATISFIED if ok else VIOLATION, None if ok else ())
    vals = np.zeros((k,) * n, dtype=bool)
    for tup in product(range(k), repeat=n):
        word = zip_tuple([traces[j] for j in tup], phi.vars)
        vals[tup] = eval_backwards(word, phi.body)
    if quantifier_reduce(vals, phi.quantifiers):
        return Verdict(SATISFIED)
    w = quantifier_witness(vals, phi.quantifiers)
    return Verdict(VIOLATION, tuple(traces[j] for j in w))


# ------------------------------------------------------- parallel online


class ParallelOnlineMonitor:
    """Lockstep monitoring of a fixed number of streams.

    Every assignment of streams to trace variables is tracked; a tuple
    whose stream ended stays alive from then on.
    """

    def __init__(self, phi: QuantifiedFormula, k: int, tpl: MonitorTemplate | None = None,
                 ids: Sequence[str] | None = None):
        self.phi = phi
        self.tpl = _tpl(phi, tpl)
        self.k = k
        self.ids = list(ids) if ids is not None else [f"s{j}" for j in range(k)]
        self.tuples = all_index_tuples(k, phi.arity)
        self.states = np.full(len(self.tuples), self.tpl.initial, dtype=np.int64)
        self.alive = np.ones(len(self.tuples), dtype=bool)
        self.frozen = np.zeros(len(self.tuples), dtype=bool)
        self.ended = np.zeros(k, dtype=bool)
        self.steps: list[list[frozenset]] = [[] for _ in range(k)]
        self.position = 0
        self.verdict = Verdict(RUNNING)
        self.stats = SessionStats(traces_seen=k, tuples_checked=len(self.tuples),
                                  instances_live=len(self.tuples))
        self._runner = BatchRunner(self.tpl, [])
        self._width = len(self.tpl.aps)

    def _traces(self) -> list[Trace]:
        return [Trace(self.ids[j], tuple(s)) for j, s in enumerate(self.steps)]

    def feed(self, row: Sequence[frozenset | None]) -> Verdict:
        if self.verdict.kind != RUNNING:
            return self.verdict
        if len(row) != self.k:
            raise ProtocolError(f"expected {self.k} fields, got {len(row)}")
        start = time.perf_counter()
        codes = np.zeros(self.k, dtype=np.int64)
        for j, s in enumerate(row):
            if s is None:
                self.ended[j] = True
            elif self.ended[j]:
                raise ProtocolError(f"stream {j} resumed after ending")
            else:
                self.steps[j].append(s)
                codes[j] = self.tpl.step_code(s, 0)
        self.frozen |= self.ended[self.tuples].any(axis=1)
        active = np.nonzero(self.alive & ~self.frozen)[0]
        if len(active):
            letters = np.zeros(len(active), dtype=np.int64)
            for j in range(self.phi.arity):
                letters |= codes[self.tuples[active, j]] << (j * self._width)
            nxt = self._runner.advance(self.states[active], letters)
            self.states[active] = nxt
            self.alive[active[nxt == FALSE]] = False
        self.stats.instances_live = int((self.alive & ~self.frozen).sum())
        self.position += 1
        self._check(final=False)
        self.stats.runtime_ms += (time.perf_counter() - start) * 1000
        return self.verdict

    def _check(self, final: bool):
        phi = self.phi
        if phi.universal:
            dead = np.nonzero(~self.alive)[0]
            if len(dead):
                w = self.tuples[dead[0]]
                self.verdict = Verdict(VIOLATION, tuple(self._traces()[j] for j in w),
                                       position=self.position - 1)
                self.stats.violations_found = 1
                return
            if final:
                self.verdict = Verdict(SATISFIED)
            return
        grid = self.alive.reshape((self.k,) * phi.arity)
        if not quantifier_reduce(grid, phi.quantifiers):
            w = quantifier_witness(grid, phi.quantifiers)
            self.verdict = Verdict(VIOLATION, tuple(self._traces()[j] for j in w),
                                   position=self.position - 1)
            self.stats.violations_found = 1
        elif final:
            self.verdict = Verdict(SATISFIED)

    def finish(self) -> Verdict:
        if self.verdict.kind == RUNNING:
            if self.k == 0:
                ok = self.phi.universal
                self.verdict = Verdict(SATISFIED if ok else VIOLATION, None if ok else ())
            else:
                self._check(final=True)
        if self.verdict.witness is not None and self.verdict.kind == VIOLATION:
            full = {t.id: t for t in self._traces()}
            self.verdict.witness = tuple(full[t.id] for t in self.verdict.witness)
        return self.verdict


def run_parallel_online(phi: QuantifiedFormula, streams: Sequence[Trace],
                        tpl: MonitorTemplate | None = None) -> tuple[Verdict, SessionStats]:
    """Feed complete traces as lockstep streams; the shorter ones end early."""
    streams = list(streams)
    mon = ParallelOnlineMonitor(phi, len(streams), tpl, [t.id for t in streams])
    m = max((len(t) for t in streams), default=0)
    for i in range(m):
        v = mon.feed([t.steps[i] if i < len(t) else None for t in streams])
        if v.kind != RUNNING:
            break
    # the remaining steps still belong to the witness traces
    mon.steps = [list(t.steps) for t in streams]
    return mon.finish(), mon.stats


# ----------------------------------------------------- sequential online


class _Tuple:
    __slots__ = ("stored", "new_slots", "limit", "state", "index")

    def __init__(self, stored, new_slots, limit, state, index):
        self.stored = stored
        self.new_slots = new_slots
        self.limit = limit
        self.state = state
        self.index = index


class SequentialMonitor:
    """Traces arrive one after another; each is checked against the stored
    set as its steps come in."""

    def __init__(self, phi: QuantifiedFormula, options: MonitorOptions | None = None,
                 tpl: MonitorTemplate | None = None):
        self.phi = phi
        self.options = options or MonitorOptions()
        opts = self.options
        if opts.trie:
            raise ValueError("use the trie monitor for trie storage")
        if not phi.universal and opts.bound is None:
            raise UnsupportedShape("only universal formulas are monitored in the unbounded "
                                   "sequential model")
        self.tpl = _tpl(phi, tpl, opts.state_cap)
        self.props = opts.properties
        if opts.spec_analysis and self.props is None and phi.universal and phi.arity >= 2:
            self.props = analyze(phi)
        self.checker = None
        if opts.trace_analysis:
            self.checker = DominanceChecker(phi, self.tpl)
        self.stored: list[Trace] = []
        self.buffered: list[Trace] = []
        self.stats = SessionStats()
        self.rows: list[str] = []
        self.verdict = Verdict(RUNNING)
        self.violations: list[tuple[Trace, ...]] = []
        self.bound_exceeded = False
        self._current: str | None = None
        self._steps: list[frozenset] = []
        self._tuples: list[_Tuple] = []
        self._hit: _Tuple | None = None
        self._t0 = 0.0

    @property
    def done(self) -> bool:
        return self.verdict.kind != RUNNING

    # ---- stream interface

    def begin(self, trace_id: str):
        if self._current is not None:
            raise ProtocolError(f"trace {self._current!r} still open")
        self._current = trace_id
        self._steps = []
        self._hit = None
        self._t0 = time.perf_counter()
        b = self.options.bound
        if b is not None and self.stats.traces_seen >= b:
            self.bound_exceeded = True
            return
        if self.done:
            return
        self.stats.traces_seen += 1
        if self.phi.universal:
            self._open_tuples()

    def step(self, s: Iterable[str]):
        if self._current is None:
            raise ProtocolError("step outside of a trace")
        s = frozenset(s)
        i = len(self._steps)
        self._steps.append(s)
        if self.done or self.bound_exceeded or self._hit is not None or not self.phi.universal:
            return
        tpl = self.tpl
        new_codes = {}
        live = 0
        for tup in self._tuples:
            if i >= tup.limit:
                continue
            code = 0
            for slot, codes in tup.stored:
                code |= codes[i]
            for slot in tup.new_slots:
                c = new_codes.get(slot)
                if c is None:
                    c = new_codes[slot] = tpl.step_code(s, slot)
                code |= c
            tup.state = tpl.step(tup.state, code)
            if tup.state == FALSE:
                self._hit = tup
                break
            if tup.state != TRUE:
                live += 1
        if self._hit is None:
            # a tuple in the all-accepting state can never fail again
            self._tuples = [tup for tup in self._tuples if tup.state != TRUE]
        self.stats.instances_live = live

    def end(self) -> Verdict:
        if self._current is None:
            raise ProtocolError("#end without an open trace")
        t = Trace(self._current, tuple(self._steps))
        self._current = None
        if self.done or self.bound_exceeded:
            return self.verdict
        if not self.phi.universal:
            self.buffered.append(t)
            self.stats.traces_stored += 1
            self._record()
            b = self.options.bound
            if b is not None and len(self.buffered) >= b:
                self._decide_buffered()
            return self.verdict
        if self._hit is not None:
            pool = self.stored + [t]
            witness = tuple(pool[j] for j in self._hit.index)
            self.violations.append(witness)
            self.stats.violations_found += 1
            if self.options.stop_on_violation:
                self.verdict = Verdict(VIOLATION, witness)
        else:
            self._store(t)
        self._tuples = []
        self._record()
        return self.verdict

    def _record(self):
        self.stats.runtime_ms += (time.perf_counter() - self._t0) * 1000
        self.rows.append(self.stats.row())

    def _open_tuples(self):
        opts = self.options
        k, n = len(self.stored), self.phi.arity
        use = opts.spec_analysis
        idx = reduced_index_tuples(k, n, self.props, use, use, use)
        tpl = self.tpl
        tuples = []
        for tup in idx:
            stored = []
            new_slots = []
            limit = float("inf")
            for slot, j in enumerate(tup):
                if j == k:
                    new_slots.append(slot)
                else:
                    t = self.stored[j]
                    stored.append((slot, _codes(tpl, t, slot)))
                    limit = min(limit, len(t))
            tuples.append(_Tuple(stored, new_slots, limit, tpl.initial, tup))
        self._tuples = tuples
        self.stats.tuples_checked += len(tuples)
        self.stats.instances_live = len(tuples)

    def _store(self, t: Trace):
        opts = self.options
        transitive = (opts.spec_analysis and self.props is not None and self.phi.arity == 2
                      and bool(self.props.transitive) and self.props.symmetric
                      and self.props.reflexive)
        if transitive and self.stored:
            # the reference is the longest accepted trace, so every stored
            # trace was compared with it over the stored trace's full length
            if len(t) > len(self.stored[0]):
                self.stored[0] = t
            self.stats.traces_pruned += 1
            return
        if self.checker is not None:
            kept, inserted, removed = minimize_insert(self.stored, t, self.checker)
            for s in self.stored:
                if s not in kept:
                    self.checker.forget(s)
            self.stored = kept
            self.stats.traces_pruned += removed + (0 if inserted else 1)
        else:
            self.stored.append(t)
        self.stats.traces_stored = len(self.stored)

    def _decide_buffered(self):
        self.verdict = run_offline_quantified(self.phi, self.buffered, self.tpl)

    def finish(self) -> Verdict:
        if self._current is not None:
            raise ProtocolError(f"stream ended inside trace {self._current!r}")
        if self.verdict.kind == RUNNING:
            if not self.phi.universal:
                self._decide_buffered()
            elif self.violations:
                self.verdict = Verdict(VIOLATION, self.violations[0])
            else:
                self.verdict = Verdict(SATISFIED)
        self.verdict.bound_exceeded = self.bound_exceeded
        return self.verdict

    # ---- conveniences

    def process(self, t: Trace) -> Verdict:
        self.begin(t.id)
        for s in t.steps:
            self.step(s)
        return self.end()

    def consume(self, events: Iterable[StreamEvent]) -> Verdict:
        for ev in events:
            if ev.kind == "begin":
                self.begin(ev.trace_id)
            elif ev.kind == "step":
                self.step(ev.step)
            else:
                self.end()
        return self.finish()


_CODE_CACHE_ATTR = "_hm_codes"


def _codes(tpl: MonitorTemplate, t: Trace, slot: int) -> list[int]:
    cache = tpl.__dict__.setdefault(_CODE_CACHE_ATTR, {})
    key = (t.steps, slot)
    r = cache.get(key)
    if r is None:
        r = cache[key] = tpl.trace_codes(t, slot)
    return r


def run_online_sequential(phi: QuantifiedFormula, traces: Iterable[Trace],
                          options: MonitorOptions | None = None,
                          tpl: MonitorTemplate | None = None):
    """Monitor ``traces`` in arrival order; returns (verdict, stats, monitor)."""
    options = options or MonitorOptions()
    if options.trie:
        from .trie import TrieSequentialMonitor
        mon = TrieSequentialMonitor(phi, options, tpl)
    else:
        mon = SequentialMonitor(phi, options, tpl)
    for t in traces:
        mon.process(t)
        if mon.verdict.violated and options.stop_on_violation:
            break
    return mon.finish(), mon.stats, mon
