"""Finite traces, tuple zipping and the textual trace formats."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, TextIO

Step = frozenset  # frozenset[str]
Letter = frozenset  # frozenset[tuple[str, str]], pairs (ap, var)

EMPTY_STEP: frozenset[str] = frozenset()


class ArityMismatch(ValueError):
    pass


class ProtocolError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(message + where)
        self.line = line


@dataclass(frozen=True)
class Trace:
    id: str
    steps: tuple[frozenset[str], ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def __getitem__(self, i: int) -> frozenset[str]:
        # positions past the end read as the empty step, like the empty trace
        if 0 <= i < len(self.steps):
            return self.steps[i]
        return EMPTY_STEP

    def __str__(self) -> str:
        return format_trace(self)

    def renamed(self, new_id: str) -> "Trace":
        return Trace(new_id, self.steps)

    def truncate(self, n: int) -> "Trace":
        return Trace(self.id, self.steps[:n])


def make_trace(steps: Iterable[Iterable[str]], id: str = "t") -> Trace:
    return Trace(id, tuple(frozenset(s) for s in steps))


def subsequence(t: Trace, i: int, j: int) -> Trace:
    """Steps ``i..j`` inclusive, clipped at the end; empty once ``i >= |t|``."""
    if i > j:
        raise ValueError("subsequence requires i <= j")
    if i >= len(t):
        return Trace(t.id, ())
    return Trace(t.id, t.steps[i:min(j, len(t) - 1) + 1])


def zip_tuple(traces: Sequence[Trace], vars_: Sequence[str]) -> list[frozenset[tuple[str, str]]]:
    if len(traces) != len(vars_):
        raise ArityMismatch(f"{len(traces)} traces for {len(vars_)} variables")
    m = min((len(t) for t in traces), default=0)
    return [
        frozenset((a, v) for t, v in zip(traces, vars_) for a in t.steps[i])
        for i in range(m)
    ]


def project(letter: Iterable[tuple[str, str]], var: str) -> frozenset[str]:
    return frozenset(a for a, v in letter if v == var)


# ------------------------------------------------------------------- formats


def format_step(step: Iterable[str]) -> str:
    items = sorted(step)
    return ",".join(items) if items else "-"


def format_trace(t: Trace) -> str:
    return ";".join(format_step(s) for s in t.steps)


def parse_step(text: str, line: int | None = None) -> frozenset[str]:
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        text = text[1:-1].strip()
    if text in ("-", ""):
        return EMPTY_STEP
    names = [a.strip() for a in text.split(",")]
    if any(not a for a in names):
        raise ProtocolError(f"malformed step {text!r}", line)
    return frozenset(names)


def parse_trace_line(text: str, id: str, line: int | None = None) -> Trace:
    text = text.strip()
    if text in ("", "ε", "eps"):
        return Trace(id, ())
    return Trace(id, tuple(parse_step(s, line) for s in text.split(";")))


def read_trace_file(stream: TextIO | Iterable[str], prefix: str = "t") -> list[Trace]:
    """One trace per line; blank lines and ``#`` comments are skipped.

    An explicit empty trace is written ``eps``.
    """
    out = []
    for lineno, raw in enumerate(stream, 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        out.append(parse_trace_line(body, f"{prefix}{len(out)}", lineno))
    return out


def write_trace_file(traces: Iterable[Trace]) -> str:
    return "".join((format_trace(t) or "eps") + "\n" for t in traces)


# ------------------------------------------------------------------- streams


@dataclass
class StreamEvent:
    """One element of a sequential stream."""

    kind: str  # "begin", "step" or "end"
    trace_id: str | None = None
    step: frozenset[str] = field(default=EMPTY_STEP)


def read_sequential_stream(lines: Iterable[str]) -> Iterator[StreamEvent]:
    """Parse the ``#trace <id>`` / step / ``#end`` protocol."""
    open_id: str | None = None
    auto = 0
    for lineno, raw in enumerate(lines, 1):
        text = raw.strip()
        if not text:
            continue
        if text.startswith("#trace"):
            if open_id is not None:
                raise ProtocolError(f"trace {open_id!r} not closed before a new one", lineno)
            parts = text.split(None, 1)
            open_id = parts[1].strip() if len(parts) > 1 else f"t{auto}"
            auto += 1
            yield StreamEvent("begin", open_id)
        elif text == "#end":
            if open_id is None:
                raise ProtocolError("#end without an open trace", lineno)
            yield StreamEvent("end", open_id)
            open_id = None
        elif text.startswith("#"):
            continue
        else:
            if open_id is None:
                raise ProtocolError("step outside of a trace", lineno)
            yield StreamEvent("step", open_id, parse_step(text, lineno))
    if open_id is not None:
        raise ProtocolError(f"stream ended inside trace {open_id!r}")


def traces_from_events(events: Iterable[StreamEvent]) -> list[Trace]:
    out, buf, current = [], [], None
    for ev in events:
        if ev.kind == "begin":
            current, buf = ev.trace_id, []
        elif ev.kind == "step":
            buf.append(ev.step)
        else:
            out.append(Trace(current, tuple(buf)))
    return out


def traces_to_stream(traces: Iterable[Trace]) -> str:
    lines = []
    for t in traces:
        lines.append(f"#trace {t.id}")
        lines.extend(format_step(s) for s in t.steps)
        lines.append("#end")
    return "\n".join(lines) + "\n"


def read_parallel_stream(lines: Iterable[str]) -> list[list[frozenset[str] | None]]:
    """Parse ``#step a|b|...`` lines, one field per stream.

    An empty field marks that the stream has ended.  Returns the rows.
    """
    rows: list[list[frozenset[str] | None]] = []
    width = None
    for lineno, raw in enumerate(lines, 1):
        text = raw.strip()
        if not text or not text.startswith("#step"):
            if text and not text.startswith("#"):
                raise ProtocolError("expected a #step line", lineno)
            continue
        fields = text[len("#step"):].split("|")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise ProtocolError(f"expected {width} fields, got {len(fields)}", lineno)
        rows.append([None if not f.strip() else parse_step(f, lineno) for f in fields])
    return rows


def parallel_rows_to_traces(rows: Sequence[Sequence[frozenset[str] | None]]) -> list[Trace]:
    if not rows:
        return []
    k = len(rows[0])
    steps: list[list[frozenset[str]]] = [[] for _ in range(k)]
    ended = [False] * k
    for r, row in enumerate(rows):
        for j, s in enumerate(row):
            if s is None:
                ended[j] = True
            elif ended[j]:
                raise ProtocolError(f"stream {j} resumed after ending", r + 1)
            else:
                steps[j].append(s)
    return [Trace(f"s{j}", tuple(st)) for j, st in enumerate(steps)]


def traces_to_parallel(traces: Sequence[Trace]) -> str:
    m = max((len(t) for t in traces), default=0)
    lines = []
    for i in range(m):
        fields = [format_step(t.steps[i]) if i < len(t) else "" for t in traces]
        lines.append("#step " + "|".join(fields))
    return "\n".join(lines) + ("\n" if lines else "")
