"""Monitorability of alternation-free formulas in the unbounded sequential
model, decided by reachability of definitive verdicts in a monitor FSM."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .formula import Atom, Globally, Implies, QuantifiedFormula, desugar
from .ltl import BOTTOM, TOP, MonitorFsm, build_fsm_monitor, is_satisfiable, is_valid


class Result(Enum):
    MONITORABLE = "Monitorable"
    NOT_MONITORABLE = "NotMonitorable"
    UNSUPPORTED = "Unsupported"


class Reason(Enum):
    BODY_VALID = "BodyValid"
    BODY_UNSATISFIABLE = "BodyUnsatisfiable"
    BAD_REACHABLE_EVERYWHERE = "BadReachableEverywhere"
    GOOD_REACHABLE_EVERYWHERE = "GoodReachableEverywhere"
    DEAD_REGION = "DeadRegion"
    ALTERNATING = "Alternating"
    MODEL_UNSUPPORTED = "ModelUnsupported"


@dataclass
class MonitorabilityReport:
    result: Result
    reason: Reason
    dead_state: int | None = None
    fsm: MonitorFsm | None = None

    @property
    def monitorable(self) -> bool:
        return self.result is Result.MONITORABLE

    def describe(self) -> str:
        lines = [f"result: {self.result.value}", f"reason: {self.reason.value}"]
        if self.dead_state is not None:
            lines[-1] += f" (state {self.dead_state})"
        if self.fsm is not None:
            lines.append(f"fsm states: {len(self.fsm.states)}")
        return "\n".join(lines)


def _definitive_everywhere(fsm: MonitorFsm, verdict: str) -> int | None:
    """First reachable state that cannot reach ``verdict``, or None."""
    targets = {q for q, v in enumerate(fsm.verdicts) if v == verdict}
    ok = fsm.can_reach(targets)
    for q in sorted(fsm.reachable(fsm.initial)):
        if q not in ok:
            return q
    return None


def check_monitorable_unbounded(phi: QuantifiedFormula) -> MonitorabilityReport:
    if not phi.alternation_free:
        return MonitorabilityReport(Result.UNSUPPORTED, Reason.ALTERNATING)
    body = desugar(phi.body)
    if phi.universal:
        if is_valid(body):
            return MonitorabilityReport(Result.MONITORABLE, Reason.BODY_VALID)
        fsm = build_fsm_monitor(body)
        dead = _definitive_everywhere(fsm, BOTTOM)
        if dead is None:
            return MonitorabilityReport(Result.MONITORABLE, Reason.BAD_REACHABLE_EVERYWHERE, fsm=fsm)
        return MonitorabilityReport(Result.NOT_MONITORABLE, Reason.DEAD_REGION, dead, fsm)
    if is_satisfiable(body) is None:
        return MonitorabilityReport(Result.MONITORABLE, Reason.BODY_UNSATISFIABLE)
    fsm = build_fsm_monitor(body)
    dead = _definitive_everywhere(fsm, TOP)
    if dead is None:
        return MonitorabilityReport(Result.MONITORABLE, Reason.GOOD_REACHABLE_EVERYWHERE, fsm=fsm)
    return MonitorabilityReport(Result.NOT_MONITORABLE, Reason.DEAD_REGION, dead, fsm)


def _is_forall_exists_safety(phi: QuantifiedFormula) -> bool:
    """The shape forall p. exists q. G (a[p] -> b[q])."""
    if phi.shape.kind != "ForallExists" or phi.shape.counts != (1, 1):
        return False
    p, q = phi.vars
    b = phi.body
    return (isinstance(b, Globally) and isinstance(b.arg, Implies)
            and isinstance(b.arg.left, Atom) and isinstance(b.arg.right, Atom)
            and b.arg.left.var == p and b.arg.right.var == q)


def classify_model_support(phi: QuantifiedFormula, model: str = "unbounded",
                           bound: int | None = None) -> MonitorabilityReport:
    """``model`` is one of unbounded, bounded, parallel."""
    if model == "unbounded":
        if phi.alternation_free:
            return check_monitorable_unbounded(phi)
        if _is_forall_exists_safety(phi):
            # a fresh trace with a but without b can always be appended
            return MonitorabilityReport(Result.NOT_MONITORABLE, Reason.ALTERNATING)
        return MonitorabilityReport(Result.UNSUPPORTED, Reason.ALTERNATING)
    if model in ("bounded", "parallel"):
        return MonitorabilityReport(Result.UNSUPPORTED, Reason.MODEL_UNSUPPORTED)
    raise ValueError(f"unknown input model {model!r}")
