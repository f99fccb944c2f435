"""Non-forwarding analysis.

A process forwards when some trace receives a channel that was not free
beforehand and later emits that channel as an output object.  The
analyzer explores all traces up to a depth bound, breadth-first, with
canonical-state deduplication; confidential-fragment membership gives
the same guarantee statically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .bisim import Verdict, check
from .lts import (
    Action, BoundOutAct, InAct, OutAct, _action_sort_key, action_bound,
    action_to_json, successors,
)
from .syntax import (
    CpiError, Name, Process, ValidationReport, canonicalize, free_names,
    validate_cpi,
)


class WitnessNotCpi(CpiError):
    """The supplied witness is not a confidential process."""


@dataclass(frozen=True)
class NFViolation:
    trace: tuple[Action, ...]
    receive_index: int
    send_index: int
    channel: Name

    def to_json(self) -> dict:
        return {"trace": [action_to_json(a) for a in self.trace],
                "receive_index": self.receive_index,
                "send_index": self.send_index,
                "channel": self.channel.ident}


@dataclass(frozen=True)
class NFVerdict:
    satisfied: bool
    depth: int
    violation: Optional[NFViolation] = None

    @property
    def result(self) -> str:
        return "satisfied-up-to-depth" if self.satisfied else "violated"

    def to_json(self) -> dict:
        return {"result": self.result, "depth": self.depth,
                "violation": self.violation.to_json() if self.violation else None}


def _free_output_objects_of(action: Action) -> frozenset[Name]:
    if isinstance(action, OutAct):
        return frozenset(action.objects)
    if isinstance(action, BoundOutAct):
        return frozenset(action.objects) - action_bound(action)
    return frozenset()


def check_nonforwarding(p: Process, depth: int,
                        use_fo: bool = False) -> NFVerdict:
    """Search all traces of length at most ``depth`` for a forwarding
    pattern: a channel received while absent from the free names, later
    sent as a free output object.

    With ``use_fo=True`` the receive condition is weakened to absence
    from the free output objects (the strengthened static form); the
    default matches the behavioral definition (absence from free names).
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    root = canonicalize(p)
    # node: (state, watched: tuple[(channel, receive_index)], trace)
    frontier = [(root, (), ())]
    seen = {(root, ())}
    for _level in range(depth):
        nxt = []
        for state, watched, trace in frontier:
            if use_fo:
                from .syntax import free_output_objects
                absent = lambda n: n not in free_output_objects(state)
            else:
                absent = lambda n: n not in free_names(state)
            watch_map = dict(watched)
            for tr in successors(state):
                emitted = _free_output_objects_of(tr.action)
                for l in sorted(emitted & set(watch_map), key=lambda n: n.ident):
                    return NFVerdict(False, depth, NFViolation(
                        trace + (tr.action,), watch_map[l], len(trace), l))
                new_watch = watched
                if isinstance(tr.action, InAct):
                    extra = tuple(
                        (o, len(trace)) for o in tr.action.objects
                        if o.is_channel and absent(o) and o not in watch_map)
                    if extra:
                        new_watch = tuple(sorted(
                            set(watched) | set(extra),
                            key=lambda kv: (kv[0].ident, kv[1])))
                key = (tr.target, new_watch)
                if key not in seen:
                    seen.add(key)
                    nxt.append((tr.target, new_watch, trace + (tr.action,)))
        nxt.sort(key=lambda node: tuple(_action_sort_key(a) for a in node[2]))
        frontier = nxt
        if not frontier:
            break
    return NFVerdict(True, depth)


@dataclass(frozen=True)
class StaticGuarantee:
    guaranteed: bool
    report: ValidationReport

    def to_json(self) -> dict:
        return {"result": "guaranteed" if self.guaranteed else "not-applicable",
                "report": self.report.to_json()}


def static_guarantee(p: Process) -> StaticGuarantee:
    """Confidential-fragment membership implies non-forwarding at every
    depth; otherwise the validation report says why the guarantee does
    not apply."""
    report = validate_cpi(p)
    return StaticGuarantee(report.ok, report)


@dataclass(frozen=True)
class Evidence:
    positive: bool
    depth: int
    witness_valid: ValidationReport
    verdict: Verdict

    def to_json(self) -> dict:
        return {"result": "positive" if self.positive else "negative",
                "depth": self.depth,
                "witness_valid": self.witness_valid.to_json(),
                "verdict": self.verdict.to_json()}


def witness_check(p: Process, q: Process, depth: int) -> Evidence:
    """Bounded evidence that ``p`` does not forward: a confidential
    witness ``q`` that is bisimilar to ``p`` up to ``depth``.  This
    instantiates an existential criterion at finite depth; it is
    reported as evidence, never as proof."""
    report = validate_cpi(q)
    if not report.ok:
        raise WitnessNotCpi(
            "; ".join(v.message for v in report.violations) or "witness rejected")
    verdict = check(p, q, depth)
    return Evidence(verdict.bisimilar, depth, report, verdict)
