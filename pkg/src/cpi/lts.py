"""Labeled transition system for the polyadic calculus.

Early semantics with a finite input cut: input actions are instantiated
over a caller-supplied environment of channels plus one canonical fresh
channel per tuple position.  Replication is unfolded one copy per
derivation, never structurally, so successor sets are always finite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .parser import render
from .syntax import (
    CpiError, Match, Name, Nil, Par, Prefixed, Process, Receive, Repl,
    Restrict, Send, SortError, canonicalize, chan, free_names, prefix_chain,
    substitute, substitute_free,
)


class NoSuchTransition(CpiError):
    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(f"no matching transition at step {step}" + (f": {message}" if message else ""))


@dataclass(frozen=True)
class OutAct:
    subject: Name
    objects: tuple[Name, ...]


@dataclass(frozen=True)
class InAct:
    subject: Name
    objects: tuple[Name, ...]


@dataclass(frozen=True)
class BoundOutAct:
    subject: Name
    objects: tuple[Name, ...]
    bound: tuple[Name, ...]

    def __post_init__(self) -> None:
        if not self.bound:
            raise ValueError("bound output needs a bound object")
        if not set(self.bound) <= set(self.objects):
            raise ValueError("bound names must be among the objects")
        if self.subject in self.bound:
            raise ValueError("bound output subject cannot be bound")


@dataclass(frozen=True)
class TauAct:
    pass


Action = Union[OutAct, InAct, BoundOutAct, TauAct]
TAU = TauAct()


def action_bound(a: Action) -> frozenset[Name]:
    return frozenset(a.bound) if isinstance(a, BoundOutAct) else frozenset()


def action_names(a: Action) -> frozenset[Name]:
    if isinstance(a, TauAct):
        return frozenset()
    return frozenset((a.subject,) + a.objects)


def action_free(a: Action) -> frozenset[Name]:
    return action_names(a) - action_bound(a)


def action_to_json(a: Action) -> dict:
    match a:
        case TauAct():
            return {"kind": "tau"}
        case OutAct(subject=s, objects=objs):
            return {"kind": "out", "subject": s.ident, "objects": [o.ident for o in objs]}
        case InAct(subject=s, objects=objs):
            return {"kind": "in", "subject": s.ident, "objects": [o.ident for o in objs]}
        case BoundOutAct(subject=s, objects=objs, bound=bound):
            return {"kind": "bound-out", "subject": s.ident,
                    "objects": [o.ident for o in objs],
                    "bound": [b.ident for b in bound]}
    raise TypeError(a)


def render_action(a: Action) -> str:
    match a:
        case TauAct():
            return "tau"
        case OutAct(subject=s, objects=objs):
            return f"{s.ident}!<{','.join(o.ident for o in objs)}>"
        case InAct(subject=s, objects=objs):
            return f"{s.ident}?<{','.join(o.ident for o in objs)}>"
        case BoundOutAct(subject=s, objects=objs, bound=bound):
            return (f"(new {','.join(b.ident for b in bound)}) "
                    f"{s.ident}!<{','.join(o.ident for o in objs)}>")
    raise TypeError(a)


@dataclass(frozen=True)
class Transition:
    source: Process
    action: Action
    target: Process
    rules: tuple[str, ...]

    def to_json(self) -> dict:
        return {"action": action_to_json(self.action),
                "target": render(self.target),
                "rules": list(self.rules)}


def _action_sort_key(a: Action):
    match a:
        case TauAct():
            return (0, "", (), ())
        case OutAct(subject=s, objects=objs):
            return (1, s.ident, tuple(o.ident for o in objs), ())
        case BoundOutAct(subject=s, objects=objs, bound=bound):
            return (2, s.ident, tuple(o.ident for o in objs), tuple(b.ident for b in bound))
        case InAct(subject=s, objects=objs):
            return (3, s.ident, tuple(o.ident for o in objs), ())
    raise TypeError(a)


# ---------------------------------------------------------------------------
# Input instantiation


def _fresh_channels(avoid: set[str], count: int, tag: str = "i") -> list[Name]:
    out = []
    j = 0
    for _ in range(count):
        while f"#{tag}{j}" in avoid:
            j += 1
        out.append(chan(f"#{tag}{j}"))
        j += 1
    return out


def _input_candidates(env: frozenset[Name], arity: int) -> list[list[Name]]:
    base = sorted(env, key=lambda n: n.ident)
    fresh = _fresh_channels({n.ident for n in env}, arity)
    return [base + [fresh[i]] for i in range(arity)]


# ---------------------------------------------------------------------------
# The transition relation

_succ_cache: dict = {}
_input_cache: dict = {}


def clear_caches() -> None:
    _succ_cache.clear()
    _input_cache.clear()


def _guards_pass(guards: list[tuple[Name, Name]]) -> bool:
    return all(a == b for a, b in guards)


def _rename_bound_away(a: BoundOutAct, target: Process,
                       avoid: frozenset[Name]) -> tuple[BoundOutAct, Process]:
    clash = [b for b in a.bound if b in avoid]
    if not clash:
        return a, target
    avoid_idents = ({n.ident for n in avoid}
                    | {n.ident for n in action_names(a)}
                    | {n.ident for n in free_names(target)})
    fresh = _fresh_channels(avoid_idents, len(clash), tag="o")
    m = dict(zip(clash, fresh))
    objs = tuple(m.get(o, o) for o in a.objects)
    bound = tuple(m.get(b, b) for b in a.bound)
    return BoundOutAct(a.subject, objs, bound), substitute_free(target, m)


def _input_on(p: Process, subject: Name, objects: tuple[Name, ...]) -> list:
    """Derivations of the input action ``subject?<objects>`` from ``p``."""
    key = (p, subject, objects)
    hit = _input_cache.get(key)
    if hit is not None:
        return hit
    out: list[tuple[Process, tuple[str, ...]]] = []
    match p:
        case Nil():
            pass
        case Prefixed(prefix=pre, continuation=cont):
            guards, core = prefix_chain(pre)
            if _guards_pass(guards) and isinstance(core, Receive) and core.subject == subject:
                if len(core.binders) != len(objects):
                    raise SortError(
                        f"receive on {subject.ident!r} has arity {len(core.binders)}, "
                        f"synchronization offers {len(objects)}")
                target = substitute(cont, dict(zip(core.binders, objects)))
                out.append((target, ("match",) * len(guards) + ("in",)))
        case Par(left=l, right=r):
            for t, rl in _input_on(l, subject, objects):
                out.append((Par(t, r), rl + ("par-l",)))
            for t, rl in _input_on(r, subject, objects):
                out.append((Par(l, t), rl + ("par-r",)))
        case Restrict(channels=ks, body=body):
            if not (set(ks) & (set(objects) | {subject})):
                for t, rl in _input_on(body, subject, objects):
                    out.append((Restrict(ks, t), rl + ("res",)))
        case Repl(body=body):
            for t, rl in _input_on(body, subject, objects):
                out.append((Par(t, Repl(body)), rl + ("rep-act",)))
    _input_cache[key] = out
    return out


def _succ(p: Process, env: frozenset[Name], inputs: bool) -> list:
    key = (p, env, inputs)
    hit = _succ_cache.get(key)
    if hit is not None:
        return hit
    out: list[tuple[Action, Process, tuple[str, ...]]] = []
    match p:
        case Nil():
            pass
        case Prefixed(prefix=pre, continuation=cont):
            guards, core = prefix_chain(pre)
            if _guards_pass(guards):
                rules = ("match",) * len(guards)
                if isinstance(core, Send):
                    if core.subject.is_channel and all(o.is_channel for o in core.objects):
                        out.append((OutAct(core.subject, core.objects), cont,
                                    rules + ("out",)))
                elif inputs and core.subject.is_channel:
                    cands = _input_candidates(env, len(core.binders))
                    for tup in itertools.product(*cands):
                        target = substitute(cont, dict(zip(core.binders, tup)))
                        out.append((InAct(core.subject, tup), target,
                                    rules + ("in",)))
        case Par(left=l, right=r):
            ls = _succ(l, env, inputs)
            rs = _succ(r, env, inputs)
            fn_l = free_names(l)
            fn_r = free_names(r)
            for a, t, rl in ls:
                if isinstance(a, BoundOutAct):
                    a, t = _rename_bound_away(a, t, fn_r)
                out.append((a, Par(t, r), rl + ("par-l",)))
            for a, t, rl in rs:
                if isinstance(a, BoundOutAct):
                    a, t = _rename_bound_away(a, t, fn_l)
                out.append((a, Par(l, t), rl + ("par-r",)))
            for a, t, rl in ls:
                if isinstance(a, OutAct):
                    for t2, rl2 in _input_on(r, a.subject, a.objects):
                        out.append((TAU, Par(t, t2), rl + rl2 + ("comm-l",)))
                elif isinstance(a, BoundOutAct):
                    a2, t = _rename_bound_away(a, t, fn_r)
                    for t2, rl2 in _input_on(r, a2.subject, a2.objects):
                        out.append((TAU, Restrict(a2.bound, Par(t, t2)),
                                    rl + rl2 + ("close-l",)))
            for a, t, rl in rs:
                if isinstance(a, OutAct):
                    for t2, rl2 in _input_on(l, a.subject, a.objects):
                        out.append((TAU, Par(t2, t), rl + rl2 + ("comm-r",)))
                elif isinstance(a, BoundOutAct):
                    a2, t = _rename_bound_away(a, t, fn_l)
                    for t2, rl2 in _input_on(l, a2.subject, a2.objects):
                        out.append((TAU, Restrict(a2.bound, Par(t2, t)),
                                    rl + rl2 + ("close-r",)))
        case Restrict(channels=ks, body=body):
            if len(ks) > 1:
                # Multi-restriction is definitionally nested singles.
                inner_p: Process = Restrict(ks[1:], body)
                ks = ks[:1]
            else:
                inner_p = body
            k = ks[0]
            for a, t, rl in _succ(inner_p, env, inputs):
                if isinstance(a, OutAct) and k in a.objects and a.subject != k:
                    out.append((BoundOutAct(a.subject, a.objects, (k,)), t,
                                rl + ("open",)))
                elif (isinstance(a, BoundOutAct) and k in a.objects
                      and k not in a.bound and a.subject != k):
                    bound_set = set(a.bound) | {k}
                    bound = tuple(o for i, o in enumerate(a.objects)
                                  if o in bound_set and o not in a.objects[:i])
                    out.append((BoundOutAct(a.subject, a.objects, bound), t,
                                rl + ("open",)))
                elif k not in action_names(a):
                    out.append((a, Restrict((k,), t), rl + ("res",)))
        case Repl(body=body):
            fn_b = free_names(body)
            inner = _succ(body, env, inputs)
            for a, t, rl in inner:
                if isinstance(a, BoundOutAct):
                    a, t = _rename_bound_away(a, t, fn_b)
                out.append((a, Par(t, p), rl + ("rep-act",)))
            for a, t, rl in inner:
                if isinstance(a, OutAct):
                    for t2, rl2 in _input_on(body, a.subject, a.objects):
                        out.append((TAU, Par(Par(t, t2), p),
                                    rl + rl2 + ("rep-comm",)))
                elif isinstance(a, BoundOutAct):
                    a2, t = _rename_bound_away(a, t, fn_b)
                    for t2, rl2 in _input_on(body, a2.subject, a2.objects):
                        out.append((TAU, Par(Restrict(a2.bound, Par(t, t2)), p),
                                    rl + rl2 + ("rep-close",)))
    _succ_cache[key] = out
    return out


def successors(p: Process, environment: Iterable[Name] = (),
               include_inputs: bool = True) -> tuple[Transition, ...]:
    """All transitions of ``p``, deduplicated up to alpha-equivalence.

    ``environment`` extends the input-instantiation set beyond the free
    channels of ``p``.  With ``include_inputs=False`` free input actions
    are omitted (internal synchronizations are still found), which is
    exact for tau-only exploration of closed processes.
    """
    p = canonicalize(p)
    env = (frozenset(n for n in free_names(p) if n.is_channel)
           | frozenset(environment))
    seen: dict = {}
    for a, t, rl in _succ(p, env, include_inputs):
        t = canonicalize(t)
        keyed = (a, t)
        if keyed not in seen:
            seen[keyed] = rl
    trans = [Transition(p, a, t, rl) for (a, t), rl in seen.items()]
    trans.sort(key=lambda tr: (_action_sort_key(tr.action), render(tr.target)))
    return tuple(trans)


# ---------------------------------------------------------------------------
# Traces and tau reachability


def _labels_match(requested: Action, offered: Action) -> bool:
    """Label equality, with bound-output names compared positionally."""
    if type(requested) is not type(offered):
        return False
    if isinstance(requested, TauAct):
        return True
    if isinstance(requested, (OutAct, InAct)):
        return requested == offered
    if requested.subject != offered.subject:
        return False
    if len(requested.objects) != len(offered.objects):
        return False
    rb, ob = set(requested.bound), set(offered.bound)
    pairing: dict[Name, Name] = {}
    for r, o in zip(requested.objects, offered.objects):
        if (r in rb) != (o in ob):
            return False
        if r in rb:
            if pairing.setdefault(r, o) != o:
                return False
        elif r != o:
            return False
    return True


def run_trace(p: Process, actions: Iterable[Action]) -> Process:
    """Fold :func:`successors` along ``actions``; bound-output labels are
    matched up to consistent renaming of their bound names."""
    state = canonicalize(p)
    for i, a in enumerate(actions):
        extra = [n for n in action_free(a) if n.is_channel]
        for tr in successors(state, extra):
            if _labels_match(a, tr.action):
                state = tr.target
                break
        else:
            raise NoSuchTransition(i, render_action(a))
    return state


@dataclass(frozen=True)
class TauReachable:
    states: frozenset[Process]
    budget: int
    exceeded: bool

    def to_json(self) -> dict:
        return {"states": sorted(render(s) for s in self.states),
                "budget": self.budget,
                "budget_exceeded": self.exceeded}


def tau_levels(p: Process, budget: int):
    """Yield the new canonical states found at each tau depth 0..budget."""
    state = canonicalize(p)
    seen = {state}
    frontier = [state]
    yield [state]
    for _ in range(budget):
        nxt = []
        for s in frontier:
            for tr in successors(s, include_inputs=False):
                if isinstance(tr.action, TauAct) and tr.target not in seen:
                    seen.add(tr.target)
                    nxt.append(tr.target)
        if not nxt:
            return
        nxt.sort(key=render)
        yield nxt
        frontier = nxt


def tau_reachable(p: Process, budget: int) -> TauReachable:
    """All processes reachable by at most ``budget`` tau steps."""
    levels = list(tau_levels(p, budget))
    states = frozenset(s for level in levels for s in level)
    exceeded = False
    if len(levels) == budget + 1:
        for s in levels[-1]:
            if any(isinstance(tr.action, TauAct) and tr.target not in states
                   for tr in successors(s, include_inputs=False)):
                exceeded = True
                break
    return TauReachable(states, budget, exceeded)
