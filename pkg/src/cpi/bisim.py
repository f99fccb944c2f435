"""Bounded strong-bisimilarity checking with counterexample extraction.

The checker plays the d-round symmetric bisimulation game over canonical
state pairs, with memoization.  Bound-output labels are normalized on
both sides (renamed away from everything free in either process) before
comparison, which realizes the freshness side condition on bound names.
A positive answer is a bounded certificate, never a proof of full
bisimilarity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .lts import (
    Action, BoundOutAct, TauAct, _fresh_channels, action_to_json,
    render_action, successors,
)
from .parser import render
from .syntax import (
    CpiError, Match, Name, NIL, Par, Prefix, Prefixed, Process, Receive,
    Restrict, Send, canonicalize, chan, free_names, substitute_free, var,
)


class ConstructionError(CpiError):
    """A built-in construction clashed with names of the supplied term."""


@dataclass(frozen=True)
class Verdict:
    bisimilar: bool
    depth: int
    counterexample: Optional[tuple[tuple[Action, str], ...]] = None

    @property
    def result(self) -> str:
        return "bisimilar-up-to-depth" if self.bisimilar else "not-bisimilar"

    def to_json(self) -> dict:
        out = {"result": self.result, "depth": self.depth, "counterexample": None}
        if self.counterexample is not None:
            out["counterexample"] = [
                {"action": action_to_json(a), "side": side}
                for a, side in self.counterexample
            ]
        return out

    def describe(self) -> str:
        if self.bisimilar:
            return f"bisimilar up to depth {self.depth}"
        steps = ", ".join(f"{render_action(a)} (unmatched by {side})"
                          for a, side in self.counterexample or ())
        return f"not bisimilar: {steps}"


def _normalized_moves(p: Process, extra_env: frozenset[Name],
                      avoid: frozenset[Name]) -> list[tuple[Action, Process]]:
    """Successor moves of ``p`` with bound-output names renamed to a
    deterministic reserved sequence computed from ``avoid``."""
    moves = []
    avoid_idents = {n.ident for n in avoid}
    for tr in successors(p, extra_env):
        a, t = tr.action, tr.target
        if isinstance(a, BoundOutAct):
            fresh = _fresh_channels(avoid_idents, len(a.bound), tag="b")
            m = dict(zip(a.bound, fresh))
            a = BoundOutAct(a.subject, tuple(m.get(o, o) for o in a.objects),
                            tuple(fresh))
            t = canonicalize(substitute_free(t, m))
        moves.append((a, t))
    return moves


def check(p: Process, q: Process, depth: int) -> Verdict:
    """Play the ``depth``-round strong bisimulation game between ``p``
    and ``q`` over their shared environment of free channels."""
    if depth < 1:
        raise ValueError("depth must be positive")
    p = canonicalize(p)
    q = canonicalize(q)
    base_env = frozenset(n for n in free_names(p) | free_names(q) if n.is_channel)
    memo: dict = {}

    def game(a: Process, b: Process, d: int):
        if d == 0 or a == b:
            return None
        key = (a, b, d)
        if key in memo:
            return memo[key]
        env = base_env | frozenset(
            n for n in free_names(a) | free_names(b) if n.is_channel)
        avoid = env | free_names(a) | free_names(b)
        moves_a = _normalized_moves(a, env, avoid)
        moves_b = _normalized_moves(b, env, avoid)
        by_label_a: dict = {}
        by_label_b: dict = {}
        for act, t in moves_a:
            by_label_a.setdefault(act, []).append(t)
        for act, t in moves_b:
            by_label_b.setdefault(act, []).append(t)

        result = None
        for attacker, defender, side in ((by_label_a, by_label_b, "right"),
                                         (by_label_b, by_label_a, "left")):
            for act, targets in attacker.items():
                cands = defender.get(act)
                for t in targets:
                    if not cands:
                        result = [(act, side)]
                        break
                    sub_fails = []
                    for c in cands:
                        sub = game(t, c, d - 1) if side == "right" else game(c, t, d - 1)
                        if sub is None:
                            break
                        sub_fails.append(sub)
                    else:
                        result = [(act, side)] + sub_fails[0]
                        break
                if result is not None:
                    break
            if result is not None:
                break
        memo[key] = result
        return result

    ce = game(p, q, depth)
    if ce is None:
        return Verdict(True, depth)
    return Verdict(False, depth, tuple(ce))


# ---------------------------------------------------------------------------
# Closed-domain instances


def check_proposition1_instance(body: Process, m: Name, pi: Prefix,
                                depth: int) -> Verdict:
    """Build the closed-domain pair and run the bounded game on it.

    Left side:  (new k)((new l) k!<l>.m?(y).[y=l]pi.0 | k?(x).body)
    Right side: the same with the guarded continuation replaced by 0.
    ``body`` may use the designated variable ``x``.
    """
    k, l, y = chan("k"), chan("l"), var("y")
    pi_names = _prefix_all_names(pi)
    used = free_names(body) | {m} | pi_names
    for reserved in (k, l, y, chan("y")):
        if reserved in used:
            raise ConstructionError(
                f"instance parts may not mention the reserved name {reserved.ident!r}")
    x = var("x")

    def side(with_match: bool) -> Process:
        cont: Process = Prefixed(Match(y, l, pi), NIL) if with_match else NIL
        left_thread = Restrict((l,), Prefixed(
            Send(k, (l,)), Prefixed(Receive(m, (y,)), cont)))
        right_thread = Prefixed(Receive(k, (x,)), body)
        return Restrict((k,), Par(left_thread, right_thread))

    return check(side(True), side(False), depth)


def _prefix_all_names(pre: Prefix) -> frozenset[Name]:
    match pre:
        case Send(subject=s, objects=objs):
            return frozenset((s,) + objs)
        case Receive(subject=s, binders=bs):
            return frozenset((s,) + bs)
        case Match(lhs=a, rhs=b, inner=inner):
            return _prefix_all_names(inner) | {a, b}
    raise TypeError(pre)


# ---------------------------------------------------------------------------
# The algebraic law suite


@dataclass(frozen=True)
class LawFailure:
    lhs: Process
    rhs: Process
    verdict: Verdict

    def to_json(self) -> dict:
        return {"lhs": render(self.lhs), "rhs": render(self.rhs),
                "verdict": self.verdict.to_json()}


@dataclass(frozen=True)
class LawResult:
    name: str
    instances: int
    failures: tuple[LawFailure, ...]
    should_fail: bool = False

    @property
    def ok(self) -> bool:
        return bool(self.failures) if self.should_fail else not self.failures

    def to_json(self) -> dict:
        return {"name": self.name, "instances": self.instances,
                "ok": self.ok, "should_fail": self.should_fail,
                "failures": [f.to_json() for f in self.failures]}


@dataclass(frozen=True)
class LawReport:
    seed: int
    depth: int
    results: tuple[LawResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def to_json(self) -> dict:
        return {"seed": self.seed, "depth": self.depth, "ok": self.ok,
                "laws": [r.to_json() for r in self.results]}


def law_suite(seed: int, instances: int, depth: int,
              include_mutant: bool = True) -> LawReport:
    """Check the standard bisimilarity laws on random confidential terms.

    The optional mutant law ``P | Q ~ P`` is expected to fail; its
    failure confirms the suite can detect false laws.
    """
    import random

    from .encoding import handler, renaming_policy
    from .gen import random_cpi_process, random_prefix

    rng = random.Random(seed)

    def gen(size: int, extra=()):  # small helper, scope names threaded
        return random_cpi_process(rng, size, extra_channels=extra)

    def law_match_elim():
        scope = (chan("a"), chan("b"))
        pre = random_prefix(rng, scope)
        cont = gen(4)
        a = rng.choice(scope)
        return (Prefixed(Match(a, a, pre), cont), Prefixed(pre, cont))

    def law_par_assoc():
        p1, p2, p3 = gen(4), gen(4), gen(4)
        return (Par(p1, Par(p2, p3)), Par(Par(p1, p2), p3))

    def law_par_comm():
        p1, p2 = gen(5), gen(5)
        return (Par(p1, p2), Par(p2, p1))

    def law_par_unit():
        p = gen(6)
        return (Par(p, NIL), p)

    def law_restrict_swap():
        k, l = chan("rs1"), chan("rs2")
        body = gen(5, extra=(k, l))
        return (Restrict((k,), Restrict((l,), body)),
                Restrict((l,), Restrict((k,), body)))

    def law_restrict_nil():
        return (Restrict((chan("rn"),), NIL), NIL)

    def law_scope_extrusion():
        k = chan("sx")
        p = gen(4)
        q = gen(4, extra=(k,))
        return (Par(p, Restrict((k,), q)), Restrict((k,), Par(p, q)))

    def law_repl_unfold():
        p = gen(3)
        from .syntax import Repl
        return (Repl(p), Par(p, Repl(p)))

    def law_repl_input_restricted():
        from .syntax import Repl
        k = chan("ri")
        x = var("xri")
        body = gen(3)
        return (Restrict((k,), Repl(Prefixed(Receive(k, (x,)), body))), NIL)

    def law_handler_collapse():
        k = chan(rng.choice("abcd"))
        triple = renaming_policy(k)
        return (Restrict((k, triple.n_name, triple.m_name), handler(k)), NIL)

    def mutant_par_absorb():
        p, q = gen(4), gen(4)
        return (Par(p, q), p)

    laws = [
        ("match-elimination", law_match_elim, False),
        ("par-associativity", law_par_assoc, False),
        ("par-commutativity", law_par_comm, False),
        ("par-unit", law_par_unit, False),
        ("restriction-swap", law_restrict_swap, False),
        ("restrict-nil", law_restrict_nil, False),
        ("scope-extrusion", law_scope_extrusion, False),
        ("repl-unfold", law_repl_unfold, False),
        ("restricted-repl-input", law_repl_input_restricted, False),
        ("handler-collapse", law_handler_collapse, False),
    ]
    if include_mutant:
        laws.append(("mutant-par-absorb", mutant_par_absorb, True))

    results = []
    for name, build, should_fail in laws:
        failures = []
        for _ in range(instances):
            lhs, rhs = build()
            verdict = check(lhs, rhs, depth)
            if not verdict.bisimilar:
                failures.append(LawFailure(lhs, rhs, verdict))
        results.append(LawResult(name, instances, tuple(failures), should_fail))
    return LawReport(seed, depth, tuple(results))
