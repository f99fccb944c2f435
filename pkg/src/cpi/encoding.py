"""Compositional translation of monadic sum-free pi terms into the
confidential fragment.

Forwarding a received name ``b`` is replaced by forwarding access to a
pair of service channels attached to ``b``: a channel that reveals ``b``
on request and a channel that brokers a communication on ``b``.  Every
name ``a`` therefore travels as a quadruple ``(a, n_a, m_a, cont)`` and a
replicated handler process serves ``n_a`` and ``m_a``.  The translation
is homomorphic on parallel composition, replication and inaction, and
restriction installs the handler for the restricted name locally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .bisim import Verdict, check
from .lts import TauAct, successors, tau_levels
from .parser import render
from .syntax import (
    CpiError, Match, Name, NIL, Nil, Par, Prefix, Prefixed, Process,
    Receive, Repl, ReservedNameError, Restrict, Send, canonicalize, chan,
    fnn, free_names, bound_names, par, prefix_chain, var, wrap_matches,
)


class SourceModeError(CpiError):
    """The source term is outside the translatable fragment (polyadic
    prefixes, or reserved names in free position)."""


@dataclass(frozen=True)
class NameTriple:
    base: Name
    n_name: Name
    m_name: Name


def renaming_policy(n: Name) -> NameTriple:
    """The reveal/broker channel pair attached to ``n``.

    Derived names follow the sort of the base name, so the pair attached
    to an input binder is bound by the same input.
    """
    if n.is_reserved:
        raise ReservedNameError(
            f"no renaming policy for reserved name {n.ident!r}")
    return NameTriple(n, Name(n.kind, f"#n_{n.ident}"),
                      Name(n.kind, f"#m_{n.ident}"))


def handler(k: Name) -> Process:
    """The replicated service process for channel ``k``.

    One branch answers reveal requests on ``n_k`` by sending ``k`` back;
    the other answers broker requests on ``m_k`` by collecting the
    sender's identity, emitting the travelling quadruple on it, and
    handing the sender its continuation channel.
    """
    t = renaming_policy(k)
    x, x1, x2, y = var("#hx"), var("#hx1"), var("#hx2"), var("#hy")
    fresh = chan("#ht")
    reveal = Repl(Prefixed(Receive(t.n_name, (x,)),
                           Prefixed(Send(x, (k,)), NIL)))
    broker = Repl(Prefixed(
        Receive(t.m_name, (x1, x2)),
        Prefixed(Receive(x1, (y,)),
                 Restrict((fresh,), Prefixed(
                     Send(y, (k, t.n_name, t.m_name, fresh)),
                     Prefixed(Send(x2, (fresh,)), NIL))))))
    return Par(reveal, broker)


class _Fresh:
    def __init__(self, start: int):
        self.i = start

    def take(self) -> int:
        n = self.i
        self.i += 1
        return n


def _rename_reserved_binders(p: Process) -> Process:
    """Rename reserved (``#``-prefixed) binders to surface identifiers so
    canonical forms can be fed back through the translation."""
    taken = {n.ident for n in free_names(p) | bound_names(p)}
    counter = _Fresh(0)

    def fresh(kind: str) -> Name:
        while True:
            ident = f"src{counter.take()}"
            if ident not in taken:
                taken.add(ident)
                return Name(kind, ident)

    def walk_prefix(pre: Prefix, env: dict[Name, Name]):
        match pre:
            case Send(subject=s, objects=objs):
                return Send(env.get(s, s), tuple(env.get(o, o) for o in objs)), env
            case Receive(subject=s, binders=bs):
                env2 = dict(env)
                out = []
                for b in bs:
                    nb = fresh(b.kind) if b.is_reserved else b
                    env2[b] = nb
                    out.append(nb)
                return Receive(env.get(s, s), tuple(out)), env2
            case Match(lhs=a, rhs=b, inner=inner):
                inner2, env2 = walk_prefix(inner, env)
                return Match(env.get(a, a), env.get(b, b), inner2), env2
        raise TypeError(pre)

    def walk(t: Process, env: dict[Name, Name]) -> Process:
        match t:
            case Nil():
                return t
            case Prefixed(prefix=pre, continuation=cont):
                pre2, env2 = walk_prefix(pre, env)
                return Prefixed(pre2, walk(cont, env2))
            case Par(left=l, right=r):
                return Par(walk(l, env), walk(r, env))
            case Restrict(channels=ks, body=body):
                env2 = dict(env)
                out = []
                for k in ks:
                    nk = fresh(k.kind) if k.is_reserved else k
                    env2[k] = nk
                    out.append(nk)
                return Restrict(tuple(out), walk(body, env2))
            case Repl(body=body):
                return Repl(walk(body, env))
        raise TypeError(t)

    return walk(p, {})


def encode(p: Process, fresh_start: int = 0) -> Process:
    """Translate the monadic sum-free term ``p``.

    Raises :class:`SourceModeError` if a prefix is polyadic or a free
    name is reserved.  Reserved bound names (as produced by the
    canonicalizer) are renamed to surface names first.
    """
    for n in free_names(p):
        if n.is_reserved:
            raise SourceModeError(
                f"free reserved name {n.ident!r} in translation source")
    p = _rename_reserved_binders(p)
    fr = _Fresh(fresh_start)

    def enc(t: Process) -> Process:
        match t:
            case Nil():
                return t
            case Par(left=l, right=r):
                return Par(enc(l), enc(r))
            case Repl(body=body):
                return Repl(enc(body))
            case Restrict(channels=ks, body=body):
                out = enc(body)
                for k in reversed(ks):
                    tr = renaming_policy(k)
                    out = Restrict((k, tr.n_name, tr.m_name),
                                   Par(out, handler(k)))
                return out
            case Prefixed(prefix=pre, continuation=cont):
                guards, core = prefix_chain(pre)
                if isinstance(core, Send):
                    if len(core.objects) != 1:
                        raise SourceModeError(
                            f"polyadic send on {core.subject.ident!r}")
                    ta = renaming_policy(core.subject)
                    tb = renaming_policy(core.objects[0])
                    e1 = chan(f"#e{fr.take()}")
                    e2 = chan(f"#e{fr.take()}")
                    y = var(f"#y{fr.take()}")
                    chain = Prefixed(
                        wrap_matches(guards, Send(ta.n_name, (e1,))),
                        Prefixed(Send(tb.m_name, (e1, e2)),
                                 Prefixed(Receive(e2, (y,)),
                                          Prefixed(Send(y, (e1,)), enc(cont)))))
                    return Restrict((e1, e2), chain)
                if len(core.binders) != 1:
                    raise SourceModeError(
                        f"polyadic receive on {core.subject.ident!r}")
                x = core.binders[0]
                tx = renaming_policy(x)
                xc = var(f"#w{fr.take()}")
                dummy = var(f"#y{fr.take()}")
                return Prefixed(
                    wrap_matches(guards,
                                 Receive(core.subject,
                                         (x, tx.n_name, tx.m_name, xc))),
                    Prefixed(Receive(xc, (dummy,)), enc(cont)))
        raise TypeError(t)

    return enc(p)


def encode_with_handlers(p: Process, fresh_start: int = 0) -> Process:
    """The translation of ``p`` composed with handlers for its free
    channels (modulo reflexive match guards)."""
    base = encode(p, fresh_start)
    frees = sorted((n for n in fnn(p) if n.is_channel),
                   key=lambda n: n.ident)
    if not frees:
        return base
    return Par(base, par(*(handler(k) for k in frees)))


def source_reductions(p: Process) -> tuple[Process, ...]:
    """The one-step internal reducts of the closed source term ``p``."""
    if free_names(p):
        raise SourceModeError("reduction analysis needs a closed source term")
    return tuple(tr.target for tr in successors(p, include_inputs=False)
                 if isinstance(tr.action, TauAct))


@dataclass(frozen=True)
class EncodingReport:
    source: Process
    target: Process
    found: bool
    tau_steps: Optional[int]
    witness: Optional[Process]
    verdict: Optional[Verdict]

    def to_json(self) -> dict:
        return {"source": render(self.source),
                "target": render(self.target),
                "found": self.found,
                "tau_steps": self.tau_steps,
                "witness": render(self.witness) if self.witness else None,
                "verdict": self.verdict.to_json() if self.verdict else None}


@dataclass(frozen=True)
class CompletenessReport:
    source: Process
    tau_budget: int
    depth: int
    results: tuple[EncodingReport, ...]

    @property
    def ok(self) -> bool:
        return all(r.found for r in self.results)

    def to_json(self) -> dict:
        return {"source": render(self.source), "tau_budget": self.tau_budget,
                "depth": self.depth, "ok": self.ok,
                "reducts": [r.to_json() for r in self.results]}


def check_completeness(p: Process, tau_budget: int = 12,
                       depth: int = 4) -> CompletenessReport:
    """For every internal reduct ``q`` of the closed term ``p``, search
    the tau-reachable states of the translated ``p`` (within the budget)
    for one bisimilar, up to ``depth``, to the translation of ``q``.

    The report records the tau distance and the witness state per reduct.
    """
    p = canonicalize(p)
    enc_p = encode_with_handlers(p)
    pending = {q: encode_with_handlers(q) for q in source_reductions(p)}
    results: dict[Process, EncodingReport] = {}
    for steps, level in enumerate(tau_levels(enc_p, tau_budget)):
        if not pending:
            break
        for state in level:
            for q, enc_q in list(pending.items()):
                v = check(state, enc_q, depth)
                if v.bisimilar:
                    results[q] = EncodingReport(p, q, True, steps, state, v)
                    del pending[q]
    for q in pending:
        results[q] = EncodingReport(p, q, False, None, None, None)
    ordered = tuple(results[q] for q in sorted(results, key=render))
    return CompletenessReport(p, tau_budget, depth, ordered)
