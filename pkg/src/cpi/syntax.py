"""Core term representation for the confidential pi-calculus workbench.

Names are split into two disjoint sorts: channels and variables.  A name's
sort is fixed at construction.  Processes are immutable trees built from
Nil, prefixing, parallel composition, channel restriction and replication;
prefixes are polyadic sends, polyadic receives and match guards.

Identifiers starting with ``#`` are reserved: they are produced by the
canonicalizer, the substitution engine, the transition engine and the
encoder, and are rejected by the surface parser.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Optional, Union

CHAN = "chan"
VAR = "var"


class CpiError(Exception):
    """Base class for all workbench errors."""


class SortError(CpiError):
    """A name is used at more than one communication arity."""


class CpiViolation(CpiError):
    """A term falls outside the confidential fragment."""


class SubstitutionDomainError(CpiError):
    """A substitution tried to remap a binder occurrence."""


class ReservedNameError(CpiError):
    """A reserved (``#``-prefixed) identifier appeared where a surface
    name was required."""


@dataclass(frozen=True)
class Name:
    kind: str
    ident: str

    def __post_init__(self) -> None:
        if self.kind not in (CHAN, VAR):
            raise ValueError(f"bad name kind: {self.kind!r}")
        if not self.ident:
            raise ValueError("empty identifier")

    @property
    def is_channel(self) -> bool:
        return self.kind == CHAN

    @property
    def is_variable(self) -> bool:
        return self.kind == VAR

    @property
    def is_reserved(self) -> bool:
        return self.ident.startswith("#")

    def __repr__(self) -> str:
        tag = "c" if self.kind == CHAN else "v"
        return f"{tag}:{self.ident}"


def chan(ident: str) -> Name:
    return Name(CHAN, ident)


def var(ident: str) -> Name:
    return Name(VAR, ident)


# ---------------------------------------------------------------------------
# Prefixes and processes


@dataclass(frozen=True)
class Send:
    subject: Name
    objects: tuple[Name, ...]

    def __post_init__(self) -> None:
        if not self.objects:
            raise ValueError("send prefix needs at least one object")


@dataclass(frozen=True)
class Receive:
    subject: Name
    binders: tuple[Name, ...]

    def __post_init__(self) -> None:
        if not self.binders:
            raise ValueError("receive prefix needs at least one binder")
        if any(not b.is_variable for b in self.binders):
            raise ValueError("receive binders must be variables")
        if len(set(self.binders)) != len(self.binders):
            raise ValueError("receive binders must be pairwise distinct")


@dataclass(frozen=True)
class Match:
    lhs: Name
    rhs: Name
    inner: "Prefix"


Prefix = Union[Send, Receive, Match]


@dataclass(frozen=True)
class Nil:
    pass


@dataclass(frozen=True)
class Prefixed:
    prefix: Prefix
    continuation: "Process"


@dataclass(frozen=True)
class Par:
    left: "Process"
    right: "Process"


@dataclass(frozen=True)
class Restrict:
    channels: tuple[Name, ...]
    body: "Process"

    def __post_init__(self) -> None:
        if not self.channels:
            raise ValueError("restriction needs at least one channel")
        if any(not k.is_channel for k in self.channels):
            raise ValueError("restriction binds channels only")


@dataclass(frozen=True)
class Repl:
    body: "Process"


Process = Union[Nil, Prefixed, Par, Restrict, Repl]

NIL = Nil()


def par(*ps: Process) -> Process:
    """Left-associated parallel composition of one or more processes."""
    if not ps:
        return NIL
    out = ps[0]
    for p in ps[1:]:
        out = Par(out, p)
    return out


def restrict(channels: Iterable[Name], body: Process) -> Process:
    return Restrict(tuple(channels), body)


def prefix_chain(core: Prefix) -> tuple[list[tuple[Name, Name]], Prefix]:
    """Split a prefix into its match guards and the send/receive core."""
    guards: list[tuple[Name, Name]] = []
    while isinstance(core, Match):
        guards.append((core.lhs, core.rhs))
        core = core.inner
    return guards, core


def wrap_matches(guards: Iterable[tuple[Name, Name]], core: Prefix) -> Prefix:
    out = core
    for lhs, rhs in reversed(list(guards)):
        out = Match(lhs, rhs, out)
    return out


# ---------------------------------------------------------------------------
# Name analysis


def _prefix_free(pre: Prefix, cont_free: frozenset[Name]) -> frozenset[Name]:
    match pre:
        case Send(subject=s, objects=objs):
            return cont_free | {s} | set(objs)
        case Receive(subject=s, binders=bs):
            return (cont_free - set(bs)) | {s}
        case Match(lhs=a, rhs=b, inner=inner):
            return _prefix_free(inner, cont_free) | {a, b}
    raise TypeError(pre)


@lru_cache(maxsize=None)
def free_names(p: Process) -> frozenset[Name]:
    """Names with a free occurrence in ``p`` (channels and variables)."""
    match p:
        case Nil():
            return frozenset()
        case Prefixed(prefix=pre, continuation=cont):
            return _prefix_free(pre, free_names(cont))
        case Par(left=l, right=r):
            return free_names(l) | free_names(r)
        case Restrict(channels=ks, body=body):
            return free_names(body) - set(ks)
        case Repl(body=body):
            return free_names(body)
    raise TypeError(p)


@lru_cache(maxsize=None)
def bound_names(p: Process) -> frozenset[Name]:
    match p:
        case Nil():
            return frozenset()
        case Prefixed(prefix=pre, continuation=cont):
            out = bound_names(cont)
            guards, core = prefix_chain(pre)
            if isinstance(core, Receive):
                out = out | set(core.binders)
            return out
        case Par(left=l, right=r):
            return bound_names(l) | bound_names(r)
        case Restrict(channels=ks, body=body):
            return bound_names(body) | set(ks)
        case Repl(body=body):
            return bound_names(body)
    raise TypeError(p)


def _prefix_fo(pre: Prefix) -> frozenset[Name]:
    match pre:
        case Send(objects=objs):
            return frozenset(o for o in objs if o.is_channel)
        case Receive():
            return frozenset()
        case Match(inner=inner):
            return _prefix_fo(inner)
    raise TypeError(pre)


@lru_cache(maxsize=None)
def free_output_objects(p: Process) -> frozenset[Name]:
    """Free channels appearing as objects of output prefixes in ``p``."""
    match p:
        case Nil():
            return frozenset()
        case Prefixed(prefix=pre, continuation=cont):
            return _prefix_fo(pre) | free_output_objects(cont)
        case Par(left=l, right=r):
            return free_output_objects(l) | free_output_objects(r)
        case Restrict(channels=ks, body=body):
            return free_output_objects(body) - set(ks)
        case Repl(body=body):
            return free_output_objects(body)
    raise TypeError(p)


def _prefix_fnn(pre: Prefix, cont: frozenset[Name]) -> frozenset[Name]:
    match pre:
        case Send(subject=s, objects=objs):
            return cont | {s} | set(objs)
        case Receive(subject=s, binders=bs):
            return (cont - set(bs)) | {s}
        case Match(lhs=a, rhs=b, inner=inner):
            if a == b:
                return _prefix_fnn(inner, cont)
            return _prefix_fnn(inner, cont) | {a, b}
    raise TypeError(pre)


@lru_cache(maxsize=None)
def fnn(p: Process) -> frozenset[Name]:
    """Free names modulo reflexive match guards.

    A guard ``[a=a]`` contributes nothing; an unequal guard contributes
    both of its names.  Elsewhere this coincides with :func:`free_names`.
    """
    match p:
        case Nil():
            return frozenset()
        case Prefixed(prefix=pre, continuation=cont):
            return _prefix_fnn(pre, fnn(cont))
        case Par(left=l, right=r):
            return fnn(l) | fnn(r)
        case Restrict(channels=ks, body=body):
            return fnn(body) - set(ks)
        case Repl(body=body):
            return fnn(body)
    raise TypeError(p)


# ---------------------------------------------------------------------------
# Fresh names and substitution

_fresh_counter = itertools.count()


def set_fresh_origin(n: int) -> None:
    """Restart the global fresh-name counter (for reproducible runs)."""
    global _fresh_counter
    _fresh_counter = itertools.count(n)


def fresh_like(n: Name) -> Name:
    """A reserved name of the same sort, guaranteed new in this run."""
    return Name(n.kind, f"#s{next(_fresh_counter)}")


def substitute(p: Process, sigma: Mapping[Name, Name]) -> Process:
    """Simultaneous capture-avoiding substitution.

    ``sigma`` may only send names to channels (the semantics substitutes
    received channels for input binders).  Binders that collide with the
    range are renamed to reserved fresh names.  Raises
    :class:`SubstitutionDomainError` if a binder occurrence is in the
    domain.
    """
    for v in sigma.values():
        if not v.is_channel:
            raise SubstitutionDomainError(f"substitution value {v!r} is not a channel")
    domain = frozenset(sigma)
    return _subst(p, dict(sigma), domain)


def substitute_free(p: Process, sigma: Mapping[Name, Name]) -> Process:
    """Like :func:`substitute`, but the domain is first cut down to the
    names actually free in ``p``, so incidental binder shadowing in the
    wider term cannot trip the domain check."""
    fn = free_names(p)
    cut = {k: v for k, v in sigma.items() if k in fn}
    return substitute(p, cut) if cut else p


def _rebind(binders: tuple[Name, ...], m: dict[Name, Name],
            domain: frozenset[Name]) -> tuple[tuple[Name, ...], dict[Name, Name]]:
    m2 = dict(m)
    out = []
    taken = set(m2.values())
    for b in binders:
        if b in domain:
            raise SubstitutionDomainError(f"substitution remaps binder {b!r}")
        if b in taken:
            b2 = fresh_like(b)
            m2[b] = b2
            out.append(b2)
        else:
            m2.pop(b, None)
            out.append(b)
    return tuple(out), m2


def _subst_name(n: Name, m: Mapping[Name, Name]) -> Name:
    return m.get(n, n)


def _subst_prefix(pre: Prefix, m: dict[Name, Name],
                  domain: frozenset[Name]) -> tuple[Prefix, dict[Name, Name]]:
    match pre:
        case Send(subject=s, objects=objs):
            return Send(_subst_name(s, m), tuple(_subst_name(o, m) for o in objs)), m
        case Receive(subject=s, binders=bs):
            s2 = _subst_name(s, m)
            bs2, m2 = _rebind(bs, m, domain)
            return Receive(s2, bs2), m2
        case Match(lhs=a, rhs=b, inner=inner):
            inner2, m2 = _subst_prefix(inner, m, domain)
            return Match(_subst_name(a, m), _subst_name(b, m), inner2), m2
    raise TypeError(pre)


def _subst(p: Process, m: dict[Name, Name], domain: frozenset[Name]) -> Process:
    match p:
        case Nil():
            return p
        case Prefixed(prefix=pre, continuation=cont):
            pre2, m2 = _subst_prefix(pre, m, domain)
            return Prefixed(pre2, _subst(cont, m2, domain))
        case Par(left=l, right=r):
            return Par(_subst(l, m, domain), _subst(r, m, domain))
        case Restrict(channels=ks, body=body):
            ks2, m2 = _rebind(ks, m, domain)
            return Restrict(ks2, _subst(body, m2, domain))
        case Repl(body=body):
            return Repl(_subst(body, m, domain))
    raise TypeError(p)


# ---------------------------------------------------------------------------
# Canonical forms and alpha-equivalence


@lru_cache(maxsize=None)
def canonicalize(p: Process) -> Process:
    """Alpha-canonical form of ``p``.

    Binders are renamed, in traversal order, to the reserved sequence
    ``#0, #1, ...`` (skipping identifiers that occur free in ``p``), and
    multi-channel restrictions are flattened into nested single ones.
    Two processes are alpha-equivalent iff their canonical forms are
    structurally equal; the result obeys the Barendregt convention.
    """
    avoid = {n.ident for n in free_names(p)}
    counter = itertools.count()

    def next_ident() -> str:
        while True:
            ident = f"#{next(counter)}"
            if ident not in avoid:
                return ident

    def walk_prefix(pre: Prefix, env: dict[Name, Name]) -> tuple[Prefix, dict[Name, Name]]:
        match pre:
            case Send(subject=s, objects=objs):
                return Send(env.get(s, s), tuple(env.get(o, o) for o in objs)), env
            case Receive(subject=s, binders=bs):
                env2 = dict(env)
                bs2 = []
                for b in bs:
                    nb = Name(VAR, next_ident())
                    env2[b] = nb
                    bs2.append(nb)
                return Receive(env.get(s, s), tuple(bs2)), env2
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
                fresh = []
                for k in ks:
                    nk = Name(CHAN, next_ident())
                    env2[k] = nk
                    fresh.append(nk)
                out = walk(body, env2)
                for nk in reversed(fresh):
                    out = Restrict((nk,), out)
                return out
            case Repl(body=body):
                return Repl(walk(body, env))
        raise TypeError(t)

    return walk(p, {})


def alpha_equivalent(p: Process, q: Process) -> bool:
    return canonicalize(p) == canonicalize(q)


# ---------------------------------------------------------------------------
# Confidential-fragment validation


@dataclass(frozen=True)
class Violation:
    path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    kind_violations: tuple[Violation, ...]
    sort_violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.kind_violations and not self.sort_violations

    @property
    def violations(self) -> tuple[Violation, ...]:
        return self.kind_violations + self.sort_violations

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "kind_violations": [{"path": v.path, "message": v.message}
                                for v in self.kind_violations],
            "sort_violations": [{"path": v.path, "message": v.message}
                                for v in self.sort_violations],
        }


def validate_cpi(p: Process) -> ValidationReport:
    """Check membership in the confidential fragment plus well-sortedness.

    Accepted iff every send object is a channel, every receive binder is a
    variable (guaranteed by construction) and every name is used as a
    communication subject at a single arity.
    """
    kind_viols: list[Violation] = []
    arities: dict[Name, dict[int, str]] = {}

    def note_arity(n: Name, arity: int, path: str) -> None:
        arities.setdefault(n, {}).setdefault(arity, path)

    def walk_prefix(pre: Prefix, path: str) -> None:
        match pre:
            case Send(subject=s, objects=objs):
                note_arity(s, len(objs), path)
                for o in objs:
                    if not o.is_channel:
                        kind_viols.append(Violation(
                            path, f"send object {o.ident!r} is a variable"))
            case Receive(subject=s, binders=bs):
                note_arity(s, len(bs), path)
            case Match(inner=inner):
                walk_prefix(inner, path + "/match")

    def walk(t: Process, path: str) -> None:
        match t:
            case Nil():
                pass
            case Prefixed(prefix=pre, continuation=cont):
                walk_prefix(pre, path + "/prefix")
                walk(cont, path + "/cont")
            case Par(left=l, right=r):
                walk(l, path + "/par.left")
                walk(r, path + "/par.right")
            case Restrict(body=body):
                walk(body, path + "/new")
            case Repl(body=body):
                walk(body, path + "/repl")

    # Alpha-rename apart first so shadowed binders cannot produce
    # spurious sort clashes.
    walk(canonicalize(p), "")

    sort_viols = [
        Violation(sorted(paths.values())[0],
                  f"name {n.ident!r} used at arities {sorted(paths)}")
        for n, paths in sorted(arities.items(), key=lambda kv: (kv[0].kind, kv[0].ident))
        if len(paths) > 1
    ]
    return ValidationReport(tuple(kind_viols), tuple(sort_viols))
