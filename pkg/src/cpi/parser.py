"""Surface syntax: parsing and pretty-printing.

Grammar (``--`` starts a line comment)::

    P      ::= "0" | prefix "." P | P "|" P
             | "new" ident ("," ident)* "in" P | "!" P | "(" P ")"
    prefix ::= ident "!" "<" ident ("," ident)* ">"
             | ident "?" "(" ident ("," ident)* ")"
             | "[" ident "=" ident "]" prefix

``|`` binds loosest and associates to the left; ``!`` and ``new ... in``
extend as far right as possible; a prefix dot binds tighter than ``|``.

Name sorts are resolved from binding positions: receive binders are
variables, restricted names are channels, and free identifiers default to
channels.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    CHAN, VAR, CpiError, CpiViolation, Match, Name, NIL, Nil, Par, Prefix,
    Prefixed, Process, Receive, Repl, Restrict, Send, SortError,
    canonicalize, chan, prefix_chain, validate_cpi,
)

CPI = "cpi"
PI = "pi"


class CpiSyntaxError(CpiError):
    def __init__(self, line: int, col: int, expected: str):
        self.line = line
        self.col = col
        self.expected = expected
        super().__init__(f"{line}:{col}: expected {expected}")


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>--[^\n]*)
  | (?P<ident>\#?[a-zA-Z][a-zA-Z0-9_]*|\#[0-9]+)
  | (?P<punct>[0!<>?()\[\]=,.|])
""", re.VERBOSE)

_IDENT_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*$")


@dataclass(frozen=True)
class _Tok:
    text: str
    line: int
    col: int


def _tokenize(text: str, allow_reserved: bool) -> list[_Tok]:
    toks = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise CpiSyntaxError(line, col, "a token")
        lexeme = m.group(0)
        kind = m.lastgroup
        if kind == "ident" and lexeme.startswith("#") and not allow_reserved:
            raise CpiSyntaxError(line, col, "a surface identifier (reserved '#' names rejected)")
        if kind not in ("ws", "comment"):
            toks.append(_Tok(lexeme, line, col))
        for ch in lexeme:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok], text_len_line: tuple[int, int]):
        self.toks = toks
        self.i = 0
        self.eof_pos = text_len_line

    def peek(self) -> str | None:
        return self.toks[self.i].text if self.i < len(self.toks) else None

    def _pos(self) -> tuple[int, int]:
        if self.i < len(self.toks):
            t = self.toks[self.i]
            return t.line, t.col
        return self.eof_pos

    def fail(self, expected: str):
        line, col = self._pos()
        raise CpiSyntaxError(line, col, expected)

    def take(self, expected: str | None = None) -> str:
        if self.i >= len(self.toks):
            self.fail(expected or "more input")
        tok = self.toks[self.i]
        if expected is not None and tok.text != expected:
            self.fail(f"'{expected}'")
        self.i += 1
        return tok.text

    def take_ident(self) -> str:
        t = self.peek()
        if t is None or t in ("new", "in") or not (t[0].isalpha() or t[0] == "#"):
            self.fail("an identifier")
        return self.take()

    # -- grammar -----------------------------------------------------------

    def parse_process(self, env: dict[str, Name]) -> Process:
        left = self.parse_term(env)
        while self.peek() == "|":
            self.take("|")
            right = self.parse_term(env)
            left = Par(left, right)
        return left

    def parse_term(self, env: dict[str, Name]) -> Process:
        t = self.peek()
        if t is None:
            self.fail("a process")
        if t == "0":
            self.take()
            return NIL
        if t == "(":
            self.take()
            p = self.parse_process(env)
            self.take(")")
            return p
        if t == "!":
            self.take()
            return Repl(self.parse_process(env))
        if t == "new":
            self.take()
            idents = [self.take_ident()]
            while self.peek() == ",":
                self.take(",")
                idents.append(self.take_ident())
            self.take("in")
            env2 = dict(env)
            channels = []
            for ident in idents:
                n = Name(CHAN, ident)
                env2[ident] = n
                channels.append(n)
            return Restrict(tuple(channels), self.parse_process(env2))
        if t == "[" or t[0].isalpha() or t[0] == "#":
            prefix, env2 = self.parse_prefix(env)
            self.take(".")
            return Prefixed(prefix, self.parse_term(env2))
        self.fail("a process")

    def parse_prefix(self, env: dict[str, Name]) -> tuple[Prefix, dict[str, Name]]:
        if self.peek() == "[":
            self.take()
            a = self._resolve(self.take_ident(), env)
            self.take("=")
            b = self._resolve(self.take_ident(), env)
            self.take("]")
            inner, env2 = self.parse_prefix(env)
            return Match(a, b, inner), env2
        subject = self._resolve(self.take_ident(), env)
        t = self.peek()
        if t == "!":
            self.take()
            self.take("<")
            objs = [self._resolve(self.take_ident(), env)]
            while self.peek() == ",":
                self.take(",")
                objs.append(self._resolve(self.take_ident(), env))
            self.take(">")
            return Send(subject, tuple(objs)), env
        if t == "?":
            self.take()
            self.take("(")
            idents = [self.take_ident()]
            while self.peek() == ",":
                self.take(",")
                idents.append(self.take_ident())
            self.take(")")
            env2 = dict(env)
            binders = []
            for ident in idents:
                n = Name(VAR, ident)
                env2[ident] = n
                binders.append(n)
            if len(set(binders)) != len(binders):
                self.fail("pairwise distinct receive binders")
            return Receive(subject, tuple(binders)), env2
        self.fail("'!' or '?'")

    @staticmethod
    def _resolve(ident: str, env: dict[str, Name]) -> Name:
        return env.get(ident, Name(CHAN, ident))


def parse(text: str, mode: str = CPI, allow_reserved: bool = False) -> Process:
    """Parse surface text into a canonical process.

    In ``cpi`` mode the confidential-fragment validator runs after
    parsing: object/binder sort violations raise :class:`CpiViolation`
    and arity clashes raise :class:`SortError`.  In ``pi`` mode only the
    arity check runs.
    """
    if mode not in (CPI, PI):
        raise ValueError(f"unknown parse mode {mode!r}")
    lines = text.split("\n")
    eof_pos = (len(lines), len(lines[-1]) + 1)
    parser = _Parser(_tokenize(text, allow_reserved), eof_pos)
    p = parser.parse_process({})
    if parser.peek() is not None:
        parser.fail("end of input")
    p = canonicalize(p)
    report = validate_cpi(p)
    if report.sort_violations:
        v = report.sort_violations[0]
        raise SortError(f"{v.message} (at {v.path or 'top'})")
    if mode == CPI and report.kind_violations:
        v = report.kind_violations[0]
        raise CpiViolation(f"{v.message} (at {v.path or 'top'})")
    return p


# ---------------------------------------------------------------------------
# Pretty-printing


def _extends_right(p: Process) -> bool:
    """True if the printed form of ``p`` would swallow a following '| Q'."""
    match p:
        case Restrict() | Repl():
            return True
        case Prefixed(continuation=cont):
            return _extends_right(cont)
        case Par(right=r):
            return _extends_right(r)
        case _:
            return False


def _render_prefix(pre: Prefix) -> str:
    guards, core = prefix_chain(pre)
    out = "".join(f"[{a.ident}={b.ident}]" for a, b in guards)
    if isinstance(core, Send):
        return out + f"{core.subject.ident}!<{','.join(o.ident for o in core.objects)}>"
    return out + f"{core.subject.ident}?({','.join(b.ident for b in core.binders)})"


def render(p: Process) -> str:
    """Minimal-parentheses text for ``p``; reparsing (in ``pi`` mode, with
    reserved names allowed) yields an alpha-equivalent process."""
    match p:
        case Nil():
            return "0"
        case Prefixed(prefix=pre, continuation=cont):
            body = render(cont)
            if isinstance(cont, Par):
                body = f"({body})"
            return f"{_render_prefix(pre)}.{body}"
        case Par(left=l, right=r):
            ls = render(l)
            if _extends_right(l):
                ls = f"({ls})"
            rs = render(r)
            if isinstance(r, Par):
                rs = f"({rs})"
            return f"{ls} | {rs}"
        case Restrict(channels=ks, body=body):
            names = [k.ident for k in ks]
            while isinstance(body, Restrict):
                names.extend(k.ident for k in body.channels)
                body = body.body
            return f"new {','.join(names)} in {render(body)}"
        case Repl(body=body):
            return f"!{render(body)}"
    raise TypeError(p)
