"""Process terms for CCS and its broadcast/signal extensions.

This module defines the five calculus dialects, transition labels, the
process AST, relabellings, agent environments with guardedness checking,
and a parser / pretty-printer pair for the concrete syntax:

    0                   inaction
    a.P   'a.P  tau.P   action prefix (name, co-name, internal)
    b!.P  b?.P          broadcast send / receive prefix (ABC, ABCd)
    P + Q               choice
    P | Q               parallel composition
    P \\ {a,b}  P \\ a    restriction
    P[a->b, c->d]  P[f] relabelling (inline or named)
    P ^ s               signalling (CCSS dialects)
    A                   agent identifier (capitalised)

A bare action stands for the action prefixing 0, so "b! | (b? + c)"
abbreviates "b!.0 | (b?.0 + c.0)".  Prefixing binds tightest, then the
postfix operators (restriction, relabelling, signalling), then "|",
then "+".

All values are immutable and interned: structurally equal terms are the
same object, so equality and hashing are O(1).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping


class Calculus(Enum):
    """The five supported dialects."""

    CCS = "ccs"
    ABC = "abc"
    ABCD = "abcd"
    CCSS_PRED = "ccss"
    CCSS_ENC = "ccss-enc"

    @property
    def has_broadcast(self) -> bool:
        return self in (Calculus.ABC, Calculus.ABCD)

    @property
    def has_discards(self) -> bool:
        return self is Calculus.ABCD

    @property
    def has_signals(self) -> bool:
        return self in (Calculus.CCSS_PRED, Calculus.CCSS_ENC)

    @classmethod
    def from_name(cls, name: str) -> "Calculus":
        for c in cls:
            if c.value == name:
                return c
        raise ValueError(f"unknown dialect {name!r}; expected one of "
                         + ", ".join(c.value for c in cls))


class DialectError(ValueError):
    """A construct was used outside the dialect that supports it."""


class ParseError(ValueError):
    """Syntax error, with a position into the source text."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class GuardednessError(ValueError):
    """An agent body mentions an identifier outside any prefix."""

    def __init__(self, identifier: str, path: str):
        super().__init__(
            f"agent {identifier} is unguarded: occurrence at {path}")
        self.identifier = identifier
        self.path = path


# ---------------------------------------------------------------------------
# Labels

_INTERN: dict = {}


def _intern(obj):
    key = (type(obj).__name__,) + obj._key()
    found = _INTERN.get(key)
    if found is None:
        _INTERN[key] = obj
        return obj
    return found


@dataclass(frozen=True, eq=False)
class Label:
    """A transition label.

    Kinds: tau, name, coname (handshake), signal (a signal read),
    emission (the fact that a signal is being emitted), bcast/recv
    (broadcast send/receive) and discard (the fact that a broadcast
    cannot be received).  Emissions and discards are not actions: they
    label indicator transitions only.
    """

    kind: str
    name: str | None = None

    def _key(self):
        return (self.kind, self.name)

    @property
    def is_action(self) -> bool:
        return self.kind in ("tau", "name", "coname", "signal", "bcast", "recv")

    @property
    def is_receptive(self) -> bool:
        return self.kind == "recv"

    @property
    def is_indicatorish(self) -> bool:
        """True for emissions and discards (no state change)."""
        return self.kind in ("emission", "discard")

    def complement(self) -> "Label | None":
        if self.kind == "name":
            return mk_label("coname", self.name)
        if self.kind == "coname":
            return mk_label("name", self.name)
        if self.kind == "signal":
            return mk_label("emission", self.name)
        if self.kind == "emission":
            return mk_label("signal", self.name)
        return None

    def __repr__(self) -> str:
        return f"Label({self})"

    def __str__(self) -> str:
        if self.kind == "tau":
            return "tau"
        if self.kind in ("coname", "emission"):
            return f"'{self.name}"
        if self.kind == "bcast":
            return f"{self.name}!"
        if self.kind == "recv":
            return f"{self.name}?"
        if self.kind == "discard":
            return f"{self.name}:"
        return self.name or "?"


def mk_label(kind: str, name: str | None = None) -> Label:
    assert kind in ("tau", "name", "coname", "signal", "emission",
                    "bcast", "recv", "discard")
    assert (name is None) == (kind == "tau")
    return _intern(Label(kind, name))


TAU = mk_label("tau")


def parse_label(text: str, signals: frozenset = frozenset()) -> Label:
    """Parse a label as written in blocking sets and CLI arguments."""
    text = text.strip()
    if text in ("tau", "t"):
        return TAU
    m = re.fullmatch(r"'([a-z][A-Za-z0-9_]*)", text)
    if m:
        n = m.group(1)
        return mk_label("emission" if n in signals else "coname", n)
    m = re.fullmatch(r"([a-z][A-Za-z0-9_]*)([!?:])?", text)
    if not m:
        raise ValueError(f"cannot parse label {text!r}")
    n, suffix = m.group(1), m.group(2)
    if suffix == "!":
        return mk_label("bcast", n)
    if suffix == "?":
        return mk_label("recv", n)
    if suffix == ":":
        return mk_label("discard", n)
    return mk_label("signal" if n in signals else "name", n)


# ---------------------------------------------------------------------------
# Relabellings

@dataclass(frozen=True, eq=False)
class Relabelling:
    """A finite map on names, implicitly the identity elsewhere.

    Extends to labels by preserving the kind: co-names map to co-names,
    broadcast/signal suffixes are kept, and tau is fixed.
    """

    pairs: tuple  # sorted tuple of (source, image) with source != image

    def _key(self):
        return (self.pairs,)

    def apply_name(self, name: str) -> str:
        for src, img in self.pairs:
            if src == name:
                return img
        return name

    def apply(self, label: Label) -> Label:
        if label.kind == "tau":
            return label
        return mk_label(label.kind, self.apply_name(label.name))

    def preimage(self, labels: frozenset, universe: Iterable[Label]) -> frozenset:
        return frozenset(l for l in universe if self.apply(l) in labels)

    def __str__(self) -> str:
        inner = ", ".join(f"{a}->{b}" for a, b in self.pairs)
        return f"[{inner}]"


def mk_relabelling(mapping: Mapping[str, str]) -> Relabelling:
    pairs = tuple(sorted((a, b) for a, b in mapping.items() if a != b))
    return _intern(Relabelling(pairs))


# ---------------------------------------------------------------------------
# Process AST

@dataclass(frozen=True, eq=False)
class Process:
    def _key(self):
        raise NotImplementedError

    def __str__(self) -> str:
        return print_process(self)

    def __repr__(self) -> str:
        return f"<{print_process(self)}>"


@dataclass(frozen=True, eq=False)
class Nil(Process):
    def _key(self):
        return ()


@dataclass(frozen=True, eq=False)
class Prefix(Process):
    label: Label
    body: Process

    def _key(self):
        return (id(self.label), id(self.body))


@dataclass(frozen=True, eq=False)
class Sum(Process):
    left: Process
    right: Process

    def _key(self):
        return (id(self.left), id(self.right))


@dataclass(frozen=True, eq=False)
class Par(Process):
    left: Process
    right: Process

    def _key(self):
        return (id(self.left), id(self.right))


@dataclass(frozen=True, eq=False)
class Restrict(Process):
    body: Process
    names: tuple  # sorted tuple of restricted names

    def _key(self):
        return (id(self.body), self.names)


@dataclass(frozen=True, eq=False)
class Relabel(Process):
    body: Process
    f: Relabelling

    def _key(self):
        return (id(self.body), id(self.f))


@dataclass(frozen=True, eq=False)
class Agent(Process):
    name: str

    def _key(self):
        return (self.name,)


@dataclass(frozen=True, eq=False)
class Signalled(Process):
    body: Process
    signal: str

    def _key(self):
        return (id(self.body), self.signal)


NIL = _intern(Nil())


def mk_prefix(label: Label, body: Process) -> Process:
    if not label.is_action:
        raise DialectError(f"cannot prefix with {label}: not an action")
    return _intern(Prefix(label, body))


def mk_sum(left: Process, right: Process) -> Process:
    return _intern(Sum(left, right))


def mk_par(left: Process, right: Process) -> Process:
    return _intern(Par(left, right))


def mk_restrict(body: Process, names: Iterable[str]) -> Process:
    return _intern(Restrict(body, tuple(sorted(set(names)))))


def mk_relabel(body: Process, f: Relabelling) -> Process:
    return _intern(Relabel(body, f))


def mk_agent(name: str) -> Process:
    return _intern(Agent(name))


def mk_signalled(body: Process, signal: str) -> Process:
    return _intern(Signalled(body, signal))


def subterms(p: Process) -> Iterator[Process]:
    """All subterm occurrences, without unfolding agent identifiers."""
    yield p
    if isinstance(p, Prefix):
        yield from subterms(p.body)
    elif isinstance(p, (Sum, Par)):
        yield from subterms(p.left)
        yield from subterms(p.right)
    elif isinstance(p, (Restrict, Relabel, Signalled)):
        yield from subterms(p.body)


# ---------------------------------------------------------------------------
# Agent environments

class AgentEnv:
    """A finite set of defining equations A := P plus named relabellings."""

    def __init__(self,
                 defs: Mapping[str, Process] | None = None,
                 relabellings: Mapping[str, Relabelling] | None = None):
        self.defs: dict[str, Process] = dict(defs or {})
        self.relabellings: dict[str, Relabelling] = dict(relabellings or {})

    def body(self, name: str) -> Process:
        try:
            return self.defs[name]
        except KeyError:
            raise DialectError(f"agent {name} is not defined") from None

    def check_closed(self, *roots: Process) -> None:
        """Every referenced identifier must have a defining equation."""
        for p in list(roots) + list(self.defs.values()):
            for q in subterms(p):
                if isinstance(q, Agent) and q.name not in self.defs:
                    raise DialectError(f"agent {q.name} is not defined")

    def check_guarded(self) -> None:
        """Raise GuardednessError unless every body is guarded.

        A body is guarded when each agent identifier in it occurs inside
        the scope of some action prefix.
        """
        for name, body in sorted(self.defs.items()):
            path = _unguarded_occurrence(body, "")
            if path is not None:
                raise GuardednessError(name, path or "top")

    def signal_names(self, *roots: Process) -> frozenset:
        out = set()
        for p in list(roots) + list(self.defs.values()):
            for q in subterms(p):
                if isinstance(q, Signalled):
                    out.add(q.signal)
        return frozenset(out)

    def broadcast_names(self, *roots: Process) -> frozenset:
        """Broadcast names in use, closed under declared relabellings."""
        out = set()
        for p in list(roots) + list(self.defs.values()):
            for q in subterms(p):
                if isinstance(q, Prefix) and q.label.kind in ("bcast", "recv"):
                    out.add(q.label.name)
        fs = [f for f in self.relabellings.values()]
        for p in list(roots) + list(self.defs.values()):
            for q in subterms(p):
                if isinstance(q, Relabel):
                    fs.append(q.f)
        changed = True
        while changed:
            changed = False
            for f in fs:
                for b in list(out):
                    img = f.apply_name(b)
                    if img not in out:
                        out.add(img)
                        changed = True
        return frozenset(out)


def _unguarded_occurrence(p: Process, path: str) -> str | None:
    """Path to an agent identifier not under a prefix, or None."""
    if isinstance(p, Agent):
        return path or "top"
    if isinstance(p, Prefix):
        return None  # everything below is guarded
    if isinstance(p, Sum):
        return (_unguarded_occurrence(p.left, path + "+L.")
                or _unguarded_occurrence(p.right, path + "+R."))
    if isinstance(p, Par):
        return (_unguarded_occurrence(p.left, path + "|L.")
                or _unguarded_occurrence(p.right, path + "|R."))
    if isinstance(p, Restrict):
        return _unguarded_occurrence(p.body, path + "\\.")
    if isinstance(p, Relabel):
        return _unguarded_occurrence(p.body, path + "[].")
    if isinstance(p, Signalled):
        return _unguarded_occurrence(p.body, path + "^.")
    return None


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(r"""
      (?P<ws>\s+)
    | (?P<arrow>->)
    | (?P<defs>:=)
    | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
    | (?P<op>[0-9.'+|\\{}\[\],()!?^])
""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, calc: Calculus, env: AgentEnv | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.calc = calc
        self.env = env or AgentEnv()

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.next()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def fail(self, message: str):
        raise ParseError(message, self.peek()[2])

    # sum > par > postfix > prefix/atom, loosest first
    def parse_sum(self) -> Process:
        p = self.parse_par()
        while self.peek()[1] == "+":
            self.next()
            p = mk_sum(p, self.parse_par())
        return p

    def parse_par(self) -> Process:
        p = self.parse_postfix()
        while self.peek()[1] == "|":
            self.next()
            p = mk_par(p, self.parse_postfix())
        return p

    def parse_postfix(self) -> Process:
        p = self.parse_prefix()
        while True:
            kind, val, pos = self.peek()
            if val == "\\":
                self.next()
                p = mk_restrict(p, self.parse_restriction_set())
            elif val == "[":
                self.next()
                p = mk_relabel(p, self.parse_relabelling())
            elif val == "^":
                self.next()
                if not self.calc.has_signals:
                    raise DialectError(
                        f"signalling ^ is only available in CCSS dialects, "
                        f"not {self.calc.value} (at position {pos})")
                p = mk_signalled(p, self.parse_lname())
            else:
                return p

    def parse_restriction_set(self) -> list[str]:
        if self.peek()[1] == "{":
            self.next()
            names = [self.parse_lname()]
            while self.peek()[1] == ",":
                self.next()
                names.append(self.parse_lname())
            self.expect("}")
            return names
        return [self.parse_lname()]

    def parse_relabelling(self) -> Relabelling:
        kind, val, pos = self.peek()
        if val == "]":  # identity relabelling
            self.next()
            return mk_relabelling({})
        if kind == "ident" and self.tokens[self.i + 1][1] == "]":
            # named relabelling, declared in the definitions file
            self.next()
            self.expect("]")
            f = self.env.relabellings.get(val)
            if f is None:
                raise ParseError(f"relabelling {val!r} is not declared", pos)
            return f
        mapping = {}
        while True:
            src = self.parse_lname()
            self.expect("->")
            mapping[src] = self.parse_lname()
            if self.peek()[1] != ",":
                break
            self.next()
        self.expect("]")
        return mk_relabelling(mapping)

    def parse_lname(self) -> str:
        kind, val, pos = self.next()
        if kind != "ident" or not val[0].islower():
            raise ParseError(f"expected a lowercase name, found {val!r}", pos)
        return val

    def parse_prefix(self) -> Process:
        kind, val, pos = self.peek()
        if val == "(":
            self.next()
            p = self.parse_sum()
            self.expect(")")
            return p
        if val == "0":
            self.next()
            return NIL
        if val == "'" or (kind == "ident" and val[0].islower()):
            label = self.parse_action()
            if self.peek()[1] == ".":
                self.next()
                return mk_prefix(label, self.parse_prefix())
            return mk_prefix(label, NIL)
        if kind == "ident" and val[0].isupper():
            self.next()
            return mk_agent(val)
        self.fail(f"expected a process, found {val or 'end of input'!r}")

    def parse_action(self) -> Label:
        kind, val, pos = self.next()
        if val == "'":
            name = self.parse_lname()
            return mk_label("coname", name)
        if kind != "ident":
            raise ParseError(f"expected an action, found {val!r}", pos)
        if val == "tau":
            return TAU
        nxt = self.peek()[1]
        if nxt in ("!", "?"):
            self.next()
            if not self.calc.has_broadcast:
                raise DialectError(
                    f"broadcast {val}{nxt} is only available in ABC/ABCd, "
                    f"not {self.calc.value} (at position {pos})")
            return mk_label("bcast" if nxt == "!" else "recv", val)
        return mk_label("name", val)


def _resolve_signals(p: Process, signals: frozenset) -> Process:
    """Retag plain-name labels whose name is a declared signal."""
    if isinstance(p, Prefix):
        body = _resolve_signals(p.body, signals)
        label = p.label
        if label.kind == "name" and label.name in signals:
            label = mk_label("signal", label.name)
        elif label.kind == "coname" and label.name in signals:
            raise DialectError(
                f"'{label.name} is a signal emission and cannot be a prefix")
        return mk_prefix(label, body)
    if isinstance(p, Sum):
        return mk_sum(_resolve_signals(p.left, signals),
                      _resolve_signals(p.right, signals))
    if isinstance(p, Par):
        return mk_par(_resolve_signals(p.left, signals),
                      _resolve_signals(p.right, signals))
    if isinstance(p, Restrict):
        return mk_restrict(_resolve_signals(p.body, signals), p.names)
    if isinstance(p, Relabel):
        return mk_relabel(_resolve_signals(p.body, signals), p.f)
    if isinstance(p, Signalled):
        return mk_signalled(_resolve_signals(p.body, signals), p.signal)
    return p


def _validate_dialect(p: Process, calc: Calculus, broadcast: frozenset) -> None:
    for q in subterms(p):
        if isinstance(q, Signalled) and not calc.has_signals:
            raise DialectError(f"signalling only in CCSS dialects: {q}")
        if isinstance(q, Prefix) and q.label.kind in ("bcast", "recv") \
                and not calc.has_broadcast:
            raise DialectError(f"broadcast only in ABC/ABCd: {q}")
        if isinstance(q, Restrict):
            for n in q.names:
                if n in broadcast:
                    raise DialectError(
                        f"broadcast name {n} cannot be restricted")


def parse_process(text: str, calc: Calculus, env: AgentEnv | None = None,
                  signals: frozenset | None = None) -> Process:
    """Parse a process term in the given dialect.

    Signal reads are recognised from the signal names in use: a name is
    a signal iff it appears as a ^-operand somewhere in the term or in
    the agent environment, or is listed in `signals` (needed when a
    subterm is parsed outside its enclosing system).
    """
    env = env or AgentEnv()
    parser = _Parser(text, calc, env)
    p = parser.parse_sum()
    kind, val, pos = parser.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {val!r}", pos)
    if calc.has_signals:
        known = env.signal_names(p) | (signals or frozenset())
        p = _resolve_signals(p, known)
    _validate_dialect(p, calc, env.broadcast_names(p))
    return p


_DEF_LINE = re.compile(r"^\s*([A-Za-z][A-Za-z0-9_]*)\s*:=\s*(.*?)\s*$")


def parse_definitions(text: str, calc: Calculus) -> AgentEnv:
    """Parse an agent-definition file: one `A := term` per line.

    `#` starts a comment.  Lines `f := [a->b, ...]` with a lowercase
    left-hand side declare named relabellings.
    """
    env = AgentEnv()
    raw_defs: list[tuple[str, str]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        m = _DEF_LINE.match(line)
        if not m:
            raise ParseError(f"cannot parse definition line {lineno}: {line!r}", 0)
        name, rhs = m.group(1), m.group(2)
        if name[0].islower():
            parser = _Parser(rhs, calc, env)
            parser.expect("[")
            env.relabellings[name] = parser.parse_relabelling()
        else:
            raw_defs.append((name, rhs))
    for name, rhs in raw_defs:
        parser = _Parser(rhs, calc, env)
        body = parser.parse_sum()
        if parser.peek()[0] != "eof":
            raise ParseError(f"trailing input in definition of {name}",
                             parser.peek()[2])
        env.defs[name] = body
    if calc.has_signals:
        signals = env.signal_names()
        for name in list(env.defs):
            env.defs[name] = _resolve_signals(env.defs[name], signals)
    env.check_closed()
    broadcast = env.broadcast_names()
    for body in env.defs.values():
        _validate_dialect(body, calc, broadcast)
    return env


# ---------------------------------------------------------------------------
# Printing

_PREC_SUM, _PREC_PAR, _PREC_POST, _PREC_PREFIX, _PREC_ATOM = 0, 1, 2, 3, 4


def print_process(p: Process) -> str:
    return _print(p, _PREC_SUM)


def _paren(s: str, prec: int, at: int) -> str:
    return f"({s})" if prec < at else s


def _print(p: Process, at: int) -> str:
    if isinstance(p, Nil):
        return "0"
    if isinstance(p, Agent):
        return p.name
    if isinstance(p, Prefix):
        if isinstance(p.body, Nil):
            return str(p.label)
        return _paren(f"{p.label}.{_print(p.body, _PREC_PREFIX)}",
                      _PREC_PREFIX, at)
    if isinstance(p, Sum):
        s = f"{_print(p.left, _PREC_SUM)} + {_print(p.right, _PREC_PAR)}"
        return _paren(s, _PREC_SUM, at)
    if isinstance(p, Par):
        s = f"{_print(p.left, _PREC_PAR)} | {_print(p.right, _PREC_POST)}"
        return _paren(s, _PREC_PAR, at)
    if isinstance(p, Restrict):
        inner = ",".join(p.names)
        return _paren(f"{_print(p.body, _PREC_POST)} \\ {{{inner}}}",
                      _PREC_POST, at)
    if isinstance(p, Relabel):
        return _paren(f"{_print(p.body, _PREC_POST)}{p.f}", _PREC_POST, at)
    if isinstance(p, Signalled):
        return _paren(f"{_print(p.body, _PREC_POST)} ^ {p.signal}",
                      _PREC_POST, at)
    raise TypeError(f"not a process: {p!r}")
