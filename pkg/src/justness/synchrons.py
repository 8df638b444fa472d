"""Synchrons: the particles out of which transitions are composed.

A synchron records one root-to-leaf path through a derivation tree as a
string of operator arguments ending in a leaf (an action prefix, a
signal emission, or a broadcast discard).  A handshake is the
synchronisation of two synchrons, a broadcast of arbitrarily many.

Arguments are *static* (parallel composition, restriction, relabelling:
they survive transitions of their operands) or *dynamic* (choice,
recursion unfolding, signalling: they are consumed).  The relations
defined here - possible successor, direct concurrency, concurrency, and
the "after" reduction - all work on the argument strings, and lift to
three notions of component: dynamic, static and abstract static.
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import Label, Process, Relabelling, _intern, print_process
from .semantics import Derivation, child_derivations, in_tr_sbullet


class NotSBullet(TypeError):
    """Necessary synchrons are undefined for receives and discards."""


class PreconditionViolated(ValueError):
    pass


# ---------------------------------------------------------------------------
# Arguments, leaves, synchrons

SUM_L, SUM_R, PAR_L, PAR_R = "sum_L", "sum_R", "par_L", "par_R"
RESTRICT, RELABEL, REC, SIG = "restrict", "relabel", "rec", "sig"
SQ = "sq"  # reserved: a co-location marker some extensions use; never produced

_STATIC_KINDS = frozenset((PAR_L, PAR_R, RESTRICT, RELABEL))


@dataclass(frozen=True, eq=False)
class Arg:
    kind: str
    payload: object = None  # restriction names / relabelling / agent / signal

    def _key(self):
        return (self.kind, id(self.payload) if isinstance(self.payload, Relabelling)
                else self.payload)

    @property
    def is_static(self) -> bool:
        return self.kind in _STATIC_KINDS

    @property
    def is_par(self) -> bool:
        return self.kind in (PAR_L, PAR_R)

    def __str__(self) -> str:
        if self.kind == SUM_L:
            return "+_L"
        if self.kind == SUM_R:
            return "+_R"
        if self.kind == PAR_L:
            return "|_L"
        if self.kind == PAR_R:
            return "|_R"
        if self.kind == RESTRICT:
            names = self.payload
            return f"\\{names[0]}" if len(names) == 1 else "\\{" + ",".join(names) + "}"
        if self.kind == RELABEL:
            return str(self.payload)
        if self.kind == REC:
            return f"{self.payload}:"
        if self.kind == SIG:
            return f"^{self.payload}"
        return self.kind

    def __repr__(self) -> str:
        return f"Arg({self})"


def mk_arg(kind: str, payload: object = None) -> Arg:
    return _intern(Arg(kind, payload))


@dataclass(frozen=True, eq=False)
class Leaf:
    kind: str  # act | sig | discard
    label: Label | None
    process: Process | None
    name: str | None  # signal or broadcast name

    def _key(self):
        return (self.kind, id(self.label), id(self.process), self.name)

    def __str__(self) -> str:
        if self.kind == "act":
            return f"({self.label}^{print_process(self.process)})"
        if self.kind == "sig":
            return f"({print_process(self.process)} ^{self.name})"
        return f"({self.name}:)"


def act_leaf_syn(label: Label, process: Process) -> Leaf:
    return _intern(Leaf("act", label, process, None))


def sig_leaf_syn(process: Process, signal: str) -> Leaf:
    return _intern(Leaf("sig", None, process, signal))


def discard_leaf_syn(b: str) -> Leaf:
    return _intern(Leaf("discard", None, None, b))


@dataclass(frozen=True, eq=False)
class Synchron:
    args: tuple  # tuple of Arg
    leaf: Leaf

    def _key(self):
        return (tuple(id(a) for a in self.args), id(self.leaf))

    def __str__(self) -> str:
        parts = [str(a) for a in self.args] + [str(self.leaf)]
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Synchron({self})"

    @property
    def is_active(self) -> bool:
        return self.leaf.kind == "act"


def mk_synchron(args, leaf: Leaf) -> Synchron:
    return _intern(Synchron(tuple(args), leaf))


def extend(arg: Arg, synchrons) -> frozenset:
    return frozenset(mk_synchron((arg,) + s.args, s.leaf) for s in synchrons)


def static_args(args) -> tuple:
    return tuple(a for a in args if a.is_static)


def static_part(s: Synchron) -> Synchron:
    return mk_synchron(static_args(s.args), s.leaf)


# ---------------------------------------------------------------------------
# Synchrons of processes and derivations

def proc_synchrons(system, p: Process) -> frozenset:
    """The synchron set of a process; finite for guarded systems."""
    memo = system._proc_syn
    found = memo.get(p)
    if found is None:
        found = _proc_syn(system, p)
        memo[p] = found
    return found


def _proc_syn(system, p: Process) -> frozenset:
    from .terms import Agent, Nil, Par, Prefix, Relabel, Restrict, Signalled, Sum
    discards = system.calc.has_discards
    if isinstance(p, Nil):
        if discards:
            return frozenset(mk_synchron((), discard_leaf_syn(b))
                             for b in system.broadcast_universe)
        return frozenset()
    if isinstance(p, Prefix):
        out = {mk_synchron((), act_leaf_syn(p.label, p.body))}
        if discards:
            for b in system.broadcast_universe:
                if p.label.kind != "recv" or p.label.name != b:
                    out.add(mk_synchron((), discard_leaf_syn(b)))
        return frozenset(out)
    if isinstance(p, Sum):
        return (extend(mk_arg(SUM_L), proc_synchrons(system, p.left))
                | extend(mk_arg(SUM_R), proc_synchrons(system, p.right)))
    if isinstance(p, Par):
        return (extend(mk_arg(PAR_L), proc_synchrons(system, p.left))
                | extend(mk_arg(PAR_R), proc_synchrons(system, p.right)))
    if isinstance(p, Restrict):
        return extend(mk_arg(RESTRICT, p.names), proc_synchrons(system, p.body))
    if isinstance(p, Relabel):
        return extend(mk_arg(RELABEL, p.f), proc_synchrons(system, p.body))
    if isinstance(p, Agent):
        return extend(mk_arg(REC, p.name),
                      proc_synchrons(system, system.env.body(p.name)))
    if isinstance(p, Signalled):
        return (frozenset((mk_synchron((), sig_leaf_syn(p.body, p.signal)),))
                | extend(mk_arg(SIG, p.signal), proc_synchrons(system, p.body)))
    raise TypeError(f"not a process: {p!r}")


_DERIV_SYN: dict = {}


def deriv_synchrons(d: Derivation) -> frozenset:
    found = _DERIV_SYN.get(d)
    if found is None:
        found = _deriv_syn(d)
        _DERIV_SYN[d] = found
    return found


def _deriv_syn(d: Derivation) -> frozenset:
    k = d.kind
    if k == "act":
        return frozenset((mk_synchron((), act_leaf_syn(d.label, d.parts[0])),))
    if k == "sig":
        return frozenset((mk_synchron((), sig_leaf_syn(d.parts[0], d.extra)),))
    if k in ("discard0", "discard"):
        return frozenset((mk_synchron((), discard_leaf_syn(d.extra)),))
    if k == "sum_l":
        return extend(mk_arg(SUM_L), deriv_synchrons(d.parts[0]))
    if k == "sum_r":
        return extend(mk_arg(SUM_R), deriv_synchrons(d.parts[1]))
    if k == "sum_both":
        return (extend(mk_arg(SUM_L), deriv_synchrons(d.parts[0]))
                | extend(mk_arg(SUM_R), deriv_synchrons(d.parts[1])))
    if k == "par_l":
        return extend(mk_arg(PAR_L), deriv_synchrons(d.parts[0]))
    if k == "par_r":
        return extend(mk_arg(PAR_R), deriv_synchrons(d.parts[1]))
    if k == "par_both":
        return (extend(mk_arg(PAR_L), deriv_synchrons(d.parts[0]))
                | extend(mk_arg(PAR_R), deriv_synchrons(d.parts[1])))
    if k == "restrict":
        return extend(mk_arg(RESTRICT, d.extra), deriv_synchrons(d.parts[0]))
    if k == "relabel":
        return extend(mk_arg(RELABEL, d.extra), deriv_synchrons(d.parts[0]))
    if k == "rec":
        return extend(mk_arg(REC, d.extra), deriv_synchrons(d.parts[0]))
    if k == "sig_skip":
        return extend(mk_arg(SIG, d.extra), deriv_synchrons(d.parts[0]))
    raise TypeError(k)


def active_synchrons(d: Derivation) -> frozenset:
    return frozenset(s for s in deriv_synchrons(d) if s.is_active)


_NEC: dict = {}


def necessary_synchrons(d: Derivation) -> frozenset:
    """The synchrons a derivation needs in order to occur.

    For a broadcast send this is the sending synchron alone: listeners
    cannot hold a broadcast back.  For every other derivation in the
    extended domain it is the full synchron set.  Undefined for
    receives and discards.
    """
    found = _NEC.get(d)
    if found is not None:
        return found
    if not in_tr_sbullet(d):
        raise NotSBullet(
            f"necessary synchrons are undefined for {d!r} (class III/IV)")
    if d.label.kind == "bcast":
        senders = frozenset(s for s in deriv_synchrons(d)
                            if s.leaf.kind == "act" and s.leaf.label.kind == "bcast")
        assert len(senders) == 1
        out = senders
    else:
        out = deriv_synchrons(d)
    _NEC[d] = out
    return out


# ---------------------------------------------------------------------------
# Successor and concurrency relations on synchrons

def syn_leadsto(a: Synchron, b: Synchron) -> bool:
    """Possible-successor: b is a after resolving the dynamic context
    above one of its parallel arguments."""
    if a is b:
        return True
    if a.leaf is not b.leaf:
        return False
    for i, arg in enumerate(a.args):
        if arg.is_par and b.args == static_args(a.args[:i]) + a.args[i:]:
            return True
    return False


def _split_positions(args: tuple):
    for i, arg in enumerate(args):
        if arg.is_par:
            yield i, arg


def syn_directly_concurrent(a: Synchron, b: Synchron) -> bool:
    """The two argument strings part ways at one parallel composition."""
    return _seq_directly_concurrent(a.args, b.args)


def _seq_directly_concurrent(xs: tuple, ys: tuple) -> bool:
    n = min(len(xs), len(ys))
    for i in range(n):
        if xs[i] is not ys[i]:
            return (xs[i].is_par and ys[i].is_par)
    return False


def syn_concurrent(a: Synchron, b: Synchron) -> bool:
    """Concurrency: a and b are successors of directly concurrent
    synchrons.

    Decided by searching over split positions: a split prefix pair
    (rho, pi) on opposite sides witnesses concurrency iff rho == pi, or
    one equals the static reduction of the other (the shared ancestor
    then being the longer of the two).
    """
    return _seq_concurrent(a.args, b.args)


def _seq_concurrent(xs: tuple, ys: tuple) -> bool:
    for i, ai in _split_positions(xs):
        rho = xs[:i]
        rho_static = static_args(rho)
        for j, bj in _split_positions(ys):
            if ai.kind == bj.kind:
                continue
            pi = ys[:j]
            if rho == pi or static_args(pi) == rho or rho_static == pi:
                return True
    return False


def syn_after(a: Synchron, b: Synchron) -> Synchron:
    """Reduce a by the choices resolved when b occurs (defined for
    directly concurrent synchrons)."""
    if not syn_directly_concurrent(a, b):
        raise PreconditionViolated(f"{a} is not directly concurrent with {b}")
    cp = _common_prefix_len(a.args, b.args)
    return mk_synchron(static_args(a.args[:cp]) + a.args[cp:], a.leaf)


def _common_prefix_len(xs: tuple, ys: tuple) -> int:
    n = min(len(xs), len(ys))
    for i in range(n):
        if xs[i] is not ys[i]:
            return i
    return n


def syn_after_deriv(a: Synchron, step: Derivation) -> Synchron:
    """a after the derivation `step` has occurred.

    Identity for indicator transitions.  Otherwise a must be directly
    concurrent with every active synchron of the step; the reduction is
    taken against the active synchron sharing the longest prefix.
    """
    if not step.label.is_action:
        return a
    actives = active_synchrons(step)
    closest, best = None, -1
    for u in actives:
        if not syn_directly_concurrent(a, u):
            raise PreconditionViolated(
                f"{a} is not directly concurrent with active synchron {u}")
        cp = _common_prefix_len(a.args, u.args)
        if cp > best:
            closest, best = u, cp
    assert closest is not None
    return syn_after(a, closest)


# ---------------------------------------------------------------------------
# Components

def dynamic_component(s: Synchron) -> tuple:
    """The prefix up to and including the last static argument."""
    last = -1
    for i, a in enumerate(s.args):
        if a.is_static:
            last = i
    return s.args[:last + 1]


def static_component(s: Synchron) -> tuple:
    """The maximal all-static prefix."""
    for i, a in enumerate(s.args):
        if not a.is_static:
            return s.args[:i]
    return s.args


def abstract_component(s: Synchron) -> tuple:
    """The static component with restriction/relabelling erased."""
    return tuple(a for a in static_component(s) if a.is_par)


def comp_leadsto(g: tuple, h: tuple) -> bool:
    if g == h:
        return True
    for i, arg in enumerate(g):
        if arg.is_par and h == static_args(g[:i]) + g[i:]:
            return True
    return False


def comp_directly_concurrent(g: tuple, h: tuple) -> bool:
    return _seq_directly_concurrent(g, h)


def comp_concurrent(g: tuple, h: tuple) -> bool:
    return _seq_concurrent(g, h)


def comp_str(g: tuple) -> str:
    return " ".join(str(a) for a in g) if g else "eps"


def synchron_to_json(s: Synchron) -> dict:
    """Arg-tag array plus leaf, for dumps."""
    leaf: dict = {"kind": s.leaf.kind}
    if s.leaf.kind == "act":
        leaf["label"] = str(s.leaf.label)
        leaf["process"] = print_process(s.leaf.process)
    elif s.leaf.kind == "sig":
        leaf["process"] = print_process(s.leaf.process)
        leaf["signal"] = s.leaf.name
    else:
        leaf["broadcast"] = s.leaf.name
    return {"args": [str(a) for a in s.args], "leaf": leaf,
            "pretty": str(s)}


def comp_sets(d: Derivation) -> dict:
    """All component images of a derivation's synchron sets.

    COMP/NC/AC are under the dynamic component map, comp/npc/afc under
    the static one, npc'/afc' under the abstract one.  NC, npc and npc'
    require the derivation to lie in the extended domain.
    """
    syn = deriv_synchrons(d)
    act = active_synchrons(d)
    out = {
        "COMP": frozenset(dynamic_component(s) for s in syn),
        "AC": frozenset(dynamic_component(s) for s in act),
        "comp": frozenset(static_component(s) for s in syn),
        "afc": frozenset(static_component(s) for s in act),
        "afc_prime": frozenset(abstract_component(s) for s in act),
    }
    if in_tr_sbullet(d):
        nec = necessary_synchrons(d)
        out["NC"] = frozenset(dynamic_component(s) for s in nec)
        out["npc"] = frozenset(static_component(s) for s in nec)
        out["npc_prime"] = frozenset(abstract_component(s) for s in nec)
    return out
