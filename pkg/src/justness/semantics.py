"""Operational semantics: derivation enumeration and transition systems.

A transition here is a *derivation*: the full proof tree justifying
`P --l--> Q` (or a signal-emission fact) under the rules of the chosen
dialect.  Distinct proofs of the same triple are distinct derivations;
this distinction is what the concurrency relations live on.

Derivations fall into five classes:

    I    signal-emission facts (CCSS with emission predicates)
    II   signal-emission self-loop transitions (CCSS encoded)
    III  broadcast-discard self-loops (ABCd)
    IV   broadcast receives (ABC, ABCd)
    V    everything else

Classes IV and V model action occurrences (``Tr°``); class V is also the
non-blockable core (``Tr•``); classes I, II and V together form the
domain of the extended concurrency relation (``Tr^s•``).  Classes I-III
reveal facts about a state without changing it, and never appear on
paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .terms import (
    TAU, Agent, AgentEnv, Calculus, DialectError, Label, Nil, Par, Prefix,
    Process, Relabel, Relabelling, Restrict, Signalled, Sum, _intern,
    mk_agent, mk_label, mk_par, mk_prefix, mk_relabel, mk_relabelling,
    mk_restrict, mk_signalled, mk_sum, parse_label, parse_process,
    print_process,
)


class BoundExceeded(RuntimeError):
    def __init__(self, bound: int):
        super().__init__(f"state bound {bound} exceeded")
        self.bound = bound


# ---------------------------------------------------------------------------
# Derivations

@dataclass(frozen=True, eq=False)
class Derivation:
    """A named SOS proof tree with its conclusion cached.

    `kind` is one of act, sig, discard0, discard, sum_l, sum_r,
    sum_both, par_l, par_r, par_both, restrict, relabel, rec, sig_skip.
    `parts` holds the child derivations and/or side processes in rule
    order; `extra` holds scalar rule data (restriction set, relabelling,
    agent name, signal name, discard name).
    """

    kind: str
    parts: tuple
    extra: object
    source: Process
    target: Process
    label: Label

    def _key(self):
        extra = self.extra
        if isinstance(extra, Relabelling):
            extra = id(extra)
        return (self.kind, tuple(id(x) for x in self.parts), extra)

    def __str__(self) -> str:
        return deriv_name(self)

    def __repr__(self) -> str:
        return f"<deriv {deriv_name(self)} : {self.source} --{self.label}--> {self.target}>"


def _mk(kind, parts, extra, source, target, label) -> Derivation:
    return _intern(Derivation(kind, tuple(parts), extra, source, target, label))


def act_leaf(label: Label, body: Process) -> Derivation:
    return _mk("act", (body,), label, mk_prefix(label, body), body, label)


def sig_leaf(body: Process, signal: str) -> Derivation:
    src = mk_signalled(body, signal)
    return _mk("sig", (body,), signal, src, src, mk_label("emission", signal))


def discard_leaf_nil(b: str, nil: Process) -> Derivation:
    return _mk("discard0", (nil,), b, nil, nil, mk_label("discard", b))


def discard_leaf_prefix(b: str, prefix: Process) -> Derivation:
    assert isinstance(prefix, Prefix)
    assert prefix.label != mk_label("recv", b)
    return _mk("discard", (prefix,), b, prefix, prefix, mk_label("discard", b))


def sum_left(child: Derivation, right: Process) -> Derivation:
    src = mk_sum(child.source, right)
    tgt = src if child.label.is_indicatorish else child.target
    return _mk("sum_l", (child, right), None, src, tgt, child.label)


def sum_right(left: Process, child: Derivation) -> Derivation:
    src = mk_sum(left, child.source)
    tgt = src if child.label.is_indicatorish else child.target
    return _mk("sum_r", (left, child), None, src, tgt, child.label)


def sum_both(l: Derivation, r: Derivation) -> Derivation:
    assert l.label.kind == "discard" and l.label == r.label
    src = mk_sum(l.source, r.source)
    return _mk("sum_both", (l, r), None, src, src, l.label)


def par_left(child: Derivation, right: Process) -> Derivation:
    src = mk_par(child.source, right)
    return _mk("par_l", (child, right), None, src,
               mk_par(child.target, right), child.label)


def par_right(left: Process, child: Derivation) -> Derivation:
    src = mk_par(left, child.source)
    return _mk("par_r", (left, child), None, src,
               mk_par(left, child.target), child.label)


_BCAST_COMPOSE = {
    ("bcast", "recv"): "bcast", ("recv", "bcast"): "bcast",
    ("recv", "recv"): "recv",
    ("bcast", "discard"): "bcast", ("discard", "bcast"): "bcast",
    ("recv", "discard"): "recv", ("discard", "recv"): "recv",
    ("discard", "discard"): "discard",
}


def compose_labels(l: Label, r: Label) -> Label | None:
    """The label of a synchronisation, or None if the pair cannot sync."""
    if l.complement() is r:
        return TAU
    if l.kind in ("bcast", "recv", "discard") and l.name == r.name:
        kind = _BCAST_COMPOSE.get((l.kind, r.kind))
        if kind is not None:
            return mk_label(kind, l.name)
    return None


def par_both(l: Derivation, r: Derivation) -> Derivation:
    label = compose_labels(l.label, r.label)
    assert label is not None, f"cannot compose {l.label} with {r.label}"
    return _mk("par_both", (l, r), None, mk_par(l.source, r.source),
               mk_par(l.target, r.target), label)


def restrict_deriv(child: Derivation, names: tuple) -> Derivation:
    return _mk("restrict", (child,), names, mk_restrict(child.source, names),
               mk_restrict(child.target, names), child.label)


def relabel_deriv(child: Derivation, f: Relabelling) -> Derivation:
    return _mk("relabel", (child,), f, mk_relabel(child.source, f),
               mk_relabel(child.target, f), f.apply(child.label))


def rec_deriv(name: str, child: Derivation) -> Derivation:
    src = mk_agent(name)
    tgt = src if child.label.is_indicatorish else child.target
    return _mk("rec", (child,), name, src, tgt, child.label)


def sig_skip(child: Derivation, signal: str) -> Derivation:
    src = mk_signalled(child.source, signal)
    if child.label.kind == "emission":
        tgt = mk_signalled(child.target, signal)
    else:
        tgt = child.target
    return _mk("sig_skip", (child,), signal, src, tgt, child.label)


def deriv_name(d: Derivation) -> str:
    """Compact display name mirroring the proof-tree structure."""
    if d.kind == "act":
        return f"({d.label}^{print_process(d.parts[0])})"
    if d.kind == "sig":
        return f"({print_process(d.parts[0])}^{d.extra})"
    if d.kind == "discard0":
        return f"({d.extra}:0)"
    if d.kind == "discard":
        return f"({d.extra}:{print_process(d.parts[0])})"
    if d.kind == "sum_l":
        return f"({deriv_name(d.parts[0])} + {print_process(d.parts[1])})"
    if d.kind == "sum_r":
        return f"({print_process(d.parts[0])} + {deriv_name(d.parts[1])})"
    if d.kind == "sum_both":
        return f"({deriv_name(d.parts[0])} + {deriv_name(d.parts[1])})"
    if d.kind == "par_l":
        return f"({deriv_name(d.parts[0])} | {print_process(d.parts[1])})"
    if d.kind == "par_r":
        return f"({print_process(d.parts[0])} | {deriv_name(d.parts[1])})"
    if d.kind == "par_both":
        return f"({deriv_name(d.parts[0])} | {deriv_name(d.parts[1])})"
    if d.kind == "restrict":
        return f"{deriv_name(d.parts[0])}\\{{{','.join(d.extra)}}}"
    if d.kind == "relabel":
        return f"{deriv_name(d.parts[0])}{d.extra}"
    if d.kind == "rec":
        return f"{d.extra}:{deriv_name(d.parts[0])}"
    if d.kind == "sig_skip":
        return f"{deriv_name(d.parts[0])}^{d.extra}"
    raise TypeError(d.kind)


def child_derivations(d: Derivation) -> tuple:
    return tuple(x for x in d.parts if isinstance(x, Derivation))


# ---------------------------------------------------------------------------
# Classification

CLASS_I, CLASS_II, CLASS_III, CLASS_IV, CLASS_V = "I", "II", "III", "IV", "V"


@dataclass(frozen=True)
class DerivClass:
    cls: str
    in_tr_circ: bool     # models an action occurrence; may appear on paths
    in_tr_bullet: bool   # non-blockable: quantified over in justness
    in_tr_sbullet: bool  # domain of the extended concurrency relation


def classify(d: Derivation, calc: Calculus) -> DerivClass:
    k = d.label.kind
    if k == "emission":
        cls = CLASS_I if calc is Calculus.CCSS_PRED else CLASS_II
    elif k == "discard":
        cls = CLASS_III
    elif k == "recv":
        cls = CLASS_IV
    else:
        cls = CLASS_V
    return DerivClass(
        cls,
        in_tr_circ=cls in (CLASS_IV, CLASS_V),
        in_tr_bullet=cls == CLASS_V,
        in_tr_sbullet=cls in (CLASS_I, CLASS_II, CLASS_V),
    )


def is_path_step(d: Derivation) -> bool:
    return d.label.is_action


def in_tr_bullet(d: Derivation) -> bool:
    return d.label.is_action and not d.label.is_receptive


def in_tr_sbullet(d: Derivation) -> bool:
    return in_tr_bullet(d) or d.label.kind == "emission"


# ---------------------------------------------------------------------------
# The derivation enumerator

class System:
    """A dialect, an agent environment, and the memoised rule engine.

    The broadcast-name universe, needed for ABCd discard rules, is the
    (finite) set of broadcast names occurring in the roots and agent
    bodies, closed under the relabellings in use.
    """

    def __init__(self, calc: Calculus, env: AgentEnv | None = None,
                 *roots: Process):
        self.calc = calc
        self.env = env or AgentEnv()
        self.env.check_closed(*roots)
        self.env.check_guarded()
        self.roots = tuple(roots)
        self.broadcast_universe = tuple(
            sorted(self.env.broadcast_names(*roots)))
        self.signals = self.env.signal_names(*roots)
        self._derivs: dict[Process, tuple] = {}
        self._proc_syn: dict = {}   # used by the synchrons module
        self._conc: dict = {}       # used by the concurrency module

    @classmethod
    def from_text(cls, term: str, calc: Calculus | str,
                  defs: str = "") -> "tuple[System, Process]":
        from .terms import parse_definitions
        if isinstance(calc, str):
            calc = Calculus.from_name(calc)
        env = parse_definitions(defs, calc)
        p = parse_process(term, calc, env)
        return cls(calc, env, p), p

    # -- label set of the system, for blocking-set validation ------------
    def label_universe(self) -> tuple:
        """All labels of the system: actions, emissions and discards."""
        names, out = set(), set()
        for p in self.roots + tuple(self.env.defs.values()):
            from .terms import subterms
            for q in subterms(p):
                if isinstance(q, Prefix):
                    names.add(q.label.name)
                    out.add(q.label)
                    comp = q.label.complement()
                    if comp is not None:
                        out.add(comp)
                if isinstance(q, Relabel):
                    for _, img in q.f.pairs:
                        names.add(img)
        for f in self.env.relabellings.values():
            for _, img in f.pairs:
                names.add(img)
        out.add(TAU)
        for b in self.broadcast_universe:
            out.add(mk_label("bcast", b))
            out.add(mk_label("recv", b))
            if self.calc.has_discards:
                out.add(mk_label("discard", b))
        for s in self.signals:
            out.add(mk_label("signal", s))
            out.add(mk_label("emission", s))
        for f in self.env.relabellings.values():
            for l in list(out):
                out.add(f.apply(l))
        return tuple(sorted(out, key=str))

    def actions(self) -> tuple:
        return tuple(l for l in self.label_universe() if l.is_action)

    def receptive_labels(self) -> frozenset:
        if self.calc.has_broadcast:
            return frozenset(mk_label("recv", b)
                             for b in self.broadcast_universe)
        return frozenset()

    def emission_labels(self) -> frozenset:
        return frozenset(mk_label("emission", s) for s in self.signals)

    # -- the rules --------------------------------------------------------
    def derivations(self, p: Process) -> tuple:
        found = self._derivs.get(p)
        if found is None:
            found = tuple(sorted(self._derive(p), key=deriv_name))
            self._derivs[p] = found
        return found

    def admits(self, p: Process, label: Label) -> bool:
        """Does p have a derivation with this label?

        Covers the extended reading for CCSS: emission labels are
        admitted iff the corresponding emission derivation exists.
        """
        return any(d.label is label for d in self.derivations(p))

    def discard_check(self, p: Process, b: str) -> bool:
        """Is the discard self-loop for b derivable at p?

        Cross-checked on the fly against non-admittance of b?: the two
        must agree on every ABCd process.
        """
        if not self.calc.has_discards:
            raise DialectError("discards exist only in ABCd")
        derivable = self.admits_discard(p, b)
        independent = not self.admits(p, mk_label("recv", b))
        if derivable != independent:
            raise AssertionError(
                f"discard rule disagrees with receive check at {p} for {b}")
        return derivable

    def admits_discard(self, p: Process, b: str) -> bool:
        lbl = mk_label("discard", b)
        return any(d.label is lbl for d in self.derivations(p))

    def _derive(self, p: Process) -> Iterator[Derivation]:
        calc = self.calc
        if isinstance(p, Nil):
            if calc.has_discards:
                for b in self.broadcast_universe:
                    yield discard_leaf_nil(b, p)
        elif isinstance(p, Prefix):
            yield act_leaf(p.label, p.body)
            if calc.has_discards:
                for b in self.broadcast_universe:
                    if p.label is not mk_label("recv", b):
                        yield discard_leaf_prefix(b, p)
        elif isinstance(p, Sum):
            dl = self.derivations(p.left)
            dr = self.derivations(p.right)
            for d in dl:
                if d.label.kind != "discard":
                    yield sum_left(d, p.right)
            for d in dr:
                if d.label.kind != "discard":
                    yield sum_right(p.left, d)
            if calc.has_discards:
                for b in self.broadcast_universe:
                    lbl = mk_label("discard", b)
                    for d in dl:
                        if d.label is not lbl:
                            continue
                        for e in dr:
                            if e.label is lbl:
                                yield sum_both(d, e)
        elif isinstance(p, Par):
            yield from self._derive_par(p)
        elif isinstance(p, Restrict):
            for d in self.derivations(p.body):
                if not self._restricted(d.label, p.names):
                    yield restrict_deriv(d, p.names)
        elif isinstance(p, Relabel):
            for d in self.derivations(p.body):
                yield relabel_deriv(d, p.f)
        elif isinstance(p, Agent):
            for d in self.derivations(self.env.body(p.name)):
                yield rec_deriv(p.name, d)
        elif isinstance(p, Signalled):
            yield sig_leaf(p.body, p.signal)
            for d in self.derivations(p.body):
                yield sig_skip(d, p.signal)
        else:
            raise TypeError(f"not a process: {p!r}")

    def _derive_par(self, p: Par) -> Iterator[Derivation]:
        calc = self.calc
        dl = self.derivations(p.left)
        dr = self.derivations(p.right)
        for d in dl:
            if self._interleaves_left(d.label, p.right):
                yield par_left(d, p.right)
        for d in dr:
            if self._interleaves_left(d.label, p.left):
                yield par_right(p.left, d)
        for d in dl:
            for e in dr:
                if compose_labels(d.label, e.label) is not None:
                    yield par_both(d, e)

    def _interleaves_left(self, label: Label, other: Process) -> bool:
        """May a component move with this label while `other` stands still?"""
        kind = label.kind
        if kind in ("name", "coname", "tau", "signal"):
            return True
        if kind == "emission":
            return True  # emissions pass through | unchanged
        if kind in ("bcast", "recv"):
            if self.calc is Calculus.ABC:
                # broadcast moves alone only when the other side cannot hear
                return not self.admits(other, mk_label("recv", label.name))
            return False  # ABCd: every broadcast synchronises, maybe with a discard
        if kind == "discard":
            return False
        raise TypeError(kind)

    @staticmethod
    def _restricted(label: Label, names: tuple) -> bool:
        if label.kind in ("name", "coname", "signal", "emission"):
            return label.name in names
        return False

    # -- reachability ------------------------------------------------------
    def reachable_lts(self, p: Process, bound: int = 1000) -> "Ltsc":
        if bound < 1:
            raise ValueError("bound must be positive")
        states: list[Process] = []
        seen = set()
        queue = [p]
        while queue:
            s = queue.pop(0)
            if s in seen:
                continue
            seen.add(s)
            states.append(s)
            if len(states) > bound:
                raise BoundExceeded(bound)
            for d in self.derivations(s):
                if d.target not in seen:
                    queue.append(d.target)
        derivs = []
        for s in states:
            derivs.extend(self.derivations(s))
        return Ltsc(self, tuple(states), tuple(derivs), bound)


# ---------------------------------------------------------------------------
# Finite transition systems

@dataclass(frozen=True, eq=False)
class Ltsc:
    """A finite reachable fragment: states plus all their derivations."""

    system: System
    states: tuple
    derivations: tuple
    bound: int

    def _key(self):  # not interned; identity semantics are fine here
        raise TypeError

    def state_index(self, p: Process) -> int:
        return self.states.index(p)

    def derivations_from(self, p: Process) -> tuple:
        return self.system.derivations(p)

    def path_steps(self) -> tuple:
        return tuple(d for d in self.derivations if is_path_step(d))

    def tr_bullet(self) -> tuple:
        return tuple(d for d in self.derivations if in_tr_bullet(d))

    def tr_circ(self) -> tuple:
        return tuple(d for d in self.derivations if is_path_step(d))


def abc_abcd_agreement(term: Process | str, defs: str = "",
                       bound: int = 1000) -> bool:
    """Do ABC and ABCd give the same transition triples, discards aside?"""
    if isinstance(term, Process):
        term = print_process(term)
    sys_abc, p_abc = System.from_text(term, Calculus.ABC, defs)
    sys_abcd, p_abcd = System.from_text(term, Calculus.ABCD, defs)
    lts_abc = sys_abc.reachable_lts(p_abc, bound)
    lts_abcd = sys_abcd.reachable_lts(p_abcd, bound)

    def triples(lts: Ltsc) -> set:
        return {(d.source, d.label, d.target) for d in lts.derivations
                if d.label.kind != "discard"}

    return triples(lts_abc) == triples(lts_abcd)


# ---------------------------------------------------------------------------
# Serialisation: derivation name trees, LTSC dumps, DOT export

def deriv_to_tree(d: Derivation) -> list:
    k = d.kind
    if k == "act":
        return ["act", str(d.label), print_process(d.parts[0])]
    if k == "sig":
        return ["sig", print_process(d.parts[0]), d.extra]
    if k == "discard0":
        return ["discard0", d.extra]
    if k == "discard":
        return ["discard", d.extra, print_process(d.parts[0])]
    if k == "sum_l":
        return ["sum_l", deriv_to_tree(d.parts[0]), print_process(d.parts[1])]
    if k == "sum_r":
        return ["sum_r", print_process(d.parts[0]), deriv_to_tree(d.parts[1])]
    if k == "sum_both":
        return ["sum_both", deriv_to_tree(d.parts[0]), deriv_to_tree(d.parts[1])]
    if k == "par_l":
        return ["par_l", deriv_to_tree(d.parts[0]), print_process(d.parts[1])]
    if k == "par_r":
        return ["par_r", print_process(d.parts[0]), deriv_to_tree(d.parts[1])]
    if k == "par_both":
        return ["par_both", deriv_to_tree(d.parts[0]), deriv_to_tree(d.parts[1])]
    if k == "restrict":
        return ["restrict", deriv_to_tree(d.parts[0]), list(d.extra)]
    if k == "relabel":
        return ["relabel", deriv_to_tree(d.parts[0]),
                {a: b for a, b in d.extra.pairs}]
    if k == "rec":
        return ["rec", d.extra, deriv_to_tree(d.parts[0])]
    if k == "sig_skip":
        return ["sig_skip", deriv_to_tree(d.parts[0]), d.extra]
    raise TypeError(k)


def deriv_from_tree(tree: list, system: System) -> Derivation:
    def term(s: str) -> Process:
        return parse_process(s, system.calc, system.env, system.signals)

    def label(s: str) -> Label:
        return parse_label(s, system.signals)

    k = tree[0]
    if k == "act":
        return act_leaf(label(tree[1]), term(tree[2]))
    if k == "sig":
        return sig_leaf(term(tree[1]), tree[2])
    if k == "discard0":
        from .terms import NIL
        return discard_leaf_nil(tree[1], NIL)
    if k == "discard":
        return discard_leaf_prefix(tree[1], term(tree[2]))
    if k == "sum_l":
        return sum_left(deriv_from_tree(tree[1], system), term(tree[2]))
    if k == "sum_r":
        return sum_right(term(tree[1]), deriv_from_tree(tree[2], system))
    if k == "sum_both":
        return sum_both(deriv_from_tree(tree[1], system),
                        deriv_from_tree(tree[2], system))
    if k == "par_l":
        return par_left(deriv_from_tree(tree[1], system), term(tree[2]))
    if k == "par_r":
        return par_right(term(tree[1]), deriv_from_tree(tree[2], system))
    if k == "par_both":
        return par_both(deriv_from_tree(tree[1], system),
                        deriv_from_tree(tree[2], system))
    if k == "restrict":
        return restrict_deriv(deriv_from_tree(tree[1], system),
                              tuple(sorted(tree[2])))
    if k == "relabel":
        return relabel_deriv(deriv_from_tree(tree[1], system),
                             mk_relabelling(tree[2]))
    if k == "rec":
        return rec_deriv(tree[1], deriv_from_tree(tree[2], system))
    if k == "sig_skip":
        return sig_skip(deriv_from_tree(tree[1], system), tree[2])
    raise ValueError(f"unknown derivation node {k!r}")


def ltsc_to_json(lts: Ltsc) -> dict:
    index = {s: i for i, s in enumerate(lts.states)}
    return {
        "dialect": lts.system.calc.value,
        "states": [print_process(s) for s in lts.states],
        "derivations": [
            {
                "tree": deriv_to_tree(d),
                "name": deriv_name(d),
                "source": index[d.source],
                "label": str(d.label),
                "target": index[d.target],
                "class": classify(d, lts.system.calc).cls,
            }
            for d in lts.derivations
        ],
    }


def ltsc_to_dot(lts: Ltsc) -> str:
    index = {s: i for i, s in enumerate(lts.states)}
    lines = ["digraph lts {", '  rankdir=LR;', '  node [shape=circle];']
    for i, s in enumerate(lts.states):
        esc = print_process(s).replace('"', '\\"')
        lines.append(f'  s{i} [label="{esc}"];')
    for d in lts.derivations:
        style = ', style=dashed' if not d.label.is_action else ""
        lbl = str(d.label).replace('"', '\\"')
        lines.append(f'  s{index[d.source]} -> s{index[d.target]}'
                     f' [label="{lbl}"{style}];')
    lines.append("}")
    return "\n".join(lines)
