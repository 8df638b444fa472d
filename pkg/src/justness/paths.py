"""Lasso-shaped paths and the liveness-criterion checkers on them.

A lasso is a finite stem plus an optional cycle: the machine form of
finite and eventually-periodic infinite paths.  Path steps are
derivations that model action occurrences; indicator transitions never
appear on paths.

The checkers quantify over every suffix of the represented path.  A
suffix anchored inside the cycle sees, as its set of occurring steps,
all steps of one full cycle rotation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .semantics import (
    Derivation, System, deriv_name, deriv_to_tree, in_tr_bullet,
    in_tr_sbullet, is_path_step,
)
from .terms import (
    Label, Par, Process, Relabel, Restrict, _intern, print_process,
)
from .concurrency import ConcVariant, conc


class AdjacencyError(ValueError):
    pass


class IndicatorInPath(ValueError):
    pass


class BadBlockingSet(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# Lassos

@dataclass(frozen=True, eq=False)
class Lasso:
    """first --stem--> ... --cycle (optional, returns to its start)"""

    first: Process
    stem: tuple  # of Derivation
    cycle: tuple  # of Derivation, possibly empty

    def _key(self):
        return (id(self.first), tuple(id(d) for d in self.stem),
                tuple(id(d) for d in self.cycle))

    @property
    def is_finite(self) -> bool:
        return not self.cycle

    @property
    def loop_state(self) -> Process:
        return self.stem[-1].target if self.stem else self.first

    @property
    def last_state(self) -> Process:
        """Final state of a finite lasso; cycle entry otherwise."""
        return self.loop_state

    def stem_states(self) -> tuple:
        out = [self.first]
        for d in self.stem:
            out.append(d.target)
        return tuple(out)

    def cycle_states(self) -> tuple:
        return tuple(d.source for d in self.cycle)

    def states(self) -> tuple:
        return tuple(dict.fromkeys(self.stem_states() + self.cycle_states()))

    def __len__(self) -> int:
        return len(self.stem) + len(self.cycle)

    def __str__(self) -> str:
        bits = [print_process(self.first)]
        for d in self.stem:
            bits.append(f"--{d.label}-->")
            bits.append(print_process(d.target))
        if self.cycle:
            bits.append("[cycle:")
            for d in self.cycle:
                bits.append(f"--{d.label}-->")
                bits.append(print_process(d.target))
            bits.append("]")
        return " ".join(bits)


def make_lasso(first: Process, stem, cycle=()) -> Lasso:
    """Validate adjacency and step classes, then intern."""
    stem, cycle = tuple(stem), tuple(cycle)
    for d in stem + cycle:
        if not is_path_step(d):
            raise IndicatorInPath(
                f"{deriv_name(d)} is an indicator transition; paths may not "
                f"contain it")
    at = first
    for d in stem:
        if d.source is not at:
            raise AdjacencyError(
                f"step {deriv_name(d)} starts at {d.source}, not {at}")
        at = d.target
    loop = at
    for d in cycle:
        if d.source is not at:
            raise AdjacencyError(
                f"cycle step {deriv_name(d)} starts at {d.source}, not {at}")
        at = d.target
    if cycle and at is not loop:
        raise AdjacencyError(
            f"cycle ends at {at}, its start is {loop}")
    return _intern(Lasso(first, stem, cycle))


def suffix_lasso(lasso: Lasso, kind: str, i: int) -> Lasso:
    """The lasso representing the suffix at a given anchor."""
    if kind == "stem":
        first = lasso.stem_states()[i]
        return make_lasso(first, lasso.stem[i:], lasso.cycle)
    cyc = lasso.cycle[i:] + lasso.cycle[:i]
    return make_lasso(cyc[0].source, (), cyc)


def anchors(lasso: Lasso):
    """Anchor positions: one per distinct suffix of the represented path.

    Yields (kind, index, state, occurring-steps).  For an anchor inside
    the cycle the occurring steps are those of one full rotation.
    """
    stem_states = lasso.stem_states()
    if lasso.is_finite:
        for i in range(len(lasso.stem) + 1):
            yield ("stem", i, stem_states[i], lasso.stem[i:])
    else:
        for i in range(len(lasso.stem)):
            yield ("stem", i, stem_states[i], lasso.stem[i:] + lasso.cycle)
        for i in range(len(lasso.cycle)):
            yield ("cycle", i, lasso.cycle[i].source, lasso.cycle)


# ---------------------------------------------------------------------------
# Verdicts

@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: dict

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return {"holds": self.holds, "witness": self.witness}


def _fail(kind: str, i: int, t: Derivation, detail: str = "") -> Verdict:
    w = {"anchor": {"position": i, "in_cycle": kind == "cycle"},
         "enabled": deriv_name(t),
         "enabled_tree": deriv_to_tree(t),
         "label": str(t.label)}
    if detail:
        w["detail"] = detail
    return Verdict(False, w)


def replay_witness(lasso: Lasso, system: System, blocking, variant,
                   verdict: Verdict) -> bool:
    """Re-check a justness verdict from its witness alone.

    A failure witness pins down an anchor and an enabled derivation that
    no step of that suffix interferes with; a success witness maps each
    obligation to an interfering step.
    """
    from .semantics import deriv_from_tree
    blocking = check_blocking_set(system, blocking, sig=True)
    if not verdict.holds:
        w = verdict.witness
        kind = "cycle" if w["anchor"]["in_cycle"] else "stem"
        i = w["anchor"]["position"]
        for k, j, state, occ in anchors(lasso):
            if (k, j) == (kind, i):
                t = deriv_from_tree(w["enabled_tree"], system)
                if t.source is not state or t.label in blocking:
                    return False
                return all(conc(t, u, variant) for u in occ)
        return False
    for k, j, state, occ in anchors(lasso):
        names = {deriv_name(u) for u in occ}
        for o in verdict.witness.get("obligations", []):
            if (o["anchor"]["in_cycle"], o["anchor"]["position"]) \
                    == (k == "cycle", j) and o["interfered_by"] not in names:
                return False
    return True


# ---------------------------------------------------------------------------
# Blocking sets

def check_blocking_set(system: System, blocking, sig: bool = False) -> frozenset:
    """Validate and complete a blocking set.

    Receives are always blockable, so they are added implicitly; the
    rest must be actions of the system (emissions too, in sigjust mode).
    """
    rec = system.receptive_labels()
    blocking = frozenset(blocking) | rec
    for l in blocking:
        if not isinstance(l, Label):
            raise BadBlockingSet(f"not a label: {l!r}")
        if l.is_action:
            continue
        if sig and l.kind == "emission":
            continue
        raise BadBlockingSet(
            f"{l} cannot be blocked" + ("" if sig else " outside sigjust mode"))
    return blocking


# ---------------------------------------------------------------------------
# Progress, justness, sigjustness

def is_progressing(lasso: Lasso, system: System, blocking) -> Verdict:
    blocking = check_blocking_set(system, blocking)
    if not lasso.is_finite:
        return Verdict(True, {"reason": "infinite path"})
    last = lasso.last_state
    for t in system.derivations(last):
        if in_tr_bullet(t) and t.label not in blocking:
            return _fail("stem", len(lasso.stem), t,
                         "non-blocking transition enabled at the last state")
    return Verdict(True, {"reason": "last state enables no non-blocking transition"})


def _just_core(lasso: Lasso, system: System, blocking, variant: ConcVariant,
               domain) -> Verdict:
    obligations = []
    for kind, i, state, steps in anchors(lasso):
        for t in system.derivations(state):
            if not domain(t) or t.label in blocking:
                continue
            hit = next((u for u in steps if not conc(t, u, variant)), None)
            if hit is None:
                return _fail(kind, i, t, "never interfered with in this suffix")
            obligations.append({
                "anchor": {"position": i, "in_cycle": kind == "cycle"},
                "enabled": deriv_name(t),
                "interfered_by": deriv_name(hit),
            })
    return Verdict(True, {"obligations": obligations})


def is_just(lasso: Lasso, system: System, blocking,
            variant: ConcVariant = ConcVariant.DYN) -> Verdict:
    """Every suffix interferes with every non-blocking transition
    enabled at its start."""
    if variant not in JUST_OK_VARIANTS:
        raise ValueError(f"{variant} is not a justness variant")
    blocking = check_blocking_set(system, blocking)
    return _just_core(lasso, system, blocking, variant, in_tr_bullet)


JUST_OK_VARIANTS = (ConcVariant.DYN, ConcVariant.STATIC, ConcVariant.C,
                    ConcVariant.STATIC_PRIME, ConcVariant.C_PRIME)


def is_sigjust(lasso: Lasso, system: System, blocking,
               variant: ConcVariant = ConcVariant.DYN) -> Verdict:
    """Justness extended to signal emissions.

    Quantifies over the extended domain, and allows emissions in the
    blocking set.  A path is B-just iff it is (B + all emissions)-sigjust.
    """
    if variant not in JUST_OK_VARIANTS:
        raise ValueError(f"{variant} is not a justness variant")
    blocking = check_blocking_set(system, blocking, sig=True)
    return _just_core(lasso, system, blocking, variant, in_tr_sbullet)


def minimal_blocking_set(lasso: Lasso, system: System,
                         variant: ConcVariant = ConcVariant.DYN,
                         verify: bool = True) -> frozenset:
    """The least blocking set that makes the lasso just.

    An action must be blocked iff some suffix enables a transition with
    that label which no step of the suffix interferes with.  Receives
    are always included.
    """
    out = set(system.receptive_labels())
    for kind, i, state, steps in anchors(lasso):
        for t in system.derivations(state):
            if not in_tr_bullet(t) or t.label in out:
                continue
            if all(conc(t, u, variant) for u in steps):
                out.add(t.label)
    result = frozenset(out)
    if verify:
        assert is_just(lasso, system, result, variant).holds
        rec = system.receptive_labels()
        for l in result - rec:
            assert not is_just(lasso, system, result - {l}, variant).holds, \
                f"minimal blocking set is not minimal: {l} removable"
    return result


# ---------------------------------------------------------------------------
# Decomposition

def decompose(lasso: Lasso, system: System):
    """Split a lasso along the leading static operator of its states.

    Returns ("par", left, right), ("restrict", inner, names) or
    ("relabel", inner, f).  Components of a synchronisation that are
    indicator derivations disappear: they change no state.
    """
    top = lasso.first
    if isinstance(top, Par):
        return ("par", _project(lasso, True), _project(lasso, False))
    if isinstance(top, Restrict):
        return ("restrict", _strip(lasso, "restrict"), top.names)
    if isinstance(top, Relabel):
        return ("relabel", _strip(lasso, "relabel"), top.f)
    raise ShapeMismatch(
        f"{print_process(top)} has no leading static operator")


def _side_steps(steps, left: bool):
    out = []
    for d in steps:
        if d.kind == "par_l":
            if left:
                out.append(d.parts[0])
        elif d.kind == "par_r":
            if not left:
                out.append(d.parts[1])
        elif d.kind == "par_both":
            piece = d.parts[0] if left else d.parts[1]
            if piece.label.is_action:
                out.append(piece)
        else:
            raise ShapeMismatch(f"step {deriv_name(d)} is not a parallel step")
    return tuple(out)


def _project(lasso: Lasso, left: bool) -> Lasso:
    first = lasso.first.left if left else lasso.first.right
    stem = _side_steps(lasso.stem, left)
    # a cycle none of whose steps move this side projects to a finite path
    cycle = _side_steps(lasso.cycle, left)
    return make_lasso(first, stem, cycle)


def _strip(lasso: Lasso, kind: str) -> Lasso:
    def inner(d: Derivation) -> Derivation:
        if d.kind != kind:
            raise ShapeMismatch(f"step {deriv_name(d)} does not match {kind}")
        return d.parts[0]

    return make_lasso(lasso.first.body,
                      tuple(inner(d) for d in lasso.stem),
                      tuple(inner(d) for d in lasso.cycle))


# ---------------------------------------------------------------------------
# Abstract paths

@dataclass(frozen=True, eq=False)
class AbstractLasso:
    """A lasso over transition triples rather than derivations."""

    first: Process
    stem: tuple  # of (source, label, target)
    cycle: tuple

    def _key(self):
        return (id(self.first),
                tuple(tuple(id(x) for x in t) for t in self.stem),
                tuple(tuple(id(x) for x in t) for t in self.cycle))

    @property
    def is_finite(self) -> bool:
        return not self.cycle

    def stem_states(self) -> tuple:
        out = [self.first]
        for (_, _, tgt) in self.stem:
            out.append(tgt)
        return tuple(out)


def make_abstract_lasso(first: Process, stem, cycle=()) -> AbstractLasso:
    stem, cycle = tuple(stem), tuple(cycle)
    at = first
    for (src, _, tgt) in stem:
        if src is not at:
            raise AdjacencyError(f"triple starts at {src}, not {at}")
        at = tgt
    loop = at
    for (src, _, tgt) in cycle:
        if src is not at:
            raise AdjacencyError(f"cycle triple starts at {src}, not {at}")
        at = tgt
    if cycle and at is not loop:
        raise AdjacencyError("cycle does not close")
    return _intern(AbstractLasso(first, stem, cycle))


def to_abstract(lasso: Lasso) -> AbstractLasso:
    def hat(d: Derivation):
        return (d.source, d.label, d.target)

    return make_abstract_lasso(lasso.first,
                               tuple(hat(d) for d in lasso.stem),
                               tuple(hat(d) for d in lasso.cycle))


def _abstract_anchors(rho: AbstractLasso):
    states = rho.stem_states()
    if rho.is_finite:
        for i in range(len(rho.stem) + 1):
            yield ("stem", i, states[i], rho.stem[i:])
    else:
        for i in range(len(rho.stem)):
            yield ("stem", i, states[i], rho.stem[i:] + rho.cycle)
        for i in range(len(rho.cycle)):
            yield ("cycle", i, rho.cycle[i][0], rho.cycle)


def concrete_realisations(rho: AbstractLasso, system: System,
                          max_unroll: int = 3, limit: int = 20000):
    """Concrete lassos whose abstraction is the represented path.

    The concrete cycle may have to traverse the abstract cycle several
    times before the derivation choices line up, so the abstract cycle
    is unrolled up to max_unroll times.
    """
    def choices(triples):
        outs = [()]
        for (src, lbl, tgt) in triples:
            cands = [d for d in system.derivations(src)
                     if d.label is lbl and d.target is tgt]
            outs = [o + (c,) for o in outs for c in cands]
            if len(outs) > limit:
                raise BoundExceededSearch()
        return outs

    try:
        if rho.is_finite:
            for stem in choices(rho.stem):
                yield make_lasso(rho.first, stem)
            return
        for stem in choices(rho.stem):
            for u in range(1, max_unroll + 1):
                for cyc in choices(rho.cycle * u):
                    yield make_lasso(rho.first, stem, cyc)
    except BoundExceededSearch:
        return


class BoundExceededSearch(RuntimeError):
    pass


def concrete_witness(rho: AbstractLasso, system: System, blocking,
                     variant: ConcVariant = ConcVariant.STATIC,
                     max_unroll: int = 3):
    """A just concrete path over the given triples, if the bounded
    search finds one."""
    for cand in concrete_realisations(rho, system, max_unroll):
        if is_just(cand, system, blocking, variant).holds:
            return cand
    return None


def abstract_is_just(rho: AbstractLasso, system: System, blocking,
                     variant: ConcVariant = ConcVariant.STATIC) -> Verdict:
    """Justness on abstract paths.

    The interfering witness may be any derivation of a triple occurring
    in the suffix, not just the derivation actually taken; this makes
    the notion line up with the existence of a just concrete path over
    the same triples.
    """
    blocking = check_blocking_set(system, blocking)
    for kind, i, state, triples in _abstract_anchors(rho):
        for t in system.derivations(state):
            if not in_tr_bullet(t) or t.label in blocking:
                continue
            found = False
            for (src, lbl, tgt) in triples:
                for u in system.derivations(src):
                    if u.label is lbl and u.target is tgt \
                            and not conc(t, u, variant):
                        found = True
                        break
                if found:
                    break
            if not found:
                return _fail(kind, i, t,
                             "no derivation of any occurring triple interferes")
    return Verdict(True, {})
