"""Completeness criteria beyond plain justness checking.

Three pieces live here:

 *  a coinductive justness decision that never looks at a concurrency
    relation: it recurses on the leading static operators of the path's
    states, computing the least blocking set that admits the path;
 *  the fairness family (strong / weak / J) over pluggable task sets;
 *  a path extender that completes any finite path into a just lasso,
    scheduling pending obligations through a priority queue.
"""

from __future__ import annotations

from dataclasses import dataclass

from .concurrency import ConcVariant, conc, successor_after
from .paths import (
    BadBlockingSet, Lasso, Verdict, anchors, check_blocking_set, decompose,
    make_lasso, suffix_lasso,
)
from .semantics import (
    Derivation, Ltsc, System, deriv_name, in_tr_bullet, is_path_step,
)
from .terms import TAU, Label, Par, Process, Relabel, Restrict


class Exhausted(RuntimeError):
    def __init__(self, budget: int, partial: Lasso):
        super().__init__(f"extension budget {budget} exhausted")
        self.budget = budget
        self.partial = partial


# ---------------------------------------------------------------------------
# Coinductive justness

def coinductive_is_just(lasso: Lasso, system: System, blocking,
                        sig: bool = False) -> Verdict:
    """Decide justness by the operator-directed closure conditions.

    A finite path must end in a state admitting blocked things only; a
    path of a parallel composition defers to its projections, whose
    blocking needs may only combine when no complementary pair is left
    unblocked (unless tau itself is blocked); restriction widens the
    blocking set, relabelling pulls it back; and every suffix is held
    to the same standard.

    Internally everything runs in emission-aware form; plain justness
    is the special case where every emission counts as blocked.
    """
    blocking = check_blocking_set(system, blocking, sig=sig)
    if not sig:
        blocking = blocking | system.emission_labels()
    need = least_coinductive_blocking(lasso, system)
    holds = need <= blocking
    return Verdict(holds, {
        "least_blocking_set": sorted(str(l) for l in need),
        "missing": sorted(str(l) for l in need - blocking),
    })


def least_coinductive_blocking(lasso: Lasso, system: System) -> frozenset:
    """The least emission-aware blocking set satisfying the closure
    conditions, computed by recursion on leading static operators."""
    memo = system._conc.setdefault("coind", {})
    return _least_blocking(lasso, system, memo)


def _least_blocking(lasso: Lasso, system: System, memo: dict) -> frozenset:
    found = memo.get(lasso)
    if found is not None:
        return found
    memo[lasso] = frozenset()  # a revisited suffix adds nothing new
    out = _least_blocking_raw(lasso, system, memo)
    memo[lasso] = out
    return out


def _complementary(c: frozenset, d: frozenset) -> bool:
    for l in c:
        comp = l.complement()
        if comp is not None and comp in d:
            return True
    return False


def _least_blocking_raw(lasso: Lasso, system: System, memo: dict) -> frozenset:
    state = lasso.first
    if isinstance(state, Par):
        _, left, right = decompose(lasso, system)
        c = _least_blocking(left, system, memo)
        d = _least_blocking(right, system, memo)
        out = c | d
        if _complementary(c, d):
            out = out | {TAU}
        return out
    if isinstance(state, Restrict):
        _, inner, names = decompose(lasso, system)
        sub = _least_blocking(inner, system, memo)
        return frozenset(
            l for l in sub
            if not (l.kind in ("name", "coname", "signal", "emission")
                    and l.name in names))
    if isinstance(state, Relabel):
        _, inner, f = decompose(lasso, system)
        sub = _least_blocking(inner, system, memo)
        return frozenset(f.apply(l) for l in sub)
    # no leading static operator: walk one position forward
    if lasso.stem:
        return _least_blocking(suffix_lasso(lasso, "stem", 1), system, memo)
    if lasso.cycle:
        return _least_blocking(suffix_lasso(lasso, "cycle", 1), system, memo)
    # the path ends here: everything still admitted must be blockable
    return frozenset(d.label for d in system.derivations(state)
                     if d.label.kind != "discard")


# ---------------------------------------------------------------------------
# Task families and fairness

@dataclass(frozen=True)
class TaskFamily:
    """Named sets of action-occurrence derivations over a finite LTSC."""

    tasks: tuple  # of (name, frozenset of Derivation)

    def __iter__(self):
        return iter(self.tasks)

    def __len__(self):
        return len(self.tasks)

    def names(self):
        return [n for n, _ in self.tasks]


def _check_family(lts: Ltsc, tasks) -> TaskFamily:
    known = set(lts.derivations)
    for name, members in tasks:
        for d in members:
            if d not in known:
                raise ValueError(f"task {name}: {deriv_name(d)} not in the LTSC")
            if not is_path_step(d):
                raise ValueError(f"task {name}: {deriv_name(d)} is an indicator")
    return TaskFamily(tuple(tasks))


def tasks_from_conc(lts: Ltsc) -> TaskFamily:
    """One task per non-blockable derivation t: the action occurrences
    interfering with t.  Weak fairness over this family implies
    justness.  Tasks equal as sets are merged."""
    circ = lts.tr_circ()
    seen: dict[frozenset, str] = {}
    out = []
    for t in lts.tr_bullet():
        members = frozenset(u for u in circ if not conc(t, u, ConcVariant.DYN))
        if members not in seen:
            name = f"interferers-of-{len(out)}[{deriv_name(t)}]"
            seen[members] = name
            out.append((name, members))
    return _check_family(lts, out)


def tasks_per_action(lts: Ltsc) -> TaskFamily:
    by_label: dict[Label, set] = {}
    for d in lts.tr_circ():
        by_label.setdefault(d.label, set()).add(d)
    return _check_family(
        lts, [(str(l), frozenset(ds)) for l, ds in sorted(
            by_label.items(), key=lambda kv: str(kv[0]))])


def tasks_per_transition(lts: Ltsc) -> TaskFamily:
    return _check_family(
        lts, [(deriv_name(d), frozenset((d,))) for d in lts.tr_circ()])


def tasks_progress(lts: Ltsc) -> TaskFamily:
    """The single-task family equating fairness with progress."""
    return _check_family(lts, [("all", frozenset(lts.tr_circ()))])


BUILTIN_FAMILIES = {
    "conc": tasks_from_conc,
    "per-action": tasks_per_action,
    "per-transition": tasks_per_transition,
    "progress": tasks_progress,
}

FAIR_MODES = ("strong", "weak", "j")


def _enabled_at(task: frozenset, state: Process, blocking) -> bool:
    return any(t.source is state and t.label not in blocking for t in task)


def _enabled_during(task: frozenset, step: Derivation, blocking) -> bool:
    return any(t.source is step.source and t.label not in blocking
               and conc(t, step, ConcVariant.DYN) for t in task)


def is_fair(lasso: Lasso, system: System, blocking, tasks: TaskFamily,
            mode: str = "weak") -> Verdict:
    """Strong / weak / J fairness of a lasso over a task family.

    Enabling on a suffix: strong requires the task enabled somewhere in
    every tail (on a lasso: at some cycle state, or at the final state),
    weak requires it enabled at every state, and J additionally during
    every step.  Whatever is enabled in the chosen sense must occur.
    """
    if mode not in FAIR_MODES:
        raise ValueError(f"unknown fairness mode {mode!r}")
    blocking = check_blocking_set(system, blocking)
    stem_states = lasso.stem_states()
    cycle_states = lasso.cycle_states()
    for kind, i, state, steps in anchors(lasso):
        if kind == "stem":
            states = stem_states[i:] if lasso.is_finite \
                else stem_states[i:-1] + cycle_states
        else:
            states = cycle_states
        for name, task in tasks:
            if lasso.is_finite:
                relentless = _enabled_at(task, states[-1], blocking)
            else:
                relentless = any(_enabled_at(task, s, blocking)
                                 for s in cycle_states)
            perpetual = all(_enabled_at(task, s, blocking) for s in states)
            if mode == "strong":
                due = relentless
            elif mode == "weak":
                due = perpetual
            else:
                due = perpetual and all(
                    _enabled_during(task, u, blocking) for u in steps)
            if due and not any(u in task for u in steps):
                return Verdict(False, {
                    "anchor": {"position": i, "in_cycle": kind == "cycle"},
                    "task": name,
                    "mode": mode,
                })
    return Verdict(True, {"mode": mode, "tasks": tasks.names()})


# ---------------------------------------------------------------------------
# Feasibility: extending any finite path into a just lasso

def extend_to_just(system: System, prefix: Lasso, blocking,
                   variant: ConcVariant = ConcVariant.DYN,
                   budget: int = 10_000) -> Lasso:
    """Extend a finite path into a just lasso using non-blocking steps.

    Pending obligations (enabled non-blocking derivations, one per
    equivalence class of necessary synchrons) form a queue.  Each round
    the oldest obligation fires: appending it interferes with it by
    irreflexivity.  Surviving obligations are carried to the new state
    as their successor variants; interfered ones are crossed out.  When
    a state recurs with the same queue, the segment between the visits
    is a cycle discharging every obligation forever.
    """
    if not prefix.is_finite:
        raise ValueError("the prefix must be a finite path")
    blocking = check_blocking_set(system, blocking)
    from .synchrons import necessary_synchrons

    steps = list(prefix.stem)
    state = prefix.last_state
    pending: list[Derivation] = []
    seen: dict = {}
    spent = 0
    while True:
        have = {necessary_synchrons(p) for p in pending}
        for t in system.derivations(state):
            if in_tr_bullet(t) and t.label not in blocking:
                key = necessary_synchrons(t)
                if key not in have:
                    have.add(key)
                    pending.append(t)
        if not pending:
            return make_lasso(prefix.first, steps)
        situation = (state, tuple(necessary_synchrons(p) for p in pending))
        at = seen.get(situation)
        if at is not None:
            return make_lasso(prefix.first, steps[:at], steps[at:])
        seen[situation] = len(steps)
        if spent >= budget:
            raise Exhausted(budget, make_lasso(prefix.first, steps))
        u = pending.pop(0)
        steps.append(u)
        spent += 1
        carried = []
        for t in pending:
            if conc(t, u, variant):
                carried.append(successor_after(system, t, u))
        pending = carried
        state = u.target
