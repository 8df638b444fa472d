"""The built-in example corpus, random term generation, and check suites.

Corpus entries are .proc files: a `# dialect:` line, a `# term:` line,
and agent/relabelling definitions.  The JUSTNESS_CORPUS environment
variable points at an alternative corpus directory.

The check suites exercise the agreement theorems on the corpus plus a
seeded batch of random guarded terms; each returns a result object with
per-failure detail, and the CLI `check` subcommand exits nonzero if any
suite fails.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, field
from pathlib import Path

from .concurrency import ConcVariant, conc, gh_conc, inductive_conc
from .criteria import (
    coinductive_is_just, extend_to_just, is_fair, least_coinductive_blocking,
    tasks_from_conc, tasks_progress,
)
from .paths import Lasso, is_just, is_progressing, is_sigjust, make_lasso
from .semantics import (
    BoundExceeded, System, abc_abcd_agreement, deriv_name, in_tr_bullet,
    in_tr_sbullet, is_path_step,
)
from .terms import Calculus, Process, mk_label, print_process

DEFAULT_DIR = Path(__file__).parent / "corpus_data"
ENV_VAR = "JUSTNESS_CORPUS"


@dataclass
class CorpusEntry:
    name: str
    calc: Calculus
    term_text: str
    defs_text: str
    system: System = field(repr=False, default=None)
    term: Process = field(repr=False, default=None)

    def load(self) -> "CorpusEntry":
        if self.system is None:
            self.system, self.term = System.from_text(
                self.term_text, self.calc, self.defs_text)
        return self


def corpus_dir() -> Path:
    return Path(os.environ.get(ENV_VAR, DEFAULT_DIR))


def load_corpus(directory: Path | None = None) -> list[CorpusEntry]:
    directory = directory or corpus_dir()
    out = []
    for path in sorted(directory.glob("*.proc")):
        dialect, term, defs = None, None, []
        for line in path.read_text().splitlines():
            stripped = line.strip()
            if stripped.startswith("# dialect:"):
                dialect = stripped.split(":", 1)[1].strip()
            elif stripped.startswith("# term:"):
                term = stripped.split(":", 1)[1].strip()
            else:
                defs.append(line)
        if not dialect or not term:
            raise ValueError(f"{path}: missing '# dialect:' or '# term:' line")
        out.append(CorpusEntry(path.stem, Calculus.from_name(dialect),
                               term, "\n".join(defs)))
    return out


def corpus_entry(name: str) -> CorpusEntry:
    for e in load_corpus():
        if e.name == name:
            return e.load()
    raise KeyError(f"no corpus entry named {name!r}")


# ---------------------------------------------------------------------------
# Random guarded terms

_ACTION_POOL = ("a", "b", "c")


def random_term(rng: random.Random, calc: Calculus, depth: int = 4) -> str:
    """A random closed guarded term, as concrete syntax."""

    def action() -> str:
        n = rng.choice(_ACTION_POOL)
        r = rng.random()
        if calc.has_broadcast and r < 0.35:
            return n + rng.choice("!?")
        if r < 0.12:
            return "tau"
        if r < 0.35:
            return "'" + n
        return n

    def go(d: int) -> str:
        if d <= 0:
            return rng.choice(["0", action()])
        roll = rng.random()
        if roll < 0.30:
            return f"{action()}.{go(d - 1)}"
        if roll < 0.55:
            return f"({go(d - 1)} + {go(d - 1)})"
        if roll < 0.80:
            return f"({go(d - 1)} | {go(d - 1)})"
        if roll < 0.88:
            return f"({go(d - 1)}) \\ {{{rng.choice(_ACTION_POOL)}}}"
        if roll < 0.94:
            x, y = rng.sample(_ACTION_POOL, 2)
            return f"({go(d - 1)})[{x}->{y}]"
        if calc.has_signals:
            return f"({go(d - 1)}) ^ {rng.choice(('s', 'r'))}"
        return f"{action()}.{go(d - 1)}"

    return go(depth)


def random_systems(seed: int, count: int, calc: Calculus,
                   max_states: int = 30, depth: int = 4):
    """Seeded stream of (System, Process) pairs with small state spaces."""
    rng = random.Random(seed)
    produced = 0
    while produced < count:
        text = random_term(rng, calc, depth)
        try:
            system, p = System.from_text(text, calc)
            lts = system.reachable_lts(p, max_states)
        except BoundExceeded:
            continue
        except Exception:  # dialect clashes (e.g. restricting a broadcast name)
            continue
        if not lts.derivations:
            continue
        produced += 1
        yield system, p, lts


# ---------------------------------------------------------------------------
# Lasso enumeration

def simple_lassos(system: System, start: Process, max_stem: int = 4,
                  max_cycle: int = 4, limit: int = 200) -> list[Lasso]:
    """All lassos from `start` with short stems and simple cycles.

    Cycles visit no state twice except for the closing revisit; stems
    may end anywhere, giving the finite paths as the cycle-free cases.
    """
    out: list[Lasso] = []

    def steps_from(state):
        return [d for d in system.derivations(state) if is_path_step(d)]

    def cycles_from(state, first, acc, visited):
        for d in steps_from(state):
            nxt = d.target
            if nxt is first:
                yield tuple(acc) + (d,)
            elif len(acc) + 1 < max_cycle and nxt not in visited:
                yield from cycles_from(nxt, first, acc + [d], visited | {nxt})

    def stems(state, acc):
        yield tuple(acc), state
        if len(acc) < max_stem:
            for d in steps_from(state):
                yield from stems(d.target, acc + [d])

    for stem, end in stems(start, []):
        if len(out) >= limit:
            break
        out.append(make_lasso(start, stem))
        for cyc in cycles_from(end, end, [], {end}):
            out.append(make_lasso(start, stem, cyc))
            if len(out) >= limit:
                break
    return out


def blocking_grid(system: System, max_labels: int = 4):
    """Admissible blocking sets over the system's relevant labels."""
    rec = system.receptive_labels()
    pool = sorted((l for l in system.actions()
                   if not l.is_receptive and l.kind != "tau"),
                  key=str)[:max_labels]
    for k in range(len(pool) + 1):
        for combo in itertools.combinations(pool, k):
            yield frozenset(combo) | rec


# ---------------------------------------------------------------------------
# Check suites

@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    failures: list

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed,
                "checked": self.checked, "failures": self.failures[:20]}


def _suite_systems(seed: int, size: int):
    """Corpus entries plus a seeded batch of random systems."""
    out = []
    for entry in load_corpus():
        entry.load()
        out.append((entry.name, entry.system, entry.term))
    per_dialect = max(1, size // 4)
    offsets = {Calculus.CCS: 0, Calculus.ABC: 101, Calculus.ABCD: 202,
               Calculus.CCSS_PRED: 303}
    for calc, offset in offsets.items():
        for i, (system, p, lts) in enumerate(
                random_systems(seed + offset, per_dialect, calc)):
            out.append((f"random-{calc.value}-{i}", system, p))
    return out


def suite_agreement_static_dynamic(seed: int = 7, size: int = 12,
                                   lasso_limit: int = 18) -> SuiteResult:
    """Justness verdicts agree across all concurrency variants."""
    failures, checked = [], 0
    variants = (ConcVariant.DYN, ConcVariant.STATIC, ConcVariant.C,
                ConcVariant.STATIC_PRIME, ConcVariant.C_PRIME)
    for name, system, p in _suite_systems(seed, size):
        for lasso in simple_lassos(system, p, 3, 3, lasso_limit):
            for blocking in blocking_grid(system, 3):
                verdicts = [is_just(lasso, system, blocking, v).holds
                            for v in variants]
                checked += 1
                if len(set(verdicts)) != 1:
                    failures.append({
                        "system": name, "lasso": str(lasso),
                        "blocking": sorted(map(str, blocking)),
                        "verdicts": dict(zip([v.value for v in variants],
                                             verdicts)),
                    })
    return SuiteResult("agreement-static-dynamic", not failures, checked,
                       failures)


def suite_agreement_coinductive(seed: int = 7, size: int = 12,
                                lasso_limit: int = 14) -> SuiteResult:
    """The coinductive decision matches the static concurrency one."""
    failures, checked = [], 0
    for name, system, p in _suite_systems(seed, size):
        sig = system.calc.has_signals
        for lasso in simple_lassos(system, p, 3, 3, lasso_limit):
            for blocking in blocking_grid(system, 3):
                lhs = coinductive_is_just(lasso, system, blocking).holds
                rhs = is_just(lasso, system, blocking,
                              ConcVariant.STATIC).holds
                checked += 1
                if lhs != rhs:
                    failures.append({
                        "system": name, "lasso": str(lasso),
                        "blocking": sorted(map(str, blocking)),
                        "coinductive": lhs, "static": rhs,
                    })
                if sig:
                    lhs = coinductive_is_just(lasso, system, blocking,
                                              sig=True).holds
                    rhs = is_sigjust(lasso, system, blocking,
                                     ConcVariant.STATIC).holds
                    checked += 1
                    if lhs != rhs:
                        failures.append({
                            "system": name, "lasso": str(lasso),
                            "blocking": sorted(map(str, blocking)),
                            "coinductive-sig": lhs, "static-sig": rhs,
                        })
    return SuiteResult("agreement-coinductive", not failures, checked,
                       failures)


def suite_inductive_oracle(seed: int = 7, size: int = 16) -> SuiteResult:
    """Synchron-based relations match the structural recursions."""
    failures, checked = [], 0
    for name, system, p in _suite_systems(seed, size):
        lts = system.reachable_lts(p, 60)
        derivs = lts.derivations
        for t in derivs:
            if not in_tr_sbullet(t):
                continue
            for u in derivs:
                direct = conc(t, u, ConcVariant.DYN_DIRECT)
                ind = inductive_conc(t, u, "dynamic")
                static = conc(t, u, ConcVariant.STATIC)
                ind_s = inductive_conc(t, u, "static")
                checked += 1
                if direct != ind or static != ind_s:
                    failures.append({
                        "system": name, "t": deriv_name(t), "u": deriv_name(u),
                        "direct": direct, "inductive": ind,
                        "static": static, "inductive-static": ind_s,
                    })
                if in_tr_bullet(t):
                    gh = gh_conc(t, u)
                    want = conc(t, u, ConcVariant.DYN) \
                        and t.source is u.source
                    checked += 1
                    if gh != want:
                        failures.append({
                            "system": name, "t": deriv_name(t),
                            "u": deriv_name(u), "gh": gh, "dyn+src": want,
                        })
    return SuiteResult("inductive-oracle", not failures, checked, failures)


def suite_fair_implies_just(seed: int = 7, size: int = 10,
                            lasso_limit: int = 12) -> SuiteResult:
    """Fairness lattice, closure into justness, progress as fairness."""
    failures, checked = [], 0
    for name, system, p in _suite_systems(seed, size):
        try:
            lts = system.reachable_lts(p, 40)
        except BoundExceeded:
            continue
        fam_conc = tasks_from_conc(lts)
        fam_prog = tasks_progress(lts)
        for lasso in simple_lassos(system, p, 2, 3, lasso_limit):
            for blocking in blocking_grid(system, 2):
                strong = is_fair(lasso, system, blocking, fam_conc, "strong").holds
                weak = is_fair(lasso, system, blocking, fam_conc, "weak").holds
                jmode = is_fair(lasso, system, blocking, fam_conc, "j").holds
                just = is_just(lasso, system, blocking, ConcVariant.DYN).holds
                prog = is_progressing(lasso, system, blocking).holds
                modes_prog = [is_fair(lasso, system, blocking, fam_prog, m).holds
                              for m in ("strong", "weak", "j")]
                checked += 1
                if strong and not weak:
                    failures.append({"system": name, "lasso": str(lasso),
                                     "rule": "strong=>weak"})
                if weak and not jmode:
                    failures.append({"system": name, "lasso": str(lasso),
                                     "rule": "weak=>j"})
                if (strong or weak) and not just:
                    failures.append({"system": name, "lasso": str(lasso),
                                     "blocking": sorted(map(str, blocking)),
                                     "rule": "fair=>just"})
                if any(m != prog for m in modes_prog):
                    failures.append({"system": name, "lasso": str(lasso),
                                     "rule": "progress-as-fairness",
                                     "modes": modes_prog, "progress": prog})
    return SuiteResult("fair-implies-just", not failures, checked, failures)


def suite_feasibility(seed: int = 7, size: int = 10,
                      prefix_limit: int = 10) -> SuiteResult:
    """Every finite path extends to a just lasso within budget."""
    failures, checked = [], 0
    for name, system, p in _suite_systems(seed, size):
        try:
            lts = system.reachable_lts(p, 40)
        except BoundExceeded:
            continue
        budget = 10 * len(lts.states) * max(1, len(lts.derivations))
        prefixes = [l for l in simple_lassos(system, p, 3, 0, prefix_limit)
                    if l.is_finite]
        for prefix in prefixes:
            for blocking in blocking_grid(system, 2):
                checked += 1
                try:
                    out = extend_to_just(system, prefix, blocking,
                                         ConcVariant.DYN, budget)
                except Exception as e:  # noqa: BLE001 - report, don't crash
                    failures.append({"system": name, "prefix": str(prefix),
                                     "error": repr(e)})
                    continue
                if not is_just(out, system, blocking, ConcVariant.DYN).holds:
                    failures.append({"system": name, "prefix": str(prefix),
                                     "issue": "extension not just",
                                     "result": str(out)})
                if any(d.label in blocking or not in_tr_bullet(d)
                       for d in (out.stem + out.cycle)[len(prefix.stem):]):
                    failures.append({"system": name, "prefix": str(prefix),
                                     "issue": "blocked or receptive step used"})
    return SuiteResult("feasibility", not failures, checked, failures)


def suite_discard_lemma(seed: int = 7, size: int = 14) -> SuiteResult:
    """Discard transitions exist exactly at states that cannot receive."""
    failures, checked = [], 0
    for name, system, p in _suite_systems(seed, size):
        if not system.calc.has_discards:
            continue
        try:
            lts = system.reachable_lts(p, 40)
        except BoundExceeded:
            continue
        for state in lts.states:
            for b in system.broadcast_universe:
                checked += 1
                try:
                    derivable = system.discard_check(state, b)
                except AssertionError as e:
                    failures.append({"system": name,
                                     "state": print_process(state),
                                     "error": str(e)})
                    continue
                # a discard, when derivable, is a self-loop
                lbl = mk_label("discard", b)
                for d in system.derivations(state):
                    if d.label is lbl and d.target is not state:
                        failures.append({"system": name,
                                         "state": print_process(state),
                                         "issue": "discard not a self-loop"})
    return SuiteResult("discard-lemma", not failures, checked, failures)


def suite_abc_abcd(seed: int = 7, size: int = 14) -> SuiteResult:
    """ABC and ABCd induce the same transitions, discards aside."""
    failures, checked = [], 0
    rng = random.Random(seed)
    terms = ["b! | (b? + c)", "0", "b!.b? | (b?.c + b!)",
             "(b? | b!) \\ {c}", "b?.0 | b?.0"]
    terms += [random_term(rng, Calculus.ABC, 3) for _ in range(size)]
    from .terms import DialectError
    for text in terms:
        checked += 1
        try:
            ok = abc_abcd_agreement(text, bound=40)
        except (BoundExceeded, DialectError):
            continue
        except Exception as e:  # noqa: BLE001
            failures.append({"term": text, "error": repr(e)})
            continue
        if not ok:
            failures.append({"term": text, "issue": "transition sets differ"})
    return SuiteResult("abc-abcd", not failures, checked, failures)


SUITES = {
    "agreement-static-dynamic": suite_agreement_static_dynamic,
    "agreement-coinductive": suite_agreement_coinductive,
    "inductive-oracle": suite_inductive_oracle,
    "fair-implies-just": suite_fair_implies_just,
    "feasibility": suite_feasibility,
    "discard-lemma": suite_discard_lemma,
    "abc-abcd": suite_abc_abcd,
}


def run_suites(names=None, seed: int = 7, size: int | None = None) -> list[SuiteResult]:
    names = list(names or SUITES)
    out = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; "
                           f"choose from {', '.join(SUITES)}")
        fn = SUITES[name]
        out.append(fn(seed=seed) if size is None else fn(seed=seed, size=size))
    return out
