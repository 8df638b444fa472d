"""Acceptance criteria, one test per criterion, each printing a verdict
line.  Budgets are wall-clock on the machine running the suite."""

import itertools
import json
import time

import pytest

from conftest import build, the
from justness.concurrency import ConcVariant, conc, gh_conc, inductive_conc
from justness.corpus import (
    blocking_grid, load_corpus, random_systems, simple_lassos,
)
from justness.criteria import (
    coinductive_is_just, extend_to_just, is_fair, tasks_from_conc,
    tasks_progress,
)
from justness.paths import is_just, is_progressing, is_sigjust, make_lasso
from justness.semantics import (
    System, abc_abcd_agreement, deriv_name, deriv_to_tree, in_tr_bullet,
    in_tr_sbullet,
)
from justness.synchrons import deriv_synchrons
from justness.terms import Calculus, parse_label, print_process

V = ConcVariant
CHAIN = (V.STATIC, V.STATIC_PRIME, V.C_PRIME, V.C)
JUST_VARIANTS = (V.DYN, V.STATIC, V.C, V.STATIC_PRIME, V.C_PRIME)


def report(n, name, ok, detail=""):
    print(f"\n[criterion {n:2d}] {'PASS' if ok else 'FAIL'}  {name}"
          + (f"  ({detail})" if detail else ""))
    assert ok, f"criterion {n} failed: {name} {detail}"


# -- corpora ----------------------------------------------------------------

def _named_systems():
    out = []
    for entry in load_corpus():
        entry.load()
        out.append((entry.name, entry.system, entry.term))
    return out


def _relation_corpus(count_per_dialect=50):
    """At least 200 guarded systems with at most 30 reachable states."""
    out = []
    for calc, seed in ((Calculus.CCS, 1000), (Calculus.ABC, 2000),
                       (Calculus.ABCD, 3000), (Calculus.CCSS_PRED, 4000)):
        for system, p, lts in random_systems(seed, count_per_dialect, calc):
            out.append((system, p, lts))
    out2 = []
    for name, system, p in _named_systems():
        lts = system.reachable_lts(p, 40)
        out2.append((system, p, lts))
    return out + out2


def _lasso_corpus():
    """Small systems whose simple lassos can be enumerated in full."""
    picked = []
    for name, system, p in _named_systems():
        picked.append((name, system, p))
    for calc, seed in ((Calculus.CCS, 5000), (Calculus.ABC, 6000),
                       (Calculus.ABCD, 7000), (Calculus.CCSS_PRED, 8000)):
        for i, (system, p, lts) in enumerate(random_systems(seed, 6, calc,
                                                            max_states=12,
                                                            depth=3)):
            if max(len([d for d in system.derivations(q)
                        if d.label.is_action]) for q in lts.states) <= 5:
                picked.append((f"rand-{calc.value}-{i}", system, p))
    return picked


# -- criteria ----------------------------------------------------------------

def test_criterion_1_golden_synchrons(concurrent_example):
    t0 = time.monotonic()
    system, p, chi_tau, chi_d, chi_e = concurrent_example
    got = {
        "tau": sorted(str(s) for s in deriv_synchrons(chi_tau)),
        "d": sorted(str(s) for s in deriv_synchrons(chi_d)),
        "e": sorted(str(s) for s in deriv_synchrons(chi_e)),
    }
    want = {
        "tau": ["\\c |_L +_L (c^Q)", "\\c |_R ('c^T)"],
        "d": ["\\c |_L +_R |_L (d^R)"],
        "e": ["\\c |_L +_R |_R (e^S)"],
    }
    elapsed = time.monotonic() - t0
    report(1, "golden synchron sets", got == want and elapsed < 1.0,
           f"{elapsed:.3f}s")


def test_criterion_2_asymmetry_goldens():
    bsys, bp = build("b! | (b? + c)", "abc")
    chi, v = the(bsys, bp, "b!"), the(bsys, bp, "c")
    bcast_ok = conc(chi, v, V.DYN) and not conc(v, chi, V.DYN)
    ssys, sp = build("a ^ s | s", "ccss")
    chi2, v2 = the(ssys, sp, "a"), the(ssys, sp, "tau")
    sig_ok = conc(chi2, v2, V.DYN) and not conc(v2, chi2, V.DYN)
    report(2, "asymmetric concurrency goldens", bcast_ok and sig_ok)


def test_criterion_3_relation_chain():
    t0 = time.monotonic()
    corpus = _relation_corpus()
    systems = len(corpus)
    violations, pairs = [], 0
    for system, p, lts in corpus:
        derivs = lts.derivations[:40]
        sb = [t for t in derivs if in_tr_sbullet(t)]
        for t in sb:
            if in_tr_bullet(t):
                for v in JUST_VARIANTS:
                    if conc(t, t, v):
                        violations.append(("irreflexivity", deriv_name(t)))
            for u in derivs:
                pairs += 1
                vals = [conc(t, u, v) for v in CHAIN]
                for a, b in zip(vals, vals[1:]):
                    if a and not b:
                        violations.append((deriv_name(t), deriv_name(u), vals))
                if vals[0] and not conc(t, u, V.DYN):
                    violations.append(("static!=>dyn", deriv_name(t),
                                       deriv_name(u)))
    elapsed = time.monotonic() - t0
    report(3, "relation chain over the corpus",
           systems >= 200 and not violations and elapsed < 60.0,
           f"{systems} systems, {pairs} ordered pairs, {elapsed:.1f}s")


def test_criterion_4_inductive_oracle():
    violations, pairs = [], 0
    for system, p, lts in _relation_corpus(12):
        derivs = lts.derivations[:40]
        for t in derivs:
            if not in_tr_sbullet(t):
                continue
            for u in derivs:
                pairs += 1
                if conc(t, u, V.DYN_DIRECT) != inductive_conc(t, u, "dynamic"):
                    violations.append(("dyn", deriv_name(t), deriv_name(u)))
                if conc(t, u, V.STATIC) != inductive_conc(t, u, "static"):
                    violations.append(("static", deriv_name(t), deriv_name(u)))
                if in_tr_bullet(t) and gh_conc(t, u) != (
                        conc(t, u, V.DYN) and t.source is u.source):
                    violations.append(("gh", deriv_name(t), deriv_name(u)))
    report(4, "inductive characterisations agree", not violations,
           f"{pairs} pairs")


def test_criterion_5_justness_agreement():
    t0 = time.monotonic()
    violations, checked = [], 0
    for name, system, p in _lasso_corpus():
        for lasso in simple_lassos(system, p, 4, 4, limit=400):
            for blocking in blocking_grid(system, 4):
                verdicts = {v.value: is_just(lasso, system, blocking, v).holds
                            for v in JUST_VARIANTS}
                checked += 1
                if len(set(verdicts.values())) != 1:
                    violations.append((name, str(lasso),
                                       sorted(map(str, blocking)), verdicts))
    elapsed = time.monotonic() - t0
    report(5, "justness agreement across variants",
           not violations and elapsed < 300.0,
           f"{checked} lasso/B combinations, {elapsed:.1f}s")


def test_criterion_6_coinductive_agreement():
    from test_criteria import _subset_fallback
    violations, checked, fallback_checked = [], 0, 0
    for name, system, p in _lasso_corpus():
        small = len([l for l in system.label_universe()
                     if l.is_action or l.kind == "emission"]) <= 6
        for lasso in simple_lassos(system, p, 3, 3, limit=40):
            for blocking in blocking_grid(system, 3):
                lhs = coinductive_is_just(lasso, system, blocking).holds
                rhs = is_just(lasso, system, blocking, V.STATIC).holds
                checked += 1
                if lhs != rhs:
                    violations.append((name, str(lasso),
                                       sorted(map(str, blocking)), lhs, rhs))
        if small:
            for lasso in simple_lassos(system, p, 2, 2, limit=8):
                for blocking in blocking_grid(system, 2):
                    fallback_checked += 1
                    if coinductive_is_just(lasso, system, blocking).holds \
                            != _subset_fallback(lasso, system, blocking):
                        violations.append((name, "fallback", str(lasso)))
    report(6, "coinductive agreement", not violations,
           f"{checked} grid points, {fallback_checked} fallback points")


def test_criterion_7_feasibility():
    violations, checked = [], 0
    for name, system, p in _lasso_corpus():
        lts = system.reachable_lts(p, 40)
        budget = 10 * len(lts.states) * max(1, len(lts.derivations))
        prefixes = [l for l in simple_lassos(system, p, 3, 0, limit=25)
                    if l.is_finite]
        for prefix in prefixes:
            for blocking in blocking_grid(system, 3):
                checked += 1
                try:
                    out = extend_to_just(system, prefix, blocking, V.DYN,
                                         budget)
                except Exception as e:  # noqa: BLE001
                    violations.append((name, str(prefix), repr(e)))
                    continue
                if not is_just(out, system, blocking, V.DYN).holds:
                    violations.append((name, str(prefix), "not just"))
                new = (out.stem + out.cycle)[len(prefix.stem):]
                if any(d.label in blocking for d in new):
                    violations.append((name, str(prefix), "blocked label"))
    report(7, "feasibility of justness", not violations,
           f"{checked} extensions")


def test_criterion_8_fairness_lattice():
    violations, checked = [], 0
    for name, system, p in _lasso_corpus()[:24]:
        lts = system.reachable_lts(p, 40)
        fam = tasks_from_conc(lts)
        prog = tasks_progress(lts)
        for lasso in simple_lassos(system, p, 2, 3, limit=20):
            for blocking in blocking_grid(system, 2):
                checked += 1
                strong = is_fair(lasso, system, blocking, fam, "strong").holds
                weak = is_fair(lasso, system, blocking, fam, "weak").holds
                jf = is_fair(lasso, system, blocking, fam, "j").holds
                if strong and not weak:
                    violations.append((name, "strong=>weak", str(lasso)))
                if weak and not jf:
                    violations.append((name, "weak=>j", str(lasso)))
                if weak and not is_just(lasso, system, blocking, V.DYN).holds:
                    violations.append((name, "weak-fair=>just", str(lasso)))
                progressing = is_progressing(lasso, system, blocking).holds
                for mode in ("strong", "weak", "j"):
                    if is_fair(lasso, system, blocking, prog, mode).holds \
                            != progressing:
                        violations.append((name, "progress-as-fairness",
                                           str(lasso)))
    report(8, "fairness lattice and closure", not violations,
           f"{checked} combinations")


def test_criterion_9_sos_cross_checks():
    from sos_oracle import enumerate_terms, oracle_facts
    from justness.terms import AgentEnv

    violations = []
    # discard lemma + modified-same on reachable ABC/ABCd corpus states
    for name, system, p in _named_systems():
        if system.calc is Calculus.ABCD:
            lts = system.reachable_lts(p, 40)
            for q in lts.states:
                for b in system.broadcast_universe:
                    try:
                        system.discard_check(q, b)
                    except AssertionError:
                        violations.append(("discard", name, print_process(q)))
        if system.calc in (Calculus.ABC, Calculus.ABCD):
            if not abc_abcd_agreement(p, system_defs(name), bound=60):
                violations.append(("modified-same", name))

    # brute-force rule instantiation on all small terms over two names
    oracle_checked = 0
    for dialect in ("ccs", "abc", "abcd", "ccss", "ccss-enc"):
        calc = Calculus.from_name(dialect)
        terms = enumerate_terms(calc, 4)
        system = System(calc, None)
        system.broadcast_universe = ("b",) if calc.has_broadcast else ()
        env = AgentEnv()
        for t in terms:
            mine = {
                json.dumps([deriv_to_tree(d), print_process(d.source),
                            str(d.label), print_process(d.target)],
                           sort_keys=True)
                for d in system.derivations(t)
            }
            if mine != oracle_facts(t, calc, env, system.broadcast_universe):
                violations.append(("oracle", dialect, print_process(t)))
            oracle_checked += 1
    report(9, "SOS cross-checks", not violations,
           f"{oracle_checked} oracle terms")


def system_defs(name):
    for entry in load_corpus():
        if entry.name == name:
            return entry.defs_text
    return ""


def test_criterion_10_infeasibility_golden():
    system, p = build("0 ^ s", "ccss")
    empty = make_lasso(p, ())
    # the only path of the process is the empty one, and it is not
    # sigjust for an empty blocking set
    unfeasible = not is_sigjust(empty, system, frozenset(), V.DYN).holds
    no_steps = not any(d.label.is_action for d in system.derivations(p))
    out = extend_to_just(system, empty, frozenset(), V.DYN, 10)
    ok = unfeasible and no_steps and out is empty \
        and is_just(out, system, frozenset(), V.DYN).holds
    report(10, "sigjustness infeasibility golden", ok)
