import itertools
import random

import pytest

from conftest import build, the
from justness.semantics import in_tr_sbullet, is_path_step
from justness.synchrons import (
    NotSBullet, PreconditionViolated, abstract_component, active_synchrons,
    comp_concurrent, comp_directly_concurrent, comp_leadsto, comp_sets,
    comp_str, deriv_synchrons, dynamic_component, necessary_synchrons,
    proc_synchrons, static_component, syn_after, syn_after_deriv,
    syn_concurrent, syn_directly_concurrent, syn_leadsto, static_args,
)
from justness.corpus import random_systems
from justness.terms import Calculus


def strs(synchrons):
    return sorted(str(s) for s in synchrons)


def test_golden_synchron_sets(concurrent_example):
    system, p, chi_tau, chi_d, chi_e = concurrent_example
    assert strs(deriv_synchrons(chi_tau)) \
        == ["\\c |_L +_L (c^Q)", "\\c |_R ('c^T)"]
    assert strs(deriv_synchrons(chi_d)) == ["\\c |_L +_R |_L (d^R)"]
    assert strs(deriv_synchrons(chi_e)) == ["\\c |_L +_R |_R (e^S)"]
    assert strs(proc_synchrons(system, p)) == [
        "\\c |_L +_L (c^Q)",
        "\\c |_L +_R |_L (d^R)",
        "\\c |_L +_R |_R (e^S)",
        "\\c |_R ('c^T)",
    ]


def test_process_synchron_clauses():
    system, p = build("0", "ccs")
    assert proc_synchrons(system, p) == frozenset()
    system, p = build("a ^ s", "ccss")
    assert strs(proc_synchrons(system, p)) == ["(a ^s)", "^s (a^0)"]
    # ABCd: inaction and prefixes discard every broadcast in the universe
    system, p = build("b! | a.0", "abcd")
    from justness.terms import NIL, parse_process
    assert strs(proc_synchrons(system, NIL)) == ["(b:)"]
    assert strs(proc_synchrons(system, parse_process("a.0", Calculus.ABCD))) \
        == ["(a^0)", "(b:)"]
    assert strs(proc_synchrons(
        system, parse_process("b?.0", Calculus.ABCD))) == ["(b?^0)"]


def test_derivation_synchrons_subset_of_source():
    for term, dialect, defs in [
        ("((c.Q + (d.R | e.S)) | 'c.T) \\ {c}", "ccs",
         "Q := 0\nR := 0\nS := 0\nT := 0\n"),
        ("b! | (b? + c)", "abc", ""),
        ("b! | (b? + c)", "abcd", ""),
        ("a ^ s | s", "ccss", ""),
        ("A | ('c + tau)", "ccs", "A := c.A\n"),
    ]:
        system, p = build(term, dialect, defs)
        lts = system.reachable_lts(p, 40)
        for d in lts.derivations:
            assert deriv_synchrons(d) <= proc_synchrons(system, d.source), \
                (term, str(d))


def test_necessary_and_active(broadcast_example):
    system, p = broadcast_example
    chi = the(system, p, "b!")
    assert strs(necessary_synchrons(chi)) == ["|_L (b!^0)"]
    assert strs(active_synchrons(chi)) == ["|_L (b!^0)", "|_R +_L (b?^0)"]
    recv = the(system, p, "b?")
    with pytest.raises(NotSBullet):
        necessary_synchrons(recv)

    sigsys, sp = build("a ^ s | s", "ccss")
    tau = the(sigsys, sp, "tau")
    # the emitting side is passive: reading does not affect it
    assert strs(active_synchrons(tau)) == ["|_R (s^0)"]
    assert len(necessary_synchrons(tau)) == 2


def test_leadsto():
    system, p, chi_tau, chi_d, chi_e = None, None, None, None, None
    defs = "Q := 0\nR := 0\nS := 0\nT := 0\n"
    system, p = build("((c.Q + (d.R | e.S)) | 'c.T) \\ {c}", "ccs", defs)
    chi_d = the(system, p, "d")
    chi_e = the(system, p, "e")
    (s_d,) = deriv_synchrons(chi_d)
    after = the(system, chi_e.target, "d")
    (s_d2,) = deriv_synchrons(after)
    assert syn_leadsto(s_d, s_d)
    assert syn_leadsto(s_d, s_d2)
    assert not syn_leadsto(s_d2, s_d)
    chi_c = the(system, p, "tau")
    s_c = next(s for s in deriv_synchrons(chi_c) if "+_L" in str(s))
    # dropping +_L with no parallel argument below it is not a successor step
    from justness.synchrons import mk_synchron
    stripped = mk_synchron(tuple(a for a in s_c.args if a.kind != "sum_L"),
                           s_c.leaf)
    assert not syn_leadsto(s_c, stripped)


def test_concurrency_on_synchrons(concurrent_example):
    system, p, chi_tau, chi_d, chi_e = concurrent_example
    (s_d,) = deriv_synchrons(chi_d)
    (s_e,) = deriv_synchrons(chi_e)
    assert syn_directly_concurrent(s_d, s_e)
    assert syn_concurrent(s_d, s_e)
    after = the(system, chi_e.target, "d")
    (s_d2,) = deriv_synchrons(after)
    # a future variant is concurrent, but no longer directly
    assert syn_concurrent(s_d2, s_e)
    assert not syn_directly_concurrent(s_d2, s_e)
    for s in (s_d, s_e, s_d2):
        assert not syn_concurrent(s, s)


def test_concurrent_requires_matching_choice_context():
    # same-side choices erase static context but are not concurrent
    system, p = build("(a.0 | x.0) + (c.0 | y.0)", "ccs")
    syns = {str(s): s for s in proc_synchrons(system, p)}
    a = syns["+_L |_L (a^0)"]
    c = syns["+_R |_R (y^0)"]
    assert not syn_concurrent(a, c)
    assert syn_concurrent(a, syns["+_L |_R (x^0)"])


def test_concurrent_matches_bounded_preimage_search():
    """Cross-check the split characterisation against a literal search
    over successor preimages diluted with dynamic arguments."""
    from justness.synchrons import Synchron, mk_arg, mk_synchron

    def dilutions(args, pool, budget=2):
        yield args
        if budget == 0:
            return
        for i in range(len(args) + 1):
            for extra in pool:
                yield from dilutions(args[:i] + (extra,) + args[i:],
                                     pool, budget - 1)

    def leadsto_search(a, b, pool):
        # does some preimage of b under one successor step equal a?  i.e.
        # search sigma with a = sigma|_D tail and b = static(sigma)|_D tail
        if a is b:
            return True
        return syn_leadsto(a, b)

    def concurrent_search(a, b, pool):
        for cand_a in dilutions(a.args, pool):
            sa = mk_synchron(cand_a, a.leaf)
            if not syn_leadsto(sa, a):
                continue
            for cand_b in dilutions(b.args, pool):
                sb = mk_synchron(cand_b, b.leaf)
                if syn_leadsto(sb, b) and syn_directly_concurrent(sa, sb):
                    return True
        return False

    rng = random.Random(5)
    count = 0
    for system, p, lts in random_systems(11, 10, Calculus.CCS):
        syns = sorted(
            {s for q in lts.states for s in proc_synchrons(system, q)},
            key=str)
        pool = tuple({a for s in syns for a in s.args if not a.is_static})
        pool = pool + (mk_arg("rec", "Z"),)
        sample = syns if len(syns) <= 8 else rng.sample(syns, 8)
        for a, b in itertools.product(sample, repeat=2):
            assert syn_concurrent(a, b) == concurrent_search(a, b, pool), \
                (str(a), str(b))
            count += 1
    assert count > 100


def test_future_synchrons_not_concurrent():
    # successors of one synchron are never concurrent with each other
    for system, p, lts in random_systems(3, 8, Calculus.CCS):
        for q in lts.states:
            for s in proc_synchrons(system, q):
                succs = [s]
                for i, arg in enumerate(s.args):
                    if arg.is_par:
                        from justness.synchrons import mk_synchron
                        succs.append(mk_synchron(
                            static_args(s.args[:i]) + s.args[i:], s.leaf))
                for x, y in itertools.product(succs, repeat=2):
                    assert syn_leadsto(s, x) and syn_leadsto(s, y)
                    assert not syn_concurrent(x, y)


def test_after_golden(concurrent_example):
    system, p, chi_tau, chi_d, chi_e = concurrent_example
    (s_d,) = deriv_synchrons(chi_d)
    out = syn_after_deriv(s_d, chi_e)
    assert str(out) == "\\c |_L |_L (d^R)"
    # after an indicator transition nothing changes
    sigsys, sp = build("a ^ s | s", "ccss")
    em = the(sigsys, sp, "'s")
    a = the(sigsys, sp, "a")
    (s_a,) = deriv_synchrons(a)
    assert syn_after_deriv(s_a, em) is s_a
    # statically unaffected synchrons are left alone
    tau = the(sigsys, sp, "tau")
    assert syn_after_deriv(s_a, tau) is s_a
    with pytest.raises(PreconditionViolated):
        (s_tau,) = [s for s in deriv_synchrons(chi_tau) if "+_L" in str(s)]
        syn_after_deriv(s_tau, chi_d)


def test_after_membership_in_target():
    # if s lives in the source and is unaffected, s@step lives in the target
    for system, p, lts in random_systems(17, 8, Calculus.CCS):
        for d in lts.derivations:
            if not is_path_step(d):
                continue
            for s in proc_synchrons(system, d.source):
                try:
                    out = syn_after_deriv(s, d)
                except PreconditionViolated:
                    continue
                assert out in proc_synchrons(system, d.target), \
                    (str(s), str(d))


def test_components_golden(concurrent_example):
    system, p, chi_tau, chi_d, chi_e = concurrent_example
    (s_d,) = deriv_synchrons(chi_d)
    assert comp_str(dynamic_component(s_d)) == "\\c |_L +_R |_L"
    assert comp_str(static_component(s_d)) == "\\c |_L"
    assert comp_str(abstract_component(s_d)) == "|_L"
    cs_d, cs_e = comp_sets(chi_d), comp_sets(chi_e)
    assert {comp_str(g) for g in cs_d["npc"]} == {"\\c |_L"}
    assert {comp_str(g) for g in cs_d["afc"]} == {"\\c |_L"}
    assert {comp_str(g) for g in cs_e["NC"]} == {"\\c |_L +_R |_R"}
    assert {comp_str(g) for g in cs_e["npc"]} == {"\\c |_L"}

    s5, t1p = build("(c.0)[f]", "ccs", "f := [c -> c]\n")
    t1 = s5.derivations(t1p)[0]
    cs = comp_sets(t1)
    assert {comp_str(g) for g in cs["npc"]} == {"[]"}
    assert {comp_str(g) for g in cs["npc_prime"]} == {"eps"}

    # reading a signal affects the reading side only
    sigsys, sp = build("a ^ s | s", "ccss")
    tau = the(sigsys, sp, "tau")
    assert {comp_str(g) for g in comp_sets(tau)["afc"]} == {"|_R"}


def test_static_components_leadsto_is_identity():
    for system, p, lts in random_systems(23, 6, Calculus.CCS):
        comps = {static_component(s)
                 for q in lts.states for s in proc_synchrons(system, q)}
        for g, h in itertools.product(comps, repeat=2):
            if comp_leadsto(g, h):
                assert g == h or not all(a.is_static for a in g) \
                    or comp_directly_concurrent(g, h) is False
            # on static components, concurrency collapses to direct
            assert comp_concurrent(g, h) == comp_directly_concurrent(g, h)


def test_components_of_same_process_concurrent_iff_distinct():
    for calc in (Calculus.CCS, Calculus.ABC, Calculus.CCSS_PRED):
        for system, p, lts in random_systems(29, 5, calc):
            for q in lts.states:
                comps = {static_component(s)
                         for s in proc_synchrons(system, q)}
                for g, h in itertools.product(comps, repeat=2):
                    assert comp_concurrent(g, h) == (g != h), \
                        (str(q), comp_str(g), comp_str(h))


def test_synchrons_of_same_derivation_pairwise_direct():
    for calc in (Calculus.CCS, Calculus.ABC, Calculus.ABCD,
                 Calculus.CCSS_PRED):
        for system, p, lts in random_systems(31, 6, calc):
            for d in lts.derivations:
                if not in_tr_sbullet(d):
                    continue
                pool = necessary_synchrons(d) | active_synchrons(d)
                for a, b in itertools.combinations(sorted(pool, key=str), 2):
                    assert syn_directly_concurrent(a, b), (str(d), str(a), str(b))


def test_leadsto_partial_order_on_reachable_synchrons():
    for system, p, lts in random_systems(37, 6, Calculus.CCS):
        syns = sorted({s for q in lts.states
                       for s in proc_synchrons(system, q)}, key=str)
        for a in syns:
            assert syn_leadsto(a, a)
        for a, b in itertools.permutations(syns, 2):
            if syn_leadsto(a, b) and syn_leadsto(b, a):
                assert a is b
        for a, b, c in itertools.permutations(syns[:8], 3):
            if syn_leadsto(a, b) and syn_leadsto(b, c):
                assert syn_leadsto(a, c), (str(a), str(b), str(c))
