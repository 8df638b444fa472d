"""Concurrency relations between derivations.

`conc(t, u, variant)` decides whether the possible occurrence of t is
unaffected by the occurrence of u.  Variants:

    DYN          via synchrons: every necessary synchron of t is
                 concurrent with every active synchron of u
    DYN_DIRECT   as DYN with direct concurrency (same-source pairs)
    STATIC       via static components, pairwise concurrent
    C            via static components, disjointness
    STATIC_PRIME / C_PRIME
                 the same two on abstract static components
    GH           same-source restriction of DYN, decided inductively

The relations are asymmetric in general: a broadcast send is unaffected
by its listeners, and reading a signal is unaffected by the emitter,
but not vice versa.

`inductive_conc` re-decides DYN_DIRECT and STATIC by structural
recursion on the two proof trees, without looking at synchrons; it
exists as an independent oracle and is cross-checked in the test suite.
"""

from __future__ import annotations

from enum import Enum

from .semantics import Derivation, System, in_tr_bullet, in_tr_sbullet
from .synchrons import (
    NotSBullet, PreconditionViolated, active_synchrons, comp_concurrent,
    comp_directly_concurrent, deriv_synchrons, necessary_synchrons,
    syn_after_deriv, syn_concurrent, syn_directly_concurrent, syn_leadsto,
    comp_sets,
)


class ConcVariant(Enum):
    DYN = "dyn"
    DYN_DIRECT = "dyn-direct"
    STATIC = "static"
    C = "c"
    STATIC_PRIME = "static-prime"
    C_PRIME = "c-prime"
    GH = "gh"

    @classmethod
    def from_name(cls, name: str) -> "ConcVariant":
        for v in cls:
            if v.value == name:
                return v
        raise ValueError(f"unknown concurrency variant {name!r}")


JUSTNESS_VARIANTS = (ConcVariant.DYN, ConcVariant.STATIC, ConcVariant.C,
                     ConcVariant.STATIC_PRIME, ConcVariant.C_PRIME)


class TypeDiscipline(TypeError):
    """The pair violates the typing of the requested relation."""


_CONC_MEMO: dict = {}


def conc(t: Derivation, u: Derivation, variant: ConcVariant) -> bool:
    """Is t unaffected by u, under the chosen variant?"""
    key = (t, u, variant)
    found = _CONC_MEMO.get(key)
    if found is None:
        found = _conc(t, u, variant)
        _CONC_MEMO[key] = found
    return found


def _require_sbullet(t: Derivation) -> None:
    if not in_tr_sbullet(t):
        raise TypeDiscipline(
            f"first argument must be in the extended domain, got {t!r}")


def _conc(t: Derivation, u: Derivation, variant: ConcVariant) -> bool:
    if variant is ConcVariant.GH:
        return gh_conc(t, u)
    _require_sbullet(t)
    if variant is ConcVariant.DYN:
        nec, act = necessary_synchrons(t), active_synchrons(u)
        return all(syn_concurrent(a, b) for a in nec for b in act)
    if variant is ConcVariant.DYN_DIRECT:
        nec, act = necessary_synchrons(t), active_synchrons(u)
        return all(syn_directly_concurrent(a, b) for a in nec for b in act)
    ct, cu = comp_sets(t), comp_sets(u)
    if variant is ConcVariant.STATIC:
        return all(comp_concurrent(g, h)
                   for g in ct["npc"] for h in cu["afc"])
    if variant is ConcVariant.C:
        return not (ct["npc"] & cu["afc"])
    if variant is ConcVariant.STATIC_PRIME:
        return all(comp_concurrent(g, h)
                   for g in ct["npc_prime"] for h in cu["afc_prime"])
    if variant is ConcVariant.C_PRIME:
        return not (ct["npc_prime"] & cu["afc_prime"])
    raise ValueError(variant)


# ---------------------------------------------------------------------------
# Successors and equivalence

def successor(t: Derivation, u: Derivation) -> bool:
    """Is u a possible future variant of t?

    Holds when the necessary synchrons correspond one-to-one under the
    synchron successor relation.
    """
    _require_sbullet(t)
    _require_sbullet(u)
    nt, nu = necessary_synchrons(t), necessary_synchrons(u)
    if len(nt) != len(nu):
        return False
    return all(any(syn_leadsto(a, b) for a in nt) for b in nu)


def equiv(t: Derivation, u: Derivation) -> bool:
    """Same necessary synchrons: interchangeable for justness purposes."""
    _require_sbullet(t)
    _require_sbullet(u)
    return necessary_synchrons(t) == necessary_synchrons(u)


def successor_after(system: System, t: Derivation, v: Derivation) -> Derivation:
    """The future variant of t enabled once v has occurred.

    Requires t unaffected by v with the two sharing a source.  The
    result is the derivation from v's target whose necessary synchrons
    are the after-images of t's; it always exists, and carries t's
    label.
    """
    _require_sbullet(t)
    if t.source is not v.source:
        raise PreconditionViolated("t and v must share their source")
    if not conc(t, v, ConcVariant.DYN):
        raise PreconditionViolated("t is affected by v")
    if not v.label.is_action:
        return t
    want = frozenset(syn_after_deriv(s, v) for s in necessary_synchrons(t))
    for u in system.derivations(v.target):
        if in_tr_sbullet(u) and necessary_synchrons(u) == want:
            return u
    raise AssertionError(
        f"no successor of {t!r} after {v!r}; expected necessary set "
        f"{{{', '.join(map(str, want))}}}")


# ---------------------------------------------------------------------------
# Inductive characterisations (synchron-free oracles)

def inductive_conc(t: Derivation, u: Derivation, which: str = "dynamic") -> bool:
    """Decide direct-dynamic or static concurrency by recursion on the
    shapes of the two proof trees.

    `which` is "dynamic" (the direct variant, agreeing with DYN on
    same-source pairs) or "static".  Dynamic operator contexts carry
    concurrency through in the dynamic variant only.
    """
    if which not in ("dynamic", "static"):
        raise ValueError(which)
    _require_sbullet(t)
    return _ind(t, u, which == "static")


def _passive(d: Derivation) -> bool:
    return d.label.is_indicatorish


def _ind(t: Derivation, u: Derivation, static: bool) -> bool:
    if _passive(u):
        return True
    tk, uk = t.kind, u.kind
    if tk in ("act", "sig", "discard0", "discard"):
        return False
    if tk == "restrict":
        return (uk == "restrict" and u.extra == t.extra
                and _ind(t.parts[0], u.parts[0], static))
    if tk == "relabel":
        return (uk == "relabel" and u.extra is t.extra
                and _ind(t.parts[0], u.parts[0], static))
    if tk in ("sum_l", "sum_r", "rec", "sig_skip", "sum_both"):
        if static:
            return False
        if tk == "sum_l":
            return uk == "sum_l" and _ind(t.parts[0], u.parts[0], static)
        if tk == "sum_r":
            return uk == "sum_r" and _ind(t.parts[1], u.parts[1], static)
        if tk == "rec":
            return (uk == "rec" and u.extra == t.extra
                    and _ind(t.parts[0], u.parts[0], static))
        if tk == "sig_skip":
            return (uk == "sig_skip" and u.extra == t.extra
                    and _ind(t.parts[0], u.parts[0], static))
        return False  # a discard sum is never a first argument
    if tk == "par_l":
        tl = t.parts[0]
        if uk == "par_r":
            return True
        if uk == "par_l":
            return _ind(tl, u.parts[0], static)
        if uk == "par_both":
            ul = u.parts[0]
            return _passive(ul) or _ind(tl, ul, static)
        return False
    if tk == "par_r":
        tr = t.parts[1]
        if uk == "par_l":
            return True
        if uk == "par_r":
            return _ind(tr, u.parts[1], static)
        if uk == "par_both":
            ur = u.parts[1]
            return _passive(ur) or _ind(tr, ur, static)
        return False
    if tk == "par_both":
        tl, tr = t.parts
        send_left = tl.label.kind == "bcast"
        send_right = tr.label.kind == "bcast"
        if uk == "par_r":
            return send_left or _ind(tr, u.parts[1], static)
        if uk == "par_l":
            return send_right or _ind(tl, u.parts[0], static)
        if uk == "par_both":
            ul, ur = u.parts
            if send_left:
                return _passive(ul) or _ind(tl, ul, static)
            if send_right:
                return _passive(ur) or _ind(tr, ur, static)
            left_ok = _passive(ul) or _ind(tl, ul, static)
            right_ok = _passive(ur) or _ind(tr, ur, static)
            return left_ok and right_ok
        return False
    raise TypeError(tk)


def gh_conc(t: Derivation, u: Derivation) -> bool:
    """The same-source concurrency relation of the broadcast calculus
    literature: defined inductively, restricted to non-blockable t."""
    if not in_tr_bullet(t):
        raise TypeDiscipline(f"first argument must be non-blockable, got {t!r}")
    if t.source is not u.source:
        return False
    return _ind(t, u, False)
