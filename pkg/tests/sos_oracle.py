"""A second, rule-by-rule implementation of the operational semantics.

Used only as a test oracle.  Every inference rule of every dialect is
written out as its own generator over (name-tree, label, target) facts;
no code is shared with the package's engine beyond the term data model.
Results are canonical JSON strings so the comparison is a set equality.
"""

from __future__ import annotations

import json

from justness.terms import (
    TAU, Agent, Calculus, Label, Nil, Par, Prefix, Process, Relabel,
    Restrict, Signalled, Sum, mk_label, print_process,
)

BCAST_TABLE = {
    ("bcast", "recv"): "bcast", ("recv", "bcast"): "bcast",
    ("recv", "recv"): "recv",
}
BCAST_TABLE_D = dict(BCAST_TABLE)
BCAST_TABLE_D.update({
    ("bcast", "discard"): "bcast", ("discard", "bcast"): "bcast",
    ("recv", "discard"): "recv", ("discard", "recv"): "recv",
    ("discard", "discard"): "discard",
})


def _label_json(l: Label) -> str:
    return str(l)


class Oracle:
    def __init__(self, calc: Calculus, env, universe):
        self.calc = calc
        self.env = env
        self.universe = tuple(universe)
        self.memo: dict = {}

    # each fact is (tree, label, target)
    def facts(self, p: Process):
        if p in self.memo:
            return self.memo[p]
        self.memo[p] = out = []
        out.extend(self.rule_act(p))
        out.extend(self.rule_sum_l(p))
        out.extend(self.rule_sum_r(p))
        out.extend(self.rule_par_l(p))
        out.extend(self.rule_par_r(p))
        out.extend(self.rule_comm(p))
        out.extend(self.rule_res(p))
        out.extend(self.rule_rel(p))
        out.extend(self.rule_rec(p))
        if self.calc.has_broadcast:
            out.extend(self.rule_bro_c(p))
            if self.calc is Calculus.ABC:
                out.extend(self.rule_bro_l(p))
                out.extend(self.rule_bro_r(p))
        if self.calc.has_discards:
            out.extend(self.rule_discard_nil(p))
            out.extend(self.rule_discard_prefix(p))
            out.extend(self.rule_discard_sum(p))
            out.extend(self.rule_discard_rec(p))
        if self.calc.has_signals:
            out.extend(self.rule_sig_emit(p))
            out.extend(self.rule_sig_sum(p))
            out.extend(self.rule_sig_par(p))
            out.extend(self.rule_sig_read(p))
            out.extend(self.rule_sig_skip_act(p))
            out.extend(self.rule_sig_skip_emit(p))
            out.extend(self.rule_sig_res(p))
            out.extend(self.rule_sig_rel(p))
            out.extend(self.rule_sig_rec(p))
        return out

    def admits(self, p: Process, label: Label) -> bool:
        return any(l is label for (_, l, _) in self.facts(p))

    # ----- CCS core rules -------------------------------------------------
    def rule_act(self, p):
        if isinstance(p, Prefix):
            yield (["act", str(p.label), print_process(p.body)],
                   p.label, p.body)

    def _eta(self, l: Label) -> bool:
        """May the label interleave through | while the other side waits?"""
        if self.calc is Calculus.CCS:
            return l.is_action
        if self.calc in (Calculus.ABC, Calculus.ABCD):
            return l.kind in ("name", "coname", "tau")
        return l.is_action  # CCSS: all actions, emissions handled separately

    def rule_sum_l(self, p):
        if isinstance(p, Sum):
            for (tr, l, tgt) in self.facts(p.left):
                if l.is_action:
                    yield (["sum_l", tr, print_process(p.right)], l, tgt)

    def rule_sum_r(self, p):
        if isinstance(p, Sum):
            for (tr, l, tgt) in self.facts(p.right):
                if l.is_action:
                    yield (["sum_r", print_process(p.left), tr], l, tgt)

    def rule_par_l(self, p):
        if isinstance(p, Par):
            for (tr, l, tgt) in self.facts(p.left):
                if self._eta(l):
                    yield (["par_l", tr, print_process(p.right)], l,
                           _par(tgt, p.right))

    def rule_par_r(self, p):
        if isinstance(p, Par):
            for (tr, l, tgt) in self.facts(p.right):
                if self._eta(l):
                    yield (["par_r", print_process(p.left), tr], l,
                           _par(p.left, tgt))

    def rule_comm(self, p):
        if isinstance(p, Par):
            for (tl, ll, gl) in self.facts(p.left):
                comp = ll.complement()
                if comp is None:
                    continue
                for (tr, lr, gr) in self.facts(p.right):
                    if lr is comp:
                        yield (["par_both", tl, tr], TAU, _par(gl, gr))

    def rule_res(self, p):
        if isinstance(p, Restrict):
            for (tr, l, tgt) in self.facts(p.body):
                if l.kind in ("name", "coname", "signal", "emission") \
                        and l.name in p.names:
                    continue
                yield (["restrict", tr, list(p.names)], l,
                       _restrict(tgt, p.names))

    def rule_rel(self, p):
        if isinstance(p, Relabel):
            for (tr, l, tgt) in self.facts(p.body):
                yield (["relabel", tr, {a: b for a, b in p.f.pairs}],
                       p.f.apply(l), _relabel(tgt, p.f))

    def rule_rec(self, p):
        if isinstance(p, Agent):
            for (tr, l, tgt) in self.facts(self.env.body(p.name)):
                if l.is_action:
                    yield (["rec", p.name, tr], l, tgt)

    # ----- ABC broadcast rules --------------------------------------------
    def rule_bro_l(self, p):
        if isinstance(p, Par):
            for (tr, l, tgt) in self.facts(p.left):
                if l.kind in ("bcast", "recv") \
                        and not self.admits(p.right, mk_label("recv", l.name)):
                    yield (["par_l", tr, print_process(p.right)], l,
                           _par(tgt, p.right))

    def rule_bro_r(self, p):
        if isinstance(p, Par):
            for (tr, l, tgt) in self.facts(p.right):
                if l.kind in ("bcast", "recv") \
                        and not self.admits(p.left, mk_label("recv", l.name)):
                    yield (["par_r", print_process(p.left), tr], l,
                           _par(p.left, tgt))

    def rule_bro_c(self, p):
        table = BCAST_TABLE_D if self.calc.has_discards else BCAST_TABLE
        if isinstance(p, Par):
            for (tl, ll, gl) in self.facts(p.left):
                for (tr, lr, gr) in self.facts(p.right):
                    if ll.name != lr.name:
                        continue
                    kind = table.get((ll.kind, lr.kind))
                    if kind is not None:
                        yield (["par_both", tl, tr],
                               mk_label(kind, ll.name), _par(gl, gr))

    # ----- ABCd discard rules ----------------------------------------------
    def rule_discard_nil(self, p):
        if isinstance(p, Nil):
            for b in self.universe:
                yield (["discard0", b], mk_label("discard", b), p)

    def rule_discard_prefix(self, p):
        if isinstance(p, Prefix):
            for b in self.universe:
                if not (p.label.kind == "recv" and p.label.name == b):
                    yield (["discard", b, print_process(p)],
                           mk_label("discard", b), p)

    def rule_discard_sum(self, p):
        if isinstance(p, Sum):
            for (tl, ll, _) in self.facts(p.left):
                if ll.kind != "discard":
                    continue
                for (tr, lr, _) in self.facts(p.right):
                    if lr is ll:
                        yield (["sum_both", tl, tr], ll, p)

    def rule_discard_rec(self, p):
        if isinstance(p, Agent):
            for (tr, l, _) in self.facts(self.env.body(p.name)):
                if l.kind == "discard":
                    yield (["rec", p.name, tr], l, p)

    # ----- CCSS signal rules -----------------------------------------------
    def rule_sig_emit(self, p):
        if isinstance(p, Signalled):
            yield (["sig", print_process(p.body), p.signal],
                   mk_label("emission", p.signal), p)

    def rule_sig_sum(self, p):
        if isinstance(p, Sum):
            for (tr, l, _) in self.facts(p.left):
                if l.kind == "emission":
                    yield (["sum_l", tr, print_process(p.right)], l, p)
            for (tr, l, _) in self.facts(p.right):
                if l.kind == "emission":
                    yield (["sum_r", print_process(p.left), tr], l, p)

    def rule_sig_par(self, p):
        if isinstance(p, Par):
            for (tr, l, _) in self.facts(p.left):
                if l.kind == "emission":
                    yield (["par_l", tr, print_process(p.right)], l, p)
            for (tr, l, _) in self.facts(p.right):
                if l.kind == "emission":
                    yield (["par_r", print_process(p.left), tr], l, p)

    def rule_sig_read(self, p):
        """Reading a signal emitted by the sibling component."""
        if isinstance(p, Par):
            for (te, le, _) in self.facts(p.left):
                if le.kind != "emission":
                    continue
                for (tr, lr, gr) in self.facts(p.right):
                    if lr.kind == "signal" and lr.name == le.name:
                        yield (["par_both", te, tr], TAU, _par(p.left, gr))
            for (te, le, _) in self.facts(p.right):
                if le.kind != "emission":
                    continue
                for (tl, ll, gl) in self.facts(p.left):
                    if ll.kind == "signal" and ll.name == le.name:
                        yield (["par_both", tl, te], TAU, _par(gl, p.right))

    def rule_sig_skip_act(self, p):
        if isinstance(p, Signalled):
            for (tr, l, tgt) in self.facts(p.body):
                if l.is_action:
                    yield (["sig_skip", tr, p.signal], l, tgt)

    def rule_sig_skip_emit(self, p):
        if isinstance(p, Signalled):
            for (tr, l, _) in self.facts(p.body):
                if l.kind == "emission":
                    yield (["sig_skip", tr, p.signal], l, p)

    def rule_sig_res(self, p):
        return ()  # emissions through restriction are covered by rule_res

    def rule_sig_rel(self, p):
        return ()  # and by rule_rel

    def rule_sig_rec(self, p):
        if isinstance(p, Agent):
            for (tr, l, _) in self.facts(self.env.body(p.name)):
                if l.kind == "emission":
                    yield (["rec", p.name, tr], l, p)


def _par(a, b):
    from justness.terms import mk_par
    return mk_par(a, b)


def _restrict(a, names):
    from justness.terms import mk_restrict
    return mk_restrict(a, names)


def _relabel(a, f):
    from justness.terms import mk_relabel
    return mk_relabel(a, f)


def oracle_facts(p: Process, calc: Calculus, env, universe) -> set:
    """Canonical (tree, source, label, target) facts for comparison."""
    oracle = Oracle(calc, env, universe)
    return {
        json.dumps([tree, print_process(p), str(l), print_process(t)],
                   sort_keys=True)
        for (tree, l, t) in oracle.facts(p)
    }


def enumerate_terms(calc: Calculus, depth: int):
    """All closed terms over two names up to the given AST depth."""
    from justness.terms import (
        NIL, mk_par, mk_prefix, mk_restrict, mk_sum, mk_signalled,
    )
    if calc is Calculus.CCS:
        labels = ["a", "'a", "b", "'b", "tau"]
    elif calc.has_broadcast:
        labels = ["a", "'a", "tau", "b!", "b?"]
    else:
        labels = ["a", "'a", "tau", "s"]
    from justness.terms import parse_label
    signals = frozenset({"s"}) if calc.has_signals else frozenset()
    acts = [parse_label(l, signals) for l in labels]

    level = [NIL]
    seen = set(level)
    for _ in range(depth - 1):
        nxt = list(level)
        for t in level:
            for a in acts:
                nxt.append(mk_prefix(a, t))
            if calc.has_signals:
                nxt.append(mk_signalled(t, "s"))
            nxt.append(mk_restrict(t, ("a",)))
        for t in level:
            for u in level:
                nxt.append(mk_sum(t, u))
                nxt.append(mk_par(t, u))
        level = [t for t in dict.fromkeys(nxt)]
    return [t for t in level if t not in seen or t is NIL]
