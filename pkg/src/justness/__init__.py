"""Labelled transition systems with concurrency for CCS-family calculi,
and the liveness completeness criteria (progress, justness, fairness,
feasibility) decidable on lasso-shaped paths."""

from .terms import (
    AgentEnv, Calculus, DialectError, GuardednessError, Label, ParseError,
    Process, Relabelling, mk_label, mk_relabelling, parse_definitions,
    parse_label, parse_process, print_process, TAU,
)
from .semantics import (
    BoundExceeded, Derivation, DerivClass, Ltsc, System, abc_abcd_agreement,
    classify, deriv_from_tree, deriv_name, deriv_to_tree, ltsc_to_dot,
    ltsc_to_json,
)
from .synchrons import (
    NotSBullet, PreconditionViolated, Synchron, active_synchrons,
    comp_sets, deriv_synchrons, necessary_synchrons, proc_synchrons,
    syn_after, syn_after_deriv, syn_concurrent, syn_directly_concurrent,
    syn_leadsto,
)
from .concurrency import (
    ConcVariant, TypeDiscipline, conc, equiv, gh_conc, inductive_conc,
    successor, successor_after,
)
from .paths import (
    AbstractLasso, AdjacencyError, BadBlockingSet, IndicatorInPath, Lasso,
    ShapeMismatch, Verdict, abstract_is_just, anchors, decompose, is_just,
    is_progressing, is_sigjust, make_abstract_lasso, make_lasso,
    minimal_blocking_set, suffix_lasso, to_abstract,
)
from .criteria import (
    BUILTIN_FAMILIES, Exhausted, TaskFamily, coinductive_is_just,
    extend_to_just, is_fair, least_coinductive_blocking, tasks_from_conc,
    tasks_per_action, tasks_per_transition, tasks_progress,
)

__version__ = "0.1.0"
