from __future__ import annotations

import pytest

from justness.semantics import System
from justness.terms import Calculus


def build(term: str, dialect: str = "ccs", defs: str = ""):
    return System.from_text(term, dialect, defs)


def derivs_by_label(system, p):
    out = {}
    for d in system.derivations(p):
        out.setdefault(str(d.label), []).append(d)
    return out


def the(system, p, label: str):
    ds = [d for d in system.derivations(p) if str(d.label) == label]
    assert len(ds) == 1, f"expected one {label}-derivation, got {len(ds)}"
    return ds[0]


@pytest.fixture
def concurrent_example():
    """The restricted choice-vs-parallel process with its three steps."""
    defs = "Q := 0\nR := 0\nS := 0\nT := 0\n"
    system, p = build("((c.Q + (d.R | e.S)) | 'c.T) \\ {c}", "ccs", defs)
    return system, p, the(system, p, "tau"), the(system, p, "d"), \
        the(system, p, "e")


@pytest.fixture
def alice_cataline():
    system, p = build("Alice | Cataline", "ccs",
                      "Alice := call.Alice\nCataline := eat.0\n")
    return system, p


@pytest.fixture
def broadcast_example():
    system, p = build("b! | (b? + c)", "abc")
    return system, p


@pytest.fixture
def signalling_example():
    system, p = build("a ^ s | s", "ccss")
    return system, p
