"""The compiled exploration kernel must agree with the pure-Python one."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from choreotest import _core
from choreotest.corpus import ATM, ATM_FORK, ATM_FULL
from choreotest.machines import System
from choreotest.projection import project_system
from choreotest.syntax import number, parse

from figures import MIXED_A, MIXED_B_DASHED, MIXED_C_DASHED, machine
from strategies import chors

try:
    from choreotest import _explore_c  # noqa: F401
    HAVE_C = True
except ImportError:
    HAVE_C = False

needs_c = pytest.mark.skipif(not HAVE_C, reason="compiled kernel not built")

SYSTEMS = {
    "atm": project_system(parse(ATM)),
    "fork": project_system(parse(ATM_FORK)),
    "full": project_system(parse(ATM_FULL)),
    "mixed": System({"A": MIXED_A, "B": MIXED_B_DASHED, "C": MIXED_C_DASHED}),
    "loop": System({"A": machine("a AB!m b\nb BA?n a"), "B": machine("c AB?m d\nd BA!n c")}),
}


def both(sys, bound, success=None):
    enc = _core.encode(sys)
    spec = enc.success_spec(*success) if success else None
    return (_core.explore(enc, bound, spec, backend="python"),
            _core.explore(enc, bound, spec, backend="cython"))


def test_backend_name():
    assert _core.BACKEND in ("cython", "python")


@needs_c
@pytest.mark.parametrize("name", sorted(SYSTEMS))
@pytest.mark.parametrize("bound", [0, 3, 7, 10_000])
def test_kernels_agree(name, bound):
    py, c = both(SYSTEMS[name], bound)
    assert [tuple(r[0]) for r in py[0]] == [tuple(r[0]) for r in c[0]]
    assert [r[1] for r in py[0]] == [r[1] for r in c[0]]
    assert py[1] == c[1]


@needs_c
def test_kernels_agree_on_success():
    sys = SYSTEMS["atm"]
    success = (None, {"B": {"B4"}, "C": {"C3", "C4"}})
    py, c = both(sys, 10_000, success)
    assert [(tuple(r[0]), r[1], bool(r[2])) for r in py[0]] == [(tuple(r[0]), r[1], bool(r[2])) for r in c[0]]
    assert sorted(bool(r[2]) for r in py[0]) == [False, True]


@needs_c
@settings(max_examples=100, deadline=None)
@given(chors(max_leaves=6), st.integers(0, 12))
def test_kernels_agree_on_random_systems(g, bound):
    sys = project_system(number(g))
    py, c = both(sys, bound)
    assert [(tuple(r[0]), r[1]) for r in py[0]] == [(tuple(r[0]), r[1]) for r in c[0]]
