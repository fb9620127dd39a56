"""Acceptance criteria; ``pytest`` prints one PASS/FAIL line per criterion at the end."""

import time

import pytest

import test_compliance as compliance_props
import test_machines as machine_props
import test_semantics as semantic_props
import test_testgen as testgen_props
from choreotest.compliance import DEADLOCK, compliant, suitable, test_system
from choreotest.corpus import ATM, ATM_FORK, ATM_FULL
from choreotest.machines import bisimilar, explore, find_isomorphism, is_deadlock, system_language
from choreotest.projection import project, project_system
from choreotest.semantics import in_language, language, sem
from choreotest.syntax import parse, subtrees
from choreotest.testgen import gen_tests, make_test, split, split_raw, validate_test_case

from figures import (FIG1_A, FIG1_B, FIG1_C, FIG3_A, FIG3_B, FIG3_C, MIXED_A, MIXED_B_DASHED, MIXED_B_SOLID,
                     MIXED_C_DASHED, MIXED_C_SOLID, machine)

criterion = pytest.mark.criterion


def elapsed(since: float) -> float:
    return time.perf_counter() - since


@criterion(1, "projection of the running example matches the reference machines")
def test_c1_running_example_projection():
    t0 = time.perf_counter()
    sys = project_system(parse(ATM))
    assert len(sys["C"].states) == 4 and len(sys["B"].states) == 4 and len(sys["A"].states) == 7
    assert find_isomorphism(sys["C"], FIG1_C) is not None
    assert find_isomorphism(sys["B"], FIG1_B) is not None
    assert find_isomorphism(sys["A"], FIG1_A) is not None
    # merging the two final states of A gives a behaviourally equal machine
    merged = machine("""
a1 CA?withdraw a2
a2 AB!authW a3
a3 BA?deny a4
a4 AC!bye a5
a3 BA?allow a6
a6 AC!money a5
""")
    assert bisimilar(sys["A"], merged)
    assert elapsed(t0) < 1.0


@criterion(2, "language of the running example equals the language of its projection")
def test_c2_language_agreement():
    t0 = time.perf_counter()
    g = parse(ATM)
    runs = explore(project_system(g))
    assert runs.exhaustive and len(runs) == 2 and all(len(r) == 8 for r in runs)
    prefixes = [r.trace[:i] for r in runs for i in range(len(r) + 1)]
    assert len(prefixes) == 18
    assert all(in_language(g, w) for w in prefixes)
    assert language(g, 8) == system_language(project_system(g)).traces(8) == set(prefixes)
    assert elapsed(t0) < 1.0


@criterion(3, "pomset semantics of the running example and of its fork variant")
def test_c3_semantics():
    family = sem(parse(ATM))
    assert len(family) == 2
    assert all(p.size == 8 and p.is_chain() for p in family)
    (fork,) = sem(parse(ATM_FORK))
    assert fork.size == 12
    name = {e: str(a) for e, a in enumerate(fork.labels)}
    assert {(name[a], name[b]) for a, b in fork.reduction()} == {
        ("CA!withdraw", "CA?withdraw"), ("CA?withdraw", "AB!authW"), ("AB!authW", "AB?authW"),
        ("AB?authW", "BA!deny"), ("BA!deny", "BA?deny"), ("BA?deny", "AC!bye"), ("AC!bye", "AC?bye"),
        ("AB?authW", "BA!allow"), ("BA!allow", "BA?allow"), ("BA?allow", "AC!money"),
        ("AC!money", "AC?money"),
    }


@criterion(4, "split counts for the bank and the client")
def test_c4_split_counts():
    sys = project_system(parse(ATM_FULL))
    for bank in (sys["B"], FIG3_B):
        assert len(split_raw(bank)) == 4
        assert len(split(bank)) == 3
    for client in (sys["C"], FIG3_C):
        assert len(split(client)) == 3
    assert find_isomorphism(sys["A"], FIG3_A) is not None


@criterion(5, "nine valid tests per subtree of the complete ATM with the ATM as CUT")
def test_c5_nine_tests():
    t0 = time.perf_counter()
    g = parse(ATM_FULL)
    subs = subtrees(g)
    for s in subs:
        suite = gen_tests(g, "A", which=[s.root])
        assert len(suite.cases) == 9
        assert all(validate_test_case(c) == [] for c in suite.cases)
    assert elapsed(t0) < 5.0


@criterion(6, "every generated test is suitable")
def test_c6_generated_tests_are_suitable():
    t0 = time.perf_counter()
    checked = 0
    for text in (ATM, ATM_FULL):
        g = parse(text)
        for cut in ("A", "B", "C"):
            suite = gen_tests(g, cut)
            assert suite.cases
            for case in suite.cases:
                v = compliant(project(g, cut), case)
                assert v.compliant and v.exhaustive, (cut, case.subtree)
                checked += 1
    assert checked == 22 + 11 + 22 + 315 + 105 + 105
    assert elapsed(t0) < 30.0


@criterion(7, "compliance verdicts of the worked examples")
def test_c7_compliance_examples():
    b_no_allow = FIG1_B.without(t for t in FIG1_B.transitions if str(t.action) == "BA!allow")
    a_no_deny = FIG1_A.without(t for t in FIG1_A.transitions if str(t.action) == "BA?deny")
    t1 = make_test("B", [("A", FIG1_A, {"A5", "A7"}), ("C", FIG1_C, {"C3", "C4"})])
    assert compliant(FIG1_B, t1).compliant
    assert not compliant(FIG1_B, make_test("B", [("A", FIG1_A, {"A3"}), ("C", FIG1_C, {"C3", "C4"})])).compliant
    assert not compliant(FIG1_B, make_test("B", [("A", FIG1_A, {"A7"}), ("C", FIG1_C, {"C3"})])).compliant
    assert compliant(b_no_allow, t1).compliant
    assert not compliant(b_no_allow, make_test("B", [("A", FIG1_A, {"A7"}), ("C", FIG1_C, {"C4"})])).compliant
    assert not compliant(b_no_allow,
                         make_test("B", [("A", a_no_deny, {"A7"}), ("C", FIG1_C, {"C3", "C4"})])).compliant
    assert compliant(FIG1_A, make_test("A", [("B", b_no_allow, {"B3"}), ("C", FIG1_C, {"C3", "C4"})])).compliant
    assert suitable(parse(ATM), "B", t1)


@criterion(8, "mixed-choice split: dashed test deadlocks, solid test passes")
def test_c8_mixed_choice():
    dashed = make_test("A", [("B", MIXED_B_DASHED, {"q4"}), ("C", MIXED_C_DASHED, {"q3"})])
    v = compliant(MIXED_A, dashed)
    assert not v.compliant
    assert [f.reason for f in v.failures] == [DEADLOCK]
    run = v.failures[0].run
    assert is_deadlock(test_system(MIXED_A, dashed), run.configurations[-1])
    solid = make_test("A", [("B", MIXED_B_SOLID, {"q4"}), ("C", MIXED_C_SOLID, {"q3"})])
    assert compliant(MIXED_A, solid).compliant


@criterion(9, "property-based suites")
def test_c9_properties():
    semantic_props.test_prefix_closure()
    machine_props.test_buffer_conservation()
    for text in (ATM, ATM_FULL):
        testgen_props.test_oracle_existence(text)
    semantic_props.test_linearization_count_matches_permutations()
    compliance_props.test_fewer_channels_never_hurt()


@criterion(10, "every output-deletion mutant of the ATM fails some generated test")
def test_c10_mutation_sensitivity():
    t0 = time.perf_counter()
    g = parse(ATM_FULL)
    cut = project(g, "A")
    suite = gen_tests(g, "A")
    outputs = [t for t in cut.transitions if t.action.is_output]
    assert len(outputs) == 9
    for t in outputs:
        mutant = cut.without([t])
        assert any(not compliant(mutant, case).compliant for case in suite.cases), str(t)
    assert elapsed(t0) < 60.0
