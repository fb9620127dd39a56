"""Test compliance of a component under test, and suitability of tests for a choreography."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable

from .machines import DEADLOCK, DEFAULT_BOUND, TRUNCATED, Cfsm, System, explore
from .projection import project
from .syntax import GChor
from .testgen import TestCase, TestSuite, validate_test_case

NO_SUCCESS = "no-successful-stable-config"


class InvalidTestError(ValueError):
    pass


class NonLocalCutError(ValueError):
    pass


@dataclass
class Failure:
    run: object
    reason: str

    def to_json(self) -> dict:
        return {"reason": self.reason, **self.run.to_json()}


@dataclass
class ComplianceVerdict:
    compliant: bool
    channels_checked: frozenset
    runs_examined: int
    exhaustive: bool
    failures: list = field(default_factory=list)
    configurations: int = 0
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {
            "compliant": self.compliant,
            "channelsChecked": sorted(a + b for a, b in self.channels_checked),
            "runsExamined": self.runs_examined,
            "exhaustive": self.exhaustive,
            "configurations": self.configurations,
            "seconds": round(self.seconds, 6),
            "failures": [f.to_json() for f in self.failures],
        }


def test_system(cut_machine: Cfsm, t: TestCase) -> System:
    machines = {t.cut: cut_machine}
    for m in t.members:
        if m.participant == t.cut:
            raise InvalidTestError(f"test member {m.participant} is the CUT")
        machines[m.participant] = m.machine
    return System(machines)


test_system.__test__ = False


def compliant(cut_machine: Cfsm, t: TestCase, channels: Iterable[tuple] | None = None,
              bound: int = DEFAULT_BOUND) -> ComplianceVerdict:
    """Every finite maximal run of CUT plus test must pass through a configuration that is
    stable on ``channels`` and has each test member in one of its success states."""
    started = time.perf_counter()
    problems = validate_test_case(t)
    if problems:
        raise InvalidTestError("; ".join(str(p) for p in problems))
    if not cut_machine.is_local(t.cut):
        raise NonLocalCutError(f"CUT machine is not {t.cut}-local")
    sys = test_system(cut_machine, t)
    chans = frozenset(sys.channels()) if channels is None else frozenset(channels)
    success = {m.participant: m.success for m in t.members}
    runs = explore(sys, bound, success=(chans, success))
    failures = []
    for r in runs:
        if r.status == TRUNCATED:
            failures.append(Failure(r, TRUNCATED))
        elif not r.succeeded:
            failures.append(Failure(r, DEADLOCK if r.status == DEADLOCK else NO_SUCCESS))
    return ComplianceVerdict(
        compliant=runs.exhaustive and not failures,
        channels_checked=chans,
        runs_examined=len(runs),
        exhaustive=runs.exhaustive,
        failures=failures,
        configurations=runs.configurations_visited,
        seconds=time.perf_counter() - started,
    )


def suitable(g: GChor, cut: str, t: TestCase, bound: int = DEFAULT_BOUND) -> bool:
    return compliant(project(g, cut), t, None, bound).compliant


@dataclass
class SuiteReport:
    cut: str
    verdicts: list                 # (TestCase, ComplianceVerdict) pairs
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(v.compliant for _, v in self.verdicts)

    def by_subtree(self) -> dict:
        out: dict = {}
        for case, v in self.verdicts:
            out[case.subtree] = out.get(case.subtree, True) and v.compliant
        return out

    def failing(self) -> list:
        return [(c, v) for c, v in self.verdicts if not v.compliant]

    def to_json(self) -> dict:
        return {
            "cut": self.cut,
            "passed": self.passed,
            "cases": len(self.verdicts),
            "failed": len(self.failing()),
            "seconds": round(self.seconds, 6),
            "subtrees": {str(k): v for k, v in self.by_subtree().items()},
            "verdicts": [
                {"index": i, "subtree": c.subtree, "provenance": dict(c.provenance), **v.to_json()}
                for i, (c, v) in enumerate(self.verdicts)
            ],
        }


def check_suite(cut_machine: Cfsm, suite: TestSuite, channels=None, bound: int = DEFAULT_BOUND) -> SuiteReport:
    started = time.perf_counter()
    verdicts = [(c, compliant(cut_machine, c, channels, bound)) for c in suite.cases]
    return SuiteReport(suite.cut, verdicts, time.perf_counter() - started)
