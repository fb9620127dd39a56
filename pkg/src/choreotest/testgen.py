"""Test generation: internal-choice splitting, oracle tables and test suite assembly."""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .machines import DEFAULT_BOUND, Cfsm, System, cfsm_from_json, cfsm_to_json, cfsm_to_dot, explore, isomorphic
from .projection import check_well_formed, project_system
from .semantics import advance, sem
from .syntax import GChor, Interaction, iter_nodes, node_index, pretty, subtrees

log = logging.getLogger(__name__)

CLOSED = "closed"
MINIMAL = "minimal"


class NotWellFormedError(ValueError):
    pass


def nds(m: Cfsm) -> list:
    """States with two distinct outgoing transitions sharing a label, or where one is an output."""
    out = []
    for q in m.states:
        ts = m.outgoing(q)
        if len(ts) < 2:
            continue
        labels = [t.action for t in ts]
        if len(set(labels)) < len(labels) or any(a.is_output for a in labels):
            out.append(q)
    return out


def split_raw(m: Cfsm) -> list:
    """Internal-choice-free sub-machines of ``m``, before trimming and deduplication."""
    memo: dict = {}

    def go(machine):
        if machine in memo:
            return memo[machine]
        choices = nds(machine)
        if not choices:
            memo[machine] = [machine]
            return memo[machine]
        res: dict = {}
        for q in choices:
            here = machine.outgoing(q)
            outputs = [t for t in here if t.action.is_output]
            if outputs:
                for keep in outputs:
                    for r in go(machine.without(t for t in here if t != keep)):
                        res.setdefault(r, None)
            else:
                for t in here:
                    if any(u != t and u.action == t.action for u in here):
                        for r in go(machine.without([t])):
                            res.setdefault(r, None)
        memo[machine] = list(res)
        return memo[machine]

    return go(m)


def split(m: Cfsm) -> list:
    """Trimmed internal-choice-free machines, one per isomorphism class."""
    out = []
    for r in split_raw(m):
        r = r.trim()
        if not any(isomorphic(r, s) for s in out):
            out.append(r)
    return out


# -------------------------------------------------------------------- oracle

@dataclass
class OracleTable:
    mode: str
    table: dict = field(default_factory=dict)   # (participant, node id) -> frozenset of states

    def __getitem__(self, key) -> frozenset:
        return self.table[key]

    def get(self, participant: str, node_id: int) -> frozenset:
        return self.table.get((participant, node_id), frozenset())

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "entries": [
                {"participant": p, "subtree": n, "states": sorted(s)}
                for (p, n), s in sorted(self.table.items())
            ],
        }


def _subtree_masks(g: GChor, family: list) -> dict:
    """node id -> per-pomset bitmask of the events produced inside that subtree."""
    masks = {}
    for sub in subtrees(g):
        inside = {n.node_id for n in iter_nodes(sub.chor) if isinstance(n, Interaction)}
        masks[sub.root] = [
            sum(1 << e for e, o in enumerate(p.origins) if o in inside) for p in family
        ]
    return masks


def _prefix_matchings(family, trace):
    """For every prefix length, the set of (pomset index, fired-set) consistent with it."""
    current = {(k, 0) for k in range(len(family))}
    out = [current]
    for a in trace:
        current = {(k, f2) for (k, f) in current for f2 in advance(family[k], f, a)}
        out.append(current)
    return out


def _local_matchings(family, trace, role):
    """Matchings of ``role``'s own actions against the ``role`` events of each pomset.

    Returns, for k = 0.. number of role actions, the set of
    (pomset index, causal down-closure of the matched events).
    """
    states = [{(k, 0) for k in range(len(family))}]
    current = states[0]
    for a in trace:
        if a.subject != role:
            continue
        nxt = set()
        for (k, f) in current:
            p = family[k]
            mine = sum(1 << e for e, lab in enumerate(p.labels) if lab.subject == role)
            for e in range(p.size):
                if f >> e & 1 or p.labels[e] != a:
                    continue
                if p.below[e] & mine & ~f:
                    continue
                nxt.add((k, f | 1 << e))
        current = nxt
        states.append(current)

    def closure(k, f):
        p = family[k]
        down = f
        e = 0
        while f >> e:
            if f >> e & 1:
                down |= p.below[e]
            e += 1
        return down

    return [{(k, closure(k, f)) for (k, f) in level} for level in states]


def compute_oracle(g: GChor, bound: int = DEFAULT_BOUND, mode: str = CLOSED,
                   system: System | None = None, check: bool = True) -> OracleTable:
    """Success states for every (participant, subtree) pair.

    ``closed``: along each maximal run, find the first point where the subtree
    is resolved (all its events fired, or a branch excluding it committed);
    collect the local states of every stable configuration from there on.

    ``minimal``: per participant, the first local state whose own history
    already implies the resolution, else the participant's last state.
    """
    if mode not in (CLOSED, MINIMAL):
        raise ValueError(f"unknown oracle mode {mode!r}")
    sys = system if system is not None else project_system(g)
    if check:
        verdict = check_well_formed(g, bound, system=sys)
        if not verdict.well_formed:
            raise NotWellFormedError("the oracle is only defined for well-formed choreographies")
    family = sem(g, dedupe=False)
    masks = _subtree_masks(g, family)
    runs = [r for r in explore(sys, bound) if r.maximal]
    table: dict = {(p, n): set() for p in sys for n in masks}
    for run in runs:
        confs = run.configurations
        n_steps = len(run.trace)
        if mode == CLOSED:
            levels = _prefix_matchings(family, run.trace)
            stable = [c.is_stable() for c in confs]
            for node, mask in masks.items():
                r = next(
                    (i for i, level in enumerate(levels)
                     if all(mask[k] & ~f == 0 for (k, f) in level)),
                    n_steps,
                )
                for j in range(r, n_steps + 1):
                    if stable[j]:
                        for p, q in confs[j].locals:
                            table[(p, node)].add(q)
        else:
            for p in sys:
                positions = [i + 1 for i, a in enumerate(run.trace) if a.subject == p]
                at = [0] + positions
                levels = _local_matchings(family, run.trace, p)
                for node, mask in masks.items():
                    k = next(
                        (k for k, level in enumerate(levels)
                         if all(mask[i] & ~f == 0 for (i, f) in level)),
                        None,
                    )
                    idx = at[k] if k is not None else n_steps
                    table[(p, node)].add(confs[idx].local(p))
    return OracleTable(mode, {key: frozenset(v) for key, v in table.items()})


def oracle_witnessed(table: OracleTable, sys: System, node_id: int, bound: int = DEFAULT_BOUND) -> list:
    """Maximal runs lacking a stable configuration with every local state inside the oracle sets."""
    success = {p: table.get(p, node_id) for p in sys}
    return [r for r in explore(sys, bound, success=(None, success)) if r.maximal and not r.succeeded]


# ---------------------------------------------------------------- test cases

@dataclass(frozen=True)
class TestMachine:
    participant: str
    machine: Cfsm
    success: frozenset

    __test__ = False

    def to_json(self) -> dict:
        return {"participant": self.participant, "cfsm": cfsm_to_json(self.machine, self.participant),
                "success": sorted(self.success)}


@dataclass(frozen=True)
class TestCase:
    cut: str
    members: tuple
    subtree: int | None = None
    provenance: tuple = ()

    __test__ = False

    def member(self, participant: str) -> TestMachine:
        for m in self.members:
            if m.participant == participant:
                return m
        raise KeyError(participant)

    def to_json(self) -> dict:
        return {
            "subtree": self.subtree,
            "members": [m.to_json() for m in self.members],
            "provenance": {p: i for p, i in self.provenance},
        }

    def to_dot(self) -> str:
        return "\n".join(
            cfsm_to_dot(m.machine, name=f"{m.participant}", success=m.success) for m in self.members
        )


def make_test(cut: str, members: Iterable, subtree: int | None = None, provenance: tuple = ()) -> TestCase:
    """Build a test case from ``(participant, machine, success states)`` triples."""
    ms = tuple(sorted((TestMachine(p, m, frozenset(s)) for p, m, s in members), key=lambda x: x.participant))
    return TestCase(cut, ms, subtree, tuple(provenance))


@dataclass(frozen=True)
class Violation:
    condition: int | str
    participant: str
    state: str | None
    transitions: tuple
    message: str

    def __str__(self):
        return f"condition ({self.condition}) in {self.participant}: {self.message}"


def validate_test_case(t: TestCase) -> list:
    """Check the four well-formedness conditions of a test case; empty list means valid."""
    out = []
    owners: dict = {}
    for tm in t.members:
        m = tm.machine
        if not tm.success <= set(m.states):
            out.append(Violation("success", tm.participant, None, (),
                                 f"success states {sorted(tm.success - set(m.states))} are not states"))
        for tr in m.transitions:
            if tr.action.subject == t.cut:
                out.append(Violation(1, tm.participant, tr.src, (tr,),
                                     f"{tr} has the CUT {t.cut} as subject"))
            owners.setdefault(tr.action.subject, set()).add(tm.participant)
        for q in m.states:
            ts = m.outgoing(q)
            outs = [tr for tr in ts if tr.action.is_output]
            if outs and len(ts) > 1:
                out.append(Violation(2, tm.participant, q, ts,
                                     f"state {q} has an output and {len(ts) - 1} other transition(s)"))
            seen: dict = {}
            for tr in ts:
                if tr.action in seen and seen[tr.action].dst != tr.dst:
                    out.append(Violation(3, tm.participant, q, (seen[tr.action], tr),
                                         f"state {q} has two {tr.action} transitions"))
                seen.setdefault(tr.action, tr)
    for subj, who in sorted(owners.items()):
        if len(who) > 1:
            out.append(Violation(4, ",".join(sorted(who)), None, (),
                                 f"subject {subj} appears in several members"))
    return out


@dataclass
class TestSuite:
    cut: str
    cases: list
    choreography_hash: str = ""
    oracle_mode: str = CLOSED
    discarded: int = 0

    __test__ = False

    def by_subtree(self) -> dict:
        groups: dict = {}
        for c in self.cases:
            groups.setdefault(c.subtree, []).append(c)
        return groups

    def to_json(self) -> dict:
        return {
            "choreography-hash": self.choreography_hash,
            "cut": self.cut,
            "oracle": self.oracle_mode,
            "cases": [c.to_json() for c in self.cases],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TestSuite":
        cases = []
        for c in data["cases"]:
            names = [m["participant"] for m in c["members"]] + [data["cut"]]
            members = []
            for m in c["members"]:
                _, machine = cfsm_from_json(m["cfsm"], names)
                members.append((m["participant"], machine, m["success"]))
            cases.append(make_test(data["cut"], members, c.get("subtree"),
                                   tuple(sorted(c.get("provenance", {}).items()))))
        return cls(data["cut"], cases, data.get("choreography-hash", ""), data.get("oracle", CLOSED))

    def to_dot(self) -> str:
        parts = []
        for i, c in enumerate(self.cases):
            for m in c.members:
                parts.append(cfsm_to_dot(m.machine, name=f"case{i}_{m.participant}", success=m.success))
        return "\n".join(parts)


def choreography_hash(g: GChor) -> str:
    return hashlib.sha256(pretty(g).encode()).hexdigest()


def select_subtrees(g: GChor, which="all") -> list:
    subs = subtrees(g)
    if which == "all":
        return subs
    if which == "root":
        return subs[:1]
    wanted = [int(x) for x in which]
    index = node_index(g)
    missing = [n for n in wanted if n not in index]
    if missing:
        raise ValueError(f"no subtree with node id(s) {missing}")
    return [s for s in subs if s.root in wanted]


def gen_tests(g: GChor, cut: str, bound: int = DEFAULT_BOUND, which: str | Sequence[int] = "all",
              mode: str = CLOSED) -> TestSuite:
    """One test case per subtree and per choice of a split machine for every non-CUT participant."""
    sys = project_system(g)
    verdict = check_well_formed(g, bound, system=sys)
    if not verdict.well_formed:
        raise NotWellFormedError("test generation needs a well-formed choreography")
    oracle = compute_oracle(g, bound, mode, system=sys, check=False)
    others = [p for p in sys if p != cut]
    pieces = {p: split(sys[p]) for p in others}
    suite = TestSuite(cut, [], choreography_hash(g), mode)
    for sub in select_subtrees(g, which):
        for combo in product(*(range(len(pieces[p])) for p in others)):
            members = []
            for p, i in zip(others, combo):
                m = pieces[p][i]
                members.append((p, m, oracle.get(p, sub.root) & set(m.states)))
            if any(not s for _, _, s in members):
                suite.discarded += 1
                log.info("discarding infeasible test for subtree %s, machines %s", sub.root, combo)
                continue
            case = make_test(cut, members, sub.root, tuple(zip(others, combo)))
            problems = validate_test_case(case)
            if problems:
                raise AssertionError(f"generated an invalid test: {problems[0]}")
            suite.cases.append(case)
    return suite
