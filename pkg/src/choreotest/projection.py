"""Projection of choreographies onto local machines, and a semantic well-formedness check."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .machines import DEADLOCK, DEFAULT_BOUND, Cfsm, System, Transition, explore
from .semantics import IN, OUT, Action, format_word, pomset_accepts, sem
from .syntax import Choice, Empty, Fork, GChor, Interaction, Repeat, Seq, participants


@dataclass
class RawMachine:
    """Automaton with silent moves (label ``None``) and a set of final states.

    Transitions are ``(src, label, dst, origin)`` where ``origin`` is the node
    id of the interaction that produced the move.
    """

    states: list
    initial: int
    finals: frozenset
    transitions: list = field(default_factory=list)

    def silent_count(self) -> int:
        return sum(1 for t in self.transitions if t[1] is None)


class _Builder:
    def __init__(self):
        self.next = 0

    def new(self):
        q = self.next
        self.next += 1
        return q


def _role_label(node: Interaction, role: str):
    if role == node.sender:
        return Action(node.sender, node.receiver, OUT, node.msg)
    if role == node.receiver:
        return Action(node.sender, node.receiver, IN, node.msg)
    return None


def project_raw(g: GChor, role: str) -> RawMachine:
    """Translate each interaction by ``role``'s part in it; choice and fork become silent branching."""
    b = _Builder()

    def go(node):
        # -> (states, initial, finals, transitions)
        if isinstance(node, Empty):
            q = b.new()
            return [q], q, {q}, []
        if isinstance(node, Interaction):
            q0, q1 = b.new(), b.new()
            return [q0, q1], q0, {q1}, [(q0, _role_label(node, role), q1, node.node_id)]
        if isinstance(node, Repeat):
            raise ValueError("projection needs a repeat-free choreography; unfold it first")
        s1, i1, f1, t1 = go(node.left)
        s2, i2, f2, t2 = go(node.right)
        if isinstance(node, Seq):
            glue = [(f, None, i2, None) for f in sorted(f1)]
            return s1 + s2, i1, f2, t1 + t2 + glue
        if isinstance(node, Choice):
            q = b.new()
            return [q] + s1 + s2, q, f1 | f2, t1 + t2 + [(q, None, i1, None), (q, None, i2, None)]
        return _interleave(b, (s1, i1, f1, t1), (s2, i2, f2, t2))

    states, init, finals, ts = go(g)
    return RawMachine(states, init, frozenset(finals), ts)


def _interleave(b, left, right):
    s1, i1, f1, t1 = left
    s2, i2, f2, t2 = right
    out1 = {q: [] for q in s1}
    out2 = {q: [] for q in s2}
    for t in t1:
        out1[t[0]].append(t)
    for t in t2:
        out2[t[0]].append(t)
    ids = {}
    queue = deque([(i1, i2)])
    ids[(i1, i2)] = b.new()
    trans = []
    while queue:
        pair = queue.popleft()
        p, q = pair
        moves = [((d, q), lab, o) for (_, lab, d, o) in out1[p]]
        moves += [((p, d), lab, o) for (_, lab, d, o) in out2[q]]
        for nxt, lab, o in moves:
            if nxt not in ids:
                ids[nxt] = b.new()
                queue.append(nxt)
            trans.append((ids[pair], lab, ids[nxt], o))
    finals = {ids[pq] for pq in ids if pq[0] in f1 and pq[1] in f2}
    return list(ids.values()), ids[(i1, i2)], finals, trans


def determinize(raw: RawMachine, prefix: str = "q") -> Cfsm:
    """Silent closure plus subset construction.

    States are named ``<prefix>1, <prefix>2, ...`` in BFS order; outgoing
    moves are visited in the order their interactions occur in the source
    term, then by label.
    """
    succ = {q: [] for q in raw.states}
    for t in raw.transitions:
        succ[t[0]].append(t)

    def closure(qs):
        seen = set(qs)
        stack = list(qs)
        while stack:
            q = stack.pop()
            for (_, lab, d, _) in succ[q]:
                if lab is None and d not in seen:
                    seen.add(d)
                    stack.append(d)
        return frozenset(seen)

    start = closure([raw.initial])
    names = {start: f"{prefix}1"}
    queue = deque([start])
    trans = []
    while queue:
        subset = queue.popleft()
        moves = {}
        for q in subset:
            for (_, lab, d, origin) in succ[q]:
                if lab is None:
                    continue
                rank, targets = moves.get(lab, (origin, set()))
                targets.add(d)
                moves[lab] = (min(rank, origin), targets)
        for lab, (rank, targets) in sorted(moves.items(), key=lambda kv: (kv[1][0], kv[0])):
            nxt = closure(targets)
            if nxt not in names:
                names[nxt] = f"{prefix}{len(names) + 1}"
                queue.append(nxt)
            trans.append(Transition(names[subset], lab, names[nxt]))
    return Cfsm(tuple(names.values()), names[start], tuple(trans))


def project(g: GChor, role: str) -> Cfsm:
    m = determinize(project_raw(g, role), prefix=role)
    if not m.is_local(role):
        raise AssertionError(f"projection on {role} is not {role}-local")
    return m


def project_system(g: GChor) -> System:
    return System({p: project(g, p) for p in sorted(participants(g))})


# --------------------------------------------------------- well-formedness

@dataclass
class Witness:
    reason: str          # "language" or "deadlock" or "truncated"
    run: object
    prefix: int          # length of the offending trace prefix

    def to_json(self) -> dict:
        return {"reason": self.reason, "trace": format_word(self.run.trace[:self.prefix]),
                "status": self.run.status}


@dataclass
class WfVerdict:
    language_included: bool
    deadlock_free: bool
    exhaustive: bool
    witnesses: list = field(default_factory=list)
    runs_examined: int = 0

    @property
    def well_formed(self) -> bool:
        return self.language_included and self.deadlock_free and self.exhaustive

    def to_json(self) -> dict:
        return {
            "wellFormed": self.well_formed,
            "languageIncluded": self.language_included,
            "deadlockFree": self.deadlock_free,
            "exhaustive": self.exhaustive,
            "runsExamined": self.runs_examined,
            "witnesses": [w.to_json() for w in self.witnesses],
        }


def _accepted_prefix(family, trace) -> int:
    """Length of the longest prefix of ``trace`` in the language of ``family``."""
    lo, hi = 0, len(trace)
    # prefix closure makes membership monotone in length
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if any(pomset_accepts(p, trace[:mid]) for p in family):
            lo = mid
        else:
            hi = mid - 1
    return lo


def check_well_formed(g: GChor, bound: int = DEFAULT_BOUND, system: System | None = None) -> WfVerdict:
    """Explore the projected system: every trace must be in the choreography's language
    and no run may reach a deadlock."""
    sys = system if system is not None else project_system(g)
    family = sem(g)
    runs = explore(sys, bound)
    verdict = WfVerdict(True, True, runs.exhaustive, runs_examined=len(runs))
    checked = {}
    for r in runs:
        if r.trace not in checked:
            checked[r.trace] = _accepted_prefix(family, r.trace)
        good = checked[r.trace]
        if good < len(r.trace):
            verdict.language_included = False
            verdict.witnesses.append(Witness("language", r, good + 1))
        if r.status == DEADLOCK:
            verdict.deadlock_free = False
            verdict.witnesses.append(Witness("deadlock", r, len(r.trace)))
    for r in runs.truncated:
        verdict.witnesses.append(Witness("truncated", r, len(r.trace)))
    return verdict
