"""Communicating finite-state machines over multiset buffers."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from . import _core
from .semantics import Action, format_word, parse_action

DEFAULT_BOUND = 10_000


class NotEnabledError(ValueError):
    pass


class LocalityError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Transition:
    src: str
    action: Action
    dst: str

    def __str__(self):
        return f"{self.src} -{self.action}-> {self.dst}"


@dataclass(frozen=True)
class Cfsm:
    states: tuple
    initial: str
    transitions: tuple = ()

    def __post_init__(self):
        states = tuple(dict.fromkeys(self.states))
        object.__setattr__(self, "states", states)
        if self.initial not in states:
            raise ValueError(f"initial state {self.initial!r} is not a state")
        known = set(states)
        for t in self.transitions:
            if t.src not in known or t.dst not in known:
                raise ValueError(f"transition {t} leaves the state set")
        rank = {q: i for i, q in enumerate(states)}
        ts = sorted(set(self.transitions), key=lambda t: (rank[t.src], t.action, rank[t.dst]))
        object.__setattr__(self, "transitions", tuple(ts))

    @cached_property
    def _out(self) -> dict:
        out = {q: [] for q in self.states}
        for t in self.transitions:
            out[t.src].append(t)
        return {q: tuple(ts) for q, ts in out.items()}

    def outgoing(self, q: str) -> tuple:
        return self._out[q]

    def subjects(self) -> frozenset:
        return frozenset(t.action.subject for t in self.transitions)

    def is_local(self, participant: str) -> bool:
        return all(t.action.subject == participant for t in self.transitions)

    def is_deterministic(self) -> bool:
        return all(
            len({t.action for t in ts}) == len(ts) for ts in self._out.values()
        )

    def reachable(self) -> list:
        seen = {self.initial: None}
        queue = deque([self.initial])
        while queue:
            q = queue.popleft()
            for t in self._out[q]:
                if t.dst not in seen:
                    seen[t.dst] = None
                    queue.append(t.dst)
        return list(seen)

    def trim(self) -> "Cfsm":
        """Drop states unreachable from the initial state."""
        keep = set(self.reachable())
        return Cfsm(
            tuple(q for q in self.states if q in keep),
            self.initial,
            tuple(t for t in self.transitions if t.src in keep),
        )

    def without(self, transitions: Iterable[Transition]) -> "Cfsm":
        drop = set(transitions)
        return Cfsm(self.states, self.initial, tuple(t for t in self.transitions if t not in drop))

    def with_transitions(self, transitions: Iterable[Transition]) -> "Cfsm":
        return Cfsm(self.states, self.initial, self.transitions + tuple(transitions))

    def rename(self, mapping: Mapping[str, str]) -> "Cfsm":
        return Cfsm(
            tuple(mapping[q] for q in self.states),
            mapping[self.initial],
            tuple(Transition(mapping[t.src], t.action, mapping[t.dst]) for t in self.transitions),
        )

    def final_states(self) -> list:
        return [q for q in self.states if not self._out[q]]


# ----------------------------------------------------------------- isomorphism

def _canonical_bfs(m: Cfsm):
    """Numbering of a deterministic machine's reachable states in label-ordered BFS."""
    order = {m.initial: 0}
    queue = deque([m.initial])
    edges = []
    while queue:
        q = queue.popleft()
        for t in sorted(m.outgoing(q), key=lambda t: t.action):
            if t.dst not in order:
                order[t.dst] = len(order)
                queue.append(t.dst)
            edges.append((order[q], t.action, order[t.dst]))
    return order, tuple(edges)


def find_isomorphism(m1: Cfsm, m2: Cfsm) -> dict | None:
    """A label-preserving bijection between the states of ``m1`` and ``m2``.

    Deterministic machines are compared through a canonical BFS numbering;
    otherwise a refinement-guided backtracking search is used.
    """
    if len(m1.states) != len(m2.states) or len(m1.transitions) != len(m2.transitions):
        return None
    if m1.is_deterministic() and m2.is_deterministic() and \
            len(m1.reachable()) == len(m1.states) and len(m2.reachable()) == len(m2.states):
        o1, e1 = _canonical_bfs(m1)
        o2, e2 = _canonical_bfs(m2)
        if e1 != e2:
            return None
        back = {v: k for k, v in o2.items()}
        return {q: back[i] for q, i in o1.items()}
    return _backtrack_iso(m1, m2)


def _refine(m: Cfsm) -> dict:
    """Colour refinement; colours depend only on structure, never on state names."""
    inc = {q: [] for q in m.states}
    for t in m.transitions:
        inc[t.dst].append(t)
    color = {q: repr((q == m.initial, len(m.outgoing(q)), len(inc[q]))) for q in m.states}
    for _ in range(len(m.states) + 1):
        sig = {
            q: repr((color[q],
                     sorted((str(t.action), color[t.dst]) for t in m.outgoing(q)),
                     sorted((str(t.action), color[t.src]) for t in inc[q])))
            for q in m.states
        }
        palette = {s: str(i) for i, s in enumerate(sorted(set(sig.values())))}
        new = {q: palette[sig[q]] for q in m.states}
        if len(set(new.values())) == len(set(color.values())):
            return new
        color = new
    return color


def _backtrack_iso(m1: Cfsm, m2: Cfsm) -> dict | None:
    s1, s2 = _refine(m1), _refine(m2)
    if sorted(s1.values()) != sorted(s2.values()):
        return None
    edges1 = {(t.src, t.action, t.dst) for t in m1.transitions}
    edges2 = {(t.src, t.action, t.dst) for t in m2.transitions}
    states = list(m1.states)
    image: dict = {}
    used: set = set()

    def consistent(q, r):
        for t in m1.outgoing(q):
            if t.dst in image and (r, t.action, image[t.dst]) not in edges2:
                return False
        for (a, lab, b) in edges1:
            if b == q and a in image and (image[a], lab, r) not in edges2:
                return False
        return True

    def go(i):
        if i == len(states):
            return True
        q = states[i]
        for r in m2.states:
            if r in used or s2[r] != s1[q] or (q == m1.initial) != (r == m2.initial):
                continue
            if not consistent(q, r):
                continue
            image[q] = r
            used.add(r)
            if go(i + 1):
                return True
            del image[q]
            used.discard(r)
        return False

    if not go(0):
        return None
    mapped = {(image[a], lab, image[b]) for (a, lab, b) in edges1}
    return dict(image) if mapped == edges2 else None


def isomorphic(m1: Cfsm, m2: Cfsm) -> bool:
    return find_isomorphism(m1, m2) is not None


def bisimilar(m1: Cfsm, m2: Cfsm) -> bool:
    """Strong bisimilarity of the two initial states."""
    tagged = [(1, q) for q in m1.states] + [(2, q) for q in m2.states]
    out = {}
    for tag, m in ((1, m1), (2, m2)):
        for q in m.states:
            out[(tag, q)] = [(t.action, (tag, t.dst)) for t in m.outgoing(q)]
    block = {s: 0 for s in tagged}
    while True:
        sig = {s: (block[s], frozenset((a, block[d]) for a, d in out[s])) for s in tagged}
        ids: dict = {}
        new = {s: ids.setdefault(sig[s], len(ids)) for s in tagged}
        if len(ids) == len(set(block.values())):
            break
        block = new
    return new[(1, m1.initial)] == new[(2, m2.initial)]


# ---------------------------------------------------------------- systems

@dataclass(frozen=True)
class Configuration:
    """Local states per participant plus non-empty buffer contents.

    ``buffers`` holds ``(sender, receiver, msg, count)`` entries with positive
    counts, sorted; absent channels are empty.
    """

    locals: tuple
    buffers: tuple = ()

    def local(self, participant: str) -> str:
        return dict(self.locals)[participant]

    def buffer(self, sender: str, receiver: str) -> Counter:
        return Counter({m: c for (s, r, m, c) in self.buffers if (s, r) == (sender, receiver)})

    def is_stable(self, channels: Iterable[tuple] | None = None) -> bool:
        if channels is None:
            return not self.buffers
        chans = set(channels)
        return not any((s, r) in chans for (s, r, _, _) in self.buffers)

    def to_json(self) -> dict:
        return {
            "locals": dict(self.locals),
            "buffers": [{"channel": s + r, "msg": m, "count": c} for (s, r, m, c) in self.buffers],
        }


def is_stable(s: Configuration, channels: Iterable[tuple] | None = None) -> bool:
    return s.is_stable(channels)


class System(Mapping):
    """Participant -> machine map; each machine must be local to its participant."""

    def __init__(self, machines: Mapping[str, Cfsm], check_local: bool = True):
        self._machines = dict(sorted(machines.items()))
        if check_local:
            for p, m in self._machines.items():
                if not m.is_local(p):
                    bad = [str(t) for t in m.transitions if t.action.subject != p]
                    raise LocalityError(f"machine for {p} is not {p}-local: {bad[:3]}")

    def __getitem__(self, p):
        return self._machines[p]

    def __iter__(self):
        return iter(self._machines)

    def __len__(self):
        return len(self._machines)

    def __repr__(self):
        return f"System({list(self._machines)})"

    def channels(self) -> set:
        ps = list(self._machines)
        return {(a, b) for a in ps for b in ps if a != b}

    def initial(self) -> Configuration:
        return Configuration(tuple((p, m.initial) for p, m in self._machines.items()))

    @cached_property
    def encoded(self) -> "_core.Encoded":
        return _core.encode(self)


def enabled(sys: System, s: Configuration) -> set:
    locs = dict(s.locals)
    bufs = {(a, b, m): c for (a, b, m, c) in s.buffers}
    acts = set()
    for p, m in sys.items():
        for t in m.outgoing(locs[p]):
            a = t.action
            if a.is_output or bufs.get((a.sender, a.receiver, a.msg), 0) > 0:
                acts.add(a)
    return acts


def step(sys: System, s: Configuration, a: Action) -> Configuration:
    """Fire ``a``; the owner of the action moves, one buffer changes, nothing else does."""
    locs = dict(s.locals)
    owner = a.subject
    if owner not in sys:
        raise NotEnabledError(f"{a}: no machine for {owner}")
    targets = [t.dst for t in sys[owner].outgoing(locs[owner]) if t.action == a]
    if not targets:
        raise NotEnabledError(f"{a} is not a transition of {owner} in state {locs[owner]}")
    if len(targets) > 1:
        raise NotEnabledError(f"{a} is ambiguous in state {locs[owner]} of {owner}; use step_to")
    return step_to(sys, s, a, targets[0])


def step_to(sys: System, s: Configuration, a: Action, target: str) -> Configuration:
    locs = dict(s.locals)
    bufs = Counter({(x, y, m): c for (x, y, m, c) in s.buffers})
    key = (a.sender, a.receiver, a.msg)
    owner = a.subject
    if Transition(locs[owner], a, target) not in sys[owner].outgoing(locs[owner]):
        raise NotEnabledError(f"{a} to {target} is not a transition of {owner}")
    if a.is_output:
        bufs[key] += 1
    else:
        if bufs[key] <= 0:
            raise NotEnabledError(f"{a}: no {a.msg} in buffer {a.sender}{a.receiver}")
        bufs[key] -= 1
    locs[owner] = target
    return Configuration(
        tuple(sorted(locs.items())),
        tuple(sorted((x, y, m, c) for (x, y, m), c in bufs.items() if c > 0)),
    )


def has_pending_input(sys: System, s: Configuration) -> bool:
    locs = dict(s.locals)
    return any(not t.action.is_output for p, m in sys.items() for t in m.outgoing(locs[p]))


def is_deadlock(sys: System, s: Configuration) -> bool:
    if enabled(sys, s):
        return False
    return has_pending_input(sys, s) or not s.is_stable()


# -------------------------------------------------------------------- runs

MAXIMAL = "maximal"
DEADLOCK = "deadlock"
TRUNCATED = "truncated"


class Run:
    """A run from the initial configuration; configurations are replayed lazily.

    A run of ``n`` steps has ``n + 1`` configurations and a trace of length ``n``.
    """

    def __init__(self, sys: System, trace: tuple, status: str, targets: tuple | None = None,
                 succeeded: bool | None = None):
        self.system = sys
        self.trace = trace
        self.status = status
        self.targets = targets
        self.succeeded = succeeded

    @property
    def maximal(self) -> bool:
        return self.status in (MAXIMAL, DEADLOCK)

    def __len__(self):
        return len(self.trace)

    def __repr__(self):
        return f"Run({self.status}, {format_word(self.trace)!r})"

    @cached_property
    def configurations(self) -> list:
        confs = [self.system.initial()]
        for i, a in enumerate(self.trace):
            if self.targets is None:
                confs.append(step(self.system, confs[-1], a))
            else:
                confs.append(step_to(self.system, confs[-1], a, self.targets[i]))
        return confs

    @property
    def steps(self) -> list:
        c = self.configurations
        return [(c[i], a, c[i + 1]) for i, a in enumerate(self.trace)]

    def to_json(self) -> dict:
        return {"status": self.status, "trace": format_word(self.trace)}


@dataclass
class RunSet:
    runs: list
    exhaustive: bool
    configurations_visited: int = 0
    backend: str = field(default="")

    def __iter__(self):
        return iter(self.runs)

    def __len__(self):
        return len(self.runs)

    @property
    def maximal(self) -> list:
        return [r for r in self.runs if r.maximal]

    @property
    def truncated(self) -> list:
        return [r for r in self.runs if r.status == TRUNCATED]


def explore(sys: System, bound: int = DEFAULT_BOUND, success=None) -> RunSet:
    """Enumerate every run of ``sys`` depth-first until it is maximal or hits ``bound``.

    ``success``, when given, is ``(channels, {participant: states})``; each run
    then records whether it passed through a configuration stable for
    ``channels`` with every listed participant inside its state set.
    """
    if bound < 0:
        raise ValueError("bound must be non-negative")
    enc = sys.encoded
    spec = None
    if success is not None:
        spec = enc.success_spec(*success)
    raw, visited = _core.explore(enc, bound, spec)
    runs = []
    for acts, status, ok in raw:
        trace = tuple(enc.actions[i] for i in acts)
        targets = tuple(enc.targets[i] for i in acts)
        runs.append(Run(sys, trace, (MAXIMAL, DEADLOCK, TRUNCATED, TRUNCATED)[status], targets,
                        ok if spec is not None else None))
    exhaustive = not any(r.status == TRUNCATED for r in runs)
    return RunSet(runs, exhaustive, visited, _core.BACKEND)


def maximal_runs(sys: System, bound: int = DEFAULT_BOUND) -> RunSet:
    return explore(sys, bound)


class SystemLanguage:
    """Prefix-closed trace set of a system, explored up to a step budget."""

    def __init__(self, sys: System, bound: int = DEFAULT_BOUND):
        self.runs = explore(sys, bound)
        self.exhaustive = self.runs.exhaustive
        self._prefixes = set()
        for r in self.runs:
            for i in range(len(r.trace) + 1):
                self._prefixes.add(r.trace[:i])

    def __contains__(self, word) -> bool:
        return tuple(word) in self._prefixes

    def traces(self, max_len: int | None = None) -> set:
        if max_len is None:
            return set(self._prefixes)
        return {w for w in self._prefixes if len(w) <= max_len}


def system_language(sys: System, bound: int = DEFAULT_BOUND) -> SystemLanguage:
    return SystemLanguage(sys, bound)


# --------------------------------------------------------------- interchange

def cfsm_to_json(m: Cfsm, participant: str | None = None) -> dict:
    return {
        "participant": participant,
        "states": list(m.states),
        "initial": m.initial,
        "transitions": [{"from": t.src, "action": str(t.action), "to": t.dst} for t in m.transitions],
    }


def cfsm_from_json(data: Mapping, participants: Iterable[str] | None = None) -> tuple:
    """Return ``(participant, machine)``."""
    names = list(participants) if participants is not None else None
    ts = []
    for t in data["transitions"]:
        ts.append(Transition(t["from"], parse_action(t["action"], names), t["to"]))
    if names is None and any(len(t["action"].split("!")[0].split("?")[0]) != 2 for t in data["transitions"]):
        raise ValueError("multi-character participant names need an explicit participant list")
    return data.get("participant"), Cfsm(tuple(data["states"]), data["initial"], tuple(ts))


def _dot_id(s: str) -> str:
    return '"' + s.replace('"', r'\"') + '"'


def cfsm_to_dot(m: Cfsm, name: str = "M", success: Iterable[str] = (), highlight: Iterable[str] = ()) -> str:
    """Graphviz digraph; the initial state gets an edge from an invisible node."""
    succ, hl = set(success), set(highlight)
    lines = [f"digraph {_dot_id(name)} {{", "  rankdir=LR;", '  __start [style=invis, shape=point];']
    for q in m.states:
        attrs = ["shape=doublecircle" if q in succ else "shape=circle"]
        if q in hl:
            attrs.append("style=filled, fillcolor=red")
        lines.append(f"  {_dot_id(q)} [{', '.join(attrs)}];")
    lines.append(f"  __start -> {_dot_id(m.initial)};")
    for t in m.transitions:
        lines.append(f"  {_dot_id(t.src)} -> {_dot_id(t.dst)} [label={_dot_id(str(t.action))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
