"""Pomset semantics of choreographies and membership in their prefix-closed language."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .syntax import Choice, Empty, Fork, GChor, Interaction, Repeat, Seq

OUT = "!"
IN = "?"

DEFAULT_LINEARIZATION_CAP = 12


@dataclass(frozen=True, order=True)
class Action:
    sender: str
    receiver: str
    kind: str
    msg: str

    @property
    def subject(self) -> str:
        return self.sender if self.kind == OUT else self.receiver

    @property
    def is_output(self) -> bool:
        return self.kind == OUT

    @property
    def channel(self) -> tuple:
        return (self.sender, self.receiver)

    def dual(self) -> "Action":
        return Action(self.sender, self.receiver, IN if self.kind == OUT else OUT, self.msg)

    def __str__(self) -> str:
        return f"{self.sender}{self.receiver}{self.kind}{self.msg}"


_ACTION_RE = re.compile(r"^([A-Za-z0-9_]+)([!?])([A-Za-z0-9_]+)$")


def parse_action(text: str, participants: Iterable[str] | None = None) -> Action:
    """Read ``XY!m`` / ``XY?m``.

    With single-character names the split is obvious; longer names need
    ``participants`` to disambiguate where the sender ends.
    """
    m = _ACTION_RE.match(text.strip())
    if m is None:
        raise ValueError(f"malformed action {text!r}")
    chan, kind, msg = m.groups()
    if participants is not None:
        names = set(participants)
        splits = [
            (chan[:i], chan[i:]) for i in range(1, len(chan))
            if chan[:i] in names and chan[i:] in names and chan[:i] != chan[i:]
        ]
        if len(splits) != 1:
            raise ValueError(f"cannot split channel {chan!r} into two known participants")
        sender, receiver = splits[0]
    elif len(chan) == 2:
        sender, receiver = chan[0], chan[1]
    else:
        raise ValueError(f"channel {chan!r} is ambiguous without a participant list")
    if sender == receiver:
        raise ValueError(f"action {text!r} has identical endpoints")
    return Action(sender, receiver, kind, msg)


def parse_word(text: str, participants: Iterable[str] | None = None) -> tuple:
    parts = list(participants) if participants is not None else None
    return tuple(parse_action(tok, parts) for tok in text.split())


def format_word(word: Iterable[Action]) -> str:
    return " ".join(str(a) for a in word)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Pomset:
    """Labelled strict partial order over events ``0..n-1``.

    ``below[e]`` is the bitmask of all events strictly smaller than ``e``
    (kept transitively closed). ``origins[e]`` is the node id of the
    interaction that produced ``e``.
    """

    labels: tuple
    below: tuple
    origins: tuple

    @property
    def size(self) -> int:
        return len(self.labels)

    def less(self, a: int, b: int) -> bool:
        return bool(self.below[b] >> a & 1)

    def order(self) -> set:
        return {(a, b) for b in range(self.size) for a in _bits(self.below[b])}

    def reduction(self) -> set:
        """Covering pairs of the order (its Hasse diagram)."""
        pairs = set()
        for b in range(self.size):
            preds = self.below[b]
            # a is covered by b when no c with a < c < b
            indirect = 0
            for c in _bits(preds):
                indirect |= self.below[c]
            for a in _bits(preds & ~indirect):
                pairs.add((a, b))
        return pairs

    def is_chain(self) -> bool:
        return all(
            self.less(a, b) or self.less(b, a)
            for a in range(self.size) for b in range(a + 1, self.size)
        )

    def to_json(self) -> dict:
        return {
            "events": [{"id": e, "action": str(a)} for e, a in enumerate(self.labels)],
            "order": sorted([a, b] for a, b in self.reduction()),
        }


EPSILON = Pomset((), (), ())


def interaction_pomset(g: Interaction) -> Pomset:
    out = Action(g.sender, g.receiver, OUT, g.msg)
    return Pomset((out, out.dual()), (0, 1), (g.node_id, g.node_id))


def disjoint_union(p: Pomset, q: Pomset) -> Pomset:
    n = p.size
    return Pomset(p.labels + q.labels, p.below + tuple(m << n for m in q.below), p.origins + q.origins)


def sequence(p: Pomset, q: Pomset, rule: str = "subject") -> Pomset:
    """Sequential composition.

    ``rule="subject"`` orders every event of a participant in ``p`` before
    every event of the same participant in ``q``. ``rule="output"`` only
    lifts the outputs of ``p``.
    """
    if rule not in ("subject", "output"):
        raise ValueError(f"unknown sequencing rule {rule!r}")
    n = p.size
    first = {}
    for e, a in enumerate(p.labels):
        if rule == "output" and not a.is_output:
            continue
        first[a.subject] = first.get(a.subject, 0) | (1 << e) | p.below[e]
    below = list(p.below)
    for j, a in enumerate(q.labels):
        mask = q.below[j] << n
        for k in list(_bits(q.below[j])) + [j]:
            mask |= first.get(q.labels[k].subject, 0)
        below.append(mask)
    return Pomset(p.labels + q.labels, tuple(below), p.origins + q.origins)


def isomorphic(p: Pomset, q: Pomset) -> bool:
    """Label-preserving order isomorphism (origins ignored)."""
    if p.size != q.size or sorted(p.labels) != sorted(q.labels):
        return False
    n = p.size

    def sig(r, e):
        above = sum(1 for f in range(n) if r.below[f] >> e & 1)
        return (r.labels[e], bin(r.below[e]).count("1"), above)

    sp = [sig(p, e) for e in range(n)]
    sq = [sig(q, e) for e in range(n)]
    if sorted(sp) != sorted(sq):
        return False
    order = sorted(range(n), key=lambda e: bin(p.below[e]).count("1"))
    image = [-1] * n
    used = [False] * n

    def extend(i):
        if i == n:
            return True
        e = order[i]
        for f in range(n):
            if used[f] or sq[f] != sp[e]:
                continue
            if any(
                p.less(order[j], e) != q.less(image[order[j]], f)
                or p.less(e, order[j]) != q.less(f, image[order[j]])
                for j in range(i)
            ):
                continue
            image[e], used[f] = f, True
            if extend(i + 1):
                return True
            used[f] = False
        image[e] = -1
        return False

    return extend(0)


def _dedupe(family: list, up_to_iso: bool) -> list:
    out = []
    for p in family:
        if up_to_iso:
            if any(isomorphic(p, q) for q in out):
                continue
        elif p in out:
            continue
        out.append(p)
    return out


def sem(g: GChor, rule: str = "subject", dedupe: bool = True) -> list:
    """The family of pomsets denoted by a repeat-free choreography.

    With ``dedupe`` the family is reduced up to isomorphism; otherwise only
    exact duplicates (same origins) are dropped, which keeps every branch's
    provenance.
    """
    def go(node):
        if isinstance(node, Empty):
            return [EPSILON]
        if isinstance(node, Interaction):
            return [interaction_pomset(node)]
        if isinstance(node, Repeat):
            raise ValueError("sem() needs a repeat-free choreography; unfold it first")
        left, right = go(node.left), go(node.right)
        if isinstance(node, Choice):
            fam = left + right
        elif isinstance(node, Fork):
            fam = [disjoint_union(p, q) for p in left for q in right]
        else:
            fam = [sequence(p, q, rule) for p in left for q in right]
        return _dedupe(fam, dedupe)

    return go(g)


class LinearizationCapError(ValueError):
    pass


def linearizations(p: Pomset, cap: int = DEFAULT_LINEARIZATION_CAP) -> set:
    """All order-respecting total orders of ``p``, as action tuples."""
    if p.size > cap:
        raise LinearizationCapError(f"pomset has {p.size} events, above the enumeration cap of {cap}")
    full = (1 << p.size) - 1
    words = set()

    def go(fired, word):
        if fired == full:
            words.add(tuple(word))
            return
        for e in range(p.size):
            if not fired >> e & 1 and p.below[e] & ~fired == 0:
                word.append(p.labels[e])
                go(fired | 1 << e, word)
                word.pop()

    go(0, [])
    return words


def count_linearizations(p: Pomset) -> int:
    """Number of linear extensions, by dynamic programming over down-sets."""
    full = (1 << p.size) - 1
    memo = {full: 1}

    def go(fired):
        if fired in memo:
            return memo[fired]
        total = 0
        for e in range(p.size):
            if not fired >> e & 1 and p.below[e] & ~fired == 0:
                total += go(fired | 1 << e)
        memo[fired] = total
        return total

    return go(0)


def advance(p: Pomset, fired: int, action: Action) -> list:
    """Fired-sets reachable from ``fired`` by firing one minimal event labelled ``action``."""
    return [
        fired | 1 << e for e in range(p.size)
        if not fired >> e & 1 and p.labels[e] == action and p.below[e] & ~fired == 0
    ]


def matchings(p: Pomset, word: Sequence[Action]) -> set:
    """Every fired-set under which ``word`` is a prefix of a linearization of ``p``."""
    current = {0}
    for a in word:
        current = {nxt for f in current for nxt in advance(p, f, a)}
        if not current:
            break
    return current


def pomset_accepts(p: Pomset, word: Sequence[Action]) -> bool:
    """Residual search with backtracking over equally-labelled minimal events."""
    dead = set()

    def go(fired, i):
        if i == len(word):
            return True
        if (fired, i) in dead:
            return False
        for nxt in advance(p, fired, word[i]):
            if go(nxt, i + 1):
                return True
        dead.add((fired, i))
        return False

    return go(0, 0)


def in_language(g_or_family, word: Sequence[Action]) -> bool:
    """Whether ``word`` is a prefix of some linearization of some pomset."""
    family = g_or_family if isinstance(g_or_family, list) else sem(g_or_family)
    return any(pomset_accepts(p, word) for p in family)


def language(g_or_family, max_len: int) -> set:
    """Bounded enumeration of the prefix-closed language (words of length <= max_len)."""
    family = g_or_family if isinstance(g_or_family, list) else sem(g_or_family)
    words = set()
    for p in family:
        seen = set()
        stack = [(0, ())]
        while stack:
            fired, word = stack.pop()
            if (fired, word) in seen:
                continue
            seen.add((fired, word))
            words.add(word)
            if len(word) == max_len:
                continue
            for e in range(p.size):
                if not fired >> e & 1 and p.below[e] & ~fired == 0:
                    stack.append((fired | 1 << e, word + (p.labels[e],)))
    return words
