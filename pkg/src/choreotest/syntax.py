"""Global choreography terms: AST, textual DSL, subtrees and loop unfolding.

Surface syntax::

    G ::= "(o)" | P "->" P ":" M | G ";" G | G "+" G | G "|" G
        | "repeat" "{" G "}" | "(" G ")"

``;`` binds tighter than ``+``, which binds tighter than ``|``. All binary
operators associate to the right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterator, Union


class ChorSyntaxError(ValueError):
    """Malformed choreography text."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        loc = f"{line}:{column}: " if line else ""
        super().__init__(f"{loc}{message}")


class SelfInteractionError(ChorSyntaxError):
    """An interaction whose sender and receiver coincide."""


@dataclass(frozen=True)
class Empty:
    node_id: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class Interaction:
    sender: str
    receiver: str
    msg: str
    node_id: int = field(default=-1, compare=False)

    def __post_init__(self):
        if self.sender == self.receiver:
            raise SelfInteractionError(f"self-interaction {self.sender}->{self.receiver}:{self.msg}")


@dataclass(frozen=True)
class Fork:
    left: "GChor"
    right: "GChor"
    node_id: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class Choice:
    left: "GChor"
    right: "GChor"
    node_id: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class Seq:
    left: "GChor"
    right: "GChor"
    node_id: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class Repeat:
    body: "GChor"
    node_id: int = field(default=-1, compare=False)


GChor = Union[Empty, Interaction, Fork, Choice, Seq, Repeat]
BINARY = (Fork, Choice, Seq)


@dataclass(frozen=True)
class Subtree:
    root: int
    chor: GChor


def children(g: GChor) -> tuple:
    if isinstance(g, BINARY):
        return (g.left, g.right)
    if isinstance(g, Repeat):
        return (g.body,)
    return ()


def iter_nodes(g: GChor) -> Iterator[GChor]:
    """Preorder traversal."""
    stack = [g]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def number(g: GChor, start: int = 0) -> GChor:
    """Return a copy of ``g`` with node ids assigned in preorder from ``start``."""
    counter = [start]

    def go(node):
        nid = counter[0]
        counter[0] += 1
        if isinstance(node, BINARY):
            left = go(node.left)
            right = go(node.right)
            return replace(node, left=left, right=right, node_id=nid)
        if isinstance(node, Repeat):
            return replace(node, body=go(node.body), node_id=nid)
        return replace(node, node_id=nid)

    return go(g)


def normalize(g: GChor) -> GChor:
    """Re-associate nested binary operators of the same kind to the right."""

    def flatten(node, kind):
        if type(node) is kind:
            return flatten(node.left, kind) + flatten(node.right, kind)
        return [normalize(node)]

    if isinstance(g, BINARY):
        parts = flatten(g, type(g))
        out = parts[-1]
        for part in reversed(parts[:-1]):
            out = type(g)(part, out)
        return out
    if isinstance(g, Repeat):
        return Repeat(normalize(g.body))
    return g


def participants(g: GChor) -> frozenset:
    return frozenset(
        p for node in iter_nodes(g) if isinstance(node, Interaction)
        for p in (node.sender, node.receiver)
    )


def has_repeat(g: GChor) -> bool:
    return any(isinstance(node, Repeat) for node in iter_nodes(g))


def unfold(g: GChor, k: int) -> GChor:
    """Replace every ``repeat`` by a choice over 0..k sequential copies of its body.

    The result is renumbered.
    """
    if k < 0:
        raise ValueError("unfolding depth must be non-negative")

    def go(node):
        if isinstance(node, Repeat):
            body = go(node.body)
            options = [Empty()]
            for n in range(1, k + 1):
                copies = body
                for _ in range(n - 1):
                    copies = Seq(body, copies)
                options.append(copies)
            out = options[-1]
            for opt in reversed(options[:-1]):
                out = Choice(opt, out)
            return out
        if isinstance(node, BINARY):
            return type(node)(go(node.left), go(node.right))
        return replace(node, node_id=-1)

    return number(normalize(go(g)))


def subtrees(g: GChor) -> list:
    """Every sub-term of a repeat-free ``g`` in preorder; the whole tree comes first."""
    if has_repeat(g):
        raise ValueError("subtrees() needs a repeat-free choreography; unfold it first")
    return [Subtree(node.node_id, node) for node in iter_nodes(g)]


def node_index(g: GChor) -> dict:
    """Map node id -> node."""
    return {node.node_id: node for node in iter_nodes(g)}


def interaction_ids(g: GChor) -> frozenset:
    return frozenset(n.node_id for n in iter_nodes(g) if isinstance(n, Interaction))


# --------------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<empty>\(o\))
  | (?P<arrow>->)
  | (?P<punct>[;+|:(){}])
  | (?P<ident>[A-Za-z0-9_]+)
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    pos, line, col = 0, 1, 1
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ChorSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            if kind == "ident" and value == "repeat":
                kind = "repeat"
            elif kind in ("punct", "arrow"):
                kind = value
            out.append((kind, value, line, col))
        nl = value.count("\n")
        if nl:
            line += nl
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    out.append(("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def take(self, kind):
        tok = self.toks[self.i]
        if tok[0] != kind:
            shown = tok[1] or "end of input"
            raise ChorSyntaxError(f"expected {kind!r}, found {shown!r}", tok[2], tok[3])
        self.i += 1
        return tok

    def fail(self, what):
        tok = self.toks[self.i]
        shown = tok[1] or "end of input"
        raise ChorSyntaxError(f"expected {what}, found {shown!r}", tok[2], tok[3])

    def parse(self):
        g = self.fork()
        self.take("eof")
        return g

    def fork(self):
        left = self.choice()
        if self.peek() == "|":
            self.i += 1
            return Fork(left, self.fork())
        return left

    def choice(self):
        left = self.seq()
        if self.peek() == "+":
            self.i += 1
            return Choice(left, self.choice())
        return left

    def seq(self):
        left = self.atom()
        if self.peek() == ";":
            self.i += 1
            # trailing (o) may be omitted
            if self.peek() in ("eof", ")", "}", "+", "|"):
                return Seq(left, Empty())
            return Seq(left, self.seq())
        return left

    def atom(self):
        kind = self.peek()
        if kind == "empty":
            self.i += 1
            return Empty()
        if kind == "(":
            self.i += 1
            g = self.fork()
            self.take(")")
            return g
        if kind == "repeat":
            self.i += 1
            self.take("{")
            g = self.fork()
            self.take("}")
            return Repeat(g)
        if kind == "ident":
            sender = self.take("ident")
            self.take("->")
            receiver = self.take("ident")
            self.take(":")
            msg = self.take("ident")
            if sender[1] == receiver[1]:
                raise SelfInteractionError(
                    f"self-interaction {sender[1]}->{receiver[1]}:{msg[1]}", sender[2], sender[3]
                )
            return Interaction(sender[1], receiver[1], msg[1])
        self.fail("a choreography")


def parse(text: str) -> GChor:
    """Parse DSL text into a numbered, right-associated AST."""
    return number(normalize(_Parser(text).parse()))


# ----------------------------------------------------------------- printing

_PREC = {Fork: 0, Choice: 1, Seq: 2}
_OPS = {Fork: " | ", Choice: " + ", Seq: " ; "}


def pretty(g: GChor) -> str:
    """Render ``g`` in the DSL with the fewest parentheses that round-trip."""

    def go(node, ctx):
        if isinstance(node, Empty):
            return "(o)"
        if isinstance(node, Interaction):
            return f"{node.sender}->{node.receiver}:{node.msg}"
        if isinstance(node, Repeat):
            return "repeat { " + go(node.body, -1) + " }"
        prec = _PREC[type(node)]
        # left operand of a right-associative operator needs parens at equal precedence
        text = go(node.left, prec + 0.5) + _OPS[type(node)] + go(node.right, prec)
        return f"({text})" if prec < ctx else text

    return go(g, -1)


def to_json(g: GChor) -> dict:
    if isinstance(g, Empty):
        return {"kind": "empty", "nodeId": g.node_id}
    if isinstance(g, Interaction):
        return {"kind": "interaction", "nodeId": g.node_id, "sender": g.sender,
                "receiver": g.receiver, "msg": g.msg}
    if isinstance(g, Repeat):
        return {"kind": "repeat", "nodeId": g.node_id, "body": to_json(g.body)}
    kind = {Fork: "fork", Choice: "choice", Seq: "seq"}[type(g)]
    return {"kind": kind, "nodeId": g.node_id, "left": to_json(g.left), "right": to_json(g.right)}


def from_json(data: dict) -> GChor:
    kind = data["kind"]
    nid = data.get("nodeId", -1)
    if kind == "empty":
        return Empty(nid)
    if kind == "interaction":
        return Interaction(data["sender"], data["receiver"], data["msg"], nid)
    if kind == "repeat":
        return Repeat(from_json(data["body"]), nid)
    cls = {"fork": Fork, "choice": Choice, "seq": Seq}[kind]
    return cls(from_json(data["left"]), from_json(data["right"]), nid)
