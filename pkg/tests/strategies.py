"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from choreotest.syntax import Choice, Empty, Fork, Interaction, Repeat, Seq

NAMES = ["A", "B", "C"]
MSGS = ["m", "n", "x"]


@st.composite
def interactions(draw, names=NAMES):
    s = draw(st.sampled_from(names))
    r = draw(st.sampled_from([p for p in names if p != s]))
    return Interaction(s, r, draw(st.sampled_from(MSGS)))


def chors(max_leaves: int = 8, repeat: bool = False, empty: bool = True):
    leaves = interactions() | st.just(Empty()) if empty else interactions()

    def extend(inner):
        ops = [st.builds(Seq, inner, inner), st.builds(Choice, inner, inner), st.builds(Fork, inner, inner)]
        if repeat:
            ops.append(st.builds(Repeat, inner))
        return st.one_of(*ops)

    return st.recursive(leaves, extend, max_leaves=max_leaves)
