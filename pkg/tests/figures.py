"""Machines transcribed from the published figures, with their original state names."""

from choreotest.machines import Cfsm, Transition
from choreotest.semantics import parse_action


def machine(edges: str, initial: str | None = None) -> Cfsm:
    """Build a CFSM from lines of ``src action dst``."""
    ts, states = [], []
    for line in edges.strip().splitlines():
        src, act, dst = line.split()
        ts.append(Transition(src, parse_action(act), dst))
        for q in (src, dst):
            if q not in states:
                states.append(q)
    return Cfsm(tuple(states), initial or states[0], tuple(ts))


# running example: client, bank and ATM with the replicated final states as drawn
FIG1_C = machine("""
C1 CA!withdraw C2
C2 AC?bye C3
C2 AC?money C4
""")
FIG1_B = machine("""
B1 AB?authW B2
B2 BA!deny B3
B2 BA!allow B4
""")
FIG1_A = machine("""
A1 CA?withdraw A2
A2 AB!authW A3
A3 BA?deny A4
A4 AC!bye A5
A3 BA?allow A6
A6 AC!money A7
""")

# projections of the complete ATM choreography
FIG3_C = machine("""
C1 CA!auth C2
C2 AC?authFail C3
C2 AC?granted C4
C4 CA!withdraw C5
C4 CA!quit C6
C4 CA!checkBalance C7
C5 AC?bye C8
C5 AC?money C9
C7 AC?balance C10
""")
FIG3_B = machine("""
B1 AB?authReq B2
B2 BA!denied B3
B2 BA!granted B4
B4 AB?authW B5
B4 AB?getBalance B8
B4 AB?quit B10
B5 BA!deny B6
B5 BA!allow B7
B8 BA!balance B9
""")
FIG3_A = machine("""
A1 CA?auth A2
A2 AB!authReq A3
A3 BA?denied A4
A4 AC!authFail A5
A3 BA?granted A6
A6 AC!granted A7
A7 CA?withdraw A8
A7 CA?quit A14
A7 CA?checkBalance A16
A8 AB!authW A9
A9 BA?deny A10
A10 AC!bye A11
A9 BA?allow A12
A12 AC!money A13
A14 AB!quit A15
A16 AB!getBalance A17
A17 BA?balance A18
A18 AC!balance A19
""")

# client machines left after splitting and trimming
FIG5_CLIENTS = [
    machine("""
Ca1 CA!auth Ca2
Ca2 AC?authFail Ca3
Ca2 AC?granted Ca4
Ca4 CA!withdraw Ca5
Ca5 AC?bye Ca8
Ca5 AC?money Ca9
"""),
    machine("""
Cb1 CA!auth Cb2
Cb2 AC?authFail Cb3
Cb2 AC?granted Cb4
Cb4 CA!quit Cb6
"""),
    machine("""
Cc1 CA!auth Cc2
Cc2 AC?authFail Cc3
Cc2 AC?granted Cc4
Cc4 CA!checkBalance Cc7
Cc7 AC?balance Cc10
"""),
]

# mixed-choice example: the bank and the client each have two ways to swap n
MIXED_A = machine("q0 AB!m q1")
MIXED_B_SOLID = machine("""
q0 BC!n q1
q1 CB?n q3
q3 AB?m q4
""")
MIXED_B_DASHED = machine("""
q0 CB?n q2
q2 BC!n q3
q3 AB?m q4
""")
MIXED_C_SOLID = machine("""
q0 CB!n q1
q1 BC?n q3
""")
MIXED_C_DASHED = machine("""
q0 BC?n q2
q2 CB!n q3
""")
