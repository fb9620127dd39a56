"""Integer encoding of systems and selection of the exploration kernel.

The compiled kernel (``_explore_c``) is used when it was built; setting
``CHOREOTEST_PURE=1`` forces the pure-Python fallback.
"""

from __future__ import annotations

import os

from . import _explore_py

try:
    if os.environ.get("CHOREOTEST_PURE"):
        raise ImportError("pure-Python kernel requested")
    from . import _explore_c as _kernel
    BACKEND = "cython"
except ImportError:
    _kernel = _explore_py
    BACKEND = "python"


class Encoded:
    """Flat transition tables indexed by global state number.

    Machine ``i``'s local state ``j`` is global state ``base[i] + j``;
    transitions of global state ``g`` are ``start[g]:start[g + 1]``.
    """

    def __init__(self, sys):
        self.participants = list(sys)
        self.base = []
        self.state_names = []
        self.init = []
        cm_index = {}
        self.cms = []
        per_state = []
        for p in self.participants:
            m = sys[p]
            self.base.append(len(self.state_names))
            local = {q: i for i, q in enumerate(m.states)}
            self.state_names.extend(m.states)
            self.init.append(local[m.initial])
            for q in m.states:
                row = []
                for t in m.outgoing(q):
                    a = t.action
                    key = (a.sender, a.receiver, a.msg)
                    if key not in cm_index:
                        cm_index[key] = len(self.cms)
                        self.cms.append(key)
                    row.append((a.is_output, cm_index[key], local[t.dst], a, t.dst))
                per_state.append(row)
        self.cm_index = cm_index
        self.start = [0]
        self.t_out, self.t_cm, self.t_tgt = [], [], []
        self.actions, self.targets = [], []
        self.has_input = []
        for row in per_state:
            for is_out, cm, tgt, a, dst in row:
                self.t_out.append(1 if is_out else 0)
                self.t_cm.append(cm)
                self.t_tgt.append(tgt)
                self.actions.append(a)
                self.targets.append(dst)
            self.start.append(len(self.t_out))
            self.has_input.append(1 if any(not r[0] for r in row) else 0)
        self.n_machines = len(self.participants)
        self.n_cm = len(self.cms)

    def success_spec(self, channels, success_states):
        """``(stable cm indices, per-global-state acceptance flags)``."""
        chans = None if channels is None else set(channels)
        stable = [i for i, (s, r, _) in enumerate(self.cms) if chans is None or (s, r) in chans]
        accept = [1] * len(self.state_names)
        for i, p in enumerate(self.participants):
            if p not in success_states:
                continue
            ok = set(success_states[p])
            end = self.base[i + 1] if i + 1 < self.n_machines else len(self.state_names)
            for g in range(self.base[i], end):
                accept[g] = 1 if self.state_names[g] in ok else 0
        return stable, accept


def encode(sys) -> Encoded:
    return Encoded(sys)


def explore(enc: Encoded, bound: int, success=None, backend: str | None = None):
    """Run the selected kernel; returns ``(runs, configurations_visited)``.

    Each run is ``(transition ids, status, succeeded)`` with status 0 for a
    maximal run, 1 for a maximal run ending in deadlock, 2 for a run cut at
    the step budget and 3 for a run that revisits a configuration.
    """
    kernel = _kernel
    if backend == "python":
        kernel = _explore_py
    elif backend == "cython":
        from . import _explore_c as kernel
    stable, accept = success if success is not None else ([], None)
    return kernel.explore(
        enc.n_machines, enc.base, enc.init, enc.start, enc.t_out, enc.t_cm, enc.t_tgt,
        enc.has_input, enc.n_cm, bound, stable, accept,
    )
