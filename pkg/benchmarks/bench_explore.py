"""Compare the compiled and pure-Python run-enumeration kernels.

    python benchmarks/bench_explore.py [--repeat N]
"""

import argparse
import time

from choreotest import _core
from choreotest.corpus import ATM_FORK, ATM_FULL
from choreotest.projection import project_system
from choreotest.syntax import parse

WORKLOADS = {
    "atm-full": ATM_FULL,
    "atm-fork": ATM_FORK,
    "fork-4": "A->B:a | C->D:b | E->F:c | G->H:d",
    "fork-5": "A->B:a | C->D:b | E->F:c | G->H:d | I->J:e",
    "pipeline": "A->B:m ; (B->C:x | B->D:y) ; (C->A:u | D->A:v) ; (A->C:p + A->C:q ; C->D:r)",
}


def timed(enc, backend, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        runs, visited = _core.explore(enc, 10_000, None, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, len(runs), visited


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    try:
        from choreotest import _explore_c  # noqa: F401
        backends = ["python", "cython"]
    except ImportError:
        backends = ["python"]
        print("compiled kernel not built; timing the pure-Python kernel only")
    print(f"{'workload':<10} {'runs':>7} {'configs':>8} " + " ".join(f"{b + ' s':>10}" for b in backends)
          + ("   speedup" if len(backends) == 2 else ""))
    for name, text in WORKLOADS.items():
        enc = _core.encode(project_system(parse(text)))
        times = {}
        for b in backends:
            times[b], n_runs, visited = timed(enc, b, args.repeat)
        line = f"{name:<10} {n_runs:>7} {visited:>8} " + " ".join(f"{times[b]:>10.4f}" for b in backends)
        if len(backends) == 2:
            line += f"   {times['python'] / times['cython']:>6.1f}x"
        print(line)


if __name__ == "__main__":
    main()
