"""``choreotest`` command line.

Exit status: 0 on success / pass, 1 on a failed check, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus
from .compliance import check_suite
from .machines import DEFAULT_BOUND, cfsm_from_json, cfsm_to_dot, cfsm_to_json
from .projection import check_well_formed, project, project_system
from .semantics import format_word, language, sem
from .syntax import ChorSyntaxError, has_repeat, parse, pretty, subtrees, to_json, unfold
from .testgen import CLOSED, MINIMAL, NotWellFormedError, TestSuite, gen_tests

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, text: str):
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def _load_chor(args):
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(str(e))
    g = parse(text)
    if has_repeat(g):
        g = unfold(g, args.unfold)
    return g


def parse_channels(text: str | None):
    if not text:
        return None
    chans = set()
    for item in text.split(","):
        item = item.strip()
        for sep in (":", "-"):
            if sep in item:
                a, b = item.split(sep, 1)
                break
        else:
            if len(item) != 2:
                raise UsageError(f"channel {item!r}: write AB, or A:B for longer names")
            a, b = item[0], item[1]
        chans.add((a, b))
    return chans


def cmd_parse(args):
    g = parse(Path(args.file).read_text(encoding="utf-8"))
    if args.unfold is not None:
        g = unfold(g, args.unfold)
    if args.format == "text":
        _emit(args, pretty(g))
    else:
        _emit(args, _dump(to_json(g)))
    return OK


def cmd_semantics(args):
    g = _load_chor(args)
    family = sem(g)
    if args.format == "text":
        lines = [f"{len(family)} pomset(s)"]
        for i, p in enumerate(family):
            lines.append(f"pomset {i}: " + ", ".join(
                f"{p.labels[a]} < {p.labels[b]}" for a, b in sorted(p.reduction())) or f"pomset {i}: (empty)")
        if args.max_len is not None:
            for w in sorted(language(family, args.max_len), key=lambda w: (len(w), format_word(w))):
                lines.append(format_word(w) or "ε")
        _emit(args, "\n".join(lines))
        return OK
    out = {"pomsets": [p.to_json() for p in family]}
    if args.max_len is not None:
        words = language(family, args.max_len)
        out["language"] = sorted((format_word(w) for w in words), key=lambda s: (len(s.split()), s))
    _emit(args, _dump(out))
    return OK


def cmd_project(args):
    g = _load_chor(args)
    sys_ = project_system(g)
    roles = [args.role] if args.role else list(sys_)
    if args.role and args.role not in sys_:
        raise UsageError(f"{args.role} does not occur in the choreography")
    machines = {r: (sys_[r] if r in sys_ else project(g, r)) for r in roles}
    if args.format == "dot":
        _emit(args, "\n".join(cfsm_to_dot(m, name=r) for r, m in machines.items()))
    elif args.format == "text":
        lines = []
        for r, m in machines.items():
            lines.append(f"{r}: {len(m.states)} states, initial {m.initial}")
            lines.extend(f"  {t}" for t in m.transitions)
        _emit(args, "\n".join(lines))
    else:
        data = [cfsm_to_json(m, r) for r, m in machines.items()]
        _emit(args, _dump(data[0] if args.role else data))
    return OK


def cmd_wf(args):
    g = _load_chor(args)
    verdict = check_well_formed(g, args.bound)
    if args.format == "text":
        lines = [f"well-formed: {verdict.well_formed}",
                 f"language included: {verdict.language_included}",
                 f"deadlock free: {verdict.deadlock_free}",
                 f"exhaustive: {verdict.exhaustive}"]
        lines += [f"  {w.reason}: {format_word(w.run.trace[:w.prefix])}" for w in verdict.witnesses]
        _emit(args, "\n".join(lines))
    else:
        _emit(args, _dump(verdict.to_json()))
    return OK if verdict.well_formed else FAIL


def _which(text: str):
    if text in ("all", "root"):
        return text
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--subtrees expects all, root or a comma-separated list of node ids, got {text!r}")


def cmd_gen(args):
    g = _load_chor(args)
    try:
        suite = gen_tests(g, args.cut, args.bound, _which(args.subtrees), args.oracle)
    except NotWellFormedError as e:
        sys.stderr.write(f"choreotest: {e}\n")
        return FAIL
    if args.format == "dot":
        _emit(args, suite.to_dot())
    elif args.format == "text":
        index = {s.root: s.chor for s in subtrees(g)}
        lines = [f"{len(suite.cases)} test case(s) for CUT {suite.cut}"]
        for root, cases in suite.by_subtree().items():
            lines.append(f"subtree {root} [{pretty(index[root])}]: {len(cases)} case(s)")
        _emit(args, "\n".join(lines))
    else:
        _emit(args, _dump(suite.to_json()))
    return OK


def _report_text(report) -> str:
    lines = [f"CUT {report.cut}: {len(report.verdicts) - len(report.failing())}/{len(report.verdicts)} "
             f"test(s) passed"]
    for i, (case, v) in enumerate(report.verdicts):
        if v.compliant:
            continue
        lines.append(f"FAIL case {i} (subtree {case.subtree})")
        for f in v.failures[:3]:
            lines.append(f"  {f.reason}: {format_word(f.run.trace) or 'ε'}")
    return "\n".join(lines)


def cmd_check(args):
    try:
        suite_data = json.loads(Path(args.suite).read_text())
        cut_data = json.loads(Path(args.cut_machine).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(str(e))
    suite = TestSuite.from_json(suite_data)
    names = {suite.cut} | {m.participant for c in suite.cases for m in c.members}
    participant, machine = cfsm_from_json(cut_data, sorted(names))
    if participant not in (None, suite.cut):
        raise UsageError(f"CUT machine belongs to {participant}, the suite tests {suite.cut}")
    report = check_suite(machine, suite, parse_channels(args.channels), args.bound)
    if args.format == "text":
        _emit(args, _report_text(report))
    else:
        _emit(args, _dump(report.to_json()))
    return OK if report.passed else FAIL


def cmd_demo(args):
    g = parse(corpus.ATM_FULL)
    lines = [f"choreography: {pretty(g)}"]
    verdict = check_well_formed(g, args.bound)
    lines.append(f"well-formed: {verdict.well_formed}")
    sys_ = project_system(g)
    for p, m in sys_.items():
        lines.append(f"projection {p}: {len(m.states)} states, {len(m.transitions)} transitions")
    suite = gen_tests(g, "A", args.bound)
    groups = suite.by_subtree()
    lines.append(f"tests for CUT A: {len(suite.cases)} over {len(groups)} subtrees "
                 f"({sorted({len(v) for v in groups.values()})} per subtree)")
    report = check_suite(sys_["A"], suite, None, args.bound)
    lines.append(f"projection of A passes {len(report.verdicts) - len(report.failing())}/{len(report.verdicts)}")
    mutant = sys_["A"].without([t for t in sys_["A"].transitions if str(t.action) == "AC!money"])
    mreport = check_suite(mutant, suite, None, args.bound)
    lines.append(f"mutant without AC!money passes {len(mreport.verdicts) - len(mreport.failing())}"
                 f"/{len(mreport.verdicts)}")
    ok = verdict.well_formed and report.passed and not mreport.passed
    if args.format == "json":
        _emit(args, _dump({"wellFormed": verdict.well_formed, "tests": len(suite.cases),
                           "projectionPasses": report.passed, "mutantCaught": not mreport.passed}))
    else:
        _emit(args, "\n".join(lines))
    return OK if ok else FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="choreotest", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("json", "text"), chor=True):
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("-o", "--output", help="write to a file instead of stdout")
        if chor:
            p.add_argument("file", help="choreography source (.gc)")
            p.add_argument("--unfold", type=int, default=1, help="loop unfolding depth (default 1)")
        return p

    p = common(sub.add_parser("parse", help="validate a choreography and print its AST"))
    p.set_defaults(func=cmd_parse, unfold=None)
    p = common(sub.add_parser("semantics", help="pomsets and bounded language"), ("json", "text"))
    p.add_argument("--max-len", type=int, help="also list language words up to this length")
    p.set_defaults(func=cmd_semantics)
    p = common(sub.add_parser("project", help="project onto local machines"), ("json", "dot", "text"))
    p.add_argument("--role", help="participant to project on (default: all)")
    p.set_defaults(func=cmd_project)
    p = common(sub.add_parser("wf", help="check well-formedness by exhaustive exploration"))
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.set_defaults(func=cmd_wf)
    p = common(sub.add_parser("gen", help="generate a test suite"), ("json", "dot", "text"))
    p.add_argument("--cut", required=True, help="component under test")
    p.add_argument("--subtrees", default="all", help="all | root | comma-separated node ids")
    p.add_argument("--oracle", choices=(CLOSED, MINIMAL), default=CLOSED)
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.set_defaults(func=cmd_gen)
    p = common(sub.add_parser("check", help="run a suite against a CUT machine"), chor=False)
    p.add_argument("--cut-machine", required=True, help="CFSM JSON of the component under test")
    p.add_argument("--suite", required=True, help="test suite JSON")
    p.add_argument("--channels", help="comma-separated channels that must be empty (default: all)")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.set_defaults(func=cmd_check)
    p = common(sub.add_parser("demo", help="run the ATM pipeline end to end"), ("text", "json"), chor=False)
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ChorSyntaxError) as e:
        sys.stderr.write(f"choreotest: {e}\n")
        return USAGE
    except (ValueError, KeyError, OSError) as e:
        sys.stderr.write(f"choreotest: {e}\n")
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
