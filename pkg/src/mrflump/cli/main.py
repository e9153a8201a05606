"""Command-line entry point.

Exit codes: 0 when every verdict and assertion passes, 1 on a negative verdict or a
failed assertion, 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .. import __version__
from ..dist import DEFAULT_TOL, is_mrf
from ..errors import MrfLumpError
from ..gibbs import assign_cliques
from ..graph import Graph
from ..info import analyze_information, necessary_residuals, prop2_condition
from ..lump import check_lumpable, minimal_graphs, pushforward
from . import fixtures
from .generate import PROFILES, random_instance
from .instance import Instance, InstanceError, parse_instance
from .report import build_report, dumps, graph_dict, text_report, verdict_dict
from .suites import SuiteResult, run_checks

DATA_DIR = Path(__file__).parent / "data"


class UsageError(MrfLumpError):
    pass


def bundled_path(name: str) -> Path:
    return DATA_DIR / f"{name}.json"


def load_instance(spec: str, rational: bool = False) -> Instance:
    """Read an instance file; a bare fixture name resolves to the bundled copy."""
    path = Path(spec)
    if not path.exists():
        stem = spec[:-5] if spec.endswith(".json") else spec
        if stem in fixtures.NAMES and bundled_path(stem).exists() and path.parent == Path("."):
            path = bundled_path(stem)
    return parse_instance(path, rational=rational)


def parse_edges(text: str, inst: Instance) -> Graph:
    """``"X1-X2,X2-X3"`` or 0-based indices ``"0-1,1-2"``; empty means no edges."""
    lookup = {nm: k for k, nm in enumerate(inst.variable_names)}
    edges = set()
    for part in filter(None, (p.strip() for p in text.split(","))):
        ends = part.split("-") if part.count("-") == 1 else None
        if not ends:
            raise UsageError(f"cannot parse edge {part!r}")
        idx = []
        for e in ends:
            e = e.strip()
            if e in lookup:
                idx.append(lookup[e] + 1)
            elif e.isdigit() and int(e) < inst.graph.n:
                idx.append(int(e) + 1)
            else:
                raise UsageError(f"unknown variable {e!r} in edge {part!r}")
        if idx[0] == idx[1]:
            raise UsageError(f"self-loop {part!r}")
        edges.add((min(idx), max(idx)))
    return Graph(inst.graph.n, frozenset(edges))


def _write_json(path, payload):
    if path:
        Path(path).write_text(dumps(payload), encoding="utf-8")


def cmd_check_mrf(args) -> int:
    inst = load_instance(args.instance, args.rational)
    g = parse_edges(args.graph_check, inst) if args.graph_check is not None else inst.graph
    t = inst.distribution
    by_def = is_mrf(t, g, "definition", args.tolerance)
    by_ent = is_mrf(t, g, "entropy", args.tolerance)
    print(f"instance {inst.name}: graph {graph_dict(inst, g)}")
    print(f"  MRF (definition): {'yes' if by_def.holds else 'no'}")
    print(f"  MRF (entropy):    {'yes' if by_ent.holds else 'no'}")
    if by_def.witness:
        v, x = by_def.witness
        print(f"  violated at {inst.variable_names[v - 1]}, x = {list(x)}")
    agree = by_def.holds == by_ent.holds
    if not agree:
        print("  ASSERTION FAILED: methods disagree")
    _write_json(args.json, build_report(inst, extra={
        "graph": graph_dict(inst, g),
        "mrf_definition": verdict_dict(inst, by_def),
        "mrf_entropy": verdict_dict(inst, by_ent),
    }))
    return 0 if by_def.holds and agree else 1


def _need_lumping(inst: Instance):
    if inst.lumping is None:
        raise UsageError(f"instance {inst.name} has no lumping")
    return inst.lumping


def cmd_lump(args) -> int:
    inst = load_instance(args.instance, args.rational)
    lump = _need_lumping(inst)
    t0 = time.perf_counter()
    rep = check_lumpable(inst.distribution, lump, inst.family, args.tolerance)
    elapsed = time.perf_counter() - t0
    print(text_report(inst, lumpability=rep))
    _write_json(args.json, build_report(inst, lumpability=rep, timing=elapsed if args.timing else None))
    return 0 if rep.is_lumpable else 1


def cmd_info(args) -> int:
    inst = load_instance(args.instance, args.rational)
    lump = _need_lumping(inst)
    t0 = time.perf_counter()
    rep = analyze_information(inst.distribution, lump, inst.graph, args.tolerance)
    elapsed = time.perf_counter() - t0
    print(text_report(inst, information=rep))
    _write_json(args.json, build_report(inst, information=rep, timing=elapsed if args.timing else None))
    return 0 if rep.preserving else 1


def cmd_minimal_graph(args) -> int:
    inst = load_instance(args.instance, args.rational)
    t = inst.distribution
    extra = {"minimal_graphs_x": [graph_dict(inst, g) for g in minimal_graphs(t, args.tolerance)]}
    for g in minimal_graphs(t, args.tolerance):
        print(f"minimal graph for X: {graph_dict(inst, g)}")
    if inst.lumping is not None:
        gy = minimal_graphs(pushforward(t, inst.lumping), args.tolerance)
        extra["minimal_graphs_y"] = [graph_dict(inst, g) for g in gy]
        for g in gy:
            print(f"minimal graph for Y: {graph_dict(inst, g)}")
    _write_json(args.json, build_report(inst, extra=extra))
    return 0


def check_fixture(name: str, tol: float = DEFAULT_TOL):
    """Run one fixture and compare with ``fixtures.EXPECTED``; returns (report, failures)."""
    inst = fixtures.builtin_fixture(name)
    exp = fixtures.EXPECTED[name]
    t = inst.distribution
    lr = check_lumpable(t, inst.lumping, inst.family, tol)
    ir = analyze_information(t, inst.lumping, inst.graph, tol)
    fails = []
    if lr.is_lumpable != exp["lumpable"]:
        fails.append(f"lumpable = {lr.is_lumpable}, expected {exp['lumpable']}")
    if ir.preserving != exp["preserving"]:
        fails.append(f"preserving = {ir.preserving}, expected {exp['preserving']}")
    if "minimal_graphs" in exp:
        got = [g.sorted_edges() for g in lr.minimal_graphs]
        if got != exp["minimal_graphs"]:
            fails.append(f"minimal graphs {got}, expected {exp['minimal_graphs']}")
    if "certificate" in exp and lr.certificate != exp["certificate"]:
        fails.append(f"certificate {lr.certificate}, expected {exp['certificate']}")
    if "rewrite_offenders" in exp:
        rw = fixtures.example4_rewrite()
        if not rw.distribution.same_as(t):
            fails.append("rewritten family changes the distribution")
        d = assign_cliques(rw.family, rw.lumping)
        got = {} if d else {v: [tuple(sorted(c)) for c in cs] for v, cs in d.offenders.items()}
        if got != exp["rewrite_offenders"]:
            fails.append(f"rewrite offenders {got}, expected {exp['rewrite_offenders']}")
        if check_lumpable(rw.distribution, rw.lumping, rw.family, tol, find_minimal=False).certificate == "prop1":
            fails.append("prop1 fired on the rewritten family")
    if "prop2_fails_at" in exp:
        _, res = prop2_condition(t, inst.lumping, inst.graph, tol)
        got = [i for i, r in res.items() if r > tol]
        if got != exp["prop2_fails_at"]:
            fails.append(f"prop2 fails at {got}, expected {exp['prop2_fails_at']}")
    if exp.get("necessary_holds"):
        if any(r > tol for r in necessary_residuals(t, inst.lumping, inst.graph, tol).values()):
            fails.append("necessary condition does not hold")
    if "sufficient_witness" in exp:
        w = ir.sufficient_witness
        got = None if w is None else w.permutation
        if got != exp["sufficient_witness"]:
            fails.append(f"sufficient witness {got}, expected {exp['sufficient_witness']}")
    return inst, lr, ir, fails


def cmd_examples(args) -> int:
    reports = []
    failed = 0
    for name in fixtures.NAMES:
        inst, lr, ir, fails = check_fixture(name, args.tolerance)
        print(text_report(inst, lumpability=lr, information=ir))
        for f in fails:
            print(f"  ASSERTION FAILED: {f}")
        print(f"  => {'PASS' if not fails else 'FAIL'}")
        failed += bool(fails)
        reports.append(build_report(inst, lumpability=lr, information=ir, extra={"assertions_passed": not fails}))
    print(f"{len(fixtures.NAMES) - failed}/{len(fixtures.NAMES)} fixtures reproduce their expected verdicts")
    _write_json(args.json, {"tool_version": __version__, "fixtures": reports})
    return 0 if failed == 0 else 1


def cmd_random_suite(args) -> int:
    total = SuiteResult()
    t0 = time.perf_counter()
    for k in range(args.count):
        inst = random_instance(args.seed + k, args.profile, exact=not args.float)
        total.merge(run_checks(inst, args.profile, args.tolerance))
    elapsed = time.perf_counter() - t0
    print(f"random-suite profile={args.profile} seed={args.seed} count={args.count}")
    for key in sorted(total.counts):
        print(f"  {key}: {total.counts[key]}")
    for f in total.failures:
        print(f"  FAILURE {f}")
    print(f"  failures: {len(total.failures)}")
    if args.timing:
        print(f"  elapsed: {elapsed:.2f} s")
    payload = {
        "tool_version": __version__,
        "profile": args.profile,
        "seed": args.seed,
        "count": args.count,
        "counts": dict(sorted(total.counts.items())),
        "failures": total.failures,
    }
    if args.timing:
        payload["timing_seconds"] = elapsed
    _write_json(args.json, payload)
    return 0 if not total.failures else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write the machine-readable report here")
    common.add_argument("--tolerance", type=float, default=DEFAULT_TOL, help="absolute tolerance (default 1e-9)")
    common.add_argument("--rational", action="store_true", help="force exact rational arithmetic")
    common.add_argument("--timing", action="store_true", help="include wall-clock timings in the report")

    inst = argparse.ArgumentParser(add_help=False)
    inst.add_argument("--instance", required=True, metavar="PATH", help="instance file or built-in fixture name")

    p = argparse.ArgumentParser(prog="mrflump", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("check-mrf", parents=[common, inst], help="is the distribution an MRF on a graph?")
    s.add_argument("--graph-check", metavar="EDGES", help="edges to test instead of the instance graph, e.g. X1-X2,X2-X3")
    s.set_defaults(func=cmd_check_mrf)
    s = sub.add_parser("lump", parents=[common, inst], help="lumpability verdict and certificates")
    s.set_defaults(func=cmd_lump)
    s = sub.add_parser("minimal-graph", parents=[common, inst], help="inclusion-minimal MRF graphs")
    s.set_defaults(func=cmd_minimal_graph)
    s = sub.add_parser("info", parents=[common, inst], help="information preservation")
    s.set_defaults(func=cmd_info)
    s = sub.add_parser("examples", parents=[common], help="run the built-in fixtures")
    s.set_defaults(func=cmd_examples)
    s = sub.add_parser("random-suite", parents=[common], help="seeded property suite")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=100)
    s.add_argument("--profile", choices=PROFILES, default="generic")
    s.add_argument("--float", action="store_true", help="generate float instead of rational instances")
    s.set_defaults(func=cmd_random_suite)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", 0) < 0:
        parser.error("--seed must be nonnegative")
    try:
        return args.func(args)
    except (InstanceError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MrfLumpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
