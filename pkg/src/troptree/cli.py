"""Command-line front end.

Exit codes: 0 success, 1 a negative answer (not ultrametric, not a member,
failed check), 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import __version__
from .compat import (
    MAX_DECISION_LEAVES,
    MAX_SET_LEAVES,
    compatibility_set,
    decide_membership,
    necessary_condition,
)
from .newick import NewickError, parse_newick, write_newick
from .repro import run_checks
from .segment import segment_to_dot, segment_topologies, tropical_segment
from .topology import Topology, enumerate_topologies, is_full_dimensional, topology_of, topology_to_dot
from .torus import DEFAULT_TOL, LeafPermutation, PairVector, apply_permutation, trop_distance
from .treemetrics import Kind, is_tree_metric, is_ultrametric, random_coalescent_tree, tree_to_vector

OK, NEGATIVE, INPUT_ERROR = 0, 1, 2


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = DEFAULT_TOL
    normalize: bool = False
    output_format: str = "text"
    seed: int | None = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InputError("tolerance must be positive")
        if self.output_format not in ("json", "text", "dot"):
            raise InputError(f"unknown format {self.output_format!r}")


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _json(path: str, text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    return data


def load_vector(path: str) -> PairVector:
    """A vector JSON file or a Newick tree, told apart by the first character."""
    text = _read(path).strip()
    try:
        if text.startswith("{"):
            return PairVector.from_json(_json(path, text))
        return tree_to_vector(parse_newick(text))
    except (NewickError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def load_topology(path: str) -> Topology:
    """Topology JSON, or the topology of a vector JSON file or Newick tree."""
    text = _read(path).strip()
    try:
        if text.startswith("{"):
            data = _json(path, text)
            if "clades" in data:
                return Topology.from_json(data)
            return topology_of(PairVector.from_json(data))
        t = parse_newick(text)
        return Topology(t.leaf_count, t.clades)
    except (NewickError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _emit(config: RunConfig, payload, text: str, dot: str | None = None) -> None:
    if config.output_format == "json":
        print(json.dumps(payload, indent=2))
    elif config.output_format == "dot":
        if dot is None:
            raise InputError("DOT output is not available for this command")
        print(dot)
    else:
        print(text)


def _fmt(values) -> str:
    return "(" + ", ".join(f"{x:.10g}" for x in values) + ")"


def cmd_validate(args, config: RunConfig) -> int:
    w = load_vector(args.path)
    report = is_ultrametric(w, config.tolerance)
    four = is_tree_metric(w, config.tolerance)
    payload = {**report.to_json(), "tree_metric": four.ok, "leaf_count": w.leaf_count}
    lines = [str(report), f"tree metric: {'yes' if four.ok else f'no, witness {four.witness}'}"]
    dot = None
    if report.ok and config.output_format == "dot":
        dot = topology_to_dot(topology_of(w, config.tolerance), w, config.tolerance)
    _emit(config, payload, "\n".join(lines), dot)
    return OK if report.kind is Kind.ULTRAMETRIC else NEGATIVE


def _segment(args, config: RunConfig):
    a, b = load_vector(args.source), load_vector(args.target)
    if a.leaf_count != b.leaf_count:
        raise InputError(f"leaf counts differ: {a.leaf_count} vs {b.leaf_count}")
    try:
        return tropical_segment(a, b, normalize=config.normalize, tol=config.tolerance)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_segment(args, config: RunConfig) -> int:
    seg = _segment(args, config)
    bad = []
    if args.verify:
        bad = [k for k, y in enumerate(seg.bend_points, start=1) if not is_ultrametric(y, config.tolerance)]
    payload = seg.to_json()
    if args.verify:
        payload["verified"] = not bad
    lines = [f"{len(seg.lambdas)} bend points"]
    for k, (lam, y) in enumerate(zip(seg.lambdas.tolist(), seg.bend_points), start=1):
        lines.append(f"y{k}  lambda={lam:.10g}  {_fmt(y.coords)}")
    if args.verify:
        lines.append("verify: " + ("all bend points ultrametric" if not bad else f"failed at {bad}"))
    _emit(config, payload, "\n".join(lines), segment_to_dot(seg, config.tolerance))
    return NEGATIVE if bad else OK


def cmd_topologies(args, config: RunConfig) -> int:
    seg = _segment(args, config)
    pieces = segment_topologies(seg, config.tolerance)
    payload = [{"interval": list(p.interval), "topology": p.topology.to_json()} for p in pieces]
    lines = []
    for p in pieces:
        lo, hi = p.interval
        where = f"lambda={lo:.10g}" if lo == hi else f"({lo:.10g}, {hi:.10g})"
        lines.append(f"{where:<28} {p.topology}")
    _emit(config, payload, "\n".join(lines))
    return OK


def cmd_compatible(args, config: RunConfig) -> int:
    F1, F2 = load_topology(args.f1), load_topology(args.f2)
    if F1.leaf_count != F2.leaf_count:
        raise InputError(f"leaf counts differ: {F1.leaf_count} vs {F2.leaf_count}")
    N = F1.leaf_count
    if args.candidate:
        F = load_topology(args.candidate)
        if F.leaf_count != N:
            raise InputError("candidate has a different leaf count")
        if args.necessary_only:
            if not is_full_dimensional(F):
                raise InputError("the necessary condition needs a full-dimensional candidate")
            ok = necessary_condition(F1, F2, F)
            _emit(config, {"candidate": F.to_json(), "passes_necessary": ok}, f"{F}  necessary condition: {ok}")
            return OK if ok else NEGATIVE
        if N > MAX_DECISION_LEAVES:
            raise InputError(f"exact decision is limited to {MAX_DECISION_LEAVES} leaves; use --necessary-only")
        report = decide_membership(F1, F2, F, tol=config.tolerance)
        _emit(config, report.to_json(), _report_line(report))
        return OK if report.member else NEGATIVE
    if N > MAX_SET_LEAVES or N < 3:
        raise InputError(
            f"full compatibility sets need 3 to {MAX_SET_LEAVES} leaves, got {N}; "
            "give --candidate with --necessary-only"
        )
    if args.necessary_only:
        cands = [F for F in enumerate_topologies(N) if necessary_condition(F1, F2, F)]
        _emit(config, [F.to_json() for F in cands], "\n".join(map(str, cands)))
        return OK
    reports = compatibility_set(F1, F2, full_dim_only=not args.all, tol=config.tolerance)
    found = [r for r in reports if r.member]
    text = "\n".join([f"{len(found)} members"] + [_report_line(r) for r in found])
    _emit(config, [r.to_json() for r in reports], text)
    return OK


def _report_line(r) -> str:
    verdict = "member" if r.member else "not a member"
    return f"{str(r.candidate):<40} {verdict}  (necessary condition: {r.passes_necessary})"


def cmd_distance(args, config: RunConfig) -> int:
    a, b = load_vector(args.a), load_vector(args.b)
    if a.leaf_count != b.leaf_count:
        raise InputError(f"leaf counts differ: {a.leaf_count} vs {b.leaf_count}")
    d = trop_distance(a, b)
    _emit(config, {"distance": d}, f"{d:.10g}")
    return OK


def cmd_permute(args, config: RunConfig) -> int:
    w = load_vector(args.path)
    try:
        sigma = LeafPermutation.parse(args.sigma)
        moved = apply_permutation(w, sigma)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(config, moved.to_json(), _fmt(moved.coords))
    return OK


def cmd_random(args, config: RunConfig) -> int:
    if args.n < 2:
        raise InputError("need at least two leaves")
    t = random_coalescent_tree(args.n, 0 if config.seed is None else config.seed)
    w = tree_to_vector(t)
    dot = topology_to_dot(topology_of(w), w) if config.output_format == "dot" else None
    _emit(config, w.to_json(), write_newick(t), dot)
    return OK


def cmd_enumerate(args, config: RunConfig) -> int:
    try:
        tops = enumerate_topologies(args.n, full_dim_only=not args.all)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(config, [F.to_json() for F in tops], "\n".join([f"{len(tops)} topologies", *map(str, tops)]))
    return OK


def cmd_repro(args, config: RunConfig) -> int:
    results = run_checks()
    payload = [{"check": name, "pass": ok, "error": err or None} for name, ok, err in results]
    lines = [f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  [{err}]" if err else "") for name, ok, err in results]
    passed = sum(ok for _, ok, _ in results)
    lines.append(f"{passed}/{len(results)} passed")
    _emit(config, payload, "\n".join(lines))
    return OK if passed == len(results) else NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="comparison tolerance")
    common.add_argument("--format", choices=("text", "json", "dot"), default="text")
    common.add_argument("--normalize", action="store_true", help="rescale bend points to diameter 2")
    common.add_argument("--seed", type=int, default=None)

    parser = argparse.ArgumentParser(prog="troptree", description="Ultrametric trees in the tropical torus.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check the three- and four-point conditions")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    for name, func, text in (
        ("segment", cmd_segment, "tropical segment between two trees"),
        ("topologies", cmd_topologies, "topologies met along the segment"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("source", help="tree at the largest lambda")
        p.add_argument("target", help="tree at the smallest lambda")
        if name == "segment":
            p.add_argument("--verify", action="store_true", help="recheck every bend point")
        p.set_defaults(func=func)

    p = sub.add_parser("compatible", parents=[common], help="topologies of tropical sums")
    p.add_argument("f1")
    p.add_argument("f2")
    p.add_argument("--candidate", help="decide a single topology")
    p.add_argument("--necessary-only", action="store_true", help="only apply the necessary condition")
    p.add_argument("--all", action="store_true", help="include non-binary candidates")
    p.set_defaults(func=cmd_compatible)

    p = sub.add_parser("distance", parents=[common], help="tropical distance")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("permute", parents=[common], help="relabel leaves")
    p.add_argument("path")
    p.add_argument("sigma", help='one-line notation, e.g. "2,3,1,4"')
    p.set_defaults(func=cmd_permute)

    p = sub.add_parser("random", parents=[common], help="coalescent tree")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("enumerate", parents=[common], help="list topologies")
    p.add_argument("n", type=int)
    p.add_argument("--all", action="store_true", help="include non-binary topologies")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("repro", parents=[common], help="run the golden worked examples")
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig(args.tol, args.normalize, args.format, args.seed)
        return args.func(args, config)
    except InputError as exc:
        print(f"troptree: error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
