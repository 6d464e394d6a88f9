"""Golden worked examples, runnable as a pass/fail table (``troptree repro``)."""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .compat import compatibility_set, decide_membership, members, necessary_condition
from .newick import parse_newick
from .segment import check_equivariance, rescale_to_height, segment_topologies, tropical_segment
from .topology import Topology, double_factorial, enumerate_topologies, topology_of
from .torus import LeafPermutation, PairVector, apply_permutation, trop_distance
from .treemetrics import is_ultrametric, tree_to_vector

FIVE_LEAF_NEWICK = "((A:8,B:8):12,(C:10,(D:5,E:5):5):10);"
FIVE_LEAF_VECTOR = (16, 40, 40, 40, 40, 40, 40, 20, 20, 10)

W1 = (0.4, 0.8, 2, 0.8, 2, 2)
W2 = (2, 2, 2, 0.8, 0.8, 0.4)
W2_ALT = (0.8, 0.8, 2, 0.4, 2, 2)
SEGMENT_LAMBDAS = (-1.6, -1.2, 0, 1.2, 1.6)
SEGMENT_BENDS = (
    (2, 2, 2, 0.8, 0.8, 0.4),
    (2, 2, 2, 0.8, 0.8, 0.8),
    (2, 2, 2, 0.8, 2, 2),
    (0.8, 0.8, 2, 0.8, 2, 2),
    (0.4, 0.8, 2, 0.8, 2, 2),
)
SEGMENT_TOPOLOGIES = (
    ({3, 4}, {2, 3, 4}),
    ({2, 3, 4},),
    ({2, 3},),
    ({1, 2, 3},),
    ({1, 2}, {1, 2, 3}),
)

PAIR_F1 = Topology.of(5, {1, 2, 3}, {1, 2}, {4, 5})
PAIR_F2 = Topology.of(5, {1, 3, 4, 5}, {1, 3, 5}, {1, 5})
PAIR_MEMBERS = (
    PAIR_F1,
    PAIR_F2,
    Topology.of(5, {1, 3, 4, 5}, {1, 3, 5}, {1, 3}),
    Topology.of(5, {1, 3, 4, 5}, {4, 5}, {1, 3}),
    Topology.of(5, {1, 2, 3}, {1, 3}, {4, 5}),
)
PAIR_EXCLUDED = Topology.of(5, {1, 2, 3}, {2, 3}, {4, 5})

GAP_F1 = Topology.of(5, {3, 4})
GAP_F2 = Topology.of(5, {1, 4}, {2, 3}, {1, 2, 3, 4})
GAP_F = Topology.of(5, {1, 4}, {1, 3, 4}, {2, 5})

CYCLE_F1 = Topology.of(
    12, {1, 2, 7, 8, 9, 12}, {1, 7, 9}, {2, 8, 12}, {1, 7}, {2, 8},
    {3, 4, 5, 6, 10, 11}, {3, 5, 11}, {4, 6, 10}, {3, 5}, {4, 6},
)
CYCLE_F2 = Topology.of(
    12, {1, 2, 3, 4, 9, 10}, {2, 3, 4, 9, 10}, {2, 3, 4, 10}, {3, 4, 10}, {3, 10},
    {5, 6, 7, 8, 11, 12}, {5, 7, 12}, {6, 8, 11}, {5, 7}, {6, 8},
)
CYCLE_F = Topology.of(
    12, {1, 2, 3, 4, 9, 10}, {1, 2, 9}, {3, 4, 10}, {1, 9}, {3, 10},
    {5, 6, 7, 8, 11, 12}, {5, 6, 11}, {7, 8, 12}, {5, 11}, {7, 12},
)


def _close(a, b, tol: float = 1e-9) -> bool:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= tol))


def _newick_vector() -> bool:
    return _close(tree_to_vector(parse_newick(FIVE_LEAF_NEWICK)).coords, FIVE_LEAF_VECTOR)


def _newick_topology() -> bool:
    F = topology_of(PairVector(FIVE_LEAF_VECTOR))
    return F == Topology.of(5, {1, 2}, {3, 4, 5}, {4, 5}) and bool(is_ultrametric(PairVector(FIVE_LEAF_VECTOR)))


def _segment_lambdas() -> bool:
    return _close(tropical_segment(PairVector(W1), PairVector(W2)).lambdas, SEGMENT_LAMBDAS)


def _segment_bends() -> bool:
    seg = tropical_segment(PairVector(W1), PairVector(W2), normalize=True)
    return len(seg.bend_points) == 5 and all(
        _close(y.coords, expected) for y, expected in zip(seg.bend_points, SEGMENT_BENDS)
    )


def _rescale() -> bool:
    return _close(rescale_to_height(PairVector((2, 2, 3.2, 2, 3.2, 3.2))).coords, SEGMENT_BENDS[3]) and _close(
        rescale_to_height(PairVector((2, 2.4, 3.6, 2.4, 3.6, 3.6))).coords, W1
    )


def _segment_topologies() -> bool:
    seg = tropical_segment(PairVector(W1), PairVector(W2))
    bends = [p.topology for p in segment_topologies(seg) if p.interval[0] == p.interval[1]]
    return bends == [Topology.of(4, *clades) for clades in SEGMENT_TOPOLOGIES]


def _relabel() -> bool:
    sigma = LeafPermutation((2, 3, 1, 4))
    return sigma.inverse().mapping == (3, 1, 2, 4) and _close(
        apply_permutation(PairVector(W2_ALT), sigma).coords, W1
    )


def _equivariance() -> bool:
    sigma = LeafPermutation((4, 3, 2, 1))
    origin = PairVector(np.zeros(6))
    moved = apply_permutation(PairVector(W1), sigma)
    return _close(moved.coords, W2) and check_equivariance(PairVector(W1), origin, sigma)


def _distance() -> bool:
    return abs(trop_distance(PairVector(W1), PairVector(W2)) - 3.2) <= 1e-9


def _members() -> bool:
    reports = compatibility_set(PAIR_F1, PAIR_F2)
    found = members(reports)
    return sorted(found) == sorted(PAIR_MEMBERS) and PAIR_EXCLUDED not in found


def _excluded_by_filter() -> bool:
    return not necessary_condition(PAIR_F1, PAIR_F2, PAIR_EXCLUDED)


def _gap() -> bool:
    return necessary_condition(GAP_F1, GAP_F2, GAP_F) and decide_membership(GAP_F1, GAP_F2, GAP_F).member is False


def _cycle() -> bool:
    report = decide_membership(CYCLE_F1, CYCLE_F2, CYCLE_F, max_leaves=12)
    return necessary_condition(CYCLE_F1, CYCLE_F2, CYCLE_F) and report.member is False


def _counts() -> bool:
    return all(len(enumerate_topologies(N)) == double_factorial(2 * N - 3) for N in (3, 4, 5)) and len(
        enumerate_topologies(4)
    ) == 15


class Check(NamedTuple):
    name: str
    run: Callable[[], bool]


CHECKS = (
    Check("five-leaf Newick tree gives (16,40,40,40,40,40,40,20,20,10)", _newick_vector),
    Check("five-leaf vector has clades {1,2},{3,4,5},{4,5}", _newick_topology),
    Check("segment lambdas (-1.6,-1.2,0,1.2,1.6)", _segment_lambdas),
    Check("segment bend points with rescaling", _segment_bends),
    Check("rescaling to diameter 2", _rescale),
    Check("bend point topologies along the segment", _segment_topologies),
    Check("relabeling by (2,3,1,4) maps the second tree to the first", _relabel),
    Check("relabeling by (4,3,2,1) commutes with the segment to the origin", _equivariance),
    Check("tropical distance 3.2", _distance),
    Check("compatibility set has exactly five members", _members),
    Check("necessary condition rejects {1,2,3},{2,3},{4,5}", _excluded_by_filter),
    Check("necessary condition holds but membership fails (5 leaves)", _gap),
    Check("necessary condition holds but membership fails (12 leaves)", _cycle),
    Check("binary topology counts 3, 15, 105", _counts),
)


def run_checks() -> list[tuple[str, bool, str]]:
    out = []
    for check in CHECKS:
        try:
            out.append((check.name, bool(check.run()), ""))
        except Exception as exc:  # report, keep going
            out.append((check.name, False, f"{type(exc).__name__}: {exc}"))
    return out
