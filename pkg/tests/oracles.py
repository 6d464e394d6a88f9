"""Independent reference implementations used only by the tests."""

from __future__ import annotations

from itertools import combinations, product

import numpy as np

from troptree.topology import Topology, topology_of
from troptree.torus import PairVector


def three_point_ok(w: PairVector, tol: float = 1e-9) -> bool:
    """Definition-level ultrametric check over every triple."""
    N = w.leaf_count
    for i, j, k in combinations(range(1, N + 1), 3):
        vals = sorted([w[i, j], w[i, k], w[j, k]])
        if vals[2] - vals[1] > tol:
            return False
    return True


def four_point_ok(w: PairVector, tol: float = 1e-9) -> bool:
    N = w.leaf_count
    for i, j, k, l in combinations(range(1, N + 1), 4):
        s = sorted([w[i, j] + w[k, l], w[i, k] + w[j, l], w[i, l] + w[j, k]])
        if s[2] - s[1] > tol:
            return False
    return True


def closure_by_definition(F: Topology, i: int, j: int) -> frozenset[int]:
    containing = [S for S in F.clades if i in S and j in S]
    return min(containing, key=len) if containing else F.full_set


def min_spread_on_segment(w1: PairVector, w2: PairVector) -> float:
    """Smallest ``max y - min y`` over the segment, by brute force.

    Every coordinate is either ``λ + w1_p`` or ``w2_q``.  Rising terms are
    parallel, as are flat ones, so the spread can only kink where a rising
    term meets a flat one: at some ``λ = w2_q - w1_p``.  Evaluating all of
    those in range plus the endpoints is exact.
    """
    a, b = w1.coords, w2.coords
    d = b - a
    lo, hi = d.min(), d.max()
    cands = np.concatenate([(b[:, None] - a[None, :]).ravel(), [lo, hi]])
    cands = cands[(cands >= lo) & (cands <= hi)]
    ys = np.maximum(cands[:, None] + a[None, :], b[None, :])
    return float((ys.max(axis=1) - ys.min(axis=1)).min())


def random_member(F: Topology, rng: np.random.Generator, top: float = 2.0) -> PairVector:
    """A generic point of ut(F): random strictly decreasing values down the hierarchy."""
    value = {F.full_set: top}
    for S in reversed(F.nodes[:-1]):  # largest first, parents before children
        value[S] = value[F.parent[S]] - rng.uniform(0.05, 1.0)
    return PairVector([value[c] for c in F.closures], F.leaf_count)


def cone_grid(F: Topology, top: int) -> np.ndarray:
    """Every integer assignment in ``0..top`` that is strictly increasing toward the root.

    Returns an ``(m, n)`` array of coordinate vectors.
    """
    nodes = list(F.nodes)
    pos = {S: k for k, S in enumerate(nodes)}
    rows = []
    for vals in product(range(top + 1), repeat=len(nodes)):
        if all(vals[pos[S]] < vals[pos[P]] for S, P in F.parent.items()):
            rows.append([vals[pos[c]] for c in F.closures])
    return np.array(rows, dtype=float)


def triple_codes(W: np.ndarray, N: int) -> np.ndarray:
    """Rooted-triple signature of each row of an ultrametric batch.

    Per triple the code is 0/1/2 for the pair holding the strict minimum and
    3 for a three-way tie.  For ultrametrics the signature determines the
    topology.
    """
    index = {p: k for k, p in enumerate(combinations(range(N), 2))}
    code = np.zeros(W.shape[0], dtype=np.int64)
    for i, j, k in combinations(range(N), 3):
        x, y, z = W[:, index[(i, j)]], W[:, index[(i, k)]], W[:, index[(j, k)]]
        c = np.full(W.shape[0], 3)
        c[(x < y) & (x < z)] = 0
        c[(y < x) & (y < z)] = 1
        c[(z < x) & (z < y)] = 2
        code = code * 4 + c
    return code


def observed_topologies(W: np.ndarray, N: int) -> set[Topology]:
    _, first = np.unique(triple_codes(W, N), return_index=True)
    return {topology_of(PairVector(W[k], N)) for k in first}
