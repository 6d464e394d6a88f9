"""Single-linkage merging over a pair-indexed vector.

Used for the subdominant ultrametric (fast ultrametric acceptance) and for
reading clades off an ultrametric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .torus import PairVector, _index_matrix


@dataclass(frozen=True)
class Linkage:
    subdominant: np.ndarray
    # (level, members) for every cluster of size >= 2 formed while sweeping the
    # levels upward; the last entry is the full leaf set.
    clusters: tuple[tuple[float, frozenset[int]], ...]


def single_linkage(w: PairVector, tol: float = 0.0) -> Linkage:
    """Sweep the coordinates in increasing order, merging leaves.

    Coordinates within ``tol`` of their predecessor in sorted order belong to
    the same level.  A cluster is reported once per level at which it was
    (re)formed.
    """
    N = w.leaf_count
    coords = w.coords
    order = np.argsort(coords, kind="stable")
    rows, cols = np.triu_indices(N, k=1)
    idx = _index_matrix(N)

    parent = list(range(N))
    members = {i: [i] for i in range(N)}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    sub = np.empty_like(coords)
    clusters: list[tuple[float, frozenset[int]]] = []
    touched: set[int] = set()
    level = None
    prev = None
    for k in order:
        v = float(coords[k])
        if prev is not None and v - prev > tol:
            for r in {find(t) for t in touched}:
                clusters.append((level, frozenset(m + 1 for m in members[r])))
            touched.clear()
        prev = v
        level = v
        a, b = find(int(rows[k])), find(int(cols[k]))
        if a == b:
            continue
        A, B = members[a], members[b]
        sub[idx[np.ix_(A, B)]] = v
        if len(A) < len(B):
            a, b, A, B = b, a, B, A
        parent[b] = a
        A.extend(B)
        del members[b]
        touched.discard(b)
        touched.add(a)
    for r in {find(t) for t in touched}:
        clusters.append((level, frozenset(m + 1 for m in members[r])))
    return Linkage(sub, tuple(clusters))
