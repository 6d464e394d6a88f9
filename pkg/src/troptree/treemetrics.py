"""Tree metrics, ultrametrics and equidistant trees.

An :class:`EquidistantTree` is kept in clade form: every internal edge is
named by the set of leaves below it, so the rooted shape and its branch
lengths live in one mapping.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .linkage import single_linkage
from .torus import DEFAULT_TOL, PairVector, _index_matrix


class Kind(enum.Enum):
    TREE_METRIC = "tree metric"
    ULTRAMETRIC = "ultrametric"
    NEITHER = "neither"


@dataclass(frozen=True)
class ValidationReport:
    kind: Kind
    witness: tuple[int, ...] | None = None

    @property
    def ok(self) -> bool:
        return self.kind is not Kind.NEITHER

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "witness": list(self.witness) if self.witness else None}

    def __str__(self) -> str:
        if self.witness is None:
            return self.kind.value
        return f"{self.kind.value}, witness {self.witness}"


def _top_two_close(values: np.ndarray, tol: float) -> np.ndarray:
    # values: (..., k); True where the maximum is attained at least twice within tol.
    s = np.sort(values, axis=-1)
    return s[..., -1] - s[..., -2] <= tol


def is_tree_metric(w: PairVector, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Four-point condition on every quadruple ``i < j < k < l``."""
    N = w.leaf_count
    M = w.to_matrix()
    for i, j in combinations(range(N), 2):
        rest = np.arange(j + 1, N)
        if rest.size < 2:
            continue
        k, l = np.triu_indices(rest.size, k=1)
        k, l = rest[k], rest[l]
        sums = np.stack([M[i, j] + M[k, l], M[i, k] + M[j, l], M[i, l] + M[j, k]], axis=-1)
        bad = np.flatnonzero(~_top_two_close(sums, tol))
        if bad.size:
            b = bad[0]
            return ValidationReport(Kind.NEITHER, (i + 1, j + 1, int(k[b]) + 1, int(l[b]) + 1))
    return ValidationReport(Kind.TREE_METRIC)


def _first_bad_triple(w: PairVector, tol: float) -> tuple[int, int, int] | None:
    N = w.leaf_count
    M = w.to_matrix()
    for i in range(N - 2):
        rest = np.arange(i + 1, N)
        j, k = np.triu_indices(rest.size, k=1)
        j, k = rest[j], rest[k]
        vals = np.stack([M[i, j], M[i, k], M[j, k]], axis=-1)
        bad = np.flatnonzero(~_top_two_close(vals, tol))
        if bad.size:
            b = bad[0]
            return (i + 1, int(j[b]) + 1, int(k[b]) + 1)
    return None


def is_ultrametric(w: PairVector, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Three-point condition on every triple ``i < j < k``.

    Vectors within ``tol/2`` of their subdominant ultrametric pass every triple
    test, so those are accepted after one sort; anything else gets the full
    triple scan to produce a witness.
    """
    if w.leaf_count < 3:
        return ValidationReport(Kind.ULTRAMETRIC)
    sub = single_linkage(w).subdominant
    if float(np.max(w.coords - sub)) <= tol / 2:
        return ValidationReport(Kind.ULTRAMETRIC)
    bad = _first_bad_triple(w, tol)
    if bad is None:
        return ValidationReport(Kind.ULTRAMETRIC)
    return ValidationReport(Kind.NEITHER, bad)


def _check_nested(clades, N: int) -> None:
    for S in clades:
        if not 2 <= len(S) <= N - 1:
            raise ValueError(f"clade {sorted(S)} must have between 2 and {N - 1} leaves")
        if not all(isinstance(x, (int, np.integer)) and 1 <= x <= N for x in S):
            raise ValueError(f"clade {sorted(S)} contains leaves outside 1..{N}")
    for S1, S2 in combinations(clades, 2):
        if not (S1 < S2 or S2 < S1 or not (S1 & S2)):
            raise ValueError(f"clades {sorted(S1)} and {sorted(S2)} are not nested")


@dataclass(frozen=True)
class EquidistantTree:
    """Rooted tree whose leaves all sit at distance ``height`` from the root.

    ``internal_edges`` maps each clade (a frozenset of leaf numbers ``1..N``)
    to the length of the edge above it.  ``external_edges[i-1]`` is the pendant
    edge length of leaf ``i``.  The root is implicit.
    """

    leaf_labels: tuple[str, ...]
    internal_edges: Mapping[frozenset[int], float]
    external_edges: tuple[float, ...]
    height: float
    tol: float = field(default=1e-9, repr=False, compare=False)

    def __post_init__(self):
        labels = tuple(str(s) for s in self.leaf_labels)
        N = len(labels)
        if N < 2:
            raise ValueError("a tree needs at least two leaves")
        if len(set(labels)) != N:
            raise ValueError("duplicate leaf labels")
        edges = {frozenset(int(x) for x in S): float(v) for S, v in dict(self.internal_edges).items()}
        _check_nested(list(edges), N)
        if any(not v > 0 for v in edges.values()):
            raise ValueError("internal edge lengths must be positive")
        ext = tuple(float(x) for x in self.external_edges)
        if len(ext) != N:
            raise ValueError(f"expected {N} external edge lengths")
        h = float(self.height)
        if not h > 0:
            raise ValueError("height must be positive")
        slack = self.tol * max(1.0, h)
        if min(ext) < -slack:
            raise ValueError("external edge lengths must be nonnegative")
        for i in range(1, N + 1):
            depth = ext[i - 1] + sum(v for S, v in edges.items() if i in S)
            if abs(depth - h) > slack:
                raise ValueError(f"leaf {labels[i - 1]} is at depth {depth}, not {h}")
        object.__setattr__(self, "leaf_labels", labels)
        object.__setattr__(self, "internal_edges", MappingProxyType(edges))
        object.__setattr__(self, "external_edges", ext)
        object.__setattr__(self, "height", h)

    @classmethod
    def from_clades(
        cls,
        clade_lengths: Mapping,
        height: float,
        leaf_count: int | None = None,
        labels: Sequence[str] | None = None,
    ) -> "EquidistantTree":
        """Build a tree from internal edge lengths; pendant edges fill up to ``height``."""
        edges = {frozenset(S): float(v) for S, v in clade_lengths.items()}
        if labels is not None:
            N = len(labels)
        elif leaf_count is not None:
            N = leaf_count
        else:
            raise ValueError("give leaf_count or labels")
        if labels is None:
            labels = [str(i) for i in range(1, N + 1)]
        ext = [height - sum(v for S, v in edges.items() if i in S) for i in range(1, N + 1)]
        return cls(tuple(labels), edges, tuple(ext), height)

    @property
    def leaf_count(self) -> int:
        return len(self.leaf_labels)

    @property
    def clades(self) -> frozenset[frozenset[int]]:
        return frozenset(self.internal_edges)


def tree_to_vector(t: EquidistantTree) -> PairVector:
    """Cophenetic vector: leaves ``i, j`` are ``2h - 2 * (edges above both)`` apart."""
    N = t.leaf_count
    M = np.full((N, N), 2.0 * t.height)
    for S, length in t.internal_edges.items():
        m = np.array(sorted(S)) - 1
        M[np.ix_(m, m)] -= 2.0 * length
    rows, cols = np.triu_indices(N, k=1)
    return PairVector(M[rows, cols], N, t.leaf_labels)


def vector_to_tree(
    w: PairVector, height: float | None = None, tol: float = DEFAULT_TOL
) -> EquidistantTree:
    """Realize the torus class of an ultrametric as an equidistant tree.

    Without ``height`` the vector itself is realized when its coordinates are
    nonnegative (height ``max(w)/2``); otherwise the class is shifted so the
    closest cherry has zero-length pendant edges.
    """
    report = is_ultrametric(w, tol)
    if not report:
        raise ValueError(f"vector is not an ultrametric ({report})")
    N = w.leaf_count
    coords = w.coords
    top, low = float(coords.max()), float(coords.min())
    h_min = (top - low) / 2
    if height is None:
        h = top / 2 if low >= 0 and top > 0 else h_min
        if h <= 0:
            h = 1.0  # star class at zero: any height realizes it
    else:
        h = float(height)
        if h < h_min - tol * max(1.0, h_min):
            raise ValueError(f"height {h} too small; at least {h_min} is needed")
    shift = 2 * h - top

    M = w.to_matrix() + shift
    np.fill_diagonal(M, -np.inf)
    clades = [S for _, S in single_linkage(w, tol).clusters if len(S) < N]
    clades = list(dict.fromkeys(clades))
    level = {}
    for S in clades:
        m = np.array(sorted(S)) - 1
        level[S] = float(M[np.ix_(m, m)].max())
    edges = {}
    for S in clades:
        parents = [P for P in clades if S < P]
        above = min((level[P] for P in parents), default=2 * h)
        edges[S] = (above - level[S]) / 2
    edges = {S: v for S, v in edges.items() if v > 0}
    ext = []
    for i in range(1, N + 1):
        e = h - sum(v for S, v in edges.items() if i in S)
        ext.append(max(e, 0.0) if e > -tol * max(1.0, h) else e)
    return EquidistantTree(w.leaf_labels(), edges, tuple(ext), h)


def random_coalescent_tree(N: int, seed: int | np.random.Generator = 0) -> EquidistantTree:
    """Kingman coalescent on ``N`` leaves, rescaled to height 1.

    While ``k`` lineages remain, wait an exponential time with rate
    ``k(k-1)/2`` and merge a uniformly chosen pair.
    """
    if N < 2:
        raise ValueError("a coalescent tree needs at least two leaves")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    lineages: list[tuple[frozenset[int], float]] = [(frozenset([i]), 0.0) for i in range(1, N + 1)]
    t = 0.0
    raw: dict[frozenset[int], float] = {}
    pendant = [0.0] * N
    while len(lineages) > 1:
        k = len(lineages)
        t += rng.exponential(2.0 / (k * (k - 1)))
        a, b = sorted(rng.choice(k, size=2, replace=False), reverse=True)
        (A, ta), (B, tb) = lineages.pop(a), lineages.pop(b)
        for S, ts in ((A, ta), (B, tb)):
            if len(S) == 1:
                pendant[next(iter(S)) - 1] = t
            else:
                raw[S] = t - ts
        lineages.append((A | B, t))
    edges = {S: v / t for S, v in raw.items()}
    labels = tuple(str(i) for i in range(1, N + 1))
    return EquidistantTree(labels, edges, tuple(p / t for p in pendant), 1.0)
