"""Max-plus arithmetic on pair-indexed vectors and the tropical projective torus.

A tree on ``N`` leaves is stored as its vector of pairwise leaf distances,
indexed by the pairs ``(1,2), (1,3), ..., (N-1,N)`` in lexicographic order.
Leaves are numbered from 1 throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import isqrt
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_TOL = 1e-9


def pair_count(leaf_count: int) -> int:
    return leaf_count * (leaf_count - 1) // 2


def leaf_count_for(n: int) -> int:
    """Inverse of :func:`pair_count`; raises if ``n`` is not triangular."""
    N = (1 + isqrt(1 + 8 * n)) // 2
    if pair_count(N) != n or N < 2:
        raise ValueError(f"{n} coordinates do not match any leaf count")
    return N


@lru_cache(maxsize=None)
def pairs(leaf_count: int) -> tuple[tuple[int, int], ...]:
    """All pairs ``(i, j)`` with ``1 <= i < j <= N`` in coordinate order."""
    return tuple(combinations(range(1, leaf_count + 1), 2))


def pair_index(i: int, j: int, leaf_count: int) -> int:
    """Position of the unordered pair ``{i, j}`` in a coordinate vector."""
    if i == j or not (1 <= i <= leaf_count and 1 <= j <= leaf_count):
        raise ValueError(f"invalid pair ({i}, {j}) for {leaf_count} leaves")
    if i > j:
        i, j = j, i
    a, b = i - 1, j - 1
    return a * leaf_count - a * (a + 1) // 2 + (b - a - 1)


@lru_cache(maxsize=None)
def _index_matrix(leaf_count: int) -> np.ndarray:
    # Symmetric N x N lookup of coordinate positions; -1 on the diagonal.
    idx = np.full((leaf_count, leaf_count), -1, dtype=np.intp)
    rows, cols = np.triu_indices(leaf_count, k=1)
    idx[rows, cols] = np.arange(rows.size)
    idx[cols, rows] = np.arange(rows.size)
    idx.setflags(write=False)
    return idx


class PairVector:
    """A point of ``R^n`` (or its torus class) indexed by leaf pairs.

    Instances are immutable; the coordinate array is read-only.
    """

    __slots__ = ("leaf_count", "coords", "labels")

    def __init__(
        self,
        coords: Iterable[float],
        leaf_count: int | None = None,
        labels: Sequence[str] | None = None,
    ):
        arr = np.array(coords, dtype=float).ravel()
        N = leaf_count_for(arr.size) if leaf_count is None else int(leaf_count)
        if N < 2 or arr.size != pair_count(N):
            raise ValueError(
                f"expected {pair_count(N)} coordinates for {N} leaves, got {arr.size}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("coordinates must be finite")
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != N or len(set(labels)) != N:
                raise ValueError("labels must be N distinct strings")
        arr.setflags(write=False)
        object.__setattr__(self, "leaf_count", N)
        object.__setattr__(self, "coords", arr)
        object.__setattr__(self, "labels", labels)

    def __setattr__(self, name, value):
        raise AttributeError("PairVector is immutable")

    @classmethod
    def from_matrix(cls, matrix, labels: Sequence[str] | None = None) -> "PairVector":
        m = np.asarray(matrix, dtype=float)
        rows, cols = np.triu_indices(m.shape[0], k=1)
        return cls(m[rows, cols], m.shape[0], labels)

    def to_matrix(self) -> np.ndarray:
        N = self.leaf_count
        m = np.zeros((N, N))
        rows, cols = np.triu_indices(N, k=1)
        m[rows, cols] = self.coords
        m[cols, rows] = self.coords
        return m

    def leaf_labels(self) -> tuple[str, ...]:
        if self.labels is not None:
            return self.labels
        return tuple(str(i) for i in range(1, self.leaf_count + 1))

    def __getitem__(self, pair: tuple[int, int]) -> float:
        i, j = pair
        return float(self.coords[pair_index(i, j, self.leaf_count)])

    def __len__(self) -> int:
        return self.coords.size

    def __iter__(self) -> Iterator[float]:
        return iter(self.coords.tolist())

    def __array__(self, dtype=None, copy=None):
        return self.coords if dtype is None else self.coords.astype(dtype)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PairVector):
            return NotImplemented
        return self.leaf_count == other.leaf_count and np.array_equal(self.coords, other.coords)

    def __hash__(self) -> int:
        return hash((self.leaf_count, self.coords.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"{x:g}" for x in self.coords)
        return f"PairVector(({body}), N={self.leaf_count})"

    def with_coords(self, coords) -> "PairVector":
        return PairVector(coords, self.leaf_count, self.labels)

    def to_json(self) -> dict:
        return {
            "leaf_count": self.leaf_count,
            "labels": list(self.leaf_labels()),
            "coords": self.coords.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "PairVector":
        try:
            coords = data["coords"]
        except (KeyError, TypeError):
            raise ValueError("vector JSON needs a 'coords' list") from None
        return cls(coords, data.get("leaf_count"), data.get("labels"))


def _check_same(u: PairVector, v: PairVector) -> None:
    if u.leaf_count != v.leaf_count:
        raise ValueError(
            f"dimension mismatch: {u.leaf_count} leaves vs {v.leaf_count} leaves"
        )


def trop_scalar(a: float, w: PairVector) -> PairVector:
    """Tropical scalar multiplication ``a ⊙ w``: add ``a`` to every coordinate."""
    return w.with_coords(w.coords + a)


def trop_sum(u: PairVector, v: PairVector) -> PairVector:
    """Coordinatewise tropical sum ``u ⊞ v`` (maximum)."""
    _check_same(u, v)
    return u.with_coords(np.maximum(u.coords, v.coords))


def canonical_rep(w: PairVector) -> PairVector:
    """Torus representative whose first coordinate is zero."""
    return w.with_coords(w.coords - w.coords[0])


def trop_distance(u: PairVector, v: PairVector) -> float:
    """Tropical metric: range of the coordinatewise difference ``u - v``."""
    _check_same(u, v)
    d = u.coords - v.coords
    return float(d.max() - d.min())


def torus_eq(u: PairVector, v: PairVector, tol: float = DEFAULT_TOL) -> bool:
    return trop_distance(u, v) <= tol


def is_origin(w: PairVector, tol: float = DEFAULT_TOL) -> bool:
    """True when ``w`` is in the class of the all-zeros vector (the star tree)."""
    return float(w.coords.max() - w.coords.min()) <= tol


@dataclass(frozen=True)
class LeafPermutation:
    """A bijection of ``{1..N}``; ``mapping[i-1]`` is the image of leaf ``i``.

    Composition follows ``(s ∘ t)(i) = s(t(i))``.
    """

    mapping: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(x) for x in self.mapping)
        if sorted(m) != list(range(1, len(m) + 1)):
            raise ValueError(f"{self.mapping!r} is not a permutation of 1..{len(m)}")
        object.__setattr__(self, "mapping", m)

    @classmethod
    def identity(cls, n: int) -> "LeafPermutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def parse(cls, text: str) -> "LeafPermutation":
        """Parse ``"2,3,1,4"`` or ``"(2 3 1 4)"`` (one-line notation)."""
        cleaned = text.strip().strip("()[]").replace(",", " ")
        return cls(tuple(int(tok) for tok in cleaned.split()))

    def __len__(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i - 1]

    def inverse(self) -> "LeafPermutation":
        inv = [0] * len(self.mapping)
        for i, s in enumerate(self.mapping, start=1):
            inv[s - 1] = i
        return LeafPermutation(tuple(inv))

    def compose(self, other: "LeafPermutation") -> "LeafPermutation":
        """Return ``self ∘ other``."""
        if len(other) != len(self):
            raise ValueError("permutation length mismatch")
        return LeafPermutation(tuple(self.mapping[t - 1] for t in other.mapping))

    def __matmul__(self, other: "LeafPermutation") -> "LeafPermutation":
        return self.compose(other)


def apply_permutation(w: PairVector, sigma: LeafPermutation) -> PairVector:
    """Relabel leaves: the result at pair ``{i, j}`` is ``w`` at ``{sigma(i), sigma(j)}``."""
    N = w.leaf_count
    if len(sigma) != N:
        raise ValueError(f"permutation acts on {len(sigma)} leaves, vector has {N}")
    idx = _index_matrix(N)
    perm = np.asarray(sigma.mapping) - 1
    rows, cols = np.triu_indices(N, k=1)
    return w.with_coords(w.coords[idx[perm[rows], perm[cols]]])
