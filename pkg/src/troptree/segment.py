"""Tropical line segments between ultrametrics.

The segment from ``w1`` to ``w2`` is the set of points
``y(λ) = (λ ⊙ w1) ⊞ w2`` for ``λ`` between the smallest and largest entry of
``w2 - w1``.  Those entries are the bend points' parameters; between two
consecutive ones every coordinate of ``y`` is affine in ``λ``, so the whole
segment is encoded by one sort of the difference vector.
"""

from __future__ import annotations

import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .topology import Topology, _dot_body, topology_of
from .torus import (
    DEFAULT_TOL,
    LeafPermutation,
    PairVector,
    _check_same,
    apply_permutation,
    torus_eq,
)
from .treemetrics import is_ultrametric, vector_to_tree


class TopologyChangeWarning(UserWarning):
    """The topology was not constant on an open piece of a segment."""


def rescale_to_height(w: PairVector, target_diameter: float = 2.0) -> PairVector:
    """Shift ``w`` so its largest coordinate equals ``target_diameter``."""
    return w.with_coords(w.coords - (w.coords.max() - target_diameter))


def _dedup(values: np.ndarray, tol: float) -> np.ndarray:
    # values sorted ascending; keep the first of every run closer than tol.
    if values.size == 0:
        return values
    keep = np.empty(values.size, dtype=bool)
    keep[0] = True
    keep[1:] = np.diff(values) > tol
    return values[keep]


class BendPoints(Sequence):
    """Lazy view of a segment's bend points; each is built on access."""

    def __init__(self, seg: "TropicalSegment"):
        self._seg = seg

    def __len__(self) -> int:
        return len(self._seg.lambdas)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(len(self)))]
        return self._seg.point_at(float(self._seg.lambdas[k]))

    def __repr__(self) -> str:
        return f"BendPoints({len(self)})"


@dataclass(frozen=True, eq=False)
class TropicalSegment:
    source: PairVector
    target: PairVector
    lambdas: np.ndarray
    normalize: bool = False
    target_diameter: float = 2.0
    tol: float = field(default=DEFAULT_TOL, repr=False)

    @property
    def leaf_count(self) -> int:
        return self.source.leaf_count

    @property
    def bend_points(self) -> BendPoints:
        return BendPoints(self)

    def point_at(self, lam: float) -> PairVector:
        """``(λ ⊙ source) ⊞ target``, rescaled when the segment normalizes."""
        lo, hi = float(self.lambdas[0]), float(self.lambdas[-1])
        if not lo - self.tol <= lam <= hi + self.tol:
            raise ValueError(f"lambda {lam} outside [{lo}, {hi}]")
        y = self.target.with_coords(np.maximum(lam + self.source.coords, self.target.coords))
        return rescale_to_height(y, self.target_diameter) if self.normalize else y

    @cached_property
    def _sorted(self):
        d = self.target.coords - self.source.coords
        order = np.argsort(d, kind="stable")
        return d[order], self.source.coords[order], self.target.coords[order]

    def to_json(self, with_topologies: bool = True) -> dict:
        out = {
            "leaf_count": self.leaf_count,
            "from": self.source.to_json(),
            "to": self.target.to_json(),
            "normalize": self.normalize,
            "lambdas": self.lambdas.tolist(),
            "bend_points": [y.coords.tolist() for y in self.bend_points],
        }
        if with_topologies:
            out["topologies"] = [
                {"interval": list(piece.interval), "topology": piece.topology.to_json()}
                for piece in segment_topologies(self, self.tol)
            ]
        return out


def tropical_segment(
    w1: PairVector,
    w2: PairVector,
    strict: bool = True,
    normalize: bool = False,
    target_diameter: float = 2.0,
    tol: float = DEFAULT_TOL,
) -> TropicalSegment:
    """Segment from ``w1`` (at the largest λ) to ``w2`` (at the smallest λ).

    With ``strict`` both endpoints must be ultrametrics; otherwise any two
    points of the torus are accepted.
    """
    _check_same(w1, w2)
    if strict:
        for name, w in (("from", w1), ("to", w2)):
            report = is_ultrametric(w, tol)
            if not report:
                raise ValueError(f"'{name}' endpoint is not an ultrametric ({report})")
    lambdas = _dedup(np.sort(w2.coords - w1.coords), tol)
    lambdas.setflags(write=False)
    return TropicalSegment(w1, w2, lambdas, normalize, target_diameter, tol)


class Piece(NamedTuple):
    # A bend point has interval (λ, λ); an open piece has lo < hi.
    interval: tuple[float, float]
    topology: Topology


def segment_topologies(seg: TropicalSegment, tol: float = DEFAULT_TOL) -> list[Piece]:
    """Topologies along the segment, alternating bend points and open pieces.

    Each open piece is read at its midpoint and checked at its quarter points;
    a disagreement raises :class:`TopologyChangeWarning`.
    """
    lams = seg.lambdas.tolist()
    out = []
    for k, lam in enumerate(lams):
        out.append(Piece((lam, lam), topology_of(seg.point_at(lam), tol)))
        if k + 1 == len(lams):
            break
        lo, hi = lam, lams[k + 1]
        samples = [topology_of(seg.point_at(lo + f * (hi - lo)), tol) for f in (0.5, 0.25, 0.75)]
        if any(F != samples[0] for F in samples[1:]):
            warnings.warn(
                f"topology not constant on ({lo}, {hi}): {', '.join(map(str, samples))}",
                TopologyChangeWarning,
                stacklevel=2,
            )
        out.append(Piece((lo, hi), samples[0]))
    return out


def contains_origin(seg: TropicalSegment, tol: float = DEFAULT_TOL) -> bool:
    """Whether some point of the segment is within ``tol`` of the star class.

    On a piece where the coordinates in ``A`` follow ``λ + w1`` and the rest
    stay at ``w2``, the spread ``max y - min y`` is convex in ``λ``; its minimum
    sits at a piece end or where one of the two extreme terms switches.
    """
    d, a, b = seg._sorted
    amax, amin = np.maximum.accumulate(a), np.minimum.accumulate(a)
    bmax = np.concatenate([np.maximum.accumulate(b[::-1])[::-1], [-np.inf]])
    bmin = np.concatenate([np.minimum.accumulate(b[::-1])[::-1], [np.inf]])
    lams = seg.lambdas
    # Coordinates with d <= λ_k + tol have switched to λ + w1 at λ_k.
    cuts = np.searchsorted(d, lams + seg.tol, side="right")
    best = np.inf
    for k, lam in enumerate(lams.tolist()):
        c = int(cuts[k])
        Amax, Amin = amax[c - 1], amin[c - 1]
        Bmax, Bmin = bmax[c], bmin[c]
        hi = float(lams[k + 1]) if k + 1 < len(lams) else lam
        cands = [lam, hi]
        for x in (Bmax - Amax, Bmin - Amin):
            if np.isfinite(x) and lam < x < hi:
                cands.append(float(x))
        for x in cands:
            spread = max(x + Amax, Bmax) - min(x + Amin, Bmin)
            best = min(best, spread)
    return bool(best <= tol)


def check_equivariance(
    wT: PairVector, wT0: PairVector, sigma: LeafPermutation, tol: float = DEFAULT_TOL
) -> bool:
    """Relabeling commutes with the segment: ``Σ(Γ(u, v), σ) = Γ(Σ(u, σ), Σ(v, σ))``.

    Compared bend point by bend point, after checking the λ sequences agree.
    """
    _check_same(wT, wT0)
    seg = tropical_segment(wT, wT0, strict=False, tol=tol)
    moved = tropical_segment(
        apply_permutation(wT, sigma), apply_permutation(wT0, sigma), strict=False, tol=tol
    )
    if len(seg.lambdas) != len(moved.lambdas):
        return False
    if np.max(np.abs(seg.lambdas - moved.lambdas)) > tol:
        return False
    return all(
        torus_eq(apply_permutation(y, sigma), y2, tol)
        for y, y2 in zip(seg.bend_points, moved.bend_points)
    )


def segment_to_dot(seg: TropicalSegment, tol: float = DEFAULT_TOL) -> str:
    """One cluster per bend point, each drawing that point's tree with edge lengths."""
    lines = ["digraph segment {", "  node [shape=point];"]
    for k, (lam, y) in enumerate(zip(seg.lambdas.tolist(), seg.bend_points), start=1):
        t = vector_to_tree(y, tol=tol)
        F = Topology(t.leaf_count, t.clades)
        lines.append(f"  subgraph cluster_y{k} {{")
        lines.append(f'    label="y{k} (lambda={lam:g})";')
        lines.extend("  " + s for s in _dot_body(F, t, prefix=f"y{k}_"))
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines)


def point_at(seg: TropicalSegment, lam: float) -> PairVector:
    return seg.point_at(lam)
