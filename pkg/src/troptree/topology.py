"""Tree topologies as nested families of clades.

A topology on ``[N] = {1..N}`` is a set of clades ``S`` with
``2 <= |S| <= N-1``, any two of which are nested or disjoint.  Pairs of leaves
are compared through their closure: the smallest clade containing them, or
``[N]`` when there is none.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Iterator

from .linkage import single_linkage
from .torus import DEFAULT_TOL, PairVector, pair_index, pairs
from .treemetrics import EquidistantTree, _check_nested, is_ultrametric, vector_to_tree

MAX_ENUMERATION_LEAVES = 8

Pair = tuple[int, int]


class Relation(enum.Enum):
    EQUAL = "="
    LESS = "<"
    GREATER = ">"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class Topology:
    leaf_count: int
    clades: frozenset[frozenset[int]]

    def __post_init__(self):
        N = int(self.leaf_count)
        clades = frozenset(frozenset(int(x) for x in S) for S in self.clades)
        if N < 2:
            raise ValueError("a topology needs at least two leaves")
        _check_nested(list(clades), N)
        if len(clades) > max(N - 2, 0):
            raise ValueError(f"{len(clades)} clades exceed the bound N-2 = {N - 2}")
        object.__setattr__(self, "leaf_count", N)
        object.__setattr__(self, "clades", clades)

    @classmethod
    def of(cls, leaf_count: int, *clades: Iterable[int]) -> "Topology":
        return cls(leaf_count, frozenset(frozenset(S) for S in clades))

    @property
    def full_set(self) -> frozenset[int]:
        return frozenset(range(1, self.leaf_count + 1))

    def key(self) -> tuple[tuple[int, ...], ...]:
        """Canonical encoding: sorted tuple of sorted clades."""
        return tuple(sorted(tuple(sorted(S)) for S in self.clades))

    def __len__(self) -> int:
        return len(self.clades)

    def __lt__(self, other: "Topology") -> bool:
        return (self.leaf_count, self.key()) < (other.leaf_count, other.key())

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(map(str, S)) + "}" for S in self.key()) + "}"

    @cached_property
    def nodes(self) -> tuple[frozenset[int], ...]:
        """Clades plus the full leaf set, smallest first."""
        return tuple(sorted(self.clades, key=len)) + (self.full_set,)

    @cached_property
    def parent(self) -> dict[frozenset[int], frozenset[int]]:
        """Smallest strict superset in the clades (or ``[N]``) of every clade."""
        nodes = self.nodes
        out = {}
        for k, S in enumerate(nodes[:-1]):
            out[S] = next(P for P in nodes[k + 1:] if S < P)
        return out

    @cached_property
    def children(self) -> dict[frozenset[int], list[frozenset[int]]]:
        """Child vertices of each clade/root: maximal subclades and uncovered leaves."""
        out: dict[frozenset[int], list[frozenset[int]]] = {S: [] for S in self.nodes}
        for S, P in self.parent.items():
            out[P].append(S)
        for S, kids in out.items():
            covered = set().union(*kids) if kids else set()
            kids.extend(frozenset([i]) for i in sorted(S - covered))
            kids.sort(key=min)
        return out

    @cached_property
    def closures(self) -> tuple[frozenset[int], ...]:
        """Closure of every pair, in coordinate order."""
        out = []
        for p in pairs(self.leaf_count):
            best = self.full_set
            for S in self.clades:
                if p[0] in S and p[1] in S and len(S) < len(best):
                    best = S
            out.append(best)
        return tuple(out)

    def classes(self) -> dict[frozenset[int], list[Pair]]:
        """Equivalence classes of pairs, keyed by their common closure."""
        out: dict[frozenset[int], list[Pair]] = {S: [] for S in self.nodes}
        for p, c in zip(pairs(self.leaf_count), self.closures):
            out[c].append(p)
        return out

    def to_json(self) -> dict:
        return {"leaf_count": self.leaf_count, "clades": [list(S) for S in self.key()]}

    @classmethod
    def from_json(cls, data: dict) -> "Topology":
        try:
            return cls(data["leaf_count"], frozenset(frozenset(S) for S in data["clades"]))
        except (KeyError, TypeError):
            raise ValueError("topology JSON needs 'leaf_count' and 'clades'") from None


def _pair_pos(F: Topology, p) -> int:
    i, j = p
    return pair_index(i, j, F.leaf_count)


def closure(F: Topology, p) -> frozenset[int]:
    return F.closures[_pair_pos(F, p)]


def compare(F: Topology, p, q) -> Relation:
    a, b = closure(F, p), closure(F, q)
    if a == b:
        return Relation.EQUAL
    if a < b:
        return Relation.LESS
    if b < a:
        return Relation.GREATER
    return Relation.INCOMPARABLE


def is_full_dimensional(F: Topology) -> bool:
    return len(F.clades) == F.leaf_count - 2


def is_bifurcated(F: Topology) -> bool:
    """Every clade of size >= 3 and the full set split in exactly one of two ways:
    (a) a subclade one leaf smaller, or (b) two subclades whose union is the set."""
    for S in F.nodes:
        if len(S) < 3:
            continue
        inside = [C for C in F.clades if C < S]
        a = any(len(C) == len(S) - 1 for C in inside)
        b = any(C1 | C2 == S for C1, C2 in combinations(inside, 2))
        if a == b:
            return False
    return True


def pairwise_condition(F: Topology) -> bool:
    """For every triple, two of its pairs share a closure and the third is strictly below."""
    N = F.leaf_count
    cl = F.closures
    for i, j, k in combinations(range(1, N + 1), 3):
        c = sorted(
            (cl[pair_index(i, j, N)], cl[pair_index(i, k, N)], cl[pair_index(j, k, N)]),
            key=len,
        )
        if not (c[1] == c[2] and c[0] < c[1]):
            return False
    return True


def is_binary(t: EquidistantTree) -> bool:
    """Every internal vertex, root included, has exactly two children."""
    F = Topology(t.leaf_count, t.clades)
    return all(len(kids) == 2 for kids in F.children.values())


def ut_membership(F: Topology, w: PairVector, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``w`` lies in the open cone of ultrametrics with topology ``F``.

    Pairs with a common closure must agree within ``tol``; a pair whose closure
    sits strictly inside another's must be smaller by more than ``tol``.
    Checking each clade against its parent covers every strict relation.
    """
    if w.leaf_count != F.leaf_count:
        raise ValueError("leaf count mismatch")
    report = is_ultrametric(w, tol)
    if not report:
        raise ValueError(f"vector is not an ultrametric ({report})")
    lo: dict[frozenset[int], float] = {}
    hi: dict[frozenset[int], float] = {}
    for x, c in zip(w.coords.tolist(), F.closures):
        lo[c] = min(lo.get(c, x), x)
        hi[c] = max(hi.get(c, x), x)
    if any(hi[c] - lo[c] > tol for c in lo):
        return False
    return all(hi[S] < lo[P] - tol for S, P in F.parent.items())


def topology_of(w: PairVector, tol: float = DEFAULT_TOL) -> Topology:
    """Clades of an ultrametric, read off by single-linkage merging.

    Each time the coordinate sweep passes a level, the leaf blocks joined at
    that level become clades; values within ``tol`` count as one level.
    """
    report = is_ultrametric(w, tol)
    if not report:
        raise ValueError(f"vector is not an ultrametric ({report})")
    N = w.leaf_count
    clades = {S for _, S in single_linkage(w, tol).clusters if 2 <= len(S) < N}
    return Topology(N, frozenset(clades))


def _set_partitions(items: tuple[int, ...]) -> Iterator[list[tuple[int, ...]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [(first,)] + part
        for k in range(len(part)):
            yield part[:k] + [(first,) + part[k]] + part[k + 1:]


@lru_cache(maxsize=None)
def _binary_clades(S: tuple[int, ...]) -> tuple[frozenset[frozenset[int]], ...]:
    # Rooted binary shapes on S; S itself is not included.
    if len(S) <= 2:
        return (frozenset(),)
    head, tail = S[0], S[1:]
    out = []
    for r in range(0, len(tail)):
        for extra in combinations(tail, r):
            A = (head,) + extra
            B = tuple(x for x in tail if x not in extra)
            own = {frozenset(X) for X in (A, B) if len(X) >= 2}
            for fa in _binary_clades(A):
                for fb in _binary_clades(B):
                    out.append(fa | fb | own)
    return tuple(out)


@lru_cache(maxsize=None)
def _all_clades(S: tuple[int, ...]) -> tuple[frozenset[frozenset[int]], ...]:
    # All nested families strictly inside S (multifurcations allowed).
    if len(S) <= 2:
        return (frozenset(),)
    out = []
    for blocks in _set_partitions(S):
        if len(blocks) < 2:
            continue
        families = [frozenset()]
        for B in blocks:
            if len(B) == 1:
                continue
            B = tuple(sorted(B))
            families = [f | g | {frozenset(B)} for f in families for g in _all_clades(B)]
        out.extend(families)
    return tuple(out)


def enumerate_topologies(N: int, full_dim_only: bool = True) -> list[Topology]:
    """All topologies on ``[N]`` (only the binary ones when ``full_dim_only``).

    Binary shapes are built by splitting each set in two, so the count is
    ``(2N-3)!!``.  Output is sorted by canonical encoding.
    """
    if not 3 <= N <= MAX_ENUMERATION_LEAVES:
        raise ValueError(f"enumeration supports 3 <= N <= {MAX_ENUMERATION_LEAVES}, got {N}")
    S = tuple(range(1, N + 1))
    families = _binary_clades(S) if full_dim_only else _all_clades(S)
    return sorted(Topology(N, f) for f in families)


def double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def _node_id(S: frozenset[int], N: int) -> str:
    if len(S) == N:
        return "root"
    if len(S) == 1:
        return f"leaf{next(iter(S))}"
    return "c_" + "_".join(map(str, sorted(S)))


def _dot_body(F: Topology, t: EquidistantTree | None = None, prefix: str = "") -> list[str]:
    N = F.leaf_count
    labels = t.leaf_labels if t is not None else tuple(str(i) for i in range(1, N + 1))
    lines = [f'  {prefix}leaf{i} [shape=plaintext, label="{labels[i - 1]}"];' for i in range(1, N + 1)]
    for S, kids in F.children.items():
        for C in kids:
            attr = ""
            if t is not None:
                length = t.external_edges[min(C) - 1] if len(C) == 1 else t.internal_edges.get(C, 0.0)
                attr = f' [label="{length:g}"]'
            lines.append(f"  {prefix}{_node_id(S, N)} -> {prefix}{_node_id(C, N)}{attr};")
    return lines


def topology_to_dot(
    F: Topology, w: PairVector | None = None, tol: float = DEFAULT_TOL, name: str = "topology"
) -> str:
    """Graphviz DOT drawing of ``F``; with a member vector ``w`` edges carry lengths."""
    t = None
    if w is not None:
        if not ut_membership(F, w, tol):
            raise ValueError("vector does not have this topology")
        t = vector_to_tree(w, tol=tol)
    return "\n".join([f"digraph {name} {{", "  node [shape=point];", *_dot_body(F, t), "}"])
