"""Which topologies can the tropical sum of two ultrametrics have?

``C(F1, F2)`` is the set of topologies ``F`` for which some ``w1`` with
topology ``F1`` and ``w2`` with topology ``F2`` have ``w1 ⊞ w2`` of topology
``F``.  Inside a cone every coordinate is determined by its pair's class, so
membership is a question about orderings of finitely many class values:

* each topology forces ``value(S) < value(parent(S))``;
* for every pair, ``b = max(a1, a2)`` where ``a1``, ``a2``, ``b`` are the class
  values of the pair in ``F1``, ``F2``, ``F``.

The second constraint is ``a1 <= b``, ``a2 <= b`` and one of ``b <= a1`` or
``b <= a2``.  With the choice fixed, everything is a system of ``<=`` and ``<``
between variables, feasible exactly when no cycle of the constraint digraph
carries a strict edge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .topology import Topology, enumerate_topologies, is_full_dimensional, ut_membership
from .torus import DEFAULT_TOL, PairVector, trop_sum

MAX_DECISION_LEAVES = 8
MAX_SET_LEAVES = 6


@dataclass(frozen=True)
class CompatReport:
    candidate: Topology
    passes_necessary: bool | None  # None: the filter does not apply to this candidate
    witness: tuple[PairVector, PairVector] | None
    decided: bool
    member: bool | None

    def to_json(self) -> dict:
        return {
            "candidate": self.candidate.to_json(),
            "passes_necessary": self.passes_necessary,
            "decided": self.decided,
            "member": self.member,
            "witness": None
            if self.witness is None
            else {"w1": self.witness[0].to_json(), "w2": self.witness[1].to_json()},
        }


def _same_leaves(*topologies: Topology) -> int:
    counts = {F.leaf_count for F in topologies}
    if len(counts) != 1:
        raise ValueError(f"topologies on different leaf counts: {sorted(counts)}")
    return counts.pop()


def necessary_condition(F1: Topology, F2: Topology, F: Topology) -> bool:
    """Every class of ``F`` lies inside one class of ``F1`` or one class of ``F2``."""
    _same_leaves(F1, F2, F)
    if not is_full_dimensional(F):
        raise ValueError(f"candidate {F} is not full dimensional")
    groups: dict[frozenset[int], set[tuple[frozenset[int], frozenset[int]]]] = {}
    for c, c1, c2 in zip(F.closures, F1.closures, F2.closures):
        groups.setdefault(c, set()).add((c1, c2))
    return all(
        len({c1 for c1, _ in g}) == 1 or len({c2 for _, c2 in g}) == 1 for g in groups.values()
    )


class _Constraints:
    """Class-value variables of three topologies and the order constraints among them."""

    def __init__(self, F1: Topology, F2: Topology, F: Topology):
        self.tops = (F1, F2, F)
        self.index: dict[tuple[int, frozenset[int]], int] = {}
        for t, G in enumerate(self.tops):
            for S in G.nodes:
                self.index[(t, S)] = len(self.index)
        V = len(self.index)
        self.weak = np.zeros((V, V), dtype=bool)
        self.strict = np.zeros((V, V), dtype=bool)
        for t, G in enumerate(self.tops):
            for S, P in G.parent.items():
                self.strict[self.index[(t, S)], self.index[(t, P)]] = True
        triples = dict.fromkeys(zip(F1.closures, F2.closures, F.closures))
        # (a1, a2, b) variable indices per distinct class triple
        self.triples = [
            (self.index[(0, c1)], self.index[(1, c2)], self.index[(2, c)]) for c1, c2, c in triples
        ]
        for x, y, b in self.triples:
            self.weak[x, b] = self.weak[y, b] = True

    def closure(self, extra: list[tuple[int, int]]):
        """Reachability and strict reachability with the given extra ``<=`` edges."""
        weak = self.weak.copy()
        for u, v in extra:
            weak[u, v] = True
        V = weak.shape[0]
        reach = weak | self.strict | np.eye(V, dtype=bool)
        while True:
            nxt = (reach.astype(np.uint8) @ reach.astype(np.uint8)) > 0
            if np.array_equal(nxt, reach):
                break
            reach = nxt
        r = reach.astype(np.uint8)
        strict_reach = (r @ self.strict.astype(np.uint8) @ r) > 0
        return reach, strict_reach

    def choice_edge(self, t: int, c: int) -> tuple[int, int]:
        x, y, b = self.triples[t]
        return (b, x) if c == 0 else (b, y)

    def solve(self) -> list[int] | None:
        """Pick ``b <= a1`` (0) or ``b <= a2`` (1) per triple so no strict cycle appears."""
        return self._search({})

    def _search(self, assign: dict[int, int]) -> list[int] | None:
        assign = dict(assign)
        while True:
            extra = [self.choice_edge(t, c) for t, c in assign.items()]
            _, sr = self.closure(extra)
            if sr.diagonal().any():
                return None
            forced = False
            for t in range(len(self.triples)):
                if t in assign:
                    continue
                x, y, b = self.triples[t]
                # b <= a is impossible when a < b is already implied.
                ok = [not sr[x, b], not sr[y, b]]
                if not any(ok):
                    return None
                if ok[0] != ok[1]:
                    assign[t] = 0 if ok[0] else 1
                    forced = True
            if not forced:
                break
        free = [t for t in range(len(self.triples)) if t not in assign]
        if not free:
            return [assign[t] for t in range(len(self.triples))]
        t = free[0]
        for c in (0, 1):
            found = self._search({**assign, t: c})
            if found is not None:
                return found
        return None

    def witness(self, choices: list[int]) -> tuple[PairVector, PairVector]:
        """Integer class values by longest-path leveling (strict edges count 1)."""
        extra = [self.choice_edge(t, c) for t, c in enumerate(choices)]
        weak = self.weak.copy()
        for u, v in extra:
            weak[u, v] = True
        edges = [(u, v, 1) for u, v in zip(*np.nonzero(self.strict))]
        edges += [(u, v, 0) for u, v in zip(*np.nonzero(weak))]
        V = weak.shape[0]
        level = np.zeros(V, dtype=int)
        for _ in range(V + 1):
            changed = False
            for u, v, gap in edges:
                if level[v] < level[u] + gap:
                    level[v] = level[u] + gap
                    changed = True
            if not changed:
                break
        else:
            raise RuntimeError("constraint system has a strict cycle")
        F1, F2, _ = self.tops
        N = F1.leaf_count
        w1 = [float(level[self.index[(0, c)]]) for c in F1.closures]
        w2 = [float(level[self.index[(1, c)]]) for c in F2.closures]
        return PairVector(w1, N), PairVector(w2, N)


def decide_membership(
    F1: Topology,
    F2: Topology,
    F: Topology,
    max_leaves: int = MAX_DECISION_LEAVES,
    tol: float = DEFAULT_TOL,
) -> CompatReport:
    """Exact decision of whether ``F`` belongs to ``C(F1, F2)``, with a witness if so."""
    N = _same_leaves(F1, F2, F)
    if N > max_leaves:
        raise ValueError(f"exact decision is limited to {max_leaves} leaves, got {N}")
    passes = necessary_condition(F1, F2, F) if is_full_dimensional(F) else None
    system = _Constraints(F1, F2, F)
    choices = system.solve()
    if choices is None:
        return CompatReport(F, passes, None, True, False)
    w1, w2 = system.witness(choices)
    if not (
        ut_membership(F1, w1, tol)
        and ut_membership(F2, w2, tol)
        and ut_membership(F, trop_sum(w1, w2), tol)
    ):
        raise RuntimeError(f"witness for {F} failed verification")
    return CompatReport(F, passes, (w1, w2), True, True)


def compatibility_set(
    F1: Topology,
    F2: Topology,
    full_dim_only: bool = True,
    max_leaves: int = MAX_SET_LEAVES,
    tol: float = DEFAULT_TOL,
) -> list[CompatReport]:
    """Reports for every candidate topology, in canonical order.

    Full-dimensional candidates failing :func:`necessary_condition` are
    rejected without search when ``F1`` and ``F2`` are full dimensional.
    """
    N = _same_leaves(F1, F2)
    if N > max_leaves:
        raise ValueError(f"compatibility set enumeration is limited to {max_leaves} leaves, got {N}")
    filter_ok = is_full_dimensional(F1) and is_full_dimensional(F2)
    reports = []
    for F in enumerate_topologies(N, full_dim_only):
        if filter_ok and is_full_dimensional(F) and not necessary_condition(F1, F2, F):
            reports.append(CompatReport(F, False, None, True, False))
        else:
            reports.append(decide_membership(F1, F2, F, max_leaves=max_leaves, tol=tol))
    return reports


def members(reports: list[CompatReport]) -> list[Topology]:
    return [r.candidate for r in reports if r.member]
