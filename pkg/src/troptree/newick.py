"""Newick reading and writing for equidistant trees.

Branch lengths are mandatory on every edge below the root.  Leaves are
numbered by sorting their labels (numbers numerically, then text), so a tree
and any reordering of its children map to the same vector.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .treemetrics import EquidistantTree

EQUIDISTANCE_RTOL = 1e-6

_UNQUOTED_STOP = set("()[]':;, \t\r\n")


class NewickError(ValueError):
    """Malformed or unsupported Newick input.  ``offset`` is a byte offset."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)


@dataclass
class _Node:
    label: str = ""
    length: float | None = None
    children: list["_Node"] = field(default_factory=list)
    pos: int = 0


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def error(self, message: str, pos: int | None = None):
        pos = self.i if pos is None else pos
        raise NewickError(message, len(self.text[:pos].encode("utf-8")))

    def skip(self):
        t = self.text
        while self.i < len(t):
            c = t[self.i]
            if c.isspace():
                self.i += 1
            elif c == "[":
                end = t.find("]", self.i)
                if end < 0:
                    self.error("unterminated comment")
                self.i = end + 1
            else:
                break

    def peek(self) -> str:
        self.skip()
        return self.text[self.i] if self.i < len(self.text) else ""

    def parse(self) -> _Node:
        node = self.subtree()
        if self.peek() != ";":
            self.error("expected ';'")
        self.i += 1
        if self.peek():
            self.error("unexpected text after ';'")
        return node

    def subtree(self) -> _Node:
        node = _Node(pos=self.i)
        if self.peek() == "(":
            self.i += 1
            node.children.append(self.subtree())
            while self.peek() == ",":
                self.i += 1
                node.children.append(self.subtree())
            if self.peek() != ")":
                self.error("expected ',' or ')'")
            self.i += 1
        node.label = self.label()
        if self.peek() == ":":
            self.i += 1
            node.length = self.number()
        return node

    def label(self) -> str:
        c = self.peek()
        t = self.text
        if c == "'":
            out = []
            self.i += 1
            while True:
                if self.i >= len(t):
                    self.error("unterminated quoted label")
                if t[self.i] == "'":
                    if t[self.i + 1:self.i + 2] == "'":
                        out.append("'")
                        self.i += 2
                        continue
                    self.i += 1
                    return "".join(out)
                out.append(t[self.i])
                self.i += 1
        start = self.i
        while self.i < len(t) and t[self.i] not in _UNQUOTED_STOP:
            self.i += 1
        return t[start:self.i]

    def number(self) -> float:
        self.skip()
        m = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?").match(self.text, self.i)
        if not m:
            self.error("expected a branch length")
        self.i = m.end()
        value = float(m.group(0))
        if value < 0:
            self.error("negative branch length", m.start())
        return value


def _label_key(label: str):
    return (0, int(label), "") if label.isdigit() else (1, 0, label)


def parse_newick(text: str, rtol: float = EQUIDISTANCE_RTOL) -> EquidistantTree:
    """Parse one Newick tree into an :class:`EquidistantTree`.

    Rejects non-equidistant trees (root-to-leaf sums must agree to ``rtol``),
    internal vertices with a single child, and duplicate leaf labels.
    Zero-length internal edges are contracted.
    """
    parser = _Parser(text)
    root = parser.parse()
    if len(root.children) < 2:
        parser.error("root must have at least two children", root.pos)

    leaves: list[tuple[str, float, list[_Node]]] = []  # label, depth, ancestors

    def walk(node: _Node, depth: float, ancestors: list[_Node]):
        if not node.children:
            if not node.label:
                parser.error("unlabeled leaf", node.pos)
            leaves.append((node.label, depth, ancestors))
            return
        if len(node.children) == 1:
            parser.error("internal vertex of degree 2", node.pos)
        for child in node.children:
            if child.length is None:
                parser.error("missing branch length", child.pos)
            below = ancestors + [child] if child.children else ancestors
            walk(child, depth + child.length, below)

    walk(root, 0.0, [])
    labels = [lab for lab, _, _ in leaves]
    seen = set()
    for lab in labels:
        if lab in seen:
            raise NewickError(f"duplicate leaf label {lab!r}")
        seen.add(lab)

    depths = [d for _, d, _ in leaves]
    h = max(depths)
    if not h > 0:
        raise NewickError("tree has zero height")
    for lab, d, _ in leaves:
        if abs(d - h) > rtol * h:
            raise NewickError(f"tree is not equidistant: leaf {lab!r} at depth {d}, expected {h}")

    ordered = sorted(labels, key=_label_key)
    number = {lab: k for k, lab in enumerate(ordered, start=1)}
    members: dict[int, set[int]] = {}
    lengths: dict[int, float] = {}
    for lab, _, ancestors in leaves:
        for node in ancestors:
            members.setdefault(id(node), set()).add(number[lab])
            lengths[id(node)] = node.length
    edges = {frozenset(members[k]): lengths[k] for k in members if lengths[k] > 0}
    # Snap pendant edges so every leaf sits exactly at height h.
    ext = [max(0.0, h - sum(v for S, v in edges.items() if i in S)) for i in range(1, len(ordered) + 1)]
    return EquidistantTree(tuple(ordered), edges, tuple(ext), h)


def _quote(label: str) -> str:
    if label and not any(c in _UNQUOTED_STOP for c in label):
        return label
    return "'" + label.replace("'", "''") + "'"


def write_newick(t: EquidistantTree, precision: int = 6) -> str:
    """Newick text with children ordered by their smallest leaf number."""
    N = t.leaf_count
    clades = sorted(t.internal_edges, key=len)
    fmt = f"{{:.{precision}f}}"

    def node_text(S: frozenset[int]) -> str:
        inner = [C for C in clades if C < S]
        maximal = [C for C in inner if not any(C < D for D in inner)]
        covered = set().union(*maximal) if maximal else set()
        parts = sorted(
            [(min(C), C) for C in maximal] + [(i, frozenset([i])) for i in S - covered],
            key=lambda x: x[0],
        )
        items = []
        for _, C in parts:
            if len(C) == 1:
                i = next(iter(C))
                items.append(f"{_quote(t.leaf_labels[i - 1])}:{fmt.format(t.external_edges[i - 1])}")
            else:
                items.append(f"{node_text(C)}:{fmt.format(t.internal_edges[C])}")
        return "(" + ",".join(items) + ")"

    return node_text(frozenset(range(1, N + 1))) + ";"
