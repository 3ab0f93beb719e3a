"""Parity decision trees and exact leaf analysis.

Internal nodes hold a subset mask (bit ``i - 1`` for coordinate ``i``); the
``pos`` child is taken when ``chi_S(x) = +1``, i.e. when the GF(2) parity of
the masked input bits is 0.  Leaves are addressed by their ``+``/``-`` edge
path from the root.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Union

import numpy as np

from . import gf2
from .boolfn import BooleanFunction
from .gf2 import AffineSystem, BitMatrix, SystemSummary


class PDTParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


@dataclass(frozen=True, slots=True)
class Leaf:
    label: int


@dataclass(frozen=True, slots=True)
class Node:
    mask: int
    pos: "Tree"
    neg: "Tree"


Tree = Union[Leaf, Node]


@dataclass(frozen=True)
class ParityDecisionTree:
    n: int
    root: Tree

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("arity must be at least 1")
        limit = 1 << self.n
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                if node.label not in (1, -1):
                    raise ValueError(f"leaf label must be +1 or -1, got {node.label}")
            elif isinstance(node, Node):
                if node.mask <= 0 or node.mask >= limit:
                    raise ValueError(f"mask {node.mask:#b} is empty or outside [1, {self.n}]")
                stack.append(node.pos)
                stack.append(node.neg)
            else:
                raise TypeError(f"not a tree node: {node!r}")

    def __str__(self):
        return serialize(self)


@dataclass(frozen=True)
class LeafSummary:
    leaf_id: str
    label: int
    system: AffineSystem
    summary: SystemSummary
    mass: Fraction
    vector: tuple[int, ...]
    path_length: int

    @property
    def vector_sum(self) -> int:
        return sum(self.vector)


@dataclass(frozen=True)
class CorrelationCheck:
    ok: bool
    leaf_id: Optional[str] = None
    # 1-based pair
    pair: Optional[tuple[int, int]] = None

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class ComputeCheck:
    ok: bool
    witness: Optional[int] = None

    def __bool__(self):
        return self.ok


# ------------------------------------------------------------------ text io

_TOKEN = re.compile(r"\s*(?:(\()|(\))|(Q)|(,)|(\+)|(-)|(\d+))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise PDTParseError(f"unexpected character {text[bad]!r}", bad)
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), start))
        pos = m.end()
    return tokens


def parse_tree(text: str, n: int, offset: int = 0) -> ParityDecisionTree:
    tokens = _tokenize(text)
    k = 0

    def peek():
        if k >= len(tokens):
            raise PDTParseError("unexpected end of input", offset + len(text))
        return tokens[k]

    def expect(value):
        nonlocal k
        tok, at = peek()
        if tok != value:
            raise PDTParseError(f"expected {value!r}, found {tok!r}", offset + at)
        k += 1

    def tree():
        nonlocal k
        tok, at = peek()
        if tok in ("+", "-"):
            k += 1
            return Leaf(1 if tok == "+" else -1)
        if tok != "(":
            raise PDTParseError(f"expected leaf or '(', found {tok!r}", offset + at)
        k += 1
        expect("Q")
        mask = 0
        while True:
            tok, at = peek()
            if not tok.isdigit():
                raise PDTParseError(f"expected a coordinate index, found {tok!r}", offset + at)
            i = int(tok)
            if not 1 <= i <= n:
                raise PDTParseError(f"index {i} outside [1, {n}]", offset + at)
            mask |= 1 << (i - 1)
            k += 1
            if peek()[0] != ",":
                break
            k += 1
        pos = tree()
        neg = tree()
        expect(")")
        return Node(mask, pos, neg)

    if not tokens:
        raise PDTParseError("empty tree", offset)
    root = tree()
    if k != len(tokens):
        raise PDTParseError(f"trailing input {tokens[k][0]!r}", offset + tokens[k][1])
    return ParityDecisionTree(n, root)


def parse(text: str) -> ParityDecisionTree:
    """Parse ``n=<int>`` followed by a tree expression."""
    m = re.match(r"\s*n\s*=\s*(\d+)\s*", text)
    if not m:
        raise PDTParseError("missing 'n=<int>' header", 0)
    n = int(m.group(1))
    if n < 1:
        raise PDTParseError("arity must be at least 1", m.start(1))
    return parse_tree(text[m.end():], n, offset=m.end())


def _node_text(node: Tree) -> str:
    if isinstance(node, Leaf):
        return "+" if node.label > 0 else "-"
    idx = ",".join(str(i) for i in gf2.indices_from_mask(node.mask))
    return f"(Q {idx} {_node_text(node.pos)} {_node_text(node.neg)})"


def serialize_tree(t: ParityDecisionTree) -> str:
    return _node_text(t.root)


def serialize(t: ParityDecisionTree) -> str:
    return f"n={t.n}\n{_node_text(t.root)}\n"


# --------------------------------------------------------------- evaluation


def eval_tree(t: ParityDecisionTree, x: int) -> tuple[int, str]:
    if not 0 <= x < (1 << t.n):
        raise ValueError(f"point code {x} outside [0, {1 << t.n})")
    node = t.root
    path = []
    while isinstance(node, Node):
        if gf2.parity(node.mask & x):
            path.append("-")
            node = node.neg
        else:
            path.append("+")
            node = node.pos
    return node.label, "".join(path)


def leaf_assignment(t: ParityDecisionTree) -> tuple[np.ndarray, list[Leaf]]:
    """Index (into the returned left-to-right leaf list) of the leaf each point reaches."""
    points = np.arange(1 << t.n, dtype=np.int64)
    where = np.zeros(points.size, dtype=np.int64)
    leaves: list[Leaf] = []
    stack = [(t.root, points)]
    while stack:
        node, pts = stack.pop()
        if isinstance(node, Leaf):
            where[pts] = len(leaves)
            leaves.append(node)
            continue
        masked = pts & node.mask
        odd = np.zeros(pts.size, dtype=bool)
        while np.any(masked):
            odd ^= (masked & 1).astype(bool)
            masked >>= 1
        stack.append((node.neg, pts[odd]))
        stack.append((node.pos, pts[~odd]))
    return where, leaves


def induced_bits(t: ParityDecisionTree) -> np.ndarray:
    """0/1 output array over all point codes (1 means -1)."""
    where, leaves = leaf_assignment(t)
    labels = np.array([1 if leaf.label < 0 else 0 for leaf in leaves], dtype=np.uint8)
    return labels[where]


def induced_function(t: ParityDecisionTree) -> BooleanFunction:
    return BooleanFunction.from_bits(induced_bits(t))


def computes(t: ParityDecisionTree, f: BooleanFunction) -> ComputeCheck:
    if t.n != f.n:
        raise ValueError(f"tree arity {t.n} differs from function arity {f.n}")
    diff = np.flatnonzero(induced_bits(t) != f.bits())
    if diff.size:
        return ComputeCheck(False, int(diff[0]))
    return ComputeCheck(True)


# ------------------------------------------------------------ leaf analysis


def _walk(t: ParityDecisionTree) -> Iterator[tuple]:
    """Yield ``(path, label, basis, consistent, queries)`` per leaf, left to right."""
    stack = [(t.root, "", (), True, ())]
    out = []
    while stack:
        node, path, basis, ok, queries = stack.pop()
        if isinstance(node, Leaf):
            out.append((path, node.label, basis, ok, queries))
            continue
        for bit, child, sym in ((1, node.neg, "-"), (0, node.pos, "+")):
            if ok:
                nb, status = gf2.insert_row(basis, node.mask, bit)
                nok = status >= 0
            else:
                nb, nok = basis, False
            stack.append((child, path + sym, nb, nok, queries + ((node.mask, bit),)))
    return iter(out)


def _leaf_vector(n: int, forced: dict) -> tuple[int, ...]:
    vec = [0] * n
    for i, b in forced.items():
        vec[i] = -1 if b else 1
    return tuple(vec)


def leaf_summaries(t: ParityDecisionTree) -> list[LeafSummary]:
    out = []
    for path, label, basis, ok, queries in _walk(t):
        system = AffineSystem(BitMatrix(t.n, tuple(q for q, _ in queries)),
                              tuple(b for _, b in queries))
        summary = gf2.summarize_basis(basis, ok)
        mass = Fraction(1, 1 << len(basis)) if ok else Fraction(0)
        out.append(LeafSummary(path, label, system, summary, mass,
                               _leaf_vector(t.n, summary.forced), len(queries)))
    return out


@dataclass(frozen=True)
class TreeStats:
    depth: int
    average_depth: Fraction
    second_moment: Fraction
    first_abs_moment: Fraction
    max_fixed: int
    correlation_free: bool
    plain: bool


def tree_stats(t: ParityDecisionTree) -> TreeStats:
    """All moment statistics from one pass; masses are accumulated over ``2^n``."""
    n = t.n
    depth = 0
    avg = sq = ab = 0
    max_fixed = 0
    cf = True
    plain = True
    stack = [(t.root, (), True, 0)]
    while stack:
        node, basis, ok, length = stack.pop()
        if isinstance(node, Node):
            if node.mask & (node.mask - 1):
                plain = False
            for bit, child in ((0, node.pos), (1, node.neg)):
                if ok:
                    nb, status = gf2.insert_row(basis, node.mask, bit)
                    stack.append((child, nb, status >= 0, length + 1))
                else:
                    stack.append((child, basis, False, length + 1))
            continue
        depth = max(depth, length)
        if not ok:
            continue
        w = 1 << (n - len(basis))
        forced, pairs = gf2.read_basis(basis)
        if pairs:
            cf = False
        s = sum(-1 if b else 1 for b in forced.values())
        avg += w * length
        sq += w * s * s
        ab += w * abs(s)
        max_fixed = max(max_fixed, len(forced))
    scale = 1 << n
    return TreeStats(depth, Fraction(avg, scale), Fraction(sq, scale), Fraction(ab, scale),
                     max_fixed, cf, plain)


def depth(t: ParityDecisionTree) -> int:
    best = 0
    stack = [(t.root, 0)]
    while stack:
        node, d = stack.pop()
        if isinstance(node, Node):
            stack.append((node.pos, d + 1))
            stack.append((node.neg, d + 1))
        else:
            best = max(best, d)
    return best


def average_depth(t: ParityDecisionTree) -> Fraction:
    return sum((s.mass * s.path_length for s in leaf_summaries(t)), Fraction(0))


def second_moment(t: ParityDecisionTree) -> Fraction:
    """Mass-weighted mean of ``(sum_i l_i)^2`` over the leaves."""
    return sum((s.mass * s.vector_sum ** 2 for s in leaf_summaries(t)), Fraction(0))


def first_abs_moment(t: ParityDecisionTree) -> Fraction:
    return sum((s.mass * abs(s.vector_sum) for s in leaf_summaries(t)), Fraction(0))


def is_correlation_free(t: ParityDecisionTree) -> CorrelationCheck:
    """Leaf-level check: no consistent leaf fixes ``x_i xor x_j`` without fixing both."""
    for s in leaf_summaries(t):
        if s.summary.consistent and s.summary.correlated_pairs:
            i, j = min(s.summary.correlated_pairs)
            return CorrelationCheck(False, s.leaf_id, (i + 1, j + 1))
    return CorrelationCheck(True)


def is_plain(t: ParityDecisionTree) -> bool:
    stack = [t.root]
    while stack:
        node = stack.pop()
        if isinstance(node, Node):
            if node.mask & (node.mask - 1):
                return False
            stack.extend((node.pos, node.neg))
    return True


# --------------------------------------------------------------- refinement


def _refine_leaf(label: int, basis, n: int) -> Tree:
    _, pairs = gf2.read_basis(basis)
    if not pairs:
        return Leaf(label)
    reps = [cls[0] for cls in gf2.correlation_classes(pairs)]
    return _query_chain(label, basis, reps, n)


def _query_chain(label: int, basis, reps: list[int], n: int) -> Tree:
    if not reps:
        return _refine_leaf(label, basis, n)
    mask = 1 << reps[0]
    probe, status = gf2.insert_row(basis, mask, 0)
    if status != 1:
        # earlier queries in this round already fixed it through a longer relation
        return _query_chain(label, basis, reps[1:], n)
    kids = [_query_chain(label, probe, reps[1:], n),
            _query_chain(label, gf2.insert_row(basis, mask, 1)[0], reps[1:], n)]
    return Node(mask, kids[0], kids[1])


def refine_correlation_free(t: ParityDecisionTree) -> ParityDecisionTree:
    """Extend every leaf until no correlated pair remains.

    Each round queries the smallest member of every correlation class at the
    leaf (skipping members fixed meanwhile), then re-analyses, since a new unit
    query can expose fresh pairs.
    Dead (inconsistent) leaves are left alone.
    """
    def rebuild(node: Tree, basis, ok: bool) -> Tree:
        if isinstance(node, Leaf):
            return _refine_leaf(node.label, basis, t.n) if ok else node
        kids = []
        for bit, child in ((0, node.pos), (1, node.neg)):
            if ok:
                nb, status = gf2.insert_row(basis, node.mask, bit)
                kids.append(rebuild(child, nb, status >= 0))
            else:
                kids.append(rebuild(child, basis, False))
        return Node(node.mask, kids[0], kids[1])

    return ParityDecisionTree(t.n, rebuild(t.root, (), True))


def split_leaf(t: ParityDecisionTree, leaf_id: str, mask: int) -> ParityDecisionTree:
    """Replace the leaf at ``leaf_id`` by a query on ``mask`` with two copies of its label."""
    if mask <= 0 or mask >= (1 << t.n):
        raise ValueError(f"mask {mask:#b} is empty or outside [1, {t.n}]")

    def go(node: Tree, rest: str) -> Tree:
        if not rest:
            if not isinstance(node, Leaf):
                raise KeyError(f"path {leaf_id!r} ends at an internal node")
            return Node(mask, Leaf(node.label), Leaf(node.label))
        if isinstance(node, Leaf):
            raise KeyError(f"no leaf at path {leaf_id!r}")
        if rest[0] == "+":
            return Node(node.mask, go(node.pos, rest[1:]), node.neg)
        if rest[0] == "-":
            return Node(node.mask, node.pos, go(node.neg, rest[1:]))
        raise KeyError(f"bad path symbol {rest[0]!r} in {leaf_id!r}")

    return ParityDecisionTree(t.n, go(t.root, leaf_id))


def leaf_ids(t: ParityDecisionTree) -> list[str]:
    return [path for path, *_ in _walk(t)]


MAJ3_TREE_TEXT = "n=3\n(Q 1,2 (Q 1 + -) (Q 3 + -))\n"


def maj3_tree() -> ParityDecisionTree:
    """Depth-2 tree for MAJ3: query x1x2, then x1 on agreement, x3 otherwise."""
    return parse(MAJ3_TREE_TEXT)
