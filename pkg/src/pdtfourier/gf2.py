"""Linear algebra over GF(2) on int-packed rows.

Row ``r`` is an int whose bit ``i`` is the entry in column ``i`` (0-indexed).
Coordinate ``i`` of the 1-indexed external notation lives in bit ``i - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

Basis = tuple  # tuple of (pivot_bit, row, rhs) triples, fully reduced


@dataclass(frozen=True)
class BitMatrix:
    cols: int
    rows: tuple[int, ...] = ()

    def __post_init__(self):
        if self.cols < 0:
            raise ValueError("cols must be non-negative")
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        limit = 1 << self.cols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError(f"row {r:#b} does not fit in {self.cols} columns")

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> "BitMatrix":
        """Build from strings like ``"110"``; character ``k`` is column ``k``."""
        if not rows:
            raise ValueError("need at least one row to infer the width")
        cols = len(rows[0])
        return cls(cols, tuple(bits_to_int(s) for s in rows))

    @classmethod
    def from_index_sets(cls, cols: int, rows: Iterable[Iterable[int]]) -> "BitMatrix":
        """Build from 1-based index lists, one per row."""
        return cls(cols, tuple(mask_from_indices(r, cols) for r in rows))

    @property
    def n_rows(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class AffineSystem:
    """Constraints ``<rows[k], x> = rhs[k]`` over GF(2)."""

    matrix: BitMatrix
    rhs: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rhs", tuple(int(b) & 1 for b in self.rhs))
        if len(self.rhs) != self.matrix.n_rows:
            raise ValueError("matrix.rows and rhs differ in length")

    @property
    def n(self) -> int:
        return self.matrix.cols


@dataclass(frozen=True)
class SystemSummary:
    consistent: bool
    rank: int
    # 0-indexed coordinate -> forced bit
    forced: dict = field(default_factory=dict)
    # frozenset of sorted 0-indexed pairs (i, j), i < j
    correlated_pairs: frozenset = frozenset()


def bits_to_int(s: str) -> int:
    out = 0
    for k, ch in enumerate(s):
        if ch == "1":
            out |= 1 << k
        elif ch != "0":
            raise ValueError(f"bad bit character {ch!r}")
    return out


def mask_from_indices(indices: Iterable[int], n: int) -> int:
    mask = 0
    for i in indices:
        if not 1 <= i <= n:
            raise ValueError(f"index {i} outside [1, {n}]")
        mask |= 1 << (i - 1)
    return mask


def indices_from_mask(mask: int) -> list[int]:
    """1-based sorted indices of the set bits."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i + 1)
        mask >>= 1
        i += 1
    return out


def parity(v: int) -> int:
    return bin(v).count("1") & 1


def insert_row(basis: Basis, row: int, rhs: int = 0):
    """Add one equation to a fully reduced basis.

    Returns ``(new_basis, status)`` where status is ``1`` if the rank grew,
    ``0`` if the row was redundant and consistent, ``-1`` if it reduced to
    ``0 = 1``.  The pivot of each row is its lowest set bit.
    """
    for p, r, b in basis:
        if row & p:
            row ^= r
            rhs ^= b
    if row == 0:
        return basis, (-1 if rhs else 0)
    pivot = row & -row
    new = tuple((p, r ^ row, b ^ rhs) if r & pivot else (p, r, b) for p, r, b in basis)
    return new + ((pivot, row, rhs),), 1


def reduce_rows(rows: Iterable[int], rhs: Iterable[int] | None = None):
    """Fully reduced echelon basis of the given equations plus a consistency flag."""
    basis: Basis = ()
    consistent = True
    rhs_iter = iter(rhs) if rhs is not None else None
    for row in rows:
        b = next(rhs_iter) if rhs_iter is not None else 0
        basis, status = insert_row(basis, row, b)
        if status < 0:
            consistent = False
    return basis, consistent


def rank(m: BitMatrix) -> int:
    basis, _ = reduce_rows(m.rows)
    return len(basis)


def in_row_space(m: BitMatrix, v: int | str) -> bool:
    if isinstance(v, str):
        if len(v) != m.cols:
            raise ValueError(f"vector has length {len(v)}, matrix has {m.cols} columns")
        v = bits_to_int(v)
    elif v < 0 or v >= (1 << m.cols):
        raise ValueError(f"vector {v:#b} does not fit in {m.cols} columns")
    basis, _ = reduce_rows(m.rows)
    for p, r, _b in basis:
        if v & p:
            v ^= r
    return v == 0


def read_basis(basis: Basis):
    """Forced coordinates and correlated pairs of a fully reduced basis.

    In reduced form, ``e_i`` lies in the row space iff some basis row equals
    ``e_i``; ``e_i + e_j`` lies in it iff one row equals it, or two pivot rows
    share the same non-pivot tail.
    """
    forced = {}
    pairs = set()
    by_tail: dict[int, list[int]] = {}
    for p, r, b in basis:
        tail = r ^ p
        pi = p.bit_length() - 1
        if tail == 0:
            forced[pi] = b
            continue
        if tail & (tail - 1) == 0:
            pairs.add((pi, tail.bit_length() - 1) if pi < tail.bit_length() - 1
                      else (tail.bit_length() - 1, pi))
        by_tail.setdefault(tail, []).append(pi)
    for group in by_tail.values():
        if len(group) > 1:
            group.sort()
            for a in range(len(group)):
                for c in range(a + 1, len(group)):
                    pairs.add((group[a], group[c]))
    return forced, frozenset(pairs)


def summarize_basis(basis: Basis, consistent: bool) -> SystemSummary:
    if not consistent:
        return SystemSummary(False, len(basis), {}, frozenset())
    forced, pairs = read_basis(basis)
    return SystemSummary(True, len(basis), forced, pairs)


def analyze_system(system: AffineSystem) -> SystemSummary:
    basis, consistent = reduce_rows(system.matrix.rows, system.rhs)
    return summarize_basis(basis, consistent)


def correlation_classes(pairs: Iterable[tuple[int, int]]) -> list[list[int]]:
    """Connected components of the correlated-pair graph, each sorted, ordered by minimum."""
    parent: dict[int, int] = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in pairs:
        parent.setdefault(i, i)
        parent.setdefault(j, j)
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for a in parent:
        groups.setdefault(find(a), []).append(a)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])
