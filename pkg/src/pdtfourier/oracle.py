"""Brute-force ground truth kept independent of the fast paths.

Nothing here calls the butterfly transform, the streaming level-1 sums, or
the reduced-basis readoff it is used to check.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np

from .boolfn import BooleanFunction, FourierSpectrum
from .pdt import Leaf, Node, ParityDecisionTree, leaf_assignment
from .rng import SplitMix64

BRUTE_MAX_N = 12
SOLVER_MAX_N = 4


def _parity_bits(x: np.ndarray) -> np.ndarray:
    out = np.zeros(x.shape, dtype=np.int64)
    x = x.copy()
    while np.any(x):
        out ^= x & 1
        x >>= 1
    return out


@lru_cache(maxsize=None)
def _character_matrix(n: int) -> np.ndarray:
    """``H[S, x] = chi_S(x) = (-1)^{|S & x|}`` built entry by entry from popcounts."""
    pts = np.arange(1 << n, dtype=np.int64)
    par = _parity_bits(pts[:, None] & pts[None, :])
    h = 1 - 2 * par
    h.setflags(write=False)
    return h


def brute_force_spectrum(f: BooleanFunction) -> FourierSpectrum:
    """Direct sums ``c(S) = sum_x f(x) chi_S(x)``."""
    if f.n > BRUTE_MAX_N:
        raise ValueError(f"brute-force spectrum limited to n <= {BRUTE_MAX_N}")
    values = np.array([f(x) for x in range(f.size)], dtype=np.int64)
    return FourierSpectrum(f.n, _character_matrix(f.n) @ values)


def brute_linear(f: BooleanFunction) -> list[int]:
    """``2^n f^(i)`` by pointwise evaluation."""
    out = [0] * f.n
    for x in range(f.size):
        v = f(x)
        for i in range(f.n):
            out[i] += -v if (x >> i) & 1 else v
    return out


def enumerate_functions(n: int) -> Iterator[BooleanFunction]:
    """Every function on ``n <= 4`` inputs, ordered by table code."""
    if not 1 <= n <= 4:
        raise ValueError("enumeration limited to 1 <= n <= 4")
    for code in range(1 << (1 << n)):
        yield BooleanFunction.from_table_code(n, code)


def random_function(n: int, rng: SplitMix64) -> BooleanFunction:
    size = 1 << n
    words = [rng.next() for _ in range((size + 63) // 64)]
    code = 0
    for k, w in enumerate(words):
        code |= w << (64 * k)
    return BooleanFunction.from_table_code(n, code & ((1 << size) - 1))


def _random_subtree(n: int, depth: int, rng: SplitMix64):
    # pre-order: mask, then the + subtree, then the - subtree
    if depth == 0:
        return Leaf(1 if rng.below(2) == 0 else -1)
    mask = 1 + rng.below((1 << n) - 1)
    pos = _random_subtree(n, depth - 1, rng)
    neg = _random_subtree(n, depth - 1, rng)
    return Node(mask, pos, neg)


def random_pdt(n: int, depth: int, seed: int) -> ParityDecisionTree:
    """Complete tree of exactly ``depth`` levels; masks uniform over nonempty subsets."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    return ParityDecisionTree(n, _random_subtree(n, depth, SplitMix64(seed)))


def all_trees(n: int, max_depth: int) -> list[ParityDecisionTree]:
    """Every tree on ``n`` inputs of depth at most ``max_depth`` (all masks and labels)."""
    level = [Leaf(1), Leaf(-1)]
    masks = range(1, 1 << n)
    for _ in range(max_depth):
        level = [Leaf(1), Leaf(-1)] + [Node(m, a, b) for m in masks for a in level for b in level]
    return [ParityDecisionTree(n, r) for r in level]


# ------------------------------------------------------------ exact solver

def _restrict(code: int, k: int, mask: int, c: int) -> int:
    """Table of g on {x : <mask, x> = c}, reparametrised by the k-1 coordinates other than
    the lowest coordinate of ``mask`` (which is solved for)."""
    p = (mask & -mask).bit_length() - 1
    rest = mask ^ (1 << p)
    low = (1 << p) - 1
    out = 0
    for y in range(1 << (k - 1)):
        x = (y & low) | ((y >> p) << (p + 1))
        xp = c ^ (bin(rest & x).count("1") & 1)
        x |= xp << p
        if (code >> x) & 1:
            out |= 1 << y
    return out


class _Solver:
    def __init__(self, plain: bool):
        self.plain = plain
        self.memo: dict[tuple[int, int], tuple[int, Optional[int]]] = {}

    def masks(self, k: int):
        if self.plain:
            return [1 << i for i in range(k)]
        return range(1, 1 << k)

    def depth(self, k: int, code: int) -> int:
        key = (k, code)
        hit = self.memo.get(key)
        if hit is not None:
            return hit[0]
        if code == 0 or code == (1 << (1 << k)) - 1:
            self.memo[key] = (0, None)
            return 0
        best, best_mask = None, None
        for mask in self.masks(k):
            d = 1 + max(self.depth(k - 1, _restrict(code, k, mask, 0)),
                        self.depth(k - 1, _restrict(code, k, mask, 1)))
            if best is None or d < best:
                best, best_mask = d, mask
                if best == 1:
                    break
        self.memo[key] = (best, best_mask)
        return best

    def tree(self, k: int, code: int, coords: list[int]):
        d, mask = self.memo[(k, code)]
        if mask is None:
            return Leaf(-1 if code & 1 else 1)
        p = (mask & -mask).bit_length() - 1
        orig = 0
        for i in range(k):
            if (mask >> i) & 1:
                orig |= 1 << coords[i]
        sub = coords[:p] + coords[p + 1:]
        kids = []
        for c in (0, 1):
            child = _restrict(code, k, mask, c)
            self.depth(k - 1, child)
            kids.append(self.tree(k - 1, child, sub))
        return Node(orig, kids[0], kids[1])


def _solve(f: BooleanFunction, plain: bool):
    if f.n > SOLVER_MAX_N:
        raise ValueError(f"exact solver limited to n <= {SOLVER_MAX_N}")
    solver = _Solver(plain)
    code = f.table_code()
    d = solver.depth(f.n, code)
    return d, ParityDecisionTree(f.n, solver.tree(f.n, code, list(range(f.n))))


def min_pdt_depth(f: BooleanFunction) -> tuple[int, ParityDecisionTree]:
    """Minimum parity decision tree depth and one optimal tree (first optimal mask in order)."""
    return _solve(f, plain=False)


def min_dt_depth(f: BooleanFunction) -> tuple[int, ParityDecisionTree]:
    """Same recursion restricted to single-coordinate queries."""
    return _solve(f, plain=True)


# ------------------------------------------------ definitional entropies

def _cond_entropy(joint: np.ndarray) -> float:
    """H(A | B) in bits from a joint table ``joint[a, b]`` of probabilities."""
    pb = joint.sum(axis=0)
    total = 0.0
    for a in range(joint.shape[0]):
        for b in range(joint.shape[1]):
            pab = joint[a, b]
            if pab > 0:
                total += pab * math.log2(pb[b] / pab)
    return total


def _coordinate_joint(n: int, groups: np.ndarray, n_groups: int) -> np.ndarray:
    """Joint law of (X_I, group(X)) for X uniform and I uniform on [n]."""
    pts = np.arange(1 << n, dtype=np.int64)
    joint = np.zeros((2, n_groups))
    for i in range(n):
        bit = (pts >> i) & 1
        np.add.at(joint, (bit, groups), 1.0)
    return joint / (n * (1 << n))


def conditional_entropy_given_f(f: BooleanFunction) -> float:
    """H(X_I | f(X)) straight from the joint distribution."""
    return _cond_entropy(_coordinate_joint(f.n, f.bits().astype(np.int64), 2))


def conditional_entropy_given_leaf(t: ParityDecisionTree) -> float:
    where, leaves = leaf_assignment(t)
    return _cond_entropy(_coordinate_joint(t.n, where, len(leaves)))


def leaf_mean_vectors(t: ParityDecisionTree) -> dict[int, tuple]:
    """Average of x over the points reaching each leaf (by left-to-right leaf index)."""
    where, _ = leaf_assignment(t)
    pts = np.arange(1 << t.n, dtype=np.int64)
    out = {}
    for leaf in np.unique(where):
        sel = pts[where == leaf]
        out[int(leaf)] = tuple(
            Fraction(int((1 - 2 * ((sel >> i) & 1)).sum()), sel.size)
            for i in range(t.n)
        )
    return out
