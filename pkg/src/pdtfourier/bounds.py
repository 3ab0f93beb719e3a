"""Inequality checkers and bound calculators for level-1 Fourier mass vs. PDT depth.

Exact rational sides stay exact.  Whenever a logarithm or square root is
involved, the verdict comes from a float screen: a clear margin passes,
anything else is re-decided at high precision with mpmath, so rounding can
raise a false alarm but never a false pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Union

import mpmath

from . import boolfn, pdt
from .boolfn import BooleanFunction
from .pdt import ParityDecisionTree

Number = Union[Fraction, float]

TOLERANCE = 1e-9
_HIGH_DPS = 60
_HIGH_TOL = mpmath.mpf("1e-40")
LN2 = math.log(2)


class DoesNotCompute(ValueError):
    def __init__(self, witness: int):
        super().__init__(f"tree does not compute the function; first disagreement at point {witness}")
        self.witness = witness


class ConstantFunctionError(ValueError):
    pass


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: Number
    rhs: Number
    slack: float
    holds: bool
    equality: bool = False
    inputs: dict = field(default_factory=dict)

    def line(self) -> str:
        return "\t".join([self.name, fmt(self.lhs), fmt(self.rhs), fmt(self.slack), str(self.holds)])

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": fmt(self.lhs),
            "rhs_bound": fmt(self.rhs),
            "slack": fmt(self.slack),
            "holds": self.holds,
            "equality": self.equality,
            "inputs": {k: fmt(v) if isinstance(v, (Fraction, float)) else v
                       for k, v in self.inputs.items()},
        }


@dataclass(frozen=True)
class EntropyReport:
    mu: Fraction
    h_given_f: float
    h_given_leaf: float
    eq1_bound: float
    eq3_bound: Fraction
    links: tuple

    @property
    def holds(self) -> bool:
        return all(r.holds for r in self.links)

    def as_dict(self) -> dict:
        return {
            "mu": fmt(self.mu),
            "h_given_f": fmt(self.h_given_f),
            "h_given_leaf": fmt(self.h_given_leaf),
            "eq1_bound": fmt(self.eq1_bound),
            "eq3_bound": fmt(self.eq3_bound),
            "holds": self.holds,
            "links": [r.as_dict() for r in self.links],
        }


def fmt(x) -> str:
    """Exact rationals verbatim, everything else to 12 significant digits."""
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    return f"{float(x):.12g}"


# --------------------------------------------------------- binary entropy


def binary_entropy(t: Number) -> float:
    if not 0 <= t <= 1:
        raise ValueError(f"probability {t} outside [0, 1]")
    if t == 0 or t == 1:
        return 0.0
    t = float(t)
    return -t * math.log2(t) - (1 - t) * math.log2(1 - t)


def _h_high(t: Fraction) -> mpmath.mpf:
    if t == 0 or t == 1:
        return mpmath.mpf(0)
    p = mpmath.mpf(t.numerator) / t.denominator
    return -p * mpmath.log(p, 2) - (1 - p) * mpmath.log(1 - p, 2)


def entropy_bounds(t: float) -> tuple[float, float]:
    """Lower and upper bounds ``1 - t^2`` and ``1 - t^2 / (2 ln 2)`` on ``h(1/2 + t/2)``."""
    return 1 - t * t, 1 - t * t / (2 * LN2)


# ---------------------------------------------------------------- verdicts


def _decide(lhs_lo: Callable, rhs_lo: Callable, lhs_hi: Callable, rhs_hi: Callable,
            tol: float = TOLERANCE):
    """Return ``(lhs, rhs, holds)``; float screen first, high precision on doubt."""
    lhs, rhs = lhs_lo(), rhs_lo()
    if lhs <= rhs - tol:
        return lhs, rhs, True
    with mpmath.workdps(_HIGH_DPS):
        a, b = lhs_hi(), rhs_hi()
        return lhs, rhs, bool(a <= b + _HIGH_TOL)


def _mp(q: Fraction) -> mpmath.mpf:
    return mpmath.mpf(q.numerator) / q.denominator


def _digest(f: BooleanFunction, t: ParityDecisionTree, d: int, var: Fraction,
            mu: Fraction) -> dict:
    return {"n": f.n, "function": f.table_code(), "tree": pdt.serialize_tree(t),
            "d": d, "variance": var, "mu": mu}


def _require_computes(f: BooleanFunction, t: ParityDecisionTree) -> None:
    check = pdt.computes(t, f)
    if not check:
        raise DoesNotCompute(check.witness)


def linear_sum(f: BooleanFunction) -> Fraction:
    return sum(boolfn.linear_coefficients(f), Fraction(0))


# ----------------------------------------------------------------- checks


def theorem1_check(f: BooleanFunction, t: ParityDecisionTree) -> InequalityReport:
    """sum_i f^(i) <= sqrt(4 ln2 * variance * depth)."""
    _require_computes(f, t)
    d = pdt.depth(t)
    var = boolfn.variance(f)
    mu = boolfn.positive_fraction(f)
    digest = _digest(f, t, d, var, mu)
    if var == 0:
        return InequalityReport("theorem1", Fraction(0), Fraction(0), 0.0, True, True, digest)
    lhs = linear_sum(f)
    lhs_f, rhs_f, holds = _decide(
        lambda: float(lhs),
        lambda: math.sqrt(4 * LN2 * float(var) * d),
        lambda: _mp(lhs),
        lambda: mpmath.sqrt(4 * mpmath.log(2) * _mp(var) * d),
    )
    return InequalityReport("theorem1", lhs, rhs_f, rhs_f - lhs_f, holds, False, digest)


def theorem4_check(f: BooleanFunction, t: ParityDecisionTree) -> InequalityReport:
    """sum_i f^(i) <= sqrt(2 * depth), decided exactly by squaring."""
    _require_computes(f, t)
    d = pdt.depth(t)
    var = boolfn.variance(f)
    mu = boolfn.positive_fraction(f)
    digest = _digest(f, t, d, var, mu)
    if var == 0:
        return InequalityReport("theorem4", Fraction(0), Fraction(0), 0.0, True, True, digest)
    lhs = linear_sum(f)
    holds = lhs <= 0 or lhs * lhs <= 2 * d
    equality = lhs >= 0 and lhs * lhs == 2 * d
    rhs = math.sqrt(2 * d)
    return InequalityReport("theorem4", lhs, rhs, rhs - float(lhs), holds, equality, digest)


def lemma3_check(f: BooleanFunction, t: ParityDecisionTree) -> InequalityReport:
    """sum_i f^(i) <= E_leaf |sum_i l_i|, exact; ties are flagged rather than failed."""
    _require_computes(f, t)
    d = pdt.depth(t)
    var = boolfn.variance(f)
    mu = boolfn.positive_fraction(f)
    lhs = linear_sum(f)
    rhs = pdt.first_abs_moment(t)
    return InequalityReport("lemma3", lhs, rhs, float(rhs - lhs), lhs <= rhs, lhs == rhs,
                            _digest(f, t, d, var, mu))


def lemma1_check(t: ParityDecisionTree, factor: int = 2) -> InequalityReport:
    """E_leaf (sum_i l_i)^2 <= factor * depth (factor 2 is the true bound)."""
    stats = pdt.tree_stats(t)
    rhs = Fraction(factor * stats.depth)
    return InequalityReport("lemma1", stats.second_moment, rhs,
                            float(rhs - stats.second_moment),
                            stats.second_moment <= rhs, stats.second_moment == rhs,
                            {"tree": pdt.serialize_tree(t), "d": stats.depth})


# ---------------------------------------------------------- entropy chain


def h_given_f_closed_form(f: BooleanFunction) -> tuple[Fraction, Fraction, Fraction]:
    """``(mu, p_plus, p_minus)``: Pr[X_i = 1 | f = +1] and Pr[X_i = 1 | f = -1] for random i."""
    mu = boolfn.positive_fraction(f)
    if mu in (0, 1):
        raise ConstantFunctionError("conditional entropy given f needs a non-constant f")
    s = linear_sum(f)
    n = f.n
    return mu, Fraction(1, 2) + s / (4 * mu * n), Fraction(1, 2) - s / (4 * (1 - mu) * n)


def entropy_chain(f: BooleanFunction, t: ParityDecisionTree) -> EntropyReport:
    """Evaluate the three-link chain bounding H(X_i | f(X)) from both sides.

    The lower end uses ``1 - E[(sum l / n)^2]``, the valid form of the
    binary-entropy lower bound at argument ``1/2 + sum l / (2n)``.
    """
    _require_computes(f, t)
    mu = boolfn.positive_fraction(f)
    if mu in (0, 1):
        raise ConstantFunctionError(
            "entropy chain is undefined for constant f; theorem1_check handles that case"
        )
    n = f.n
    s = linear_sum(f)
    _, p_plus, p_minus = h_given_f_closed_form(f)
    leaves = [(x.mass, Fraction(1, 2) + Fraction(x.vector_sum, 2 * n))
              for x in pdt.leaf_summaries(t) if x.mass]
    second = sum((m * ((2 * p - 1) * n) ** 2 for m, p in leaves), Fraction(0))
    leaf_floor = 1 - second / (n * n)
    denom = 8 * mu * (1 - mu) * n * n

    def hf_lo():
        return float(mu) * binary_entropy(p_plus) + float(1 - mu) * binary_entropy(p_minus)

    def hf_hi():
        return _mp(mu) * _h_high(p_plus) + _mp(1 - mu) * _h_high(p_minus)

    def hl_lo():
        return sum(float(m) * binary_entropy(p) for m, p in leaves)

    def hl_hi():
        return mpmath.fsum(_mp(m) * _h_high(p) for m, p in leaves)

    def upper_lo():
        return 1 - float(s * s) / (LN2 * float(denom))

    def upper_hi():
        return 1 - _mp(s * s) / (mpmath.log(2) * _mp(denom))

    digest = {"n": n, "function": f.table_code(), "tree": pdt.serialize_tree(t)}
    links = []
    for name, small_lo, small_hi, big_lo, big_hi in (
        ("entropy_upper", hf_lo, hf_hi, upper_lo, upper_hi),
        ("entropy_dpi", hl_lo, hl_hi, hf_lo, hf_hi),
        ("entropy_lower", lambda: float(leaf_floor), lambda: _mp(leaf_floor), hl_lo, hl_hi),
    ):
        a, b, ok = _decide(small_lo, big_lo, small_hi, big_hi)
        links.append(InequalityReport(name, a, b, b - a, ok, False, digest))
    return EntropyReport(mu, hf_lo(), hl_lo(), upper_lo(), leaf_floor, tuple(links))


# ------------------------------------------------------ recursive majority


def depth_lower_bound(f: BooleanFunction) -> int:
    """Smallest depth allowed by the variance bound in theorem1_check: ceil((sum f^(i))^2 / (4 ln2 variance)).

    Uses the square, which is sound for negative sums too: negating f keeps
    every tree depth and the variance and flips the sign of the sum.
    """
    var = boolfn.variance(f)
    if var == 0:
        raise ConstantFunctionError("constant functions admit no nontrivial depth bound")
    s = linear_sum(f)
    return _ceil_over_4ln2(s * s / var)


def _ceil_over_4ln2(q: Fraction) -> int:
    if q == 0:
        return 0
    with mpmath.workdps(_HIGH_DPS):
        return int(mpmath.ceil(_mp(q) / (4 * mpmath.log(2))))


def recmaj_linear_sum(k: int) -> Fraction:
    """Level-1 sum of MAJ3^(xk) via multiplicativity under composition with balanced inner functions."""
    if k < 1:
        raise ValueError("k must be at least 1")
    base = boolfn.spectrum(boolfn.maj3()).linear_sum()
    total = base
    for _ in range(k - 1):
        total = base * total
    return total


def recmaj_depth_bound(k: int) -> int:
    """ceil(((3/2)^k)^2 / (4 ln2)); recursive majority is balanced so variance is 1."""
    s = recmaj_linear_sum(k)
    return _ceil_over_4ln2(s * s)


# ------------------------------------------------------------------ probe


def degree_probe(f: BooleanFunction) -> float:
    """sum_i f^(i) / sqrt(Fourier degree)."""
    spec = boolfn.spectrum(f)
    deg = spec.degree()
    if deg == 0:
        raise ConstantFunctionError("the degree probe needs a non-constant function")
    return float(spec.linear_sum()) / math.sqrt(deg)


def degree_survey(n: int) -> tuple[float, BooleanFunction]:
    """Largest probe ratio over every non-constant function on ``n`` inputs."""
    from .oracle import enumerate_functions

    best = None
    for f in enumerate_functions(n):
        if boolfn.variance(f) == 0:
            continue
        r = degree_probe(f)
        if best is None or r > best[0]:
            best = (r, f)
    return best
