"""Exact Fourier and parity-decision-tree analysis of Boolean functions."""

from .boolfn import (
    BooleanFunction,
    FourierSpectrum,
    compose,
    linear_coefficients,
    power,
    spectrum,
    variance,
)
from .pdt import ParityDecisionTree, parse, serialize

__all__ = [
    "BooleanFunction",
    "FourierSpectrum",
    "ParityDecisionTree",
    "compose",
    "linear_coefficients",
    "parse",
    "power",
    "serialize",
    "spectrum",
    "variance",
]
