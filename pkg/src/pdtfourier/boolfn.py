"""Boolean functions on {-1,1}^n stored as packed truth tables.

Point code ``b`` encodes an input: bit ``i - 1`` of ``b`` is the GF(2) bit of
``x_i``, with bit 0 meaning ``x_i = +1``.  The table stores the output the
same way (bit 1 means ``f = -1``), packed eight points per byte, little-endian
within each byte.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

MAX_ARITY = 27
DEFAULT_TRANSFORM_GUARD = 24
# points handled per streaming chunk
_CHUNK_BITS = 22


def transform_guard() -> int:
    """Largest arity for which the full spectrum is materialised (``BFT_MAX_N``)."""
    raw = os.environ.get("BFT_MAX_N")
    if raw is None or raw.strip() == "":
        return DEFAULT_TRANSFORM_GUARD
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"BFT_MAX_N must be an integer, got {raw!r}") from None


class ArityError(ValueError):
    pass


class TruthTableParseError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    n: int
    packed: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_ARITY:
            raise ArityError(f"arity {self.n} outside [1, {MAX_ARITY}]")
        packed = np.ascontiguousarray(self.packed, dtype=np.uint8)
        if packed.shape != (_n_bytes(self.n),):
            raise ValueError(f"packed table must have {_n_bytes(self.n)} bytes for n={self.n}")
        if self.n < 3:
            # clear padding so that equality and popcounts stay canonical
            packed = packed & np.uint8((1 << (1 << self.n)) - 1)
        packed.setflags(write=False)
        object.__setattr__(self, "packed", packed)

    @classmethod
    def from_bits(cls, bits) -> "BooleanFunction":
        """From a 0/1 array of length 2^n (1 means f = -1)."""
        bits = np.asarray(bits, dtype=np.uint8)
        n = _log2_exact(bits.size)
        return cls(n, np.packbits(bits, bitorder="little"))

    @classmethod
    def from_signs(cls, signs) -> "BooleanFunction":
        signs = np.asarray(signs)
        if not np.all((signs == 1) | (signs == -1)):
            raise ValueError("signs must be +1 or -1")
        return cls.from_bits((signs < 0).astype(np.uint8))

    @property
    def size(self) -> int:
        return 1 << self.n

    def bits(self) -> np.ndarray:
        return np.unpackbits(self.packed, bitorder="little")[: self.size]

    def signs(self) -> np.ndarray:
        return 1 - 2 * self.bits().astype(np.int64)

    def __call__(self, x: int) -> int:
        return evaluate(self, x)

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.packed, other.packed)

    def __hash__(self):
        return hash((self.n, self.packed.tobytes()))

    def __repr__(self):
        if self.n <= 6:
            return f"BooleanFunction(n={self.n}, {to_text(self).splitlines()[1]!r})"
        return f"BooleanFunction(n={self.n})"

    def table_code(self) -> int:
        """The whole table as one integer, bit ``b`` set iff f(b) = -1."""
        return int.from_bytes(self.packed.tobytes(), "little")

    @classmethod
    def from_table_code(cls, n: int, code: int) -> "BooleanFunction":
        nb = _n_bytes(n)
        return cls(n, np.frombuffer(code.to_bytes(nb, "little"), dtype=np.uint8).copy())


def _n_bytes(n: int) -> int:
    return max(1, (1 << n) // 8)


def _log2_exact(size: int) -> int:
    n = size.bit_length() - 1
    if size <= 0 or (1 << n) != size:
        raise ValueError(f"table length {size} is not a power of two")
    return n


def evaluate(f: BooleanFunction, x: int) -> int:
    if not 0 <= x < f.size:
        raise ValueError(f"point code {x} outside [0, {f.size})")
    bit = (int(f.packed[x >> 3]) >> (x & 7)) & 1
    return -1 if bit else 1


# ---------------------------------------------------------------- spectrum


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    """Integer-scaled coefficients: ``coef[S] = 2^n * f^(S)`` for subset mask ``S``."""

    n: int
    coef: np.ndarray

    def __post_init__(self):
        coef = np.asarray(self.coef, dtype=np.int64)
        coef.setflags(write=False)
        object.__setattr__(self, "coef", coef)

    def __getitem__(self, mask: int) -> int:
        return int(self.coef[mask])

    def __eq__(self, other):
        if not isinstance(other, FourierSpectrum):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.coef, other.coef)

    def fhat(self, mask: int) -> Fraction:
        return Fraction(int(self.coef[mask]), 1 << self.n)

    def nonzero(self) -> Iterator[tuple[int, Fraction]]:
        for mask in np.flatnonzero(self.coef):
            yield int(mask), self.fhat(int(mask))

    def linear(self) -> list[Fraction]:
        return [self.fhat(1 << i) for i in range(self.n)]

    def linear_sum(self) -> Fraction:
        return sum(self.linear(), Fraction(0))

    def degree(self) -> int:
        masks = np.flatnonzero(self.coef)
        if masks.size == 0:
            return 0
        return max(bin(int(m)).count("1") for m in masks)

    def parseval(self) -> int:
        return int(np.sum(self.coef.astype(object) ** 2))

    def inverse(self) -> BooleanFunction:
        values = walsh_hadamard(self.coef) >> self.n
        return BooleanFunction.from_signs(values)


def walsh_hadamard(values: np.ndarray) -> np.ndarray:
    """Unnormalised butterfly transform, ``out[S] = sum_x v[x] (-1)^{|S & x|}``."""
    a = np.array(values, dtype=np.int64)
    n = _log2_exact(a.size)
    for i in range(n):
        h = 1 << i
        view = a.reshape(-1, 2, h)
        lo = view[:, 0, :].copy()
        view[:, 0, :] += view[:, 1, :]
        view[:, 1, :] = lo - view[:, 1, :]
    return a


def spectrum(f: BooleanFunction) -> FourierSpectrum:
    guard = transform_guard()
    if f.n > guard:
        raise ArityError(
            f"full transform limited to n <= {guard} (got n={f.n}); "
            "use linear_coefficients for level-1 coefficients"
        )
    return FourierSpectrum(f.n, walsh_hadamard(f.signs()))


def _chunks(f: BooleanFunction):
    """Yield ``(first_point, signs)`` over consecutive blocks of the table."""
    step_bytes = max(1, (1 << _CHUNK_BITS) // 8)
    size = f.size
    for start in range(0, f.packed.size, step_bytes):
        chunk = np.unpackbits(f.packed[start:start + step_bytes], bitorder="little")
        first = start * 8
        chunk = chunk[: size - first]
        yield first, 1 - 2 * chunk.astype(np.int64)


def linear_scaled(f: BooleanFunction) -> list[int]:
    """``2^n * f^(i)`` for i = 1..n, streamed over the packed table."""
    out = [0] * f.n
    for first, s in _chunks(f):
        width = _log2_exact(s.size)
        for i in range(f.n):
            if i < width:
                h = 1 << i
                view = s.reshape(-1, 2, h)
                out[i] += int(view[:, 0, :].sum()) - int(view[:, 1, :].sum())
            else:
                total = int(s.sum())
                out[i] += -total if (first >> i) & 1 else total
    return out


def linear_coefficients(f: BooleanFunction) -> list[Fraction]:
    scale = 1 << f.n
    return [Fraction(c, scale) for c in linear_scaled(f)]


def count_negative(f: BooleanFunction) -> int:
    return int(np.unpackbits(f.packed).sum())


def positive_fraction(f: BooleanFunction) -> Fraction:
    """mu = Pr[f(x) = 1]."""
    return Fraction(f.size - count_negative(f), f.size)


def variance(f: BooleanFunction) -> Fraction:
    mu = positive_fraction(f)
    return 4 * mu * (1 - mu)


def is_balanced(f: BooleanFunction) -> bool:
    return 2 * count_negative(f) == f.size


def fourier_degree(f: BooleanFunction) -> int:
    return spectrum(f).degree()


# ------------------------------------------------------------- composition


def compose(f: BooleanFunction, g: BooleanFunction) -> BooleanFunction:
    """``(f o g)(x) = f(g(block 1), ..., g(block m))``; block i holds x_{(i-1)n+1..in}."""
    m, n = f.n, g.n
    total = m * n
    if total > MAX_ARITY:
        raise ArityError(f"composition would have arity {m * n} > {MAX_ARITY}")
    gbits = g.bits()
    fbits = f.bits()
    block_mask = (1 << n) - 1
    size = 1 << total
    step = min(size, 1 << _CHUNK_BITS)
    out = np.empty(size // 8 if size >= 8 else 1, dtype=np.uint8)
    for start in range(0, size, step):
        x = np.arange(start, start + step, dtype=np.int64)
        idx = np.zeros(step, dtype=np.int64)
        for i in range(m):
            idx |= gbits[(x >> (i * n)) & block_mask].astype(np.int64) << i
        packed = np.packbits(fbits[idx], bitorder="little")
        if size >= 8:
            out[start // 8:(start + step) // 8] = packed
        else:
            out[:] = packed
    return BooleanFunction(total, out)


def power(f: BooleanFunction, k: int) -> BooleanFunction:
    if k < 1:
        raise ValueError("power needs k >= 1")
    if f.n ** k > MAX_ARITY:
        raise ArityError(f"f^(x{k}) would have arity {f.n ** k} > {MAX_ARITY}")
    result = f
    for _ in range(k - 1):
        result = compose(f, result)
    return result


# ----------------------------------------------------------------- builders


def _points(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _popcount(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64)
    c = np.zeros(x.shape, dtype=np.int64)
    while np.any(x):
        c += (x & np.uint64(1)).astype(np.int64)
        x >>= np.uint64(1)
    return c


def maj3() -> BooleanFunction:
    # -1 iff at least two of the three inputs are -1
    return BooleanFunction.from_bits((_popcount(_points(3)) >= 2).astype(np.uint8))


def parity(n: int) -> BooleanFunction:
    return BooleanFunction.from_bits((_popcount(_points(n)) & 1).astype(np.uint8))


def dictator(n: int, i: int) -> BooleanFunction:
    if not 1 <= i <= n:
        raise ValueError(f"dictator index {i} outside [1, {n}]")
    return BooleanFunction.from_bits(((_points(n) >> (i - 1)) & 1).astype(np.uint8))


def constant(n: int, sign: int) -> BooleanFunction:
    if sign not in (1, -1):
        raise ValueError("constant sign must be +1 or -1")
    return BooleanFunction.from_bits(np.full(1 << n, 1 if sign < 0 else 0, dtype=np.uint8))


def recursive_majority(k: int) -> BooleanFunction:
    return power(maj3(), k)


_BUILTINS = {
    "maj3": (maj3, 0),
    "recursive_majority": (recursive_majority, 1),
    "recmaj": (recursive_majority, 1),
    "parity": (parity, 1),
    "dictator": (dictator, 2),
    "constant": (constant, 2),
}


def builtin(name: str, *params: int) -> BooleanFunction:
    try:
        fn, nparams = _BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown builtin {name!r}; known: {', '.join(sorted(_BUILTINS))}") from None
    if len(params) != nparams:
        raise ValueError(f"{name} takes {nparams} parameter(s), got {len(params)}")
    return fn(*params)


def parse_builtin(spec: str) -> BooleanFunction:
    """Parse ``maj3``, ``parity:5``, ``dictator:3:1``, ``recmaj:2``, ``constant:2:-1``."""
    name, *rest = spec.split(":")
    try:
        params = [int(p) for p in rest]
    except ValueError:
        raise ValueError(f"bad builtin parameters in {spec!r}") from None
    return builtin(name, *params)


# ------------------------------------------------------------------ text io


def to_text(f: BooleanFunction) -> str:
    chars = np.where(f.bits() == 1, ord("-"), ord("+")).astype(np.uint8)
    return f"n={f.n}\n{chars.tobytes().decode('ascii')}\n"


def from_text(text: str) -> BooleanFunction:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) != 2:
        raise TruthTableParseError("expected two lines: 'n=<int>' and the sign string")
    header, body = lines
    if not header.startswith("n="):
        raise TruthTableParseError(f"bad header {header!r}, expected 'n=<int>'")
    try:
        n = int(header[2:])
    except ValueError:
        raise TruthTableParseError(f"bad arity in header {header!r}") from None
    if not 1 <= n <= MAX_ARITY:
        raise TruthTableParseError(f"arity {n} outside [1, {MAX_ARITY}]")
    if len(body) != 1 << n:
        raise TruthTableParseError(f"sign string has length {len(body)}, expected {1 << n}")
    raw = np.frombuffer(body.encode("ascii", errors="replace"), dtype=np.uint8)
    bad = np.flatnonzero((raw != ord("+")) & (raw != ord("-")))
    if bad.size:
        pos = int(bad[0])
        raise TruthTableParseError(f"foreign character {body[pos]!r} at position {pos}")
    return BooleanFunction.from_bits((raw == ord("-")).astype(np.uint8))
