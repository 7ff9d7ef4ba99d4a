"""
4-wise Independent Polynomial Hashing

Degree-3 polynomials over the binary field GF(2^m):

    h(x) = c3*x^3 + c2*x^2 + c1*x + c0

For any 4 distinct inputs the outputs are jointly uniform over the random
choice of (c3, c2, c1, c0). The full-size family lives in GF(2^64) reduced
modulo the irreducible pentanomial

    x^64 + x^4 + x^3 + x + 1

so truncating an output to its low bits gives exactly uniform bits. Scaled
down fields GF(2^m), m <= 16, use the fixed polynomials in FIELD_POLYNOMIALS
and make the whole family enumerable for exact checks.

Two views are built on the same polynomial:
- SignHash:  bit 0 of h(x) mapped 0 -> +1, 1 -> -1
- SliceHash: the low t bits of h(x), a slice index in [0, 2^t)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from src.errors import UsageError

logger = logging.getLogger(__name__)

# Full polynomial including the leading x^m term.
FIELD_POLYNOMIALS = {
    2: 0x7,          # x^2 + x + 1
    3: 0xB,          # x^3 + x + 1
    4: 0x13,         # x^4 + x + 1
    5: 0x25,         # x^5 + x^2 + 1
    6: 0x43,         # x^6 + x + 1
    7: 0x83,         # x^7 + x + 1
    8: 0x11B,        # x^8 + x^4 + x^3 + x + 1
    9: 0x211,        # x^9 + x^4 + 1
    10: 0x409,       # x^10 + x^3 + 1
    11: 0x805,       # x^11 + x^2 + 1
    12: 0x1053,      # x^12 + x^6 + x^4 + x + 1
    13: 0x201B,      # x^13 + x^4 + x^3 + x + 1
    14: 0x4443,      # x^14 + x^10 + x^6 + x + 1
    15: 0x8003,      # x^15 + x + 1
    16: 0x1100B,     # x^16 + x^12 + x^3 + x + 1
    64: (1 << 64) | 0x1B,
}

FULL_FIELD_BITS = 64
MAX_SLICE_BITS = 32
MAX_ENUMERATION_BITS = 24
INDEPENDENCE = 4

_ZERO = np.uint64(0)
_ONE = np.uint64(1)


# =============================================================================
# Field Arithmetic
# =============================================================================

@dataclass(frozen=True)
class BinaryField:
    """GF(2^bits) with elements stored as integers below 2^bits."""

    bits: int
    polynomial: int

    @property
    def mask(self) -> int:
        return (1 << self.bits) - 1

    @property
    def reduction(self) -> int:
        return self.polynomial & self.mask

    @property
    def size(self) -> int:
        return 1 << self.bits

    def reduce(self, value: int) -> int:
        """Reduce a carry-less product modulo the field polynomial."""
        while value.bit_length() > self.bits:
            value ^= self.polynomial << (value.bit_length() - 1 - self.bits)
        return value

    def multiply(self, a: int, b: int) -> int:
        """Scalar product: carry-less multiply, then reduce."""
        product = 0
        while b:
            if b & 1:
                product ^= a
            a <<= 1
            b >>= 1
        return self.reduce(product)

    def _double(self, values: np.ndarray) -> np.ndarray:
        carry = (values >> np.uint64(self.bits - 1)) & _ONE
        shifted = (values << _ONE) & np.uint64(self.mask)
        return shifted ^ (carry * np.uint64(self.reduction))

    def multiply_array(self, a, b, b_bits: int | None = None) -> np.ndarray:
        """
        Elementwise product of uint64 arrays (broadcasting).

        Scans the bits of ``b`` from the top; ``b_bits`` bounds the bit length
        of every entry of b and defaults to the field width.
        """
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.uint64), np.asarray(b, dtype=np.uint64))
        bits = self.bits if b_bits is None else max(1, int(b_bits))
        acc = np.zeros(a.shape, dtype=np.uint64)
        for bit in range(bits - 1, -1, -1):
            acc = self._double(acc)
            chosen = ((b >> np.uint64(bit)) & _ONE).astype(bool)
            acc ^= np.where(chosen, a, _ZERO)
        return acc


@lru_cache(maxsize=None)
def binary_field(bits: int) -> BinaryField:
    if bits not in FIELD_POLYNOMIALS:
        raise UsageError(f"No field polynomial for GF(2^{bits}); supported: 2..16 and 64")
    return BinaryField(bits=bits, polynomial=FIELD_POLYNOMIALS[bits])


def is_irreducible(polynomial: int) -> bool:
    """Trial division by every polynomial of degree <= deg/2 (small degrees only)."""
    degree = polynomial.bit_length() - 1
    if degree < 1:
        return False
    for divisor in range(2, 1 << (degree // 2 + 1)):
        remainder = polynomial
        width = divisor.bit_length()
        while remainder.bit_length() >= width:
            remainder ^= divisor << (remainder.bit_length() - width)
        if remainder == 0:
            return False
    return True


def _horner(field: BinaryField, coefficients: Sequence, xs, x_bits: int) -> np.ndarray:
    """Evaluate c3*x^3 + c2*x^2 + c1*x + c0 elementwise."""
    c3, c2, c1, c0 = (np.asarray(c, dtype=np.uint64) for c in coefficients)
    xs = np.asarray(xs, dtype=np.uint64)
    acc = np.broadcast_to(c3, np.broadcast_shapes(c3.shape, xs.shape)).copy()
    for c in (c2, c1, c0):
        acc = field.multiply_array(acc, xs, x_bits) ^ c
    return acc


# =============================================================================
# Hash Families
# =============================================================================

@dataclass(frozen=True)
class PolyHash:
    """Degree-3 polynomial over GF(2^field_bits); coefficients are field elements."""

    c3: int
    c2: int
    c1: int
    c0: int
    field_bits: int = FULL_FIELD_BITS

    def __post_init__(self):
        field = binary_field(self.field_bits)
        for name in ("c3", "c2", "c1", "c0"):
            value = int(getattr(self, name))
            if not 0 <= value <= field.mask:
                raise UsageError(f"Coefficient {name}={value:#x} outside GF(2^{self.field_bits})")
            object.__setattr__(self, name, value)

    @property
    def field(self) -> BinaryField:
        return binary_field(self.field_bits)

    @property
    def coefficients(self) -> tuple[int, int, int, int]:
        return (self.c3, self.c2, self.c1, self.c0)

    def evaluate(self, x: int) -> int:
        """Scalar evaluation with pure integer arithmetic."""
        field = self.field
        acc = self.c3
        for c in (self.c2, self.c1, self.c0):
            acc = field.multiply(acc, x) ^ c
        return acc

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized evaluation over an array of points."""
        xs = np.asarray(xs, dtype=np.uint64)
        if xs.size == 0:
            return np.zeros(xs.shape, dtype=np.uint64)
        x_bits = int(xs.max()).bit_length()
        return _horner(self.field, self.coefficients, xs, x_bits)

    def to_dict(self) -> dict[str, str]:
        width = (self.field_bits + 3) // 4
        return {name: f"{value:0{width}x}" for name, value in zip(("c3", "c2", "c1", "c0"), self.coefficients)}

    @classmethod
    def from_dict(cls, data: dict[str, str], field_bits: int = FULL_FIELD_BITS) -> PolyHash:
        return cls(*(int(data[name], 16) for name in ("c3", "c2", "c1", "c0")), field_bits=field_bits)


@dataclass(frozen=True)
class SignHash:
    """The +/-1 distinguisher D: bit 0 of the field evaluation, 0 -> +1, 1 -> -1."""

    base: PolyHash

    def __call__(self, points: np.ndarray) -> np.ndarray:
        bits = self.base.evaluate_many(points) & _ONE
        return 1 - 2 * bits.astype(np.int64)


@dataclass(frozen=True)
class SliceHash:
    """The slice function h: low t bits of the field evaluation (T = 2^t slices)."""

    base: PolyHash
    t: int

    def __post_init__(self):
        if not 0 <= self.t <= min(MAX_SLICE_BITS, self.base.field_bits):
            raise UsageError(f"Slice bit count t={self.t} outside [0, {MAX_SLICE_BITS}]")

    @property
    def slice_count(self) -> int:
        return 1 << self.t

    def __call__(self, points: np.ndarray) -> np.ndarray:
        if self.t == 0:
            return np.zeros(np.shape(points), dtype=np.int64)
        values = self.base.evaluate_many(points) & np.uint64(self.slice_count - 1)
        return values.astype(np.int64)


def sample_polyhash(rng: np.random.Generator, field_bits: int = FULL_FIELD_BITS) -> PolyHash:
    """Four coefficients drawn uniformly and independently from GF(2^field_bits)."""
    field = binary_field(field_bits)
    draws = rng.integers(0, field.mask, size=INDEPENDENCE, dtype=np.uint64, endpoint=True)
    return PolyHash(*(int(c) for c in draws), field_bits=field_bits)


def sample_coefficients(rng: np.random.Generator, count: int, field_bits: int = FULL_FIELD_BITS) -> np.ndarray:
    """``count`` independent coefficient rows (c3, c2, c1, c0), shape (count, 4)."""
    field = binary_field(field_bits)
    return rng.integers(0, field.mask, size=(count, INDEPENDENCE), dtype=np.uint64, endpoint=True)


def evaluate_batch(coefficients: np.ndarray, points, field_bits: int = FULL_FIELD_BITS) -> np.ndarray:
    """Evaluate many polynomials on the same points; result shape (rows, len(points))."""
    coefficients = np.asarray(coefficients, dtype=np.uint64)
    points = np.asarray(points, dtype=np.uint64).reshape(1, -1)
    columns = [coefficients[:, j : j + 1] for j in range(INDEPENDENCE)]
    x_bits = int(points.max()).bit_length() if points.size else 1
    return _horner(binary_field(field_bits), columns, points, x_bits)


def eval_sign(h: SignHash, x: int) -> int:
    return -1 if h.base.evaluate(int(x)) & 1 else 1


def eval_slice(h: SliceHash, x: int) -> int:
    return h.base.evaluate(int(x)) & (h.slice_count - 1)


# =============================================================================
# Exhaustive Family Enumeration
# =============================================================================

def _check_enumerable(field_bits: int) -> BinaryField:
    if field_bits > 16 or INDEPENDENCE * field_bits > MAX_ENUMERATION_BITS:
        raise UsageError(
            f"GF(2^{field_bits}) family has 2^{INDEPENDENCE * field_bits} members; "
            f"enumeration supports at most 2^{MAX_ENUMERATION_BITS}"
        )
    return binary_field(field_bits)


def enumerate_family(field_bits: int, points: Iterable[int]) -> np.ndarray:
    """
    Outputs of every member of the scaled-down family on ``points``.

    Row r holds the outputs of the polynomial whose coefficients are the four
    field_bits-wide digits of r (c3 most significant). Shape (2^(4m), len(points)).
    """
    field = _check_enumerable(field_bits)
    points = [int(p) for p in points]
    for p in points:
        if not 0 <= p < field.size:
            raise UsageError(f"Point {p} is not an element of GF(2^{field_bits})")

    m = np.uint64(field_bits)
    index = np.arange(1 << (INDEPENDENCE * field_bits), dtype=np.uint64)
    mask = np.uint64(field.mask)
    coefficients = [(index >> (m * np.uint64(shift))) & mask for shift in (3, 2, 1, 0)]

    outputs = np.empty((index.size, len(points)), dtype=np.uint64)
    for column, p in enumerate(points):
        outputs[:, column] = _horner(field, coefficients, np.uint64(p), p.bit_length())
    return outputs


@dataclass(frozen=True)
class KWiseReport:
    """Joint output histogram of the enumerated family on a set of points."""

    field_bits: int
    points: tuple[int, ...]
    family_size: int
    histogram: np.ndarray

    @property
    def outcome_count(self) -> int:
        return int(self.histogram.size)

    @property
    def expected_count(self) -> float:
        return self.family_size / self.outcome_count

    @property
    def min_count(self) -> int:
        return int(self.histogram.min())

    @property
    def max_count(self) -> int:
        return int(self.histogram.max())

    @property
    def uniform(self) -> bool:
        return self.min_count == self.max_count == self.expected_count

    def to_dict(self) -> dict:
        return {
            "field_bits": self.field_bits,
            "points": list(self.points),
            "family_size": self.family_size,
            "outcome_count": self.outcome_count,
            "expected_count": self.expected_count,
            "min_count": self.min_count,
            "max_count": self.max_count,
            "uniform": self.uniform,
        }


def kwise_uniformity_report(
    field_bits: int,
    points: Sequence[int],
    degree: int = INDEPENDENCE,
    mode: str = "exhaustive",
) -> KWiseReport:
    """
    Enumerate the whole scaled-down family and histogram the joint outputs.

    Args:
        field_bits: m, the scaled-down field is GF(2^m)
        points: Distinct field elements to evaluate at
        degree: Independence degree of the family (only 4 is provided)
        mode: Only "exhaustive" is supported

    Returns:
        KWiseReport with one bucket per joint output tuple
    """
    if degree != INDEPENDENCE:
        raise UsageError(f"Only the {INDEPENDENCE}-wise (degree-3) family is provided, got degree={degree}")
    if mode != "exhaustive":
        raise UsageError(f"Unsupported enumeration mode '{mode}'")
    points = tuple(int(p) for p in points)
    if not points:
        raise UsageError("At least one point is required")
    if len(set(points)) != len(points):
        raise UsageError(f"Points must be distinct, got {list(points)}")
    if field_bits * len(points) > MAX_ENUMERATION_BITS:
        raise UsageError(f"Joint histogram over {len(points)} points of GF(2^{field_bits}) is too large")

    outputs = enumerate_family(field_bits, points)
    joint = np.zeros(outputs.shape[0], dtype=np.uint64)
    for column in range(len(points)):
        joint |= outputs[:, column] << np.uint64(field_bits * column)
    histogram = np.bincount(joint.astype(np.int64), minlength=1 << (field_bits * len(points)))

    logger.info(f"Enumerated {outputs.shape[0]} members of the GF(2^{field_bits}) family on {len(points)} points")
    return KWiseReport(field_bits=field_bits, points=points, family_size=int(outputs.shape[0]), histogram=histogram)
