"""Kronecker model primitives: the 2x2 initiator matrix, n-bit vertex labels,
and exact per-pair edge probabilities.

A graph instance lives on all n-bit labels.  Two labels are adjacent with a
probability obtained by multiplying one matrix entry per coordinate: ``alpha``
where both bits are 1, ``beta`` where they differ, ``gamma`` where both are 0.
Probabilities are computed by counting coordinate kinds and taking three
powers, not by multiplying n factors, which keeps rounding drift at one ulp.

Everything in this module is immutable and pure; unrestricted parallel use is
safe.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatchError, ParameterError

#: Labels must fit a single machine word (bitwise ops on one int dominate
#: runtime, and asymptotic scales are out of desk reach regardless).
MAX_DIMENSION = 63


@dataclass(frozen=True)
class KroneckerParams:
    """Entries of the symmetric 2x2 initiator matrix.

    ``alpha`` is the 1-1 entry, ``beta`` the off-diagonal entry, ``gamma`` the
    0-0 entry.  All entries live in [0, 1] and the standing assumption
    ``gamma <= alpha`` is enforced at construction.
    """

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name}={value!r} outside [0, 1]")
        if self.gamma > self.alpha:
            raise ParameterError(
                f"gamma={self.gamma!r} exceeds alpha={self.alpha!r}; "
                "the model assumes alpha >= gamma"
            )

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


@dataclass(frozen=True, order=True)
class VertexLabel:
    """An n-bit vertex label stored as one unsigned word.

    The text form is big-endian: in ``"1100"`` the first coordinate is the
    leftmost character, which is the most significant bit of ``bits``.
    Ordering compares ``bits`` first, so labels of equal dimension sort by
    their integer form.
    """

    bits: int
    n: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DIMENSION:
            raise ParameterError(f"dimension n={self.n!r} outside [1, {MAX_DIMENSION}]")
        if not 0 <= self.bits < (1 << self.n):
            raise ParameterError(
                f"bits={self.bits!r} does not fit in {self.n} bits"
            )

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "VertexLabel":
        """Parse a label from its big-endian bit-string or integer form.

        A string consisting only of 0/1 characters is read as a bit-string
        when ``n`` is omitted or equals its length; anything else is read as
        a decimal integer, which requires ``n``.
        """
        text = text.strip()
        if text and set(text) <= {"0", "1"} and (n is None or n == len(text)):
            return cls(int(text, 2), len(text))
        if n is None:
            raise ParameterError(
                f"cannot parse {text!r} as a label without an explicit dimension"
            )
        try:
            value = int(text, 10)
        except ValueError as exc:
            raise ParameterError(f"cannot parse {text!r} as a vertex label") from exc
        return cls(value, n)

    def to_string(self) -> str:
        """Big-endian bit-string form, e.g. ``"1100"``."""
        return format(self.bits, f"0{self.n}b")

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def __str__(self) -> str:
        return self.to_string()


@dataclass(frozen=True)
class PairOverlap:
    """Coordinate-kind counts for a label pair: both-one, differing, both-zero.

    These are the exponents of alpha, beta, gamma in the pair's edge
    probability; ``c10`` is the Hamming distance.
    """

    c11: int
    c10: int
    c00: int

    @classmethod
    def of_pair(cls, u: VertexLabel, v: VertexLabel) -> "PairOverlap":
        _check_same_dimension(u, v)
        c11 = (u.bits & v.bits).bit_count()
        c10 = (u.bits ^ v.bits).bit_count()
        return cls(c11, c10, u.n - c11 - c10)


def _check_same_dimension(u: VertexLabel, v: VertexLabel) -> None:
    if u.n != v.n:
        raise DimensionMismatchError(
            f"labels have incompatible dimensions {u.n} and {v.n}"
        )


def edge_probability(params: KroneckerParams, u: VertexLabel, v: VertexLabel) -> float:
    """Probability that ``u`` and ``v`` are adjacent.

    Defined for u == v as well (the value is the would-be self-loop term that
    closed-form degree identities subtract explicitly); graphs themselves
    never contain self-loops.
    """
    overlap = PairOverlap.of_pair(u, v)
    return (
        params.alpha ** overlap.c11
        * params.beta ** overlap.c10
        * params.gamma ** overlap.c00
    )


def weight(v: VertexLabel) -> int:
    """Number of one-bits in the label."""
    return v.bits.bit_count()


def hamming(u: VertexLabel, v: VertexLabel) -> int:
    """Number of coordinates on which the two labels differ."""
    _check_same_dimension(u, v)
    return (u.bits ^ v.bits).bit_count()


def complement(v: VertexLabel) -> VertexLabel:
    """The coordinate-wise flipped label; an involution with
    weight(complement(v)) == n - weight(v)."""
    mask = (1 << v.n) - 1
    return VertexLabel(v.bits ^ mask, v.n)
