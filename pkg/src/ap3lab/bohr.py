"""Bohr sets in Z/PZ, their normalized indicators, and convolution smoothing.

Membership n in B(R, eps) means every frequency x in R satisfies
||n*x/P|| <= eps, where ||.|| is distance to the nearest integer. With
t = n*x mod P that reads min(t, P-t)/P <= eps, and with eps held as an
exact rational p/q it becomes the integer comparison q*min(t, P-t) <= p*P.
No float ever touches the membership decision.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .cyclic import CyclicFunction, convolve
from .errors import InvalidArgumentError, ResourceLimitError
from .primes import is_prime

# q*min(t, P-t) must stay inside int64: with P <= 2**23 this allows
# denominators up to about 2**39; decimal strings give at most 10**9.
_MAX_DENOMINATOR = 1 << 30


def as_radius(eps) -> Fraction:
    """Normalize a radius given as decimal string, Fraction, or float-free int
    ratio into an exact Fraction in (0, 1/2]."""
    if isinstance(eps, float):
        raise InvalidArgumentError(
            "pass the radius as a decimal string or Fraction, not a float"
        )
    radius = Fraction(eps)
    if not 0 < radius <= Fraction(1, 2):
        raise InvalidArgumentError(f"radius must lie in (0, 1/2], got {radius}")
    if radius.denominator > _MAX_DENOMINATOR:
        raise InvalidArgumentError(
            f"radius denominator {radius.denominator} too large for exact arithmetic"
        )
    return radius


class BohrSet:
    """B(R, eps) with bit-packed membership. Immutable."""

    __slots__ = ("modulus", "frequencies", "radius", "bits", "size")

    def __init__(self, modulus, frequencies, radius, bits, size):
        self.modulus = modulus
        self.frequencies = frequencies
        self.radius = radius
        self.bits = bits
        self.size = size
        bits.setflags(write=False)

    @property
    def measure(self) -> float:
        return self.size / self.modulus

    def contains(self, n: int) -> bool:
        i = n % self.modulus
        return bool((self.bits[i >> 3] >> (7 - (i & 7))) & 1)

    def members(self) -> np.ndarray:
        flags = np.unpackbits(self.bits)[: self.modulus]
        return np.flatnonzero(flags).astype(np.int64)


def build_bohr_set(p: int, frequencies, eps) -> BohrSet:
    """Exact member scan in O(P * |R|) integer arithmetic.

    Asserts the pigeonhole lower bound |B| >= P * eps^|R| (an exact theorem
    at modulus P), via integer cross-multiplication.
    """
    if not is_prime(p):
        raise InvalidArgumentError(f"modulus {p} is not prime")
    radius = as_radius(eps)
    if p > (1 << 31) or (p // 2) * radius.denominator >= (1 << 62):
        raise ResourceLimitError(
            f"modulus {p} too large for the exact int64 membership scan"
        )
    freqs = sorted({int(x) % p for x in frequencies})
    if not freqs:
        raise InvalidArgumentError("frequency set must be nonempty")

    num, den = radius.numerator, radius.denominator
    n = np.arange(p, dtype=np.int64)
    member = np.ones(p, dtype=bool)
    bound = num * p  # compare q*min(t, P-t) <= p*P exactly
    for x in freqs:
        t = (n * x) % p
        dist = np.minimum(t, p - t)
        member &= dist * den <= bound
    size = int(np.count_nonzero(member))

    # |B| * q^d >= P * p^d in exact big-int arithmetic
    d = len(freqs)
    assert size * den**d >= p * num**d, (
        "pigeonhole lower bound |B| >= P*eps^|R| failed; membership scan is broken"
    )

    return BohrSet(
        modulus=p,
        frequencies=tuple(freqs),
        radius=radius,
        bits=np.packbits(member),
        size=size,
    )


def normalized_indicator(bohr: BohrSet) -> CyclicFunction:
    """sigma = (P/|B|) * 1_B, the probability kernel of the Bohr set.

    When 1 is a frequency and eps < 1/4 the support provably sits inside
    [-P/4, P/4]; that containment is asserted under those hypotheses.
    """
    if bohr.size < 1:
        raise InvalidArgumentError("empty Bohr set has no normalized indicator")
    p = bohr.modulus
    members = bohr.members()
    if 1 in bohr.frequencies and bohr.radius < Fraction(1, 4):
        folded = np.minimum(members, p - members)
        assert int(folded.max()) * 4 < p, (
            "support must lie in [-P/4, P/4] when 1 in R and eps < 1/4"
        )
    values = np.zeros(p)
    values[members] = p / bohr.size
    return CyclicFunction(p, values, validate_modulus=False)


def smooth(a: CyclicFunction, bohr: BohrSet) -> CyclicFunction:
    """h = a * sigma. Mass is preserved (||h||_1 = ||a||_1 for a >= 0) and the
    output is clamped at zero: the exact convolution of nonnegative functions
    is nonnegative, so any dip below zero is transform roundoff.
    """
    if a.modulus != bohr.modulus:
        raise InvalidArgumentError(
            f"modulus mismatch: function {a.modulus} vs Bohr set {bohr.modulus}"
        )
    if bohr.size == 1:
        return a  # B = {0}: sigma is the exact convolution identity
    h = convolve(a, normalized_indicator(bohr))
    low = float(h.values.min())
    if low < 0:
        assert -low <= 1e-9 * (1.0 + h.sup_norm()), (
            "convolution of nonnegative inputs went significantly negative"
        )
        return CyclicFunction(h.modulus, np.maximum(h.values, 0.0), validate_modulus=False)
    return h
