"""Three-term progression operator on Z/PZ, integer 3AP counting, and
progression-free test-set generators.

Two counting conventions live side by side; keep them straight:

  * the operator averages over ORDERED pairs (x, d) including d = 0, so a
    single integer progression embedded without wraparound contributes two
    orientations (d and P-d);
  * count_3aps_integers counts each nontrivial progression ONCE (d > 0),
    and the |A| trivial progressions are reported separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .cyclic import CyclicFunction
from .errors import InvalidArgumentError, ResourceLimitError

# Above this modulus the O(P^2) double loop is refused and callers should
# take the spectral route.
DIRECT_LAMBDA_CEILING = 20011


@dataclass
class APReport:
    """Lambda value split by common difference: d = 0 versus the rest."""

    lambda_value: float
    trivial_mass: float
    nontrivial_mass: float
    pair_count: int | None  # round(lambda * P^2) when inputs are indicators


def trivial_mass(f: CyclicFunction, g: CyclicFunction, h: CyclicFunction) -> float:
    """The d = 0 contribution (1/P^2) sum_x f(x) g(x) h(x), in O(P)."""
    p = f.modulus
    return float(np.sum(f.values * g.values * h.values)) / (p * p)


def lambda_direct(
    f: CyclicFunction,
    g: CyclicFunction,
    h: CyclicFunction,
    ceiling: int = DIRECT_LAMBDA_CEILING,
) -> APReport:
    """Exact double sum (1/P^2) sum_{x,d} f(x) g(x+d) h(x+2d).

    O(P^2); refuses past the ceiling (raise it only for one-off oracle
    runs). Ascending-d accumulation keeps the result deterministic.
    """
    p = _common_modulus(f, g, h)
    if p > ceiling:
        raise ResourceLimitError(
            f"P = {p} exceeds the direct-evaluation ceiling {ceiling};"
            " use lambda_fourier"
        )
    fv = f.values
    g2 = np.concatenate([g.values, g.values])
    h2 = np.concatenate([h.values, h.values])
    total = 0.0
    for d in range(p):
        total += float(np.dot(fv * g2[d : d + p], h2[2 * d % p : 2 * d % p + p]))
    lam = total / (p * p)
    triv = trivial_mass(f, g, h)
    return APReport(
        lambda_value=lam,
        trivial_mass=triv,
        nontrivial_mass=lam - triv,
        pair_count=_pair_count(lam, p) if _all_indicator(f, g, h) else None,
    )


def lambda_fourier(
    f: CyclicFunction, g: CyclicFunction, h: CyclicFunction
) -> float:
    """Spectral evaluation via sum_t fhat(t) * ghat(-2t) * hhat(t).

    The closed form follows from expanding f, g, h against this package's
    transform pair: the x-average forces r + s + u = 0 and the d-average
    forces s + 2u = 0, leaving r = u and s = -2u. Verified against
    lambda_direct in the test suite before any production use.
    """
    p = _common_modulus(f, g, h)
    fs = f.spectrum().coefficients
    gs = g.spectrum().coefficients
    hs = h.spectrum().coefficients
    t = np.arange(p, dtype=np.int64)
    minus_2t = (-2 * t) % p
    value = np.sum(fs * gs[minus_2t] * hs)
    return float(value.real)


def count_3aps_integers(members) -> int:
    """Nontrivial integer 3APs (x, x+d, x+2d), d > 0, counted once each."""
    arr = sorted(set(int(m) for m in members))
    member_set = set(arr)
    count = 0
    for i, x in enumerate(arr):
        for y in arr[i + 1 :]:
            if 2 * y - x in member_set:
                count += 1
    return count


def behrend_set(limit: int) -> list[int]:
    """Dense 3AP-free subset of [1, limit] from spheres in digit space.

    Digits bounded by half the base make addition carry-free, so a + b = 2c
    forces the digit vectors into an arithmetic relation that a sphere
    (constant sum of squares) only satisfies degenerately. The best
    (base, dimension, radius) triple under the limit is picked by scan.
    Output is verified 3AP-free before returning.
    """
    if limit < 1:
        raise InvalidArgumentError(f"limit must be >= 1, got {limit}")
    if limit <= 3:
        return [1] if limit == 1 else [1, 2]  # too small for the digit scan

    best: list[int] = [1]
    for base in range(3, 40):
        max_digit = (base - 1) // 2
        dims = 1
        while base ** (dims + 1) <= 4 * limit:
            dims += 1
        for n_dims in range(1, dims + 1):
            spheres: dict[int, list[int]] = {}
            for digits in product(range(max_digit + 1), repeat=n_dims):
                value = 0
                for a in digits:
                    value = value * base + a
                if value + 1 > limit:
                    continue
                spheres.setdefault(sum(a * a for a in digits), []).append(value + 1)
            for bucket in spheres.values():
                if len(bucket) > len(best):
                    best = bucket
    result = sorted(best)
    assert count_3aps_integers(result) == 0, "construction produced a 3AP"
    return result


def greedy_3ap_free(limit: int) -> list[int]:
    """Lexicographically greedy 3AP-free subset of [0, limit].

    Equals the integers with only digits 0 and 1 in base 3 (the greedy rule
    is implemented directly; the digit characterization is a test oracle).
    """
    if limit < 0:
        raise InvalidArgumentError(f"limit must be >= 0, got {limit}")
    member = np.zeros(limit + 1, dtype=bool)
    out: list[int] = []
    for n in range(limit + 1):
        d = np.arange(1, n // 2 + 1)
        if d.size and bool(np.any(member[n - d] & member[n - 2 * d])):
            continue
        member[n] = True
        out.append(n)
    return out


def _common_modulus(f, g, h) -> int:
    if not (f.modulus == g.modulus == h.modulus):
        raise InvalidArgumentError(
            f"moduli differ: {f.modulus}, {g.modulus}, {h.modulus}"
        )
    return f.modulus


def _all_indicator(*functions) -> bool:
    return all(
        np.all((fn.values == 0.0) | (fn.values == 1.0)) for fn in functions
    )


def _pair_count(lam: float, p: int) -> int:
    scaled = lam * p * p
    rounded = round(scaled)
    assert math.isclose(scaled, rounded, abs_tol=1e-6), (
        "indicator lambda should be an integer multiple of 1/P^2"
    )
    return int(rounded)
