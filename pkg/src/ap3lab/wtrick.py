"""Small-prime sieving of a prime set: product modulus W, densest coprime
residue class, lift to [1, P], and the rescaled indicator function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cyclic import CyclicFunction
from .errors import (
    DegenerateParametersError,
    EmptySelectionError,
    InvalidArgumentError,
    PreconditionError,
    ResourceLimitError,
)
from .primes import PrimeTable, is_prime, next_prime_above, prime_count, sieve_primes


@dataclass
class WTrickParams:
    """Outcome of parameter selection for a given N."""

    z: float
    w: int
    phi_w: int
    p: int
    # diagnostic flags, reported not asserted: they hold only for large N
    log_w_in_band: bool  # (4/5) z <= ln W <= (4/3) z
    ratio_in_band: bool  # ln z <= W/phi(W) <= 2 ln z


@dataclass
class WTrickContext:
    """Everything the downstream pipeline needs about one sieving run.

    a0 is filled by build_sieved_function; the context is treated as
    immutable afterwards.
    """

    n: int
    z: float
    w: int
    phi_w: int
    b: int
    p: int
    scale: float  # ln N / ln z
    a0: np.ndarray | None = field(default=None, repr=False)


@dataclass
class SievedFunction:
    """The rescaled indicator of the lifted set, plus its headline stats."""

    function: CyclicFunction
    alpha: float  # |A| / pi(N)
    l1_norm: float  # scale * |A0| / P
    mass_ok: bool  # l1_norm >= alpha / 10 (reported; asserted only for dense A)


def compute_parameters(n: int, z_override: float | None = None) -> WTrickParams:
    """Pick z, the product modulus W = prod_{p<=z} p, phi(W), and the least
    prime P > 3N/W.

    Default z is ln(N)/4. The two asymptotic bands on ln W and W/phi(W) are
    evaluated and reported as flags.
    """
    if n < 100:
        raise InvalidArgumentError(f"need N >= 100, got {n}")
    if n > 1 << 50:
        raise ResourceLimitError(
            f"N = {n} exceeds the 2**50 domain cap (3N/W and P must fit in 64 bits)"
        )
    if z_override is not None:
        if not 2 <= z_override <= math.log(n):
            raise InvalidArgumentError(
                f"z override {z_override} outside [2, ln N = {math.log(n):.4f}]"
            )
        z = float(z_override)
    else:
        z = 0.25 * math.log(n)

    # W always contains the prime 2: the empty product would leave no
    # nontrivial residue class at all (N >= 100 keeps z > 1 regardless).
    w = 2
    phi_w = 1
    p_val = 3
    while p_val <= z:
        w *= p_val
        phi_w *= p_val - 1
        p_val = next_prime_above(p_val)
    if w >= n:
        raise DegenerateParametersError(
            f"W = {w} >= N = {n}; z = {z} is too large for this N"
        )

    p = next_prime_above(3 * n // w)
    assert 3 * n / w < p <= 6 * n / w, "P must land in (3N/W, 6N/W]"

    log_w = math.log(w)
    ratio = w / phi_w
    return WTrickParams(
        z=z,
        w=w,
        phi_w=phi_w,
        p=p,
        log_w_in_band=0.8 * z <= log_w <= (4.0 / 3.0) * z,
        ratio_in_band=math.log(z) <= ratio <= 2 * math.log(z),
    )


def choose_residue(members, w: int) -> int:
    """Densest residue class: the b coprime to W maximizing
    |{m in A : m = b mod W, m > W}|, smallest b on ties.

    Realizes the averaging bound count >= (|A| - pi(W)) / phi(W)
    constructively (elements <= W are dropped, as the small primes would
    pollute the lift).
    """
    members = np.asarray(list(members), dtype=np.int64)
    if members.size == 0:
        raise EmptySelectionError("input set is empty")
    big = members[members > w]
    counts = np.bincount((big % w).astype(np.int64), minlength=w)
    best_b = -1
    best_count = 0
    for b in range(1, w):
        if math.gcd(b, w) != 1:
            continue
        if int(counts[b]) > best_count:
            best_b, best_count = b, int(counts[b])
    if best_b < 0:
        raise EmptySelectionError(
            f"every residue class coprime to W={w} is empty above W"
        )
    return best_b


def build_sieved_function(
    members,
    ctx: WTrickContext,
    prime_table: PrimeTable | None = None,
) -> SievedFunction:
    """Lift the chosen class to A0 = {(m-b)/W} and build a = scale * 1_{A0}
    on Z/PZ.

    Every lifted element must be prime (the input is supposed to be a prime
    subset); support lands in [1, P/3] because P > 3N/W.
    """
    members = np.asarray(sorted(set(int(m) for m in members)), dtype=np.int64)
    if members.size == 0:
        raise InvalidArgumentError("input set is empty")
    if members.max() > ctx.n:
        raise InvalidArgumentError(
            f"set contains {members.max()} > N = {ctx.n}"
        )

    in_class = members[(members % ctx.w == ctx.b % ctx.w) & (members > ctx.w)]
    if in_class.size == 0:
        raise PreconditionError(
            f"no elements of the set lie in class {ctx.b} mod {ctx.w} above W"
        )
    table_covers = prime_table is not None and prime_table.limit >= ctx.n
    for m in in_class:
        prime = (
            prime_table.is_prime(int(m)) if table_covers else is_prime(int(m))
        )
        if not prime:
            raise InvalidArgumentError(
                f"element {int(m)} of the chosen class is not prime"
            )

    a0 = (in_class - ctx.b) // ctx.w
    assert int(a0.max()) * 3 <= ctx.p, "support must stay inside [0, P/3]"
    ctx.a0 = a0

    values = np.zeros(ctx.p)
    values[a0] = ctx.scale
    function = CyclicFunction(ctx.p, values, validate_modulus=False)

    if prime_table is None or prime_table.limit < ctx.n:
        prime_table = sieve_primes(ctx.n)
    alpha = members.size / prime_count(prime_table, ctx.n)
    l1_norm = ctx.scale * a0.size / ctx.p
    return SievedFunction(
        function=function,
        alpha=alpha,
        l1_norm=l1_norm,
        mass_ok=l1_norm >= alpha / 10,
    )


def build_context(
    members,
    n: int,
    z_override: float | None = None,
) -> tuple[WTrickContext, WTrickParams]:
    """Parameter selection plus residue choice, bundled into a context."""
    params = compute_parameters(n, z_override)
    b = choose_residue(members, params.w)
    scale = math.log(n) / math.log(params.z)
    ctx = WTrickContext(
        n=n,
        z=params.z,
        w=params.w,
        phi_w=params.phi_w,
        b=b,
        p=params.p,
        scale=scale,
    )
    return ctx, params
