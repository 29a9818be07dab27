"""Real-valued functions on Z/PZ (P prime) with normalized Fourier analysis.

Conventions, fixed once to avoid sign drift:

  forward:  coeff[t] = (1/P) * sum_x f(x) * exp(+2*pi*i*x*t/P)
  inverse:  f(x)     =         sum_t coeff[t] * exp(-2*pi*i*x*t/P)

so the transform is an average (coeff[0] is the mean) and convolution
(f*g)(x) = (1/P) sum_y f(y) g(x-y) diagonalizes as coeff(f*g) = coeff(f)*coeff(g).
"""

from __future__ import annotations

import struct
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError
from .primes import is_prime

# Below this modulus the O(P^2) direct sum beats chirp setup; it also serves
# as the always-available oracle path.
DIRECT_TRANSFORM_CUTOFF = 64

_FUNCTION_MAGIC = b"ZPFN"
_SPECTRUM_MAGIC = b"ZPSP"
_FORMAT_VERSION = 1


class CyclicFunction:
    """Dense real function on Z/PZ. Index i holds the value at residue i;
    a value "at -x" therefore lives at index P - x.

    Immutable; the spectrum is memoized on first use.
    """

    __slots__ = ("modulus", "values", "_spectrum")

    def __init__(self, modulus: int, values, validate_modulus: bool = True):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.shape != (modulus,):
            raise InvalidArgumentError(
                f"expected {modulus} values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("function values must be finite")
        if validate_modulus and not is_prime(modulus):
            raise InvalidArgumentError(f"modulus {modulus} is not prime")
        values.setflags(write=False)
        self.modulus = modulus
        self.values = values
        self._spectrum = None

    @classmethod
    def constant(cls, modulus: int, value: float) -> "CyclicFunction":
        return cls(modulus, np.full(modulus, float(value)))

    @classmethod
    def indicator(cls, modulus: int, support, scale: float = 1.0) -> "CyclicFunction":
        values = np.zeros(modulus)
        idx = np.asarray(list(support), dtype=np.int64) % modulus
        values[idx] = scale
        return cls(modulus, values)

    def spectrum(self) -> "Spectrum":
        if self._spectrum is None:
            self._spectrum = forward_transform(self)
        return self._spectrum

    def mean(self) -> float:
        return float(np.mean(self.values))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


class Spectrum:
    """Fourier coefficients of a function on Z/PZ; coefficient t at index t."""

    __slots__ = ("modulus", "coefficients")

    def __init__(self, modulus: int, coefficients, validate_modulus: bool = True):
        coefficients = np.ascontiguousarray(coefficients, dtype=np.complex128)
        if coefficients.shape != (modulus,):
            raise InvalidArgumentError(
                f"expected {modulus} coefficients, got shape {coefficients.shape}"
            )
        if validate_modulus and not is_prime(modulus):
            raise InvalidArgumentError(f"modulus {modulus} is not prime")
        coefficients.setflags(write=False)
        self.modulus = modulus
        self.coefficients = coefficients


# ----------------------------------------------------------------------
# transforms
# ----------------------------------------------------------------------

def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


@lru_cache(maxsize=16)
def _chirp_tables(p: int, sign: int):
    """Chirp c[n] = exp(sign*pi*i*n^2/p) and the FFT of its reflected conjugate.

    n^2 is reduced mod 2p in exact integers before any float conversion,
    which keeps the phase accurate for p in the millions.
    """
    n = np.arange(p, dtype=np.int64)
    idx = (n * n) % (2 * p)
    chirp = np.exp(sign * 1j * np.pi * idx / p)
    length = _next_pow2(2 * p - 1)
    kernel = np.zeros(length, dtype=np.complex128)
    kernel[:p] = np.conj(chirp)
    kernel[length - p + 1 :] = np.conj(chirp[p - 1 : 0 : -1])
    return chirp, np.fft.fft(kernel), length


def _dft(values: np.ndarray, sign: int) -> np.ndarray:
    """Unnormalized sum_n values[n] * exp(sign*2*pi*i*n*k/p) for k = 0..p-1."""
    p = values.shape[0]
    if p < DIRECT_TRANSFORM_CUTOFF:
        return _dft_direct(values, sign)
    chirp, kernel_fft, length = _chirp_tables(p, sign)
    padded = np.zeros(length, dtype=np.complex128)
    padded[:p] = values * chirp
    conv = np.fft.ifft(np.fft.fft(padded) * kernel_fft)
    return chirp * conv[:p]


def _dft_direct(values: np.ndarray, sign: int) -> np.ndarray:
    p = values.shape[0]
    n = np.arange(p, dtype=np.int64)
    table = np.exp(sign * 2j * np.pi * n / p)
    out = np.empty(p, dtype=np.complex128)
    for k in range(p):
        out[k] = np.dot(values, table[(n * k) % p])
    return out


def forward_transform(f: CyclicFunction) -> Spectrum:
    """Normalized transform: coeff[t] = mean_x f(x) exp(+2*pi*i*x*t/P)."""
    return Spectrum(f.modulus, _dft(f.values, +1) / f.modulus, validate_modulus=False)


def inverse_transform(s: Spectrum) -> CyclicFunction:
    """Recover f(x) = sum_t coeff[t] exp(-2*pi*i*x*t/P) as a real function.

    The spectrum must come from a real function (conjugate-symmetric); a
    large imaginary residual is rejected rather than silently dropped.
    """
    complex_values = _dft(np.asarray(s.coefficients, dtype=np.complex128), -1)
    scale = float(np.max(np.abs(complex_values))) or 1.0
    imag_residual = float(np.max(np.abs(complex_values.imag)))
    if imag_residual > 1e-6 * scale:
        raise InvalidArgumentError(
            "spectrum is not conjugate-symmetric: inverse is not a real function"
        )
    return CyclicFunction(s.modulus, complex_values.real, validate_modulus=False)


def convolve(f: CyclicFunction, g: CyclicFunction) -> CyclicFunction:
    """(f*g)(x) = (1/P) sum_y f(y) g(x-y), computed spectrally."""
    if f.modulus != g.modulus:
        raise InvalidArgumentError(
            f"modulus mismatch: {f.modulus} vs {g.modulus}"
        )
    product = f.spectrum().coefficients * g.spectrum().coefficients
    return inverse_transform(Spectrum(f.modulus, product, validate_modulus=False))


# ----------------------------------------------------------------------
# norms and the large spectrum
# ----------------------------------------------------------------------

def lp_norm(f: CyclicFunction, k: float) -> float:
    """Normalized L^k norm (mean_x |f(x)|^k)^(1/k)."""
    if k < 1:
        raise InvalidArgumentError(f"norm exponent must be >= 1, got {k}")
    return float(np.mean(np.abs(f.values) ** k) ** (1.0 / k))


def spectral_lp_norm(s: Spectrum, k: float) -> float:
    """Unnormalized little-ell^k norm (sum_t |coeff[t]|^k)^(1/k)."""
    if k < 1:
        raise InvalidArgumentError(f"norm exponent must be >= 1, got {k}")
    return float(np.sum(np.abs(s.coefficients) ** k) ** (1.0 / k))


def threshold_spectrum(s: Spectrum, delta: float) -> np.ndarray:
    """Frequencies t with |coeff[t]| >= delta, with 1 always adjoined.

    The raw threshold set obeys the Markov count
    |{t : |coeff| >= delta}| <= sum |coeff|^4 / delta^4, asserted here.
    """
    if delta <= 0:
        raise InvalidArgumentError(f"delta must be positive, got {delta}")
    magnitudes = np.abs(s.coefficients)
    raw = np.flatnonzero(magnitudes >= delta)
    fourth_moment = float(np.sum(magnitudes**4))
    assert raw.size * delta**4 <= fourth_moment or raw.size == 0, (
        "Markov bound on the large spectrum failed; transform is inconsistent"
    )
    return np.union1d(raw, np.array([1], dtype=np.int64)).astype(np.int64)


# ----------------------------------------------------------------------
# binary serialization
# ----------------------------------------------------------------------

def save_function(f: CyclicFunction, path) -> None:
    """Write magic ZPFN, u32 version, u64 P, then P little-endian float64."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sIQ", _FUNCTION_MAGIC, _FORMAT_VERSION, f.modulus))
        fh.write(f.values.astype("<f8").tobytes())


def load_function(path) -> CyclicFunction:
    with open(path, "rb") as fh:
        magic, version, modulus = struct.unpack("<4sIQ", fh.read(16))
        if magic != _FUNCTION_MAGIC:
            raise InvalidArgumentError(f"bad magic {magic!r}, expected ZPFN")
        if version != _FORMAT_VERSION:
            raise InvalidArgumentError(f"unsupported format version {version}")
        data = np.frombuffer(fh.read(8 * modulus), dtype="<f8")
    return CyclicFunction(modulus, data.copy())


def save_spectrum(s: Spectrum, path) -> None:
    """Write magic ZPSP, u32 version, u64 P, then interleaved re/im float64."""
    interleaved = np.empty(2 * s.modulus, dtype="<f8")
    interleaved[0::2] = s.coefficients.real
    interleaved[1::2] = s.coefficients.imag
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sIQ", _SPECTRUM_MAGIC, _FORMAT_VERSION, s.modulus))
        fh.write(interleaved.tobytes())


def load_spectrum(path) -> Spectrum:
    with open(path, "rb") as fh:
        magic, version, modulus = struct.unpack("<4sIQ", fh.read(16))
        if magic != _SPECTRUM_MAGIC:
            raise InvalidArgumentError(f"bad magic {magic!r}, expected ZPSP")
        if version != _FORMAT_VERSION:
            raise InvalidArgumentError(f"unsupported format version {version}")
        data = np.frombuffer(fh.read(16 * modulus), dtype="<f8")
    return Spectrum(modulus, data[0::2] + 1j * data[1::2])
