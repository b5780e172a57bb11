"""Circular statistics on trigonometric polynomials.

Phase distributions are carried end-to-end as finite complex Fourier
series on [0, 2*pi).  Every dispersion measure used by the estimation
code (sharpness, inverse-square-sharpness variance, its mod-pi variant)
is an exact read of one or two Fourier coefficients, so no quadrature
error enters the main computation path; grids appear only in
diagnostics and plots.

Infinite dispersion (a uniform distribution, or a resultant vector of
length zero) is reported as ``math.inf`` rather than raised: it is a
legitimate value for a flat prior, not an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

__all__ = [
    "TWO_PI",
    "TrigPolynomial",
    "EnsembleEstimate",
    "reduce_phase",
    "moment",
    "mean_phase",
    "sharpness",
    "holevo_variance",
    "holevo_variance_mod_pi",
    "quadratic_variance",
    "evaluate",
    "rotated",
    "is_real_valued",
    "validate_distribution",
    "ensemble_holevo_variance",
    "ensemble_resultant_variance",
]


@dataclass(frozen=True)
class TrigPolynomial:
    """Finite Fourier series f(phi) = sum_{k=-K..K} c_k exp(i k phi).

    Parameters
    ----------
    coeffs : array_like
        Complex coefficients of odd length 2K + 1; c_k is stored at
        index k + K.

    Notes
    -----
    Instances are immutable; all operations return new values.  A
    real-valued f has Hermitian coefficients (c_{-k} = conj(c_k)), and a
    probability distribution additionally has c_0 = 1/(2*pi) and is
    nonnegative; see :func:`is_real_valued` and
    :func:`validate_distribution`.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 1 or c.size % 2 != 1:
            raise ValueError("coefficient array must be 1-d with odd length")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def max_harmonic(self) -> int:
        """Highest harmonic K carried by the series."""
        return (self.coeffs.size - 1) // 2

    def coeff(self, k: int) -> complex:
        """Coefficient c_k, zero outside the stored band."""
        K = self.max_harmonic
        if abs(k) > K:
            return 0.0 + 0.0j
        return complex(self.coeffs[k + K])

    @classmethod
    def uniform(cls) -> "TrigPolynomial":
        """The uniform probability distribution 1/(2*pi)."""
        return cls(np.array([1.0 / TWO_PI], dtype=np.complex128))


def reduce_phase(phi):
    """Map angles into the canonical range [0, 2*pi)."""
    return np.mod(phi, TWO_PI)


def moment(f: TrigPolynomial, n: int) -> complex:
    """Exact circular moment integral(f(phi) * exp(i n phi) dphi).

    Equals 2*pi*c_{-n}; zero whenever |n| exceeds the stored band.
    For a probability distribution this is the expectation of
    exp(i n phi).
    """
    return TWO_PI * f.coeff(-n)


def mean_phase(f: TrigPolynomial) -> float:
    """Direction of the first moment, in [0, 2*pi).

    Chosen so the sharpness is |<exp(i phi)>| with a nonnegative real
    projection.  Returns 0.0 for a uniform distribution, where the mean
    direction is undefined.
    """
    m = moment(f, 1)
    if m == 0:
        return 0.0
    return float(reduce_phase(math.atan2(m.imag, m.real)))


def sharpness(f: TrigPolynomial) -> float:
    """Modulus of the first circular moment, in [0, 1].

    1 for a point mass, 0 for the uniform distribution.
    """
    return abs(moment(f, 1))


def holevo_variance(f: TrigPolynomial) -> float:
    """Inverse-square-sharpness dispersion S^-2 - 1 of a distribution.

    The natural variance for a cyclic variable; agrees with the
    ordinary variance for well-localized distributions.  Returns
    ``math.inf`` when the sharpness vanishes (uniform distribution).
    """
    s = sharpness(f)
    if s == 0.0:
        return math.inf
    return max(1.0 / (s * s) - 1.0, 0.0)


def holevo_variance_mod_pi(f: TrigPolynomial) -> float:
    """Dispersion (|<exp(2 i phi)>|^-2 - 1) / 4 for pi-periodic phases.

    Used for states whose phase information repeats with period pi, for
    which the first moment vanishes identically.  Returns ``math.inf``
    when the second moment vanishes.
    """
    m2 = abs(moment(f, 2))
    if m2 == 0.0:
        return math.inf
    return max((1.0 / (m2 * m2) - 1.0) / 4.0, 0.0)


def quadratic_variance(f: TrigPolynomial) -> float:
    """Second-order dispersion integral(4 sin^2((phi - mean)/2) f dphi).

    Evaluates exactly to 2 - 2 S from the first moment.  For sharply
    peaked distributions it agrees with :func:`holevo_variance` to
    relative order of the variance itself.
    """
    return 2.0 - 2.0 * sharpness(f)


def evaluate(f: TrigPolynomial, phi) -> np.ndarray:
    """Evaluate the series on a grid of angles (complex result)."""
    phi = np.atleast_1d(np.asarray(phi, dtype=np.float64))
    K = f.max_harmonic
    ks = np.arange(-K, K + 1)
    return np.exp(1j * np.outer(phi, ks)) @ f.coeffs


def rotated(f: TrigPolynomial, delta: float) -> TrigPolynomial:
    """The series of f(phi - delta)."""
    K = f.max_harmonic
    ks = np.arange(-K, K + 1)
    return TrigPolynomial(f.coeffs * np.exp(-1j * ks * delta))


def is_real_valued(f: TrigPolynomial, tol: float = 1e-12) -> bool:
    """Whether the coefficients are Hermitian, c_{-k} = conj(c_k)."""
    return bool(np.max(np.abs(f.coeffs - np.conj(f.coeffs[::-1]))) <= tol)


def validate_distribution(
    f: TrigPolynomial,
    tol_c0: float = 1e-12,
    tol_negative: float = 1e-10,
    grid_size: int = 4096,
) -> None:
    """Check that f is a probability distribution on the circle.

    Requires Hermitian coefficients, c_0 = 1/(2*pi), and values above
    ``-tol_negative`` on a uniform grid.  Raises ``ValueError``
    otherwise.
    """
    if not is_real_valued(f, tol=tol_c0):
        raise ValueError("distribution coefficients are not Hermitian")
    if abs(f.coeff(0) - 1.0 / TWO_PI) > tol_c0:
        raise ValueError("distribution is not normalized: c_0 != 1/(2*pi)")
    grid = np.linspace(0.0, TWO_PI, grid_size, endpoint=False)
    values = evaluate(f, grid).real
    if values.min() < -tol_negative:
        raise ValueError(f"distribution is negative on the grid (min {values.min():.3e})")


@dataclass(frozen=True)
class EnsembleEstimate:
    """Dispersion of a finite sample of phases.

    ``variance`` is the inverse-square-resultant estimator
    -1 + |mean exp(i phi)|^-2; ``std_error`` is a batch-means standard
    error of that estimator (``math.inf`` when fewer than two batches
    are available or any batch has zero resultant).
    """

    variance: float
    std_error: float
    sharpness: float
    mean_phase: float
    n_samples: int


# Resultant lengths at or below rounding scale are exact cancellations.
_RESULTANT_FLOOR = 1e-12


def _resultant_variance(z: complex) -> float:
    r = abs(z)
    if r <= _RESULTANT_FLOOR:
        return math.inf
    return max(1.0 / (r * r) - 1.0, 0.0)


def ensemble_resultant_variance(vectors, n_batches: int = 100) -> EnsembleEstimate:
    """Dispersion estimate from direction vectors, one per sample.

    Vectors are normally unit length exp(i phi); a zero vector encodes
    a sample that carries no directional information (an undefined
    estimate), which deflates the resultant and so can only enlarge the
    variance estimate.
    """
    vec = np.asarray(vectors, dtype=np.complex128).ravel()
    m = vec.size
    if m < 1:
        raise ValueError("at least one sample is required")
    resultant = vec.mean()
    variance = _resultant_variance(resultant)

    b = min(n_batches, m)
    if b < 2:
        std_error = math.inf
    else:
        batch_vars = np.array(
            [_resultant_variance(chunk.mean()) for chunk in np.array_split(vec, b)]
        )
        if not np.all(np.isfinite(batch_vars)):
            std_error = math.inf
        else:
            std_error = float(np.std(batch_vars, ddof=1) / math.sqrt(b))

    return EnsembleEstimate(
        variance=variance,
        std_error=std_error,
        sharpness=float(abs(resultant)),
        mean_phase=float(reduce_phase(np.angle(resultant))) if abs(resultant) > 0 else 0.0,
        n_samples=int(m),
    )


def ensemble_holevo_variance(samples, n_batches: int = 100) -> EnsembleEstimate:
    """Estimate the cyclic variance of an ensemble of phase samples.

    Parameters
    ----------
    samples : array_like
        Phase angles in radians (reduced internally to [0, 2*pi)).
    n_batches : int
        Number of contiguous batches used for the batch-means standard
        error; capped at the sample count.

    Returns
    -------
    EnsembleEstimate
    """
    phases = reduce_phase(np.asarray(samples, dtype=np.float64).ravel())
    if phases.size < 1:
        raise ValueError("at least one sample is required")
    return ensemble_resultant_variance(np.exp(1j * phases), n_batches)
