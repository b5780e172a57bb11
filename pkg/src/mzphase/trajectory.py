"""Photon-by-photon interferometer simulation with feedback policies.

The measurement detects the N input photons one at a time; before each
detection the controllable phase in the reference arm is set by a
policy (sharpness-maximizing adaptive feedback, a fixed-increment
nonadaptive ramp, or a constant).  The unnormalized conditioned state
after m detections is carried as amplitudes over (photons remaining in
mode a) x (half-angle harmonics of the unknown phase), so record
probabilities, posteriors, and estimates are exact Fourier-coefficient
reads.

Detection u at controllable phase F applies the output-mode operator

    c_u = a sin((phi - F + u pi)/2) + b cos((phi - F + u pi)/2)

followed by the deterministic renormalization 1/sqrt(N + 1 - m), under
which the squared norm of the conditioned state is exactly the record
likelihood P(record | phi).

Ensemble drivers evaluate the phase variance two ways: Monte Carlo over
sampled records (each trajectory owns a private, precomputed uniform
stream, so results do not depend on execution order or thread count)
and exact enumeration of all 2^N records weighted by their likelihood,
averaged over a uniform grid of initial phases.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numba
import numpy as np

from . import _kernels, su2
from .circular import TWO_PI, TrigPolynomial, ensemble_resultant_variance, reduce_phase
from .errors import NumericalDegeneracyError
from .states import JY, TwoModeState

__all__ = [
    "ConditionedState",
    "MeasurementRecord",
    "FeedbackPolicy",
    "VarianceReport",
    "EnumerationResult",
    "initial_state",
    "apply_detection",
    "amplitudes_at",
    "record_distribution",
    "detection_probability",
    "posterior",
    "maximand_coefficients",
    "adaptive_phase",
    "nonadaptive_phase",
    "final_estimate",
    "simulate_trajectory",
    "monte_carlo_variance",
    "exact_variance_enumeration",
]

ADAPTIVE = "adaptive"
NONADAPTIVE = "nonadaptive"
FIXED = "fixed"

MOD_2PI = "mod2pi"
MOD_PI = "modpi"

_POLICY_CODES = {ADAPTIVE: 0, NONADAPTIVE: 1, FIXED: 2}
_MODE_CODES = {MOD_2PI: 1, MOD_PI: 2}

ENUMERATION_PHOTON_CAP = 24


@dataclass(frozen=True)
class ConditionedState:
    """Unnormalized state after ``detections`` of ``total_photons`` photons.

    ``amps[k, i]`` multiplies the Fock state with k photons left in
    mode a and the phase harmonic exp(i p phi / 2), p = 2 i - m.  Its
    squared norm as a function of phi is the likelihood of the record
    that produced it.
    """

    total_photons: int
    detections: int
    amps: np.ndarray

    def __post_init__(self):
        m = self.detections
        n = self.remaining
        if m < 0 or n < 0:
            raise ValueError("detections must lie in [0, total_photons]")
        a = np.asarray(self.amps, dtype=np.complex128).copy()
        if a.shape != (n + 1, m + 1):
            raise ValueError(f"amplitudes must have shape {(n + 1, m + 1)}, got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @property
    def remaining(self) -> int:
        return self.total_photons - self.detections


@dataclass(frozen=True)
class MeasurementRecord:
    """One complete run: detection bits, feedback phases, final estimate.

    ``estimate`` is None when the record's posterior moment vanishes at
    the requested periodicity, leaving the posterior mean undefined
    (possible for symmetric records under fixed or ramped feedback).
    """

    bits: tuple
    phases: tuple
    estimate: float | None = None

    def __post_init__(self):
        if len(self.bits) != len(self.phases):
            raise ValueError("bits and phases must have equal length")


@dataclass(frozen=True)
class FeedbackPolicy:
    """Rule for choosing the controllable phase before each detection.

    variant 'adaptive' maximizes the probability-weighted posterior
    sharpness; 'nonadaptive' ramps by pi/N per detection from a random
    offset; 'fixed' holds ``fixed_phase``.  ``estimation`` selects the
    posterior moment used for feedback and the final estimate: mod2pi
    reads exp(i phi), modpi reads exp(2 i phi) for pi-periodic inputs.
    """

    variant: str
    estimation: str = MOD_2PI
    fixed_phase: float = 0.0

    def __post_init__(self):
        if self.variant not in _POLICY_CODES:
            raise ValueError(f"unknown policy variant {self.variant!r}")
        if self.estimation not in _MODE_CODES:
            raise ValueError(f"unknown estimation mode {self.estimation!r}")

    @classmethod
    def adaptive(cls, estimation: str = MOD_2PI) -> "FeedbackPolicy":
        return cls(ADAPTIVE, estimation)

    @classmethod
    def nonadaptive(cls, estimation: str = MOD_2PI) -> "FeedbackPolicy":
        return cls(NONADAPTIVE, estimation)

    @classmethod
    def fixed(cls, phase: float, estimation: str = MOD_2PI) -> "FeedbackPolicy":
        return cls(FIXED, estimation, float(reduce_phase(phase)))


@dataclass(frozen=True)
class VarianceReport:
    """Monte Carlo phase-variance estimate with its provenance.

    ``degenerate`` counts trajectories whose estimate was undefined;
    they enter the ensemble as zero-length direction vectors, which can
    only enlarge the reported variance.
    """

    photons: int
    trials: int
    sharpness: float
    variance: float
    std_error: float
    policy: str
    estimation: str
    seed: int
    degenerate: int = 0


@dataclass(frozen=True)
class EnumerationResult:
    """Exact record-ensemble variance, averaged over the initial-phase grid.

    ``degenerate_weight`` is the average probability mass of records
    with undefined estimates (zero contribution to the resultant).
    """

    photons: int
    variance: float
    sharpness: float
    grid_size: int
    policy: str
    estimation: str
    record_probability_totals: np.ndarray
    degenerate_weight: float = 0.0


def _configure_threads() -> None:
    raw = os.environ.get("MZPHASE_THREADS")
    if not raw:
        return
    n = int(raw)
    numba.set_num_threads(min(max(1, n), numba.config.NUMBA_NUM_THREADS))


def _jz_amplitudes(state: TwoModeState) -> np.ndarray:
    if state.basis == JY:
        return su2.y_to_z(state).amps
    return state.amps


def initial_state(state: TwoModeState) -> ConditionedState:
    """Conditioned state before any detection (J_z amplitudes, p = 0)."""
    amps = _jz_amplitudes(state)
    return ConditionedState(state.two_j, 0, amps.reshape(-1, 1))


def apply_detection(s: ConditionedState, u: int, phase: float) -> ConditionedState:
    """Detect one photon in output mode u with controllable phase set.

    Applies the output-mode operator in half-angle harmonic form and the
    1/sqrt(N + 1 - m) renormalization; mode-a annihilation shifts k down
    with weight sqrt(k), mode-b leaves k with weight sqrt(n - k), and the
    harmonic set grows one step, flipping parity.
    """
    if u not in (0, 1):
        raise ValueError("detection result must be 0 or 1")
    n = s.remaining
    if n <= 0:
        raise ValueError("all photons are already detected")
    m = s.detections
    a = s.amps
    zu = 1.0 + 0.0j if u == 0 else 1.0j
    cp = zu * np.exp(-0.5j * phase) / (2.0 * math.sqrt(n))
    cq = np.conj(cp)
    k = np.arange(n + 1, dtype=np.float64)
    wb = np.sqrt(n - k)[:, None]
    wa = np.sqrt(k)[:, None]
    out = np.zeros((n, m + 2), dtype=np.complex128)
    out[:, 1:] += cp * (wb * a)[:n]
    out[:, 1:] += (-1j * cp) * (wa * a)[1:]
    out[:, :-1] += cq * (wb * a)[:n]
    out[:, :-1] += (1j * cq) * (wa * a)[1:]
    return ConditionedState(s.total_photons, m + 1, out)


def amplitudes_at(s: ConditionedState, phi: float) -> np.ndarray:
    """Mode-a amplitude vector of the conditioned state at one phase."""
    m = s.detections
    p = 2.0 * np.arange(m + 1) - m
    return s.amps @ np.exp(0.5j * p * phi)


def record_distribution(s: ConditionedState) -> TrigPolynomial:
    """Record likelihood P(record | phi) as a trigonometric polynomial.

    Half-angle harmonics cancel pairwise, leaving integer harmonics of
    degree at most the detection count.  This is a likelihood, not a
    normalized density; see :func:`posterior`.
    """
    a = s.amps
    m = s.detections
    coeffs = np.zeros(2 * m + 1, dtype=np.complex128)
    for r in range(m + 1):
        g = np.sum(a[:, r:] * np.conj(a[:, : m + 1 - r]))
        coeffs[m + r] = g
        coeffs[m - r] = np.conj(g)
    return TrigPolynomial(coeffs)


def detection_probability(s: ConditionedState, u: int, phase: float, phi_true: float) -> float:
    """Probability of result u at the next detection, given the record.

    Ratio of the squared norms of the post- and pre-detection states
    evaluated at the true phase.
    """
    if u not in (0, 1):
        raise ValueError("detection result must be 0 or 1")
    n = s.remaining
    if n <= 0:
        raise ValueError("all photons are already detected")
    v = amplitudes_at(s, phi_true)
    norm2 = float(np.sum(np.abs(v) ** 2))
    if norm2 == 0.0:
        raise NumericalDegeneracyError("conditioned state has zero norm at phi_true")
    half = 0.5 * (phi_true - phase + u * math.pi)
    k = np.arange(n, dtype=np.float64)
    child = (
        math.cos(half) * np.sqrt(n - k) * v[:n] + math.sin(half) * np.sqrt(k + 1.0) * v[1:]
    ) / math.sqrt(n)
    p = float(np.sum(np.abs(child) ** 2)) / norm2
    return min(max(p, 0.0), 1.0)


def posterior(s: ConditionedState) -> TrigPolynomial:
    """Posterior phase distribution under a flat prior.

    The record likelihood normalized so c_0 = 1/(2*pi).
    """
    f = record_distribution(s)
    g0 = f.coeff(0).real
    if g0 <= 0.0:
        raise NumericalDegeneracyError("record has zero probability mass")
    return TrigPolynomial(f.coeffs / (TWO_PI * g0))


def _tilde_moments(a: np.ndarray, n: int, m: int, r: int):
    """Coefficient-space moments (q, z, x) at harmonic shift r."""
    if r > m:
        return 0.0j, 0.0j, 0.0j
    lead = a[:, : m + 1 - r]
    lag = a[:, r:]
    q = np.sum(lead * np.conj(lag))
    wz = (np.arange(n + 1) - n / 2.0)[:, None]
    z = np.sum(wz * lead * np.conj(lag))
    k = np.arange(n, dtype=np.float64)
    sk = np.sqrt((k + 1.0) * (n - k))[:, None]
    x = 0.5 * np.sum(sk * (lead[:n] * np.conj(lag[1:]) + lead[1:] * np.conj(lag[:n])))
    return complex(q), complex(z), complex(x)


def maximand_coefficients(s: ConditionedState, estimation: str = MOD_2PI):
    """Closed-form coefficients (A_u, B_u, C_u) of the feedback maximand.

    For each prospective result u, the probability-weighted sharpness
    of the post-detection posterior has modulus
    |A_u + B_u exp(i F) + C_u exp(-i F)| as a function of the
    controllable phase F; the adaptive rule maximizes their sum.
    Scaling matches the moment integral of the unnormalized
    post-detection state, so quadrature checks compare directly.
    """
    r = _MODE_CODES[_check_mode(estimation)]
    n = s.remaining
    if n <= 0:
        raise ValueError("all photons are already detected")
    m = s.detections
    a = s.amps
    q, _, _ = _tilde_moments(a, n, m, r)
    _, zlo, xlo = _tilde_moments(a, n, m, r - 1)
    _, zhi, xhi = _tilde_moments(a, n, m, r + 1)
    a_term = math.pi * q
    b0 = -math.pi * (zlo - 1j * xlo) / n
    c0 = -math.pi * (zhi + 1j * xhi) / n
    return ((a_term, b0, c0), (a_term, -b0, -c0))


def _check_mode(estimation: str) -> str:
    if estimation not in _MODE_CODES:
        raise ValueError(f"unknown estimation mode {estimation!r}")
    return estimation


def adaptive_phase(s: ConditionedState, estimation: str = MOD_2PI, flat_draw: float | None = None) -> float:
    """Controllable phase maximizing expected posterior sharpness.

    Dense-grid scan plus local refinement of the exact maximand
    coefficients.  The maximand is pi-periodic (a shift by pi relabels
    the detectors), and ties resolve to the smallest phase, so results
    lie in [0, pi).  When the maximand carries no phase dependence
    (always true before the first detection, where the flat prior makes
    every choice equivalent), returns ``flat_draw`` when supplied,
    else 0.0.
    """
    (a0, b0, c0), _ = maximand_coefficients(s, estimation)
    t = a0 * s.remaining / (2.0 * math.pi)
    u = b0 * s.remaining / (2.0 * math.pi)
    w = c0 * s.remaining / (2.0 * math.pi)
    phi = _kernels.best_phase(t.real, t.imag, u.real, u.imag, w.real, w.imag)
    if phi < 0.0:
        if flat_draw is not None:
            return float(reduce_phase(flat_draw))
        return 0.0
    return float(phi)


def nonadaptive_phase(m: int, phi0: float, photons: int) -> float:
    """Ramped phase phi0 + m*pi/N before the m-th detection, reduced."""
    if not 1 <= m <= photons:
        raise ValueError("detection index must lie in [1, photons]")
    return float(reduce_phase(phi0 + m * math.pi / photons))


def final_estimate(s: ConditionedState, estimation: str = MOD_2PI) -> float:
    """Posterior-mean phase estimate from the complete record.

    mod2pi: the argument of the first posterior moment; modpi: half the
    argument of the second moment, in [0, pi).  Raises when the moment
    vanishes (estimate undefined at this periodicity).
    """
    _check_mode(estimation)
    if s.detections != s.total_photons:
        raise ValueError("final estimate requires the complete record")
    r = _MODE_CODES[estimation]
    a = s.amps
    m = s.detections
    if r > m:
        raise NumericalDegeneracyError("record too short for the requested moment")
    q = complex(np.sum(a[:, : m + 1 - r] * np.conj(a[:, r:])))
    g0 = float(np.sum(np.abs(a) ** 2))
    if abs(q) <= _kernels.DEGENERATE_MOMENT * g0:
        raise NumericalDegeneracyError(
            "posterior moment vanishes; no estimate at this periodicity"
        )
    est = math.atan2(q.imag, q.real) % TWO_PI
    if r == 2:
        est *= 0.5
    return est


def _ensemble_buffers(n: int):
    size, width = n + 3, n + 2
    return (
        np.zeros((size, width)), np.zeros((size, width)),
        np.zeros((size, width)), np.zeros((size, width)),
        np.zeros(width), np.zeros(width), np.zeros(width), np.zeros(width),
        np.sqrt(np.arange(width, dtype=np.float64)), np.zeros(width),
    )


def simulate_trajectory(
    state: TwoModeState,
    policy: FeedbackPolicy,
    phi_true: float = 0.0,
    rng: np.random.Generator | None = None,
) -> MeasurementRecord:
    """Sample one complete detection record and its final estimate.

    Detections are sampled from the exact conditional probabilities at
    ``phi_true``.  The trajectory consumes exactly N + 1 uniforms from
    ``rng`` (initial-phase draw plus one per detection), so a seeded
    generator replays an identical record.
    """
    if rng is None:
        rng = np.random.default_rng()
    amps = _jz_amplitudes(state)
    n = state.two_j
    urow = rng.random(n + 1)
    bits = np.zeros(n, np.int8)
    phases = np.zeros(n)
    est, status = _kernels.run_one(
        np.ascontiguousarray(amps.real), np.ascontiguousarray(amps.imag),
        n, _POLICY_CODES[policy.variant], policy.fixed_phase,
        _MODE_CODES[policy.estimation], float(phi_true), urow,
        *_ensemble_buffers(n), bits, phases,
    )
    if status != 0:
        raise NumericalDegeneracyError(
            "final posterior moment vanishes; use the mod-pi estimation mode "
            "for pi-periodic inputs"
        )
    return MeasurementRecord(tuple(int(b) for b in bits), tuple(map(float, phases)), float(est))


def monte_carlo_variance(
    state: TwoModeState,
    policy: FeedbackPolicy,
    trials: int,
    seed: int,
    phi_true: float = 0.0,
) -> VarianceReport:
    """Phase variance of the policy over independent sampled records.

    Runs ``trials`` trajectories at the true phase (zero by default,
    which loses no generality because the initial phase is randomized),
    and aggregates the final estimates with the inverse-square-resultant
    ensemble estimator; mod-pi estimation aggregates the doubled angles
    and divides by four.  Trajectory t reads row t of a uniform matrix
    drawn once from ``seed``, so the result is independent of execution
    order and thread count.
    """
    if trials < 1:
        raise ValueError("at least one trial is required")
    _configure_threads()
    amps = _jz_amplitudes(state)
    n = state.two_j
    uniforms = np.random.default_rng(seed).random((trials, n + 1))
    est = np.zeros(trials)
    status = np.zeros(trials, np.int8)
    _kernels.run_ensemble(
        np.ascontiguousarray(amps.real), np.ascontiguousarray(amps.imag),
        n, _POLICY_CODES[policy.variant], policy.fixed_phase,
        _MODE_CODES[policy.estimation], float(phi_true), uniforms, est, status,
    )
    bad = int(np.sum(status != 0))
    if bad:
        raise NumericalDegeneracyError(
            f"{bad} of {trials} records had vanishing posterior moments; "
            "use the mod-pi estimation mode for pi-periodic inputs"
        )
    if policy.estimation == MOD_PI:
        doubled = ensemble_holevo_variance(2.0 * est)
        variance = doubled.variance / 4.0
        std_error = doubled.std_error / 4.0
        sharp = doubled.sharpness
    else:
        single = ensemble_holevo_variance(est)
        variance, std_error, sharp = single.variance, single.std_error, single.sharpness
    return VarianceReport(
        photons=n, trials=int(trials), sharpness=sharp, variance=variance,
        std_error=std_error, policy=policy.variant, estimation=policy.estimation,
        seed=int(seed),
    )


def exact_variance_enumeration(
    state: TwoModeState,
    policy: FeedbackPolicy,
    grid_size: int = 64,
    phi_true: float = 0.0,
    photon_cap: int = ENUMERATION_PHOTON_CAP,
) -> EnumerationResult:
    """Exact ensemble variance by summing over all 2^N detection records.

    Each record is weighted by its likelihood at the true phase; the
    random initial phase (or nonadaptive offset) is averaged over a
    uniform grid, making the scheme phase-covariant.  Cost grows as
    2^N, so the photon number is capped.
    """
    n = state.two_j
    if n > photon_cap:
        raise ValueError(f"enumeration over 2^{n} records exceeds the cap N <= {photon_cap}")
    if grid_size < 1:
        raise ValueError("grid size must be >= 1")
    k = 1 if policy.variant == FIXED else int(grid_size)
    _configure_threads()
    amps = _jz_amplitudes(state)
    e_re = np.zeros(k)
    e_im = np.zeros(k)
    prob_tot = np.zeros(k)
    degen = np.zeros(k, np.int64)
    _kernels.run_enumeration(
        np.ascontiguousarray(amps.real), np.ascontiguousarray(amps.imag),
        n, _POLICY_CODES[policy.variant], policy.fixed_phase,
        _MODE_CODES[policy.estimation], k, float(phi_true),
        e_re, e_im, prob_tot, degen,
    )
    if int(degen.sum()) > 0:
        raise NumericalDegeneracyError(
            f"{int(degen.sum())} records had vanishing posterior moments; "
            "use the mod-pi estimation mode for pi-periodic inputs"
        )
    resultant = complex(e_re.mean(), e_im.mean())
    r_abs = abs(resultant)
    if r_abs == 0.0:
        variance = math.inf
    else:
        variance = max(1.0 / (r_abs * r_abs) - 1.0, 0.0)
        if policy.estimation == MOD_PI:
            variance /= 4.0
    return EnumerationResult(
        photons=n, variance=variance, sharpness=r_abs, grid_size=k,
        policy=policy.variant, estimation=policy.estimation,
        record_probability_totals=prob_tot,
    )
