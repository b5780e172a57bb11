"""Canonical (ideal) phase-measurement statistics for two-mode states.

The canonical measurement projects onto idealized phase states built
from the J_y eigenbasis; its outcome distribution for an input with
J_y amplitudes psi is

    P(phi) = (1/2pi) |sum_mu psi_mu exp(i mu phi)|^2,

an exact trigonometric polynomial whose k-th coefficient is the lag-k
autocorrelation of the amplitudes.  Variance sweeps read the one
Fourier moment they need directly from single rotation columns, so a
25 600-photon point costs O(N); the full distribution is only built on
request.
"""

from __future__ import annotations

import math

import numpy as np

from . import su2
from .circular import TWO_PI, TrigPolynomial
from .states import JY, JZ, TwoModeState, equal_split_state, one_port_state, optimal_state, yurke_state

__all__ = [
    "STATE_KINDS",
    "canonical_distribution",
    "min_holevo_variance",
    "canonical_moment",
    "canonical_sweep",
    "make_state",
]

STATE_KINDS = ("optimal", "one-port", "equal", "yurke")

_CONSTRUCTORS = {
    "optimal": optimal_state,
    "one-port": one_port_state,
    "equal": equal_split_state,
    "yurke": yurke_state,
}


def make_state(kind: str, photons: int) -> TwoModeState:
    """Construct one of the named input states."""
    try:
        ctor = _CONSTRUCTORS[kind]
    except KeyError:
        raise ValueError(f"unknown state kind {kind!r}; choose from {STATE_KINDS}")
    return ctor(photons)


def canonical_distribution(state: TwoModeState) -> TrigPolynomial:
    """Exact outcome distribution of the canonical phase measurement.

    Returns the trigonometric polynomial with coefficients
    c_k = (1/2pi) sum_mu psi_mu conj(psi_{mu-k}) of the J_y amplitudes;
    c_0 = 1/(2pi) exactly for a normalized input.  J_z-basis states are
    transformed first.
    """
    if state.basis == JY:
        psi = state.amps
    else:
        psi = su2.z_to_y(state).amps
    coeffs = np.correlate(psi, psi, mode="full") / TWO_PI
    return TrigPolynomial(coeffs)


def min_holevo_variance(photons: int) -> float:
    """Smallest canonical phase variance at fixed photon number N.

    Equals tan^2(pi / (N + 2)), attained by the sine-profile input of
    :func:`mzphase.states.optimal_state`.
    """
    if photons < 1:
        raise ValueError("photon number must be >= 1")
    return math.tan(math.pi / (photons + 2)) ** 2


def _moment_shift_abs(values: np.ndarray, k: int) -> float:
    if k >= values.size:
        return 0.0
    return float(abs(np.sum(values[k:] * np.conj(values[:-k]))))


def canonical_moment(kind: str, photons: int, k: int) -> float:
    """|<exp(i k phi)>| under the canonical distribution of a named state.

    Uses only the lag-k amplitude autocorrelation.  For the J_z-basis
    states this needs just the rotation column(s) carrying the state,
    so cost stays O(N) at any photon number.
    """
    if k < 1:
        raise ValueError("moment order must be >= 1")
    if kind == "optimal":
        psi = optimal_state(photons).amps
        return _moment_shift_abs(psi, k)
    if kind == "one-port":
        col = su2.rotation_column(photons, photons).values
        return _moment_shift_abs(col, k)
    if kind == "equal":
        equal_split_state(photons)  # validates parity
        col = su2.rotation_column(photons, 0).values
        return _moment_shift_abs(col, k)
    if kind == "yurke":
        yurke_state(photons)
        col0 = su2.rotation_column(photons, 0).values
        col1 = su2.rotation_column(photons, 2).values
        # J_y amplitudes are i^{-mu} (col0 + i col1)/sqrt(2) up to a
        # global phase; the constant i^{-k} drops inside the modulus.
        z = (col0 + 1j * col1) / math.sqrt(2.0)
        return _moment_shift_abs(z, k)
    raise ValueError(f"unknown state kind {kind!r}; choose from {STATE_KINDS}")


def _variance_from_moment(m: float, measure: str) -> float:
    if m <= 0.0:
        return math.inf
    if measure == "holevo":
        return max(1.0 / (m * m) - 1.0, 0.0)
    if measure == "modpi":
        return max((1.0 / (m * m) - 1.0) / 4.0, 0.0)
    raise ValueError(f"unknown measure {measure!r}; choose 'holevo' or 'modpi'")


def canonical_sweep(kind: str, photon_list, measure: str = "holevo"):
    """Exact canonical variance versus photon number.

    Returns a list of (N, variance) pairs ordered as given.  The
    'holevo' measure reads the first moment, 'modpi' the second.
    """
    k = 1 if measure == "holevo" else 2
    if measure not in ("holevo", "modpi"):
        raise ValueError(f"unknown measure {measure!r}; choose 'holevo' or 'modpi'")
    rows = []
    for n in photon_list:
        m = canonical_moment(kind, int(n), k)
        rows.append((int(n), _variance_from_moment(m, measure)))
    return rows
