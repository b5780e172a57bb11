"""SU(2) rotation-matrix numerics for the 50:50 interferometer.

Evaluates the real orthogonal matrix I^j(pi/2) whose element
I^j_{mu nu} couples the J_y and J_z eigenbases of the fixed-photon
sector, and the unitary basis change built from it,

    <j mu (J_y) | j nu (J_z)> = exp(i (pi/2)(nu - mu)) I^j_{mu nu}(pi/2).

Two evaluation routes are provided.  The direct route evaluates the
Jacobi-polynomial form with log-gamma prefactors (plain factorials
overflow beyond 2j of about 170).  Full columns switch to a three-term
recurrence in mu when the direct route would be too expensive or fails
its unitarity check; the recurrence is seeded at both boundary elements
and joined near the center, which stays stable up to 2j of tens of
thousands.

Indices are passed doubled (two_j = 2j, two_mu = 2*mu) so half-integer
spins are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import NumericalDegeneracyError
from .states import JY, JZ, TwoModeState

__all__ = [
    "SpinQuantum",
    "RotationColumn",
    "jacobi_at_zero",
    "matrix_element",
    "rotation_column",
    "rotation_matrix",
    "basis_change_matrix",
    "z_to_y",
    "y_to_z",
]

UNITARITY_TOL = 1e-8

# Upper bound on scalar Jacobi evaluations spent on one direct column
# before the O(j)-per-column recurrence route takes over.
_DIRECT_COLUMN_OPS = 5_000_000

# Full basis-change matrices above this size are refused (quadratic
# memory); sweeps use single columns instead.
_MATRIX_MAX_TWO_J = 4096


@dataclass(frozen=True)
class SpinQuantum:
    """Spin sector j = two_j / 2 of the fixed-photon-number problem."""

    two_j: int

    def __post_init__(self):
        if self.two_j < 0:
            raise ValueError("two_j must be nonnegative")

    @property
    def j(self) -> float:
        return self.two_j / 2.0

    @property
    def dim(self) -> int:
        return self.two_j + 1

    def two_mu(self, index: int) -> int:
        """Doubled magnetic number at array index (0 maps to mu = -j)."""
        if not 0 <= index <= self.two_j:
            raise ValueError("index outside the spin multiplet")
        return -self.two_j + 2 * index

    def index(self, two_mu: int) -> int:
        """Array index of a doubled magnetic number."""
        if abs(two_mu) > self.two_j or (two_mu - self.two_j) % 2 != 0:
            raise ValueError(f"two_mu={two_mu} not in the two_j={self.two_j} multiplet")
        return (two_mu + self.two_j) // 2


@dataclass(frozen=True)
class RotationColumn:
    """Column nu of I^j(pi/2): values[i] = I_{mu nu} with mu = -j + i.

    ``residual`` records the quality check that admitted the column
    (unitarity defect for the direct route, branch mismatch for the
    recurrence route).
    """

    two_j: int
    two_nu: int
    values: np.ndarray
    residual: float
    route: str

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def jacobi_at_zero(n: int, alpha: float, beta: float) -> float:
    """Jacobi polynomial P_n^{(alpha,beta)} evaluated at the origin.

    Computed by the three-term recurrence in the degree.  Parameters
    must satisfy alpha > -1 and beta > -1 (the validity region of the
    rotation-element formula after its symmetry reduction).
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if alpha <= -1.0 or beta <= -1.0:
        raise ValueError("parameters must exceed -1")
    v, c = _kernels.jacobi_zero_scaled(int(n), float(alpha), float(beta))
    if c == 0:
        return float(v)
    return float(v * (1e250 ** c))


def _check_indices(two_j: int, two_mu: int, two_nu: int) -> None:
    if two_j < 0:
        raise ValueError("two_j must be nonnegative")
    for name, val in (("two_mu", two_mu), ("two_nu", two_nu)):
        if abs(val) > two_j:
            raise ValueError(f"{name}={val} exceeds two_j={two_j}")
        if (val - two_j) % 2 != 0:
            raise ValueError(f"{name}={val} has wrong parity for two_j={two_j}")


def matrix_element(two_j: int, two_mu: int, two_nu: int) -> float:
    """Single element I^j_{mu nu}(pi/2) (doubled indices)."""
    _check_indices(two_j, two_mu, two_nu)
    return float(_kernels.su2_matrix_element(two_j, two_mu, two_nu))


def _direct_cost(two_j: int, two_nu: int) -> int:
    # Jacobi recurrence length summed over the column after symmetry
    # reduction: element mu costs about (two_j - max(|two_mu|,|two_nu|))/2.
    total = 0
    for idx in range(two_j + 1):
        two_mu = -two_j + 2 * idx
        total += (two_j - max(abs(two_mu), abs(two_nu))) // 2
    return total


def rotation_column(two_j: int, two_nu: int) -> RotationColumn:
    """All elements I^j_{mu nu}(pi/2) at fixed nu, stable for large j.

    Tries the direct Jacobi evaluation first (when affordable) and
    validates it by the unit-norm property of rotation columns; on
    failure, or for columns whose direct cost is quadratic in j, falls
    back to the boundary-seeded recurrence in mu.
    """
    _check_indices(two_j, two_nu, two_nu)
    if _direct_cost(two_j, two_nu) <= _DIRECT_COLUMN_OPS:
        values = _kernels.su2_direct_column(two_j, two_nu)
        residual = abs(float(values @ values) - 1.0)
        if residual <= UNITARITY_TOL:
            return RotationColumn(two_j, two_nu, values, residual, "direct")
    values, mismatch = _kernels.su2_recurrence_column(two_j, two_nu)
    if mismatch > UNITARITY_TOL:
        raise NumericalDegeneracyError(
            f"rotation column two_j={two_j}, two_nu={two_nu} failed its "
            f"stability check (mismatch {mismatch:.3e})"
        )
    return RotationColumn(two_j, two_nu, values, float(mismatch), "recurrence")


@lru_cache(maxsize=4)
def _rotation_matrix_cached(two_j: int) -> np.ndarray:
    cols = [rotation_column(two_j, -two_j + 2 * i).values for i in range(two_j + 1)]
    mat = np.column_stack(cols)
    mat.setflags(write=False)
    return mat


def rotation_matrix(two_j: int) -> np.ndarray:
    """The full (2j+1) x (2j+1) matrix I^j(pi/2) (read-only, cached)."""
    if two_j > _MATRIX_MAX_TWO_J:
        raise ValueError(
            f"full rotation matrix for two_j={two_j} exceeds the supported "
            f"size {_MATRIX_MAX_TWO_J}; use rotation_column instead"
        )
    return _rotation_matrix_cached(int(two_j))


_QUARTER_TURNS = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j])


@lru_cache(maxsize=4)
def _basis_change_cached(two_j: int) -> np.ndarray:
    size = two_j + 1
    imat = rotation_matrix(two_j)
    idx = np.arange(size)
    # exp(i (pi/2)(nu - mu)) on the (mu, nu) grid, exact quarter turns
    turns = (idx[None, :] - idx[:, None]) % 4
    v = _QUARTER_TURNS[turns] * imat
    v.setflags(write=False)
    return v


def basis_change_matrix(two_j: int) -> np.ndarray:
    """Unitary V with J_y amplitudes = V @ J_z amplitudes (read-only)."""
    if two_j > _MATRIX_MAX_TWO_J:
        raise ValueError(
            f"basis change for two_j={two_j} exceeds the supported size "
            f"{_MATRIX_MAX_TWO_J}"
        )
    return _basis_change_cached(int(two_j))


def z_to_y(state: TwoModeState) -> TwoModeState:
    """Re-express a J_z-basis state in the J_y basis."""
    if state.basis != JZ:
        raise ValueError("z_to_y expects a J_z-basis state")
    v = basis_change_matrix(state.two_j)
    return TwoModeState(state.two_j, JY, v @ state.amps)


def y_to_z(state: TwoModeState) -> TwoModeState:
    """Re-express a J_y-basis state in the J_z basis."""
    if state.basis != JY:
        raise ValueError("y_to_z expects a J_y-basis state")
    v = basis_change_matrix(state.two_j)
    return TwoModeState(state.two_j, JZ, v.conj().T @ state.amps)
