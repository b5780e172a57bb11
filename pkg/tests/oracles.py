"""Independent brute-force constructions used as test oracles.

Everything here deliberately avoids the package's Fourier-coefficient
machinery: rotations come from dense matrix exponentials, detection
operators from explicit mode-operator matrices, and moments from grid
quadrature.
"""

import numpy as np
import scipy.linalg

TWO_PI = 2.0 * np.pi


def jy_matrix(two_j: int) -> np.ndarray:
    """Angular-momentum J_y in the J_z eigenbasis, indices mu ascending."""
    size = two_j + 1
    j = two_j / 2.0
    m = np.zeros((size, size), dtype=complex)
    for i in range(size - 1):
        mu = -j + i
        c = np.sqrt(j * (j + 1) - mu * (mu + 1))
        m[i + 1, i] += c / 2j
        m[i, i + 1] -= c / 2j
    return m


def rotation_by_diagonalization(two_j: int, sign: int = -1) -> np.ndarray:
    """exp(sign * i (pi/2) J_y) from the dense eigendecomposition."""
    jy = jy_matrix(two_j)
    evals, evecs = np.linalg.eigh(jy)
    return (evecs * np.exp(sign * 1j * (np.pi / 2) * evals)) @ evecs.conj().T


def mode_operators(n: int):
    """Annihilation matrices for modes a and b on the n-photon sector.

    Basis vector k holds k photons in mode a and n - k in mode b; the
    operators map the sector to the (n-1)-photon sector.
    """
    a_op = np.zeros((n, n + 1))
    b_op = np.zeros((n, n + 1))
    for k in range(n + 1):
        if k >= 1:
            a_op[k - 1, k] = np.sqrt(k)
        if k <= n - 1:
            b_op[k, k] = np.sqrt(n - k)
    return a_op, b_op


def detection_matrix(n: int, u: int, phi: float, phase: float) -> np.ndarray:
    """Output-mode operator on the n-photon sector at fixed phases."""
    a_op, b_op = mode_operators(n)
    half = 0.5 * (phi - phase + u * np.pi)
    return np.sin(half) * a_op + np.cos(half) * b_op


def conditioned_vectors_on_grid(jz_amps: np.ndarray, bits, phases, grid: np.ndarray):
    """Evolve the conditioned state on a phase grid by matrix application.

    Returns an array of shape (len(grid), photons - len(bits) + 1) with
    the unnormalized state vector at each grid phase, including the
    1/sqrt(N + 1 - m) renormalizations.
    """
    total = len(jz_amps) - 1
    out = np.empty((grid.size, total - len(bits) + 1), dtype=complex)
    for g, phi in enumerate(grid):
        v = jz_amps.astype(complex)
        n = total
        for u, ph in zip(bits, phases):
            v = detection_matrix(n, u, phi, ph) @ v / np.sqrt(n)
            n -= 1
        out[g] = v
    return out


def likelihood_on_grid(jz_amps, bits, phases, grid):
    """Record likelihood P(record | phi) on a phase grid."""
    vecs = conditioned_vectors_on_grid(jz_amps, bits, phases, grid)
    return np.sum(np.abs(vecs) ** 2, axis=1)


def grid_moment(values: np.ndarray, grid: np.ndarray, order: int) -> complex:
    """Quadrature of integral(values * exp(i order phi) dphi) on a uniform grid."""
    return complex(np.sum(values * np.exp(1j * order * grid)) * (TWO_PI / grid.size))
