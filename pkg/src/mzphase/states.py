"""Two-mode photon-number input states for interferometric phase estimation.

States live in the fixed-total-photon sector N = 2j and are expressed in
either the J_y or the J_z eigenbasis of the Schwinger angular-momentum
picture of the two modes.  A J_z basis vector with index mu corresponds
to the Fock state with j + mu photons in mode a and j - mu in mode b.

All constructors return normalized, immutable states; transformations
elsewhere return new values and never mutate their input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

JY = "jy"
JZ = "jz"

__all__ = [
    "JY",
    "JZ",
    "TwoModeState",
    "optimal_state",
    "one_port_state",
    "equal_split_state",
    "yurke_state",
    "state_to_dict",
    "state_from_dict",
]

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class TwoModeState:
    """Pure two-mode state with N = two_j photons in a fixed basis.

    ``amps[i]`` is the amplitude on the basis vector with mu = i - j,
    i.e. index i runs over mu = -j .. j in unit steps.  two_j is stored
    doubled so half-integer j (odd photon number) stays exact.
    """

    two_j: int
    basis: str
    amps: np.ndarray

    def __post_init__(self):
        if self.two_j < 0:
            raise ValueError("two_j must be nonnegative")
        if self.basis not in (JY, JZ):
            raise ValueError(f"unknown basis {self.basis!r}")
        a = np.asarray(self.amps, dtype=np.complex128).copy()
        if a.shape != (self.two_j + 1,):
            raise ValueError(
                f"amplitude vector must have length two_j + 1 = {self.two_j + 1}"
            )
        norm = float(np.linalg.norm(a))
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"state is not normalized (|norm - 1| = {abs(norm - 1.0):.3e})")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @property
    def photons(self) -> int:
        """Total photon number N = 2j."""
        return self.two_j

    def mu_values(self) -> np.ndarray:
        """The mu index of each amplitude, as exact doubled integers / 2."""
        return (np.arange(self.two_j + 1) * 2 - self.two_j) / 2.0


def optimal_state(photons: int) -> TwoModeState:
    """Input state minimizing the canonical phase variance, in the J_y basis.

    The amplitude on |j mu>_y is sin((mu + j + 1) pi / (2j + 2)) / sqrt(j + 1),
    real and positive, with mean relative phase zero.
    """
    if photons < 1:
        raise ValueError("photon number must be >= 1")
    n = photons
    m = n + 2  # 2j + 2
    k = np.arange(1, n + 2)
    amps = np.sin(k * np.pi / m) / np.sqrt(m / 2.0)
    return TwoModeState(n, JY, amps.astype(np.complex128))


def one_port_state(photons: int) -> TwoModeState:
    """All photons incident on port a: the J_z basis vector with mu = j."""
    if photons < 1:
        raise ValueError("photon number must be >= 1")
    amps = np.zeros(photons + 1, dtype=np.complex128)
    amps[-1] = 1.0
    return TwoModeState(photons, JZ, amps)


def equal_split_state(photons: int) -> TwoModeState:
    """Equal photon numbers into both ports: the mu = 0 J_z basis vector.

    Requires an even photon number; mu = 0 needs integer j.
    """
    if photons < 1:
        raise ValueError("photon number must be >= 1")
    if photons % 2 != 0:
        raise ValueError("equal-split input needs an even photon number")
    amps = np.zeros(photons + 1, dtype=np.complex128)
    amps[photons // 2] = 1.0
    return TwoModeState(photons, JZ, amps)


def yurke_state(photons: int) -> TwoModeState:
    """Equal superposition of the mu = 0 and mu = 1 J_z basis vectors.

    Defined only for even photon number (integer j) and N >= 2.
    """
    if photons < 2:
        raise ValueError("photon number must be >= 2")
    if photons % 2 != 0:
        raise ValueError("this superposition needs an even photon number")
    amps = np.zeros(photons + 1, dtype=np.complex128)
    j_index = photons // 2
    amps[j_index] = 1.0 / np.sqrt(2.0)
    amps[j_index + 1] = 1.0 / np.sqrt(2.0)
    return TwoModeState(photons, JZ, amps)


def state_to_dict(state: TwoModeState) -> dict:
    """JSON-ready mapping {two_j, basis, amps: [[re, im], ...]}."""
    return {
        "two_j": int(state.two_j),
        "basis": state.basis,
        "amps": [[float(a.real), float(a.imag)] for a in state.amps],
    }


def state_from_dict(data: dict) -> TwoModeState:
    """Inverse of :func:`state_to_dict`; validates shape and norm."""
    try:
        two_j = int(data["two_j"])
        basis = str(data["basis"])
        pairs = data["amps"]
        amps = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed state record: {exc}") from exc
    return TwoModeState(two_j, basis, amps)
