"""Two-level polarization states in the {H, V} basis.

Every density matrix here is 2x2, so eigenvalues are taken from the closed-form
quadratic formula instead of a general eigensolver.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvariantError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def hermitian_eigvalsh_2x2(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of (a stack of) 2x2 Hermitian matrices, ascending.

    Only the diagonal and the upper off-diagonal entry are read.

    :param m: array of shape (..., 2, 2).
    :return: array of shape (..., 2).
    """
    m = np.asarray(m)
    p = m[..., 0, 0].real
    q = m[..., 1, 1].real
    mean = 0.5 * (p + q)
    radius = np.hypot(0.5 * (p - q), np.abs(m[..., 0, 1]))
    return np.stack([mean - radius, mean + radius], axis=-1)


def check_density(m: np.ndarray) -> None:
    """Raise :class:`InvariantError` unless ``m`` is a valid 2x2 density matrix."""
    if m.shape != (2, 2):
        raise InvariantError(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvariantError("matrix has non-finite entries")
    herm = np.max(np.abs(m - m.conj().T))
    if herm > HERMITIAN_TOL:
        raise InvariantError(f"matrix is not Hermitian (max deviation {herm:.3e})")
    tr = m[0, 0].real + m[1, 1].real
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvariantError(f"trace is {tr!r}, expected 1")
    lo = hermitian_eigvalsh_2x2(m)[0]
    if lo < -POSITIVITY_TOL:
        raise InvariantError(f"matrix is not positive semidefinite (eigenvalue {lo:.3e})")


@dataclass(frozen=True)
class PolarizationAngle:
    """Linear polarization direction measured from horizontal, in degrees.

    Stored normalized to [0, 360).
    """

    degrees: float

    def __post_init__(self):
        d = float(self.degrees) % 360.0
        # float modulo can round a tiny negative input up to exactly 360.0
        object.__setattr__(self, "degrees", 0.0 if d == 360.0 else d)

    @property
    def radians(self) -> float:
        return np.deg2rad(self.degrees)


AngleLike = Union[float, int, PolarizationAngle]


def _radians(phi: AngleLike) -> float:
    if isinstance(phi, PolarizationAngle):
        return phi.radians
    return PolarizationAngle(phi).radians


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Immutable, validated 2x2 density matrix in the {H, V} basis."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        check_density(m)
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @classmethod
    def from_bloch(cls, x: float, y: float, z: float) -> "DensityMatrix":
        return cls(0.5 * (np.eye(2) + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z))

    @property
    def bloch(self) -> np.ndarray:
        m = self.entries
        return np.array([2 * m[1, 0].real, 2 * m[1, 0].imag, (m[0, 0] - m[1, 1]).real])

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return bool(np.array_equal(self.entries, other.entries))

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __repr__(self):
        return f"DensityMatrix({np.array2string(self.entries, precision=6)})"


StateLike = Union[DensityMatrix, np.ndarray]


def as_density(rho: StateLike) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def pure_state(phi: AngleLike) -> DensityMatrix:
    """Projector onto cos(phi)|H> + sin(phi)|V>, with ``phi`` in degrees."""
    a = _radians(phi)
    psi = np.array([np.cos(a), np.sin(a)])
    return DensityMatrix(np.outer(psi, psi))


def pure_states(phis_deg) -> np.ndarray:
    """Vectorized :func:`pure_state`: returns an array of shape (n, 2, 2)."""
    a = np.deg2rad(np.mod(np.asarray(phis_deg, dtype=float), 360.0))
    c, s = np.cos(a), np.sin(a)
    out = np.empty(a.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c * c
    out[..., 0, 1] = c * s
    out[..., 1, 0] = c * s
    out[..., 1, 1] = s * s
    return out


def trace_distances(rho1: np.ndarray, rho2: np.ndarray) -> np.ndarray:
    """Trace distance for broadcastable stacks of 2x2 matrices, without validation."""
    ev = hermitian_eigvalsh_2x2(np.asarray(rho1) - np.asarray(rho2))
    return 0.5 * np.abs(ev).sum(axis=-1)


def trace_distance(rho1: StateLike, rho2: StateLike) -> float:
    """Half the trace norm of ``rho1 - rho2``.

    Both arguments are validated; raw arrays that are not Hermitian, unit-trace
    and positive raise :class:`InvariantError`.
    """
    a = as_density(rho1).entries
    b = as_density(rho2).entries
    return float(trace_distances(a, b))


def purity(rho: StateLike) -> float:
    m = as_density(rho).entries
    return float(np.real(np.sum(m * m.T)))
