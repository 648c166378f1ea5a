"""Time evolution of polarization states under a :class:`ProcessModel`.

Two independent routes: the closed-form dephasing map driven by kappa(t), and a
fixed-step RK4 integration of the time-local master equation driven by the
piecewise rates gamma(t), epsilon(t). Their agreement is the main consistency
check of the package.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, StepSizeError
from .process import ProcessModel
from .qubit import SIGMA_Z, DensityMatrix, StateLike, as_density, trace_distances

DEFAULT_MIN_STEPS = 20000
DEFAULT_RATE_STEP = 0.05
MAX_RATE_STEP = 0.1
TRACE_RENORM_TOL = 1e-12


@dataclass(frozen=True)
class Trajectory:
    """States sampled on a uniform time grid.

    ``grid_step`` is the integration step; with thinning ``k`` the stored
    samples are ``k * grid_step`` apart.
    """

    times: np.ndarray
    states: np.ndarray
    grid_step: float
    thin: int = 1
    max_trace_drift: float = 0.0
    renormalized: int = 0

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> DensityMatrix:
        return DensityMatrix(self.states[i])


@dataclass(frozen=True)
class DistanceSeries:
    """Trace distance D(t) of an evolving pair and its rate sigma = dD/dt."""

    times: np.ndarray
    D: np.ndarray
    sigma: np.ndarray


def map_states(model: ProcessModel, rho0, times) -> np.ndarray:
    """Closed-form dephasing map for arrays of states and times.

    :param rho0: array of shape (..., 2, 2).
    :param times: array of shape (m,).
    :return: array of shape (..., m, 2, 2).
    """
    rho0 = np.asarray(rho0, dtype=complex)
    kappa = np.atleast_1d(model.kappa(np.atleast_1d(times)))
    out = np.broadcast_to(rho0[..., None, :, :], rho0.shape[:-2] + kappa.shape + (2, 2)).copy()
    out[..., 0, 1] *= np.conj(kappa)
    out[..., 1, 0] *= kappa
    return out


def apply_map(model: ProcessModel, rho0: StateLike, t: float) -> DensityMatrix:
    """rho(t) = Phi_t rho(0): populations kept, coherences scaled by kappa."""
    if np.ndim(t) != 0:
        raise TypeError("apply_map takes a scalar time; use map_states for arrays")
    m = as_density(rho0).entries
    return DensityMatrix(map_states(model, m, [t])[0])


def master_equation_rhs(rho: np.ndarray, gamma: float, epsilon: float) -> np.ndarray:
    """d rho/dt = -i (eps/2)[sigma_z, rho] + (gamma/2)(sigma_z rho sigma_z - rho)."""
    sz = SIGMA_Z
    comm = sz @ rho - rho @ sz
    return -0.5j * epsilon * comm + 0.5 * gamma * (sz @ rho @ sz - rho)


def generator_matrix(gamma: float, epsilon: float) -> np.ndarray:
    """Master-equation generator as a 4x4 matrix acting on row-major vec(rho)."""
    cols = []
    for k in range(4):
        basis = np.zeros(4, dtype=complex)
        basis[k] = 1.0
        cols.append(master_equation_rhs(basis.reshape(2, 2), gamma, epsilon).ravel())
    return np.stack(cols, axis=1)


def rk4_step(f: Callable, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """One classic fourth-order Runge-Kutta step of y' = f(t, y)."""
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_propagator(generator: np.ndarray, h: float) -> np.ndarray:
    """Matrix of one RK4 step for the constant linear system y' = G y.

    Obtained by stepping every basis vector at once, so applying it is
    identical (up to rounding) to calling :func:`rk4_step` on the state.
    """
    return rk4_step(lambda _t, y: generator @ y, 0.0, np.eye(len(generator), dtype=complex), h)


def default_step(model: ProcessModel, t_end: Optional[float] = None) -> float:
    """Step giving at least 20000 steps and |gamma| * step <= 0.05."""
    t_end = model.tf if t_end is None else t_end
    rate = max((abs(p.gamma) for p in model.pieces() if p.start < t_end), default=0.0)
    n = max(DEFAULT_MIN_STEPS, int(np.ceil(t_end * rate / DEFAULT_RATE_STEP)))
    return t_end / n


def _substeps(model: ProcessModel, a: float, b: float):
    """(duration, gamma, epsilon) for the constant-rate parts of [a, b]."""
    out = []
    for p in model.pieces():
        lo, hi = max(a, p.start), min(b, p.end)
        if hi > lo:
            out.append((hi - lo, p.gamma, p.epsilon))
    return out


def integrate_master_equation(
    model: ProcessModel,
    rho0: StateLike,
    t_end: Optional[float] = None,
    step: Optional[float] = None,
    thin: int = 10,
    frame: str = "rotating",
) -> Trajectory:
    """Integrate the dephasing master equation with fixed-step RK4.

    Steps that straddle t0 or t1 are split there into two RK4 sub-steps so the
    discontinuous rates never sit inside a step; the stored grid stays uniform.

    In the default ``frame="rotating"`` only the dissipator is integrated
    numerically and the energy-shift phase exp(-i int epsilon) is applied
    exactly: at optical omega0 the lab-frame phase rotates by thousands of
    radians per step, far beyond RK4's stability region. ``frame="lab"``
    integrates the full generator and is meant for small omega0.

    :param step: requested step (ps); the actual step divides ``t_end`` evenly
        and is never larger.
    :param thin: keep every ``thin``-th state (the final state is always kept).
    """
    t_end = model.tf if t_end is None else float(t_end)
    if not 0.0 < t_end <= model.tf * (1 + 1e-12):
        raise DomainError(f"t_end must lie in (0, t_f] = (0, {model.tf:.6g}] ps")
    t_end = min(t_end, model.tf)
    if frame not in ("rotating", "lab"):
        raise ValueError(f"frame must be 'rotating' or 'lab', got {frame!r}")
    if thin < 1:
        raise ValueError("thin must be >= 1")
    if step is None:
        step = default_step(model, t_end)
    if not step > 0:
        raise StepSizeError(f"step must be > 0, got {step!r}")
    n_steps = max(1, int(np.ceil(t_end / step - 1e-9)))
    h = t_end / n_steps

    pieces = [p for p in model.pieces() if p.start < t_end]
    for p in pieces:
        if abs(p.gamma) * h > MAX_RATE_STEP:
            raise StepSizeError(
                f"|gamma| * step = {abs(p.gamma) * h:.3g} exceeds {MAX_RATE_STEP}; use step <= "
                f"{MAX_RATE_STEP / abs(p.gamma):.4g} ps"
            )
        if frame == "lab" and abs(p.epsilon) * h > MAX_RATE_STEP:
            raise StepSizeError(
                f"|epsilon| * step = {abs(p.epsilon) * h:.3g} exceeds {MAX_RATE_STEP} in the lab frame"
            )

    lab = frame == "lab"
    cache: dict = {}

    def propagator(duration, gamma, eps):
        key = (duration, gamma, eps)
        if key not in cache:
            cache[key] = rk4_propagator(generator_matrix(gamma, eps if lab else 0.0), duration)
        return cache[key]

    # propagator for each step: the piece's full-step matrix, or a product of
    # sub-step matrices when a rate discontinuity falls strictly inside the step
    starts = np.array([p.start for p in pieces])
    step_mid = (np.arange(n_steps) + 0.5) * h
    piece_idx = np.clip(np.searchsorted(starts, step_mid, side="right") - 1, 0, len(pieces) - 1)
    full = [propagator(h, p.gamma, p.epsilon) for p in pieces]
    special = {}
    for bp in model.breakpoints:
        if bp >= t_end:
            continue
        n = int(bp // h)
        if 0 <= n < n_steps and n * h < bp < (n + 1) * h:
            mat = np.eye(4, dtype=complex)
            for dur, g, e in _substeps(model, n * h, (n + 1) * h):
                mat = propagator(dur, g, e) @ mat
            special[n] = mat

    y = as_density(rho0).entries.astype(complex).ravel()
    stored = [y.copy()]
    stored_idx = [0]
    for n in range(n_steps):
        y = special.get(n, full[piece_idx[n]]) @ y
        if (n + 1) % thin == 0 or n + 1 == n_steps:
            stored.append(y.copy())
            stored_idx.append(n + 1)

    times = np.asarray(stored_idx, dtype=float) * h
    states = np.asarray(stored).reshape(-1, 2, 2)
    if not lab:
        phase = np.exp(-1j * accumulated_phase(model, times))
        states[:, 0, 1] *= phase
        states[:, 1, 0] *= np.conj(phase)

    traces = states[:, 0, 0].real + states[:, 1, 1].real
    drift = np.abs(traces - 1.0)
    fix = drift > TRACE_RENORM_TOL
    if fix.any():
        states[fix] /= traces[fix, None, None]
    return Trajectory(
        times=times,
        states=states,
        grid_step=h,
        thin=thin,
        max_trace_drift=float(drift.max()),
        renormalized=int(fix.sum()),
    )


def accumulated_phase(model: ProcessModel, times) -> np.ndarray:
    """int_0^t epsilon(s) ds, exact for the piecewise-constant shift."""
    times = np.asarray(times, dtype=float)
    out = np.zeros_like(times)
    for p in model.pieces():
        out += p.epsilon * np.clip(times - p.start, 0.0, p.end - p.start)
    return out


def time_grid(model: ProcessModel, n_intervals: int = DEFAULT_MIN_STEPS, t_end: Optional[float] = None):
    """Uniform grid on [0, t_end] that never lands exactly on a rate breakpoint.

    If a node would coincide with t0 or t1, the grid is replaced by the
    midpoints of its cells (offset by half a step).
    """
    t_end = model.tf if t_end is None else float(t_end)
    if n_intervals < 1:
        raise ValueError("n_intervals must be >= 1")
    grid = np.linspace(0.0, t_end, n_intervals + 1)
    bps = model.breakpoints
    if bps and np.any(np.isin(grid, bps)):
        grid = 0.5 * (grid[:-1] + grid[1:])
    return grid


def trace_distance_trajectory(
    model: ProcessModel,
    rho1_0: StateLike,
    rho2_0: StateLike,
    step: Optional[float] = None,
    times=None,
) -> DistanceSeries:
    """D(t) for an initial pair, evaluated with the closed-form map.

    sigma is the centered difference of D at interior points (one-sided at the
    two ends).
    """
    if times is None:
        n = DEFAULT_MIN_STEPS if step is None else max(1, int(np.ceil(model.tf / step - 1e-9)))
        times = time_grid(model, n)
    times = np.asarray(times, dtype=float)
    pair = np.stack([as_density(rho1_0).entries, as_density(rho2_0).entries])
    evolved = map_states(model, pair, times)
    D = trace_distances(evolved[0], evolved[1])
    sigma = np.gradient(D, times) if len(times) > 1 else np.zeros_like(D)
    return DistanceSeries(times=times, D=D, sigma=sigma)
