"""Information backflow: revival intervals of the trace distance and the
non-Markovianity measure maximized over pairs of linearly polarized states."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dynamics import map_states
from .errors import InputError
from .process import ProcessModel
from .qubit import hermitian_eigvalsh_2x2, pure_state, pure_states, trace_distance

DEFAULT_HYSTERESIS = 1e-12
TIE_TOL = 1e-12


@dataclass(frozen=True)
class IncreaseInterval:
    t_start: float
    t_end: float
    delta_D: float


@dataclass(frozen=True)
class MeasureResult:
    """Maximal total trace-distance increase and the pair that attains it."""

    value: float
    best_pair: tuple[float, float]
    intervals: list[IncreaseInterval] = field(default_factory=list)
    grid_resolution: float = 5.0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "best_theta_deg": self.best_pair[0],
            "best_xi_deg": self.best_pair[1],
            "intervals": [
                {"t_start_ps": iv.t_start, "t_end_ps": iv.t_end, "delta_D": iv.delta_D}
                for iv in self.intervals
            ],
            "grid_resolution_deg": self.grid_resolution,
        }


def _increasing_cells(D: np.ndarray, hysteresis: float) -> np.ndarray:
    return np.diff(D, axis=-1) > hysteresis


def increase_intervals(times, D, hysteresis: float = DEFAULT_HYSTERESIS) -> list[IncreaseInterval]:
    """Maximal runs of grid cells on which D rises by more than ``hysteresis``.

    Each interval's gain is D(end) - D(start), which equals the integral of
    dD/dt over the run. The grid must be increasing but need not be uniform.
    """
    times = np.asarray(times, dtype=float)
    D = np.asarray(D, dtype=float)
    if D.ndim != 1 or len(D) < 2:
        raise InputError("need at least 2 samples of D")
    if times.shape != D.shape:
        raise InputError(f"times and D differ in shape: {times.shape} vs {D.shape}")
    if np.any(np.diff(times) <= 0):
        raise InputError("times must be strictly increasing")
    up = _increasing_cells(D, hysteresis).astype(np.int8)
    edges = np.diff(np.concatenate([[0], up, [0]]))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    return [
        IncreaseInterval(float(times[s]), float(times[e]), float(D[e] - D[s]))
        for s, e in zip(starts, ends)
    ]


def total_increase(D, hysteresis: float = DEFAULT_HYSTERESIS) -> np.ndarray:
    """Sum of all interval gains along the last axis (vectorized over pairs)."""
    dD = np.diff(np.asarray(D, dtype=float), axis=-1)
    return np.where(dD > hysteresis, dD, 0.0).sum(axis=-1)


def stage_grid(model: ProcessModel, points_per_stage: int = 256) -> np.ndarray:
    """Time grid containing 0, t0, t1 and t_f, uniform inside each stage.

    |kappa| is monotone between these nodes, so sampling them captures every
    turning point of D(t) exactly.
    """
    nodes = sorted({0.0, model.tf, *[b for b in (model.t0, model.t1) if 0 < b < model.tf]})
    parts = [np.linspace(a, b, points_per_stage + 1)[:-1] for a, b in zip(nodes[:-1], nodes[1:])]
    return np.concatenate(parts + [[model.tf]]) if parts else np.array([0.0])


def pair_distances(model: ProcessModel, thetas, xis, times) -> np.ndarray:
    """D(t) for pairs (pure_state(theta_k), pure_state(xi_k)); shape (n_pairs, n_times)."""
    times = np.asarray(times, dtype=float)
    # the eigenvalues of rho1 - rho2 see the coherence only through its
    # modulus, so the phase of kappa can be dropped
    kappa = np.abs(np.atleast_1d(model.kappa(times)))
    diff = pure_states(thetas) - pure_states(xis)
    evolved = diff[:, None, :, :] * np.ones((1, len(times), 1, 1))
    evolved[..., 0, 1] *= kappa
    evolved[..., 1, 0] *= kappa
    return 0.5 * np.abs(hermitian_eigvalsh_2x2(evolved)).sum(axis=-1)


def canonical_pair(thetas, xis):
    """Fold unordered pairs onto theta >= xi with both angles in [0, 180)."""
    a = np.mod(np.asarray(thetas, dtype=float), 180.0)
    b = np.mod(np.asarray(xis, dtype=float), 180.0)
    return np.maximum(a, b), np.minimum(a, b)


def pick_best_pair(thetas, xis, values) -> int:
    """Index of the largest value; ties (within 1e-12) go to lowest theta, then lowest xi."""
    values = np.asarray(values)
    cand = np.flatnonzero(values >= values.max() - TIE_TOL)
    order = np.lexsort((np.asarray(xis)[cand], np.asarray(thetas)[cand]))
    return int(cand[order[0]])


def _pair_grid(theta_axis, xi_axis):
    tt, xx = np.meshgrid(theta_axis, xi_axis, indexing="ij")
    th, xi = canonical_pair(tt.ravel(), xx.ravel())
    pairs = np.unique(np.round(np.stack([th, xi], axis=1), 9), axis=0)
    return pairs[:, 0], pairs[:, 1]


def blp_measure(
    model: ProcessModel,
    resolution_deg: float = 5.0,
    refine_deg: Optional[float] = 0.5,
    thetas: Optional[Sequence[float]] = None,
    xis: Optional[Sequence[float]] = None,
    times=None,
    hysteresis: float = DEFAULT_HYSTERESIS,
) -> MeasureResult:
    """Total trace-distance increase maximized over pairs of linear polarizations.

    A coarse grid over [0, 180) x [0, 180) (or the explicit ``thetas`` x ``xis``)
    is searched first, then a grid of step ``refine_deg`` spanning one coarse
    cell around the best pair. Pairs are unordered; the reported best pair has
    theta >= xi.
    """
    if thetas is None:
        thetas = np.arange(0.0, 180.0, resolution_deg)
    if xis is None:
        xis = np.arange(0.0, 180.0, resolution_deg)
    thetas, xis = np.asarray(thetas, dtype=float), np.asarray(xis, dtype=float)
    if thetas.size == 0 or xis.size == 0:
        raise InputError("empty angle grid")
    if times is None:
        times = stage_grid(model)

    th, xi = _pair_grid(thetas, xis)
    values = total_increase(pair_distances(model, th, xi, times), hysteresis)
    grid_res = resolution_deg

    if refine_deg:
        k = pick_best_pair(th, xi, values)
        offsets = np.arange(-resolution_deg, resolution_deg + 0.5 * refine_deg, refine_deg)
        fth, fxi = _pair_grid(th[k] + offsets, xi[k] + offsets)
        fvalues = total_increase(pair_distances(model, fth, fxi, times), hysteresis)
        th = np.concatenate([th, fth])
        xi = np.concatenate([xi, fxi])
        values = np.concatenate([values, fvalues])
        grid_res = refine_deg

    k = pick_best_pair(th, xi, values)
    best = (float(th[k]), float(xi[k]))
    D = pair_distances(model, [best[0]], [best[1]], times)[0]
    intervals = increase_intervals(times, D, hysteresis)
    return MeasureResult(
        value=float(sum(iv.delta_D for iv in intervals)),
        best_pair=best,
        intervals=intervals,
        grid_resolution=float(grid_res),
    )


def delta_D(model: ProcessModel, theta: float, xi: float) -> float:
    """D(t_f) - D(t0) for the pair (pure_state(theta), pure_state(xi)); may be negative."""
    r1, r2 = pure_state(theta).entries, pure_state(xi).entries
    ev = map_states(model, np.stack([r1, r2]), [model.t0, model.tf])
    return trace_distance(ev[0, 1], ev[1, 1]) - trace_distance(ev[0, 0], ev[1, 0])
