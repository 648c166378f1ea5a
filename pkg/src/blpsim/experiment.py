"""Reproduction of the measured curves: delay and angle sweeps of the trace
distance gain, the noisy measurement chain, and width-fit coverage."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dynamics import map_states
from .errors import FitError, InputError
from .fitting import FitResult, fit_delta_omega
from .measure import canonical_pair, pair_distances, pick_best_pair
from .process import ProcessModel
from .qubit import pure_states
from .tomography import CountingConfig, MonteCarloSummary, noisy_trace_distances, trial_rng

OPTIMAL_PAIR = (135.0, 45.0)


@dataclass(frozen=True)
class DelaySweep:
    """Trace distances at t0 and t_f for one initial pair across delay lengths."""

    x0_mm: np.ndarray
    D_t0: np.ndarray
    D_tf: np.ndarray
    pair: tuple[float, float]
    noisy: bool = False

    @property
    def delta_D(self) -> np.ndarray:
        return self.D_tf - self.D_t0

    @property
    def best_x0(self) -> float:
        return float(self.x0_mm[np.argmax(self.delta_D)])

    def columns(self) -> dict:
        return {"x0_mm": self.x0_mm, "delta_D": self.delta_D, "D_t0": self.D_t0, "D_tf": self.D_tf}


@dataclass(frozen=True)
class AngleSweep:
    """Gain D(t_f) - D(t0) on a theta x xi grid; ``delta_D[i, j]`` is (thetas[i], xis[j])."""

    thetas: np.ndarray
    xis: np.ndarray
    delta_D: np.ndarray

    @property
    def best_pair(self) -> tuple[float, float]:
        """Maximizing pair, folded to theta >= xi, ties to lowest theta then xi."""
        tt, xx = np.meshgrid(self.thetas, self.xis, indexing="ij")
        th, xi = canonical_pair(tt.ravel(), xx.ravel())
        k = pick_best_pair(th, xi, self.delta_D.ravel())
        return float(th[k]), float(xi[k])

    @property
    def max_value(self) -> float:
        return float(self.delta_D.max())


def _pair_states(model: ProcessModel, pair, times) -> np.ndarray:
    """Evolved pair, shape (n_times, 2, 2, 2) indexed [time, member]."""
    ev = map_states(model, pure_states(list(pair)), times)
    return np.swapaxes(ev, 0, 1)


def sweep_delay(
    model: ProcessModel,
    x0_list: Sequence[float],
    pair: tuple[float, float] = OPTIMAL_PAIR,
    counting: Optional[CountingConfig] = None,
    correct_dark: bool = True,
) -> DelaySweep:
    """Trace-distance gain versus delay length, noise-free or through tomography.

    In counting mode point ``i`` uses the generator ``trial_rng(seed, i)`` and
    reconstructs all four states (both members at t0 and t_f).
    """
    x0 = np.asarray(x0_list, dtype=float)
    if np.any(x0 < 0):
        raise InputError("delay lengths must be >= 0")
    D_t0 = np.empty(len(x0))
    D_tf = np.empty(len(x0))
    for i, x in enumerate(x0):
        m = model.with_x0(x)
        if counting is None:
            d = pair_distances(m, [pair[0]], [pair[1]], [m.t0, m.tf])[0]
        else:
            states = _pair_states(m, pair, [m.t0, m.tf])
            raw, cor, _, _ = noisy_trace_distances(states, counting, trial_rng(counting.rng_seed, i), correct_dark)
            d = cor if correct_dark else raw
        D_t0[i], D_tf[i] = d
    return DelaySweep(x0, D_t0, D_tf, (float(pair[0]), float(pair[1])), counting is not None)


def sweep_angles(model: ProcessModel, thetas: Sequence[float], xis: Sequence[float]) -> AngleSweep:
    """Noise-free gain D(t_f) - D(t0) over every (theta, xi) combination."""
    thetas = np.asarray(thetas, dtype=float)
    xis = np.asarray(xis, dtype=float)
    if thetas.size == 0 or xis.size == 0:
        raise InputError("empty angle grid")
    tt, xx = np.meshgrid(thetas, xis, indexing="ij")
    d = pair_distances(model, tt.ravel(), xx.ravel(), [model.t0, model.tf])
    return AngleSweep(thetas, xis, (d[:, 1] - d[:, 0]).reshape(tt.shape))


def inset_angles(center: tuple[float, float] = OPTIMAL_PAIR, half_width_deg: float = 10.0, step_deg: float = 1.0):
    """Fine theta and xi axes around ``center`` (the detailed scan near the optimum)."""
    offsets = np.arange(-half_width_deg, half_width_deg + 0.5 * step_deg, step_deg)
    return center[0] + offsets, center[1] + offsets


def monte_carlo_delta_D(
    model: ProcessModel,
    cfg: CountingConfig,
    pair: tuple[float, float] = OPTIMAL_PAIR,
    n_trials: int = 1000,
) -> tuple[MonteCarloSummary, MonteCarloSummary]:
    """Ensemble of measured gains D(t_f) - D(t0), raw and dark-count corrected.

    Both estimates in a trial come from the same sampled counts; trial ``i``
    draws from ``trial_rng(cfg.rng_seed, i)``.
    """
    if n_trials < 1:
        raise InputError("n_trials must be >= 1")
    states = _pair_states(model, pair, [model.t0, model.tf])
    raw = np.empty(n_trials)
    cor = np.empty(n_trials)
    proj_raw = proj_cor = 0
    for i in range(n_trials):
        dr, dc, pr, pc = noisy_trace_distances(states, cfg, trial_rng(cfg.rng_seed, i), True)
        raw[i] = dr[1] - dr[0]
        cor[i] = dc[1] - dc[0]
        proj_raw += pr
        proj_cor += pc

    def summary(v, n_proj):
        return MonteCarloSummary(float(v.mean()), float(v.std(ddof=1)) if n_trials > 1 else 0.0, n_trials, cfg.rng_seed, n_proj)

    return summary(raw, proj_raw), summary(cor, proj_cor)


@dataclass(frozen=True)
class CoverageResult:
    fraction: float
    estimates: np.ndarray
    n_failed: int
    tolerance_ps: float


def fit_coverage(
    model: ProcessModel,
    x0_list: Sequence[float],
    cfg: CountingConfig,
    n_trials: int = 1000,
    tolerance_ps: float = 1.9,
    correct_dark: bool = True,
) -> CoverageResult:
    """Fraction of simulated delay sweeps whose fitted 1/delta_omega lies within
    ``tolerance_ps`` of the model's value.

    Trial ``t`` runs :func:`sweep_delay` in counting mode with seed
    ``(cfg.rng_seed, t)``; a failed fit counts as a miss.
    """
    truth = model.spectrum.inv_delta_omega
    estimates = np.full(n_trials, np.nan)
    failed = 0
    for t in range(n_trials):
        seed = int(np.random.SeedSequence([cfg.rng_seed, t]).generate_state(1)[0])
        trial_cfg = CountingConfig(cfg.signal_rate, cfg.integration_time, cfg.dark_rate, seed)
        sweep = sweep_delay(model, x0_list, counting=trial_cfg, correct_dark=correct_dark)
        try:
            estimates[t] = fit_delta_omega(sweep.x0_mm, np.clip(sweep.D_tf, 1e-12, 1.0)).inv_delta_omega
        except (FitError, InputError):
            failed += 1
    hits = np.abs(estimates - truth) <= tolerance_ps
    return CoverageResult(float(np.mean(hits)), estimates, failed, tolerance_ps)


def fit_sweep(sweep: DelaySweep) -> FitResult:
    return fit_delta_omega(sweep.x0_mm, sweep.D_tf)
