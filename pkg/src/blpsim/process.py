"""Lorentzian photon spectrum and the two-stage (delay line -> birefringent fiber)
dephasing process it drives.

Units throughout: time in ps, angular frequency in rad/ps, delay lengths in mm,
fiber length in m, c in mm/ps.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.special import sici

from .errors import BreakpointError, DomainError, InvariantError

C_MM_PER_PS = 0.299792458
MM_PER_M = 1000.0
MM_PER_NM = 1e-6

QUAD_HALF_WIDTHS = 200.0
QUAD_TOL = 1e-6

# t1 closer than this (relative to t_f) to t_f is treated as t_f, so the
# vanishing final positive-rate branch is dropped instead of kept as a sliver
_T1_SNAP_RTOL = 1e-9
_DOMAIN_RTOL = 1e-12


def omega_from_wavelength(wavelength_nm: float) -> float:
    """Angular frequency (rad/ps) of light with vacuum wavelength ``wavelength_nm``."""
    return 2.0 * np.pi * C_MM_PER_PS / (wavelength_nm * MM_PER_NM)


@dataclass(frozen=True)
class Spectrum:
    """Lorentzian frequency distribution of the photon.

    :param omega0: central angular frequency (rad/ps).
    :param delta_omega: half width at half maximum (rad/ps); FWHM is ``2*delta_omega``.
    """

    omega0: float
    delta_omega: float

    def __post_init__(self):
        if not np.isfinite(self.omega0):
            raise InvariantError("omega0 must be finite")
        if not (np.isfinite(self.delta_omega) and self.delta_omega > 0):
            raise InvariantError(f"delta_omega must be > 0, got {self.delta_omega!r}")

    @classmethod
    def from_wavelength(cls, wavelength_nm: float, inv_delta_omega_ps: float) -> "Spectrum":
        if not inv_delta_omega_ps > 0:
            raise InvariantError(f"inv_delta_omega_ps must be > 0, got {inv_delta_omega_ps!r}")
        return cls(omega_from_wavelength(wavelength_nm), 1.0 / inv_delta_omega_ps)

    @property
    def inv_delta_omega(self) -> float:
        return 1.0 / self.delta_omega

    def density(self, omega):
        """Normalized Lorentzian G(omega)."""
        d = np.asarray(omega, dtype=float) - self.omega0
        return self.delta_omega / np.pi / (d * d + self.delta_omega**2)

    def window(self, half_widths: float = QUAD_HALF_WIDTHS) -> tuple[float, float]:
        w = half_widths * self.delta_omega
        return self.omega0 - w, self.omega0 + w


@dataclass(frozen=True)
class ExperimentParams:
    """Geometry of the delay stage and the polarization-maintaining fiber.

    ``fiber_length_m = 0`` describes a delay-only process that ends at t0.
    """

    x0_mm: float
    fiber_length_m: float = 100.0
    delta_n: float = 3.83e-4
    n_bar: float = 1.45
    c: float = C_MM_PER_PS

    def __post_init__(self):
        for name in ("x0_mm", "fiber_length_m", "delta_n", "n_bar"):
            if not np.isfinite(getattr(self, name)):
                raise InvariantError(f"{name} must be finite")
        if self.x0_mm < 0:
            raise InvariantError(f"x0_mm must be >= 0, got {self.x0_mm!r}")
        if self.fiber_length_m < 0:
            raise InvariantError(f"fiber_length_m must be >= 0, got {self.fiber_length_m!r}")
        if not 0 < self.delta_n < self.n_bar:
            raise InvariantError(
                f"need 0 < delta_n < n_bar, got delta_n={self.delta_n!r}, n_bar={self.n_bar!r}"
            )

    @property
    def t0(self) -> float:
        """End of the delay stage, 2*x0/c."""
        return 2.0 * self.x0_mm / self.c

    @property
    def t1(self) -> float:
        """Time at which the fiber has undone the delay, (1 + n_bar/delta_n) * t0."""
        return (1.0 + self.n_bar / self.delta_n) * self.t0

    @property
    def fiber_time(self) -> float:
        """Transit time through the fiber, l * n_bar / c."""
        return self.fiber_length_m * MM_PER_M * self.n_bar / self.c

    @property
    def tf(self) -> float:
        return self.t0 + self.fiber_time

    @property
    def birefringent_delay(self) -> float:
        """Relative group delay of the two fiber axes, delta_n * l / c (ps)."""
        return self.delta_n * self.fiber_length_m * MM_PER_M / self.c

    @property
    def compensation_x0_mm(self) -> float:
        """Delay length whose dephasing the fiber exactly undoes, delta_n * l / 2."""
        return 0.5 * self.delta_n * self.fiber_length_m * MM_PER_M

    def with_x0(self, x0_mm: float) -> "ExperimentParams":
        return replace(self, x0_mm=float(x0_mm))


class Piece(NamedTuple):
    """Interval [start, end) on which decay rate and energy shift are constant."""

    start: float
    end: float
    gamma: float
    epsilon: float


@dataclass(frozen=True)
class ProcessModel:
    """Staged pure-dephasing process: delay line for t < t0, fiber up to t_f."""

    spectrum: Spectrum
    params: ExperimentParams

    @classmethod
    def default_setup(cls, x0_mm: float = 19.15, **overrides) -> "ProcessModel":
        wavelength_nm = overrides.pop("wavelength_nm", 946.3)
        inv_dw = overrides.pop("inv_delta_omega_ps", 35.8)
        return cls(
            Spectrum.from_wavelength(wavelength_nm, inv_dw),
            ExperimentParams(x0_mm=x0_mm, **overrides),
        )

    def with_x0(self, x0_mm: float) -> "ProcessModel":
        return replace(self, params=self.params.with_x0(x0_mm))

    def with_omega0(self, omega0: float) -> "ProcessModel":
        return replace(self, spectrum=replace(self.spectrum, omega0=float(omega0)))

    @property
    def t0(self) -> float:
        return self.params.t0

    @property
    def tf(self) -> float:
        return self.params.tf

    @property
    def t1(self) -> float:
        """t1, snapped onto t_f when the two coincide to rounding."""
        t1, tf = self.params.t1, self.tf
        if abs(t1 - tf) <= _T1_SNAP_RTOL * tf:
            return tf
        return t1

    @property
    def ratio(self) -> float:
        """delta_n / n_bar, the rate at which the fiber unwinds the delay."""
        return self.params.delta_n / self.params.n_bar

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Discontinuities of gamma and epsilon inside (0, t_f)."""
        tf = self.tf
        return tuple(sorted({b for b in (self.t0, self.t1) if 0.0 < b < tf}))

    def pieces(self) -> list[Piece]:
        """Constant-rate pieces covering [0, t_f] in order; empty pieces omitted."""
        dw, w0, r = self.spectrum.delta_omega, self.spectrum.omega0, self.ratio
        t0, t1, tf = self.t0, self.t1, self.tf
        out = []
        if t0 > 0:
            out.append(Piece(0.0, t0, dw, w0))
        if tf > t0 and t1 > t0:
            out.append(Piece(t0, min(t1, tf), -dw * r, -w0 * r))
        if tf > t1:
            out.append(Piece(max(t1, t0), tf, dw * r, -w0 * r))
        return out

    def _check_domain(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        tf = self.tf
        slack = _DOMAIN_RTOL * max(tf, 1.0)
        if np.any(~np.isfinite(t)) or np.any(t < -slack) or np.any(t > tf + slack):
            raise DomainError(f"time outside [0, t_f] = [0, {tf:.6g}] ps")
        return np.clip(t, 0.0, tf)

    def retardation(self, t):
        """Net polarization-dependent delay tau(t): t in the delay stage, then
        t0 - (delta_n/n_bar)(t - t0) inside the fiber."""
        t = self._check_domain(t)
        t0 = self.t0
        return np.where(t < t0, t, t0 - self.ratio * (t - t0))

    def kappa(self, t):
        """Decoherence function kappa(t) = exp(i*omega0*tau - delta_omega*|tau|)."""
        tau = self.retardation(t)
        out = np.exp(1j * self.spectrum.omega0 * tau - self.spectrum.delta_omega * np.abs(tau))
        return out[()] if out.ndim == 0 else out

    def _piece_values(self, t, side: Optional[str], column: int):
        t = self._check_domain(t)
        if side not in (None, "left", "right"):
            raise ValueError(f"side must be None, 'left' or 'right', got {side!r}")
        bps = np.asarray(self.breakpoints)
        if side is None and bps.size and np.any(np.isin(t, bps)):
            hit = t[np.isin(t, bps)].ravel()[0]
            raise BreakpointError(
                f"rate is discontinuous at t = {hit!r} ps; pass side='left' or side='right'"
            )
        pcs = self.pieces()
        if not pcs:
            raise DomainError("process has zero duration")
        values = np.array([p[column] for p in pcs])
        if side == "left":
            ends = np.array([p.end for p in pcs])
            idx = np.searchsorted(ends, t, side="left")
        else:
            starts = np.array([p.start for p in pcs])
            idx = np.searchsorted(starts, t, side="right") - 1
        out = values[np.clip(idx, 0, len(pcs) - 1)]
        return out[()] if out.ndim == 0 else out

    def gamma(self, t, side: Optional[str] = None):
        """Time-dependent dephasing rate (1/ps); negative while coherence revives.

        Raises :class:`BreakpointError` at t0 or t1 unless a one-sided limit is
        requested with ``side``.
        """
        return self._piece_values(t, side, 2)

    def epsilon(self, t, side: Optional[str] = None):
        """Time-dependent energy shift (rad/ps); same breakpoint rules as :meth:`gamma`.

        Sign convention: epsilon = +Im[kappa'/kappa], the choice under which the
        master equation reproduces rho_HV(t) = conj(kappa(t)) * rho_HV(0).
        """
        return self._piece_values(t, side, 3)

    def to_dict(self) -> dict:
        p = self.params
        return {
            "x0_mm": p.x0_mm,
            "fiber_length_m": p.fiber_length_m,
            "delta_n": p.delta_n,
            "n_bar": p.n_bar,
            "omega0_rad_per_ps": self.spectrum.omega0,
            "inv_delta_omega_ps": self.spectrum.inv_delta_omega,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProcessModel":
        """Inverse of :meth:`to_dict`; ``wavelength_nm`` may replace ``omega0_rad_per_ps``."""
        if "omega0_rad_per_ps" in d:
            omega0 = float(d["omega0_rad_per_ps"])
        else:
            omega0 = omega_from_wavelength(float(d.get("wavelength_nm", 946.3)))
        spectrum = Spectrum(omega0, 1.0 / float(d["inv_delta_omega_ps"]))
        params = ExperimentParams(
            x0_mm=float(d["x0_mm"]),
            fiber_length_m=float(d.get("fiber_length_m", 100.0)),
            delta_n=float(d.get("delta_n", 3.83e-4)),
            n_bar=float(d.get("n_bar", 1.45)),
        )
        return cls(spectrum, params)


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = QUAD_TOL,
    initial_panels: int = 64,
    max_depth: int = 40,
) -> complex:
    """Adaptive Simpson quadrature of a vectorized (possibly complex) integrand.

    Panels are refined breadth-first so each level costs one vectorized call;
    a panel is accepted once the Richardson estimate is below its share of ``tol``.
    """
    edges = np.linspace(a, b, initial_panels + 1)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    f_lo, f_mid, f_hi = f(lo), f(mid), f(hi)
    whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
    tols = np.full(lo.shape, tol / initial_panels)
    total = 0.0 + 0.0j
    for _ in range(max_depth):
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        f_lm, f_rm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid)
        right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rm + f_hi)
        delta = left + right - whole
        done = np.abs(delta) <= 15.0 * tols
        total += np.sum((left + right + delta / 15.0)[done])
        keep = ~done
        if not keep.any():
            return complex(total)
        lo, mid, hi = (
            np.concatenate([lo[keep], mid[keep]]),
            np.concatenate([lm[keep], rm[keep]]),
            np.concatenate([mid[keep], hi[keep]]),
        )
        f_lo, f_mid, f_hi = (
            np.concatenate([f_lo[keep], f_mid[keep]]),
            np.concatenate([f_lm[keep], f_rm[keep]]),
            np.concatenate([f_mid[keep], f_hi[keep]]),
        )
        whole = np.concatenate([left[keep], right[keep]])
        tols = np.concatenate([tols[keep], tols[keep]]) / 2.0
    raise RuntimeError("adaptive Simpson did not converge")


def _lorentzian_tail(spectrum: Spectrum, t: float, cutoff: float) -> float:
    # 2*(dw/pi) * int_cutoff^inf cos(u t)/u^2 du; the next term of the 1/(u^2+dw^2)
    # expansion is below (2/3pi)(dw/cutoff)^3 ~ 3e-8 at 200 half widths
    t = abs(t)
    if t == 0.0:
        integral = 1.0 / cutoff
    else:
        si, _ = sici(t * cutoff)
        integral = np.cos(t * cutoff) / cutoff - t * (0.5 * np.pi - si)
    return 2.0 * spectrum.delta_omega / np.pi * integral


def kappa_quadrature(
    spectrum: Spectrum,
    t: float,
    tol: float = QUAD_TOL,
    half_widths: float = QUAD_HALF_WIDTHS,
    tail_correction: bool = True,
) -> complex:
    """kappa(t) = int G(omega) exp(i omega t) d omega by direct quadrature.

    Integrates over omega0 +- ``half_widths`` * delta_omega (in the detuning
    variable, which factors out exp(i*omega0*t) exactly) and adds the analytic
    contribution of the truncated Lorentzian tails.
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    cutoff = half_widths * spectrum.delta_omega
    dw = spectrum.delta_omega

    def integrand(u):
        return dw / np.pi / (u * u + dw * dw) * np.exp(1j * u * t)

    core = adaptive_simpson(integrand, -cutoff, cutoff, tol)
    if tail_correction:
        core += _lorentzian_tail(spectrum, t, cutoff)
    return complex(np.exp(1j * spectrum.omega0 * t) * core)
