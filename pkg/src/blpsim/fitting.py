"""Extraction of the spectral width delta_omega by damped least squares.

Two data sources: the final trace distance versus delay length, and the photon
spectrum recorded against wavelength.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .errors import FitError, InputError
from .process import C_MM_PER_PS, MM_PER_NM

_LSQ_TOL = 1e-15


@dataclass(frozen=True)
class FitResult:
    """Fitted width with its standard error (both as 1/delta_omega, in ps).

    ``extra`` carries the other fitted parameters, keyed with unit suffixes.
    """

    inv_delta_omega: float
    std_error: float
    residual_norm: float
    n_points: int
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.inv_delta_omega > 0:
            raise FitError(f"nonphysical width 1/delta_omega = {self.inv_delta_omega!r}")

    @property
    def delta_omega(self) -> float:
        return 1.0 / self.inv_delta_omega

    def to_dict(self) -> dict:
        return {
            "success": True,
            "inv_delta_omega_ps": self.inv_delta_omega,
            "std_error_ps": self.std_error,
            "residual_norm": self.residual_norm,
            "n_points": self.n_points,
            **self.extra,
        }


def delay_curve(x0_mm, delta_omega: float, birefringent_length_mm: float, c: float = C_MM_PER_PS):
    """Final trace distance exp(-delta_omega * |delta_n*l - 2*x0| / c) of the antipodal pair."""
    return np.exp(-delta_omega * np.abs(birefringent_length_mm - 2.0 * np.asarray(x0_mm)) / c)


def _param_std(jac: np.ndarray, residuals: np.ndarray) -> np.ndarray:
    dof = max(len(residuals) - jac.shape[1], 1)
    s2 = float(residuals @ residuals) / dof
    cov = s2 * np.linalg.pinv(jac.T @ jac)
    return np.sqrt(np.clip(np.diag(cov), 0.0, None))


def _diagnostic(message: str, **values) -> FitError:
    err = FitError(message)
    err.diagnostic = {"success": False, "message": message, **values}
    return err


def fit_delta_omega(x0_mm, D_tf, c: float = C_MM_PER_PS) -> FitResult:
    """Fit D_tf(x0) = exp(-delta_omega |L - 2 x0| / c) for (delta_omega, L = delta_n*l).

    Starting point: L from the delay with the largest D_tf, delta_omega from the
    log-slopes towards the two outermost delays. Standard error from the
    Jacobian at the optimum.
    """
    x = np.asarray(x0_mm, dtype=float)
    D = np.asarray(D_tf, dtype=float)
    if x.shape != D.shape or x.ndim != 1:
        raise InputError("x0_mm and D_tf must be 1-d arrays of equal length")
    if len(x) < 3:
        raise FitError(f"need at least 3 points, got {len(x)}")
    if np.ptp(x) == 0:
        raise FitError("all delays are equal; width is not identifiable")
    if np.any(~np.isfinite(D)) or np.any(D <= 0) or np.any(D > 1):
        raise InputError("D_tf values must lie in (0, 1]")

    L0 = 2.0 * x[np.argmax(D)]
    slopes = []
    for k in (np.argmin(x), np.argmax(x)):
        dist = abs(L0 - 2.0 * x[k])
        if dist > 0 and D[k] < 1:
            slopes.append(-c * np.log(D[k]) / dist)
    dw0 = float(np.mean(slopes)) if slopes else 1.0 / 35.0

    def residuals(p):
        return delay_curve(x, p[0], p[1], c) - D

    def jacobian(p):
        arg = p[1] - 2.0 * x
        model = delay_curve(x, p[0], p[1], c)
        return np.column_stack([-np.abs(arg) / c * model, -p[0] * np.sign(arg) / c * model])

    res = least_squares(
        residuals, [dw0, L0], jac=jacobian, method="lm", xtol=_LSQ_TOL, ftol=_LSQ_TOL, gtol=_LSQ_TOL
    )
    dw, L = res.x
    if not (res.success and np.isfinite(dw) and dw > 0):
        raise _diagnostic(
            f"fit did not reach a physical optimum: {res.message}",
            delta_omega_rad_per_ps=float(dw),
            birefringent_length_mm=float(L),
        )
    sd = _param_std(res.jac, res.fun)
    return FitResult(
        inv_delta_omega=1.0 / dw,
        std_error=float(sd[0] / dw**2),
        residual_norm=float(np.linalg.norm(res.fun)),
        n_points=len(x),
        extra={
            "birefringent_length_mm": float(L),
            "birefringent_length_std_mm": float(sd[1]),
        },
    )


def lorentzian_wavelength_spectrum(wavelength_nm, omega0: float, delta_omega: float, amplitude: float = 1.0):
    """Intensity per unit wavelength (per nm) of a Lorentzian line given in angular frequency."""
    lam_mm = np.asarray(wavelength_nm, dtype=float) * MM_PER_NM
    omega = 2.0 * np.pi * C_MM_PER_PS / lam_mm
    g = delta_omega / np.pi / ((omega - omega0) ** 2 + delta_omega**2)
    domega_dlam = 2.0 * np.pi * C_MM_PER_PS / lam_mm**2 * MM_PER_NM
    return amplitude * g * domega_dlam


def fit_spectrum(wavelength_nm, intensity) -> FitResult:
    """Fit a Lorentzian to a spectrum recorded per unit wavelength.

    The data are mapped to angular frequency (omega = 2 pi c / lambda, with the
    density rescaled by |d lambda / d omega|) and fitted there with parameters
    (area, center, half width).
    """
    lam = np.asarray(wavelength_nm, dtype=float)
    y = np.asarray(intensity, dtype=float)
    if lam.shape != y.shape or lam.ndim != 1:
        raise InputError("wavelength and intensity must be 1-d arrays of equal length")
    if len(lam) < 4:
        raise FitError(f"need at least 4 points, got {len(lam)}")
    if np.any(lam <= 0) or np.any(~np.isfinite(y)):
        raise InputError("wavelengths must be positive and intensities finite")

    lam_mm = lam * MM_PER_NM
    omega = 2.0 * np.pi * C_MM_PER_PS / lam_mm
    y_omega = y * lam_mm**2 / (2.0 * np.pi * C_MM_PER_PS) / MM_PER_NM
    order = np.argsort(omega)
    omega, y_omega = omega[order], y_omega[order]

    peak = int(np.argmax(y_omega))
    ref = omega[peak]
    u = omega - ref
    above = u[y_omega >= 0.5 * y_omega[peak]]
    hw0 = 0.5 * (above.max() - above.min()) if len(above) > 1 else np.ptp(u) / 10.0
    hw0 = hw0 if hw0 > 0 else np.ptp(u) / 10.0
    area0 = y_omega[peak] * np.pi * hw0

    def line(p):
        return p[0] * p[2] / np.pi / ((u - p[1]) ** 2 + p[2] ** 2)

    def jacobian(p):
        a, c0, w = p
        den = (u - c0) ** 2 + w**2
        return np.column_stack(
            [
                w / np.pi / den,
                a * w / np.pi * 2.0 * (u - c0) / den**2,
                a / np.pi * ((u - c0) ** 2 - w**2) / den**2,
            ]
        )

    res = least_squares(
        lambda p: line(p) - y_omega,
        [area0, 0.0, hw0],
        jac=jacobian,
        method="lm",
        x_scale="jac",
        xtol=_LSQ_TOL,
        ftol=_LSQ_TOL,
        gtol=_LSQ_TOL,
    )
    area, center, w = res.x
    w = abs(w)
    if not (res.success and np.isfinite(w) and w > 0):
        raise _diagnostic(f"spectrum fit failed: {res.message}", delta_omega_rad_per_ps=float(w))
    sd = _param_std(res.jac, res.fun)
    return FitResult(
        inv_delta_omega=1.0 / w,
        std_error=float(sd[2] / w**2),
        residual_norm=float(np.linalg.norm(res.fun)),
        n_points=len(lam),
        extra={
            "omega0_rad_per_ps": float(ref + center),
            "area": float(area),
        },
    )
