"""Run configuration: a single JSON document whose physical keys carry units.

Missing keys take the defaults below, which reproduce the reference setup.
Unknown keys, wrong types and unphysical values are rejected before any
computation, with the dotted key name in the error.
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from .errors import ConfigError, InvariantError
from .process import ExperimentParams, ProcessModel, Spectrum, omega_from_wavelength
from .tomography import CountingConfig

DEFAULTS: dict[str, Any] = {
    "process": {
        "x0_mm": 19.15,
        "fiber_length_m": 100.0,
        "delta_n": 3.83e-4,
        "n_bar": 1.45,
        "inv_delta_omega_ps": 35.8,
        "wavelength_nm": 946.3,
        "omega0_rad_per_ps": None,
    },
    "counting": {
        "signal_rate_per_s": 7000.0,
        "integration_time_s": 4.0,
        "dark_rate_per_s": 150.0,
    },
    "pair": {"theta_deg": 135.0, "xi_deg": 45.0},
    "trajectory": {"n_intervals": 20000},
    "sweep_delay": {
        "x0_start_mm": 0.0,
        "x0_stop_mm": 40.0,
        "x0_step_mm": 0.05,
        "counting_noise": False,
        "dark_correction": True,
    },
    "sweep_angles": {
        "start_deg": 0.0,
        "stop_deg": 180.0,
        "step_deg": 5.0,
        "inset_half_width_deg": 10.0,
        "inset_step_deg": 1.0,
    },
    "measure": {"resolution_deg": 5.0, "refine_deg": 0.5, "monte_carlo_trials": 0},
    "fit": {"kind": "delay"},
    "output_dir": "out",
    "seed": 0,
}

_POSITIVE = {
    "process.fiber_length_m": False,
    "process.inv_delta_omega_ps": True,
    "process.wavelength_nm": True,
    "process.x0_mm": False,
    "counting.signal_rate_per_s": False,
    "counting.dark_rate_per_s": False,
    "counting.integration_time_s": True,
    "trajectory.n_intervals": True,
    "sweep_delay.x0_start_mm": False,
    "sweep_delay.x0_step_mm": True,
    "sweep_angles.step_deg": True,
    "sweep_angles.inset_half_width_deg": False,
    "sweep_angles.inset_step_deg": True,
    "measure.resolution_deg": True,
    "measure.refine_deg": False,
    "measure.monte_carlo_trials": False,
}


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _merge(defaults: dict, given: dict, prefix: str = "") -> dict:
    if not isinstance(given, dict):
        raise ConfigError(prefix.rstrip(".") or "<root>", "expected a JSON object")
    out = copy.deepcopy(defaults)
    for key, value in given.items():
        name = f"{prefix}{key}"
        if key not in defaults:
            raise ConfigError(name, "unknown key")
        default = defaults[key]
        if isinstance(default, dict):
            out[key] = _merge(default, value, f"{name}.")
        elif isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(name, f"expected true/false, got {value!r}")
            out[key] = value
        elif isinstance(default, int) and not isinstance(default, bool):
            if not (isinstance(value, int) and not isinstance(value, bool)):
                raise ConfigError(name, f"expected an integer, got {value!r}")
            out[key] = value
        elif _is_number(default) or default is None:
            if not _is_number(value) and not (default is None and value is None):
                raise ConfigError(name, f"expected a number, got {value!r}")
            out[key] = value
        else:
            if not isinstance(value, type(default)):
                raise ConfigError(name, f"expected {type(default).__name__}, got {value!r}")
            out[key] = value
    return out


def _get(d: dict, dotted: str):
    for part in dotted.split("."):
        d = d[part]
    return d


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration (``raw`` holds every key, defaults filled in)."""

    raw: dict

    @classmethod
    def from_dict(cls, given: Optional[dict] = None) -> "RunConfig":
        raw = _merge(DEFAULTS, given or {})
        for name, strict in _POSITIVE.items():
            v = _get(raw, name)
            if v != v or (strict and not v > 0) or (not strict and v < 0):  # NaN or out of range
                raise ConfigError(name, f"must be {'> 0' if strict else '>= 0'}, got {v!r}")
        p = raw["process"]
        if not 0 < p["delta_n"] < p["n_bar"]:
            raise ConfigError("process.delta_n", f"need 0 < delta_n < n_bar, got {p['delta_n']!r}")
        sd = raw["sweep_delay"]
        if sd["x0_stop_mm"] < sd["x0_start_mm"]:
            raise ConfigError("sweep_delay.x0_stop_mm", "must be >= x0_start_mm")
        sa = raw["sweep_angles"]
        if sa["stop_deg"] <= sa["start_deg"]:
            raise ConfigError("sweep_angles.stop_deg", "must be > start_deg")
        if raw["fit"]["kind"] not in ("delay", "spectrum"):
            raise ConfigError("fit.kind", f"must be 'delay' or 'spectrum', got {raw['fit']['kind']!r}")
        if not isinstance(raw["output_dir"], str) or not raw["output_dir"]:
            raise ConfigError("output_dir", "must be a non-empty path string")
        cfg = cls(raw)
        try:
            cfg.model()
            cfg.counting()
        except InvariantError as exc:
            raise ConfigError("process", str(exc)) from exc
        return cfg

    @classmethod
    def load(cls, path, overrides: Optional[dict] = None) -> "RunConfig":
        text = Path(path).read_text()
        try:
            given = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        given = dict(given) if isinstance(given, dict) else given
        if overrides:
            given = {**given, **overrides}
        return cls.from_dict(given)

    def model(self, x0_mm: Optional[float] = None) -> ProcessModel:
        p = self.raw["process"]
        omega0 = p["omega0_rad_per_ps"]
        if omega0 is None:
            omega0 = omega_from_wavelength(p["wavelength_nm"])
        return ProcessModel(
            Spectrum(float(omega0), 1.0 / p["inv_delta_omega_ps"]),
            ExperimentParams(
                x0_mm=float(p["x0_mm"] if x0_mm is None else x0_mm),
                fiber_length_m=float(p["fiber_length_m"]),
                delta_n=float(p["delta_n"]),
                n_bar=float(p["n_bar"]),
            ),
        )

    def counting(self) -> CountingConfig:
        c = self.raw["counting"]
        return CountingConfig(
            signal_rate=float(c["signal_rate_per_s"]),
            integration_time=float(c["integration_time_s"]),
            dark_rate=float(c["dark_rate_per_s"]),
            rng_seed=self.seed,
        )

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])

    @property
    def pair(self) -> tuple[float, float]:
        return float(self.raw["pair"]["theta_deg"]), float(self.raw["pair"]["xi_deg"])

    @property
    def output_dir(self) -> Path:
        return Path(self.raw["output_dir"])

    def section(self, name: str) -> dict:
        return self.raw[name]
