import json

import pytest

from blpsim.config import DEFAULTS, RunConfig
from blpsim.errors import ConfigError


def test_defaults_reproduce_reference_setup():
    cfg = RunConfig.from_dict({})
    m = cfg.model()
    assert m.params.x0_mm == 19.15 and m.spectrum.inv_delta_omega == pytest.approx(35.8)
    assert cfg.pair == (135.0, 45.0)
    assert cfg.counting().signal_rate == 7000.0


@pytest.mark.parametrize(
    "given, field",
    [
        ({"process": {"x0_mm": -1.0}}, "process.x0_mm"),
        ({"process": {"inv_delta_omega_ps": 0}}, "process.inv_delta_omega_ps"),
        ({"process": {"delta_n": 2.0}}, "process.delta_n"),
        ({"process": {"colour": 1}}, "process.colour"),
        ({"counting": {"dark_rate_per_s": "high"}}, "counting.dark_rate_per_s"),
        ({"trajectory": {"n_intervals": 1.5}}, "trajectory.n_intervals"),
        ({"sweep_delay": {"counting_noise": 1}}, "sweep_delay.counting_noise"),
        ({"fit": {"kind": "other"}}, "fit.kind"),
        ({"seed": "x"}, "seed"),
    ],
)
def test_rejects_naming_field(given, field):
    with pytest.raises(ConfigError) as exc:
        RunConfig.from_dict(given)
    assert exc.value.field == field
    assert field in str(exc.value)


def test_load_bad_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        RunConfig.load(p)


def test_load_with_overrides(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"seed": 3, "process": {"x0_mm": 10.0}}))
    cfg = RunConfig.load(p, {"seed": 9})
    assert cfg.seed == 9 and cfg.model().params.x0_mm == 10.0
    assert set(cfg.raw) == set(DEFAULTS)
