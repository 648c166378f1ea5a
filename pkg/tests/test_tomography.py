import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blpsim.errors import InvariantError, TomographyError
from blpsim.experiment import monte_carlo_delta_D
from blpsim.qubit import DensityMatrix, pure_state
from blpsim.tomography import (
    PROJECTOR_NAMES,
    CountingConfig,
    correct_dark_counts,
    expected_counts,
    linear_inversion,
    project_to_density,
    projector,
    simulate_tomography,
    trial_rng,
)
from oracles import random_density


def test_projectors_are_pure_states():
    for name in PROJECTOR_NAMES:
        p = projector(name)
        np.testing.assert_allclose(p @ p, p, atol=1e-15)
        assert np.trace(p).real == pytest.approx(1.0)
    np.testing.assert_allclose(projector("D"), pure_state(45).entries, atol=1e-15)


@given(st.integers(0, 2**32 - 1))
def test_linear_inversion_exact_on_means(seed):
    rho = random_density(np.random.default_rng(seed))
    cfg = CountingConfig(1000.0, 1.0, 0.0)
    s, total = linear_inversion(expected_counts(rho, cfg))
    np.testing.assert_allclose(s, DensityMatrix(rho).bloch, atol=1e-12)
    assert total == pytest.approx(1000.0)


def test_infinite_count_limit():
    cfg = CountingConfig(7000.0 * 1e6, 4.0, 0.0, rng_seed=3)
    rho = DensityMatrix(random_density(np.random.default_rng(11)))
    rec = simulate_tomography(rho, cfg)
    np.testing.assert_allclose(rec.rho.entries, rho.entries, atol=1e-3)


def test_dark_only_gives_mixed_state():
    cfg = CountingConfig(0.0, 1e4, 1e4, rng_seed=5)
    rec = simulate_tomography(pure_state(30), cfg)
    np.testing.assert_allclose(rec.rho.entries, np.eye(2) / 2, atol=1e-2)


def test_counts_are_nonnegative_integers():
    rec = simulate_tomography(pure_state(45), CountingConfig())
    assert rec.counts.dtype.kind == "i" and np.all(rec.counts >= 0)
    assert rec.counts.shape == (4,)


def test_seeded_reproducible():
    cfg = CountingConfig(rng_seed=42)
    a = simulate_tomography(pure_state(45), cfg)
    b = simulate_tomography(pure_state(45), cfg)
    assert a.counts.tobytes() == b.counts.tobytes()
    assert a.rho == b.rho
    c = simulate_tomography(pure_state(45), cfg, rng=trial_rng(42, 1))
    d = simulate_tomography(pure_state(45), cfg, rng=trial_rng(42, 2))
    assert not np.array_equal(c.counts, d.counts)


def test_dark_free_correction_is_identity():
    cfg = CountingConfig(dark_rate=0.0)
    rec = simulate_tomography(pure_state(10), cfg)
    assert correct_dark_counts(rec, cfg) is rec


def test_correction_below_dark_raises():
    cfg = CountingConfig(signal_rate=0.0, dark_rate=1.0, integration_time=1.0, rng_seed=0)
    rec = simulate_tomography(pure_state(0), cfg)
    rec = type(rec)(rec.expected, np.zeros(4, dtype=int), rec.rho, rec.raw_rho, rec.projected, rec.std_errors)
    with pytest.raises(TomographyError):
        correct_dark_counts(rec, cfg)


def test_zero_counts_raise():
    with pytest.raises(TomographyError):
        linear_inversion(np.zeros(4))


def test_correction_restores_purity():
    cfg = CountingConfig(rng_seed=9)
    rec = simulate_tomography(pure_state(45), cfg)
    cor = correct_dark_counts(rec, cfg)
    assert cor.dark_corrected and not rec.dark_corrected
    assert np.linalg.norm(cor.rho.bloch) > np.linalg.norm(rec.rho.bloch)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_reconstruction_is_valid_state(seed):
    # pure input with few counts often lands outside the Bloch ball
    cfg = CountingConfig(20.0, 1.0, 2.0)
    rec = simulate_tomography(pure_state(45), cfg, rng=np.random.default_rng(seed))
    assert isinstance(rec.rho, DensityMatrix)
    if rec.projected:
        assert np.linalg.norm(rec.rho.bloch) <= 1 + 1e-12


def test_projection_is_nearest_in_spectrum():
    m = np.array([[1.1, 0], [0, -0.1]], dtype=complex)
    np.testing.assert_allclose(project_to_density(m), [[1, 0], [0, 0]], atol=1e-15)


def test_invalid_config():
    with pytest.raises(InvariantError):
        CountingConfig(signal_rate=-1.0)
    with pytest.raises(InvariantError):
        CountingConfig(integration_time=0.0)


def test_monte_carlo_direction(default_model):
    raw, cor = monte_carlo_delta_D(default_model, CountingConfig(), n_trials=300)
    assert raw.mean < 0.9718
    assert cor.mean > raw.mean
    assert abs(cor.mean - 0.972) < abs(raw.mean - 0.972)
