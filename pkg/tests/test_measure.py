import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blpsim.errors import InputError
from blpsim.measure import (
    blp_measure,
    canonical_pair,
    delta_D,
    increase_intervals,
    pair_distances,
    pick_best_pair,
    stage_grid,
    total_increase,
)
from blpsim.process import ProcessModel
from blpsim.qubit import pure_states, trace_distances
from oracles import GAIN_X0_10, GAIN_X0_25, N_DEFAULT, N_X0_10


class TestIntervals:
    def test_monotone_decreasing(self):
        assert increase_intervals([0, 1, 2, 3], [1.0, 0.8, 0.5, 0.1]) == []

    def test_too_few(self):
        with pytest.raises(InputError):
            increase_intervals([0.0], [1.0])

    def test_shape_mismatch(self):
        with pytest.raises(InputError):
            increase_intervals([0, 1, 2], [1.0, 0.5])

    def test_simple(self):
        ivs = increase_intervals([0, 1, 2, 3, 4, 5], [1.0, 0.5, 0.7, 0.9, 0.4, 0.6])
        assert [(iv.t_start, iv.t_end) for iv in ivs] == [(1, 3), (4, 5)]
        assert [iv.delta_D for iv in ivs] == pytest.approx([0.4, 0.2])

    @given(st.lists(st.floats(0, 1), min_size=2, max_size=60))
    def test_gains_sum_to_positive_increments(self, D):
        t = np.arange(len(D), dtype=float)
        ivs = increase_intervals(t, D, hysteresis=0.0)
        expected = np.clip(np.diff(D), 0, None).sum()
        assert sum(iv.delta_D for iv in ivs) == pytest.approx(expected, abs=1e-12)
        assert total_increase(D, hysteresis=0.0) == pytest.approx(expected, abs=1e-12)
        for iv in ivs:
            assert iv.t_start < iv.t_end and iv.delta_D > 0

    def test_default_single_interval(self, default_model):
        m = default_model
        t = stage_grid(m)
        D = pair_distances(m, [135.0], [45.0], t)[0]
        ivs = increase_intervals(t, D)
        assert len(ivs) == 1
        assert ivs[0].t_start == m.t0 and ivs[0].t_end == m.tf
        assert ivs[0].delta_D == pytest.approx(N_DEFAULT, abs=1e-9)

    def test_x0_25(self):
        m = ProcessModel.default_setup(x0_mm=25.0)
        assert m.tf < m.params.t1
        t = stage_grid(m)
        ivs = increase_intervals(t, pair_distances(m, [135.0], [45.0], t)[0])
        assert len(ivs) == 1
        assert ivs[0].delta_D == pytest.approx(GAIN_X0_25, abs=1e-9)
        assert ivs[0].delta_D == pytest.approx(0.327, abs=1e-3)


class TestPairs:
    @settings(max_examples=100)
    @given(st.floats(0, 360), st.floats(0, 360))
    def test_pair_distances_match_states(self, th, xi):
        m = ProcessModel.default_setup(x0_mm=10.0)
        t = np.array([0.0, m.t0, m.t1, m.tf])
        fast = pair_distances(m, [th], [xi], t)[0]
        k = m.kappa(t)
        r1, r2 = pure_states([th])[0], pure_states([xi])[0]
        ref = []
        for kk in k:
            a, b = r1.copy(), r2.copy()
            for r in (a, b):
                r[0, 1] *= np.conj(kk)
                r[1, 0] *= kk
            ref.append(trace_distances(a, b))
        np.testing.assert_allclose(fast, ref, atol=1e-12)

    def test_canonical(self):
        th, xi = canonical_pair([45.0, 315.0], [135.0, 225.0])
        assert list(th) == [135.0, 135.0] and list(xi) == [45.0, 45.0]

    def test_tie_break(self):
        assert pick_best_pair([135.0, 90.0, 95.0], [45.0, 0.0, 5.0], [1.0, 1.0, 0.5]) == 1


class TestBlpMeasure:
    def test_default_setup(self, default_model):
        r = blp_measure(default_model)
        assert r.best_pair == (135.0, 45.0)
        assert r.value == pytest.approx(0.972, abs=1e-3)
        assert r.value == pytest.approx(N_DEFAULT, abs=1e-9)
        assert r.value == pytest.approx(sum(iv.delta_D for iv in r.intervals), abs=1e-9)
        assert 0 <= r.value <= 1
        assert r.grid_resolution == 0.5

    def test_best_pair_orthogonal(self, default_model):
        th, xi = blp_measure(default_model, refine_deg=None).best_pair
        assert abs(th - xi) == 90.0

    def test_x0_10(self, short_model):
        # the revival is complete at t1 < t_f, so the total increase is
        # 1 - |kappa(t0)|, larger than D(t_f) - D(t0)
        r = blp_measure(short_model)
        assert r.value == pytest.approx(N_X0_10, abs=1e-9)
        assert len(r.intervals) == 1
        assert r.intervals[0].t_end == pytest.approx(short_model.t1)
        assert delta_D(short_model, *r.best_pair) == pytest.approx(GAIN_X0_10, abs=1e-9)

    def test_brute_force_agrees(self, short_model):
        m = short_model
        t = np.linspace(0, m.tf, 4001)
        t = np.union1d(t, [m.t0, m.t1])
        grid = np.arange(0, 180, 15.0)
        th, xi = np.meshgrid(grid, grid)
        D = pair_distances(m, th.ravel(), xi.ravel(), t)
        brute = np.clip(np.diff(D, axis=1), 0, None).sum(axis=1).max()
        assert blp_measure(m, resolution_deg=15.0, refine_deg=None).value == pytest.approx(brute, abs=1e-9)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.1, 40.0), st.floats(0, 180), st.floats(0, 180))
    def test_delay_only_is_zero(self, x0, th, xi):
        m = ProcessModel.default_setup(x0_mm=x0, fiber_length_m=0.0)
        r = blp_measure(m, thetas=[th, 135.0], xis=[xi, 45.0], refine_deg=None)
        assert r.value == 0.0 and r.intervals == []

    def test_omega0_invariance(self, short_model):
        a = blp_measure(short_model, refine_deg=None)
        b = blp_measure(short_model.with_omega0(3.7), refine_deg=None)
        assert a.value == pytest.approx(b.value, abs=1e-12)

    def test_empty_grid(self, default_model):
        with pytest.raises(InputError):
            blp_measure(default_model, thetas=[])

    def test_to_dict(self, default_model):
        d = blp_measure(default_model).to_dict()
        assert set(d) == {"value", "best_theta_deg", "best_xi_deg", "intervals", "grid_resolution_deg"}


class TestDeltaD:
    def test_examples(self, default_model):
        assert delta_D(default_model, 135, 45) == pytest.approx(0.972, abs=1e-3)
        assert delta_D(default_model, 33, 33) == 0.0
        assert delta_D(default_model, 0, 90) == pytest.approx(0.0, abs=1e-15)

    def test_unimodal_in_x0(self, default_model):
        x0 = np.arange(0, 40.0001, 0.5)
        gains = np.array([delta_D(default_model.with_x0(x), 135, 45) for x in x0])
        k = int(np.argmax(gains))
        assert np.all(np.diff(gains[: k + 1]) > 0)
        assert np.all(np.diff(gains[k:]) < 0)
