import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blpsim.errors import InvariantError
from blpsim.qubit import (
    DensityMatrix,
    PolarizationAngle,
    hermitian_eigvalsh_2x2,
    pure_state,
    pure_states,
    purity,
    trace_distance,
    trace_distances,
)
from oracles import linear_pure, random_density, trace_distance_eig

angles = st.floats(-720, 720, allow_nan=False)
bloch = st.tuples(*[st.floats(-1, 1)] * 3).filter(lambda v: np.dot(v, v) <= 1.0)


def dephased_equatorial(k):
    return np.array([[0.5, 0.5 * k], [0.5 * k, 0.5]], dtype=complex)


class TestPureState:
    @pytest.mark.parametrize(
        "phi, expected",
        [(0, [[1, 0], [0, 0]]), (90, [[0, 0], [0, 1]]), (45, [[0.5, 0.5], [0.5, 0.5]])],
    )
    def test_examples(self, phi, expected):
        np.testing.assert_allclose(pure_state(phi).entries, expected, atol=1e-15)

    @given(angles)
    def test_matches_outer_product(self, phi):
        np.testing.assert_allclose(pure_state(phi).entries, linear_pure(phi), atol=1e-12)

    @given(st.lists(angles, min_size=1, max_size=20))
    def test_vectorized_agrees(self, phis):
        stack = pure_states(phis)
        for phi, m in zip(phis, stack):
            np.testing.assert_allclose(m, pure_state(phi).entries, atol=1e-12)

    def test_accepts_angle_object(self):
        assert pure_state(PolarizationAngle(405.0)) == pure_state(45.0)


class TestPolarizationAngle:
    @given(angles)
    def test_normalized(self, phi):
        a = PolarizationAngle(phi)
        assert 0.0 <= a.degrees < 360.0
        assert np.isclose(np.cos(a.radians), np.cos(np.deg2rad(phi)), atol=1e-9)

    def test_wraps(self):
        assert PolarizationAngle(-90).degrees == 270.0
        assert PolarizationAngle(360).degrees == 0.0


class TestDensityMatrixInvariants:
    def test_rejects_non_hermitian(self):
        with pytest.raises(InvariantError):
            DensityMatrix([[0.5, 0.1], [0.2, 0.5]])

    def test_rejects_bad_trace(self):
        with pytest.raises(InvariantError):
            DensityMatrix([[0.6, 0], [0, 0.5]])

    def test_rejects_negative(self):
        with pytest.raises(InvariantError):
            DensityMatrix([[1.2, 0], [0, -0.2]])

    def test_rejects_wrong_shape(self):
        with pytest.raises(InvariantError):
            DensityMatrix(np.eye(3) / 3)

    def test_tolerance_edges(self):
        DensityMatrix([[0.5 + 5e-13, 0], [0, 0.5]])
        with pytest.raises(InvariantError):
            DensityMatrix([[0.5 + 5e-12, 0], [0, 0.5]])

    def test_immutable(self):
        rho = pure_state(30)
        with pytest.raises(ValueError):
            rho.entries[0, 0] = 0.0

    @given(bloch)
    def test_bloch_round_trip(self, v):
        rho = DensityMatrix.from_bloch(*v)
        np.testing.assert_allclose(rho.bloch, v, atol=1e-12)

    @settings(max_examples=200)
    @given(st.integers(0, 2**32 - 1))
    def test_random_states_valid(self, seed):
        m = random_density(np.random.default_rng(seed))
        rho = DensityMatrix(m)
        ev = np.linalg.eigvalsh(rho.entries)
        assert ev.min() >= -1e-10
        assert abs(np.trace(rho.entries) - 1) <= 1e-12


class TestEigenvalues:
    @settings(max_examples=200)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_lapack(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        h = a + a.conj().T
        np.testing.assert_allclose(hermitian_eigvalsh_2x2(h), np.linalg.eigvalsh(h), atol=1e-12)


class TestTraceDistance:
    def test_orthogonal(self):
        assert trace_distance(pure_state(45), pure_state(135)) == pytest.approx(1.0, abs=1e-15)

    def test_identity(self):
        rho = pure_state(17)
        assert trace_distance(rho, rho) == 0.0

    def test_dephased_antipodal_pair(self):
        # eigenvalues of rho1 - rho2 are +-|kappa| for the (135, 45) pair
        r1 = pure_state(135).entries.copy()
        r2 = pure_state(45).entries.copy()
        for r in (r1, r2):
            r[0, 1] *= 0.5
            r[1, 0] *= 0.5
        assert np.linalg.eigvalsh(r1 - r2) == pytest.approx([-0.5, 0.5])
        assert trace_distance(r1, r2) == pytest.approx(0.5, abs=1e-15)

    def test_rejects_invalid(self):
        with pytest.raises(InvariantError):
            trace_distance(np.array([[1, 1], [0, 0]]), pure_state(0))
        with pytest.raises(InvariantError):
            trace_distance(np.eye(2), pure_state(0))

    def test_linear_pairs_sin(self):
        th, xi = np.meshgrid(np.arange(0, 180, 5.0), np.arange(0, 180, 5.0))
        d = trace_distances(pure_states(th.ravel()), pure_states(xi.ravel()))
        np.testing.assert_allclose(d, np.abs(np.sin(np.deg2rad(th - xi))).ravel(), atol=1e-12)

    @settings(max_examples=200)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_lapack(self, seed):
        rng = np.random.default_rng(seed)
        a, b = random_density(rng), random_density(rng)
        assert trace_distance(a, b) == pytest.approx(trace_distance_eig(a, b), abs=1e-12)

    @given(st.integers(0, 2**32 - 1))
    def test_symmetry_and_triangle(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (random_density(rng) for _ in range(3))
        dab, dba = trace_distance(a, b), trace_distance(b, a)
        assert dab == dba
        assert 0.0 <= dab <= 1.0
        assert dab <= trace_distance(a, c) + trace_distance(c, b) + 1e-12


class TestPurity:
    def test_examples(self):
        assert purity(pure_state(30)) == pytest.approx(1.0, abs=1e-15)
        assert purity(np.eye(2) / 2) == pytest.approx(0.5)
        assert purity(dephased_equatorial(0.5)) == pytest.approx(0.625)

    @given(bloch)
    def test_bloch_formula(self, v):
        assert purity(DensityMatrix.from_bloch(*v)) == pytest.approx(0.5 * (1 + np.dot(v, v)), abs=1e-12)
