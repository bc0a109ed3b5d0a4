"""Tests for CAR and STCAR fields against dense oracles.

The oracles build the full precision (1/sigma^2) P_t (x) P_s with numpy
and score column-stacked fields with scipy's multivariate normal, so
they share nothing with the spectral code paths under test.
"""

import numpy as np
import pytest
from scipy import stats

from spillcheck.fields import (
    FactorizationError,
    FactorSpectrum,
    StcarStructure,
    car_log_density,
    factor_spectrum,
    sample_car,
    sample_stcar,
    stcar_log_density,
)
from spillcheck.graph import AdjacencyGraph, car_precision, rook_grid, temporal_path_graph
from spillcheck.models.profiles import CarParams, StcarParams


def _dense_precision(space: AdjacencyGraph, periods: int, params: StcarParams) -> np.ndarray:
    p_s = car_precision(space, params.rho_s).to_dense()
    p_t = car_precision(temporal_path_graph(periods), params.rho_t, "self-loop").to_dense()
    return np.kron(p_t, p_s) / params.sigma**2


def _dense_log_density(theta, space, periods, params) -> float:
    precision = _dense_precision(space, periods, params)
    vec = theta.ravel(order="F")
    cov = np.linalg.inv(precision)
    return float(stats.multivariate_normal(mean=np.zeros(vec.size), cov=cov).logpdf(vec))


def _random_instances(count: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    shapes = [(1, 2), (2, 2), (2, 3), (3, 3), (1, 4), (2, 4)]
    for _ in range(count):
        rows, cols = shapes[rng.integers(len(shapes))]
        space = rook_grid(rows, cols)
        periods = int(rng.integers(1, 64 // space.n_nodes + 1))
        periods = max(1, min(periods, 64 // space.n_nodes))
        params = StcarParams(
            sigma=float(rng.uniform(0.3, 2.0)),
            rho_s=float(rng.uniform(0.0, 0.99)),
            rho_t=float(rng.uniform(0.0, 0.99)),
        )
        theta = rng.normal(0.0, 1.5, size=(space.n_nodes, periods))
        yield space, periods, params, theta


class TestStcarLogDensity:
    """Exact log density against a dense full-covariance oracle."""

    def test_matches_dense_oracle_on_random_instances(self):
        for space, periods, params, theta in _random_instances(30):
            expected = _dense_log_density(theta, space, periods, params)
            actual = stcar_log_density(theta, space, periods, params)
            assert actual == pytest.approx(expected, abs=1e-8)

    def test_zero_field_is_normalising_constant(self):
        space, periods = rook_grid(2, 3), 4
        params = StcarParams(sigma=1.0, rho_s=0.7, rho_t=0.4)
        n = space.n_nodes * periods
        _, logdet = np.linalg.slogdet(_dense_precision(space, periods, params))
        expected = -0.5 * n * np.log(2 * np.pi) + 0.5 * logdet
        actual = stcar_log_density(np.zeros((6, 4)), space, periods, params)
        assert actual == pytest.approx(expected, abs=1e-10)

    def test_independent_when_rhos_are_zero(self):
        space, periods = rook_grid(2, 2), 3
        params = StcarParams(sigma=1.7, rho_s=0.0, rho_t=0.0)
        theta = np.random.default_rng(1).normal(size=(4, periods))
        m_s = space.degrees.astype(float)
        m_t = np.array([1.0, 2.0, 1.0])
        sd = params.sigma / np.sqrt(np.outer(m_s, m_t))
        expected = float(np.sum(stats.norm.logpdf(theta, 0.0, sd)))
        assert stcar_log_density(theta, space, periods, params) == pytest.approx(expected)

    def test_maximised_at_zero(self):
        space, periods = rook_grid(3, 3), 4
        params = StcarParams(sigma=0.8, rho_s=0.9, rho_t=0.5)
        at_zero = stcar_log_density(np.zeros((9, 4)), space, periods, params)
        rng = np.random.default_rng(2)
        for _ in range(20):
            candidate = rng.normal(size=(9, 4))
            assert stcar_log_density(candidate, space, periods, params) < at_zero

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="shape"):
            stcar_log_density(np.zeros((4, 2)), rook_grid(2, 2), 3, StcarParams())


class TestCarLogDensity:
    def test_two_node_path_matches_bivariate_normal(self):
        graph = rook_grid(1, 2)
        params = CarParams(sigma=1.3, rho=0.6)
        x = np.array([0.4, -1.1])
        precision = car_precision(graph, params.rho).to_dense() / params.sigma**2
        expected = stats.multivariate_normal(np.zeros(2), np.linalg.inv(precision)).logpdf(x)
        assert car_log_density(x, graph, params) == pytest.approx(expected, abs=1e-8)

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError, match="shape"):
            car_log_density(np.zeros(3), rook_grid(1, 2), CarParams())


class TestQuadraticParts:
    """a - rho_s b - rho_t c + rho_s rho_t d reproduces the quadratic form."""

    def test_identity_on_random_fields(self):
        structure = StcarStructure(rook_grid(3, 4), 5)
        rng = np.random.default_rng(3)
        for _ in range(10):
            theta = rng.normal(size=(12, 5))
            rho_s, rho_t = rng.uniform(0, 0.99, size=2)
            a, b, c, d = structure.quadratic_parts(theta)
            combined = a - rho_s * b - rho_t * c + rho_s * rho_t * d
            assert combined == pytest.approx(structure.quadratic(theta, rho_s, rho_t), rel=1e-12)

    def test_quadratic_matches_dense(self):
        space, periods = rook_grid(2, 3), 4
        params = StcarParams(sigma=1.0, rho_s=0.8, rho_t=0.3)
        theta = np.random.default_rng(4).normal(size=(6, 4))
        vec = theta.ravel(order="F")
        expected = vec @ _dense_precision(space, periods, params) @ vec
        actual = StcarStructure(space, periods).quadratic(theta, 0.8, 0.3)
        assert actual == pytest.approx(expected, rel=1e-12)


class TestFactorSpectrum:
    @pytest.mark.parametrize("rho", [0.0, 0.3, 0.9, 0.999])
    def test_logdet_matches_dense(self, rho):
        graph = rook_grid(3, 3)
        _, expected = np.linalg.slogdet(car_precision(graph, rho).to_dense())
        assert factor_spectrum(graph).logdet(rho) == pytest.approx(expected, abs=1e-9)

    def test_covariance_inverts_precision(self):
        graph = rook_grid(2, 3)
        cov = factor_spectrum(graph).covariance(0.7)
        precision = car_precision(graph, 0.7).to_dense()
        np.testing.assert_allclose(cov @ precision, np.eye(6), atol=1e-10)

    def test_single_period_temporal_factor_is_unit(self):
        structure = StcarStructure(rook_grid(2, 2), 1)
        assert structure.time_degrees.tolist() == [1.0]
        assert structure.time_spectrum.logdet(0.5) == pytest.approx(0.0)

    def test_non_positive_shrinkage_raises_with_condition(self):
        spectrum = FactorSpectrum(
            degrees=np.ones(2), eigenvalues=np.array([-0.5, 2.0]), vectors=np.eye(2)
        )
        with pytest.raises(FactorizationError, match="condition number") as info:
            spectrum.logdet(0.6)
        assert info.value.condition is not None
        assert isinstance(info.value, np.linalg.LinAlgError)


class TestSampling:
    def test_seeded_reproducible(self):
        graph = rook_grid(3, 3)
        a = sample_stcar(graph, 4, StcarParams(), np.random.default_rng(5))
        b = sample_stcar(graph, 4, StcarParams(), np.random.default_rng(5))
        np.testing.assert_array_equal(a, b)

    def test_scale_equivariance(self):
        graph = rook_grid(3, 3)
        one = sample_car(graph, CarParams(sigma=1.0, rho=0.5), np.random.default_rng(6))
        two = sample_car(graph, CarParams(sigma=2.0, rho=0.5), np.random.default_rng(6))
        np.testing.assert_allclose(two, 2.0 * one)

    def test_independent_two_node_variances(self):
        draws = sample_car(
            rook_grid(1, 2), CarParams(sigma=1.0, rho=0.0), np.random.default_rng(7), size=100_000
        )
        np.testing.assert_allclose(draws.var(axis=0), [1.0, 1.0], rtol=0.03)

    def test_two_node_covariance(self):
        draws = sample_car(
            rook_grid(1, 2), CarParams(sigma=1.0, rho=0.5), np.random.default_rng(8), size=100_000
        )
        expected = np.array([[1.0, 0.5], [0.5, 1.0]]) / 0.75
        np.testing.assert_allclose(np.cov(draws.T), expected, rtol=0.03)

    def test_stcar_covariance_matches_kronecker_inverse(self):
        space, periods = rook_grid(2, 2), 3
        params = StcarParams(sigma=1.0, rho_s=0.9, rho_t=0.5)
        draws = sample_stcar(space, periods, params, np.random.default_rng(9), size=100_000)
        vecs = draws.transpose(0, 2, 1).reshape(draws.shape[0], -1)
        expected = np.linalg.inv(_dense_precision(space, periods, params))
        scale = expected.diagonal().max()
        np.testing.assert_allclose(np.cov(vecs.T), expected, atol=0.05 * scale)

    def test_sample_shapes(self):
        structure = StcarStructure(rook_grid(2, 3), 4)
        rng = np.random.default_rng(10)
        assert structure.sample(StcarParams(), rng).shape == (6, 4)
        assert structure.sample(StcarParams(), rng, size=3).shape == (3, 6, 4)
