"""Tests for the standardised least-squares fit."""

import numpy as np
import pytest

from spillcheck.propensity import fit_least_squares


def _design(rng: np.random.Generator, n: int = 200) -> np.ndarray:
    return np.column_stack(
        [np.ones(n), rng.normal(5.0, 100.0, n), rng.normal(size=n), rng.uniform(0, 1e-3, n)]
    )


class TestFitLeastSquares:
    def test_matches_svd_solution(self):
        rng = np.random.default_rng(0)
        rows = _design(rng)
        targets = rng.normal(size=rows.shape[0])
        expected, *_ = np.linalg.lstsq(rows, targets, rcond=None)
        fit = fit_least_squares(rows, targets)
        np.testing.assert_allclose(fit.coefficients, expected, rtol=1e-7, atol=1e-12)
        assert fit.rank == 4
        assert not fit.pseudoinverse

    def test_recovers_exact_linear_relation(self):
        rows = _design(np.random.default_rng(1))
        truth = np.array([2.0, -0.01, 0.7, 300.0])
        fit = fit_least_squares(rows, rows @ truth)
        np.testing.assert_allclose(fit.coefficients, truth, rtol=1e-8)
        np.testing.assert_allclose(fit.residuals, 0.0, atol=1e-9)

    def test_intercept_only_gives_the_mean(self):
        targets = np.array([1.0, 2.0, 6.0])
        fit = fit_least_squares(np.ones((3, 1)), targets)
        assert fit.coefficients[0] == pytest.approx(3.0)
        np.testing.assert_allclose(fit.fitted, 3.0)

    def test_without_intercept_fits_through_origin(self):
        rows = np.array([[1.0], [2.0], [3.0]])
        fit = fit_least_squares(rows, np.array([2.0, 4.0, 7.0]))
        assert fit.coefficients[0] == pytest.approx(31.0 / 14.0)

    def test_fitted_invariant_to_affine_rescaling(self):
        rng = np.random.default_rng(2)
        rows = _design(rng)
        targets = rng.normal(size=rows.shape[0])
        rescaled = rows.copy()
        rescaled[:, 2] = 1000.0 * rescaled[:, 2] + 5.0
        np.testing.assert_allclose(
            fit_least_squares(rows, targets).fitted,
            fit_least_squares(rescaled, targets).fitted,
            atol=1e-10,
        )

    def test_fitted_plus_residuals_reassemble_targets(self):
        rng = np.random.default_rng(3)
        rows = _design(rng)
        targets = rng.normal(size=rows.shape[0])
        fit = fit_least_squares(rows, targets)
        np.testing.assert_allclose(fit.fitted + fit.residuals, targets)
        np.testing.assert_allclose(fit.fitted, rows @ fit.coefficients, atol=1e-10)


class TestRankDeficiency:
    def test_duplicate_column_warns_and_uses_pseudoinverse(self):
        rng = np.random.default_rng(4)
        base = _design(rng)
        rows = np.column_stack([base, base[:, 2]])
        targets = base @ np.array([1.0, 0.0, 2.0, 0.0])
        with pytest.warns(RuntimeWarning, match="rank deficient"):
            fit = fit_least_squares(rows, targets)
        assert fit.pseudoinverse
        assert fit.rank == 4
        # Minimum norm splits the duplicated effect evenly.
        assert fit.coefficients[2] == pytest.approx(fit.coefficients[4], rel=1e-6)
        np.testing.assert_allclose(fit.fitted, targets, atol=1e-8)


class TestInputValidation:
    def test_misaligned_shapes(self):
        with pytest.raises(ValueError, match="do not align"):
            fit_least_squares(np.ones((4, 2)), np.ones(3))

    def test_no_observations(self):
        with pytest.raises(ValueError, match="no observations"):
            fit_least_squares(np.ones((0, 2)), np.ones(0))
