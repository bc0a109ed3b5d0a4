"""Tests for mobility aggregation and neighbor imputation."""

import math

import numpy as np
import pandas as pd
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spillcheck.dataio import (
    MOBILITY_CATEGORIES,
    MobilityPanel,
    aggregate_mobility,
    donor_weights,
    haversine_distances,
    impute_missing,
)
from spillcheck.graph import AdjacencyGraph

DATES = pd.date_range("2020-03-06", periods=3, freq="D")


def _panel(rows: list[dict]) -> MobilityPanel:
    frame = pd.DataFrame(rows)
    centroids = pd.DataFrame({"county": ["a"], "lat": [0.0], "lon": [0.0]})
    return MobilityPanel.from_frame(frame, centroids)


def _row(date, **values) -> dict:
    row = {"county": "a", "date": date}
    row.update({c: values.get(c, np.nan) for c in MOBILITY_CATEGORIES})
    return row


def _path_values(first: list[float], second: list[float], third: list[float]) -> pd.DataFrame:
    return pd.DataFrame([first, second, third], index=["a", "b", "c"], columns=DATES)


class TestAggregateMobility:
    def test_residential_is_negated(self):
        panel = _panel(
            [
                _row(
                    "2020-03-06",
                    retail_recreation=-30.0,
                    grocery_pharmacy=-10.0,
                    transit=-40.0,
                    workplace=-20.0,
                    residential=10.0,
                )
            ]
        )
        table = aggregate_mobility(panel)
        assert table.loc["a"].iloc[0] == pytest.approx(-22.0)

    def test_mean_over_available_categories(self):
        panel = _panel([_row("2020-03-06", residential=10.0)])
        assert aggregate_mobility(panel).loc["a"].iloc[0] == pytest.approx(-10.0)

    def test_no_category_stays_missing(self):
        panel = _panel([_row("2020-03-06"), _row("2020-03-07", workplace=-5.0)])
        table = aggregate_mobility(panel)
        assert math.isnan(table.loc["a"].iloc[0])
        assert table.loc["a"].iloc[1] == -5.0

    @given(order=st.permutations(MOBILITY_CATEGORIES))
    def test_category_order_is_irrelevant(self, order):
        row = _row(
            "2020-03-06",
            retail_recreation=-31.0,
            grocery_pharmacy=4.5,
            workplace=-12.25,
            residential=7.0,
        )
        shuffled = pd.DataFrame([row])[["county", "date", *order]]
        centroids = pd.DataFrame({"county": ["a"], "lat": [0.0], "lon": [0.0]})
        table = aggregate_mobility(MobilityPanel.from_frame(shuffled, centroids))
        assert table.loc["a"].iloc[0] == pytest.approx((-31.0 + 4.5 - 12.25 - 7.0) / 4)


class TestMobilityPanel:
    def test_missing_category_column(self):
        frame = pd.DataFrame([_row("2020-03-06", workplace=1.0)]).drop(columns="transit")
        centroids = pd.DataFrame({"county": ["a"], "lat": [0.0], "lon": [0.0]})
        with pytest.raises(ValueError, match="missing categories: transit"):
            MobilityPanel.from_frame(frame, centroids)

    def test_duplicate_rows(self):
        with pytest.raises(ValueError, match="duplicate"):
            _panel([_row("2020-03-06", workplace=1.0), _row("2020-03-06", workplace=2.0)])

    def test_centroids_need_coordinates(self):
        frame = pd.DataFrame([_row("2020-03-06", workplace=1.0)])
        with pytest.raises(ValueError, match="'lon'"):
            MobilityPanel.from_frame(frame, pd.DataFrame({"county": ["a"], "lat": [0.0]}))


class TestDistances:
    def test_one_degree_of_latitude(self):
        d = haversine_distances(np.array([0.0, 1.0]), np.array([0.0, 0.0]))
        assert d[0, 1] == pytest.approx(111.19, abs=0.01)
        assert d[1, 0] == d[0, 1]
        assert np.all(np.diag(d) == 0.0)

    def test_donor_weights_are_inverse_distance(self):
        np.testing.assert_allclose(donor_weights(np.array([1.0, 2.0])), [2 / 3, 1 / 3])


class TestImputeMissing:
    path = AdjacencyGraph.from_edges(3, [(0, 1), (1, 2)])
    distances = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]])

    def test_inverse_distance_weighting(self):
        values = _path_values([np.nan, 5.0, 5.0], [0.0, 5.0, 5.0], [3.0, 5.0, 5.0])
        filled, report = impute_missing(values, self.path, self.distances)
        assert filled.loc["a"].iloc[0] == pytest.approx(1.0)
        assert report.filled == 1
        assert report.unfilled == []

    def test_only_observed_values_donate(self):
        values = _path_values([np.nan, 1.0, 1.0], [np.nan, 1.0, 1.0], [6.0, 1.0, 1.0])
        filled, report = impute_missing(values, self.path, self.distances)
        assert filled.loc["a"].iloc[0] == pytest.approx(6.0)
        assert filled.loc["b"].iloc[0] == pytest.approx(6.0)
        assert report.filled == 2

    def test_no_donor_leaves_gap(self):
        values = pd.DataFrame([[np.nan, 1.0], [2.0, 2.0]], index=["a", "b"], columns=DATES[:2])
        lonely = AdjacencyGraph.from_edges(2, [])
        filled, report = impute_missing(values, lonely, np.ones((2, 2)))
        assert math.isnan(filled.loc["a"].iloc[0])
        assert report.unfilled == [("a", "2020-03-06")]

    def test_shared_centroid_uses_nearest_positive_distance(self):
        distances = self.distances.copy()
        distances[0, 1] = distances[1, 0] = 0.0
        values = _path_values([np.nan, 5.0, 5.0], [0.0, 5.0, 5.0], [3.0, 5.0, 5.0])
        with pytest.warns(RuntimeWarning, match="shares a centroid"):
            filled, report = impute_missing(values, self.path, distances)
        assert filled.loc["a"].iloc[0] == pytest.approx(1.5)
        assert report.zero_distance_pairs == [("a", "b")]

    def test_observed_cells_untouched(self):
        values = _path_values([np.nan, 5.0, 4.0], [0.0, 5.0, 5.0], [3.0, 5.0, 5.0])
        filled, _ = impute_missing(values, self.path, self.distances)
        np.testing.assert_array_equal(filled.to_numpy()[:, 1:], values.to_numpy()[:, 1:])

    def test_shape_checks(self):
        values = _path_values([1.0] * 3, [1.0] * 3, [1.0] * 3)
        with pytest.raises(ValueError, match="3-node graph"):
            impute_missing(values.iloc[:2], self.path, self.distances)
        with pytest.raises(ValueError, match="distances has shape"):
            impute_missing(values, self.path, np.ones((2, 2)))
