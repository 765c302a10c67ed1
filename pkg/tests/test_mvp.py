import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_cov
from portlab import mvp
from portlab.errors import SingularMatrixError


def synthetic_ten_asset_case():
    """Pinned 10-asset daily covariance and annual means for oracle checks."""
    rng = np.random.default_rng(42)
    data = rng.normal(0, 1.0, size=(250, 10)) * rng.uniform(0.009, 0.012, size=10)
    sigma = np.atleast_2d(np.cov(data, rowvar=False, ddof=1))
    mu = rng.uniform(0.05, 0.25, size=10)
    return mu, sigma


def annual_vol(weights: np.ndarray, sigma: np.ndarray, trading_days: int = 252) -> float:
    return math.sqrt(max(float(weights @ sigma @ weights), 0.0) * trading_days)


class TestEqualWeight:
    def test_ten_assets(self):
        port = mvp.equal_weight(10)
        assert np.all(port.weights == 0.1)

    def test_single_asset(self):
        assert mvp.equal_weight(1).weights.tolist() == [1.0]

    def test_four_assets(self):
        assert np.all(mvp.equal_weight(4).weights == 0.25)

    def test_zero_assets_rejected(self):
        with pytest.raises(ValueError):
            mvp.equal_weight(0)


class TestSamplePortfolios:
    def test_count_and_seeded_determinism(self):
        mu, sigma = synthetic_ten_asset_case()
        a = mvp.sample_portfolios(mu, sigma, 500, 0.01, seed=3)
        b = mvp.sample_portfolios(mu, sigma, 500, 0.01, seed=3)
        assert a.sample_count == len(a.points) == 500
        assert np.array_equal(
            np.stack([p.weights for p in a.points]),
            np.stack([p.weights for p in b.points]),
        )
        assert np.array_equal(a.volatilities(), b.volatilities())

    def test_different_seed_differs(self):
        mu, sigma = synthetic_ten_asset_case()
        a = mvp.sample_portfolios(mu, sigma, 100, 0.01, seed=3)
        b = mvp.sample_portfolios(mu, sigma, 100, 0.01, seed=4)
        assert not np.array_equal(a.volatilities(), b.volatilities())

    def test_prefix_stability_across_counts(self):
        # chunked sampling: a shorter cloud is a prefix of a longer one
        mu, sigma = synthetic_ten_asset_case()
        small = mvp.sample_portfolios(mu, sigma, 700, 0.01, seed=9)
        large = mvp.sample_portfolios(mu, sigma, 1500, 0.01, seed=9)
        assert np.array_equal(small.volatilities(), large.volatilities()[:700])

    def test_single_asset_degenerate(self):
        cloud = mvp.sample_portfolios(
            np.array([0.1]), np.array([[1e-4]]), 50, 0.01, seed=1
        )
        weights = np.stack([p.weights for p in cloud.points])
        assert np.all(weights == 1.0)
        assert np.unique(cloud.volatilities()).size == 1

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_weights_on_simplex(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 8))
        sigma = random_cov(rng, n)
        mu = rng.uniform(0.0, 0.3, size=n)
        cloud = mvp.sample_portfolios(mu, sigma, 64, 0.01, seed=seed)
        weights = np.stack([p.weights for p in cloud.points])
        assert np.all(weights >= 0)
        assert np.max(np.abs(weights.sum(axis=1) - 1.0)) < 1e-9

    def test_count_must_be_positive(self):
        mu, sigma = synthetic_ten_asset_case()
        with pytest.raises(ValueError):
            mvp.sample_portfolios(mu, sigma, 0, 0.01, seed=1)


class TestMinRiskAndMaxSharpe:
    def _hand_cloud(self):
        # point 0 dominates point 1: higher return at lower volatility
        points = (
            mvp.FrontierPoint(0.10, 0.30, (0.30 - 0.01) / 0.10, np.array([1.0, 0.0])),
            mvp.FrontierPoint(0.20, 0.20, (0.20 - 0.01) / 0.20, np.array([0.0, 1.0])),
        )
        return mvp.FrontierCloud(points, seed=0, sample_count=2, risk_free=0.01)

    def test_dominant_point_wins_both(self):
        cloud = self._hand_cloud()
        assert mvp.min_risk_portfolio(cloud) is cloud.points[0]
        assert mvp.max_sharpe_portfolio(cloud) is cloud.points[0]

    def test_singleton_cloud(self):
        point = mvp.FrontierPoint(0.2, 0.1, (0.1 - 0.01) / 0.2, np.array([1.0]))
        cloud = mvp.FrontierCloud((point,), seed=0, sample_count=1, risk_free=0.01)
        assert mvp.min_risk_portfolio(cloud) is point
        assert mvp.max_sharpe_portfolio(cloud) is point

    def test_two_asset_equal_variance_optimum_is_half_half(self):
        sigma = np.diag([1e-4, 1e-4])
        cloud = mvp.sample_portfolios(
            np.array([0.1, 0.1]), sigma, 10_000, 0.01, seed=11
        )
        best = mvp.min_risk_portfolio(cloud)
        assert best.weights == pytest.approx([0.5, 0.5], abs=0.05)

    def test_argmax_contract(self):
        mu, sigma = synthetic_ten_asset_case()
        cloud = mvp.sample_portfolios(mu, sigma, 2000, 0.01, seed=5)
        best = mvp.max_sharpe_portfolio(cloud)
        assert best.sharpe >= cloud.sharpes().max()

    def test_sharpe_invariant_as_stored(self):
        mu, sigma = synthetic_ten_asset_case()
        cloud = mvp.sample_portfolios(mu, sigma, 500, 0.013, seed=5)
        best = mvp.max_sharpe_portfolio(cloud)
        assert abs(best.sharpe - (best.annual_return - 0.013) / best.annual_volatility) <= 1e-9

    def test_mc_min_vol_vs_closed_form(self):
        mu, sigma = synthetic_ten_asset_case()
        oracle = mvp.closed_form_min_variance(sigma)
        assert oracle.long_only
        vol_star = annual_vol(oracle.weights, sigma)
        cloud = mvp.sample_portfolios(mu, sigma, 10_000, 0.01, seed=7)
        vol_mc = mvp.min_risk_portfolio(cloud).annual_volatility
        assert vol_mc >= vol_star
        assert (vol_mc - vol_star) / vol_star < 0.05

    def test_min_vol_monotone_in_sample_count(self):
        mu, sigma = synthetic_ten_asset_case()
        vols = []
        for count in (500, 1500, 4000):
            cloud = mvp.sample_portfolios(mu, sigma, count, 0.01, seed=13)
            vols.append(mvp.min_risk_portfolio(cloud).annual_volatility)
        assert vols[0] >= vols[1] >= vols[2]


class TestEfficientFrontier:
    def test_identical_points_collapse(self):
        point = mvp.FrontierPoint(0.2, 0.1, (0.1 - 0.01) / 0.2, np.array([1.0]))
        cloud = mvp.FrontierCloud((point,) * 3, seed=0, sample_count=3, risk_free=0.01)
        frontier = mvp.efficient_frontier(cloud, bins=10)
        assert len(frontier) == 1

    def test_single_bin_is_global_max_return(self):
        mu, sigma = synthetic_ten_asset_case()
        cloud = mvp.sample_portfolios(mu, sigma, 1000, 0.01, seed=2)
        frontier = mvp.efficient_frontier(cloud, bins=1)
        assert len(frontier) == 1
        assert frontier[0].annual_return == cloud.returns().max()

    def test_points_dominate_their_bins(self):
        mu, sigma = synthetic_ten_asset_case()
        cloud = mvp.sample_portfolios(mu, sigma, 1000, 0.01, seed=2)
        bins = 20
        frontier = mvp.efficient_frontier(cloud, bins=bins)
        vols = cloud.volatilities()
        rets = cloud.returns()
        vmin, vmax = vols.min(), vols.max()
        bin_of = np.minimum(((vols - vmin) / (vmax - vmin) * bins).astype(int), bins - 1)
        for point in frontier:
            b = min(int((point.annual_volatility - vmin) / (vmax - vmin) * bins), bins - 1)
            assert point.annual_return == rets[bin_of == b].max()
        ordered = [p.annual_volatility for p in frontier]
        assert ordered == sorted(ordered)


class TestClosedFormMinVariance:
    def test_diagonal_inverse_variance(self):
        result = mvp.closed_form_min_variance(np.diag([0.04, 0.01]))
        assert result.weights == pytest.approx([0.2, 0.8], abs=1e-12)
        assert result.long_only

    def test_isotropic_gives_equal_weights(self):
        result = mvp.closed_form_min_variance(0.02 * np.eye(5))
        assert result.weights == pytest.approx([0.2] * 5, abs=1e-12)

    def test_three_asset_against_hand_solve(self):
        sigma = np.array(
            [
                [4.0, 1.2, 0.8],
                [1.2, 9.0, -0.5],
                [0.8, -0.5, 16.0],
            ]
        ) * 1e-4

        # independent oracle: solve sigma x = 1 by hand-rolled Cramer's rule
        def det3(m):
            return (
                m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
            )

        ones = [1.0, 1.0, 1.0]
        d = det3(sigma)
        x = []
        for col in range(3):
            m = sigma.copy()
            m[:, col] = ones
            x.append(det3(m) / d)
        expect = np.array(x) / sum(x)

        result = mvp.closed_form_min_variance(sigma)
        assert result.weights == pytest.approx(expect, abs=1e-10)

    def test_negative_weights_flagged(self):
        # strong positive correlation pushes the unconstrained solution short
        sigma = np.array([[1.0, 0.95], [0.95, 1.5]]) * 1e-4
        result = mvp.closed_form_min_variance(sigma)
        assert abs(result.weights.sum() - 1.0) < 1e-9
        if np.any(result.weights < 0):
            assert not result.long_only

    def test_singular_matrix_regularized(self):
        # rank-1 matrix: solvable only after the +1e-10 I nudge
        v = np.array([1.0, 2.0])
        sigma = np.outer(v, v) * 1e-4
        result = mvp.closed_form_min_variance(sigma)
        assert abs(result.weights.sum() - 1.0) < 1e-9

    def test_zero_matrix_regularizes_to_equal_weights(self):
        result = mvp.closed_form_min_variance(np.zeros((2, 2)))
        assert result.weights == pytest.approx([0.5, 0.5], abs=1e-9)

    def test_unsolvable_matrix_errors(self):
        sigma = np.full((2, 2), np.nan)
        with pytest.raises(SingularMatrixError):
            mvp.closed_form_min_variance(sigma)


class TestFrontierCsv:
    def test_round_trip(self, tmp_path):
        mu, sigma = synthetic_ten_asset_case()
        cloud = mvp.sample_portfolios(mu, sigma, 250, 0.01, seed=21)
        path = tmp_path / "frontier.csv"
        mvp.write_frontier_csv(cloud, path)
        data = mvp.read_frontier_csv(path)
        assert data.shape == (250, 3 + 10)
        assert np.array_equal(data[:, 0], cloud.volatilities())
        assert np.array_equal(data[:, 3:], np.stack([p.weights for p in cloud.points]))
