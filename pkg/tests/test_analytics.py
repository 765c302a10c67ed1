import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import make_returns, make_table, random_cov, weekdays
from portlab import analytics
from portlab.backtest import WeightSchedule, static_schedule
from portlab.errors import AlignmentError, InsufficientDataError, UndefinedSharpeError
from portlab.mvp import equal_weight


class TestReturns:
    def test_simple_returns(self):
        rets = analytics.simple_returns(make_table([[100, 100], [110, 105], [99, 110.25]]))
        assert rets.values[:, 0] == pytest.approx([0.10, -0.10], abs=1e-12)
        assert rets.values[:, 1] == pytest.approx([0.05, 0.05], abs=1e-12)
        assert rets.dates == make_table(np.ones((3, 2))).dates[1:]

    def test_constant_prices_zero_returns(self):
        rets = analytics.simple_returns(make_table([[100, 7], [100, 7], [100, 7]]))
        assert np.all(rets.values == 0.0)

    def test_log_returns(self):
        prices = [[100, 100], [100 * math.e, 110], [100 * math.e, 121]]
        rets = analytics.log_returns(make_table(prices))
        assert rets.values[0, 0] == pytest.approx(1.0, abs=1e-12)
        assert rets.values[1, 0] == pytest.approx(0.0, abs=1e-12)
        assert rets.values[0, 1] == pytest.approx(0.0953102, abs=1e-7)

    def test_missing_cells_rejected(self):
        table = make_table([[100, 1], [math.nan, 2], [102, 3]])
        with pytest.raises(ValueError, match="forward_fill"):
            analytics.simple_returns(table)


class TestVolatility:
    def test_alternating_returns(self):
        rets = make_returns([[0.01, 0.0], [-0.01, 0.0], [0.01, 0.0], [-0.01, 0.0]])
        stats = analytics.volatility(rets)
        # sample std of +-0.01 around mean 0: sqrt(4e-4 / 3)
        assert stats.daily_vol[0] == pytest.approx(math.sqrt(4e-4 / 3), abs=1e-12)
        assert stats.daily_vol[0] == pytest.approx(0.0115470, abs=1e-7)

    def test_constant_returns_zero_vol(self):
        stats = analytics.volatility(make_returns([[0.004, 0.1], [0.004, 0.1]]))
        assert stats.daily_vol[0] == 0.0

    def test_annualization_factor(self):
        rets = make_returns([[0.011, 0.0], [-0.009, 0.0], [0.03, 0.01]])
        stats = analytics.volatility(rets, trading_days=252)
        assert np.array_equal(stats.annual_vol, stats.daily_vol * math.sqrt(252))
        assert np.array_equal(stats.annual_mean, stats.mean_daily * 252)

    def test_point_scaling(self):
        # daily vol 0.01 annualizes to 0.1587451 under 252 trading days
        assert 0.01 * math.sqrt(252) == pytest.approx(0.1587451, abs=1e-7)

    def test_insufficient_rows(self):
        rets = make_returns(np.array([[0.01, 0.02]]))
        with pytest.raises(InsufficientDataError):
            analytics.volatility(rets)

    def test_configurable_trading_days(self):
        rets = make_returns([[0.01, 0.0], [-0.01, 0.02], [0.0, 0.01]])
        stats = analytics.volatility(rets, trading_days=250)
        assert np.array_equal(stats.annual_vol, stats.daily_vol * math.sqrt(250))


class TestCovarianceCorrelation:
    def test_identical_columns(self):
        x = np.array([0.01, -0.02, 0.03, 0.0])
        rets = make_returns(np.column_stack([x, x]))
        cov = analytics.covariance(rets)
        corr = analytics.correlation(rets)
        assert corr.values[0, 1] == pytest.approx(1.0, abs=1e-12)
        assert cov.values[0, 1] == pytest.approx(np.var(x, ddof=1), abs=1e-15)

    def test_anti_symmetric_columns(self):
        x = np.array([0.01, -0.02, 0.03, 0.0])
        corr = analytics.correlation(make_returns(np.column_stack([x, -x])))
        assert corr.values[0, 1] == pytest.approx(-1.0, abs=1e-12)

    def test_constant_column_degenerate_rule(self):
        x = np.array([0.01, -0.02, 0.03, 0.0])
        rets = make_returns(np.column_stack([x, np.zeros(4)]))
        corr = analytics.correlation(rets)
        cov = analytics.covariance(rets)
        assert corr.values[0, 1] == 0.0
        assert corr.values[1, 1] == 1.0
        assert cov.values[1, 1] == 0.0

    @given(st.integers(0, 2**31 - 1))
    def test_standardized_covariance_equals_correlation(self, seed):
        rng = np.random.default_rng(seed)
        values = rng.normal(0, 0.02, size=(30, 4))
        std = values.std(axis=0, ddof=1)
        standardized = (values - values.mean(axis=0)) / std
        cov_std = analytics.covariance_values(standardized)
        corr = analytics.correlation_values(values)
        assert np.max(np.abs(cov_std - corr)) < 1e-10


class TestPortfolioStats:
    def test_portfolio_return_cases(self):
        assert analytics.portfolio_return(np.array([0.5, 0.5]), np.array([0.1, 0.2])) == pytest.approx(0.15)
        assert analytics.portfolio_return(np.array([1.0, 0.0]), np.array([0.3, 0.9])) == 0.3
        w = equal_weight(10)
        assert analytics.portfolio_return(w, np.full(10, 0.07)) == pytest.approx(0.07, abs=1e-12)

    def test_portfolio_variance_cases(self):
        w = np.array([0.5, 0.5])
        assert analytics.portfolio_variance(w, np.diag([0.04, 0.04])) == pytest.approx(0.02, abs=1e-15)
        full = np.full((2, 2), 0.04)
        assert analytics.portfolio_variance(w, full) == pytest.approx(0.04, abs=1e-15)

    @given(st.integers(0, 2**31 - 1))
    def test_double_sum_matches_quadratic_form(self, seed):
        rng = np.random.default_rng(seed)
        sigma = random_cov(rng, 10)
        draws = rng.uniform(size=10)
        w = draws / draws.sum()
        oracle = float(w @ sigma @ w)
        assert abs(analytics.portfolio_variance(w, sigma) - oracle) < 1e-12

    @given(st.integers(0, 2**31 - 1))
    def test_variance_nonnegative_on_psd(self, seed):
        rng = np.random.default_rng(seed)
        sigma = random_cov(rng, 6)
        draws = rng.uniform(size=6)
        w = draws / draws.sum()
        assert analytics.portfolio_variance(w, sigma) >= -1e-18


class TestSharpe:
    def test_unit_sharpe(self):
        assert analytics.sharpe_ratio(0.10, 0.01, 0.09) == pytest.approx(1.0, abs=1e-12)

    def test_zero_excess_return(self):
        assert analytics.sharpe_ratio(0.03, 0.03, 0.5) == 0.0

    def test_derived_value(self):
        assert analytics.sharpe_ratio(0.376, 0.01, 0.216563) == pytest.approx(1.690042, abs=1e-5)

    def test_zero_volatility_error(self):
        with pytest.raises(UndefinedSharpeError):
            analytics.sharpe_ratio(0.1, 0.01, 0.0)


class TestCumulativeReturns:
    def test_constant_returns_compound(self):
        rets = make_returns(np.full((3, 2), 0.01))
        schedule = static_schedule(equal_weight(2, rets.tickers), rets.dates)
        curve = analytics.cumulative_returns(rets, schedule)
        assert curve.values[-1] == pytest.approx(0.030301, abs=1e-12)

    def test_zero_returns_flat(self):
        rets = make_returns(np.zeros((4, 2)))
        schedule = static_schedule(equal_weight(2, rets.tickers), rets.dates)
        assert np.all(analytics.cumulative_returns(rets, schedule).values == 0.0)

    def test_single_asset_passthrough(self, rng):
        values = rng.normal(0.001, 0.01, size=(10, 3))
        rets = make_returns(values)
        from portlab.mvp import Portfolio

        schedule = static_schedule(
            Portfolio(rets.tickers, np.array([0.0, 1.0, 0.0])), rets.dates
        )
        curve = analytics.cumulative_returns(rets, schedule)
        expect = np.cumprod(1 + values[:, 1]) - 1
        assert curve.values == pytest.approx(expect, abs=1e-14)

    def test_equal_weights_match_row_mean_compounding(self, rng):
        values = rng.normal(0.0, 0.02, size=(15, 5))
        rets = make_returns(values)
        schedule = static_schedule(equal_weight(5, rets.tickers), rets.dates)
        curve = analytics.cumulative_returns(rets, schedule)
        expect = np.cumprod(1 + values.mean(axis=1)) - 1
        assert np.max(np.abs(curve.values - expect)) < 1e-12

    def test_misaligned_schedule_errors(self):
        rets = make_returns(np.zeros((4, 2)))
        other_dates = weekdays(4, start=rets.dates[0].replace(year=2021))
        schedule = WeightSchedule(other_dates, np.full((4, 2), 0.5))
        with pytest.raises(AlignmentError):
            analytics.cumulative_returns(rets, schedule)

    def test_superset_schedule_aligns(self):
        rets = make_returns(np.full((3, 2), 0.01))
        longer = weekdays(5)
        schedule = WeightSchedule(longer, np.full((5, 2), 0.5))
        sub = analytics.ReturnTable(longer[1:4], rets.tickers, rets.values)
        curve = analytics.cumulative_returns(sub, schedule)
        assert curve.values[-1] == pytest.approx(0.030301, abs=1e-12)
