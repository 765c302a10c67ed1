"""Portfolio optimization toolkit and backtesting harness.

Four allocation methods over daily close prices: equal weight,
mean-variance (Monte-Carlo efficient frontier), hierarchical risk
parity, and a deep-Q-network rebalancing agent, plus the train/test
backtest pipeline that compares them.
"""

__version__ = "0.1.0"
