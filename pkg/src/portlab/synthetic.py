"""Deterministic synthetic price fixtures.

The bundled dataset gives asset 0 a +0.3%/day drift while the other
assets have zero drift, all with the same i.i.d. Gaussian noise: a
portfolio that overweights asset 0 beats the 1/N baseline by design,
which is what the agent end-to-end check looks for.
"""

from __future__ import annotations

import argparse
import math
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from .market_data import PriceTable, write_prices

FIXTURE_SEED = 20180
FIXTURE_DRIFT = 0.003
FIXTURE_NOISE = 0.01


def weekday_dates(start: date, count: int) -> tuple[date, ...]:
    """``count`` consecutive Mon-Fri calendar dates from ``start`` onwards."""
    out: list[date] = []
    day = start
    while len(out) < count:
        if day.weekday() < 5:
            out.append(day)
        day += timedelta(days=1)
    return tuple(out)


def drift_price_table(
    n_assets: int = 10,
    n_days: int = 500,
    drift: float = FIXTURE_DRIFT,
    noise: float = FIXTURE_NOISE,
    seed: int = FIXTURE_SEED,
    start: date = date(2018, 1, 1),
) -> PriceTable:
    """Price paths where asset 0 drifts by ``drift`` per day and the rest by 0."""
    rng = np.random.default_rng(seed)
    drifts = np.zeros(n_assets)
    drifts[0] = drift
    daily = drifts + noise * rng.standard_normal(size=(n_days - 1, n_assets))
    daily = np.maximum(daily, -0.5)  # keep prices positive even in the far tail
    levels = 50.0 + 10.0 * np.arange(n_assets)
    closes = np.vstack([levels, levels * np.cumprod(1.0 + daily, axis=0)])
    tickers = tuple(f"STK{i}" for i in range(n_assets))
    return PriceTable(weekday_dates(start, n_days), tickers, closes)


def write_fixture(path: str | Path) -> PriceTable:
    """Write the canonical fixture CSV, including a few missing cells.

    The blanks exercise the forward-fill cleaning step; none sit in the
    first row, so the fixture always cleans successfully.
    """
    table = drift_price_table()
    closes = table.closes.copy()
    for row, col in ((37, 2), (180, 5), (181, 5), (402, 8)):
        closes[row, col] = math.nan
    dirty = PriceTable(table.dates, table.tickers, closes)
    write_prices(dirty, path)
    return dirty


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="regenerate the bundled price fixture")
    parser.add_argument("path", nargs="?", default="data/synthetic_prices.csv")
    args = parser.parse_args(argv)
    table = write_fixture(args.path)
    print(f"wrote {table.n_rows} rows x {table.n_assets} tickers to {args.path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
