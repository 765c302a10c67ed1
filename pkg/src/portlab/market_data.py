"""Close-price table loading, cleaning, and train/test splitting.

The file format is a plain CSV with header ``date,TICK1,TICK2,...``,
ISO-8601 dates, decimal close prices, and empty fields for missing
values. Anything non-numeric in a price cell is a hard parse error.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date
from pathlib import Path

import numpy as np

from .errors import (
    DateOrderError,
    PriceParseError,
    SchemaError,
    SplitError,
    UnfillableError,
)


@dataclass(frozen=True)
class PriceTable:
    """Dated close-price matrix; ``closes[t, i]`` is ticker ``i`` on day ``t``.

    Missing cells are NaN until :func:`forward_fill` removes them. The
    array is stored read-only so tables can be shared across threads.
    """

    dates: tuple[date, ...]
    tickers: tuple[str, ...]
    closes: np.ndarray

    def __post_init__(self) -> None:
        dates = tuple(self.dates)
        tickers = tuple(str(t) for t in self.tickers)
        closes = np.array(self.closes, dtype=float)

        if len(tickers) < 2:
            raise SchemaError(f"need at least 2 tickers, got {len(tickers)}")
        if len(set(tickers)) != len(tickers):
            raise SchemaError("duplicate ticker names")
        if len(dates) < 3:
            raise SchemaError(f"need at least 3 price rows, got {len(dates)}")
        if any(b <= a for a, b in zip(dates, dates[1:])):
            raise DateOrderError("dates must be strictly increasing")
        if closes.shape != (len(dates), len(tickers)):
            raise ValueError(
                f"closes shape {closes.shape} does not match "
                f"{len(dates)} dates x {len(tickers)} tickers"
            )
        present = closes[~np.isnan(closes)]
        if np.any(np.isinf(present)) or np.any(present <= 0):
            raise ValueError("close prices must be finite and > 0")

        closes.setflags(write=False)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "tickers", tickers)
        object.__setattr__(self, "closes", closes)

    @property
    def n_rows(self) -> int:
        return len(self.dates)

    @property
    def n_assets(self) -> int:
        return len(self.tickers)

    def has_missing(self) -> bool:
        return bool(np.isnan(self.closes).any())


@dataclass(frozen=True)
class DateSplit:
    """Boundary dates of a train/test partition (train_end < test_start)."""

    train_end: date
    test_start: date

    def __post_init__(self) -> None:
        if self.train_end >= self.test_start:
            raise SplitError(
                f"train_end {self.train_end} must precede test_start {self.test_start}"
            )


def load_prices(path: str | Path) -> PriceTable:
    """Parse a close-price CSV into a :class:`PriceTable`.

    Empty cells become NaN (missing, to be cleaned later); any other
    non-numeric or non-positive cell raises :class:`PriceParseError`
    with its row number.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if not header or header[0].strip() != "date":
            raise SchemaError(f"{path}: first header column must be 'date'")
        tickers = [c.strip() for c in header[1:]]
        if len(tickers) < 2:
            raise SchemaError(f"{path}: need at least 2 ticker columns, got {len(tickers)}")

        dates: list[date] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(tickers) + 1:
                raise PriceParseError(
                    f"{path}: row {lineno}: expected {len(tickers) + 1} cells, got {len(row)}"
                )
            try:
                d = date.fromisoformat(row[0].strip())
            except ValueError:
                raise PriceParseError(
                    f"{path}: row {lineno}: malformed date {row[0]!r}"
                ) from None
            if dates and d <= dates[-1]:
                raise DateOrderError(
                    f"{path}: row {lineno}: date {d} not after {dates[-1]}"
                )
            cells: list[float] = []
            for ticker, cell in zip(tickers, row[1:]):
                cell = cell.strip()
                if cell == "":
                    cells.append(math.nan)
                    continue
                try:
                    value = float(cell)
                except ValueError:
                    raise PriceParseError(
                        f"{path}: row {lineno}: non-numeric price {cell!r} for {ticker}"
                    ) from None
                if not math.isfinite(value) or value <= 0:
                    raise PriceParseError(
                        f"{path}: row {lineno}: price {cell!r} for {ticker} "
                        "must be finite and > 0"
                    )
                cells.append(value)
            dates.append(d)
            rows.append(cells)

    if len(rows) < 3:
        raise SchemaError(f"{path}: need at least 3 data rows, got {len(rows)}")
    return PriceTable(tuple(dates), tuple(tickers), np.array(rows, dtype=float))


def write_prices(table: PriceTable, path: str | Path) -> None:
    """Write a table back to CSV (missing cells as empty fields, LF endings)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", *table.tickers])
        for d, row in zip(table.dates, table.closes):
            writer.writerow(
                [d.isoformat()] + ["" if math.isnan(v) else repr(float(v)) for v in row]
            )


def forward_fill(table: PriceTable) -> PriceTable:
    """Replace every missing cell with the most recent prior value of its ticker."""
    closes = table.closes
    first_missing = np.isnan(closes[0])
    if first_missing.any():
        bad = [t for t, m in zip(table.tickers, first_missing) if m]
        raise UnfillableError(
            f"missing value in first row for ticker(s): {', '.join(bad)}"
        )
    if not table.has_missing():
        return table
    missing = np.isnan(closes)
    row_idx = np.where(missing, 0, np.arange(table.n_rows)[:, None])
    np.maximum.accumulate(row_idx, axis=0, out=row_idx)
    filled = closes[row_idx, np.arange(table.n_assets)[None, :]]
    return PriceTable(table.dates, table.tickers, filled)


def split_by_date(table: PriceTable, split: DateSplit) -> tuple[PriceTable, PriceTable]:
    """Partition rows into train (date <= train_end) and test (date >= test_start)."""
    dates = np.array(table.dates)
    train_mask = dates <= split.train_end
    test_mask = dates >= split.test_start
    n_train = int(train_mask.sum())
    n_test = int(test_mask.sum())
    if n_train == 0 or n_test == 0:
        raise SplitError(
            f"split {split.train_end}/{split.test_start} leaves an empty partition "
            f"(train={n_train}, test={n_test})"
        )
    if n_train < 3 or n_test < 3:
        raise SplitError(
            f"split {split.train_end}/{split.test_start} leaves a partition below "
            f"3 rows (train={n_train}, test={n_test})"
        )
    train = PriceTable(
        tuple(d for d, m in zip(table.dates, train_mask) if m),
        table.tickers,
        table.closes[train_mask],
    )
    test = PriceTable(
        tuple(d for d, m in zip(table.dates, test_mask) if m),
        table.tickers,
        table.closes[test_mask],
    )
    return train, test
