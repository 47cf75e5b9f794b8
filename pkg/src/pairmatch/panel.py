"""Price panel container plus long-format CSV ingestion and emission.

The panel is a dense dates x tickers matrix of adjusted close prices with NaN
marking missing cells.  Dates are either calendar dates (datetime64[D]) or
synthetic consecutive integer trading days; monthly grouping works for both.
"""

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

__all__ = ["PricePanel", "ingest_csv", "CsvFormatError"]

SYNTHETIC_DAYS_PER_MONTH = 21

CSV_HEADER = "date,ticker,adj_close"


class CsvFormatError(ValueError):
    """Malformed price CSV; message carries the offending line number."""


@dataclass
class PricePanel:
    dates: np.ndarray
    tickers: list[str]
    prices: np.ndarray
    _ticker_index: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.dates = np.asarray(self.dates)
        self.prices = np.asarray(self.prices, dtype=np.float64)
        if self.prices.shape != (len(self.dates), len(self.tickers)):
            raise ValueError(
                f"price matrix shape {self.prices.shape} does not match "
                f"{len(self.dates)} dates x {len(self.tickers)} tickers"
            )
        if len(self.dates) >= 2 and not np.all(self.dates[1:] > self.dates[:-1]):
            raise ValueError("dates must be strictly increasing")
        with np.errstate(invalid="ignore"):
            if np.any(self.prices <= 0):
                raise ValueError("all present prices must be positive")
        self._ticker_index = {t: i for i, t in enumerate(self.tickers)}

    @property
    def n_days(self) -> int:
        return len(self.dates)

    def column(self, ticker: str) -> np.ndarray:
        try:
            return self.prices[:, self._ticker_index[ticker]]
        except KeyError:
            raise KeyError(f"unknown ticker {ticker!r}") from None

    def ticker_position(self, ticker: str) -> int:
        return self._ticker_index[ticker]

    def date_position(self, date) -> int:
        idx = np.searchsorted(self.dates, np.asarray(date, dtype=self.dates.dtype))
        if idx >= len(self.dates) or self.dates[idx] != np.asarray(date, dtype=self.dates.dtype):
            raise KeyError(f"date {date!r} not in panel")
        return int(idx)

    def month_keys(self) -> np.ndarray:
        """One integer month key per date; consecutive months get distinct keys."""
        if np.issubdtype(self.dates.dtype, np.datetime64):
            months = self.dates.astype("datetime64[M]")
            return months.astype(np.int64)
        return np.asarray(self.dates, dtype=np.int64) // SYNTHETIC_DAYS_PER_MONTH

    def complete_in_window(self, ticker: str, start: int, stop: int) -> bool:
        """True if the ticker has no missing price in row range [start, stop)."""
        col = self.prices[start:stop, self._ticker_index[ticker]]
        return not np.any(np.isnan(col))

    def to_csv(self, path) -> None:
        """Emit the long-format CSV this module also ingests (12 significant digits)."""
        datetime_dates = np.issubdtype(self.dates.dtype, np.datetime64)
        with open(path, "w") as fh:
            fh.write(CSV_HEADER + "\n")
            for d_idx, date in enumerate(self.dates):
                label = str(date.astype("datetime64[D]")) if datetime_dates else str(int(date))
                for t_idx, ticker in enumerate(self.tickers):
                    price = self.prices[d_idx, t_idx]
                    if np.isnan(price):
                        continue
                    fh.write(f"{label},{ticker},{price:.12g}\n")


def _parse_date(token: str, lineno: int):
    token = token.strip()
    if token.lstrip("-").isdigit():
        return int(token)
    try:
        return np.datetime64(token, "D")
    except ValueError:
        raise CsvFormatError(f"line {lineno}: unparseable date {token!r}") from None


def ingest_csv(path) -> PricePanel:
    """Load a long-format `date,ticker,adj_close` CSV into a dense panel.

    Missing (date, ticker) combinations stay NaN; duplicate rows and
    non-positive prices are rejected with the offending line number.
    """
    rows = []
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise CsvFormatError(f"line 1: expected header {CSV_HEADER!r}, got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise CsvFormatError(f"line {lineno}: expected 3 fields, got {len(parts)}")
            date = _parse_date(parts[0], lineno)
            ticker = parts[1].strip()
            if not ticker:
                raise CsvFormatError(f"line {lineno}: empty ticker")
            try:
                price = float(parts[2])
            except ValueError:
                raise CsvFormatError(f"line {lineno}: unparseable price {parts[2]!r}") from None
            if not price > 0:
                raise CsvFormatError(f"line {lineno}: non-positive price {price}")
            rows.append((lineno, date, ticker, price))

    if not rows:
        raise CsvFormatError("file contains no data rows")

    date_types = {type(r[1]) for r in rows}
    if len(date_types) > 1:
        raise CsvFormatError("mixed integer and calendar dates")

    seen = {}
    for lineno, date, ticker, _ in rows:
        key = (date, ticker)
        if key in seen:
            raise CsvFormatError(
                f"line {lineno}: duplicate (date, ticker) = ({date}, {ticker}); "
                f"first seen on line {seen[key]}"
            )
        seen[key] = lineno

    dates = sorted({r[1] for r in rows})
    tickers = sorted({r[2] for r in rows})
    date_pos = {d: i for i, d in enumerate(dates)}
    ticker_pos = {t: i for i, t in enumerate(tickers)}
    prices = np.full((len(dates), len(tickers)), np.nan)
    for _, date, ticker, price in rows:
        prices[date_pos[date], ticker_pos[ticker]] = price

    if isinstance(dates[0], np.datetime64):
        date_array = np.array(dates, dtype="datetime64[D]")
    else:
        date_array = np.array(dates, dtype=np.int64)
    return PricePanel(dates=date_array, tickers=tickers, prices=prices)


def panel_to_frame(panel: PricePanel) -> pd.DataFrame:
    """Wide DataFrame view (dates as index, tickers as columns)."""
    return pd.DataFrame(panel.prices, index=panel.dates, columns=panel.tickers)
