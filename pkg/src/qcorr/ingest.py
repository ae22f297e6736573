"""Tick-data preparation: second-grid resampling, liquidity gates, returns.

One instrument-day of trades becomes a gap-free per-second price grid via
previous-tick fill.  The first and last `trim_seconds` of the session are
discarded (auction effects); with the default 6.5 h session and 600 s trim
the grid has exactly 22200 seconds.  Days with trades in fewer than 800
distinct seconds are rejected, not errored.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError
from .series import TimeSeries

SESSION_TRIM_SECONDS = 600
MIN_TRADED_SECONDS = 800
STANDARD_GRID_SECONDS = 22200

TICKS_HEADER = ("date", "time_seconds", "instrument", "price")

# Values of the optional `regular` column that keep a row.
_REGULAR_TRUE = {"1", "true", "t", "yes", "y"}


@dataclass(frozen=True)
class TickRecord:
    """A single trade: second-resolution timestamp within the session."""

    timestamp: int
    price: float
    instrument: str

    def __post_init__(self):
        if self.timestamp < 0:
            raise DataFormatError(f"negative timestamp {self.timestamp}")
        if not self.price > 0:
            raise DataFormatError(f"nonpositive price {self.price!r}")


@dataclass(frozen=True)
class TradingDay:
    """One instrument-day of second-resolution prices after session filtering.

    traded_seconds counts distinct seconds with at least one trade before
    the previous-tick fill.
    """

    instrument: str
    date: str
    prices: np.ndarray
    traded_seconds: int

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float)
        if prices.ndim != 1 or prices.size == 0:
            raise ValueError("prices must be a nonempty one-dimensional array")
        if not np.all(prices > 0):
            raise ValueError("all prices must be positive")
        if self.traded_seconds < 1:
            raise ValueError("traded_seconds must be positive")
        prices = prices.copy()
        prices.setflags(write=False)
        object.__setattr__(self, "prices", prices)

    def __len__(self) -> int:
        return int(self.prices.size)


@dataclass(frozen=True)
class DayRejection:
    """A day filtered out by a quality gate; a pipeline outcome, not an error."""

    instrument: str
    date: str
    reason: str


def resample_day(
    ticks: list[TickRecord],
    session_open: int,
    session_close: int,
    date: str = "",
    trim_seconds: int = SESSION_TRIM_SECONDS,
    min_traded_seconds: int = MIN_TRADED_SECONDS,
) -> TradingDay | DayRejection:
    """Resample one instrument-day onto the trimmed per-second grid.

    The grid spans [session_open + trim, session_close - trim) and each
    second carries the most recent trade price at or before it; trades in
    the trimmed opening minutes seed the first grid second.  Returns a
    DayRejection for illiquid days (distinct traded seconds below the
    threshold) or when no price precedes the grid.  Malformed input
    (unsorted ticks, out-of-session timestamps) raises DataFormatError.
    """
    if not ticks:
        return DayRejection("", date, "no ticks")
    instrument = ticks[0].instrument
    grid_length = int(session_close) - int(session_open) - 2 * int(trim_seconds)
    if grid_length <= 0:
        raise ValueError("session is shorter than twice the trim")
    times = np.array([t.timestamp for t in ticks], dtype=np.int64)
    prices = np.array([t.price for t in ticks], dtype=float)
    if np.any(np.diff(times) < 0):
        raise DataFormatError(f"{instrument} {date}: ticks are not sorted by timestamp")
    if times[0] < session_open or times[-1] > session_close:
        raise DataFormatError(f"{instrument} {date}: tick outside the session window")
    for t in ticks:
        if t.instrument != instrument:
            raise DataFormatError(f"mixed instruments in one day: {instrument} vs {t.instrument}")
    traded = int(np.unique(times).size)
    if traded < min_traded_seconds:
        return DayRejection(instrument, date, "insufficient liquidity")
    grid = np.arange(session_open + trim_seconds, session_open + trim_seconds + grid_length)
    last_at_or_before = np.searchsorted(times, grid, side="right") - 1
    if last_at_or_before[0] < 0:
        return DayRejection(instrument, date, "no price before the first grid second")
    return TradingDay(
        instrument=instrument,
        date=date,
        prices=prices[last_at_or_before],
        traded_seconds=traded,
    )


def compute_returns(day: TradingDay, horizon_seconds: int, stride_seconds: int = 1) -> TimeSeries:
    """Simple returns (S(t+h) - S(t)) / S(t) at t = 0, stride, 2*stride, ...

    Start points run while t + horizon stays on the grid; on the standard
    22200 s day this yields 22140 overlapping one-minute returns at stride 1
    and 369 non-overlapping ones at stride 60 (the last start is t = 22080,
    since t = 22140 would need the off-grid price S(22200)).
    """
    horizon = int(horizon_seconds)
    stride = int(stride_seconds)
    if horizon < 1 or stride < 1:
        raise ValueError("horizon and stride must be positive")
    prices = day.prices
    if horizon > prices.size - 1:
        raise ValueError(f"horizon {horizon} exceeds the {prices.size}-second grid")
    starts = np.arange(0, prices.size - horizon, stride)
    r = (prices[starts + horizon] - prices[starts]) / prices[starts]
    label = f"{day.instrument} {day.date} r{horizon}s/{stride}s".strip()
    return TimeSeries(r, step=float(stride), label=label)


def build_index(days: list[TradingDay]) -> TradingDay:
    """Equally weighted index: mean of day-normalized prices S_k(t) / S_k(0)."""
    if not days:
        raise ValueError("empty input")
    date = days[0].date
    length = len(days[0])
    for day in days[1:]:
        if day.date != date:
            raise ValueError(f"index days must share a date: {date} vs {day.date}")
        if len(day) != length:
            raise ValueError("index days must share the same grid length")
    normalized = np.vstack([day.prices / day.prices[0] for day in days])
    return TradingDay(
        instrument="INDEX",
        date=date,
        prices=normalized.mean(axis=0),
        traded_seconds=length,
    )


def read_ticks_csv(text: str) -> dict[tuple[str, str], list[TickRecord]]:
    """Parse tick CSV "date,time_seconds,instrument,price[,regular]".

    Rows whose optional `regular` flag is not truthy are dropped here.
    Returns ticks grouped by (date, instrument) in file order; groups keep
    the file's row order so unsorted data is still detected downstream.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataFormatError("empty ticks file; header row required") from None
    header = [h.strip().lower() for h in header]
    if tuple(header[:4]) != TICKS_HEADER or len(header) > 5:
        raise DataFormatError(
            "ticks header must be 'date,time_seconds,instrument,price[,regular]', "
            f"got {','.join(header)!r}"
        )
    has_regular = len(header) == 5
    if has_regular and header[4] != "regular":
        raise DataFormatError(f"fifth ticks column must be 'regular', got {header[4]!r}")
    groups: dict[tuple[str, str], list[TickRecord]] = {}
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DataFormatError(f"line {line_no}: expected {len(header)} fields, got {len(row)}")
        if has_regular and row[4].strip().lower() not in _REGULAR_TRUE:
            continue
        date, time_s, instrument, price = (field.strip() for field in row[:4])
        try:
            record = TickRecord(int(time_s), float(price), instrument)
        except ValueError as exc:
            raise DataFormatError(f"line {line_no}: {exc}") from None
        groups.setdefault((date, instrument), []).append(record)
    return groups
