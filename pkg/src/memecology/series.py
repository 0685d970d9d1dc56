"""Daily and monthly frequency series, background model and normalization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import stats
from .corpus import month_bounds, month_label, month_ordinal, months_between
from .table import CountTable


class SeriesError(ValueError):
    pass


@dataclass(frozen=True)
class Window:
    """Inclusive range of day indices."""

    first_day: int
    last_day: int

    def __post_init__(self):
        if self.last_day < self.first_day:
            raise SeriesError(f"empty window [{self.first_day}, {self.last_day}]")

    def __len__(self) -> int:
        return self.last_day - self.first_day + 1

    def __contains__(self, day: int) -> bool:
        return self.first_day <= day <= self.last_day

    @property
    def days(self) -> np.ndarray:
        return np.arange(self.first_day, self.last_day + 1)

    def months(self) -> list[tuple[int, int]]:
        return months_between(self.first_day, self.last_day)

    @classmethod
    def of_table(cls, table: CountTable) -> Window:
        rng = table.day_range()
        if rng is None:
            raise SeriesError("count table is empty; no default window")
        return cls(*rng)


@dataclass(frozen=True)
class DailySeries:
    phrase_id: int
    window: Window
    values: np.ndarray

    @property
    def first_day(self) -> int:
        return self.window.first_day

    @property
    def last_day(self) -> int:
        return self.window.last_day


@dataclass(frozen=True)
class BackgroundSeries:
    window: Window
    values: np.ndarray


@dataclass(frozen=True)
class NormalizedSeries:
    phrase_id: int
    window: Window
    values: np.ndarray  # nan on undefined days
    defined: np.ndarray

    def value_at(self, day: int) -> float:
        return float(self.values[day - self.window.first_day])


@dataclass(frozen=True)
class MonthlySeries:
    months: list[tuple[int, int]]
    values: np.ndarray  # nan where undefined
    defined: np.ndarray

    @property
    def labels(self) -> list[str]:
        return [month_label(m) for m in self.months]


def _dense(day_counts: dict[int, int], window: Window) -> np.ndarray:
    out = np.zeros(len(window), dtype=np.float64)
    for day, n in day_counts.items():
        if day in window:
            out[day - window.first_day] += n
    return out


def daily_series(table: CountTable, phrase_id: int, window: Window) -> DailySeries:
    """Zero-filled daily counts of one phrase, summed over communities."""
    if not 0 <= phrase_id < table.n_phrases:
        raise SeriesError(f"unknown phrase_id {phrase_id}")
    days: dict[int, int] = {}
    for (pid, day, _), n in table.memes.items():
        if pid == phrase_id:
            days[day] = days.get(day, 0) + n
    return DailySeries(phrase_id, window, _dense(days, window))


def all_daily_series(table: CountTable, window: Window) -> dict[int, DailySeries]:
    """Daily series for every tracked phrase, built in one pass over the table."""
    per = table.phrase_days()
    return {
        pid: DailySeries(pid, window, _dense(per.get(pid, {}), window)) for pid in range(table.n_phrases)
    }


def background_series(table: CountTable, window: Window) -> BackgroundSeries:
    return BackgroundSeries(window, _dense(table.background_days(), window))


def normalize(f: DailySeries, b: BackgroundSeries) -> NormalizedSeries:
    """Per-day ``F / B``; days with ``B == 0`` are undefined."""
    if f.window != b.window:
        raise SeriesError("series and background cover different windows")
    defined = b.values > 0
    if not defined.any():
        raise SeriesError("background empty over window")
    values = np.full(len(f.values), np.nan)
    np.divide(f.values, b.values, out=values, where=defined)
    return NormalizedSeries(f.phrase_id, f.window, values, defined)


def month_index(window: Window) -> tuple[list[tuple[int, int]], np.ndarray]:
    """Months touched by ``window`` and, per day, the index of its month."""
    months = window.months()
    idx = np.empty(len(window), dtype=np.int64)
    for i, m in enumerate(months):
        lo, hi = month_bounds(m)
        lo, hi = max(lo, window.first_day), min(hi, window.last_day)
        idx[lo - window.first_day : hi - window.first_day + 1] = i
    return months, idx


def monthly_aggregate(
    series: DailySeries | BackgroundSeries | NormalizedSeries, mode: str = "sum"
) -> MonthlySeries:
    """Calendar-month sums or means of a daily series (in-window days only)."""
    if mode not in ("sum", "mean"):
        raise ValueError("mode must be 'sum' or 'mean'")
    months, idx = month_index(series.window)
    values = np.asarray(series.values, dtype=np.float64)
    defined = getattr(series, "defined", None)
    if defined is None:
        defined = np.ones(len(values), dtype=bool)
    out = np.full(len(months), np.nan)
    ok = np.zeros(len(months), dtype=bool)
    for i in range(len(months)):
        sel = values[(idx == i) & defined]
        if len(sel) == 0:
            continue
        vals = sel.tolist()
        out[i] = stats.mean(vals) if mode == "mean" else math.fsum(vals)
        ok[i] = True
    return MonthlySeries(months, out, ok)


@dataclass(frozen=True)
class AttentionRow:
    month: tuple[int, int]
    mean: float
    ci95: float | None
    n: int


@dataclass(frozen=True)
class AttentionResult:
    rows: list[AttentionRow]
    pearson_r: float
    p_value: float


def normalized_matrix(table: CountTable, phrase_ids: Sequence[int], window: Window) -> dict[int, NormalizedSeries]:
    b = background_series(table, window)
    series = all_daily_series(table, window)
    return {pid: normalize(series[pid], b) for pid in phrase_ids}


def aggregate_attention(table: CountTable, phrase_ids: Sequence[int], window: Window) -> AttentionResult:
    """Monthly mean over memes of their monthly-mean normalized frequency.

    Each month reports the cross-meme mean, its 95% half-width and the
    number of memes with a defined value. Pearson's r is taken between the
    month ordinal and the monthly mean; a flat series gives ``r = 0``.
    """
    if not phrase_ids:
        raise SeriesError("no phrases to aggregate")
    normalized = normalized_matrix(table, phrase_ids, window)
    monthly = [monthly_aggregate(normalized[pid], "mean") for pid in phrase_ids]
    months = monthly[0].months
    if len(months) < 2:
        raise SeriesError("aggregate attention needs at least two months")

    rows = []
    for i, m in enumerate(months):
        vals = [float(ms.values[i]) for ms in monthly if ms.defined[i]]
        if not vals:
            continue
        ci = stats.ci95_halfwidth(vals) if len(vals) >= 2 else None
        rows.append(AttentionRow(m, stats.mean(vals), ci, len(vals)))

    x = [float(month_ordinal(r.month)) for r in rows]
    y = [r.mean for r in rows]
    if len(rows) < 3:
        raise SeriesError("pearson needs at least 3 months with defined values")
    if min(y) == max(y):
        return AttentionResult(rows, 0.0, 1.0)
    r, p = stats.pearson(x, y)
    return AttentionResult(rows, r, p)

