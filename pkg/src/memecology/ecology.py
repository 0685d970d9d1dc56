"""Community-level ecological metrics over the meme counts.

Communities are habitats, memes are species and each occurrence is one
individual.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import stats
from .corpus import month_bounds, month_of, month_ordinal
from .series import NormalizedSeries, Window, background_series, month_index
from .table import CountTable

DEFAULT_ALPHAS = (0.005, 0.01, 0.02)


class EcologyError(ValueError):
    pass


def _counts(species_counts: Mapping | Sequence[int]) -> list[int]:
    vals = list(species_counts.values()) if isinstance(species_counts, Mapping) else list(species_counts)
    if any(n < 0 for n in vals):
        raise EcologyError("species counts must be non-negative")
    return [int(n) for n in vals if n > 0]


def simpson_diversity(species_counts: Mapping | Sequence[int]) -> float:
    """Simpson's index ``1 - sum n_i(n_i-1) / (N(N-1))``.

    Undefined (``EcologyError``) when fewer than two individuals are present.
    """
    counts = _counts(species_counts)
    total = sum(counts)
    if total < 2:
        raise EcologyError(f"Simpson diversity undefined for N={total} < 2")
    same = sum(n * (n - 1) for n in counts)
    # integer arithmetic keeps the ratio exact up to one final rounding
    return 1.0 - same / (total * (total - 1))


def richness(species_counts: Mapping | Sequence[int], total_tracked: int) -> tuple[int, float]:
    if total_tracked < 1:
        raise EcologyError("total_tracked must be >= 1")
    count = len(_counts(species_counts))
    return count, count / total_tracked


# -- diversity over time ---------------------------------------------------


@dataclass(frozen=True)
class DiversityRow:
    month: tuple[int, int]
    mean_d: float
    ci95: float | None
    communities_with_d: int
    total_communities: int


@dataclass(frozen=True)
class DiversityTrend:
    rows: list[DiversityRow]
    fit: stats.TrendFit | None


def community_month_counts(table: CountTable, window: Window | None = None) -> dict:
    """``{(community, month): Counter(phrase_id -> occurrences)}``."""
    out: dict = defaultdict(Counter)
    month_cache: dict[int, tuple[int, int]] = {}
    for (pid, day, community), n in table.memes.items():
        if window is not None and day not in window:
            continue
        m = month_cache.get(day)
        if m is None:
            m = month_cache[day] = month_of(day)
        out[(community, m)][pid] += n
    return out


def diversity_trend(table: CountTable, window: Window | None = None) -> DiversityTrend:
    """Monthly mean Simpson diversity across communities.

    Community-months with fewer than two occurrences are left out of the
    mean but still counted in ``total_communities``. The trend line is
    fitted on the month ordinal when at least three months have a mean.
    """
    by_month: dict[tuple[int, int], list[float]] = defaultdict(list)
    totals: Counter = Counter()
    for (community, month), species in sorted(community_month_counts(table, window).items()):
        totals[month] += 1
        if sum(species.values()) >= 2:
            by_month[month].append(simpson_diversity(species))
    if not by_month:
        raise EcologyError("no community-month has at least two meme occurrences")

    rows = []
    for month in sorted(by_month):
        ds = by_month[month]
        ci = stats.ci95_halfwidth(ds) if len(ds) >= 2 else None
        rows.append(DiversityRow(month, stats.mean(ds), ci, len(ds), totals[month]))
    fit = None
    if len(rows) >= 3:
        fit = stats.trend([float(month_ordinal(r.month)) for r in rows], [r.mean_d for r in rows])
    return DiversityTrend(rows, fit)


# -- peaks and lifespans ---------------------------------------------------


@dataclass(frozen=True)
class LifespanParams:
    alpha: float
    gap_tolerance: int | None = 0  # None: unlimited

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise EcologyError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.gap_tolerance is not None and self.gap_tolerance < 0:
            raise EcologyError("gap_tolerance must be >= 0")


@dataclass(frozen=True)
class Lifespan:
    phrase_id: int
    start_day: int
    peak_day: int
    end_day: int
    alpha: float

    @property
    def length_days(self) -> int:
        return self.end_day - self.start_day + 1

    def overlaps(self, first_day: int, last_day: int) -> bool:
        return self.start_day <= last_day and first_day <= self.end_day


def peak(series: NormalizedSeries) -> tuple[int, float]:
    """Day and value of the maximum over defined days; earliest day wins ties."""
    vals = np.where(series.defined, series.values, -np.inf)
    if not series.defined.any() or not (vals > 0).any():
        raise EcologyError(f"no peak: phrase {series.phrase_id} has no positive defined day")
    i = int(np.argmax(vals))
    return series.window.first_day + i, float(vals[i])


def _extend(ok: np.ndarray, start: int, step: int, gap: int | None) -> int:
    """Walk from ``start`` in direction ``step`` and return the last ok index."""
    last = start
    misses = 0
    i = start + step
    while 0 <= i < len(ok):
        if ok[i]:
            last = i
            misses = 0
        else:
            misses += 1
            if gap is not None and misses > gap:
                break
        i += step
    return last


def lifespan(series: NormalizedSeries, params: LifespanParams) -> Lifespan:
    """Run of days around the peak where the normalized frequency is at least
    ``alpha`` times its peak value.

    Up to ``gap_tolerance`` consecutive days below threshold (or undefined)
    may sit inside the run; the run always starts and ends on a qualifying
    day.
    """
    t_peak, peak_value = peak(series)
    threshold = params.alpha * peak_value
    ok = series.defined & (np.nan_to_num(series.values, nan=-1.0) >= threshold)
    p = t_peak - series.window.first_day
    lo = _extend(ok, p, -1, params.gap_tolerance)
    hi = _extend(ok, p, +1, params.gap_tolerance)
    first = series.window.first_day
    return Lifespan(series.phrase_id, first + lo, t_peak, first + hi, params.alpha)


def lifespans(
    normalized: Mapping[int, NormalizedSeries], alphas: Iterable[float] = DEFAULT_ALPHAS, gap_tolerance: int | None = 0
) -> list[Lifespan]:
    """Lifespans of every meme with a peak, for each alpha."""
    out = []
    for alpha in alphas:
        params = LifespanParams(alpha, gap_tolerance)
        for pid in sorted(normalized):
            s = normalized[pid]
            try:
                out.append(lifespan(s, params))
            except EcologyError:
                continue
    return out


# -- activity --------------------------------------------------------------


@dataclass(frozen=True)
class ActiveRow:
    month: tuple[int, int]
    active: int
    background_total: float
    normalized_active: float | None


def _month_ranges(window: Window) -> list[tuple[tuple[int, int], int, int]]:
    out = []
    for m in window.months():
        lo, hi = month_bounds(m)
        out.append((m, max(lo, window.first_day), min(hi, window.last_day)))
    return out


def active_series(lifespans: Iterable[Lifespan], table: CountTable, window: Window) -> list[ActiveRow]:
    """Per month, the memes whose lifespan intersects it, raw and per unit
    of monthly background volume."""
    spans = list(lifespans)
    b = background_series(table, window)
    months, idx = month_index(window)
    rows = []
    for i, (m, lo, hi) in enumerate(_month_ranges(window)):
        active = sum(1 for ls in spans if ls.overlaps(lo, hi))
        btotal = math.fsum(b.values[idx == i].tolist())
        rows.append(ActiveRow(m, active, btotal, active / btotal if btotal > 0 else None))
    return rows


@dataclass(frozen=True)
class LifespanTrendRow:
    month: tuple[int, int]
    mean_length: float
    ci95: float | None
    n: int


@dataclass(frozen=True)
class LifespanTrend:
    alpha: float
    rows: list[LifespanTrendRow]
    fit: stats.TrendFit


def lifespan_trend(spans: Iterable[Lifespan], window: Window) -> dict[float, LifespanTrend]:
    """Monthly mean lifespan of the memes active in each month, per alpha.

    Months without an active meme are omitted; the fit uses the month
    ordinal so gaps keep their spacing.
    """
    by_alpha: dict[float, list[Lifespan]] = defaultdict(list)
    for ls in spans:
        by_alpha[ls.alpha].append(ls)

    out = {}
    ranges = _month_ranges(window)
    for alpha in sorted(by_alpha):
        group = by_alpha[alpha]
        rows = []
        for m, lo, hi in ranges:
            lengths = [float(ls.length_days) for ls in group if ls.overlaps(lo, hi)]
            if not lengths:
                continue
            ci = stats.ci95_halfwidth(lengths) if len(lengths) >= 2 else None
            rows.append(LifespanTrendRow(m, stats.mean(lengths), ci, len(lengths)))
        if len(rows) < 3:
            raise EcologyError(f"alpha={alpha}: lifespan trend needs 3 months with an active meme")
        fit = stats.trend([float(month_ordinal(r.month)) for r in rows], [r.mean_length for r in rows])
        out[alpha] = LifespanTrend(alpha, rows, fit)
    return out
