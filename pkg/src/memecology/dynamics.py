"""Peak-aligned relative frequency and day-over-day velocity distributions."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import stats
from .corpus import year_of
from .series import DailySeries

GAIN = "gain"
LOSS = "loss"


class DynamicsError(ValueError):
    pass


@dataclass(frozen=True)
class PeakAlignedCurve:
    year: int | None  # None when memes are not grouped by peak year
    deltas: np.ndarray
    mean: np.ndarray
    ci95: np.ndarray  # nan where fewer than two memes contribute
    n: np.ndarray

    @property
    def cohort_size(self) -> int:
        return int(self.n.max()) if len(self.n) else 0


def raw_peak(series: DailySeries) -> int:
    """Day of the largest raw count, earliest on ties."""
    if not (series.values > 0).any():
        raise DynamicsError(f"no peak: phrase {series.phrase_id} never occurs")
    return series.window.first_day + int(np.argmax(series.values))


def relative_curve(series: DailySeries, t_peak: int, width: int) -> np.ndarray:
    """``F(t_peak + d) / F(t_peak)`` for ``d`` in ``-width..width``; nan outside the window."""
    peak_value = series.values[t_peak - series.first_day]
    if peak_value <= 0:
        raise DynamicsError(f"phrase {series.phrase_id}: zero count at its peak day")
    out = np.full(2 * width + 1, np.nan)
    for k, d in enumerate(range(-width, width + 1)):
        day = t_peak + d
        if series.first_day <= day <= series.last_day:
            out[k] = series.values[day - series.first_day] / peak_value
    if out[width] != 1.0:
        raise DynamicsError("relative frequency at the peak is not 1")
    return out


def peak_aligned(
    series_set: Mapping[int, DailySeries],
    peaks: Mapping[int, int],
    width: int = 14,
    group_by_peak_year: bool = True,
) -> list[PeakAlignedCurve]:
    """Mean relative frequency around each meme's peak, per peak-year cohort."""
    if width < 1:
        raise DynamicsError("peak window must be >= 1")
    cohorts: dict[int | None, list[np.ndarray]] = defaultdict(list)
    for pid in sorted(series_set):
        if pid not in peaks:
            continue
        t_peak = peaks[pid]
        key = year_of(t_peak) if group_by_peak_year else None
        cohorts[key].append(relative_curve(series_set[pid], t_peak, width))

    deltas = np.arange(-width, width + 1)
    curves = []
    for key in sorted(cohorts, key=lambda k: -1 if k is None else k):
        rows = cohorts[key]
        mean = np.full(len(deltas), np.nan)
        ci = np.full(len(deltas), np.nan)
        n = np.zeros(len(deltas), dtype=np.int64)
        for j in range(len(deltas)):
            vals = [float(r[j]) for r in rows if not math.isnan(r[j])]
            n[j] = len(vals)
            if vals:
                mean[j] = stats.mean(vals)
            if len(vals) >= 2:
                ci[j] = stats.ci95_halfwidth(vals)
        curves.append(PeakAlignedCurve(key, deltas, mean, ci, n))
    return curves


@dataclass(frozen=True)
class VelocitySample:
    kind: str
    magnitude: float
    day: int
    phrase_id: int
    year: int


def velocities(series: DailySeries) -> list[VelocitySample]:
    """Relative day-over-day gains and losses of raw counts.

    A gain on day t is ``(F(t) - F(t-1)) / F(t-1)`` when F rose from a
    nonzero value; a loss on day t is ``(F(t) - F(t+1)) / F(t+1)`` when F
    falls to a nonzero value the next day. Losses are stored as magnitudes.
    """
    f = np.asarray(series.values, dtype=np.float64)
    prev, cur = f[:-1], f[1:]
    out = []
    first = series.first_day
    for i in np.flatnonzero((prev > 0) & (cur > prev)):
        day = first + int(i) + 1
        out.append(VelocitySample(GAIN, float((cur[i] - prev[i]) / prev[i]), day, series.phrase_id, year_of(day)))
    for i in np.flatnonzero((cur > 0) & (prev > cur)):
        day = first + int(i)
        out.append(VelocitySample(LOSS, float((prev[i] - cur[i]) / cur[i]), day, series.phrase_id, year_of(day)))
    out.sort(key=lambda s: (s.day, s.kind))
    return out


@dataclass(frozen=True)
class LogNormalFit:
    mu: float
    sigma: float
    n: int

    def pdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        z = (np.log(x) - self.mu) / self.sigma
        return np.exp(-0.5 * z * z) / (x * self.sigma * math.sqrt(2.0 * math.pi))


def fit_lognormal(samples: Iterable[float]) -> LogNormalFit:
    """Maximum-likelihood log-normal: mean and population std of ``ln x``."""
    xs = [float(x) for x in samples]
    if len(xs) < 2:
        raise DynamicsError("log-normal fit needs at least two samples")
    if any(not x > 0 for x in xs):
        raise DynamicsError("log-normal fit needs strictly positive samples")
    logs = [math.log(x) for x in xs]
    mu = stats.mean(logs)
    sigma = math.sqrt(math.fsum((v - mu) ** 2 for v in logs) / len(logs))
    if sigma == 0.0:
        raise DynamicsError("log-normal fit is degenerate (zero spread in ln x)")
    return LogNormalFit(mu, sigma, len(xs))


@dataclass(frozen=True)
class VelocityHistogram:
    edges: np.ndarray
    centers: np.ndarray
    density: np.ndarray
    fit_density: np.ndarray | None
    fit: LogNormalFit | None

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)


def velocity_histogram(samples: Sequence[float], bins_per_decade: int = 10) -> VelocityHistogram:
    """Log-spaced empirical density, normalized so ``sum(density * width) == 1``.

    Bin centers are geometric midpoints. The log-normal fit is evaluated at
    the centers when the samples admit one.
    """
    xs = np.asarray(samples, dtype=np.float64)
    if len(xs) == 0:
        raise DynamicsError("histogram needs at least one sample")
    if (xs <= 0).any():
        raise DynamicsError("histogram needs strictly positive samples")
    if bins_per_decade < 1:
        raise DynamicsError("bins_per_decade must be >= 1")
    lo = math.floor(math.log10(xs.min()) * bins_per_decade)
    hi = math.floor(math.log10(xs.max()) * bins_per_decade) + 1
    edges = 10.0 ** (np.arange(lo, hi + 1) / bins_per_decade)
    # guard the outer edges against log10 rounding
    edges[0] = min(edges[0], xs.min())
    edges[-1] = max(edges[-1], np.nextafter(xs.max(), np.inf))
    counts, _ = np.histogram(xs, bins=edges)
    widths = np.diff(edges)
    density = counts / (len(xs) * widths)
    centers = np.sqrt(edges[:-1] * edges[1:])
    try:
        fit = fit_lognormal(xs.tolist())
    except DynamicsError:
        fit = None
    fit_density = fit.pdf(centers) if fit is not None else None
    return VelocityHistogram(edges, centers, density, fit_density, fit)
