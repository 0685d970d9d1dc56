"""Deterministic statistics shared by the metric modules.

Sums go through :func:`math.fsum` so results do not depend on summation
order, shard layout or platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy.special import betainc

Z95 = 1.96


class StatsError(ValueError):
    """Raised when a statistic is undefined for the given input."""


@dataclass(frozen=True)
class TrendFit:
    slope: float
    intercept: float
    pearson_r: float
    p_value: float
    n: int


def mean(xs: Sequence[float]) -> float:
    if not xs:
        raise StatsError("mean of empty sequence")
    lo, hi = min(xs), max(xs)
    if lo == hi:
        # keeps constant inputs bit-exact regardless of length
        return float(lo)
    return math.fsum(xs) / len(xs)


def sample_std(xs: Sequence[float]) -> float:
    n = len(xs)
    if n < 2:
        raise StatsError("sample standard deviation needs n >= 2")
    m = mean(xs)
    return math.sqrt(math.fsum((x - m) ** 2 for x in xs) / (n - 1))


def ci95_halfwidth(samples: Sequence[float]) -> float:
    """Normal-approximation 95% half-width, ``1.96 * s / sqrt(n)``."""
    n = len(samples)
    if n < 2:
        raise StatsError("ci95 needs at least two samples")
    return Z95 * sample_std(samples) / math.sqrt(n)


def _centered(xs: Sequence[float]) -> list[float]:
    m = mean(xs)
    return [x - m for x in xs]


def t_sf_two_sided(t: float, df: int) -> float:
    """Two-sided tail probability of Student's t via the incomplete beta."""
    if math.isinf(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def pearson(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Sample Pearson correlation and its two-sided p-value (t test, n-2 df)."""
    n = len(x)
    if n != len(y):
        raise StatsError("pearson inputs differ in length")
    if n < 3:
        raise StatsError("pearson needs at least 3 points")
    dx, dy = _centered(x), _centered(y)
    sxx = math.fsum(a * a for a in dx)
    syy = math.fsum(b * b for b in dy)
    if sxx == 0.0 or syy == 0.0:
        raise StatsError("pearson undefined for zero-variance input")
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return r, t_sf_two_sided(t, n - 2)


def linfit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Ordinary least squares line; returns ``(slope, intercept)``."""
    n = len(x)
    if n != len(y):
        raise StatsError("linfit inputs differ in length")
    if n < 2:
        raise StatsError("linfit needs at least 2 points")
    mx, my = mean(x), mean(y)
    dx = [a - mx for a in x]
    sxx = math.fsum(a * a for a in dx)
    if sxx == 0.0:
        raise StatsError("linfit undefined for constant x")
    slope = math.fsum(a * (b - my) for a, b in zip(dx, y)) / sxx
    return slope, my - slope * mx


def trend(x: Sequence[float], y: Sequence[float]) -> TrendFit:
    """Least-squares line plus Pearson test.

    A constant ``y`` is reported as ``r = 0, p = 1`` rather than an error:
    the series has no trend, and trend tables need a row for it.
    """
    slope, intercept = linfit(x, y)
    if len(x) < 3:
        raise StatsError("trend needs at least 3 points")
    if min(y) == max(y):
        return TrendFit(0.0, float(y[0]), 0.0, 1.0, len(x))
    r, p = pearson(x, y)
    return TrendFit(slope, intercept, r, p, len(x))


# -- Kendall tau-b ---------------------------------------------------------


def _tie_sums(sorted_vals: Sequence[float]) -> tuple[int, int, int]:
    """Return sum t(t-1)/2, sum t(t-1)(2t+5), sum t(t-1)(t-2) over tie groups."""
    pairs = v_a = v_b = 0
    run = 1
    for i in range(1, len(sorted_vals) + 1):
        if i < len(sorted_vals) and sorted_vals[i] == sorted_vals[i - 1]:
            run += 1
            continue
        if run > 1:
            pairs += run * (run - 1) // 2
            v_a += run * (run - 1) * (2 * run + 5)
            v_b += run * (run - 1) * (run - 2)
        run = 1
    return pairs, v_a, v_b


def _count_swaps(seq: list[float]) -> int:
    """Merge sort ``seq`` in place, returning the number of strict inversions."""
    n = len(seq)
    swaps = 0
    buf = seq[:]
    width = 1
    src, dst = seq, buf
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if src[j] < src[i]:
                    dst[k] = src[j]
                    swaps += mid - i
                    j += 1
                else:
                    dst[k] = src[i]
                    i += 1
                k += 1
            while i < mid:
                dst[k] = src[i]
                i += 1
                k += 1
            while j < hi:
                dst[k] = src[j]
                j += 1
                k += 1
        src, dst = dst, src
        width *= 2
    if src is not seq:
        seq[:] = src
    return swaps


def kendall_tau_b(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Tie-corrected Kendall tau-b with a two-sided normal-approximation p.

    Knight's O(n log n) pair counting: sort by ``(a, b)``, count joint ties,
    then count discordant pairs as merge-sort inversions of ``b``.
    """
    n = len(a)
    if n != len(b):
        raise StatsError("kendall inputs differ in length")
    if n < 3:
        raise StatsError("kendall tau needs at least 3 items")
    pairs = sorted(zip(a, b))
    n0 = n * (n - 1) // 2

    n3 = 0  # pairs tied in both
    run = 1
    for i in range(1, n + 1):
        if i < n and pairs[i] == pairs[i - 1]:
            run += 1
            continue
        n3 += run * (run - 1) // 2
        run = 1

    n1, va_a, vb_a = _tie_sums([p[0] for p in pairs])
    bs = [p[1] for p in pairs]
    swaps = _count_swaps(bs)
    n2, va_b, vb_b = _tie_sums(bs)

    if n1 == n0 or n2 == n0:
        raise StatsError("kendall tau undefined when one side is all tied")

    # concordant - discordant
    s = n0 - n1 - n2 + n3 - 2 * swaps
    tau = s / math.sqrt((n0 - n1) * (n0 - n2))
    tau = max(-1.0, min(1.0, tau))

    var = (
        (n * (n - 1) * (2 * n + 5) - va_a - va_b) / 18.0
        + (2.0 * n1) * (2.0 * n2) / (2.0 * n * (n - 1))
        + vb_a * vb_b / (9.0 * n * (n - 1) * (n - 2))
    )
    if var <= 0.0:
        return tau, 1.0
    z = s / math.sqrt(var)
    return tau, math.erfc(abs(z) / math.sqrt(2.0))
