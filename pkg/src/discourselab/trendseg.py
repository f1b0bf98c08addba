"""Activity time series: binning, intra-day seasonality removal, and
up/down trend segmentation with ranked peak extraction.

Seasonality is multiplicative per time-of-day slot: each slot's factor is its
mean count across days divided by the mean of all slot means, so factors
average to one. Segmentation tracks a running extremum; a trend reverses when
the series counter-moves by more than a relative tolerance ``epsilon``, and a
trend expires after ``tau`` bins without a fresh extremum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus

SECONDS_PER_DAY = 86400


@dataclass(frozen=True, eq=False)
class CountSeries:
    """Evenly binned counts; ``start`` is aligned to a bin boundary."""

    bin_width: int
    start: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1 or len(self.values) < 1:
            raise ValueError("values must be a non-empty 1-d array")
        if (self.values < 0).any():
            raise ValueError("counts must be non-negative")

    def timestamp(self, i: int) -> int:
        return self.start + i * self.bin_width

    def slot_indices(self, slots_per_day: int) -> np.ndarray:
        offset = (self.start // self.bin_width) % slots_per_day
        return (offset + np.arange(len(self.values))) % slots_per_day


@dataclass(frozen=True, eq=False)
class SeasonProfile:
    slots_per_day: int
    factors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "factors", np.asarray(self.factors, dtype=float))
        if len(self.factors) != self.slots_per_day:
            raise ValueError("one factor per slot required")
        if (self.factors <= 0).any():
            raise ValueError("factors must be positive")


@dataclass(frozen=True)
class SegmenterConfig:
    epsilon: float = 0.2
    tau: int = 144

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must be in (0, 1)")
        if self.tau < 1:
            raise ValueError("tau must be >= 1")


@dataclass(frozen=True)
class TrendSegment:
    direction: str  # "up" or "down"
    start_index: int
    end_index: int
    extremum_index: int
    extremum_value: float
    amplitude: float


@dataclass(frozen=True)
class Peak:
    bin_index: int
    timestamp: int
    height: float
    rank: int


def bin_counts(corpus: Corpus, bin_width: int = 600) -> CountSeries:
    """Count posts per fixed-width bin; the first bin is aligned so that bin
    boundaries fall on multiples of ``bin_width`` since the epoch."""
    if not corpus.posts:
        raise ValueError("cannot bin an empty corpus")
    ts = np.fromiter((p.timestamp for p in corpus.posts), dtype=np.int64,
                     count=len(corpus.posts))
    first_bin = int(ts.min()) // bin_width
    idx = ts // bin_width - first_bin
    values = np.bincount(idx).astype(float)
    return CountSeries(bin_width=bin_width, start=first_bin * bin_width, values=values)


def seasonal_profile(series: CountSeries) -> SeasonProfile:
    """Per-slot multiplicative factors: slot mean over the mean of slot means.

    Requires the series to span at least one full day. Zero slots are floored
    to 1% of the smallest positive factor, then the profile is renormalized so
    the factors still average to one.
    """
    if SECONDS_PER_DAY % series.bin_width != 0:
        raise ValueError("bin width must divide one day")
    slots = SECONDS_PER_DAY // series.bin_width
    if len(series.values) < slots:
        raise ValueError("series must span at least one full day")
    slot_idx = series.slot_indices(slots)
    sums = np.bincount(slot_idx, weights=series.values, minlength=slots)
    counts = np.bincount(slot_idx, minlength=slots)
    slot_means = sums / counts
    grand = slot_means.mean()
    if grand <= 0:
        raise ValueError("series has no activity")
    factors = slot_means / grand
    positive = factors[factors > 0]
    floor = positive.min() * 0.01
    factors = np.maximum(factors, floor)
    factors = factors / factors.mean()
    return SeasonProfile(slots_per_day=slots, factors=factors)


def deseasonalize(series: CountSeries, profile: SeasonProfile) -> CountSeries:
    """Divide each bin by its slot factor."""
    if profile.slots_per_day * series.bin_width != SECONDS_PER_DAY:
        raise ValueError("profile slot count does not match the bin width")
    slot_idx = series.slot_indices(profile.slots_per_day)
    out = series.values / profile.factors[slot_idx]
    return CountSeries(bin_width=series.bin_width, start=series.start, values=out)


def segment_trends(series: CountSeries, config: SegmenterConfig) -> list[TrendSegment]:
    """Split the series into alternating up/down trends.

    An up trend tracks its running maximum; when a value falls below
    ``max * (1 - epsilon)`` the trend ends at that maximum and a down trend
    starts there (the boundary extremum is shared). A trend also ends when
    more than ``tau`` bins pass without a new extremum. Down trends mirror
    the rule with ``min * (1 + epsilon)``. Before the first decisive move the
    direction is open and both extrema are tracked.
    """
    v = series.values
    n = len(v)
    if n < 2:
        raise ValueError("series too short to segment")
    eps, tau = config.epsilon, config.tau
    segments: list[TrendSegment] = []
    seg_start = 0
    direction: str | None = None
    mx_i = mn_i = 0
    mx = mn = float(v[0])

    def close(kind: str, start: int, end: int, ext_i: int, ext: float) -> None:
        segments.append(TrendSegment(
            direction=kind, start_index=start, end_index=end,
            extremum_index=ext_i, extremum_value=ext,
            amplitude=abs(ext - float(v[start])),
        ))

    for i in range(1, n):
        x = float(v[i])
        if direction is None:
            fresh = False
            if x > mx:
                mx, mx_i, fresh = x, i, True
            if x < mn:
                mn, mn_i, fresh = x, i, True
            if x > mn * (1 + eps):
                # decisive rise: emit the opening down-leg, if any
                if mn_i > seg_start:
                    close("down", seg_start, mn_i, mn_i, mn)
                    seg_start = mn_i
                direction = "up"
                mx, mx_i = x, i  # x exceeds everything since the minimum
            elif x < mx * (1 - eps):
                if mx_i > seg_start:
                    close("up", seg_start, mx_i, mx_i, mx)
                    seg_start = mx_i
                direction = "down"
                mn, mn_i = x, i
            elif not fresh and i - max(mx_i, mn_i) > tau:
                # stagnation before any decisive move: commit to the more
                # recent extremum's trend and flip
                if mx_i >= mn_i:
                    if mx_i > seg_start:
                        close("up", seg_start, mx_i, mx_i, mx)
                        seg_start = mx_i
                    direction = "down"
                    lo = seg_start + 1 if i > seg_start else seg_start
                    j = int(np.argmin(v[lo:i + 1])) + lo
                    mn, mn_i = float(v[j]), j
                else:
                    if mn_i > seg_start:
                        close("down", seg_start, mn_i, mn_i, mn)
                        seg_start = mn_i
                    direction = "up"
                    lo = seg_start + 1 if i > seg_start else seg_start
                    j = int(np.argmax(v[lo:i + 1])) + lo
                    mx, mx_i = float(v[j]), j
        elif direction == "up":
            if x > mx:
                mx, mx_i = x, i
            elif x < mx * (1 - eps):
                close("up", seg_start, mx_i, mx_i, mx)
                seg_start = mx_i
                direction = "down"
                mn, mn_i = x, i  # nothing since the max can be lower than x
            elif i - mx_i > tau:
                close("up", seg_start, mx_i, mx_i, mx)
                seg_start = mx_i
                direction = "down"
                j = int(np.argmin(v[seg_start + 1:i + 1])) + seg_start + 1
                mn, mn_i = float(v[j]), j
        else:  # down
            if x < mn:
                mn, mn_i = x, i
            elif x > mn * (1 + eps):
                close("down", seg_start, mn_i, mn_i, mn)
                seg_start = mn_i
                direction = "up"
                mx, mx_i = x, i
            elif i - mn_i > tau:
                close("down", seg_start, mn_i, mn_i, mn)
                seg_start = mn_i
                direction = "up"
                j = int(np.argmax(v[seg_start + 1:i + 1])) + seg_start + 1
                mx, mx_i = float(v[j]), j

    # close the open trend at the final bin
    if direction is None:
        direction = "up" if mx_i >= mn_i else "down"
    if direction == "up":
        close("up", seg_start, n - 1, mx_i, mx)
    else:
        close("down", seg_start, n - 1, mn_i, mn)
    return segments


def extract_peaks(series: CountSeries, segments: list[TrendSegment],
                  top_n: int) -> list[Peak]:
    """Rank the confirmed peaks (up-trend maxima followed by a down trend)
    by height, ties broken by earlier timestamp."""
    if top_n <= 0:
        raise ValueError("top_n must be positive")
    candidates = []
    for k, seg in enumerate(segments):
        if seg.direction != "up":
            continue
        if k == len(segments) - 1:
            continue  # unconfirmed: the series ends while still rising
        ts = series.timestamp(seg.extremum_index)
        candidates.append((-(seg.extremum_value), ts, seg.extremum_index))
    candidates.sort()
    peaks = [
        Peak(bin_index=idx, timestamp=ts, height=-negh, rank=r + 1)
        for r, (negh, ts, idx) in enumerate(candidates[:top_n])
    ]
    return peaks
