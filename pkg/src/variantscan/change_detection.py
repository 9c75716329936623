"""Bucketing of ranked logs and the sliding-window local distance series."""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .emd import DistanceCache, emd
from .event_log import StochasticLanguage, Trace, language_from_counts
from .indicators import RankedEntry, RankedLog


class WindowError(ValueError):
    pass


@dataclass(frozen=True)
class Bucketing:
    buckets: tuple[tuple[RankedEntry, ...], ...]

    @property
    def b(self) -> int:
        return len(self.buckets)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(bk) for bk in self.buckets)

    def bucket(self, i: int) -> tuple[RankedEntry, ...]:
        """Bucket ``i``, 1-based."""
        return self.buckets[i - 1]

    def boundary_kappa(self, i: int) -> float:
        return self.bucket(i)[-1].kappa

    def traces(self, first: int, last: int) -> list[Trace]:
        """Traces of buckets ``first..last`` inclusive, 1-based."""
        return [e.trace for bk in self.buckets[first - 1 : last] for e in bk]

    def variant_counts(self) -> list[Counter]:
        return [Counter(e.trace.variant for e in bk) for bk in self.buckets]


def make_buckets(ranked: RankedLog, b: int) -> Bucketing:
    n = len(ranked)
    if not 2 <= b <= n:
        raise WindowError(f"bucket count must lie in [2, {n}], got {b}")
    size, extra = divmod(n, b)
    buckets, start = [], 0
    for k in range(b):
        stop = start + size + (1 if k < extra else 0)
        buckets.append(tuple(ranked.entries[start:stop]))
        start = stop
    return Bucketing(tuple(buckets))


@dataclass(frozen=True)
class WindowPair:
    center: int
    left: tuple[Trace, ...]
    right: tuple[Trace, ...]


def window_pair(bucketing: Bucketing, w: int, i: int) -> WindowPair:
    _check_window(bucketing.b, w)
    if not w <= i <= bucketing.b - w:
        raise WindowError(f"center {i} outside [{w}, {bucketing.b - w}]")
    return WindowPair(
        i,
        tuple(bucketing.traces(i - w + 1, i)),
        tuple(bucketing.traces(i + 1, i + w)),
    )


@dataclass(frozen=True)
class LdistEntry:
    i: int
    kappa_boundary: float
    value: float


@dataclass(frozen=True)
class LdistSeries:
    w: int
    entries: tuple[LdistEntry, ...]

    @property
    def indices(self) -> list[int]:
        return [e.i for e in self.entries]

    @property
    def values(self) -> list[float]:
        return [e.value for e in self.entries]

    def value_at(self, i: int) -> float:
        return self.entries[i - self.entries[0].i].value

    def __len__(self) -> int:
        return len(self.entries)


def _check_window(b: int, w: int) -> None:
    if not 1 <= w <= b // 2:
        raise WindowError(f"window size must lie in [1, {b // 2}] for b={b}, got {w}")


def _window_language(counts: Sequence[Counter], first: int, last: int) -> StochasticLanguage:
    total: Counter = Counter()
    for c in counts[first - 1 : last]:
        total.update(c)
    return language_from_counts(total)


def ldist_series(
    bucketing: Bucketing,
    w: int,
    cache: Optional[DistanceCache] = None,
    jobs: int = 1,
    _counts: Optional[list[Counter]] = None,
) -> LdistSeries:
    """EMD between the left and right windows for every center ``w..b-w``."""
    b = bucketing.b
    _check_window(b, w)
    cache = cache if cache is not None else DistanceCache()
    counts = _counts if _counts is not None else bucketing.variant_counts()
    centers = range(w, b - w + 1)

    def at(i: int) -> float:
        left = _window_language(counts, i - w + 1, i)
        right = _window_language(counts, i + 1, i + w)
        return emd(left, right, cache).value

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(at, centers))
    else:
        values = [at(i) for i in centers]
    return LdistSeries(
        w,
        tuple(LdistEntry(i, bucketing.boundary_kappa(i), v) for i, v in zip(centers, values)),
    )


def multi_window_analysis(
    bucketing: Bucketing,
    windows: Iterable[int],
    cache: Optional[DistanceCache] = None,
    jobs: int = 1,
) -> list[LdistSeries]:
    sizes = list(dict.fromkeys(windows))
    for w in sizes:
        _check_window(bucketing.b, w)
    cache = cache if cache is not None else DistanceCache()
    counts = bucketing.variant_counts()
    return [ldist_series(bucketing, w, cache, jobs, _counts=counts) for w in sizes]
