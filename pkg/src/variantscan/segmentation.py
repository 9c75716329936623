"""Change points, segments, pairwise comparison and greedy merging."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .change_detection import Bucketing, LdistSeries
from .emd import DistanceCache, EmdResult, emd
from .event_log import StochasticLanguage, Trace, stochastic_language


@dataclass(frozen=True)
class ChangePointSet:
    theta: float
    w: int
    points: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.points)


def detect_change_points(series: LdistSeries, theta: float) -> ChangePointSet:
    """Local maxima of the series at or above ``theta``.

    Boundary centers only need the one neighbour they have. A run of adjacent
    qualifying centers is a flat maximum and yields only its leftmost index.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    if not series.entries:
        raise ValueError("empty ldist series")
    idx, vals = series.indices, series.values
    qualifies = []
    for k, v in enumerate(vals):
        ok = v >= theta
        if k > 0:
            ok = ok and vals[k - 1] <= v
        if k < len(vals) - 1:
            ok = ok and vals[k + 1] <= v
        qualifies.append(ok)
    points = []
    for k, ok in enumerate(qualifies):
        if ok and not (k > 0 and qualifies[k - 1] and vals[k - 1] == vals[k]):
            points.append(idx[k])
    return ChangePointSet(theta, series.w, tuple(points))


@dataclass(frozen=True)
class Segment:
    index: int
    first_bucket: int
    last_bucket: int
    traces: tuple[Trace, ...]
    kappa_min: float
    kappa_max: float

    def __len__(self) -> int:
        return len(self.traces)

    @property
    def language(self) -> StochasticLanguage:
        return stochastic_language(self.traces)


def cut_segments(bucketing: Bucketing, points: ChangePointSet) -> list[Segment]:
    b = bucketing.b
    cuts = list(points.points)
    if cuts != sorted(set(cuts)) or any(not 1 <= p < b for p in cuts):
        raise ValueError(f"change points {cuts} invalid for {b} buckets")
    bounds = [0, *cuts, b]
    segments = []
    for k, (lo, hi) in enumerate(zip(bounds, bounds[1:]), start=1):
        entries = [e for bk in bucketing.buckets[lo:hi] for e in bk]
        segments.append(
            Segment(
                k,
                lo + 1,
                hi,
                tuple(e.trace for e in entries),
                min(e.kappa for e in entries),
                max(e.kappa for e in entries),
            )
        )
    return segments


@dataclass(frozen=True)
class ComparisonMatrix:
    labels: tuple[str, ...]
    values: np.ndarray
    plans: Optional[dict] = field(default=None, compare=False)

    @property
    def size(self) -> int:
        return len(self.labels)


def compare_segments(
    segments: Sequence[Segment],
    cache: Optional[DistanceCache] = None,
    retain_plans: bool = False,
    jobs: int = 1,
) -> ComparisonMatrix:
    if not segments:
        raise ValueError("need at least one segment")
    cache = cache if cache is not None else DistanceCache()
    langs = [s.language for s in segments]
    k = len(segments)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]

    def solve(pair) -> EmdResult:
        i, j = pair
        return emd(langs[i], langs[j], cache, retain_plan=retain_plans)

    if jobs > 1 and len(pairs) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(solve, pairs))
    else:
        results = [solve(p) for p in pairs]

    values = np.zeros((k, k))
    plans = {} if retain_plans else None
    for (i, j), res in zip(pairs, results):
        values[i, j] = values[j, i] = res.value
        if plans is not None:
            plans[(i + 1, j + 1)] = res.plan
    return ComparisonMatrix(tuple(f"seg{s.index}" for s in segments), values, plans)


@dataclass(frozen=True)
class MergeStep:
    group_a: tuple[int, ...]
    group_b: tuple[int, ...]
    distance: float


@dataclass(frozen=True)
class VariantGroup:
    members: tuple[int, ...]
    traces: tuple[Trace, ...]
    kappa_intervals: tuple[tuple[float, float], ...]

    @property
    def kappa_min(self) -> float:
        return min(lo for lo, _ in self.kappa_intervals)

    @property
    def kappa_max(self) -> float:
        return max(hi for _, hi in self.kappa_intervals)


@dataclass(frozen=True)
class MergeResult:
    theta: float
    steps: tuple[MergeStep, ...]
    groups: tuple[VariantGroup, ...]

    @property
    def partition(self) -> list[set[int]]:
        return [set(g.members) for g in self.groups]


def _group_of(members: Sequence[Segment]) -> VariantGroup:
    ordered = sorted(members, key=lambda s: s.index)
    return VariantGroup(
        tuple(s.index for s in ordered),
        tuple(t for s in ordered for t in s.traces),
        tuple((s.kappa_min, s.kappa_max) for s in ordered),
    )


def merge_segments(
    segments: Sequence[Segment], theta: float, cache: Optional[DistanceCache] = None
) -> MergeResult:
    """Repeatedly pool the two closest groups while their EMD is below ``theta``.

    Any pair may merge, adjacent or not. Groups are kept ordered by their
    smallest member and ties resolve to the lexicographically smallest pair.
    """
    if not segments:
        raise ValueError("need at least one segment")
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    cache = cache if cache is not None else DistanceCache()
    groups: list[list[Segment]] = [[s] for s in sorted(segments, key=lambda s: s.index)]
    langs = [stochastic_language(g[0].traces) for g in groups]
    memo: dict[tuple[tuple[int, ...], tuple[int, ...]], float] = {}

    def key(g):
        return tuple(s.index for s in g)

    steps = []
    while len(groups) > 1:
        best = None
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                pair = (key(groups[i]), key(groups[j]))
                if pair not in memo:
                    memo[pair] = emd(langs[i], langs[j], cache).value
                d = memo[pair]
                if best is None or d < best[0]:
                    best = (d, i, j)
        d, i, j = best
        if d >= theta:
            break
        steps.append(MergeStep(key(groups[i]), key(groups[j]), d))
        merged = groups[i] + groups[j]
        groups[i] = sorted(merged, key=lambda s: s.index)
        langs[i] = stochastic_language(t for s in groups[i] for t in s.traces)
        del groups[j], langs[j]
    return MergeResult(theta, tuple(steps), tuple(_group_of(g) for g in groups))
