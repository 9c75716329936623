"""End-to-end analysis: parse, rank, bucket, slide, segment, compare, merge."""

from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .change_detection import Bucketing, LdistSeries, make_buckets, multi_window_analysis
from .emd import DistanceCache
from .event_log import CsvConfig, EventLog, read_log
from .indicators import IndicatorSpec, RankedLog, rank_log
from .segmentation import (
    ChangePointSet,
    ComparisonMatrix,
    MergeResult,
    Segment,
    compare_segments,
    cut_segments,
    detect_change_points,
    merge_segments,
)

log = logging.getLogger(__name__)


class AnalysisError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass(frozen=True)
class AnalysisConfig:
    input_path: Optional[str]
    indicator: IndicatorSpec
    buckets: int = 100
    windows: tuple[int, ...] = (2, 5, 10, 15)
    segment_window: int = 10
    theta: float = 0.1
    input_format: str = "auto"
    timestamp_format: str = "auto"
    out_dir: Optional[str] = None
    svg: bool = False
    retain_plans: bool = False
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "windows", tuple(dict.fromkeys(self.windows)))
        if self.buckets < 2:
            raise ValueError(f"bucket count must be at least 2, got {self.buckets}")
        if not self.windows:
            raise ValueError("need at least one window size")
        if self.segment_window not in self.windows:
            raise ValueError(
                f"segmentation window {self.segment_window} is not among the window sizes {list(self.windows)}"
            )
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta}")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")

    def to_dict(self) -> dict:
        # output location and worker count are left out: they must not change the report
        return {
            "input": self.input_path,
            "input_format": self.input_format,
            "timestamp_format": self.timestamp_format,
            "indicator": self.indicator.to_dict(),
            "buckets": self.buckets,
            "windows": list(self.windows),
            "segment_window": self.segment_window,
            "theta": self.theta,
            "retain_plans": self.retain_plans,
        }

    @classmethod
    def from_dict(cls, data: dict, **overrides) -> "AnalysisConfig":
        ind = data["indicator"]
        kwargs = dict(
            input_path=data["input"],
            input_format=data.get("input_format", "auto"),
            timestamp_format=data.get("timestamp_format", "auto"),
            indicator=IndicatorSpec(ind["kind"], ind.get("name", ""), ind.get("unit", "seconds")),
            buckets=data["buckets"],
            windows=tuple(data["windows"]),
            segment_window=data["segment_window"],
            theta=data["theta"],
            retain_plans=data.get("retain_plans", False),
        )
        kwargs.update(overrides)
        return cls(**kwargs)


@dataclass
class AnalysisReport:
    config: AnalysisConfig
    log: EventLog
    ranked: RankedLog
    bucketing: Bucketing
    series: list[LdistSeries]
    change_points: ChangePointSet
    segments: list[Segment]
    matrix: ComparisonMatrix
    merge: MergeResult
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def segmentation_series(self) -> LdistSeries:
        return next(s for s in self.series if s.w == self.config.segment_window)


@contextmanager
def _stage(name: str, timings: dict):
    start = time.perf_counter()
    try:
        yield
    except AnalysisError:
        raise
    except (ValueError, OSError, RuntimeError) as exc:
        raise AnalysisError(name, str(exc)) from exc
    finally:
        timings[name] = time.perf_counter() - start
    log.debug("stage %s done in %.3fs", name, timings[name])


def analyze_log(event_log: EventLog, config: AnalysisConfig) -> AnalysisReport:
    timings: dict[str, float] = {}
    cache = DistanceCache()
    with _stage("rank", timings):
        ranked = rank_log(event_log, config.indicator)
    with _stage("bucket", timings):
        bucketing = make_buckets(ranked, config.buckets)
    with _stage("ldist", timings):
        series = multi_window_analysis(bucketing, config.windows, cache, jobs=config.jobs)
    seg_series = next(s for s in series if s.w == config.segment_window)
    with _stage("peaks", timings):
        points = detect_change_points(seg_series, config.theta)
    log.info("w=%d theta=%g: change points %s", config.segment_window, config.theta, list(points.points))
    with _stage("segments", timings):
        segments = cut_segments(bucketing, points)
    with _stage("compare", timings):
        matrix = compare_segments(segments, cache, retain_plans=config.retain_plans, jobs=config.jobs)
    with _stage("merge", timings):
        merge = merge_segments(segments, config.theta, cache)
    return AnalysisReport(config, event_log, ranked, bucketing, series, points, segments, matrix, merge, timings)


def load_input(config: AnalysisConfig) -> EventLog:
    if config.input_path is None:
        raise AnalysisError("parse", "no input path given")
    timings: dict[str, float] = {}
    with _stage("parse", timings):
        return read_log(config.input_path, config.input_format, CsvConfig(config.timestamp_format))


def run_analysis(config: AnalysisConfig, event_log: Optional[EventLog] = None) -> AnalysisReport:
    """Run every stage and, when ``config.out_dir`` is set, write all outputs."""
    start = time.perf_counter()
    event_log = event_log if event_log is not None else load_input(config)
    report = analyze_log(event_log, config)
    if config.out_dir is not None:
        from .report import write_outputs, write_timings

        with _stage("write", report.timings):
            write_outputs(report, Path(config.out_dir))
        report.timings["total"] = time.perf_counter() - start
        # wall-clock numbers live apart from report.json, which must stay byte-stable
        write_timings(report.timings, Path(config.out_dir) / "timings.json")
    else:
        report.timings["total"] = time.perf_counter() - start
    return report
