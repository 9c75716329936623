"""Serialization of analysis results: JSON report, CSV tables, segment logs."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .change_detection import LdistSeries
from .event_log import stochastic_language, write_csv
from .indicators import IndicatorSpec
from .pipeline import AnalysisReport
from .segmentation import ComparisonMatrix

HEATMAP_SCALE = "linear; 0 is white, the largest value present is darkest"
TOP_VARIANTS = 10


class ReportConsistencyError(RuntimeError):
    pass


def fmt(x: float) -> float:
    """Round to 6 decimals; folds -0.0 into 0.0."""
    return round(float(x), 6) + 0.0


def fmt_str(x: float) -> str:
    return f"{fmt(x):.6f}"


def format_kappa(value: float, spec: IndicatorSpec) -> str:
    """Display form of an indicator value. Durations in days show whole
    days (floored)."""
    if spec.kind == "duration" and spec.unit == "days":
        return str(math.floor(value))
    if float(value).is_integer():
        return str(int(value))
    return f"{value:.3f}".rstrip("0").rstrip(".")


def _top_variants(traces) -> list[dict]:
    lang = stochastic_language(traces)
    ranked = sorted(lang.items(), key=lambda kv: (-kv[1], kv[0]))[:TOP_VARIANTS]
    return [{"variant": list(v), "probability": fmt(p)} for v, p in ranked]


def check_consistency(report: AnalysisReport) -> None:
    n = len(report.log)
    if sum(len(s) for s in report.segments) != n:
        raise ReportConsistencyError("segment sizes do not add up to the log size")
    if sum(len(g.traces) for g in report.merge.groups) != n:
        raise ReportConsistencyError("group sizes do not add up to the log size")
    members = sorted(m for g in report.merge.groups for m in g.members)
    if members != [s.index for s in report.segments]:
        raise ReportConsistencyError("final groups do not partition the segments")
    lo, hi = report.ranked[0].kappa, report.ranked[-1].kappa
    for p in report.change_points.points:
        if not lo <= report.bucketing.boundary_kappa(p) <= hi:
            raise ReportConsistencyError(f"change point {p} maps outside the indicator range")
    m = report.matrix.values
    if (m.diagonal() != 0).any() or abs(m - m.T).max(initial=0.0) > 1e-9:
        raise ReportConsistencyError("comparison matrix is not symmetric with zero diagonal")


def report_dict(report: AnalysisReport) -> dict:
    check_consistency(report)
    spec = report.config.indicator
    bk = report.bucketing
    out = {
        "config": report.config.to_dict(),
        "log": {
            "traces": len(report.log),
            "variants": len(stochastic_language(report.log)),
            "kappa_range": [fmt(report.ranked[0].kappa), fmt(report.ranked[-1].kappa)],
            "bucket_sizes": [min(bk.sizes), max(bk.sizes)],
        },
        "heatmap_scale": HEATMAP_SCALE,
        "ldist": [
            {
                "w": s.w,
                "entries": [
                    {"i": e.i, "kappa_boundary": fmt(e.kappa_boundary), "ldist": fmt(e.value)}
                    for e in s.entries
                ],
            }
            for s in report.series
        ],
        "change_points": [
            {
                "i": p,
                "kappa_boundary": fmt(bk.boundary_kappa(p)),
                "kappa_display": format_kappa(bk.boundary_kappa(p), spec),
            }
            for p in report.change_points.points
        ],
        "segments": [
            {
                "index": s.index,
                "buckets": [s.first_bucket, s.last_bucket],
                "kappa_range": [fmt(s.kappa_min), fmt(s.kappa_max)],
                "kappa_display": [format_kappa(s.kappa_min, spec), format_kappa(s.kappa_max, spec)],
                "traces": len(s),
                "top_variants": _top_variants(s.traces),
            }
            for s in report.segments
        ],
        "comparison": {
            "labels": list(report.matrix.labels),
            "matrix": [[fmt(x) for x in row] for row in report.matrix.values],
        },
        "merge": {
            "theta": report.merge.theta,
            "steps": [
                {"group_a": list(st.group_a), "group_b": list(st.group_b), "distance": fmt(st.distance)}
                for st in report.merge.steps
            ],
            "groups": [
                {
                    "members": list(g.members),
                    "traces": len(g.traces),
                    "kappa_intervals": [[fmt(lo), fmt(hi)] for lo, hi in g.kappa_intervals],
                }
                for g in report.merge.groups
            ],
        },
    }
    if report.matrix.plans is not None:
        out["comparison"]["plans"] = [
            {
                "pair": list(pair),
                "cost": fmt(plan.cost),
                "flows": [
                    {"from": list(plan.sources[i]), "to": list(plan.targets[j]), "mass": fmt(m)}
                    for (i, j), m in sorted(plan.flows.items())
                ],
            }
            for pair, plan in sorted(report.matrix.plans.items())
        ]
    return out


def dumps(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def write_series_csv(series: LdistSeries, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "kappa_boundary", "ldist"])
        for e in series.entries:
            writer.writerow([e.i, fmt_str(e.kappa_boundary), fmt_str(e.value)])


def write_matrix_csv(matrix: ComparisonMatrix, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["", *matrix.labels])
        for label, row in zip(matrix.labels, matrix.values):
            writer.writerow([label, *(fmt_str(x) for x in row)])


def segment_filename(k: int, kappa_min: float, kappa_max: float, spec: IndicatorSpec) -> str:
    return f"segment_{k}_{format_kappa(kappa_min, spec)}_{format_kappa(kappa_max, spec)}.csv"


def export_segments(report: AnalysisReport, out_dir: Path) -> list[Path]:
    """One CSV event log per final variant group plus ``manifest.json``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for stale in out_dir.glob("segment_*.csv"):
        stale.unlink()
    spec = report.config.indicator
    written, manifest = [], []
    for k, group in enumerate(report.merge.groups, start=1):
        name = segment_filename(k, group.kappa_min, group.kappa_max, spec)
        path = out_dir / name
        with open(path, "w", newline="", encoding="utf-8") as fh:
            write_csv(report.log, fh, group.traces)
        written.append(path)
        manifest.append(
            {
                "group": k,
                "file": name,
                "segments": list(group.members),
                "traces": len(group.traces),
                "kappa_range": [fmt(group.kappa_min), fmt(group.kappa_max)],
            }
        )
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(
        dumps({"indicator": spec.to_dict(), "total_traces": len(report.log), "groups": manifest}),
        encoding="utf-8",
    )
    return [*written, manifest_path]


def write_outputs(report: AnalysisReport, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    report_path = out_dir / "report.json"
    report_path.write_text(dumps(report_dict(report)), encoding="utf-8")
    paths.append(report_path)
    for s in report.series:
        p = out_dir / f"ldist_w{s.w}.csv"
        write_series_csv(s, p)
        paths.append(p)
    p = out_dir / "matrix.csv"
    write_matrix_csv(report.matrix, p)
    paths.append(p)
    paths.extend(export_segments(report, out_dir / "segments"))
    if report.config.svg:
        from .plotting import render_report_figures

        paths.extend(render_report_figures(report, out_dir))
    return paths


def write_timings(timings: dict, path: Path) -> None:
    path.write_text(dumps({k: round(v, 6) for k, v in timings.items()}), encoding="utf-8")

