"""Command line interface.

    variantscan analyze LOG --indicator attribute:risk_score --buckets 100 \\
        --windows 2,5,10,15 --segment-window 10 --theta 0.1 --out results/ --svg
    variantscan emd --log-a a.csv --log-b b.csv
    variantscan generate claim --cases 10000 --seed 42 --out claims.csv
    variantscan generate step --regions A:70,B:30,A:50 --out step.csv
    variantscan segment-export --report results/report.json --out segments/
"""

from __future__ import annotations

import json
import logging
import os
import sys
from pathlib import Path

import click

from .emd import emd as emd_value
from .event_log import CsvConfig, LogFormatError, read_log, stochastic_language, write_csv
from .indicators import IndicatorSpec
from .pipeline import AnalysisConfig, AnalysisError, load_input, run_analysis
from .synthgen import ClaimGenConfig, StepGenConfig, generate_claim_log, generate_step_log, parse_regions

LOG_LEVEL_ENV = "VS_LOG_LEVEL"


def _setup_logging() -> None:
    level = os.environ.get(LOG_LEVEL_ENV, "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _int_list(ctx, param, value):
    if value is None:
        return None
    try:
        return tuple(int(x) for x in value.split(",") if x.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}")


def _fail(stage: str, message: str) -> None:
    click.echo(f"error [{stage}]: {message}", err=True)
    sys.exit(1)


input_format_option = click.option(
    "--format", "input_format", type=click.Choice(["auto", "csv", "xes"]), default="auto", show_default=True,
    help="Log format; auto picks by file extension.",
)
timestamp_option = click.option(
    "--timestamp-format", type=click.Choice(["auto", "rfc3339", "epoch"]), default="auto", show_default=True,
    help="How CSV timestamps are written.",
)


@click.group()
def main():
    """Detect control-flow changes along a continuous case dimension."""
    _setup_logging()


@main.command()
@click.argument("log_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--indicator", default="duration", show_default=True, help="duration | attribute:<name>")
@click.option("--duration-unit", type=click.Choice(["seconds", "days"]), default="seconds", show_default=True)
@click.option("--buckets", "-b", type=int, default=100, show_default=True)
@click.option("--windows", callback=_int_list, default="2,5,10,15", show_default=True)
@click.option("--segment-window", type=int, default=None, help="Window used for segmentation [default: 10 if listed, else the first].")
@click.option("--theta", type=float, default=0.1, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--svg/--no-svg", default=False, help="Also render SVG heatmaps.")
@click.option("--retain-plans", is_flag=True, help="Include transport plans of the segment comparison.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker threads; output does not depend on it.")
@input_format_option
@timestamp_option
def analyze(log_path, indicator, duration_unit, buckets, windows, segment_window, theta, out_dir, svg,
            retain_plans, jobs, input_format, timestamp_format):
    """Run the full pipeline on LOG_PATH and write reports to --out."""
    try:
        spec = IndicatorSpec.parse(indicator, unit=duration_unit)
        if segment_window is None:
            segment_window = 10 if 10 in windows else windows[0]
        config = AnalysisConfig(
            input_path=str(log_path), indicator=spec, buckets=buckets, windows=windows,
            segment_window=segment_window, theta=theta, input_format=input_format,
            timestamp_format=timestamp_format, out_dir=out_dir, svg=svg,
            retain_plans=retain_plans, jobs=jobs,
        )
    except (ValueError, TypeError) as exc:
        _fail("config", str(exc))
    try:
        report = run_analysis(config)
    except AnalysisError as exc:
        _fail(exc.stage, str(exc).split("] ", 1)[-1])
    points = ", ".join(
        f"{p} ({report.bucketing.boundary_kappa(p):.6g})" for p in report.change_points.points
    ) or "none"
    click.echo(f"cases: {len(report.log)}  buckets: {report.bucketing.b}")
    click.echo(f"change points (w={config.segment_window}, theta={theta}): {points}")
    click.echo(f"segments: {len(report.segments)}  groups: {len(report.merge.groups)}")
    click.echo(f"outputs written to {out_dir}")


@main.command()
@click.option("--log-a", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--log-b", type=click.Path(exists=True, dir_okay=False), required=True)
@input_format_option
@timestamp_option
def emd(log_a, log_b, input_format, timestamp_format):
    """Earth mover's distance between the variant distributions of two logs."""
    try:
        cfg = CsvConfig(timestamp_format)
        a = read_log(log_a, input_format, cfg)
        b = read_log(log_b, input_format, cfg)
    except (LogFormatError, OSError) as exc:
        _fail("parse", str(exc))
    click.echo(f"{emd_value(stochastic_language(a), stochastic_language(b)).value:.6f}")


@main.group()
def generate():
    """Write synthetic logs in CSV format."""


def _write_log(log, out):
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        write_csv(log, fh)
    click.echo(f"wrote {len(log)} cases to {out}")


@generate.command("claim")
@click.option("--cases", type=int, default=10_000, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--noise", type=float, default=0.05, show_default=True,
              help="Probability of an extra 'Submit More Documents' in the middle branch.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def generate_claim(cases, seed, noise, out):
    """Risk-scored claim handling: cancel above 10, skip re-submission below 3."""
    try:
        log = generate_claim_log(ClaimGenConfig(cases=cases, seed=seed, noise_rate=noise))
    except ValueError as exc:
        _fail("generate", str(exc))
    _write_log(log, out)


@generate.command("step")
@click.option("--regions", required=True, help="Comma-separated <variant>:<count>; variant a>b>c or a single label.")
@click.option("--noise", type=float, default=0.0, show_default=True, help="Per-case probability of dropping one event.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def generate_step(regions, noise, seed, out):
    """Consecutive blocks of identical cases, indexed by an ascending idx attribute."""
    try:
        log = generate_step_log(StepGenConfig(parse_regions(regions), noise_rate=noise, seed=seed))
    except ValueError as exc:
        _fail("generate", str(exc))
    _write_log(log, out)


@main.command("segment-export")
@click.option("--report", "report_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="report.json written by analyze.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--jobs", type=int, default=1, show_default=True)
def segment_export(report_path, out_dir, jobs):
    """Re-run the analysis recorded in a report and export one CSV log per variant group."""
    from .pipeline import analyze_log
    from .report import export_segments

    try:
        data = json.loads(Path(report_path).read_text(encoding="utf-8"))
        config = AnalysisConfig.from_dict(data["config"], jobs=jobs)
    except (ValueError, KeyError, TypeError) as exc:
        _fail("config", f"unreadable report: {exc}")
    try:
        report = analyze_log(load_input(config), config)
        paths = export_segments(report, Path(out_dir))
    except AnalysisError as exc:
        _fail(exc.stage, str(exc).split("] ", 1)[-1])
    except OSError as exc:
        _fail("write", str(exc))
    for p in paths:
        click.echo(str(p))


if __name__ == "__main__":
    main()
