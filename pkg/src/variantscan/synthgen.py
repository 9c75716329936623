"""Synthetic event logs: the risk-scored claim-handling process and
step-pattern logs with known change positions.

Randomness comes from ``numpy.random.Generator(PCG64(seed))``, whose stream
is stable across platforms and numpy versions.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Sequence

import numpy as np

from .event_log import Event, EventLog, Trace, Variant

EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)

CREATE = "Create Application"
CHECK = "Check Documents"
INTERVIEW = "Interview"
SUBMIT_MORE = "Submit More Documents"
SECOND_INTERVIEW = "Second Interview"
DECISION = "Final Decision"
CANCEL = "Cancel Application"

CANCEL_VARIANT: Variant = (CREATE, CANCEL)
SKIP_VARIANT: Variant = (CREATE, CHECK, INTERVIEW, DECISION)
FULL_VARIANT: Variant = (CREATE, CHECK, INTERVIEW, SUBMIT_MORE, SECOND_INTERVIEW, DECISION)
NOISY_FULL_VARIANT: Variant = (CREATE, CHECK, INTERVIEW, SUBMIT_MORE, SUBMIT_MORE, SECOND_INTERVIEW, DECISION)

LOW_RISK = 3.0
HIGH_RISK = 10.0


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _case_id(k: int, n: int) -> str:
    return f"case_{k:0{max(len(str(n - 1)), 1)}d}"


def _make_trace(case_id: str, start: datetime, variant: Variant, gaps: Sequence[int], attrs: dict) -> Trace:
    events, ts = [], start
    for activity, gap in zip(variant, gaps):
        ts = ts + timedelta(minutes=int(gap))
        events.append(Event(case_id, activity, ts))
    return Trace(case_id, tuple(events), attrs)


@dataclass(frozen=True)
class ClaimGenConfig:
    cases: int = 10_000
    seed: int = 42
    noise_rate: float = 0.05
    risk_low: float = 0.0
    risk_high: float = 15.0

    def __post_init__(self):
        if self.cases < 1:
            raise ValueError("case count must be at least 1")
        if not 0.0 <= self.noise_rate < 1.0:
            raise ValueError("noise rate must lie in [0, 1)")


def claim_variant(risk: float, noisy: bool = False) -> Variant:
    if risk > HIGH_RISK:
        return CANCEL_VARIANT
    if risk < LOW_RISK:
        return SKIP_VARIANT
    return NOISY_FULL_VARIANT if noisy else FULL_VARIANT


def generate_claim_log(config: ClaimGenConfig = ClaimGenConfig()) -> EventLog:
    rng = _rng(config.seed)
    n = config.cases
    risks = rng.uniform(config.risk_low, config.risk_high, size=n)
    noisy = rng.random(size=n) < config.noise_rate
    longest = len(NOISY_FULL_VARIANT)
    gaps = rng.integers(1, 24 * 60, size=(n, longest))
    traces = []
    for k in range(n):
        case_id = _case_id(k, n)
        variant = claim_variant(float(risks[k]), bool(noisy[k]))
        start = EPOCH + timedelta(hours=k)
        traces.append(_make_trace(case_id, start, variant, gaps[k], {"risk_score": float(risks[k])}))
    return EventLog(tuple(traces))


@dataclass(frozen=True)
class StepGenConfig:
    """Consecutive regions of identical cases.

    ``noise_rate`` is the per-case probability of dropping one uniformly
    chosen event from the region's variant (variants of length one are left
    alone).
    """

    regions: tuple[tuple[Variant, int], ...]
    noise_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.regions:
            raise ValueError("need at least one region")
        for variant, count in self.regions:
            if count < 1:
                raise ValueError("region counts must be at least 1")
            if not variant:
                raise ValueError("region variants must be non-empty")
        if not 0.0 <= self.noise_rate < 1.0:
            raise ValueError("noise rate must lie in [0, 1)")


def parse_regions(text: str) -> tuple[tuple[Variant, int], ...]:
    """``"A:70,B:30,A:50"``; a label may spell out a sequence as ``a>b>c``."""
    regions = []
    for part in text.split(","):
        label, sep, count = part.strip().rpartition(":")
        if not sep or not label:
            raise ValueError(f"region {part!r} is not of the form <variant>:<count>")
        variant = tuple(a.strip() for a in label.split(">"))
        if any(not a for a in variant):
            raise ValueError(f"region {part!r} has an empty activity")
        regions.append((variant, int(count)))
    return tuple(regions)


def generate_step_log(config: StepGenConfig) -> EventLog:
    rng = _rng(config.seed)
    n = sum(c for _, c in config.regions)
    traces = []
    k = 0
    for variant, count in config.regions:
        for _ in range(count):
            activities = variant
            if config.noise_rate and rng.random() < config.noise_rate and len(variant) > 1:
                drop = int(rng.integers(len(variant)))
                activities = variant[:drop] + variant[drop + 1 :]
            case_id = _case_id(k, n)
            start = EPOCH + timedelta(hours=k)
            traces.append(_make_trace(case_id, start, activities, [1] * len(activities), {"idx": float(k)}))
            k += 1
    return EventLog(tuple(traces))
