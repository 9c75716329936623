"""Case-level indicators and ranking of traces along them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

from .event_log import Trace

SECONDS_PER_DAY = 86_400.0


class IndicatorError(ValueError):
    def __init__(self, message: str, case_ids: tuple[str, ...] = ()):
        super().__init__(message)
        self.case_ids = case_ids


@dataclass(frozen=True)
class IndicatorSpec:
    kind: str  # "duration" or "attribute"
    name: str = ""
    unit: str = "seconds"

    def __post_init__(self):
        if self.kind not in ("duration", "attribute"):
            raise ValueError(f"unknown indicator kind {self.kind!r}")
        if self.kind == "attribute" and not self.name:
            raise ValueError("attribute indicator needs a non-empty attribute name")
        if self.unit not in ("seconds", "days"):
            raise ValueError(f"unknown duration unit {self.unit!r}")

    @classmethod
    def parse(cls, text: str, unit: str = "seconds") -> "IndicatorSpec":
        """Parse the CLI form: ``duration`` or ``attribute:<name>``."""
        if text == "duration":
            return cls("duration", unit=unit)
        head, sep, name = text.partition(":")
        if head == "attribute" and sep:
            return cls("attribute", name=name, unit=unit)
        raise ValueError(f"indicator must be 'duration' or 'attribute:<name>', got {text!r}")

    @property
    def label(self) -> str:
        return f"duration[{self.unit}]" if self.kind == "duration" else self.name

    def to_dict(self) -> dict:
        return {"kind": self.kind, "name": self.name, "unit": self.unit}


def evaluate_indicator(trace: Trace, spec: IndicatorSpec) -> float:
    if spec.kind == "duration":
        seconds = (trace.events[-1].timestamp - trace.events[0].timestamp).total_seconds()
        return seconds / SECONDS_PER_DAY if spec.unit == "days" else seconds
    value = trace.attributes.get(spec.name)
    if value is None:
        raise IndicatorError(
            f"case {trace.case_id!r}: missing attribute {spec.name!r}", (trace.case_id,)
        )
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise IndicatorError(
            f"case {trace.case_id!r}: attribute {spec.name!r} is not numeric ({value!r})",
            (trace.case_id,),
        )
    return float(value)


class RankedEntry(NamedTuple):
    trace: Trace
    kappa: float


class RankedLog:
    """Traces sorted by ascending indicator value, ties by case id."""

    def __init__(self, entries: Iterable[RankedEntry]):
        self.entries: tuple[RankedEntry, ...] = tuple(entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[RankedEntry]:
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def traces(self) -> tuple[Trace, ...]:
        return tuple(e.trace for e in self.entries)

    @property
    def kappas(self) -> tuple[float, ...]:
        return tuple(e.kappa for e in self.entries)


def rank_entries(entries: Iterable[RankedEntry]) -> RankedLog:
    return RankedLog(sorted(entries, key=lambda e: (e.kappa, e.trace.case_id)))


def rank_log(traces: Iterable[Trace], spec: IndicatorSpec) -> RankedLog:
    entries, bad, messages = [], [], []
    for tr in traces:
        try:
            entries.append(RankedEntry(tr, evaluate_indicator(tr, spec)))
        except IndicatorError as exc:
            bad.extend(exc.case_ids)
            messages.append(str(exc))
    if bad:
        shown = "; ".join(messages[:5])
        more = f" (and {len(bad) - 5} more)" if len(bad) > 5 else ""
        raise IndicatorError(f"{len(bad)} case(s) lack indicator {spec.label}: {shown}{more}", tuple(bad))
    return rank_entries(entries)
