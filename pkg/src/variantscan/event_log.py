"""Event logs: parsing, export and control-flow projection."""

from __future__ import annotations

import csv
import io
import math
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator, Mapping, Sequence, TextIO, Union

Variant = tuple[str, ...]
StochasticLanguage = dict[Variant, float]
AttributeValue = Union[float, str]

REQUIRED_COLUMNS = ("case_id", "activity", "timestamp")


class LogFormatError(ValueError):
    """Raised when an input log cannot be turned into a valid EventLog."""


@dataclass(frozen=True)
class Event:
    case_id: str
    activity: str
    timestamp: datetime

    def __post_init__(self):
        if not self.activity:
            raise LogFormatError(f"case {self.case_id!r}: empty activity label")
        if self.timestamp.tzinfo is None:
            raise LogFormatError(f"case {self.case_id!r}: timestamp must be timezone-aware")


@dataclass(frozen=True)
class Trace:
    case_id: str
    events: tuple[Event, ...]
    attributes: Mapping[str, AttributeValue] = field(default_factory=dict)

    def __post_init__(self):
        if not self.events:
            raise LogFormatError(f"case {self.case_id!r}: trace has no events")
        for prev, ev in zip(self.events, self.events[1:]):
            if ev.timestamp < prev.timestamp:
                raise LogFormatError(f"case {self.case_id!r}: events out of timestamp order")
        for ev in self.events:
            if ev.case_id != self.case_id:
                raise LogFormatError(
                    f"case {self.case_id!r}: event belongs to case {ev.case_id!r}"
                )

    @property
    def variant(self) -> Variant:
        return tuple(ev.activity for ev in self.events)

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class EventLog:
    traces: tuple[Trace, ...]

    def __post_init__(self):
        if not self.traces:
            raise LogFormatError("zero traces")
        seen = set()
        for tr in self.traces:
            if tr.case_id in seen:
                raise LogFormatError(f"duplicate case id {tr.case_id!r}")
            seen.add(tr.case_id)

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self) -> Iterator[Trace]:
        return iter(self.traces)

    def attribute_names(self) -> list[str]:
        names = set()
        for tr in self.traces:
            names.update(tr.attributes)
        return sorted(names)


@dataclass(frozen=True)
class CsvConfig:
    """How to read a CSV log.

    ``timestamp_format`` is ``"rfc3339"``, ``"epoch"`` (integer seconds) or
    ``"auto"``, which treats integer-looking values as epoch seconds.
    """

    timestamp_format: str = "auto"
    delimiter: str = ","

    def __post_init__(self):
        if self.timestamp_format not in ("auto", "rfc3339", "epoch"):
            raise ValueError(f"unknown timestamp format {self.timestamp_format!r}")


def parse_rfc3339(raw: str) -> datetime:
    text = raw.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts


def parse_epoch(raw: str) -> datetime:
    return datetime.fromtimestamp(int(raw.strip()), tz=timezone.utc)


def _parse_timestamp(raw: str, fmt: str) -> datetime:
    if fmt == "epoch":
        return parse_epoch(raw)
    if fmt == "rfc3339":
        return parse_rfc3339(raw)
    stripped = raw.strip()
    if stripped.lstrip("+-").isdigit():
        return parse_epoch(stripped)
    return parse_rfc3339(stripped)


def _coerce_attribute(raw: str) -> AttributeValue:
    try:
        value = float(raw)
    except ValueError:
        return raw
    return value if math.isfinite(value) else raw


def _build_log(
    rows: Iterable[tuple[str, str, datetime]],
    attributes: Mapping[str, Mapping[str, AttributeValue]],
) -> EventLog:
    # dicts keep first-appearance order of cases; list.sort is stable for ties
    grouped: dict[str, list[Event]] = {}
    for case_id, activity, ts in rows:
        grouped.setdefault(case_id, []).append(Event(case_id, activity, ts))
    traces = []
    for case_id, events in grouped.items():
        events.sort(key=lambda ev: ev.timestamp)
        traces.append(Trace(case_id, tuple(events), dict(attributes.get(case_id, {}))))
    return EventLog(tuple(traces))


def _as_text(source: Union[bytes, BinaryIO, TextIO]) -> TextIO:
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8-sig"), newline="")
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8-sig", newline="")


def parse_csv(source: Union[bytes, BinaryIO, TextIO], config: CsvConfig = CsvConfig()) -> EventLog:
    reader = csv.reader(_as_text(source), delimiter=config.delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise LogFormatError("missing header row") from None
    header = [h.strip() for h in header]
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise LogFormatError(f"missing required column(s): {', '.join(missing)}")
    idx = {name: header.index(name) for name in REQUIRED_COLUMNS}
    extra = [(i, name) for i, name in enumerate(header) if name not in REQUIRED_COLUMNS]

    rows = []
    attributes: dict[str, dict[str, AttributeValue]] = {}
    for rowno, row in enumerate(reader, start=1):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) < len(header):
            row = row + [""] * (len(header) - len(row))
        case_id = row[idx["case_id"]]
        activity = row[idx["activity"]]
        raw_ts = row[idx["timestamp"]]
        try:
            ts = _parse_timestamp(raw_ts, config.timestamp_format)
        except (ValueError, OverflowError, OSError):
            raise LogFormatError(
                f"row {rowno} (line {reader.line_num}): unparseable timestamp {raw_ts!r}"
            ) from None
        if not activity:
            raise LogFormatError(f"row {rowno} (line {reader.line_num}): empty activity")
        rows.append((case_id, activity, ts))
        if case_id not in attributes:
            attributes[case_id] = {
                name: _coerce_attribute(row[i]) for i, name in extra if row[i] != ""
            }
    if not rows:
        raise LogFormatError("zero traces")
    return _build_log(rows, attributes)


def write_csv(log: EventLog, out: TextIO, traces: Sequence[Trace] | None = None) -> None:
    """Write ``log`` (or a subset ``traces`` of it) in the CSV format read by
    :func:`parse_csv`. Trace attributes are repeated on every event row."""
    traces = log.traces if traces is None else traces
    names = sorted({name for tr in traces for name in tr.attributes})
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([*REQUIRED_COLUMNS, *names])
    for tr in traces:
        attrs = ["" if n not in tr.attributes else _format_attribute(tr.attributes[n]) for n in names]
        for ev in tr.events:
            writer.writerow([tr.case_id, ev.activity, ev.timestamp.isoformat(), *attrs])


def _format_attribute(value: AttributeValue) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_xes(source: Union[bytes, BinaryIO]) -> EventLog:
    """Read the XES core subset: ``concept:name`` and ``time:timestamp`` on
    events, ``concept:name`` plus scalar attributes on traces."""
    try:
        if isinstance(source, (bytes, bytearray)):
            root = ET.fromstring(bytes(source))
        else:
            root = ET.parse(source).getroot()
    except ET.ParseError as exc:
        raise LogFormatError(f"malformed XML: {exc}") from None
    if _local(root.tag) != "log":
        raise LogFormatError(f"root element is <{_local(root.tag)}>, expected <log>")

    rows = []
    attributes: dict[str, dict[str, AttributeValue]] = {}
    for pos, trace_el in enumerate((c for c in root if _local(c.tag) == "trace"), start=1):
        case_id = None
        attrs: dict[str, AttributeValue] = {}
        events = []
        for child in trace_el:
            kind = _local(child.tag)
            key = child.get("key")
            if kind == "event":
                events.append(child)
            elif key == "concept:name":
                case_id = child.get("value")
            elif kind in ("float", "int") and key:
                try:
                    attrs[key] = float(child.get("value", ""))
                except ValueError:
                    raise LogFormatError(f"trace #{pos}: bad {kind} attribute {key!r}") from None
            elif kind == "string" and key:
                attrs[key] = child.get("value", "")
        if case_id is None:
            raise LogFormatError(f"trace #{pos} has no concept:name")
        if case_id in attributes:
            raise LogFormatError(f"duplicate trace concept:name {case_id!r}")
        attributes[case_id] = attrs
        if not events:
            raise LogFormatError(f"trace {case_id!r} has no events")
        for ev_el in events:
            activity = raw_ts = None
            for child in ev_el:
                key = child.get("key")
                if key == "concept:name":
                    activity = child.get("value")
                elif key == "time:timestamp":
                    raw_ts = child.get("value")
            if not activity:
                raise LogFormatError(f"trace {case_id!r}: event missing concept:name")
            if raw_ts is None:
                raise LogFormatError(f"trace {case_id!r}: event missing time:timestamp")
            try:
                ts = parse_rfc3339(raw_ts)
            except ValueError:
                raise LogFormatError(f"trace {case_id!r}: bad timestamp {raw_ts!r}") from None
            rows.append((case_id, activity, ts))
    if not attributes:
        raise LogFormatError("zero traces")
    return _build_log(rows, attributes)


def read_log(path: Union[str, Path], fmt: str = "auto", config: CsvConfig = CsvConfig()) -> EventLog:
    path = Path(path)
    if fmt == "auto":
        fmt = "xes" if path.suffix.lower() == ".xes" else "csv"
    with open(path, "rb") as fh:
        if fmt == "xes":
            return parse_xes(fh)
        if fmt == "csv":
            return parse_csv(fh.read(), config)
    raise ValueError(f"unknown log format {fmt!r}")


def control_flow(traces: Iterable[Trace]) -> Counter[Variant]:
    """Multiset of activity sequences, one per trace."""
    return Counter(tr.variant for tr in traces)


def language_from_counts(counts: Mapping[Variant, int]) -> StochasticLanguage:
    total = sum(counts.values())
    if total <= 0:
        raise ValueError("cannot build a stochastic language from an empty log")
    return {v: c / total for v, c in counts.items() if c > 0}


def stochastic_language(traces: Iterable[Trace]) -> StochasticLanguage:
    """Relative frequency of each variant. Accepts an EventLog or any
    iterable of traces (windows, segments)."""
    return language_from_counts(control_flow(traces))
