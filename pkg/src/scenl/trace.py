"""Trace records and their one-line text form.

    T=<tick> IN <sensor>.<event>=<value>@<likelihood>
    T=<tick> OUT <entity>.<fn>(<arg?>) br=<id>
    T=<tick> CANCEL <entity>.<fn> br=<id>
    T=<tick> DELIVERY_FAIL <entity>.<fn> br=<id> reason=<text>

Valueless events drop the "=<value>" part. The same records serialize
to JSON objects for the service stream, one object per record.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .events import Scalar


@dataclass(frozen=True)
class InRecord:
    tick: int
    sensor: str
    event: str
    value: Scalar
    likelihood: int

    @property
    def line(self) -> str:
        middle = f"{self.sensor}.{self.event}"
        if self.value is not None:
            middle += f"={self.value}"
        return f"T={self.tick} IN {middle}@{self.likelihood}"


@dataclass(frozen=True)
class OutRecord:
    tick: int
    entity: str
    function: str
    arg: Scalar
    branch: int

    @property
    def line(self) -> str:
        arg = "" if self.arg is None else str(self.arg)
        return f"T={self.tick} OUT {self.entity}.{self.function}({arg}) br={self.branch}"


@dataclass(frozen=True)
class CancelRecord:
    tick: int
    entity: str
    function: str
    branch: int

    @property
    def line(self) -> str:
        return f"T={self.tick} CANCEL {self.entity}.{self.function} br={self.branch}"


@dataclass(frozen=True)
class DeliveryFailRecord:
    tick: int
    entity: str
    function: str
    branch: int
    reason: str

    @property
    def line(self) -> str:
        return (
            f"T={self.tick} DELIVERY_FAIL {self.entity}.{self.function} "
            f"br={self.branch} reason={self.reason}"
        )


TraceRecord = Union[InRecord, OutRecord, CancelRecord, DeliveryFailRecord]

_IN = re.compile(r"^T=(\d+) IN (\w+)\.(\w+)(?:=([^@]*))?@(\d+)$")
_OUT = re.compile(r"^T=(\d+) OUT (\w+)\.(\w+)\((.*)\) br=(\d+)$")
_CANCEL = re.compile(r"^T=(\d+) CANCEL (\w+)\.(\w+) br=(\d+)$")
_FAIL = re.compile(r"^T=(\d+) DELIVERY_FAIL (\w+)\.(\w+) br=(\d+) reason=(.*)$")


def _scalar(text: Optional[str]) -> Scalar:
    if text is None or text == "":
        return None
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    return text


def parse_trace_line(line: str) -> TraceRecord:
    match = _IN.match(line)
    if match:
        tick, sensor, event, value, likelihood = match.groups()
        return InRecord(int(tick), sensor, event, _scalar(value), int(likelihood))
    match = _OUT.match(line)
    if match:
        tick, entity, function, arg, branch = match.groups()
        return OutRecord(int(tick), entity, function, _scalar(arg), int(branch))
    match = _CANCEL.match(line)
    if match:
        tick, entity, function, branch = match.groups()
        return CancelRecord(int(tick), entity, function, int(branch))
    match = _FAIL.match(line)
    if match:
        tick, entity, function, branch, reason = match.groups()
        return DeliveryFailRecord(int(tick), entity, function, int(branch), reason)
    raise ValueError(f"not a trace line: {line!r}")


def render_trace(records: Iterable[TraceRecord]) -> str:
    return "\n".join(r.line for r in records)


def parse_trace(text: str) -> list[TraceRecord]:
    records = []
    for line in text.splitlines():
        if line.strip():
            records.append(parse_trace_line(line))
    return records


def record_to_json(record: TraceRecord) -> dict:
    if isinstance(record, InRecord):
        return {
            "type": "IN",
            "tick": record.tick,
            "sensor": record.sensor,
            "event": record.event,
            "value": record.value,
            "likelihood": record.likelihood,
        }
    if isinstance(record, OutRecord):
        return {
            "type": "OUT",
            "tick": record.tick,
            "entity": record.entity,
            "fn": record.function,
            "arg": record.arg,
            "br": record.branch,
        }
    if isinstance(record, CancelRecord):
        return {
            "type": "CANCEL",
            "tick": record.tick,
            "entity": record.entity,
            "fn": record.function,
            "br": record.branch,
        }
    return {
        "type": "DELIVERY_FAIL",
        "tick": record.tick,
        "entity": record.entity,
        "fn": record.function,
        "br": record.branch,
        "reason": record.reason,
    }


def record_from_json(data: dict) -> TraceRecord:
    kind = data.get("type")
    if kind == "IN":
        return InRecord(
            data["tick"], data["sensor"], data["event"], data["value"], data["likelihood"]
        )
    if kind == "OUT":
        return OutRecord(data["tick"], data["entity"], data["fn"], data["arg"], data["br"])
    if kind == "CANCEL":
        return CancelRecord(data["tick"], data["entity"], data["fn"], data["br"])
    if kind == "DELIVERY_FAIL":
        return DeliveryFailRecord(
            data["tick"], data["entity"], data["fn"], data["br"], data["reason"]
        )
    raise ValueError(f"not a trace record object: {data!r}")
