"""Scripted simulation runs over the interpreter.

A sensor script schedules events by tick:

    @<tick> <sensor>.<event>=<value>@<likelihood>

Valueless events drop "=<value>". Ticks must be non-decreasing;
same-tick events are delivered in file order. Blank lines and #
comments are ignored.

run_simulation settles the freshly loaded machine, then for each tick t
in 0..horizon-1 delivers that tick's events (one step each) and steps
the clock once, routing every OUT/CANCEL record to a mock entity log.
Running out of horizon with a still-blocked machine is an observation,
not an error; only an exhausted scheduling budget is flagged.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .events import Event, Registry, Scalar, SymbolicRule
from .interpreter import (
    DEFAULT_STEP_BUDGET,
    DEFAULT_THRESHOLD,
    Machine,
    StepBudgetExceeded,
    TICK,
    load,
)
from .lang.ast import Program
from .trace import CancelRecord, InRecord, OutRecord, TraceRecord


class ScriptError(ValueError):
    pass


@dataclass(frozen=True)
class ScriptEntry:
    tick: int
    sensor: str
    event: str
    value: Optional[str]  # raw text; coerced by declared type at run time
    likelihood: int


@dataclass(frozen=True)
class SensorScript:
    entries: tuple[ScriptEntry, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        last = 0
        for entry in self.entries:
            if entry.tick < last:
                raise ScriptError(
                    f"tick {entry.tick} after tick {last}; script must be non-decreasing"
                )
            last = entry.tick

    def at(self, tick: int) -> tuple[ScriptEntry, ...]:
        return tuple(e for e in self.entries if e.tick == tick)


_SCRIPT_LINE = re.compile(
    r"^@(\d+)\s+(\w+)\.(\w+)(?:=([A-Za-z0-9_-]+))?@(\d+)$"
)


def parse_script(text: str) -> SensorScript:
    entries: list[ScriptEntry] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        match = _SCRIPT_LINE.match(line)
        if match is None:
            raise ScriptError(f"line {lineno}: not a script line: {line!r}")
        tick, sensor, event, value, likelihood = match.groups()
        entries.append(ScriptEntry(int(tick), sensor, event, value, int(likelihood)))
    return SensorScript(entries)


def script_from_trace(records: Iterable[TraceRecord]) -> SensorScript:
    """Rebuild the input script from a trace's IN records."""
    entries = [
        ScriptEntry(
            r.tick,
            r.sensor,
            r.event,
            None if r.value is None else str(r.value),
            r.likelihood,
        )
        for r in records
        if isinstance(r, InRecord)
    ]
    return SensorScript(entries)


@dataclass
class MockEntity:
    entity: str
    received: list[TraceRecord] = field(default_factory=list)


@dataclass
class RunReport:
    trace: list[TraceRecord]
    final_clock: int
    quiescent: bool
    budget_exhausted: bool
    status: str
    entities: dict[str, MockEntity]


def _entry_event(entry: ScriptEntry, registry: Registry) -> Event:
    value_type = registry.sensor_event_type(entry.sensor, entry.event)
    if value_type is None:
        raise ScriptError(
            f"script uses undeclared channel {entry.sensor}.{entry.event}"
        )
    value: Scalar
    if value_type == "none":
        value = None
    elif value_type == "integer":
        if entry.value is None or not re.fullmatch(r"-?\d+", entry.value):
            raise ScriptError(
                f"{entry.sensor}.{entry.event} is integer-valued, got {entry.value!r}"
            )
        value = int(entry.value)
    else:
        if entry.value is None:
            raise ScriptError(f"{entry.sensor}.{entry.event} needs a text value")
        value = entry.value
    return Event(entry.sensor, entry.event, value, entry.likelihood)


def run_simulation(
    program: Program,
    registry: Registry,
    rules: Sequence[SymbolicRule],
    script: SensorScript,
    horizon: int,
    threshold: int = DEFAULT_THRESHOLD,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> RunReport:
    # fail on bad script entries before any instruction runs
    events = [(entry.tick, _entry_event(entry, registry)) for entry in script.entries]
    machine = load(program, registry, tuple(rules), threshold, step_budget)
    entities = {name: MockEntity(name) for name in registry.entities}
    trace: list[TraceRecord] = []
    budget_exhausted = False

    def run_step(step_input) -> bool:
        nonlocal budget_exhausted
        try:
            records = machine.step(step_input)
        except StepBudgetExceeded:
            budget_exhausted = True
            records = machine.drain()  # keep what was emitted before the trip
        _route(records, entities)
        trace.extend(records)
        return not budget_exhausted

    # the loop keeps counting even after the machine finishes, so the
    # report's clock reflects the simulated timeline, not the last
    # instant the program was alive
    sim_clock = 0
    if run_step(None):
        for tick in range(horizon):
            delivered = True
            for event_tick, event in events:
                if event_tick == tick:
                    if not run_step(event):
                        delivered = False
                        break
            if not delivered:
                break
            ticked = run_step(TICK)
            sim_clock += 1
            if not ticked:
                break

    return RunReport(
        trace=trace,
        final_clock=sim_clock,
        quiescent=machine.status in ("quiescent", "finished"),
        budget_exhausted=budget_exhausted,
        status=machine.status,
        entities=entities,
    )


def _route(records: list[TraceRecord], entities: dict[str, MockEntity]) -> None:
    for record in records:
        if isinstance(record, (OutRecord, CancelRecord)):
            log = entities.get(record.entity)
            if log is not None:
                log.received.append(record)


TraceLike = Union[Sequence[TraceRecord], Sequence[str]]


def _lines(trace: TraceLike) -> list[str]:
    return [item if isinstance(item, str) else item.line for item in trace]


def diff_traces(
    a: TraceLike, b: TraceLike
) -> list[tuple[int, Optional[str], Optional[str]]]:
    """First divergence between two traces; [] iff identical.

    Returns at most one (index, left, right) tuple, with None standing
    for "trace ended here".
    """
    left, right = _lines(a), _lines(b)
    for i, (la, lb) in enumerate(zip(left, right)):
        if la != lb:
            return [(i, la, lb)]
    if len(left) != len(right):
        i = min(len(left), len(right))
        return [
            (
                i,
                left[i] if i < len(left) else None,
                right[i] if i < len(right) else None,
            )
        ]
    return []


def render_report(report: RunReport) -> str:
    out_count = sum(1 for r in report.trace if isinstance(r, OutRecord))
    in_count = sum(1 for r in report.trace if isinstance(r, InRecord))
    cancel_count = sum(1 for r in report.trace if isinstance(r, CancelRecord))
    lines = [record.line for record in report.trace]
    lines.append("-- summary --")
    lines.append(
        f"final_clock={report.final_clock} status={report.status} "
        f"in={in_count} out={out_count} cancel={cancel_count} "
        f"budget_exhausted={str(report.budget_exhausted).lower()}"
    )
    return "\n".join(lines) + "\n"
