"""Raw sensor events, symbolic-event rules, descriptor files, and the
environment state the interpreter reads conditions from.

An event is a quadruple (sensor, event name, value, likelihood) plus a
sequence number assigned at delivery. Likelihood is the emitting
sensor's confidence, 0..100; conditions only treat a channel as present
when its likelihood reaches the configured threshold.

Symbolic rules lift raw integer/text readings into named symbolic
events ("temperature below 15 means cold"). Derived events appear under
the reserved pseudo-sensor ``symbolic``, carry the source value and
likelihood, and are never themselves rule inputs, so one delivery
derives at most one layer.

Descriptor files are UTF-8, line based, one descriptor per file:

    sensor thermometer          entity nabaztag
    event temperature: integer  fn sayHello: procedure/0

Rule files:

    rule cold_rule: if thermometer.temperature < 15 emit cold
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Union

from .lang.ast import Program
from .lang.macros import parse_macro_library

SYMBOLIC_SENSOR = "symbolic"

EVENT_TYPES = ("integer", "text", "none")
FUNCTION_KINDS = ("procedure", "integer", "boolean")
COMPARATORS = ("<=", ">=", "==", "!=", "<", ">")  # two-char ops first

Scalar = Union[int, str, None]


class DescriptorError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class RegistryError(ValueError):
    pass


class StaleEventError(ValueError):
    """Delivery order went backwards: seq did not increase."""


class RuleTypeError(TypeError):
    """An ordering comparator met a non-integer value."""


@dataclass(frozen=True)
class Event:
    sensor: str
    name: str
    value: Scalar
    likelihood: int
    seq: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.likelihood <= 100:
            raise ValueError(f"likelihood {self.likelihood} outside 0..100")

    @property
    def channel(self) -> tuple[str, str]:
        return (self.sensor, self.name)


def event_from_strings(
    sensor: str,
    name: str,
    value: Optional[str],
    likelihood: str,
    registry: Optional["Registry"] = None,
) -> Event:
    """Build an Event from the wire quadruple of strings.

    The value is coerced by the declared event type when a registry is
    given (integer -> int, none -> dropped); without one, digit strings
    become ints and everything else stays text.
    """
    coerced: Scalar
    declared = registry.sensor_event_type(sensor, name) if registry else None
    if declared == "integer":
        if value is None:
            raise ValueError(f"{sensor}.{name} is integer-valued, got no value")
        coerced = int(value)
    elif declared == "none":
        coerced = None
    elif declared == "text":
        if value is None:
            raise ValueError(f"{sensor}.{name} is text-valued, got no value")
        coerced = value
    elif value is None:
        coerced = None
    else:
        coerced = int(value) if re.fullmatch(r"-?\d+", value) else value
    return Event(sensor, name, coerced, int(likelihood))


# --- descriptors and registry ------------------------------------------


@dataclass(frozen=True)
class SensorDescriptor:
    sensor: str
    events: dict[str, str] = field(default_factory=dict)  # name -> value type


@dataclass(frozen=True)
class FunctionSig:
    kind: str
    arity: int


@dataclass(frozen=True)
class EntityDescriptor:
    entity: str
    functions: dict[str, FunctionSig] = field(default_factory=dict)


class Registry:
    """Declared sensors, entities, and macros for one deployment.

    Sensor and entity namespaces are disjoint, and neither may claim the
    reserved name ``symbolic``.
    """

    def __init__(self) -> None:
        self.sensors: dict[str, SensorDescriptor] = {}
        self.entities: dict[str, EntityDescriptor] = {}
        self.macros: dict[str, Program] = {}

    def add_sensor(self, desc: SensorDescriptor) -> None:
        self._claim(desc.sensor)
        self.sensors[desc.sensor] = desc

    def add_entity(self, desc: EntityDescriptor) -> None:
        self._claim(desc.entity)
        self.entities[desc.entity] = desc

    def _claim(self, name: str) -> None:
        if name == SYMBOLIC_SENSOR:
            raise RegistryError(f"{SYMBOLIC_SENSOR!r} is reserved for derived events")
        if name in self.sensors or name in self.entities:
            raise RegistryError(f"name {name!r} already declared")

    def has_channel(self, sensor: str, event: str) -> bool:
        desc = self.sensors.get(sensor)
        return desc is not None and event in desc.events

    def sensor_event_type(self, sensor: str, event: str) -> Optional[str]:
        desc = self.sensors.get(sensor)
        if desc is None:
            return None
        return desc.events.get(event)

    def entity_function(self, entity: str, function: str) -> Optional[FunctionSig]:
        desc = self.entities.get(entity)
        if desc is None:
            return None
        return desc.functions.get(function)


_NAME = r"[A-Za-z][A-Za-z0-9_]*"
_SENSOR_HEADER = re.compile(rf"^sensor\s+({_NAME})$")
_ENTITY_HEADER = re.compile(rf"^entity\s+({_NAME})$")
_EVENT_LINE = re.compile(rf"^event\s+({_NAME})\s*:\s*(\w+)$")
_FN_LINE = re.compile(rf"^fn\s+({_NAME})\s*:\s*(\w+)\s*/\s*(\d+)$")


def _meaningful_lines(text: str) -> Iterable[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def parse_descriptor(
    text: str, kind: str
) -> Union[SensorDescriptor, EntityDescriptor]:
    """Parse one descriptor file; kind is "sensor" or "entity"."""
    if kind not in ("sensor", "entity"):
        raise ValueError(f"descriptor kind must be sensor or entity, not {kind!r}")
    name: Optional[str] = None
    events: dict[str, str] = {}
    functions: dict[str, FunctionSig] = {}
    for lineno, line in _meaningful_lines(text):
        if name is None:
            header = (_SENSOR_HEADER if kind == "sensor" else _ENTITY_HEADER).match(line)
            if header is None:
                raise DescriptorError(lineno, f"expected '{kind} <name>' header")
            name = header.group(1)
            continue
        if kind == "sensor":
            match = _EVENT_LINE.match(line)
            if match is None:
                raise DescriptorError(lineno, "expected 'event <name>: <type>'")
            event, value_type = match.groups()
            if value_type not in EVENT_TYPES:
                raise DescriptorError(lineno, f"unknown event type {value_type!r}")
            if event in events:
                raise DescriptorError(lineno, f"duplicate event {event!r}")
            events[event] = value_type
        else:
            match = _FN_LINE.match(line)
            if match is None:
                raise DescriptorError(lineno, "expected 'fn <name>: <kind>/<arity>'")
            fn, fn_kind, arity = match.groups()
            if fn_kind not in FUNCTION_KINDS:
                raise DescriptorError(lineno, f"unknown function kind {fn_kind!r}")
            if arity not in ("0", "1"):
                raise DescriptorError(lineno, "arity must be 0 or 1")
            if fn in functions:
                raise DescriptorError(lineno, f"duplicate function {fn!r}")
            functions[fn] = FunctionSig(fn_kind, int(arity))
    if name is None:
        raise DescriptorError(1, "empty descriptor")
    if kind == "sensor":
        return SensorDescriptor(name, events)
    return EntityDescriptor(name, functions)


def load_descriptor(path: Union[str, Path]) -> Union[SensorDescriptor, EntityDescriptor]:
    """Read a descriptor file, sniffing sensor/entity from its header."""
    text = Path(path).read_text(encoding="utf-8")
    for _, line in _meaningful_lines(text):
        kind = line.split(None, 1)[0]
        break
    else:
        raise DescriptorError(1, "empty descriptor")
    if kind not in ("sensor", "entity"):
        raise DescriptorError(1, f"expected 'sensor' or 'entity' header, found {kind!r}")
    return parse_descriptor(text, kind)


def registry_from_paths(
    descriptor_paths: Iterable[Union[str, Path]],
    macros_path: Optional[Union[str, Path]] = None,
) -> Registry:
    registry = Registry()
    for path in descriptor_paths:
        desc = load_descriptor(path)
        if isinstance(desc, SensorDescriptor):
            registry.add_sensor(desc)
        else:
            registry.add_entity(desc)
    if macros_path is not None:
        text = Path(macros_path).read_text(encoding="utf-8")
        registry.macros.update(parse_macro_library(text))
    return registry


# --- symbolic rules ------------------------------------------------------


@dataclass(frozen=True)
class SymbolicRule:
    name: str
    sensor: str
    event: str
    comparator: str
    threshold: Union[int, str]
    emit: str

    @property
    def source(self) -> tuple[str, str]:
        return (self.sensor, self.event)


_RULE_LINE = re.compile(
    rf"^rule\s+({_NAME})\s*:\s*if\s+({_NAME})\.({_NAME})\s*"
    rf"(<=|>=|==|!=|<|>)\s*(\S+)\s+emit\s+({_NAME})$"
)


def parse_rules(text: str) -> list[SymbolicRule]:
    rules: list[SymbolicRule] = []
    seen: set[str] = set()
    for lineno, line in _meaningful_lines(text):
        match = _RULE_LINE.match(line)
        if match is None:
            raise DescriptorError(
                lineno, "expected 'rule <name>: if <sensor>.<event> <op> <value> emit <name>'"
            )
        name, sensor, event, op, raw_threshold, emit = match.groups()
        if name in seen:
            raise DescriptorError(lineno, f"duplicate rule {name!r}")
        seen.add(name)
        threshold: Union[int, str]
        if re.fullmatch(r"-?\d+", raw_threshold):
            threshold = int(raw_threshold)
        elif op in ("==", "!="):
            threshold = raw_threshold
        else:
            raise DescriptorError(
                lineno, f"comparator {op!r} needs an integer threshold"
            )
        rules.append(SymbolicRule(name, sensor, event, op, threshold, emit))
    return rules


def check_rules(rules: Iterable[SymbolicRule], registry: Registry) -> list[str]:
    """Cross-check rules against declared sensors; returns problems."""
    problems: list[str] = []
    for rule in rules:
        value_type = registry.sensor_event_type(rule.sensor, rule.event)
        if value_type is None:
            problems.append(
                f"rule {rule.name!r} watches undeclared channel {rule.sensor}.{rule.event}"
            )
        elif rule.comparator not in ("==", "!=") and value_type != "integer":
            problems.append(
                f"rule {rule.name!r} orders over {value_type}-valued {rule.sensor}.{rule.event}"
            )
    return problems


def apply_rules(event: Event, rules: Iterable[SymbolicRule]) -> list[Event]:
    """Derive symbolic events for one raw event, in rule declaration order.

    Events already under the symbolic pseudo-sensor never chain.
    """
    if event.sensor == SYMBOLIC_SENSOR:
        return []
    derived: list[Event] = []
    for rule in rules:
        if rule.source != event.channel:
            continue
        if _holds(event.value, rule.comparator, rule.threshold):
            derived.append(
                Event(SYMBOLIC_SENSOR, rule.emit, event.value, event.likelihood)
            )
    return derived


def _holds(value: Scalar, comparator: str, threshold: Union[int, str]) -> bool:
    if comparator == "==":
        return value == threshold
    if comparator == "!=":
        return value != threshold
    if not isinstance(value, int) or not isinstance(threshold, int):
        raise RuleTypeError(
            f"comparator {comparator!r} needs integers, got {value!r} vs {threshold!r}"
        )
    if comparator == "<":
        return value < threshold
    if comparator == ">":
        return value > threshold
    if comparator == "<=":
        return value <= threshold
    return value >= threshold


# --- environment state ----------------------------------------------------


class ChannelState(NamedTuple):
    value: Scalar
    likelihood: int
    seq: int


class EnvState:
    """Latest reading per (sensor, event) channel, plus the event being
    dispatched right now (the pulse). Owned by one machine; not shared."""

    def __init__(self) -> None:
        self.latest: dict[tuple[str, str], ChannelState] = {}
        self.pulse: Optional[Event] = None
        self._max_seq = 0

    def ingest(self, event: Event) -> None:
        if event.seq <= self._max_seq:
            raise StaleEventError(
                f"seq {event.seq} does not advance past {self._max_seq}"
            )
        self._max_seq = event.seq
        self.latest[event.channel] = ChannelState(
            event.value, event.likelihood, event.seq
        )

    def lookup(self, sensor: str, name: str) -> Optional[ChannelState]:
        return self.latest.get((sensor, name))


def ingest(state: EnvState, event: Event) -> EnvState:
    state.ingest(event)
    return state


def with_seq(event: Event, seq: int) -> Event:
    return replace(event, seq=seq)
