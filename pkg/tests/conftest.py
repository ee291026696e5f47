from pathlib import Path

import pytest

from scenl import (
    EntityDescriptor,
    FunctionSig,
    Registry,
    SensorDescriptor,
    parse_rules,
)

DEMO_DIR = Path(__file__).resolve().parent.parent / "demos"

GREETING_SOURCE = (
    "<env.humanHere()>(/(bioloid.sayHello();, greta.sayHello();, "
    "nabaztag.sayHello();));"
)

COMFORT_RULES = """
rule cold_watch: if thermometer.temperature < 15 emit cold
rule hot_watch: if thermometer.temperature > 27 emit hot
"""


@pytest.fixture
def greeting_registry() -> Registry:
    registry = Registry()
    registry.add_sensor(SensorDescriptor("env", {"humanHere": "integer"}))
    for name in ("bioloid", "greta", "nabaztag"):
        registry.add_entity(
            EntityDescriptor(name, {"sayHello": FunctionSig("procedure", 0)})
        )
    return registry


@pytest.fixture
def thermo_registry() -> Registry:
    registry = Registry()
    registry.add_sensor(SensorDescriptor("thermometer", {"temperature": "integer"}))
    registry.add_entity(
        EntityDescriptor(
            "h", {"on": FunctionSig("procedure", 0), "off": FunctionSig("procedure", 0)}
        )
    )
    return registry


@pytest.fixture
def comfort_rules():
    return tuple(parse_rules(COMFORT_RULES))


@pytest.fixture
def lab_registry() -> Registry:
    """A wider registry for interpreter tests: two entities, mixed kinds."""
    registry = Registry()
    registry.add_sensor(
        SensorDescriptor(
            "env",
            {"humanHere": "integer", "label": "text", "ping": "none"},
        )
    )
    registry.add_sensor(SensorDescriptor("meter", {"level": "integer"}))
    registry.add_entity(
        EntityDescriptor(
            "a",
            {
                "f": FunctionSig("procedure", 0),
                "g": FunctionSig("procedure", 0),
                "move": FunctionSig("procedure", 1),
            },
        )
    )
    registry.add_entity(
        EntityDescriptor(
            "b",
            {"f": FunctionSig("procedure", 0), "g": FunctionSig("procedure", 0)},
        )
    )
    return registry


@pytest.fixture
def demo_dir() -> Path:
    return DEMO_DIR
