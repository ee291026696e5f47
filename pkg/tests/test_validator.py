import pytest

from scenl import Registry, parse, validate
from scenl.lang import ast


def check(source, registry, macros=None):
    if macros:
        registry.macros.update({name: parse(body) for name, body in macros.items()})
    return validate(parse(source), registry)


def codes(diagnostics):
    return [d.code for d in diagnostics]


def errors(diagnostics):
    return [d for d in diagnostics if d.severity == "error"]


def test_clean_program(greeting_registry):
    source = "<env.humanHere()>(bioloid.sayHello(););"
    assert check(source, greeting_registry) == []


def test_unknown_entity(greeting_registry):
    diags = check("ghost.sayHello();", greeting_registry)
    assert codes(diags) == ["unknown-entity"]
    assert diags[0].severity == "error"
    assert diags[0].span is not None


def test_unknown_function(greeting_registry):
    assert codes(check("bioloid.dance();", greeting_registry)) == ["unknown-function"]


def test_unknown_sensor_in_cond(greeting_registry):
    diags = check("[wind.up()](bioloid.sayHello(););", greeting_registry)
    assert codes(diags) == ["unknown-sensor"]


def test_unknown_event(greeting_registry):
    diags = check("[env.doorOpen()](bioloid.sayHello(););", greeting_registry)
    assert codes(diags) == ["unknown-event"]


def test_sensor_in_action_position(greeting_registry):
    diags = check("env.humanHere();", greeting_registry)
    assert "kind-mismatch" in codes(diags)


def test_entity_in_cond_position(greeting_registry):
    diags = check("[bioloid.sayHello()](greta.sayHello(););", greeting_registry)
    assert "kind-mismatch" in codes(diags)


def test_arity_mismatch(lab_registry):
    assert codes(check("a.f(1);", lab_registry)) == ["arity-mismatch"]
    assert codes(check("a.move();", lab_registry)) == ["arity-mismatch"]


def test_call_argument_must_read_integer_event(lab_registry):
    # env.label is text-valued; a raw read cannot feed a one-int function
    diags = check("a.move(env.label());", lab_registry)
    assert "kind-mismatch" in codes(diags)
    assert check("a.move(meter.level());", lab_registry) == []


def test_symbolic_atoms_always_pass(lab_registry):
    assert check("<symbolic.anything()>(a.f(););", lab_registry) == []


def test_symbolic_prefix_only_in_conds(lab_registry):
    diags = check("symbolic.go();", lab_registry)
    assert errors(diags)


def test_interrupt_action_checked(lab_registry):
    assert codes(check("°a.nope()°;", lab_registry)) == ["unknown-function"]


def test_cond_arguments_are_walked(lab_registry):
    diags = check("a.move(ghost.x() & meter.level(3));", lab_registry)
    assert "unknown-sensor" in codes(diags)


# --- warnings ---------------------------------------------------------------


def test_break_inside_repeat_is_fine(lab_registry):
    assert check("3*(a.f(); BREAK;);", lab_registry) == []


def test_break_inside_while_is_fine(lab_registry):
    assert check("*[symbolic.go()](BREAK;);", lab_registry) == []


def test_break_outside_loop_warns(lab_registry):
    diags = check("BREAK;", lab_registry)
    assert codes(diags) == ["break-outside-loop"]
    assert diags[0].severity == "warning"


def test_break_in_conditional_inherits_loop(lab_registry):
    source = "3*([symbolic.go()](BREAK;););"
    assert check(source, lab_registry) == []


def test_break_in_parallel_branch_does_not_inherit(lab_registry):
    source = "3*(/(BREAK;, a.f();););"
    assert codes(check(source, lab_registry)) == ["break-outside-loop"]


def test_repeat_zero_warns(lab_registry):
    diags = check("0*(a.f(););", lab_registry)
    assert codes(diags) == ["repeat-zero"]
    assert diags[0].severity == "warning"


def test_unreachable_after_break(lab_registry):
    diags = check("3*(BREAK; a.f(););", lab_registry)
    assert codes(diags) == ["unreachable-code"]


def test_warnings_and_errors_mix(lab_registry):
    diags = check("3*(BREAK; ghost.f(););", lab_registry)
    assert set(codes(diags)) == {"unreachable-code", "unknown-entity"}


# --- macros -------------------------------------------------------------------


def test_unknown_macro(lab_registry):
    assert codes(check("@nope;", lab_registry)) == ["unknown-macro"]


def test_known_macro_is_clean(lab_registry):
    assert check("@twice;", lab_registry, macros={"twice": "a.f(); a.f();"}) == []


def test_macro_cycle_detected(lab_registry):
    diags = check("@ping;", lab_registry, macros={"ping": "@pong;", "pong": "@ping;"})
    assert "macro-cycle" in codes(diags)
    message = next(d for d in diags if d.code == "macro-cycle").message
    assert "->" in message


def test_macro_self_cycle(lab_registry):
    diags = check("@loop;", lab_registry, macros={"loop": "@loop;"})
    assert "macro-cycle" in codes(diags)


def test_registry_rejects_symbolic_name():
    from scenl import RegistryError, SensorDescriptor

    registry = Registry()
    with pytest.raises(RegistryError):
        registry.add_sensor(SensorDescriptor("symbolic", {"x": "none"}))


def test_diagnostics_order_follows_source(lab_registry):
    diags = check("ghost.f(); a.nope();", lab_registry)
    assert codes(diags) == ["unknown-entity", "unknown-function"]
    assert diags[0].span[0] < diags[1].span[0]
