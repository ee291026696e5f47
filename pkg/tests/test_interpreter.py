import pytest

from scenl import (
    CancelRecord,
    Event,
    InRecord,
    LoadError,
    Machine,
    OutRecord,
    ScenarioRuntimeError,
    StepBudgetExceeded,
    TICK,
    UnknownChannelError,
    evaluate_cond,
    load,
    parse,
    run_to_quiescence,
)
from scenl.events import EnvState, with_seq


def outs(records):
    return [(r.entity, r.function, r.branch) for r in records if isinstance(r, OutRecord)]


def machine_for(source, registry, **kw):
    return load(parse(source), registry, **kw)


# --- sequencing ---------------------------------------------------------------


def test_sequential_actions_in_order(lab_registry):
    machine = machine_for("a.f(); a.g(); b.f();", lab_registry)
    records = machine.step(None)
    assert outs(records) == [("a", "f", 0), ("a", "g", 0), ("b", "f", 0)]
    assert machine.status == "finished"


def test_parallel_round_robin(lab_registry):
    machine = machine_for("/(a.f(); a.g();, b.f(); b.g(););", lab_registry)
    records = machine.step(None)
    # one instruction per branch per sweep, branch ids ascending
    assert outs(records) == [
        ("a", "f", 1),
        ("b", "f", 2),
        ("a", "g", 1),
        ("b", "g", 2),
    ]


def test_parallel_branch_ids_follow_syntax_order(greeting_registry):
    source = "/(bioloid.sayHello();, greta.sayHello();, nabaztag.sayHello(););"
    machine = machine_for(source, greeting_registry)
    assert outs(machine.step(None)) == [
        ("bioloid", "sayHello", 1),
        ("greta", "sayHello", 2),
        ("nabaztag", "sayHello", 3),
    ]


def test_nested_parallel(lab_registry):
    machine = machine_for("/(a.f();, /(b.f();, b.g(););); a.g();", lab_registry)
    got = outs(machine.step(None))
    assert got[0] == ("a", "f", 1)
    assert set(got[1:3]) == {("b", "f", 3), ("b", "g", 4)}
    assert got[3] == ("a", "g", 0)  # join completes before the tail runs


# --- loops and break --------------------------------------------------------------


@pytest.mark.parametrize("count", [0, 1, 2, 7])
def test_repeat_runs_exactly_count_times(lab_registry, count):
    machine = machine_for(f"{count}*(a.f(););", lab_registry)
    assert len(outs(machine.step(None))) == count


def test_break_truncates_repeat(lab_registry):
    machine = machine_for("3*(a.f(); BREAK; a.g(););", lab_registry)
    assert outs(machine.step(None)) == [("a", "f", 0)]


def test_break_pops_innermost_loop_only(lab_registry):
    machine = machine_for("2*(2*(BREAK; a.f();); b.g(););", lab_registry)
    assert outs(machine.step(None)) == [("b", "g", 0), ("b", "g", 0)]


def test_break_without_loop_finishes_branch(lab_registry):
    machine = machine_for("/(BREAK; a.f();, b.g(););", lab_registry)
    assert outs(machine.step(None)) == [("b", "g", 2)]
    assert machine.status == "finished"


def test_break_escapes_conditional_into_loop(lab_registry):
    source = "3*(a.f(); [symbolic.go()](BREAK;););"
    machine = machine_for(source, lab_registry)
    machine.step(None)
    assert machine.status == "finished"
    # cond is false so the loop ran out its count
    assert len(outs(machine.drain())) == 0


def test_while_false_from_the_start(lab_registry):
    machine = machine_for("*[symbolic.go()](a.f(););", lab_registry)
    assert outs(machine.step(None)) == []
    assert machine.status == "finished"


def test_while_reevaluates_at_each_pass(lab_registry):
    machine = machine_for("*[!(symbolic.stop())](a.f(); WAIT(1););", lab_registry)
    machine.step(None)  # one pass, then blocked on the timer
    machine.step(TICK)  # second pass
    machine.step(Event("symbolic", "stop", 1, 100))
    records = machine.step(TICK)
    assert outs(records) == []
    assert machine.status == "finished"


# --- conditionals and event waits ----------------------------------------------


def test_conditional_takes_else_when_false(lab_registry):
    machine = machine_for("[symbolic.go()](a.f();)!(b.g(););", lab_registry)
    assert outs(machine.step(None)) == [("b", "g", 0)]


def test_conditional_takes_then_when_true(lab_registry):
    machine = machine_for("[symbolic.go()](a.f();)!(b.g(););", lab_registry)
    records = machine.step(Event("symbolic", "go", 1, 100))
    assert outs(records) == [("a", "f", 0)]


def test_eventwait_blocks_then_fires(greeting_registry):
    machine = machine_for(
        "<env.humanHere()>(bioloid.sayHello(););", greeting_registry
    )
    assert outs(machine.step(None)) == []
    assert machine.status == "quiescent"
    records = machine.step(Event("env", "humanHere", 1, 100))
    assert isinstance(records[0], InRecord)
    assert outs(records) == [("bioloid", "sayHello", 0)]


def test_eventwait_ignores_preexisting_state(lab_registry):
    # waits trigger on deliveries, not on state already in the store
    machine = machine_for("<symbolic.cold()>(a.f(););", lab_registry)
    first = machine.step(Event("symbolic", "cold", 1, 100))
    assert outs(first) == []  # the wait was not yet blocking at delivery time
    assert machine.status == "quiescent"
    second = machine.step(Event("symbolic", "cold", 1, 100))
    assert outs(second) == [("a", "f", 0)]


def test_all_waiting_branches_wake_in_id_order(lab_registry):
    source = "/(<symbolic.go()>(a.f(););, <symbolic.go()>(b.f();););"
    machine = machine_for(source, lab_registry)
    machine.step(None)
    records = machine.step(Event("symbolic", "go", 1, 100))
    assert outs(records) == [("a", "f", 1), ("b", "f", 2)]


# --- timers --------------------------------------------------------------------


def test_wait_blocks_for_exactly_n_ticks(lab_registry):
    machine = machine_for("WAIT(5); a.f();", lab_registry)
    assert outs(machine.step(None)) == []
    for _ in range(4):
        assert outs(machine.step(TICK)) == []
    records = machine.step(TICK)
    assert [(r.entity, r.tick) for r in records if isinstance(r, OutRecord)] == [
        ("a", 5)
    ]
    assert machine.clock == 5


def test_wait_zero_does_not_block(lab_registry):
    machine = machine_for("WAIT(0); a.f();", lab_registry)
    records = machine.step(None)
    assert outs(records) == [("a", "f", 0)]


def test_tick_advances_clock(lab_registry):
    machine = machine_for("<symbolic.never()>(a.f(););", lab_registry)
    machine.step(None)
    machine.step(TICK)
    machine.step(TICK)
    assert machine.clock == 2


# --- interruptible actions ---------------------------------------------------------


def test_interrupt_cancelled_when_branch_finishes(lab_registry):
    machine = machine_for("°a.f()°; b.g();", lab_registry)
    records = machine.step(None)
    kinds = [type(r).__name__ for r in records]
    assert kinds == ["OutRecord", "OutRecord", "CancelRecord"]
    cancel = records[-1]
    assert (cancel.entity, cancel.function) == ("a", "f")


def test_interrupt_cancelled_on_abort(lab_registry):
    machine = machine_for("°a.f()°; <symbolic.never()>(b.g(););", lab_registry)
    machine.step(None)
    records = machine.abort()
    assert [type(r).__name__ for r in records] == ["CancelRecord"]
    assert machine.status == "finished"


def test_plain_actions_are_not_cancelled(lab_registry):
    machine = machine_for("a.f();", lab_registry)
    records = machine.step(None)
    assert not any(isinstance(r, CancelRecord) for r in records)


# --- argument resolution -------------------------------------------------------


def test_number_argument(lab_registry):
    machine = machine_for("a.move(40);", lab_registry)
    (record,) = machine.step(None)
    assert record.arg == 40


def test_call_argument_reads_latest_value(lab_registry):
    machine = machine_for("<meter.level()>(a.move(meter.level()););", lab_registry)
    machine.step(None)
    records = machine.step(Event("meter", "level", 7, 100))
    out = [r for r in records if isinstance(r, OutRecord)]
    assert out[0].arg == 7


def test_call_argument_missing_value_raises(lab_registry):
    machine = machine_for("a.move(meter.level());", lab_registry)
    with pytest.raises(ScenarioRuntimeError) as err:
        machine.step(None)
    assert "meter.level" in str(err.value)


def test_cond_argument_resolves_to_bit(lab_registry):
    machine = machine_for(
        "a.move(symbolic.hot() & symbolic.cold()); a.move(!(symbolic.hot()));",
        lab_registry,
    )
    records = machine.step(None)
    assert [r.arg for r in records if isinstance(r, OutRecord)] == [0, 1]


# --- condition evaluation ---------------------------------------------------------


def _cond(source):
    return parse(f"[{source}](a.f(););").instructions[0].cond


def test_likelihood_below_threshold_is_false(lab_registry):
    machine = machine_for("<env.humanHere()>(a.f(););", lab_registry)
    machine.step(None)
    assert outs(machine.step(Event("env", "humanHere", 1, 49))) == []
    assert outs(machine.step(Event("env", "humanHere", 1, 50))) == [("a", "f", 0)]


def test_custom_threshold(lab_registry):
    machine = machine_for("<env.humanHere()>(a.f(););", lab_registry, threshold=80)
    machine.step(None)
    assert outs(machine.step(Event("env", "humanHere", 1, 79))) == []
    assert outs(machine.step(Event("env", "humanHere", 1, 80))) == [("a", "f", 0)]


def test_value_match_argument(lab_registry):
    machine = machine_for("<env.humanHere(2)>(a.f(););", lab_registry)
    machine.step(None)
    assert outs(machine.step(Event("env", "humanHere", 1, 100))) == []
    assert outs(machine.step(Event("env", "humanHere", 2, 100))) == [("a", "f", 0)]


def test_value_match_with_missing_read_is_false(lab_registry):
    env = EnvState()
    env.ingest(with_seq(Event("env", "humanHere", 1, 100), 1))
    cond = _cond("env.humanHere(meter.level())")
    assert evaluate_cond(cond, env, lab_registry) is False


def test_unknown_channel_in_cond_raises_even_when_decided(lab_registry):
    env = EnvState()
    env.ingest(with_seq(Event("symbolic", "yes", 1, 100), 1))
    with pytest.raises(UnknownChannelError):
        evaluate_cond(_cond("symbolic.yes() | wind.gust()"), env, lab_registry)
    with pytest.raises(UnknownChannelError):
        evaluate_cond(_cond("wind.gust() & symbolic.yes()"), env, lab_registry)


def test_missing_symbolic_is_false_not_an_error(lab_registry):
    assert evaluate_cond(_cond("symbolic.ghost()"), EnvState(), lab_registry) is False
    assert evaluate_cond(_cond("!(symbolic.ghost())"), EnvState(), lab_registry) is True


def test_group_and_precedence_evaluation(lab_registry):
    env = EnvState()
    env.ingest(with_seq(Event("symbolic", "a", 1, 100), 1))
    # a & missing | a  ->  (a & missing) | a  -> True
    assert evaluate_cond(
        _cond("symbolic.a() & symbolic.b() | symbolic.a()"), env, lab_registry
    )
    # a & (missing | missing) -> False
    assert not evaluate_cond(
        _cond("symbolic.a() & (symbolic.b() | symbolic.c())"), env, lab_registry
    )


# --- delivery rules -----------------------------------------------------------------


def test_unknown_channel_delivery_raises(lab_registry):
    machine = machine_for("a.f();", lab_registry)
    with pytest.raises(UnknownChannelError):
        machine.step(Event("wind", "gust", 1, 100))


def test_symbolic_delivery_is_allowed(lab_registry):
    machine = machine_for("<symbolic.kick()>(a.f(););", lab_registry)
    machine.step(None)
    records = machine.step(Event("symbolic", "kick", 1, 100))
    assert outs(records) == [("a", "f", 0)]


def test_derived_events_wake_waiters_in_same_step(thermo_registry, comfort_rules):
    machine = load(
        parse("<symbolic.cold()>(h.on(););"), thermo_registry, comfort_rules
    )
    machine.step(None)
    records = machine.step(Event("thermometer", "temperature", 3, 100))
    assert outs(records) == [("h", "on", 0)]
    # only the raw event is logged
    assert [type(r).__name__ for r in records] == ["InRecord", "OutRecord"]


def test_seq_stamped_monotonically(lab_registry):
    machine = machine_for("<symbolic.never()>(a.f(););", lab_registry)
    machine.step(None)
    machine.step(Event("meter", "level", 1, 100))
    machine.step(Event("meter", "level", 2, 100))
    assert machine.env.lookup("meter", "level").seq == 2
    assert machine.env.lookup("meter", "level").value == 2


# --- lifecycle ------------------------------------------------------------------------


def test_load_rejects_unexpanded_macros(lab_registry):
    with pytest.raises(LoadError):
        load(parse("@m;"), lab_registry)


def test_load_rejects_validation_errors(lab_registry):
    with pytest.raises(LoadError) as err:
        load(parse("ghost.f();"), lab_registry)
    assert err.value.diagnostics


def test_load_tolerates_warnings(lab_registry):
    machine = load(parse("0*(a.f(););"), lab_registry)
    machine.step(None)
    assert machine.status == "finished"


def test_macro_at_runtime_raises(lab_registry):
    machine = Machine(parse("@m;"), lab_registry)
    with pytest.raises(ScenarioRuntimeError):
        machine.step(None)


def test_finished_machine_ignores_input(lab_registry):
    machine = machine_for("a.f();", lab_registry)
    machine.step(None)
    assert machine.status == "finished"
    assert machine.step(Event("meter", "level", 1, 100)) == []
    assert machine.step(TICK) == []
    assert machine.clock == 0


def test_step_rejects_junk_input(lab_registry):
    machine = machine_for("a.f();", lab_registry)
    with pytest.raises(TypeError):
        machine.step("tick")


def test_step_budget_trips_on_hot_loop(lab_registry):
    machine = machine_for("*[!(symbolic.stop())](a.f(););", lab_registry)
    with pytest.raises(StepBudgetExceeded):
        machine.step(None, budget=50)
    partial = machine.drain()
    assert partial  # what ran before the trip is preserved
    assert machine.status == "running"


def test_run_to_quiescence(lab_registry):
    machine, records = run_to_quiescence(machine_for("a.f(); a.g();", lab_registry))
    assert len(outs(records)) == 2
    assert machine.status == "finished"


def test_snapshot_shape(lab_registry):
    machine = machine_for("/(WAIT(3);, <symbolic.x()>(a.f(););); b.f();", lab_registry)
    machine.step(None)
    snap = machine.snapshot()
    assert snap["status"] == "quiescent"
    assert snap["clock"] == 0
    waits = {b["id"]: b["wait"] for b in snap["branches"]}
    assert waits[1] == "tick:3"
    assert waits[2] == "cond"
    assert waits[0] == "join:1,2"
