"""Toolkit for scripted multi-device scenarios.

The ``lang`` subpackage owns the scenario language itself (parser,
canonical formatter, static validator, macros). This package layers the
event model, the deterministic interpreter, the simulation harness, the
HTTP control service, and the command line on top of it.
"""

from .events import (
    ChannelState,
    DescriptorError,
    EntityDescriptor,
    EnvState,
    Event,
    FunctionSig,
    Registry,
    RegistryError,
    RuleTypeError,
    SensorDescriptor,
    StaleEventError,
    SymbolicRule,
    apply_rules,
    check_rules,
    event_from_strings,
    load_descriptor,
    parse_descriptor,
    parse_rules,
    registry_from_paths,
)
from .interpreter import (
    DEFAULT_STEP_BUDGET,
    DEFAULT_THRESHOLD,
    TICK,
    LoadError,
    Machine,
    ScenarioRuntimeError,
    StepBudgetExceeded,
    UnknownChannelError,
    evaluate_cond,
    load,
    run_to_quiescence,
)
from .lang import (
    Diagnostic,
    MacroCycleError,
    MacroLibraryError,
    ParseError,
    Program,
    UnknownMacroError,
    expand_macros,
    format_macro_library,
    format_program,
    parse,
    parse_macro_library,
    validate,
)
from .simulation import (
    MockEntity,
    RunReport,
    ScriptEntry,
    ScriptError,
    SensorScript,
    diff_traces,
    parse_script,
    render_report,
    run_simulation,
    script_from_trace,
)
from .trace import (
    CancelRecord,
    DeliveryFailRecord,
    InRecord,
    OutRecord,
    TraceRecord,
    parse_trace,
    parse_trace_line,
    record_from_json,
    record_to_json,
    render_trace,
)

__version__ = "0.1.0"

__all__ = [
    "CancelRecord",
    "ChannelState",
    "DEFAULT_STEP_BUDGET",
    "DEFAULT_THRESHOLD",
    "DeliveryFailRecord",
    "DescriptorError",
    "Diagnostic",
    "EntityDescriptor",
    "EnvState",
    "Event",
    "FunctionSig",
    "InRecord",
    "LoadError",
    "Machine",
    "MacroCycleError",
    "MacroLibraryError",
    "MockEntity",
    "OutRecord",
    "ParseError",
    "Program",
    "Registry",
    "RegistryError",
    "RuleTypeError",
    "RunReport",
    "ScenarioRuntimeError",
    "ScriptEntry",
    "ScriptError",
    "SensorDescriptor",
    "SensorScript",
    "StaleEventError",
    "StepBudgetExceeded",
    "SymbolicRule",
    "TICK",
    "TraceRecord",
    "UnknownChannelError",
    "UnknownMacroError",
    "apply_rules",
    "check_rules",
    "diff_traces",
    "evaluate_cond",
    "event_from_strings",
    "expand_macros",
    "format_macro_library",
    "format_program",
    "load",
    "load_descriptor",
    "parse",
    "parse_descriptor",
    "parse_macro_library",
    "parse_rules",
    "parse_script",
    "parse_trace",
    "parse_trace_line",
    "record_from_json",
    "record_to_json",
    "registry_from_paths",
    "render_report",
    "render_trace",
    "run_simulation",
    "run_to_quiescence",
    "script_from_trace",
    "validate",
]
