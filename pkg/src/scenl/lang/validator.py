"""Static checks for parsed ScenL programs against a registry.

Errors (the program cannot run):
    unknown-entity     action target is not a declared entity
    unknown-function   entity has no such function
    unknown-sensor     condition/read target is not a declared sensor
    unknown-event      sensor has no such event
    kind-mismatch      wrong call kind for the position (non-procedure
                       as an action, entity call inside a condition or
                       argument, value match against the wrong type)
    arity-mismatch     argument count differs from the declaration
    unknown-macro      @name not present in the registry
    macro-cycle        macro expansion would never terminate

Warnings (suspicious but runnable):
    break-outside-loop BREAK with no enclosing repeat/while in its branch
    repeat-zero        repeat count of 0 (body never runs)
    unreachable-code   instructions after BREAK in the same list

"symbolic" is a reserved pseudo-sensor: conditions may reference any
event under it, since rule tables are not known at validation time.

BREAK scoping follows the runtime: repeat/while bodies add a loop
level, conditional and event-wait bodies inherit it, and parallel
branches start fresh (each branch is its own execution context).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

from . import ast

if TYPE_CHECKING:  # pragma: no cover
    from scenl.events import Registry

SYMBOLIC_SENSOR = "symbolic"


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    span: Optional[ast.Span] = None


def validate(program: ast.Program, registry: "Registry") -> list[Diagnostic]:
    checker = _Checker(registry)
    checker.instr_list(program.instructions, loop_depth=0)
    return checker.diagnostics


def expanded_is_clean(diagnostics: list[Diagnostic]) -> bool:
    """True when no error-severity diagnostic is present."""
    return not any(d.severity == "error" for d in diagnostics)


class _Checker:
    def __init__(self, registry: "Registry"):
        self.registry = registry
        self.diagnostics: list[Diagnostic] = []

    def error(self, code: str, message: str, span: Optional[ast.Span]) -> None:
        self.diagnostics.append(Diagnostic("error", code, message, span))

    def warn(self, code: str, message: str, span: Optional[ast.Span]) -> None:
        self.diagnostics.append(Diagnostic("warning", code, message, span))

    # --- instruction walk ----------------------------------------------

    def instr_list(self, instrs: tuple[ast.Instr, ...], loop_depth: int) -> None:
        for i, instr in enumerate(instrs):
            self.instr(instr, loop_depth)
            if isinstance(instr, ast.Break) and i + 1 < len(instrs):
                self.warn(
                    "unreachable-code",
                    "instructions after BREAK never execute",
                    instrs[i + 1].span,
                )
        # warn once per list; deeper walks handle their own lists

    def instr(self, instr: ast.Instr, loop_depth: int) -> None:
        if isinstance(instr, (ast.Action, ast.ActionInterrupt)):
            self.action_call(instr.call)
        elif isinstance(instr, ast.Repeat):
            if instr.count == 0:
                self.warn("repeat-zero", "repeat count is 0; body never runs", instr.span)
            self.instr_list(instr.body, loop_depth + 1)
        elif isinstance(instr, ast.While):
            self.cond(instr.cond)
            self.instr_list(instr.body, loop_depth + 1)
        elif isinstance(instr, ast.Conditional):
            self.cond(instr.cond)
            self.instr_list(instr.then_body, loop_depth)
            if instr.else_body is not None:
                self.instr_list(instr.else_body, loop_depth)
        elif isinstance(instr, ast.EventWait):
            self.cond(instr.cond)
            self.instr_list(instr.body, loop_depth)
        elif isinstance(instr, ast.Parallel):
            for branch in instr.branches:
                self.instr_list(branch, loop_depth=0)
        elif isinstance(instr, ast.Timer):
            pass
        elif isinstance(instr, ast.Break):
            if loop_depth == 0:
                self.warn(
                    "break-outside-loop",
                    "BREAK has no enclosing repeat or while in this branch",
                    instr.span,
                )
        elif isinstance(instr, ast.MacroCall):
            self.macro_call(instr)
        else:  # pragma: no cover - the AST union is closed
            raise TypeError(f"not an instruction node: {instr!r}")

    # --- calls ----------------------------------------------------------

    def action_call(self, call: ast.Call) -> None:
        entity = self.registry.entities.get(call.target)
        if entity is None:
            if (
                call.target in self.registry.sensors
                or call.target == SYMBOLIC_SENSOR
            ):
                self.error(
                    "kind-mismatch",
                    f"{call.target!r} is a sensor; sensors cannot be commanded",
                    call.span,
                )
            else:
                self.error(
                    "unknown-entity", f"no entity named {call.target!r}", call.span
                )
            self.args_only(call)
            return
        sig = entity.functions.get(call.function)
        if sig is None:
            self.error(
                "unknown-function",
                f"entity {call.target!r} has no function {call.function!r}",
                call.span,
            )
            self.args_only(call)
            return
        if sig.kind != "procedure":
            self.error(
                "kind-mismatch",
                f"{call.target}.{call.function} is {sig.kind}-valued, not a procedure",
                call.span,
            )
        if len(call.args) != sig.arity:
            self.error(
                "arity-mismatch",
                f"{call.target}.{call.function} takes {sig.arity} argument(s), got {len(call.args)}",
                call.span,
            )
        self.args_only(call)

    def args_only(self, call: ast.Call) -> None:
        for arg in call.args:
            self.variable(arg)

    def variable(self, var: ast.Variable) -> None:
        if isinstance(var, ast.NumberArg):
            return
        if isinstance(var, ast.CondArg):
            self.cond(var.cond)
            return
        # CallArg: either an integer read on a sensor channel or a boolean test
        call = var.call
        if call.target == SYMBOLIC_SENSOR:
            self.args_only(call)
            return
        if call.target in self.registry.entities:
            self.error(
                "kind-mismatch",
                f"{call.target!r} is an entity; entity calls cannot be read as values",
                call.span,
            )
            self.args_only(call)
            return
        sensor = self.registry.sensors.get(call.target)
        if sensor is None:
            self.error(
                "unknown-sensor", f"no sensor named {call.target!r}", call.span
            )
            self.args_only(call)
            return
        value_type = sensor.events.get(call.function)
        if value_type is None:
            self.error(
                "unknown-event",
                f"sensor {call.target!r} declares no event {call.function!r}",
                call.span,
            )
        elif value_type != "integer":
            self.error(
                "kind-mismatch",
                f"{call.target}.{call.function} is {value_type}-valued; only integer events can be read",
                call.span,
            )
        self.args_only(call)

    # --- conditions -----------------------------------------------------

    def cond(self, cond: ast.Cond) -> None:
        if isinstance(cond, ast.Atom):
            self.atom(cond.call)
        elif isinstance(cond, (ast.Not, ast.Group)):
            self.cond(cond.inner)
        elif isinstance(cond, (ast.And, ast.Or)):
            self.cond(cond.left)
            self.cond(cond.right)
        else:  # pragma: no cover
            raise TypeError(f"not a condition node: {cond!r}")

    def atom(self, call: ast.Call) -> None:
        if len(call.args) > 1:
            self.error(
                "arity-mismatch",
                f"{call.target}.{call.function} takes at most one value to match",
                call.span,
            )
        if call.target == SYMBOLIC_SENSOR:
            self.args_only(call)
            return
        if call.target in self.registry.entities:
            self.error(
                "kind-mismatch",
                f"{call.target!r} is an entity; conditions can only watch sensors",
                call.span,
            )
            self.args_only(call)
            return
        sensor = self.registry.sensors.get(call.target)
        if sensor is None:
            self.error(
                "unknown-sensor", f"no sensor named {call.target!r}", call.span
            )
            self.args_only(call)
            return
        value_type = sensor.events.get(call.function)
        if value_type is None:
            self.error(
                "unknown-event",
                f"sensor {call.target!r} declares no event {call.function!r}",
                call.span,
            )
            self.args_only(call)
            return
        if call.args and value_type == "none":
            self.error(
                "kind-mismatch",
                f"{call.target}.{call.function} carries no value to match against",
                call.span,
            )
        elif (
            call.args
            and value_type == "text"
            and isinstance(call.args[0], ast.NumberArg)
        ):
            self.error(
                "kind-mismatch",
                f"{call.target}.{call.function} is text-valued; cannot match an integer",
                call.span,
            )
        self.args_only(call)

    # --- macros -----------------------------------------------------------

    def macro_call(self, instr: ast.MacroCall) -> None:
        macros = self.registry.macros
        if instr.name not in macros:
            self.error("unknown-macro", f"no macro named {instr.name!r}", instr.span)
            return
        cycle = _find_cycle(instr.name, macros)
        if cycle is not None:
            self.error(
                "macro-cycle",
                "macro expansion cycles: " + " -> ".join(cycle),
                instr.span,
            )


def _macro_refs(program: ast.Program) -> list[str]:
    names: list[str] = []

    def walk(instrs: tuple[ast.Instr, ...]) -> None:
        for instr in instrs:
            if isinstance(instr, ast.MacroCall):
                names.append(instr.name)
            elif isinstance(instr, (ast.Repeat, ast.While, ast.EventWait)):
                walk(instr.body)
            elif isinstance(instr, ast.Conditional):
                walk(instr.then_body)
                if instr.else_body is not None:
                    walk(instr.else_body)
            elif isinstance(instr, ast.Parallel):
                for branch in instr.branches:
                    walk(branch)

    walk(program.instructions)
    return names


def _find_cycle(start: str, macros: dict) -> Optional[list[str]]:
    """DFS over the macro reference graph; returns the cycle path if any."""
    path: list[str] = []
    on_path: set[str] = set()
    done: set[str] = set()

    def visit(name: str) -> Optional[list[str]]:
        if name in on_path:
            return path[path.index(name):] + [name]
        if name in done or name not in macros:
            return None
        on_path.add(name)
        path.append(name)
        for ref in _macro_refs(macros[name]):
            found = visit(ref)
            if found is not None:
                return found
        path.pop()
        on_path.discard(name)
        done.add(name)
        return None

    return visit(start)
