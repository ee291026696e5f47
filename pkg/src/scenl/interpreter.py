"""Deterministic cooperative interpreter for ScenL programs.

A Machine runs one program as a set of branches scheduled round-robin
in branch-id order, one instruction per scheduling point. It consumes
three inputs:

    machine.step(event)  deliver one sensor event: assign its sequence
                         number, ingest it, derive symbolic events from
                         the rule table, re-evaluate branches blocked on
                         an event condition, then run the scheduler.
    machine.step(TICK)   advance the virtual clock by one and resume
                         branches whose timer is due, then run.
    machine.step(None)   just run (used to settle a freshly loaded
                         program to its first blocking point).

Each step runs the scheduler until no branch is runnable, bounded by a
scheduling-point budget (StepBudgetExceeded beyond it), and returns the
trace records produced: IN for the delivered event, OUT per emitted
action, CANCEL per interruptible action cancelled by its branch ending.

Semantics in brief: repeat counts down a frame; while re-checks its
condition before every iteration; conditional picks a body once; an
event wait blocks and is re-checked only when some event is delivered
(state-level check at delivery instants, so a condition already true in
stale state does not fire without a fresh delivery); parallel forks one
child branch per list and the parent joins all of them; WAIT(n) blocks
until the clock has advanced n ticks; BREAK unwinds to the nearest
repeat/while frame of its own branch or ends the branch. Children are
numbered in syntactic order, so round-robin order is spawn order.

Identical input sequences always produce identical traces: scheduling
is by branch id, there is no wall clock, and nothing iterates an
unordered container.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .events import (
    EnvState,
    Event,
    Registry,
    Scalar,
    SYMBOLIC_SENSOR,
    SymbolicRule,
    apply_rules,
    with_seq,
)
from .lang import ast
from .lang.validator import Diagnostic, validate
from .trace import CancelRecord, InRecord, OutRecord, TraceRecord

DEFAULT_THRESHOLD = 50
DEFAULT_STEP_BUDGET = 100_000


class _Tick:
    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return "TICK"


TICK = _Tick()

StepInput = Union[Event, _Tick, None]


class LoadError(ValueError):
    def __init__(self, message: str, diagnostics: Optional[list[Diagnostic]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class UnknownChannelError(LookupError):
    def __init__(self, sensor: str, event: str):
        super().__init__(f"no declared channel {sensor}.{event}")
        self.channel = (sensor, event)


class ScenarioRuntimeError(RuntimeError):
    def __init__(self, branch: int, span: Optional[ast.Span], reason: str):
        super().__init__(f"branch {branch}: {reason}")
        self.branch = branch
        self.span = span
        self.reason = reason


class StepBudgetExceeded(RuntimeError):
    def __init__(self, budget: int):
        super().__init__(f"exceeded {budget} scheduling points in one step")
        self.budget = budget


@dataclass(frozen=True)
class ActionCommand:
    entity: str
    function: str
    arg: Scalar
    issued_at: int
    branch: int
    interruptible: bool

    def record(self) -> OutRecord:
        return OutRecord(self.issued_at, self.entity, self.function, self.arg, self.branch)


@dataclass
class InterruptHandle:
    command: ActionCommand
    state: str = "active"  # active | cancelled | completed


@dataclass
class CondWait:
    cond: ast.Cond
    body: tuple[ast.Instr, ...]


@dataclass
class TickWait:
    due: int


@dataclass
class JoinWait:
    pending: set[int]


Wait = Union[CondWait, TickWait, JoinWait, None]


@dataclass
class Frame:
    instrs: tuple[ast.Instr, ...]
    index: int = 0
    kind: str = "block"  # block | repeat | while
    remaining: int = 0
    cond: Optional[ast.Cond] = None


@dataclass
class Branch:
    id: int
    frames: list[Frame]
    wait: Wait = None
    interrupts: list[InterruptHandle] = field(default_factory=list)
    parent: Optional[int] = None


def evaluate_cond(
    cond: ast.Cond,
    env: EnvState,
    registry: Registry,
    threshold: int = DEFAULT_THRESHOLD,
) -> bool:
    """Evaluate a condition against the current environment.

    An atom holds when its channel has a recorded value at or above the
    likelihood threshold (and matching the given value, if any). Both
    sides of & and | are always evaluated, so an undeclared channel
    raises UnknownChannelError regardless of position. Atoms under the
    ``symbolic`` pseudo-sensor are exempt from the declaration check.
    """
    if isinstance(cond, ast.Atom):
        return _atom_holds(cond.call, env, registry, threshold)
    if isinstance(cond, ast.Not):
        return not evaluate_cond(cond.inner, env, registry, threshold)
    if isinstance(cond, ast.Group):
        return evaluate_cond(cond.inner, env, registry, threshold)
    if isinstance(cond, ast.And):
        left = evaluate_cond(cond.left, env, registry, threshold)
        right = evaluate_cond(cond.right, env, registry, threshold)
        return left and right
    if isinstance(cond, ast.Or):
        left = evaluate_cond(cond.left, env, registry, threshold)
        right = evaluate_cond(cond.right, env, registry, threshold)
        return left or right
    raise TypeError(f"not a condition node: {cond!r}")


_NO_VALUE = object()


def _atom_holds(call: ast.Call, env: EnvState, registry: Registry, threshold: int) -> bool:
    if call.target != SYMBOLIC_SENSOR and not registry.has_channel(
        call.target, call.function
    ):
        raise UnknownChannelError(call.target, call.function)
    entry = env.lookup(call.target, call.function)
    if entry is None or entry.likelihood < threshold:
        return False
    if call.args:
        expected = _match_value(call.args[0], env, registry, threshold)
        if expected is _NO_VALUE:
            return False
        return entry.value == expected
    return True


def _match_value(var: ast.Variable, env: EnvState, registry: Registry, threshold: int):
    """Resolve a variable for value matching; missing reads poison to no-match."""
    if isinstance(var, ast.NumberArg):
        return var.value
    if isinstance(var, ast.CallArg):
        entry = env.lookup(var.call.target, var.call.function)
        if entry is None:
            return _NO_VALUE
        return entry.value
    return 1 if evaluate_cond(var.cond, env, registry, threshold) else 0


class Machine:
    def __init__(
        self,
        program: ast.Program,
        registry: Registry,
        rules: tuple[SymbolicRule, ...] = (),
        threshold: int = DEFAULT_THRESHOLD,
        step_budget: int = DEFAULT_STEP_BUDGET,
    ):
        self.registry = registry
        self.rules = tuple(rules)
        self.threshold = threshold
        self.step_budget = step_budget
        self.env = EnvState()
        self.clock = 0
        self.status = "running"
        self.branches: dict[int, Branch] = {}
        self._next_branch_id = 0
        self._next_seq = 0
        self._outbox: list[TraceRecord] = []
        self._spawn(tuple(program.instructions), parent=None)

    # --- public surface -------------------------------------------------

    def step(self, input: StepInput = None, *, budget: Optional[int] = None) -> list[TraceRecord]:
        """Feed one input and run to local quiescence; returns the records."""
        if self.status == "finished":
            return []
        if isinstance(input, Event):
            self._deliver(input)
        elif input is TICK:
            self.clock += 1
        elif input is not None:
            raise TypeError(f"step input must be an Event, TICK, or None: {input!r}")
        try:
            self._run(self.step_budget if budget is None else budget)
        finally:
            self.env.pulse = None
            self._update_status()
        return self.drain()

    def abort(self) -> list[TraceRecord]:
        """Terminate every branch, cancelling outstanding interruptibles."""
        for bid in sorted(self.branches):
            self._cancel_interrupts(self.branches[bid])
        self.branches.clear()
        self.status = "finished"
        return self.drain()

    def snapshot(self) -> dict:
        branches = []
        for bid in sorted(self.branches):
            branch = self.branches[bid]
            branches.append(
                {
                    "id": branch.id,
                    "parent": branch.parent,
                    "depth": len(branch.frames),
                    "wait": _describe_wait(branch.wait),
                }
            )
        return {"clock": self.clock, "status": self.status, "branches": branches}

    # --- input handling ---------------------------------------------------

    def _deliver(self, event: Event) -> None:
        if event.sensor != SYMBOLIC_SENSOR and not self.registry.has_channel(
            event.sensor, event.name
        ):
            raise UnknownChannelError(event.sensor, event.name)
        event = self._stamp(event)
        self.env.pulse = event
        self.env.ingest(event)
        self._outbox.append(
            InRecord(self.clock, event.sensor, event.name, event.value, event.likelihood)
        )
        for derived in apply_rules(event, self.rules):
            self.env.ingest(self._stamp(derived))
        # one re-evaluation pass per delivery; branches that block later
        # in this step wait for the next delivery
        for bid in sorted(self.branches):
            branch = self.branches[bid]
            if isinstance(branch.wait, CondWait) and evaluate_cond(
                branch.wait.cond, self.env, self.registry, self.threshold
            ):
                body = branch.wait.body
                branch.wait = None
                branch.frames.append(Frame(body))

    def _stamp(self, event: Event) -> Event:
        self._next_seq += 1
        return with_seq(event, self._next_seq)

    # --- scheduler ---------------------------------------------------------

    def _runnable(self, branch: Branch) -> bool:
        if branch.wait is None:
            return True
        if isinstance(branch.wait, TickWait) and branch.wait.due <= self.clock:
            branch.wait = None
            return True
        return False

    def _run(self, budget: int) -> None:
        points = 0
        while True:
            runnable = [bid for bid in sorted(self.branches) if self._runnable(self.branches[bid])]
            if not runnable:
                return
            for bid in runnable:
                branch = self.branches.get(bid)
                if branch is None or not self._runnable(branch):
                    continue
                points += 1
                if points > budget:
                    raise StepBudgetExceeded(budget)
                self._exec_one(branch)

    def _exec_one(self, branch: Branch) -> None:
        frame = self._settle(branch)
        if frame is None:
            return
        instr = frame.instrs[frame.index]
        if isinstance(instr, ast.Action):
            frame.index += 1
            self._emit(branch, instr.call, interruptible=False)
        elif isinstance(instr, ast.ActionInterrupt):
            frame.index += 1
            self._emit(branch, instr.call, interruptible=True)
        elif isinstance(instr, ast.Repeat):
            frame.index += 1
            if instr.count > 0:
                branch.frames.append(
                    Frame(instr.body, kind="repeat", remaining=instr.count)
                )
        elif isinstance(instr, ast.While):
            frame.index += 1
            if self._truth(instr.cond):
                branch.frames.append(Frame(instr.body, kind="while", cond=instr.cond))
        elif isinstance(instr, ast.Conditional):
            frame.index += 1
            if self._truth(instr.cond):
                branch.frames.append(Frame(instr.then_body))
            elif instr.else_body is not None:
                branch.frames.append(Frame(instr.else_body))
        elif isinstance(instr, ast.EventWait):
            frame.index += 1
            branch.wait = CondWait(instr.cond, instr.body)
        elif isinstance(instr, ast.Parallel):
            frame.index += 1
            children = {
                self._spawn(body, parent=branch.id) for body in instr.branches
            }
            if children:
                branch.wait = JoinWait(children)
        elif isinstance(instr, ast.Timer):
            frame.index += 1
            branch.wait = TickWait(self.clock + instr.duration)
        elif isinstance(instr, ast.Break):
            while branch.frames:
                popped = branch.frames.pop()
                if popped.kind in ("repeat", "while"):
                    return
            self._finish(branch)
        elif isinstance(instr, ast.MacroCall):
            raise ScenarioRuntimeError(
                branch.id, instr.span, f"unexpanded macro call @{instr.name}"
            )
        else:  # pragma: no cover - the AST union is closed
            raise TypeError(f"not an instruction node: {instr!r}")

    def _settle(self, branch: Branch) -> Optional[Frame]:
        """Advance past exhausted frames; returns the frame to execute."""
        while branch.frames:
            frame = branch.frames[-1]
            if frame.index < len(frame.instrs):
                return frame
            if frame.kind == "repeat":
                frame.remaining -= 1
                if frame.remaining > 0:
                    frame.index = 0
                    return frame
                branch.frames.pop()
            elif frame.kind == "while":
                if self._truth(frame.cond):
                    frame.index = 0
                    return frame
                branch.frames.pop()
            else:
                branch.frames.pop()
        self._finish(branch)
        return None

    def _truth(self, cond: ast.Cond) -> bool:
        return evaluate_cond(cond, self.env, self.registry, self.threshold)

    # --- branch lifecycle ----------------------------------------------------

    def _spawn(self, instrs: tuple[ast.Instr, ...], parent: Optional[int]) -> int:
        bid = self._next_branch_id
        self._next_branch_id += 1
        self.branches[bid] = Branch(bid, [Frame(instrs)], parent=parent)
        return bid

    def _finish(self, branch: Branch) -> None:
        self._cancel_interrupts(branch)
        self.branches.pop(branch.id, None)
        if branch.parent is not None:
            parent = self.branches.get(branch.parent)
            if parent is not None and isinstance(parent.wait, JoinWait):
                parent.wait.pending.discard(branch.id)
                if not parent.wait.pending:
                    parent.wait = None

    def _cancel_interrupts(self, branch: Branch) -> None:
        for handle in branch.interrupts:
            if handle.state == "active":
                handle.state = "cancelled"
                self._outbox.append(
                    CancelRecord(
                        self.clock,
                        handle.command.entity,
                        handle.command.function,
                        branch.id,
                    )
                )

    # --- emission ---------------------------------------------------------------

    def _emit(self, branch: Branch, call: ast.Call, interruptible: bool) -> None:
        arg: Scalar = None
        if call.args:
            arg = self._resolve_arg(branch, call.args[0])
        command = ActionCommand(
            call.target, call.function, arg, self.clock, branch.id, interruptible
        )
        self._outbox.append(command.record())
        if interruptible:
            branch.interrupts.append(InterruptHandle(command))

    def _resolve_arg(self, branch: Branch, var: ast.Variable) -> Scalar:
        if isinstance(var, ast.NumberArg):
            return var.value
        if isinstance(var, ast.CallArg):
            entry = self.env.lookup(var.call.target, var.call.function)
            if entry is None:
                raise ScenarioRuntimeError(
                    branch.id,
                    var.call.span,
                    f"no value recorded for {var.call.target}.{var.call.function}",
                )
            return entry.value
        return 1 if self._truth(var.cond) else 0

    # --- bookkeeping ---------------------------------------------------------------

    def drain(self) -> list[TraceRecord]:
        out = self._outbox
        self._outbox = []
        return out

    def _update_status(self) -> None:
        if not self.branches:
            self.status = "finished"
        elif any(self._runnable(b) for b in self.branches.values()):
            self.status = "running"
        else:
            self.status = "quiescent"


def _describe_wait(wait: Wait) -> str:
    if wait is None:
        return "none"
    if isinstance(wait, CondWait):
        return "cond"
    if isinstance(wait, TickWait):
        return f"tick:{wait.due}"
    return "join:" + ",".join(str(i) for i in sorted(wait.pending))


def _contains_macro(instrs: tuple[ast.Instr, ...]) -> bool:
    for instr in instrs:
        if isinstance(instr, ast.MacroCall):
            return True
        if isinstance(instr, (ast.Repeat, ast.While, ast.EventWait)):
            if _contains_macro(instr.body):
                return True
        elif isinstance(instr, ast.Conditional):
            if _contains_macro(instr.then_body):
                return True
            if instr.else_body is not None and _contains_macro(instr.else_body):
                return True
        elif isinstance(instr, ast.Parallel):
            if any(_contains_macro(b) for b in instr.branches):
                return True
    return False


def load(
    program: ast.Program,
    registry: Registry,
    rules: tuple[SymbolicRule, ...] = (),
    threshold: int = DEFAULT_THRESHOLD,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> Machine:
    """Validate and instantiate a machine; no instruction runs yet.

    The program must be macro-free (expand first) and free of
    error-severity diagnostics, otherwise LoadError.
    """
    if _contains_macro(program.instructions):
        raise LoadError("program contains unexpanded macro calls")
    diagnostics = validate(program, registry)
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        raise LoadError(
            "; ".join(f"{d.code}: {d.message}" for d in errors), diagnostics
        )
    return Machine(program, registry, rules, threshold, step_budget)


def run_to_quiescence(
    machine: Machine, budget: int = DEFAULT_STEP_BUDGET
) -> tuple[Machine, list[TraceRecord]]:
    """Run without input until nothing is runnable (or the budget trips)."""
    records = machine.step(None, budget=budget)
    return machine, records
