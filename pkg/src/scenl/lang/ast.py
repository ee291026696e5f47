"""Syntax tree for ScenL programs.

Nodes are frozen dataclasses compared structurally. Source spans (UTF-8
byte offsets) and resolved call kinds ride along on the nodes but are
excluded from equality, so a formatted-and-reparsed tree compares equal
to the tree it came from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

Span = tuple[int, int]


def _meta():
    # span/kind annotations never participate in structural equality
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    """A dotted call ``target.function(args...)``.

    The target names an entity (actions) or a sensor (conditions and
    integer reads); which one is only known once a registry is in hand,
    so ``kind`` stays None until validation classifies the call.
    """

    target: str
    function: str
    args: tuple["Variable", ...] = ()
    kind: Optional[str] = field(default=None, compare=False)
    span: Optional[Span] = _meta()

    @property
    def arg(self) -> Optional["Variable"]:
        return self.args[0] if self.args else None

    @property
    def channel(self) -> tuple[str, str]:
        return (self.target, self.function)


# --- call arguments ---------------------------------------------------


@dataclass(frozen=True)
class NumberArg:
    value: int
    span: Optional[Span] = _meta()


@dataclass(frozen=True)
class CallArg:
    call: Call
    span: Optional[Span] = _meta()


@dataclass(frozen=True)
class CondArg:
    cond: "Cond"
    span: Optional[Span] = _meta()


Variable = Union[NumberArg, CallArg, CondArg]


# --- conditions -------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    call: Call
    span: Optional[Span] = _meta()


@dataclass(frozen=True)
class Not:
    inner: "Cond"
    span: Optional[Span] = _meta()


@dataclass(frozen=True)
class Group:
    """Explicit parentheses, preserved so formatting is faithful."""

    inner: "Cond"
    span: Optional[Span] = _meta()


@dataclass(frozen=True)
class And:
    left: "Cond"
    right: "Cond"
    span: Optional[Span] = _meta()


@dataclass(frozen=True)
class Or:
    left: "Cond"
    right: "Cond"
    span: Optional[Span] = _meta()


Cond = Union[Atom, Not, Group, And, Or]


# --- instructions -----------------------------------------------------


@dataclass(frozen=True)
class Action:
    call: Call
    span: Optional[Span] = _meta()


@dataclass(frozen=True)
class ActionInterrupt:
    """An action the runtime may later cancel; written °t.f()°."""

    call: Call
    span: Optional[Span] = _meta()


@dataclass(frozen=True)
class Repeat:
    count: int
    body: tuple["Instr", ...] = ()
    span: Optional[Span] = _meta()


@dataclass(frozen=True)
class While:
    cond: Cond
    body: tuple["Instr", ...] = ()
    span: Optional[Span] = _meta()


@dataclass(frozen=True)
class Conditional:
    cond: Cond
    then_body: tuple["Instr", ...] = ()
    else_body: Optional[tuple["Instr", ...]] = None
    span: Optional[Span] = _meta()


@dataclass(frozen=True)
class EventWait:
    """Block until the condition holds at some future event delivery."""

    cond: Cond
    body: tuple["Instr", ...] = ()
    span: Optional[Span] = _meta()


@dataclass(frozen=True)
class Parallel:
    branches: tuple[tuple["Instr", ...], ...] = ()
    span: Optional[Span] = _meta()


@dataclass(frozen=True)
class Timer:
    duration: int
    span: Optional[Span] = _meta()


@dataclass(frozen=True)
class Break:
    span: Optional[Span] = _meta()


@dataclass(frozen=True)
class MacroCall:
    name: str
    span: Optional[Span] = _meta()


Instr = Union[
    Action,
    ActionInterrupt,
    Repeat,
    While,
    Conditional,
    EventWait,
    Parallel,
    Timer,
    Break,
    MacroCall,
]


@dataclass(frozen=True)
class Program:
    instructions: tuple[Instr, ...]
