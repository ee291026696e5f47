"""ScenL language front end: lexer, parser, canonical formatter,
validator, and macro expansion. Everything here is pure and safe to
call from any thread."""

from .ast import (
    Action,
    ActionInterrupt,
    And,
    Atom,
    Break,
    Call,
    CallArg,
    CondArg,
    Conditional,
    EventWait,
    Group,
    MacroCall,
    Not,
    NumberArg,
    Or,
    Parallel,
    Program,
    Repeat,
    Span,
    Timer,
    While,
)
from .formatter import format_call, format_cond, format_program, format_variable
from .lexer import LexError, Token, tokenize
from .macros import (
    MacroCycleError,
    MacroLibraryError,
    UnknownMacroError,
    expand_macros,
    format_macro_library,
    parse_macro_library,
)
from .parser import MAX_NB, ParseError, parse
from .validator import SYMBOLIC_SENSOR, Diagnostic, validate

__all__ = [
    "Action",
    "ActionInterrupt",
    "And",
    "Atom",
    "Break",
    "Call",
    "CallArg",
    "CondArg",
    "Conditional",
    "Diagnostic",
    "EventWait",
    "Group",
    "LexError",
    "MAX_NB",
    "MacroCall",
    "MacroCycleError",
    "MacroLibraryError",
    "Not",
    "NumberArg",
    "Or",
    "Parallel",
    "ParseError",
    "Program",
    "Repeat",
    "SYMBOLIC_SENSOR",
    "Span",
    "Timer",
    "Token",
    "UnknownMacroError",
    "While",
    "expand_macros",
    "format_call",
    "format_cond",
    "format_macro_library",
    "format_program",
    "format_variable",
    "parse",
    "parse_macro_library",
    "tokenize",
    "validate",
]
