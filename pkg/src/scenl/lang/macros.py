"""Macro expansion and the macro library file format.

A macro is a named program fragment; @name in a program splices the
fragment's instructions in place. Expansion is recursive (macro bodies
may call macros) and refuses cycles.

Library file format, one macro per section:

    macro <name>:
      <indented ScenL text>

Body lines are dedented and parsed as a program. Blank lines and #
comments are allowed anywhere.
"""

from __future__ import annotations

import re

from . import ast
from .formatter import INDENT, format_program
from .parser import parse

_HEADER = re.compile(r"^macro\s+([A-Za-z][A-Za-z0-9_]*)\s*:\s*$")


class UnknownMacroError(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"no macro named {self.name!r}"


class MacroCycleError(ValueError):
    def __init__(self, chain: list[str]):
        super().__init__("macro expansion cycles: " + " -> ".join(chain))
        self.chain = chain


class MacroLibraryError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


def expand_macros(program: ast.Program, macros: dict[str, ast.Program]) -> ast.Program:
    """Return an equivalent program with every @name call inlined.

    The output contains no MacroCall nodes, so expanding it again is the
    identity. Raises UnknownMacroError or MacroCycleError.
    """
    return ast.Program(_expand_list(program.instructions, macros, ()))


def _expand_list(
    instrs: tuple[ast.Instr, ...],
    macros: dict[str, ast.Program],
    stack: tuple[str, ...],
) -> tuple[ast.Instr, ...]:
    out: list[ast.Instr] = []
    for instr in instrs:
        if isinstance(instr, ast.MacroCall):
            if instr.name in stack:
                chain = list(stack[stack.index(instr.name):]) + [instr.name]
                raise MacroCycleError(chain)
            body = macros.get(instr.name)
            if body is None:
                raise UnknownMacroError(instr.name)
            out.extend(
                _expand_list(body.instructions, macros, stack + (instr.name,))
            )
        elif isinstance(instr, ast.Repeat):
            out.append(
                ast.Repeat(
                    instr.count,
                    _expand_list(instr.body, macros, stack),
                    span=instr.span,
                )
            )
        elif isinstance(instr, ast.While):
            out.append(
                ast.While(
                    instr.cond,
                    _expand_list(instr.body, macros, stack),
                    span=instr.span,
                )
            )
        elif isinstance(instr, ast.Conditional):
            else_body = (
                None
                if instr.else_body is None
                else _expand_list(instr.else_body, macros, stack)
            )
            out.append(
                ast.Conditional(
                    instr.cond,
                    _expand_list(instr.then_body, macros, stack),
                    else_body,
                    span=instr.span,
                )
            )
        elif isinstance(instr, ast.EventWait):
            out.append(
                ast.EventWait(
                    instr.cond,
                    _expand_list(instr.body, macros, stack),
                    span=instr.span,
                )
            )
        elif isinstance(instr, ast.Parallel):
            out.append(
                ast.Parallel(
                    tuple(_expand_list(b, macros, stack) for b in instr.branches),
                    span=instr.span,
                )
            )
        else:
            out.append(instr)
    return tuple(out)


def parse_macro_library(text: str) -> dict[str, ast.Program]:
    """Parse a library file into name -> Program, in file order."""
    macros: dict[str, ast.Program] = {}
    current: str | None = None
    body: list[str] = []
    header_line = 0

    def flush(end_line: int) -> None:
        if current is None:
            return
        source = "\n".join(body)
        try:
            macros[current] = parse(source)
        except ValueError as exc:
            raise MacroLibraryError(
                header_line, f"macro {current!r} body does not parse: {exc}"
            ) from exc

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        match = _HEADER.match(raw)
        if match:
            flush(lineno)
            name = match.group(1)
            if name in macros:
                raise MacroLibraryError(lineno, f"duplicate macro {name!r}")
            current = name
            header_line = lineno
            body = []
            continue
        if not stripped or stripped.startswith("#"):
            if current is not None:
                body.append("")
            continue
        if current is None:
            raise MacroLibraryError(lineno, "text before the first macro header")
        body.append(raw)
    flush(len(text.splitlines()) + 1)
    return macros


def format_macro_library(macros: dict[str, ast.Program]) -> str:
    """Render a library with each body in canonical form."""
    sections: list[str] = []
    for name, program in macros.items():
        body = "\n".join(
            INDENT + line for line in format_program(program).splitlines()
        )
        sections.append(f"macro {name}:\n{body}")
    return "\n\n".join(sections) + "\n"
