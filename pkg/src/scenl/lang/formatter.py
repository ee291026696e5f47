"""Canonical text rendering for ScenL syntax trees.

One instruction per line, two-space indentation per nesting level,
every instruction terminated by ";", single spaces around "&" and "|".
Parallel branch separators sit alone on a line at the parent's indent.
Grouping parentheses in conditions are preserved exactly as parsed.

The output is byte-stable: format(parse(format(p))) == format(p), and
parse(format(p)) == p for every well-formed tree.
"""

from __future__ import annotations

from . import ast

INDENT = "  "


def format_program(program: ast.Program) -> str:
    lines: list[str] = []
    for instr in program.instructions:
        _emit(instr, 0, lines)
    return "\n".join(lines)


def format_call(call: ast.Call) -> str:
    args = ", ".join(format_variable(a) for a in call.args)
    return f"{call.target}.{call.function}({args})"


def format_variable(var: ast.Variable) -> str:
    if isinstance(var, ast.NumberArg):
        return str(var.value)
    if isinstance(var, ast.CallArg):
        return format_call(var.call)
    return format_cond(var.cond)


def format_cond(cond: ast.Cond) -> str:
    if isinstance(cond, ast.Atom):
        return format_call(cond.call)
    if isinstance(cond, ast.Not):
        return f"!({format_cond(cond.inner)})"
    if isinstance(cond, ast.Group):
        return f"({format_cond(cond.inner)})"
    if isinstance(cond, ast.And):
        return f"{format_cond(cond.left)} & {format_cond(cond.right)}"
    if isinstance(cond, ast.Or):
        return f"{format_cond(cond.left)} | {format_cond(cond.right)}"
    raise TypeError(f"not a condition node: {cond!r}")


def _emit(instr: ast.Instr, depth: int, lines: list[str]) -> None:
    pad = INDENT * depth
    if isinstance(instr, ast.Action):
        lines.append(f"{pad}{format_call(instr.call)};")
    elif isinstance(instr, ast.ActionInterrupt):
        lines.append(f"{pad}°{format_call(instr.call)}°;")
    elif isinstance(instr, ast.Timer):
        lines.append(f"{pad}WAIT({instr.duration});")
    elif isinstance(instr, ast.Break):
        lines.append(f"{pad}BREAK;")
    elif isinstance(instr, ast.MacroCall):
        lines.append(f"{pad}@{instr.name};")
    elif isinstance(instr, ast.Repeat):
        lines.append(f"{pad}{instr.count}*(")
        _emit_body(instr.body, depth + 1, lines)
        lines.append(f"{pad});")
    elif isinstance(instr, ast.While):
        lines.append(f"{pad}*[{format_cond(instr.cond)}](")
        _emit_body(instr.body, depth + 1, lines)
        lines.append(f"{pad});")
    elif isinstance(instr, ast.Conditional):
        lines.append(f"{pad}[{format_cond(instr.cond)}](")
        _emit_body(instr.then_body, depth + 1, lines)
        if instr.else_body is None:
            lines.append(f"{pad});")
        else:
            lines.append(f"{pad})!(")
            _emit_body(instr.else_body, depth + 1, lines)
            lines.append(f"{pad});")
    elif isinstance(instr, ast.EventWait):
        lines.append(f"{pad}<{format_cond(instr.cond)}>(")
        _emit_body(instr.body, depth + 1, lines)
        lines.append(f"{pad});")
    elif isinstance(instr, ast.Parallel):
        lines.append(f"{pad}/(")
        for i, branch in enumerate(instr.branches):
            if i:
                lines.append(f"{pad},")
            _emit_body(branch, depth + 1, lines)
        lines.append(f"{pad});")
    else:
        raise TypeError(f"not an instruction node: {instr!r}")


def _emit_body(body: tuple[ast.Instr, ...], depth: int, lines: list[str]) -> None:
    for instr in body:
        _emit(instr, depth, lines)
