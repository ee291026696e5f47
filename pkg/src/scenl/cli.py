"""Command line front end.

    scenl check    validate a scenario against descriptor files
    scenl fmt      reprint a scenario in canonical layout
    scenl simulate run a scenario against a scripted event timeline
    scenl serve    start the HTTP control service

Exit codes: 0 success, 1 the input failed (parse/validation/simulation),
2 usage or environment trouble (missing files, occupied port).

Environment fallbacks for serve: SCENL_PORT, SCENL_DATA_DIR,
SCENL_TICK_MS, SCENL_THRESHOLD.
"""

from __future__ import annotations

import argparse
import difflib
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .events import (
    DescriptorError,
    Registry,
    RegistryError,
    check_rules,
    parse_rules,
    registry_from_paths,
)
from .interpreter import DEFAULT_THRESHOLD, StepBudgetExceeded
from .lang import (
    Diagnostic,
    MacroCycleError,
    MacroLibraryError,
    ParseError,
    Program,
    UnknownMacroError,
    expand_macros,
    format_program,
    parse,
    validate,
)
from .lang.lexer import LexError
from .simulation import ScriptError, parse_script, render_report, run_simulation

DEFAULT_PORT = 7333


def _env_int(name: str, fallback: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        return fallback


def _line_col(source: str, offset: int) -> tuple[int, int]:
    """1-based line and column for a byte offset into the UTF-8 source."""
    data = source.encode("utf-8")
    offset = max(0, min(offset, len(data)))
    prefix = data[:offset]
    line = prefix.count(b"\n") + 1
    last_nl = prefix.rfind(b"\n")
    col = offset - (last_nl + 1) + 1
    return line, col


def _print_diagnostics(
    path: str, source: str, diagnostics: Sequence[Diagnostic], as_json: bool
) -> None:
    if as_json:
        payload = []
        for diag in diagnostics:
            span = diag.span or (0, 0)
            line, col = _line_col(source, span[0])
            payload.append(
                {
                    "path": path,
                    "line": line,
                    "col": col,
                    "severity": diag.severity,
                    "code": diag.code,
                    "message": diag.message,
                    "span": list(span),
                }
            )
        print(json.dumps(payload, indent=2))
        return
    for diag in diagnostics:
        span = diag.span or (0, 0)
        line, col = _line_col(source, span[0])
        print(
            f"{path}:{line}:{col}: {diag.severity}[{diag.code}]: {diag.message}",
            file=sys.stderr,
        )


def _fail(message: str, code: int = 2) -> int:
    print(f"scenl: {message}", file=sys.stderr)
    return code


def _load_registry(args: argparse.Namespace) -> Registry:
    return registry_from_paths(args.registry, getattr(args, "macros", None))


def _parse_source(path: str) -> tuple[str, Program]:
    source = Path(path).read_text(encoding="utf-8")
    return source, parse(source)


def _syntax_diagnostic(exc: Exception) -> Diagnostic:
    code = "lex-error" if isinstance(exc, LexError) else "parse-error"
    span = getattr(exc, "span", (0, 0))
    return Diagnostic("error", code, str(exc), span)


# --- check ---------------------------------------------------------------


def cmd_check(args: argparse.Namespace) -> int:
    try:
        registry = _load_registry(args)
    except (OSError, DescriptorError, RegistryError, MacroLibraryError) as exc:
        return _fail(str(exc))
    try:
        source = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        return _fail(str(exc))
    try:
        program = parse(source)
    except (LexError, ParseError) as exc:
        _print_diagnostics(args.file, source, [_syntax_diagnostic(exc)], args.json)
        return 1
    diagnostics = validate(program, registry)
    _print_diagnostics(args.file, source, diagnostics, args.json)
    if any(d.severity == "error" for d in diagnostics):
        return 1
    return 0


# --- fmt -----------------------------------------------------------------


def cmd_fmt(args: argparse.Namespace) -> int:
    try:
        source, program = _parse_source(args.file)
    except OSError as exc:
        return _fail(str(exc))
    except (LexError, ParseError) as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return 1
    canonical = format_program(program) + "\n"
    if args.write:
        if canonical != source:
            Path(args.file).write_text(canonical, encoding="utf-8")
        return 0
    if args.diff:
        diff = difflib.unified_diff(
            source.splitlines(keepends=True),
            canonical.splitlines(keepends=True),
            fromfile=args.file,
            tofile=f"{args.file} (canonical)",
        )
        sys.stdout.writelines(diff)
        return 0
    sys.stdout.write(canonical)
    return 0


# --- simulate --------------------------------------------------------------


def _load_rules(path: Optional[str], registry: Registry):
    if path is None:
        return ()
    rules = parse_rules(Path(path).read_text(encoding="utf-8"))
    problems = check_rules(rules, registry)
    if problems:
        raise ScriptError("; ".join(problems))
    return tuple(rules)


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        registry = _load_registry(args)
        rules = _load_rules(args.rules, registry)
        script = parse_script(Path(args.script).read_text(encoding="utf-8"))
        source = Path(args.scenario).read_text(encoding="utf-8")
    except OSError as exc:
        return _fail(str(exc))
    except (DescriptorError, RegistryError, MacroLibraryError, ScriptError) as exc:
        return _fail(str(exc), 1)

    try:
        program = parse(source)
        program = expand_macros(program, registry.macros)
    except (LexError, ParseError) as exc:
        _print_diagnostics(args.scenario, source, [_syntax_diagnostic(exc)], False)
        return 1
    except (UnknownMacroError, MacroCycleError) as exc:
        print(f"{args.scenario}: {exc}", file=sys.stderr)
        return 1
    diagnostics = validate(program, registry)
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        _print_diagnostics(args.scenario, source, diagnostics, False)
        return 1

    try:
        report = run_simulation(
            program,
            registry,
            rules,
            script,
            horizon=args.horizon,
            threshold=args.threshold,
            step_budget=args.step_budget,
        )
    except (ScriptError, StepBudgetExceeded) as exc:
        return _fail(str(exc), 1)

    rendered = render_report(report)
    if args.trace:
        Path(args.trace).write_text(rendered, encoding="utf-8")
        summary = rendered.rstrip("\n").rsplit("\n", 1)[-1]
        print(summary)
    else:
        sys.stdout.write(rendered)
    return 0


# --- serve ---------------------------------------------------------------


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import ScenlService  # lazy: serve is the only consumer

    try:
        registry = _load_registry(args)
        rules = _load_rules(args.rules, registry)
    except OSError as exc:
        return _fail(str(exc))
    except (DescriptorError, RegistryError, MacroLibraryError, ScriptError) as exc:
        return _fail(str(exc), 1)

    webhooks = {}
    for pair in args.webhook or []:
        entity, sep, url = pair.partition("=")
        if not sep or not entity or not url:
            return _fail(f"webhook must look like entity=url, not {pair!r}")
        webhooks[entity] = url

    try:
        service = ScenlService(
            data_dir=args.data_dir,
            registry=registry,
            rules=rules,
            host=args.host,
            port=args.port,
            threshold=args.threshold,
            tick_ms=args.tick_ms,
            webhooks=webhooks,
            ui_dir=args.ui_dir,
        )
    except OSError as exc:
        return _fail(f"cannot bind {args.host}:{args.port}: {exc}")
    print(f"scenl service on http://{service.host}:{service.port}", file=sys.stderr)
    service.serve_forever()
    return 0


# --- argument wiring -----------------------------------------------------


def _add_registry_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "-r",
        "--registry",
        action="append",
        required=True,
        metavar="FILE",
        help="descriptor file (repeatable)",
    )
    sub.add_argument("--macros", metavar="FILE", help="macro library file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scenl", description="scenario language toolkit"
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="parse and validate a scenario")
    _add_registry_args(check)
    check.add_argument("--json", action="store_true", help="machine readable output")
    check.add_argument("file")
    check.set_defaults(fn=cmd_check)

    fmt = commands.add_parser("fmt", help="print canonical layout")
    group = fmt.add_mutually_exclusive_group()
    group.add_argument("--write", action="store_true", help="rewrite the file in place")
    group.add_argument("--diff", action="store_true", help="show a unified diff")
    fmt.add_argument("file")
    fmt.set_defaults(fn=cmd_fmt)

    simulate = commands.add_parser("simulate", help="run a scripted simulation")
    _add_registry_args(simulate)
    simulate.add_argument("scenario")
    simulate.add_argument("--rules", metavar="FILE", help="symbolic rule file")
    simulate.add_argument("--script", required=True, metavar="FILE")
    simulate.add_argument("--horizon", required=True, type=int, metavar="TICKS")
    simulate.add_argument("--trace", metavar="FILE", help="write the trace here")
    simulate.add_argument(
        "--threshold",
        type=int,
        default=_env_int("SCENL_THRESHOLD", DEFAULT_THRESHOLD),
    )
    simulate.add_argument("--step-budget", type=int, default=100_000)
    simulate.set_defaults(fn=cmd_simulate)

    serve = commands.add_parser("serve", help="start the HTTP service")
    _add_registry_args(serve)
    serve.add_argument("--rules", metavar="FILE", help="symbolic rule file")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument(
        "--port", type=int, default=_env_int("SCENL_PORT", DEFAULT_PORT)
    )
    serve.add_argument(
        "--data-dir", default=os.environ.get("SCENL_DATA_DIR", "./scenl-data")
    )
    serve.add_argument(
        "--tick-ms", type=int, default=_env_int("SCENL_TICK_MS", 100)
    )
    serve.add_argument(
        "--threshold",
        type=int,
        default=_env_int("SCENL_THRESHOLD", DEFAULT_THRESHOLD),
    )
    serve.add_argument(
        "--webhook",
        action="append",
        metavar="ENTITY=URL",
        help="POST an entity's records to a URL (repeatable)",
    )
    serve.add_argument("--ui-dir", metavar="DIR", help="serve static files at /ui")
    serve.set_defaults(fn=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.fn(args)


def entrypoint() -> None:
    sys.exit(main())
