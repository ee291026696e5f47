import pytest

from scenl import (
    MacroCycleError,
    MacroLibraryError,
    UnknownMacroError,
    expand_macros,
    format_macro_library,
    parse,
    parse_macro_library,
)
from scenl.lang import ast

LIBRARY = """\
# shared building blocks
macro greetAll:
  /(
    bioloid.sayHello();
  ,
    greta.sayHello();
  );

macro twice:
  a.f();
  a.f();
"""


def test_parse_library():
    macros = parse_macro_library(LIBRARY)
    assert list(macros) == ["greetAll", "twice"]
    assert isinstance(macros["greetAll"].instructions[0], ast.Parallel)
    assert len(macros["twice"].instructions) == 2


def test_duplicate_macro_rejected():
    with pytest.raises(MacroLibraryError):
        parse_macro_library("macro m:\n  a.f();\nmacro m:\n  b.g();\n")


def test_body_must_parse():
    with pytest.raises(MacroLibraryError) as err:
        parse_macro_library("macro broken:\n  a.f(\n")
    assert "broken" in str(err.value)


def test_text_before_first_header_rejected():
    with pytest.raises(MacroLibraryError):
        parse_macro_library("a.f();\nmacro m:\n  b.g();\n")


def test_expand_flat():
    macros = {"twice": parse("a.f(); a.f();")}
    program = expand_macros(parse("b.g(); @twice;"), macros)
    assert program == parse("b.g(); a.f(); a.f();")


def test_expand_inside_compound_bodies():
    macros = {"m": parse("a.f();")}
    source = "3*(@m;); *[symbolic.go()](@m;); [symbolic.go()](@m;)!(@m;); <symbolic.go()>(@m;); /(@m;, @m;);"
    program = expand_macros(parse(source), macros)
    expanded = parse(
        "3*(a.f();); *[symbolic.go()](a.f();); [symbolic.go()](a.f();)!(a.f(););"
        " <symbolic.go()>(a.f();); /(a.f();, a.f(););"
    )
    assert program == expanded


def test_expand_nested_macros():
    macros = {"outer": parse("@inner; @inner;"), "inner": parse("a.f();")}
    program = expand_macros(parse("@outer;"), macros)
    assert program == parse("a.f(); a.f();")


def test_unknown_macro_raises():
    with pytest.raises(UnknownMacroError):
        expand_macros(parse("@ghost;"), {})


def test_cycle_raises_with_chain():
    macros = {"ping": parse("@pong;"), "pong": parse("@ping;")}
    with pytest.raises(MacroCycleError) as err:
        expand_macros(parse("@ping;"), macros)
    assert "ping" in str(err.value) and "pong" in str(err.value)


def test_self_cycle():
    with pytest.raises(MacroCycleError):
        expand_macros(parse("@m;"), {"m": parse("@m;")})


def test_expansion_is_pure():
    macros = {"m": parse("a.f();")}
    original = parse("@m; b.g();")
    expand_macros(original, macros)
    assert original == parse("@m; b.g();")


def test_format_library_round_trip():
    macros = parse_macro_library(LIBRARY)
    rendered = format_macro_library(macros)
    assert parse_macro_library(rendered) == macros
    # canonical output is itself canonical
    assert format_macro_library(parse_macro_library(rendered)) == rendered
