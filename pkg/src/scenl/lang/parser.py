"""Recursive-descent parser for ScenL.

Grammar (EBNF; tokens from scenl.lang.lexer):

    program      = instructions EOF
    instructions = instr { ";" instr } [ ";" ]
    instr        = interrupt | repeat | while | parallel | conditional
                 | eventwait | timer | break | macrocall | action
    action       = call
    interrupt    = "°" call "°"
    repeat       = integer "*" "(" instructions ")"
    while        = "*" "[" cond "]" "(" instructions ")"
    parallel     = "/" "(" instructions "," instructions
                            { "," instructions } ")"
    conditional  = "[" cond "]" "(" instructions ")"
                   [ "!" "(" instructions ")" ]
    eventwait    = "<" cond ">" "(" instructions ")"
    timer        = "WAIT" "(" integer ")"
    break        = "BREAK"
    macrocall    = "@" identifier
    call         = identifier "." identifier
                   "(" [ variable { "," variable } ] ")"
    variable     = integer | cond
    cond         = conjunct { "|" conjunct }
    conjunct     = primary { "&" primary }
    primary      = "!" "(" cond ")" | "(" cond ")" | call

"&" binds tighter than "|"; both associate to the left. Explicit
parentheses around a condition become Group nodes so the formatter can
reproduce them. Negation only ever applies to a parenthesized
condition, which keeps "!(" after a conditional's then-block
unambiguous (no instruction starts with "!").

Integers are unsigned 32-bit; leading zeros are accepted. Parsing
either returns a complete Program or raises ParseError at the first
violation; there is no partial output.
"""

from __future__ import annotations

from typing import NoReturn, Optional

from . import ast
from .lexer import Span, Token, tokenize

MAX_NB = 0xFFFF_FFFF


class ParseError(ValueError):
    def __init__(self, span: Span, expected: tuple[str, ...], found: str):
        self.span = span
        self.expected = expected
        self.found = found
        want = " or ".join(expected)
        super().__init__(f"expected {want}, found {found} at byte {span[0]}")


def parse(source: str) -> ast.Program:
    """Parse a complete program; raises LexError or ParseError."""
    tokens = tokenize(source)
    parser = _Parser(tokens, len(source.encode("utf-8")))
    instructions = parser.instructions(stop=frozenset())
    parser.expect_end()
    return ast.Program(tuple(instructions))


class _Parser:
    def __init__(self, tokens: list[Token], source_bytes: int):
        self._tokens = tokens
        self._i = 0
        self._eof_span: Span = (source_bytes, source_bytes)

    # --- token plumbing ------------------------------------------------

    def _peek(self) -> Optional[Token]:
        if self._i < len(self._tokens):
            return self._tokens[self._i]
        return None

    def _advance(self) -> Token:
        tok = self._tokens[self._i]
        self._i += 1
        return tok

    def _check(self, lexeme: str) -> bool:
        tok = self._peek()
        return tok is not None and tok.lexeme == lexeme

    def _check_kind(self, kind: str) -> bool:
        tok = self._peek()
        return tok is not None and tok.kind == kind

    def _fail(self, *expected: str) -> NoReturn:
        tok = self._peek()
        if tok is None:
            raise ParseError(self._eof_span, expected, "end of input")
        raise ParseError(tok.span, expected, repr(tok.lexeme))

    def _expect(self, lexeme: str) -> Token:
        if not self._check(lexeme):
            self._fail(repr(lexeme))
        return self._advance()

    def _expect_kind(self, kind: str) -> Token:
        if not self._check_kind(kind):
            self._fail(kind)
        return self._advance()

    def expect_end(self) -> None:
        if self._peek() is not None:
            self._fail("end of input")

    def _span_from(self, start: int) -> Span:
        first = self._tokens[start].span
        last = self._tokens[self._i - 1].span
        return (first[0], last[1])

    def _integer(self) -> int:
        tok = self._expect_kind("integer")
        value = int(tok.lexeme)
        if value > MAX_NB:
            raise ParseError(tok.span, ("integer <= %d" % MAX_NB,), tok.lexeme)
        return value

    # --- instructions --------------------------------------------------

    def instructions(self, stop: frozenset[str]) -> list[ast.Instr]:
        """One or more instructions separated by ';' (trailing ';' ok).

        stop holds the lexemes that may legally follow the list, so a
        trailing separator before ')' or ',' ends the list instead of
        demanding another instruction.
        """
        instrs = [self.instr()]
        while self._check(";"):
            self._advance()
            tok = self._peek()
            if tok is None or tok.lexeme in stop:
                break
            instrs.append(self.instr())
        return instrs

    def instr(self) -> ast.Instr:
        start = self._i
        tok = self._peek()
        if tok is None:
            self._fail("instruction")
        if tok.kind == "integer":
            count = self._integer()
            self._expect("*")
            self._expect("(")
            body = self.instructions(stop=frozenset(")"))
            self._expect(")")
            return ast.Repeat(count, tuple(body), span=self._span_from(start))
        if tok.lexeme == "*":
            self._advance()
            self._expect("[")
            cond = self.cond()
            self._expect("]")
            self._expect("(")
            body = self.instructions(stop=frozenset(")"))
            self._expect(")")
            return ast.While(cond, tuple(body), span=self._span_from(start))
        if tok.lexeme == "/":
            self._advance()
            self._expect("(")
            branches = [self.instructions(stop=frozenset(",)"))]
            self._expect(",")  # parallel needs at least two branches
            branches.append(self.instructions(stop=frozenset(",)")))
            while self._check(","):
                self._advance()
                branches.append(self.instructions(stop=frozenset(",)")))
            self._expect(")")
            return ast.Parallel(
                tuple(tuple(b) for b in branches), span=self._span_from(start)
            )
        if tok.lexeme == "[":
            self._advance()
            cond = self.cond()
            self._expect("]")
            self._expect("(")
            then_body = self.instructions(stop=frozenset(")"))
            self._expect(")")
            else_body = None
            if self._check("!"):
                self._advance()
                self._expect("(")
                else_body = tuple(self.instructions(stop=frozenset(")")))
                self._expect(")")
            return ast.Conditional(
                cond, tuple(then_body), else_body, span=self._span_from(start)
            )
        if tok.lexeme == "<":
            self._advance()
            cond = self.cond()
            self._expect(">")
            self._expect("(")
            body = self.instructions(stop=frozenset(")"))
            self._expect(")")
            return ast.EventWait(cond, tuple(body), span=self._span_from(start))
        if tok.lexeme == "°":
            self._advance()
            call = self.call()
            self._expect("°")
            return ast.ActionInterrupt(call, span=self._span_from(start))
        if tok.lexeme == "WAIT":
            self._advance()
            self._expect("(")
            duration = self._integer()
            self._expect(")")
            return ast.Timer(duration, span=self._span_from(start))
        if tok.lexeme == "BREAK":
            self._advance()
            return ast.Break(span=self._span_from(start))
        if tok.lexeme == "@":
            self._advance()
            name = self._expect_kind("identifier")
            return ast.MacroCall(name.lexeme, span=self._span_from(start))
        if tok.kind == "identifier":
            call = self.call()
            return ast.Action(call, span=self._span_from(start))
        self._fail("instruction")

    # --- calls and arguments -------------------------------------------

    def call(self) -> ast.Call:
        start = self._i
        target = self._expect_kind("identifier")
        self._expect(".")
        function = self._expect_kind("identifier")
        self._expect("(")
        args: list[ast.Variable] = []
        if not self._check(")"):
            args.append(self.variable())
            while self._check(","):
                self._advance()
                args.append(self.variable())
        self._expect(")")
        return ast.Call(
            target.lexeme, function.lexeme, tuple(args), span=self._span_from(start)
        )

    def variable(self) -> ast.Variable:
        start = self._i
        tok = self._peek()
        if tok is None:
            self._fail("argument")
        if tok.kind == "integer":
            value = self._integer()
            return ast.NumberArg(value, span=self._span_from(start))
        if tok.kind == "identifier" or tok.lexeme in ("!", "("):
            cond = self.cond()
            if isinstance(cond, ast.Atom):
                # a bare call: integer read or boolean test, settled at validation
                return ast.CallArg(cond.call, span=self._span_from(start))
            return ast.CondArg(cond, span=self._span_from(start))
        self._fail("argument")

    # --- conditions ----------------------------------------------------

    def cond(self) -> ast.Cond:
        start = self._i
        left = self._conjunct()
        while self._check("|"):
            self._advance()
            right = self._conjunct()
            left = ast.Or(left, right, span=self._span_from(start))
        return left

    def _conjunct(self) -> ast.Cond:
        start = self._i
        left = self._primary()
        while self._check("&"):
            self._advance()
            right = self._primary()
            left = ast.And(left, right, span=self._span_from(start))
        return left

    def _primary(self) -> ast.Cond:
        start = self._i
        if self._check("!"):
            self._advance()
            self._expect("(")
            inner = self.cond()
            self._expect(")")
            return ast.Not(inner, span=self._span_from(start))
        if self._check("("):
            self._advance()
            inner = self.cond()
            self._expect(")")
            return ast.Group(inner, span=self._span_from(start))
        if self._check_kind("identifier"):
            call = self.call()
            return ast.Atom(call, span=call.span)
        self._fail("condition")
