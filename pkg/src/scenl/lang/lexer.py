"""Tokenizer for ScenL source text.

ScenL is symbol structured: every construct is introduced by punctuation
rather than a keyword, except the two terminals WAIT and BREAK. The
lexer emits one token per symbol, identifier, or integer and records
UTF-8 byte spans so diagnostics can point back into the file.

``#`` starts a comment running to end of line. Comments and the ASCII
whitespace characters separate tokens and are otherwise dropped;
concatenating token lexemes with the skipped bytes reconstructs the
source exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

Span = tuple[int, int]

# ° (U+00B0) brackets interruptible actions and is the one non-ASCII symbol
SYMBOL_CHARS = ";.(),*[]!<>&|/@°"
KEYWORDS = frozenset({"BREAK", "WAIT"})
_WHITESPACE = " \t\r\n"


class LexError(ValueError):
    """A byte that cannot start any token."""

    def __init__(self, message: str, span: Span):
        super().__init__(f"{message} at byte {span[0]}")
        self.reason = message
        self.span = span


@dataclass(frozen=True)
class Token:
    kind: str  # symbol | identifier | integer | keyword
    lexeme: str
    span: Span


def tokenize(source: str) -> list[Token]:
    """Split source into tokens; raises LexError on a stray character."""
    tokens: list[Token] = []
    i = 0
    pos = 0  # byte offset into the UTF-8 encoding of source
    n = len(source)
    while i < n:
        ch = source[i]
        if ch in _WHITESPACE:
            i += 1
            pos += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                pos += len(source[i].encode("utf-8"))
                i += 1
            continue
        if ch in SYMBOL_CHARS:
            width = len(ch.encode("utf-8"))
            tokens.append(Token("symbol", ch, (pos, pos + width)))
            i += 1
            pos += width
            continue
        if ch.isascii() and ch.isalpha():
            start_i, start_pos = i, pos
            i += 1
            while i < n:
                c = source[i]
                if c.isascii() and (c.isalnum() or c == "_"):
                    i += 1
                else:
                    break
            lexeme = source[start_i:i]
            pos = start_pos + len(lexeme)  # identifiers are pure ASCII
            kind = "keyword" if lexeme in KEYWORDS else "identifier"
            tokens.append(Token(kind, lexeme, (start_pos, pos)))
            continue
        if ch.isascii() and ch.isdigit():
            start_i, start_pos = i, pos
            i += 1
            while i < n and source[i].isascii() and source[i].isdigit():
                i += 1
            lexeme = source[start_i:i]
            pos = start_pos + len(lexeme)
            tokens.append(Token("integer", lexeme, (start_pos, pos)))
            continue
        raise LexError(
            f"unexpected character {ch!r}",
            (pos, pos + len(ch.encode("utf-8"))),
        )
    return tokens
