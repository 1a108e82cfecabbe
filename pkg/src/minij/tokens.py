"""Lexer for MiniJ source and stub files."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import LexError

KEYWORDS = frozenset({
    "class", "interface", "enum", "extends", "implements", "package", "import",
    "public", "private", "protected", "static", "abstract", "final",
    "void", "int", "boolean", "char", "double",
    "if", "else", "while", "for", "return", "throw", "new",
    "this", "super", "true", "false", "null",
})

# Longest first so that == beats =, && beats error, etc.
PUNCTUATION = (
    "==", "!=", "<=", ">=", "&&", "||",
    "(", ")", "{", "}", "[", "]", "<", ">",
    ",", ";", ".", "=", "+", "-", "*", "/", "%", "!", "?",
)

TEST_MARKER = "@Test"


class TokenKind(Enum):
    IDENT = "ident"
    KEYWORD = "keyword"
    INT_LIT = "int"
    DOUBLE_LIT = "double"
    STRING_LIT = "string"
    CHAR_LIT = "char"
    PUNCT = "punct"
    TEST_MARKER = "test-marker"
    EOF = "eof"


@dataclass(frozen=True)
class SourceSpan:
    """1-based [start, end] region of a source file."""

    path: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def cover(self, other: "SourceSpan") -> "SourceSpan":
        lo = min((self.start_line, self.start_col), (other.start_line, other.start_col))
        hi = max((self.end_line, self.end_col), (other.end_line, other.end_col))
        return SourceSpan(self.path, lo[0], lo[1], hi[0], hi[1])

    def contains(self, other: "SourceSpan") -> bool:
        return (
            self.path == other.path
            and (self.start_line, self.start_col) <= (other.start_line, other.start_col)
            and (self.end_line, self.end_col) >= (other.end_line, other.end_col)
        )

    def __str__(self) -> str:
        return f"{self.path}:{self.start_line}:{self.start_col}"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: SourceSpan


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_part(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


class _Scanner:
    def __init__(self, text: str, path: str):
        self.text = text
        self.path = path
        self.pos = 0
        self.line = 1
        self.col = 1

    def peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def here(self) -> tuple[int, int]:
        return self.line, self.col

    def span_from(self, start: tuple[int, int]) -> SourceSpan:
        # end column points at the last consumed character
        end_line, end_col = self.line, self.col - 1
        if end_col < 1:
            end_line, end_col = end_line - 1, 1
        return SourceSpan(self.path, start[0], start[1], end_line, end_col)

    def error(self, message: str, at: tuple[int, int] | None = None) -> LexError:
        line, col = at if at is not None else (self.line, self.col)
        return LexError(message, SourceSpan(self.path, line, col, line, col))


def tokenize(text: str, path: str = "<source>") -> list[Token]:
    """Split source text into tokens, each carrying its span.

    Raises LexError on characters outside the MiniJ alphabet; this is how
    non-MiniJ input files are detected.
    """
    sc = _Scanner(text, path)
    out: list[Token] = []
    while sc.pos < len(sc.text):
        ch = sc.peek()
        if ch in " \t\r\n":
            sc.advance()
            continue
        if ch == "/" and sc.peek(1) == "/":
            while sc.pos < len(sc.text) and sc.peek() != "\n":
                sc.advance()
            continue
        if ch == "/" and sc.peek(1) == "*":
            start = sc.here()
            sc.advance()
            sc.advance()
            while not (sc.peek() == "*" and sc.peek(1) == "/"):
                if sc.pos >= len(sc.text):
                    raise sc.error("unterminated block comment", start)
                sc.advance()
            sc.advance()
            sc.advance()
            continue
        start = sc.here()
        if _is_ident_start(ch):
            word = ""
            while sc.pos < len(sc.text) and _is_ident_part(sc.peek()):
                word += sc.advance()
            kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENT
            out.append(Token(kind, word, sc.span_from(start)))
            continue
        if ch.isdigit():
            digits = ""
            while sc.pos < len(sc.text) and sc.peek().isdigit():
                digits += sc.advance()
            if sc.peek() == "." and sc.peek(1).isdigit():
                digits += sc.advance()
                while sc.pos < len(sc.text) and sc.peek().isdigit():
                    digits += sc.advance()
                kind = TokenKind.DOUBLE_LIT
            else:
                kind = TokenKind.INT_LIT
            if _is_ident_start(sc.peek()):
                raise sc.error("identifier cannot start with a digit", start)
            out.append(Token(kind, digits, sc.span_from(start)))
            continue
        if ch == '"':
            sc.advance()
            value = ""
            while sc.peek() != '"':
                if sc.pos >= len(sc.text) or sc.peek() == "\n":
                    raise sc.error("unterminated string literal", start)
                c = sc.advance()
                if c == "\\":
                    value += _escape(sc, start)
                else:
                    value += c
            sc.advance()
            out.append(Token(TokenKind.STRING_LIT, value, sc.span_from(start)))
            continue
        if ch == "'":
            sc.advance()
            if sc.pos >= len(sc.text):
                raise sc.error("unterminated char literal", start)
            c = sc.advance()
            if c == "\\":
                c = _escape(sc, start)
            if sc.peek() != "'":
                raise sc.error("unterminated char literal", start)
            sc.advance()
            out.append(Token(TokenKind.CHAR_LIT, c, sc.span_from(start)))
            continue
        if ch == "@":
            word = ""
            sc.advance()
            while sc.pos < len(sc.text) and _is_ident_part(sc.peek()):
                word += sc.advance()
            marker = "@" + word
            if marker != TEST_MARKER:
                raise sc.error(f"unknown annotation {marker!r}", start)
            out.append(Token(TokenKind.TEST_MARKER, marker, sc.span_from(start)))
            continue
        matched = False
        for punct in PUNCTUATION:
            if sc.text.startswith(punct, sc.pos):
                for _ in punct:
                    sc.advance()
                out.append(Token(TokenKind.PUNCT, punct, sc.span_from(start)))
                matched = True
                break
        if not matched:
            raise sc.error(f"unrecognized character {ch!r}", start)
    eof_span = SourceSpan(path, sc.line, sc.col, sc.line, sc.col)
    out.append(Token(TokenKind.EOF, "", eof_span))
    return out


def _escape(sc: _Scanner, start: tuple[int, int]) -> str:
    if sc.pos >= len(sc.text):
        raise sc.error("unterminated escape", start)
    c = sc.advance()
    table = {"n": "\n", "t": "\t", "r": "\r", "0": "\0", "\\": "\\", '"': '"', "'": "'"}
    if c not in table:
        raise sc.error(f"unknown escape \\{c}", start)
    return table[c]
