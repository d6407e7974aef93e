"""Tokenizer and recursive-descent parser for skill sources.

The surface syntax is whitespace-insensitive; `#` starts a comment that
runs to end of line. Errors carry line, column, and the token set the
parser would have accepted.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from ..relations import Axis
from .expr import (
    AxisLit, BinOp, Bool, Call, Expr, If, Let, ListTy, Num, SkillDef,
    SkillParam, Ty, TypeLike, UnOp, Var, SCALAR_TYPES,
)

KEYWORDS = {
    "skill", "score", "let", "in", "if", "then", "else",
    "and", "or", "not", "true", "false", "pi",
}

# x/y/z are reserved axis literals; they may not name params or lets.
AXIS_NAMES = {"x": Axis.X, "y": Axis.Y, "z": Axis.Z}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>->|==|!=|<=|>=|[()<>,:=+\-*/])
""", re.VERBOSE)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int,
                 expected: tuple[str, ...] = ()):
        self.line = line
        self.col = col
        self.expected = expected
        detail = f"{message} at line {line}, column {col}"
        if expected:
            detail += f" (expected one of: {', '.join(expected)})"
        super().__init__(detail)


@dataclass(frozen=True)
class Token:
    kind: str  # "number" | "ident" | "keyword" | "sym" | "eof"
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    while i < len(source):
        m = _TOKEN_RE.match(source, i)
        if m is None:
            raise ParseError(f"unexpected character {source[i]!r}", line, col)
        text = m.group(0)
        kind = m.lastgroup
        if kind == "ident" and text in KEYWORDS:
            kind = "keyword"
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        i = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def error(self, expected: tuple[str, ...]) -> ParseError:
        tok = self.peek()
        got = tok.text if tok.kind != "eof" else "end of input"
        return ParseError(f"unexpected {got!r}", tok.line, tok.col, expected)

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "eof":
            raise self.error((text,))
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.peek().text == text and self.peek().kind != "eof":
            self.advance()
            return True
        return False

    def expect_ident(self, role: str) -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.error((f"<{role}>",))
        if tok.text in AXIS_NAMES:
            raise ParseError(
                f"'{tok.text}' is a reserved axis literal and cannot "
                f"name a {role}", tok.line, tok.col)
        return self.advance()

    # -- types --

    def parse_type(self) -> TypeLike:
        tok = self.peek()
        if tok.kind == "ident" and tok.text in SCALAR_TYPES:
            self.advance()
            return SCALAR_TYPES[tok.text]
        if tok.kind == "ident" and tok.text == "list":
            self.advance()
            self.expect("<")
            elem = self.parse_type()
            self.expect(">")
            return ListTy(elem)
        raise self.error(tuple(sorted(SCALAR_TYPES)) + ("list",))

    # -- literals for parameter defaults --

    def parse_default(self) -> object:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return float(tok.text)
        if tok.text == "-" and self.tokens[self.i + 1].kind == "number":
            self.advance()
            num = self.advance()
            return -float(num.text)
        if tok.text == "true":
            self.advance()
            return True
        if tok.text == "false":
            self.advance()
            return False
        if tok.kind == "ident" and tok.text in AXIS_NAMES:
            self.advance()
            return AXIS_NAMES[tok.text]
        raise self.error(("<number>", "true", "false", "x", "y", "z"))

    # -- expressions --

    def parse_expr(self) -> Expr:
        tok = self.peek()
        if tok.text == "let" and tok.kind == "keyword":
            self.advance()
            name = self.expect_ident("let binding")
            self.expect("=")
            value = self.parse_expr()
            self.expect("in")
            body = self.parse_expr()
            return Let(name.text, value, body, pos=(tok.line, tok.col))
        if tok.text == "if" and tok.kind == "keyword":
            self.advance()
            cond = self.parse_expr()
            self.expect("then")
            then = self.parse_expr()
            self.expect("else")
            orelse = self.parse_expr()
            return If(cond, then, orelse, pos=(tok.line, tok.col))
        return self.parse_or()

    def parse_or(self) -> Expr:
        left = self.parse_and()
        while self.peek().text == "or" and self.peek().kind == "keyword":
            tok = self.advance()
            right = self.parse_and()
            left = BinOp("or", left, right, pos=(tok.line, tok.col))
        return left

    def parse_and(self) -> Expr:
        left = self.parse_not()
        while self.peek().text == "and" and self.peek().kind == "keyword":
            tok = self.advance()
            right = self.parse_not()
            left = BinOp("and", left, right, pos=(tok.line, tok.col))
        return left

    def parse_not(self) -> Expr:
        tok = self.peek()
        if tok.text == "not" and tok.kind == "keyword":
            self.advance()
            return UnOp("not", self.parse_not(), pos=(tok.line, tok.col))
        return self.parse_cmp()

    def parse_cmp(self) -> Expr:
        left = self.parse_add()
        tok = self.peek()
        if tok.kind == "sym" and tok.text in ("==", "!=", "<", "<=", ">",
                                              ">="):
            self.advance()
            right = self.parse_add()
            return BinOp(tok.text, left, right, pos=(tok.line, tok.col))
        return left

    def parse_add(self) -> Expr:
        left = self.parse_mul()
        while self.peek().kind == "sym" and self.peek().text in ("+", "-"):
            tok = self.advance()
            right = self.parse_mul()
            left = BinOp(tok.text, left, right, pos=(tok.line, tok.col))
        return left

    def parse_mul(self) -> Expr:
        left = self.parse_unary()
        while self.peek().kind == "sym" and self.peek().text in ("*", "/"):
            tok = self.advance()
            right = self.parse_unary()
            left = BinOp(tok.text, left, right, pos=(tok.line, tok.col))
        return left

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "-":
            self.advance()
            return UnOp("-", self.parse_unary(), pos=(tok.line, tok.col))
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Num(float(tok.text), pos=(tok.line, tok.col))
        if tok.kind == "keyword" and tok.text == "true":
            self.advance()
            return Bool(True, pos=(tok.line, tok.col))
        if tok.kind == "keyword" and tok.text == "false":
            self.advance()
            return Bool(False, pos=(tok.line, tok.col))
        if tok.kind == "keyword" and tok.text == "pi":
            self.advance()
            return Num(math.pi, pos=(tok.line, tok.col))
        if tok.kind == "sym" and tok.text == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if tok.kind == "ident":
            self.advance()
            if self.peek().text == "(" and self.peek().kind == "sym":
                self.advance()
                args: list[Expr] = []
                if not self.accept(")"):
                    args.append(self.parse_expr())
                    while self.accept(","):
                        args.append(self.parse_expr())
                    self.expect(")")
                return Call(tok.text, tuple(args), pos=(tok.line, tok.col))
            if tok.text in AXIS_NAMES:
                return AxisLit(AXIS_NAMES[tok.text], pos=(tok.line, tok.col))
            return Var(tok.text, pos=(tok.line, tok.col))
        raise self.error(("<number>", "<identifier>", "(", "let", "if",
                          "not", "-", "true", "false", "pi"))

    # -- skill definition --

    def parse_skill(self) -> SkillDef:
        self.expect("skill")
        name = self.expect_ident("skill name")
        self.expect("(")
        params: list[SkillParam] = []
        seen: set[str] = set()
        if not self.accept(")"):
            while True:
                pname = self.expect_ident("parameter")
                if pname.text in seen:
                    raise ParseError(f"duplicate parameter '{pname.text}'",
                                     pname.line, pname.col)
                seen.add(pname.text)
                self.expect(":")
                ty = self.parse_type()
                default = None
                if self.accept("="):
                    default = self.parse_default()
                params.append(SkillParam(pname.text, ty, default))
                if self.accept(")"):
                    break
                self.expect(",")
        self.expect("->")
        self.expect("score")
        body = self.parse_expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected {tok.text!r} after skill body",
                             tok.line, tok.col, ("end of input",))
        return SkillDef(name.text, tuple(params), body)


def parse_skill(source: str) -> SkillDef:
    """Parse one skill definition; raises ParseError with location info."""
    return _Parser(tokenize(source)).parse_skill()


def parse_expr(source: str) -> Expr:
    """Parse a bare expression (used by tests and tooling)."""
    p = _Parser(tokenize(source))
    e = p.parse_expr()
    tok = p.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected {tok.text!r} after expression",
                         tok.line, tok.col, ("end of input",))
    return e
