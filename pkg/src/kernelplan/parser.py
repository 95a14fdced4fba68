"""Textual front end for assignment statements.

Grammar (one statement per line, ``#`` starts a comment):

    stmt   := ident ('=' | '+=' | '-=') expr
    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := ident | number | func '(' expr ')' | '(' expr ')'
    func   := 'sin' | 'cos' | 'log'

``*`` is disambiguated by the workspace kind of its operands: matrix*vector
is a matrix-vector product, scalar*vector (either order) a scalar multiply,
vector*vector an error. There is no unary minus; write ``0 - x``-style
statements with a leading term or use ``-=``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from .errors import KindError, ParseError
from .expr import (
    ExprNode,
    FuncId,
    MatLeaf,
    ScalarLeaf,
    VecLeaf,
    build_add,
    build_func,
    build_matvec,
    build_scalmul,
    build_sub,
    kind,
    render_expr,
    shape_of,
)
from .lower import Mode, Statement

if TYPE_CHECKING:  # pragma: no cover
    from .kernels import Workspace


class TokenKind(Enum):
    IDENT = "ident"
    NUMBER = "number"
    PLUS = "+"
    MINUS = "-"
    STAR = "*"
    LPAREN = "("
    RPAREN = ")"
    COMMA = ","
    EQ = "="
    PLUSEQ = "+="
    MINUSEQ = "-="


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    pos: int  # 1-based column of the first character


FUNC_NAMES = {f.value: f for f in FuncId}

_NUMBER_RE = re.compile(r"\d+(?:\.\d*)?(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_SINGLE = {
    "+": TokenKind.PLUS,
    "-": TokenKind.MINUS,
    "*": TokenKind.STAR,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    ",": TokenKind.COMMA,
    "=": TokenKind.EQ,
}


def tokenize(text: str) -> list[Token]:
    """Scan a statement line into tokens; fail at the first bad character."""
    toks: list[Token] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "#":
            break
        if ch.isspace():
            i += 1
            continue
        if text.startswith("+=", i):
            toks.append(Token(TokenKind.PLUSEQ, "+=", i + 1))
            i += 2
            continue
        if text.startswith("-=", i):
            toks.append(Token(TokenKind.MINUSEQ, "-=", i + 1))
            i += 2
            continue
        if ch in _SINGLE:
            toks.append(Token(_SINGLE[ch], ch, i + 1))
            i += 1
            continue
        if ch.isdigit():
            m = _NUMBER_RE.match(text, i)
            end = m.end()
            if end < len(text) and (text[end].isalnum() or text[end] in "._"):
                raise ParseError("malformed number", end + 1)
            toks.append(Token(TokenKind.NUMBER, m.group(), i + 1))
            i = end
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            toks.append(Token(TokenKind.IDENT, m.group(), i + 1))
            i = m.end()
            continue
        raise ParseError(f"invalid character {ch!r}", i + 1)
    return toks


_MODES = {
    TokenKind.EQ: Mode.ASSIGN,
    TokenKind.PLUSEQ: Mode.PLUS_ASSIGN,
    TokenKind.MINUSEQ: Mode.MINUS_ASSIGN,
}


class _Cursor:
    def __init__(self, tokens: list[Token], env: "Workspace"):
        self.tokens = tokens
        self.env = env
        self.k = 0

    def peek(self) -> Token | None:
        return self.tokens[self.k] if self.k < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of statement", self._end_pos())
        self.k += 1
        return tok

    def expect(self, kind_: TokenKind) -> Token:
        tok = self.peek()
        if tok is None or tok.kind is not kind_:
            raise ParseError(
                f"expected {kind_.value!r}",
                tok.pos if tok else self._end_pos(),
            )
        return self.advance()

    def _end_pos(self) -> int:
        if self.tokens:
            last = self.tokens[-1]
            return last.pos + len(last.text)
        return 1


def parse(tokens: list[Token], env: "Workspace") -> Statement:
    """Parse a token stream into a shape-checked Statement."""
    cur = _Cursor(tokens, env)
    head = cur.expect(TokenKind.IDENT)
    if env.kind_of(head.text) != "vector":
        raise KindError(
            f"destination {head.text!r} is not a vector"
            f" (column {head.pos})"
        )
    op = cur.advance()
    mode = _MODES.get(op.kind)
    if mode is None:
        raise ParseError("expected '=', '+=' or '-='", op.pos)
    rhs = _expr(cur)
    trailing = cur.peek()
    if trailing is not None:
        raise ParseError(f"unexpected {trailing.text!r}", trailing.pos)
    if kind(rhs) != "vector":
        raise KindError(
            f"right-hand side is not a vector expression: {render_expr(rhs)}"
        )
    stmt = Statement(head.text, mode, rhs)
    # Validates names, kinds and lengths eagerly, with the env at hand.
    shape_of(rhs, env)
    return stmt


def parse_statement(text: str, env: "Workspace") -> Statement:
    return parse(tokenize(text), env)


def parse_expr(text: str, env: "Workspace") -> ExprNode:
    """Parse a bare expression (used by tests and demos)."""
    cur = _Cursor(tokenize(text), env)
    node = _expr(cur)
    trailing = cur.peek()
    if trailing is not None:
        raise ParseError(f"unexpected {trailing.text!r}", trailing.pos)
    return node


def _expr(cur: _Cursor) -> ExprNode:
    node = _term(cur)
    while True:
        tok = cur.peek()
        if tok is None or tok.kind not in (TokenKind.PLUS, TokenKind.MINUS):
            return node
        cur.advance()
        right = _term(cur)
        build = build_add if tok.kind is TokenKind.PLUS else build_sub
        node = build(node, right)


def _term(cur: _Cursor) -> ExprNode:
    node = _factor(cur)
    while True:
        tok = cur.peek()
        if tok is None or tok.kind is not TokenKind.STAR:
            return node
        cur.advance()
        right = _factor(cur)
        node = _star(node, right, tok.pos)


def _star(left: ExprNode, right: ExprNode, pos: int) -> ExprNode:
    kl, kr = kind(left), kind(right)
    if kl == "matrix" and kr == "vector":
        return build_matvec(left, right)
    if kl == "scalar" and kr == "vector":
        return build_scalmul(left, right)
    if kl == "vector" and kr == "scalar":
        return build_scalmul(right, left)
    if kl == "vector" and kr == "vector":
        raise KindError(
            f"cannot multiply two vectors ({render_expr(left)} *"
            f" {render_expr(right)}, column {pos})"
        )
    if kl == "scalar" and kr == "scalar":
        raise KindError(
            f"product of two scalars is not supported (column {pos})"
        )
    raise KindError(
        f"cannot multiply {kl} by {kr} (column {pos})"
    )


def _factor(cur: _Cursor) -> ExprNode:
    tok = cur.advance()
    if tok.kind is TokenKind.NUMBER:
        return ScalarLeaf(float(tok.text))
    if tok.kind is TokenKind.LPAREN:
        node = _expr(cur)
        cur.expect(TokenKind.RPAREN)
        return node
    if tok.kind is TokenKind.IDENT:
        nxt = cur.peek()
        if nxt is not None and nxt.kind is TokenKind.LPAREN:
            func = FUNC_NAMES.get(tok.text)
            if func is None:
                raise ParseError(f"unknown function name {tok.text!r}",
                                 tok.pos)
            cur.advance()
            arg = _expr(cur)
            cur.expect(TokenKind.RPAREN)
            return build_func(func, arg)
        name_kind = cur.env.kind_of(tok.text)  # raises UnboundNameError
        if name_kind == "vector":
            return VecLeaf(tok.text)
        if name_kind == "scalar":
            return ScalarLeaf(tok.text)
        return MatLeaf(tok.text)
    raise ParseError(
        f"expected identifier, number or '(', got {tok.text!r}", tok.pos
    )
