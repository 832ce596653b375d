"""Recursive-descent parser for the expression grammar.

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' integer)?
    base   := rational | ident | call | '(' expr ')' | '-' base
    call   := ident '(' expr ')'

Identifiers are coordinates, declared constants, or declared opaque
function names (optionally prime-suffixed for derivatives: f', f'').
'exp' is the built-in exponential; sin/cos/log are reserved and rejected.
Everything folds to a canonical Expr during the parse, so printing and
re-parsing is a fixed point.
"""

from __future__ import annotations

from fractions import Fraction

from .context import Context, CurvclassError, RESERVED_FUNCTIONS
from .expr import Expr, ONE
from .poly import KIND_SYMBOL


class ParseError(CurvclassError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_OPS = set("+-*/^()")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []  # (kind, value, pos)
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                self.tokens.append(("int", text[i:j], i))
                i = j
            elif ch.isalpha():
                j = i
                while j < n and (text[j].isalnum()):
                    j += 1
                while j < n and text[j] == "'":
                    j += 1
                self.tokens.append(("ident", text[i:j], i))
                i = j
            elif ch in _OPS:
                self.tokens.append(("op", ch, i))
                i += 1
            else:
                raise ParseError(f"unexpected character {ch!r}", i)
        self.tokens.append(("end", "", n))
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def accept_op(self, *ops: str) -> str | None:
        kind, value, _ = self.peek()
        if kind == "op" and value in ops:
            self.pos += 1
            return value
        return None

    def expect_op(self, op: str):
        kind, value, pos = self.next()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}, found {value or 'end of input'!r}", pos)


def parse_expr(text: str, context: Context) -> Expr:
    """Parse text into a canonical Expr against the declared context."""
    toks = _Tokens(text)
    e = _parse_sum(toks, context)
    kind, value, pos = toks.peek()
    if kind != "end":
        raise ParseError(f"trailing input {value!r}", pos)
    return e


def _parse_sum(toks: _Tokens, ctx: Context) -> Expr:
    e = _parse_term(toks, ctx)
    while True:
        op = toks.accept_op("+", "-")
        if op is None:
            return e
        rhs = _parse_term(toks, ctx)
        e = e + rhs if op == "+" else e - rhs


def _parse_term(toks: _Tokens, ctx: Context) -> Expr:
    e = _parse_factor(toks, ctx)
    while True:
        op = toks.accept_op("*", "/")
        if op is None:
            return e
        _, _, pos = toks.peek()
        rhs = _parse_factor(toks, ctx)
        if op == "*":
            e = e * rhs
        else:
            if rhs.is_zero():
                raise ParseError("division by zero", pos)
            e = e / rhs


def _parse_factor(toks: _Tokens, ctx: Context) -> Expr:
    e = _parse_base(toks, ctx)
    if toks.accept_op("^"):
        sign = -1 if toks.accept_op("-") else 1
        kind, value, pos = toks.next()
        if kind != "int":
            raise ParseError("exponent must be an integer literal", pos)
        k = sign * int(value)
        if k < 0 and e.is_zero():
            raise ParseError("negative power of zero", pos)
        e = e ** k
    return e


def _parse_base(toks: _Tokens, ctx: Context) -> Expr:
    kind, value, pos = toks.next()
    if kind == "op" and value == "-":
        return -_parse_base(toks, ctx)
    if kind == "op" and value == "(":
        e = _parse_sum(toks, ctx)
        toks.expect_op(")")
        return e
    if kind == "int":
        return Expr.from_rational(int(value))
    if kind == "ident":
        name = value.rstrip("'")
        order = len(value) - len(name)
        if toks.accept_op("("):
            arg = _parse_sum(toks, ctx)
            toks.expect_op(")")
            return _make_call(name, order, arg, ctx, pos)
        if order:
            raise ParseError(f"prime suffix on non-function identifier {value!r}", pos)
        if not ctx.is_symbol(name):
            if name in ctx.opaque:
                raise ParseError(f"opaque function {name!r} needs an argument", pos)
            raise ParseError(f"undeclared identifier {name!r}", pos)
        return Expr.symbol(name)
    raise ParseError(f"unexpected token {value or 'end of input'!r}", pos)


def _linear_form_of(arg: Expr, pos: int) -> dict:
    """Validate an exp argument as a rational linear form in coordinates."""
    if not arg.den.is_one():
        raise ParseError("exp argument must be a linear form in coordinates", pos)
    form: dict[str, Fraction] = {}
    for mono, coeff in arg.num.terms.items():
        if len(mono) != 1:
            raise ParseError("exp argument must be a linear form in coordinates", pos)
        (atom, e), = mono
        if atom[0] != KIND_SYMBOL or e != 1:
            raise ParseError("exp argument must be a linear form in coordinates", pos)
        form[atom[1]] = coeff
    return form


def _make_call(name: str, order: int, arg: Expr, ctx: Context, pos: int) -> Expr:
    if name == "exp":
        if order:
            raise ParseError("prime suffix is not allowed on exp", pos)
        if arg.is_zero():
            return ONE
        form = _linear_form_of(arg, pos)
        for coord in form:
            if coord not in ctx.coords:
                raise ParseError(f"exp argument must be linear in coordinates, found {coord!r}", pos)
        return Expr.exponential(form)
    if name in RESERVED_FUNCTIONS:
        raise ParseError(f"function {name!r} is reserved but not supported", pos)
    if name in ctx.opaque:
        expected = ctx.opaque[name]
        if arg != Expr.symbol(expected):
            raise ParseError(f"{name} must be applied to its declared coordinate {expected!r}", pos)
        return Expr.opaque(name, order, expected)
    raise ParseError(f"undeclared function {name!r}", pos)
