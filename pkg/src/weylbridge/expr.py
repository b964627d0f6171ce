"""Small arithmetic expression language for metric coefficients.

Grammar (``^`` is right associative and binds tighter than unary minus)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | IDENT | FUNC "(" expr ")" | "(" expr ")"
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .errors import ChartSyntaxError

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "tanh")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, Bin, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str, line: int | None):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ChartSyntaxError(f"unexpected character {text[pos]!r}", line, pos + 1)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text, variables, line):
        self.tokens = _tokenize(text, line)
        self.i = 0
        self.variables = set(variables)
        self.line = line

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ChartSyntaxError(message, self.line, tok[2])

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            raise self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)

    def parse(self):
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return e

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = Bin(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return Bin("^", base, self.unary())
        return base

    def atom(self):
        tok = self.take()
        kind, val = tok[0], tok[1]
        if kind == "num":
            return Num(float(val))
        if kind == "ident":
            if self.peek()[1] == "(":
                if val not in FUNCTIONS:
                    raise self.error(f"unknown function {val!r}", tok)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            if val in FUNCTIONS:
                raise self.error(f"function {val!r} needs an argument", tok)
            if val not in self.variables:
                raise self.error(f"unknown identifier {val!r}", tok)
            return Var(val)
        if val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise self.error(f"unexpected token {val or 'end of input'!r}", tok)


def parse_expr(text: str, variables, line: int | None = None) -> Expr:
    """Parse ``text``; identifiers other than ``variables`` and known functions are rejected."""
    return _Parser(str(text), variables, line).parse()


def to_text(e: Expr) -> str:
    """Fully parenthesized rendering; ``parse_expr(to_text(e))`` reproduces ``e``."""
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_text(e.arg)})"
    if isinstance(e, Bin):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    if isinstance(e, Call):
        return f"{e.fn}({to_text(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def variables_of(e: Expr) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Num):
        return set()
    if isinstance(e, (Neg, Call)):
        return variables_of(e.arg)
    return variables_of(e.left) | variables_of(e.right)


# Builders used when charts are assembled programmatically (bridge, conformal rescale).

def add(a: Expr, b: Expr) -> Expr:
    return Bin("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    return Bin("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    return Bin("*", a, b)


def num(x: float) -> Expr:
    x = float(x)
    return Neg(Num(-x)) if x < 0 else Num(x)


def is_zero(e: Expr) -> bool:
    return isinstance(e, Num) and e.value == 0.0


def evaluate(e: Expr, env: dict, ops) -> object:
    """Fold ``e`` with arithmetic supplied by ``ops`` (floats or jets).

    ``ops`` provides ``const(x)``, ``func(name, value)``, ``power(base, exponent)``
    and ``divide(a, b)``; ``+ - *`` and negation use the values' own operators.
    """
    if isinstance(e, Num):
        return ops.const(e.value)
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Neg):
        return -evaluate(e.arg, env, ops)
    if isinstance(e, Call):
        return ops.func(e.fn, evaluate(e.arg, env, ops))
    left = evaluate(e.left, env, ops)
    right = evaluate(e.right, env, ops)
    if e.op == "^":
        return ops.power(left, right)
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    if e.op == "*":
        return left * right
    return ops.divide(left, right)


def integer_exponent(value: float):
    """Return ``int(value)`` when the exponent is an exact integer, else ``None``."""
    if math.isfinite(value) and float(value).is_integer() and abs(value) <= 64:
        return int(value)
    return None
