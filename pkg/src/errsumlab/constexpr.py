"""A tiny language of real constants: parser, printer and enclosure evaluator.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom ['^' '(' rational ')']
    atom   := number | 'e' | 'exp(' expr ')' | 'sqrt(' expr ')'
            | 'sin(' expr ')' | 'cos(' expr ')' | '(' expr ')'

``e`` is ``exp(1)`` and ``e^(p/q)`` is ``exp(p/q)``. A power is only legal when
its base is an exponential, ``exp(x)^(r)`` becoming ``exp(x*r)``; anything else
would need a logarithm. Numbers are integers or exact decimals such as
``0.125``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .numerics import (
    DomainError,
    Enclosure,
    LOG2_10,
    Indeterminate,
    exp_enclosure,
    refine,
    sin_cos_enclosure,
    sqrt_interval,
    tidy,
)


@dataclass(frozen=True)
class Rat:
    value: Fraction


@dataclass(frozen=True)
class Exp:
    arg: "ConstExpr"


@dataclass(frozen=True)
class Sqrt:
    arg: "ConstExpr"


@dataclass(frozen=True)
class Sin:
    arg: "ConstExpr"


@dataclass(frozen=True)
class Cos:
    arg: "ConstExpr"


@dataclass(frozen=True)
class Neg:
    arg: "ConstExpr"


@dataclass(frozen=True)
class Add:
    left: "ConstExpr"
    right: "ConstExpr"


@dataclass(frozen=True)
class Sub:
    left: "ConstExpr"
    right: "ConstExpr"


@dataclass(frozen=True)
class Mul:
    left: "ConstExpr"
    right: "ConstExpr"


@dataclass(frozen=True)
class Div:
    left: "ConstExpr"
    right: "ConstExpr"


ConstExpr = Union[Rat, Exp, Sqrt, Sin, Cos, Neg, Add, Sub, Mul, Div]

FUNCTIONS = {"exp": Exp, "sqrt": Sqrt, "sin": Sin, "cos": Cos}
BINARY = {"+": Add, "-": Sub, "*": Mul, "/": Div}


def rat(value) -> Rat:
    return Rat(Fraction(value))


class ParseError(ValueError):
    """Syntax error at a 0-based character offset."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        detail = f"{message} at offset {offset}"
        if expected:
            detail += f" (expected {', '.join(expected)})"
        super().__init__(detail)
        self.offset = offset
        self.expected = expected


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|([A-Za-z_]+)|(\S))")


@dataclass
class _Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    offset: int


def tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        number, name, op = m.groups()
        start = m.start(m.lastindex)
        if number is not None:
            tokens.append(_Token("num", number, start))
        elif name is not None:
            tokens.append(_Token("name", name, start))
        else:
            if op not in "+-*/^()":
                raise ParseError(f"unexpected character {op!r}", start)
            tokens.append(_Token("op", op, start))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tok
        self.i += 1
        return tok

    def fail(self, expected: tuple[str, ...]):
        tok = self.tok
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {what}", tok.offset, expected)

    def expect(self, op: str):
        if self.tok.kind == "op" and self.tok.text == op:
            return self.advance()
        self.fail((repr(op),))

    def parse(self) -> ConstExpr:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail(("operator", "end of input"))
        return node

    def expr(self) -> ConstExpr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BINARY[op](node, self.term())
        return node

    def term(self) -> ConstExpr:
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BINARY[op](node, self.factor())
        return node

    def factor(self) -> ConstExpr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.factor())
        node = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            caret = self.advance()
            self.expect("(")
            power = self.rational()
            self.expect(")")
            if not isinstance(node, Exp):
                raise ParseError(
                    "'^' needs an exponential base such as e or exp(...)", caret.offset
                )
            arg = node.arg
            if isinstance(arg, Rat):
                return Exp(Rat(arg.value * power))
            return Exp(Mul(arg, Rat(power)))
        return node

    def rational(self) -> Fraction:
        sign = 1
        if self.tok.kind == "op" and self.tok.text in "+-":
            sign = -1 if self.advance().text == "-" else 1
        value = self.number()
        if self.tok.kind == "op" and self.tok.text == "/":
            self.advance()
            denominator = self.number()
            if denominator == 0:
                raise ParseError("zero denominator in exponent", self.tokens[self.i - 1].offset)
            value /= denominator
        return sign * value

    def number(self) -> Fraction:
        if self.tok.kind != "num":
            self.fail(("number",))
        return Fraction(self.advance().text)

    def atom(self) -> ConstExpr:
        tok = self.tok
        if tok.kind == "num":
            return Rat(self.number())
        if tok.kind == "name":
            if tok.text == "e":
                self.advance()
                return Exp(Rat(Fraction(1)))
            if tok.text in FUNCTIONS:
                self.advance()
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return FUNCTIONS[tok.text](inner)
            raise ParseError(f"unknown name {tok.text!r}", tok.offset, ("e", *FUNCTIONS))
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        self.fail(("number", "e", "exp", "sqrt", "sin", "cos", "'('", "'-'"))


def parse(text: str) -> ConstExpr:
    return _Parser(text).parse()


def _format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    d = value.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d == 1:
        places = max(twos, fives)
        scaled = abs(value.numerator) * 10**places // value.denominator
        whole, frac = divmod(scaled, 10**places)
        sign = "-" if value < 0 else ""
        return f"{sign}{whole}.{frac:0{places}d}"
    return f"{value.numerator}/{value.denominator}"


def unparse(node: ConstExpr) -> str:
    """Fully parenthesized source text that parses back to ``node``."""
    if isinstance(node, Rat):
        text = _format_rational(node.value)
        if node.value < 0 or "/" in text:
            # not producible by the parser; stay readable and value-preserving
            return f"({text})"
        return text
    if isinstance(node, Exp):
        if isinstance(node.arg, Rat):
            if node.arg.value == 1:
                return "e"
            return f"e^({_format_rational(node.arg.value)})"
        arg = node.arg
        if isinstance(arg, Mul) and isinstance(arg.right, Rat) and not isinstance(arg.left, Rat):
            # the shape produced by exp(...)^(p/q)
            return f"exp({unparse(arg.left)})^({_format_rational(arg.right.value)})"
        return f"exp({unparse(arg)})"
    for name, cls in FUNCTIONS.items():
        if cls is not Exp and isinstance(node, cls):
            return f"{name}({unparse(node.arg)})"
    if isinstance(node, Neg):
        return f"(-{unparse(node.arg)})"
    for op, cls in BINARY.items():
        if isinstance(node, cls):
            return f"({unparse(node.left)} {op} {unparse(node.right)})"
    raise TypeError(f"not a ConstExpr: {node!r}")


def is_rational(node: ConstExpr) -> bool:
    if isinstance(node, Rat):
        return True
    if isinstance(node, (Exp, Sqrt, Sin, Cos)):
        return False
    if isinstance(node, Neg):
        return is_rational(node.arg)
    return is_rational(node.left) and is_rational(node.right)


def _argument_bits(digits: int) -> int:
    # series arguments are cut to short dyadic rationals to keep terms small
    return math.ceil(digits * LOG2_10) + 8


def _sin_cos_interval(arg: Enclosure, digits: int, which: int) -> Enclosure:
    # |sin'|, |cos'| <= 1, so the value at a nearby center plus the distance is safe
    scale = 1 << _argument_bits(digits)
    center = Fraction(round(arg.mid * scale), scale)
    radius = max(arg.hi - center, center - arg.lo)
    value = sin_cos_enclosure(center, digits)[which]
    if radius:
        value = Enclosure(value.lo - radius, value.hi + radius)
    return Enclosure(max(value.lo, Fraction(-1)), min(value.hi, Fraction(1)))


def _evaluate(node: ConstExpr, digits: int) -> Enclosure:
    if isinstance(node, Rat):
        return Enclosure.point(node.value)
    if isinstance(node, Neg):
        return -_evaluate(node.arg, digits)
    if isinstance(node, Exp):
        arg = _evaluate(node.arg, digits)
        if arg.is_point and arg.lo.denominator.bit_length() <= _argument_bits(digits):
            return exp_enclosure(arg.lo, digits)
        # exp is increasing, so rounding the argument outward stays rigorous
        arg = arg.rounded(_argument_bits(digits))
        return Enclosure(exp_enclosure(arg.lo, digits).lo, exp_enclosure(arg.hi, digits).hi)
    if isinstance(node, Sqrt):
        return sqrt_interval(_evaluate(node.arg, digits), digits)
    if isinstance(node, Sin):
        return _sin_cos_interval(_evaluate(node.arg, digits), digits, 0)
    if isinstance(node, Cos):
        return _sin_cos_interval(_evaluate(node.arg, digits), digits, 1)
    left = _evaluate(node.left, digits)
    right = _evaluate(node.right, digits)
    if isinstance(node, Add):
        result = left + right
    elif isinstance(node, Sub):
        result = left - right
    elif isinstance(node, Mul):
        result = left * right
    elif isinstance(node, Div):
        result = left / right
    else:
        raise TypeError(f"not a ConstExpr: {node!r}")
    return tidy(result, digits)


def _depth(node: ConstExpr) -> int:
    if isinstance(node, Rat):
        return 1
    if isinstance(node, (Exp, Sqrt, Sin, Cos, Neg)):
        return 1 + _depth(node.arg)
    return 1 + max(_depth(node.left), _depth(node.right))


def eval_enclosure(expr: ConstExpr | str, digits: int) -> Enclosure:
    """Enclose the value of ``expr`` to width at most ``10**-digits``.

    Raises :class:`DomainError` for division by zero or square roots of
    negative numbers, including cases that stay unresolved at the escalation
    cap, and :class:`PrecisionError` if the width target is missed.
    """
    node = parse(expr) if isinstance(expr, str) else expr
    if is_rational(node):
        return _evaluate(node, digits)
    guard = 5 + math.ceil(math.log2(_depth(node) + 1))
    return refine(lambda working: _evaluate(node, working), digits, guard=guard)


__all__ = [
    "Add",
    "ConstExpr",
    "Cos",
    "Div",
    "DomainError",
    "Exp",
    "Indeterminate",
    "Mul",
    "Neg",
    "ParseError",
    "Rat",
    "Sin",
    "Sqrt",
    "Sub",
    "eval_enclosure",
    "is_rational",
    "parse",
    "rat",
    "tokenize",
    "unparse",
]
