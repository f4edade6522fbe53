"""A small expression language for momentum polynomials.

Spec files describe each coefficient function as a string like
``"1/2 * p_0^2 - p_1"``.  The grammar:

    expr    := term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := '-' factor | power
    power   := atom ('^' INTEGER)?
    atom    := INTEGER ('/' INTEGER)? | 'p_' INTEGER | '(' expr ')'

Binding from tightest to loosest: '^', unary minus, '*', then '+'/'-'.
Division appears only inside rational literals; exponents are non-negative
integers.  Errors carry the byte offset of the offending token.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .series import GradedSeries


class ExpressionError(ValueError):
    """A parse or validation failure, located by byte offset in the source."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (at byte {offset})")
        self.message = message
        self.offset = offset


class TruncationWarning(UserWarning):
    """Lowering dropped terms above the requested p cap."""


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class Add:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Sub:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Mul:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Pow:
    base: "Expression"
    exponent: int


Expression = Union[Num, Var, Neg, Add, Sub, Mul, Pow]


_Token = Tuple[str, str, int]  # kind, text, byte offset


def _tokenize(source: str) -> List[_Token]:
    tokens: List[_Token] = []
    i = 0
    length = len(source)
    while i < length:
        ch = source[i]
        if ch in " \t\r\n":
            i += 1
            continue
        offset = len(source[:i].encode("utf-8"))
        if ch.isdigit():
            j = i
            while j < length and source[j].isdigit():
                j += 1
            tokens.append(("number", source[i:j], offset))
            i = j
            continue
        if ch == "p":
            j = i + 1
            if j < length and source[j] == "_":
                j += 1
                start = j
                while j < length and source[j].isdigit():
                    j += 1
                if j > start:
                    tokens.append(("variable", source[i:j], offset))
                    i = j
                    continue
            raise ExpressionError(
                "variables look like p_0, p_1, ...", offset
            )
        if ch in "+-*/^()":
            tokens.append((ch, ch, offset))
            i += 1
            continue
        raise ExpressionError(f"unexpected character {ch!r}", offset)
    tokens.append(("end", "", len(source.encode("utf-8"))))
    return tokens


class _Parser:
    def __init__(self, tokens: List[_Token], n: int) -> None:
        self.tokens = tokens
        self.pos = 0
        self.n = n

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok[0] != kind:
            shown = tok[1] if tok[0] != "end" else "end of input"
            raise ExpressionError(f"expected {what}, found {shown!r}", tok[2])
        return self.advance()

    def parse(self) -> Expression:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExpressionError(f"unexpected {tok[1]!r} after expression", tok[2])
        return node

    def expr(self) -> Expression:
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()
            right = self.term()
            node = Add(node, right) if op[0] == "+" else Sub(node, right)
        return node

    def term(self) -> Expression:
        node = self.factor()
        while self.peek()[0] == "*":
            self.advance()
            node = Mul(node, self.factor())
        tok = self.peek()
        if tok[0] == "/":
            # '/' never follows a finished term; catch it here so expressions
            # like p_0/2 get the grammar hint instead of a generic error
            raise ExpressionError(
                "division is only allowed inside rational literals", tok[2]
            )
        return node

    def factor(self) -> Expression:
        if self.peek()[0] == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        if self.peek()[0] != "^":
            return base
        self.advance()
        tok = self.peek()
        if tok[0] == "-":
            raise ExpressionError("negative exponents are not allowed", tok[2])
        tok = self.expect("number", "a non-negative integer exponent")
        nxt = self.peek()
        if nxt[0] == "/":
            raise ExpressionError("fractional exponents are not allowed", nxt[2])
        return Pow(base, int(tok[1]))

    def atom(self) -> Expression:
        tok = self.peek()
        if tok[0] == "number":
            self.advance()
            numerator = int(tok[1])
            if self.peek()[0] == "/":
                self.advance()
                den_tok = self.expect("number", "an integer denominator")
                denominator = int(den_tok[1])
                if denominator == 0:
                    raise ExpressionError("division by zero", den_tok[2])
                return Num(Fraction(numerator, denominator))
            return Num(Fraction(numerator))
        if tok[0] == "variable":
            self.advance()
            index = int(tok[1][2:])
            if index >= self.n:
                raise ExpressionError(
                    f"variable {tok[1]} out of range for dimension {self.n}", tok[2]
                )
            return Var(index)
        if tok[0] == "(":
            self.advance()
            node = self.expr()
            self.expect(")", "a closing parenthesis")
            return node
        if tok[0] == "/":
            raise ExpressionError(
                "division is only allowed inside rational literals", tok[2]
            )
        shown = tok[1] if tok[0] != "end" else "end of input"
        raise ExpressionError(f"expected a value, found {shown!r}", tok[2])


def parse_expression(source: str, n: int) -> Expression:
    """Parse one momentum polynomial over p_0 .. p_{n-1}."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    return _Parser(_tokenize(source), n).parse()


def lower_to_series(
    expr: Expression, n: int, kmax: int = 0, pmax: Optional[int] = None
) -> GradedSeries:
    """Evaluate an expression tree into an exact series in the p variables.

    With ``pmax`` set, terms above the cap are dropped and a
    TruncationWarning is emitted, marking the result as a truncated power
    series rather than the full polynomial.
    """
    full = _lower(expr, n, kmax)
    if pmax is None:
        return full
    capped = full.with_pmax(pmax)
    if capped.terms != full.terms:
        warnings.warn(
            f"dropped terms above p-degree {pmax}", TruncationWarning, stacklevel=2
        )
    return capped


def _lower(expr: Expression, n: int, kmax: int) -> GradedSeries:
    if isinstance(expr, Num):
        return GradedSeries.constant(n, kmax, expr.value)
    if isinstance(expr, Var):
        return GradedSeries.p_var(n, expr.index, kmax)
    if isinstance(expr, Neg):
        return -_lower(expr.operand, n, kmax)
    if isinstance(expr, Add):
        return _lower(expr.left, n, kmax) + _lower(expr.right, n, kmax)
    if isinstance(expr, Sub):
        return _lower(expr.left, n, kmax) - _lower(expr.right, n, kmax)
    if isinstance(expr, Mul):
        return _lower(expr.left, n, kmax) * _lower(expr.right, n, kmax)
    if isinstance(expr, Pow):
        return _lower(expr.base, n, kmax) ** expr.exponent
    raise TypeError(f"not an expression node: {type(expr).__name__}")


def parse_to_series(
    source: str, n: int, kmax: int = 0, pmax: Optional[int] = None
) -> GradedSeries:
    return lower_to_series(parse_expression(source, n), n, kmax, pmax)


def series_to_expression(series: GradedSeries) -> str:
    """Render a real series in the p variables as parseable source text."""
    if not series.is_p_only():
        raise ValueError("only series in the p variables can be rendered")
    if not series.is_real():
        raise ValueError("only real series can be rendered")
    return series.pretty()
