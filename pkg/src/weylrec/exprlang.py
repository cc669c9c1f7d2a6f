"""Scalar expression language: parser, jet evaluation, symbolic derivative.

Grammar (documented in docs/exprlang.md):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | NAME '(' expr ')' | NAME | '(' expr ')'

Precedence: ^  >  unary -  >  * /  >  + -.  There is no implicit
multiplication ("2dv" is a syntax error) and whitespace is insignificant.
Numeric literals are parsed as exact rationals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from .jets import JetDomainError, JetPoly, UNARY_FUNCTIONS, jet_pow

FUNCTION_NAMES = tuple(sorted(UNARY_FUNCTIONS))


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets [start, end) into the source text."""

    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start <= self.end:
            raise ValueError(f"invalid span ({self.start}, {self.end})")


_SYNTHETIC = SourceSpan(0, 0)


class ExprError(Exception):
    """Base class for expression-language errors."""

    def __init__(self, message: str, span: SourceSpan = _SYNTHETIC):
        super().__init__(message)
        self.span = span


class ExprSyntaxError(ExprError):
    pass


class UnknownVariableError(ExprError):
    pass


class ExprDomainError(ExprError):
    """Evaluation hit a singularity; names the offending subexpression."""


# ----------------------------------------------------------------------
# AST
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: Union[int, Fraction]
    span: SourceSpan = _SYNTHETIC


@dataclass(frozen=True)
class Var:
    name: str
    span: SourceSpan = _SYNTHETIC


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    span: SourceSpan = _SYNTHETIC


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"
    span: SourceSpan = _SYNTHETIC


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"
    span: SourceSpan = _SYNTHETIC


Expr = Union[Const, Var, Neg, BinOp, Call]


# ----------------------------------------------------------------------
# tokenizer / parser
# ----------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num | name | op | end
    text: str
    span: SourceSpan


def _tokenize(source: str) -> List[_Token]:
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.end() == pos:
            stripped = source[pos:].lstrip()
            if not stripped:
                break
            at = n - len(stripped)
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", SourceSpan(at, at + 1))
        span = SourceSpan(m.start(m.lastgroup), m.end(m.lastgroup))
        tokens.append(_Token(m.lastgroup, m.group(m.lastgroup), span))
        pos = m.end()
    tokens.append(_Token("end", "", SourceSpan(n, n)))
    return tokens


def _literal(text: str) -> Union[int, Fraction]:
    if re.fullmatch(r"\d+", text):
        return int(text)
    f = Fraction(Decimal(text))
    return int(f) if f.denominator == 1 else f


class _Parser:
    def __init__(self, tokens: List[_Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def _advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _fail(self, expected: str):
        tok = self.current
        got = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(f"expected {expected}, got {got}", tok.span)

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self._advance()
            rhs = self.parse_term()
            node = BinOp(op.text, node, rhs, SourceSpan(node.span.start, rhs.span.end))
        return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self._advance()
            rhs = self.parse_unary()
            node = BinOp(op.text, node, rhs, SourceSpan(node.span.start, rhs.span.end))
        return node

    def parse_unary(self) -> Expr:
        if self.current.kind == "op" and self.current.text == "-":
            tok = self._advance()
            operand = self.parse_unary()
            return Neg(operand, SourceSpan(tok.span.start, operand.span.end))
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        if self.current.kind == "op" and self.current.text == "^":
            self._advance()
            exponent = self.parse_unary()  # right-associative, binds unary minus in the exponent
            return BinOp("^", base, exponent, SourceSpan(base.span.start, exponent.span.end))
        return base

    def parse_atom(self) -> Expr:
        tok = self.current
        if tok.kind == "num":
            self._advance()
            return Const(_literal(tok.text), tok.span)
        if tok.kind == "name":
            self._advance()
            if self.current.kind == "op" and self.current.text == "(":
                if tok.text not in UNARY_FUNCTIONS:
                    raise ExprSyntaxError(
                        f"unknown function {tok.text!r}; known functions: {', '.join(FUNCTION_NAMES)}",
                        tok.span,
                    )
                self._advance()
                arg = self.parse_expr()
                close = self.current
                if not (close.kind == "op" and close.text == ")"):
                    self._fail("')'")
                self._advance()
                return Call(tok.text, arg, SourceSpan(tok.span.start, close.span.end))
            return Var(tok.text, tok.span)
        if tok.kind == "op" and tok.text == "(":
            self._advance()
            node = self.parse_expr()
            close = self.current
            if not (close.kind == "op" and close.text == ")"):
                self._fail("')'")
            self._advance()
            return node
        self._fail("a number, a name or '('")


def parse(source: str) -> Expr:
    """Parse ``source`` into an Expr tree; raises ExprSyntaxError with a span."""
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", SourceSpan(0, len(source or "")))
    parser = _Parser(_tokenize(source))
    node = parser.parse_expr()
    if parser.current.kind != "end":
        parser._fail("an operator or end of input")
    return node


def as_expr(value: Union[str, Expr, int, Fraction]) -> Expr:
    if isinstance(value, str):
        return parse(value)
    if isinstance(value, (int, Fraction)):
        return Const(value)
    return value


# ----------------------------------------------------------------------
# evaluation on jets
# ----------------------------------------------------------------------


def eval_jet(expr: Union[str, Expr], env: Dict[str, JetPoly], order: Optional[int] = None) -> JetPoly:
    """Evaluate ``expr`` on a jet environment.

    All environment jets must share (nvars, order, base point); ``order``
    truncates the evaluation below the environment's order when given.
    """
    expr = as_expr(expr)
    if not env:
        raise ValueError("eval_jet requires a non-empty environment")
    jets = list(env.values())
    first = jets[0]
    for j in jets[1:]:
        if (j.nvars, j.order, j.base) != (first.nvars, first.order, first.base):
            raise JetDomainError("environment jets disagree in shape (truncation-order mismatch)")
    if order is None:
        order = first.order
    if order > first.order:
        raise JetDomainError(f"requested order {order} exceeds environment order {first.order}")
    if order < first.order:
        env = {k: v.truncated(order) for k, v in env.items()}
        first = next(iter(env.values()))
    return _eval(expr, env, first)


def _eval(expr: Expr, env: Dict[str, JetPoly], template: JetPoly) -> JetPoly:
    if isinstance(expr, Const):
        return template.like_constant(expr.value)
    if isinstance(expr, Var):
        try:
            return env[expr.name]
        except KeyError:
            known = ", ".join(sorted(env))
            raise UnknownVariableError(f"unknown variable {expr.name!r}; bound variables: {known}", expr.span) from None
    if isinstance(expr, Neg):
        return -_eval(expr.operand, env, template)
    if isinstance(expr, Call):
        arg = _eval(expr.arg, env, template)
        try:
            return UNARY_FUNCTIONS[expr.fn](arg)
        except JetDomainError as exc:
            raise ExprDomainError(f"{expr.fn}: {exc}", expr.span) from exc
    if isinstance(expr, BinOp):
        left = _eval(expr.left, env, template)
        if expr.op == "^":
            exponent = _eval(expr.right, env, template)
            if any(sum(a) > 0 for a, c in exponent.coeffs.items() if c != 0):
                # non-constant exponent: a^b = exp(b ln a)
                try:
                    return UNARY_FUNCTIONS["exp"](exponent * UNARY_FUNCTIONS["ln"](left))
                except JetDomainError as exc:
                    raise ExprDomainError(f"'^': {exc}", expr.span) from exc
            try:
                return jet_pow(left, exponent.value)
            except JetDomainError as exc:
                raise ExprDomainError(f"'^': {exc}", expr.span) from exc
        right = _eval(expr.right, env, template)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        if expr.op == "/":
            try:
                return left / right
            except (JetDomainError, ZeroDivisionError) as exc:
                raise ExprDomainError(f"division: {exc}", expr.span) from exc
    raise TypeError(f"not an Expr node: {expr!r}")


def eval_number(expr: Union[str, Expr], env: Dict[str, object]):
    """Evaluate at order 0 (plain values; exact when the inputs are exact)."""
    expr = as_expr(expr)
    jet_env = {k: JetPoly.constant(v, 1, 0, (0,)) for k, v in env.items()}
    if not jet_env:
        jet_env = {"_": JetPoly.constant(0, 1, 0, (0,))}
    return eval_jet(expr, jet_env, order=0).value


def variables_of(expr: Union[str, Expr]) -> Tuple[str, ...]:
    expr = as_expr(expr)
    names: List[str] = []

    def walk(node: Expr) -> None:
        if isinstance(node, Var):
            if node.name not in names:
                names.append(node.name)
        elif isinstance(node, Neg):
            walk(node.operand)
        elif isinstance(node, BinOp):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, Call):
            walk(node.arg)

    walk(expr)
    return tuple(names)


# ----------------------------------------------------------------------
# node builders with light constant folding (used to assemble catalog
# expressions and by the symbolic derivative)
# ----------------------------------------------------------------------


def const(value) -> Const:
    if isinstance(value, Fraction) and value.denominator == 1:
        value = int(value)
    return Const(value)


def var(name: str) -> Var:
    return Var(name)


def _is_const(e: Expr, value=None) -> bool:
    return isinstance(e, Const) and (value is None or e.value == value)


def add(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if _is_const(a) and _is_const(b):
        return const(a.value + b.value)
    return BinOp("+", a, b, a.span)


def sub(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0):
        return a
    if _is_const(a) and _is_const(b):
        return const(a.value - b.value)
    if _is_const(a, 0):
        return neg(b)
    return BinOp("-", a, b, a.span)


def mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0) or _is_const(b, 0):
        return const(0)
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if _is_const(a) and _is_const(b):
        return const(Fraction(a.value) * Fraction(b.value))
    return BinOp("*", a, b, a.span)


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 1):
        return a
    if _is_const(a, 0):
        return const(0)
    if _is_const(a) and _is_const(b) and b.value != 0:
        return const(Fraction(a.value) / Fraction(b.value))
    return BinOp("/", a, b, a.span)


def neg(a: Expr) -> Expr:
    if _is_const(a):
        return const(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a, a.span)


def pow_(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 1):
        return a
    if _is_const(b, 0):
        return const(1)
    return BinOp("^", a, b, a.span)


def call(fn: str, arg: Expr) -> Call:
    if fn not in UNARY_FUNCTIONS:
        raise ValueError(f"unknown function {fn!r}")
    return Call(fn, arg, arg.span)


# ----------------------------------------------------------------------
# symbolic derivative (chain rule on the AST; no simplification beyond the
# folding in the builders above)
# ----------------------------------------------------------------------


def derivative(expr: Union[str, Expr], name: str) -> Expr:
    expr = as_expr(expr)
    if isinstance(expr, Const):
        return const(0)
    if isinstance(expr, Var):
        return const(1 if expr.name == name else 0)
    if isinstance(expr, Neg):
        return neg(derivative(expr.operand, name))
    if isinstance(expr, BinOp):
        a, b = expr.left, expr.right
        da, db = derivative(a, name), derivative(b, name)
        if expr.op == "+":
            return add(da, db)
        if expr.op == "-":
            return sub(da, db)
        if expr.op == "*":
            return add(mul(da, b), mul(a, db))
        if expr.op == "/":
            return div(sub(mul(da, b), mul(a, db)), pow_(b, const(2)))
        if expr.op == "^":
            if _is_const(b):
                return mul(mul(b, pow_(a, const(b.value - 1))), da)
            # a^b = exp(b ln a)
            return mul(pow_(a, b), add(mul(db, call("ln", a)), mul(b, div(da, a))))
    if isinstance(expr, Call):
        u = expr.arg
        du = derivative(u, name)
        if _is_const(du, 0):
            return const(0)
        fn = expr.fn
        if fn == "exp":
            outer = call("exp", u)
        elif fn == "ln":
            return div(du, u)
        elif fn == "sin":
            outer = call("cos", u)
        elif fn == "cos":
            outer = neg(call("sin", u))
        elif fn == "tan":
            outer = add(const(1), pow_(call("tan", u), const(2)))
        elif fn == "sqrt":
            return div(du, mul(const(2), call("sqrt", u)))
        elif fn == "abs":
            outer = call("sign", u)
        elif fn == "sign":
            return const(0)
        else:  # pragma: no cover
            raise ValueError(f"no derivative rule for {fn!r}")
        return mul(outer, du)
    raise TypeError(f"not an Expr node: {expr!r}")


def to_source(expr: Union[str, Expr]) -> str:
    """Render an Expr back to parsable source text (fully parenthesized)."""
    expr = as_expr(expr)
    if isinstance(expr, Const):
        v = expr.value
        if isinstance(v, Fraction):
            return f"({v.numerator}/{v.denominator})" if v >= 0 else f"(0-{-v.numerator}/{v.denominator})"
        return str(v) if v >= 0 else f"(0-{-v})"
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Neg):
        return f"(-{to_source(expr.operand)})"
    if isinstance(expr, BinOp):
        return f"({to_source(expr.left)}{expr.op}{to_source(expr.right)})"
    if isinstance(expr, Call):
        return f"{expr.fn}({to_source(expr.arg)})"
    raise TypeError(f"not an Expr node: {expr!r}")
