"""Truncated multivariate Taylor-polynomial ("jet") arithmetic.

This is the numeric engine behind every derivative in the package: metric
partials, Christoffel jets, curvature, total derivatives of invariants.
A jet holds the Taylor coefficients (derivative / alpha!) of a function at a
base point, up to a fixed total degree.  Coefficients may be ints, Fractions
or floats; exact inputs stay exact through +, -, *, / and integer powers,
which is what makes the exact-rational evaluation mode possible.

Jets are immutable after construction and every operation returns a fresh
value, so all of this is safe to call from concurrent contexts.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

MultiIndex = Tuple[int, ...]


class JetShapeError(ValueError):
    """Arithmetic between jets with different variable count, order or base."""


class JetDomainError(ValueError):
    """Function applied outside its domain (ln/sqrt of non-positive values,
    division by a jet with zero constant term, sign/abs at zero)."""


@lru_cache(maxsize=None)
def taylor_indices(nvars: int, order: int) -> Tuple[MultiIndex, ...]:
    """All exponent multi-indices of total degree <= order, graded lex order."""
    if nvars == 0:
        return ((),)
    out: List[MultiIndex] = []

    def rec(prefix: MultiIndex, remaining: int, budget: int) -> None:
        if remaining == 1:
            for k in range(budget + 1):
                out.append(prefix + (k,))
            return
        for k in range(budget + 1):
            rec(prefix + (k,), remaining - 1, budget - k)

    rec((), nvars, order)
    out.sort(key=lambda a: (sum(a), a))
    return tuple(out)


def _multi_factorial(alpha: MultiIndex) -> int:
    f = 1
    for a in alpha:
        f *= math.factorial(a)
    return f


class JetPoly:
    """Taylor polynomial of total degree <= ``order`` around ``base``.

    ``coeffs`` maps multi-indices to Taylor coefficients; absent entries are
    zero.  The logical coefficient table always covers the full dense index
    set of degree <= order (see :meth:`partials`).
    """

    __slots__ = ("nvars", "order", "base", "coeffs")

    def __init__(self, nvars: int, order: int, base: Sequence, coeffs: Dict[MultiIndex, object] | None = None):
        self.nvars = nvars
        self.order = order
        self.base = tuple(base)
        self.coeffs = {} if coeffs is None else coeffs

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    @classmethod
    def constant(cls, value, nvars: int, order: int, base: Sequence) -> "JetPoly":
        coeffs = {} if value == 0 else {(0,) * nvars: value}
        return cls(nvars, order, base, coeffs)

    @classmethod
    def variable(cls, index: int, nvars: int, order: int, base: Sequence) -> "JetPoly":
        base = tuple(base)
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        coeffs: Dict[MultiIndex, object] = {}
        if base[index] != 0:
            coeffs[(0,) * nvars] = base[index]
        if order >= 1:
            coeffs[tuple(1 if j == index else 0 for j in range(nvars))] = 1
        return cls(nvars, order, base, coeffs)

    def like_constant(self, value) -> "JetPoly":
        return JetPoly.constant(value, self.nvars, self.order, self.base)

    # ------------------------------------------------------------------
    # inspection
    # ------------------------------------------------------------------

    @property
    def value(self):
        """Order-0 coefficient (the function value at the base point)."""
        return self.coeffs.get((0,) * self.nvars, 0)

    def coefficient(self, alpha: MultiIndex):
        return self.coeffs.get(tuple(alpha), 0)

    def partial(self, alpha: MultiIndex):
        """Raw partial derivative d^alpha f = Taylor coefficient * alpha!."""
        return self.coefficient(alpha) * _multi_factorial(tuple(alpha))

    def partials(self) -> Dict[MultiIndex, object]:
        """Full table of raw partial derivatives, dense over |alpha| <= order."""
        return {a: self.coefficient(a) * _multi_factorial(a) for a in taylor_indices(self.nvars, self.order)}

    def gradient(self) -> list:
        e = [0] * self.nvars
        out = []
        for i in range(self.nvars):
            e[i] = 1
            out.append(self.coefficient(tuple(e)))
            e[i] = 0
        return out

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        items = ", ".join(f"{a}: {c}" for a, c in sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0])))
        return f"JetPoly(m={self.nvars}, k={self.order}, base={self.base}, {{{items}}})"

    # ------------------------------------------------------------------
    # shape plumbing
    # ------------------------------------------------------------------

    def _check_shape(self, other: "JetPoly") -> None:
        if self.nvars != other.nvars or self.order != other.order or self.base != other.base:
            raise JetShapeError(
                f"jet shape mismatch: ({self.nvars},{self.order},{self.base}) vs "
                f"({other.nvars},{other.order},{other.base})"
            )

    def truncated(self, order: int) -> "JetPoly":
        if order > self.order:
            raise JetShapeError(f"cannot extend a jet of order {self.order} to order {order}")
        if order == self.order:
            return self
        coeffs = {a: c for a, c in self.coeffs.items() if sum(a) <= order}
        return JetPoly(self.nvars, order, self.base, coeffs)

    def derivative(self, index: int) -> "JetPoly":
        """Partial derivative jet; drops the truncation order by one."""
        if self.order < 1:
            raise JetShapeError("cannot differentiate an order-0 jet")
        coeffs: Dict[MultiIndex, object] = {}
        for alpha, c in self.coeffs.items():
            if alpha[index] >= 1:
                beta = list(alpha)
                beta[index] -= 1
                if sum(beta) <= self.order - 1:
                    coeffs[tuple(beta)] = c * alpha[index]
        return JetPoly(self.nvars, self.order - 1, self.base, coeffs)

    # ------------------------------------------------------------------
    # ring operations
    # ------------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, JetPoly):
            self._check_shape(other)
            coeffs = dict(self.coeffs)
            for a, c in other.coeffs.items():
                s = coeffs.get(a, 0) + c
                if s == 0 and not isinstance(s, float):
                    coeffs.pop(a, None)
                else:
                    coeffs[a] = s
            return JetPoly(self.nvars, self.order, self.base, coeffs)
        return self + self.like_constant(other)

    __radd__ = __add__

    def __neg__(self):
        return JetPoly(self.nvars, self.order, self.base, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, JetPoly):
            return self + (-other)
        return self + self.like_constant(-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, JetPoly):
            self._check_shape(other)
            order = self.order
            coeffs: Dict[MultiIndex, object] = {}
            for a1, c1 in self.coeffs.items():
                d1 = sum(a1)
                for a2, c2 in other.coeffs.items():
                    if d1 + sum(a2) > order:
                        continue
                    key = tuple(x + y for x, y in zip(a1, a2))
                    coeffs[key] = coeffs.get(key, 0) + c1 * c2
            for a in [a for a, c in coeffs.items() if c == 0 and not isinstance(c, float)]:
                del coeffs[a]
            return JetPoly(self.nvars, order, self.base, coeffs)
        if other == 0:
            return self.like_constant(0)
        return JetPoly(self.nvars, self.order, self.base, {a: c * other for a, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, JetPoly):
            self._check_shape(other)
            return _divide(self, other)
        return self * _reciprocal_scalar(other)

    def __rtruediv__(self, other):
        return _divide(self.like_constant(other), self)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("jet ** exponent must be an int; use jet_pow for general exponents")
        if n == 0:
            return self.like_constant(1)
        if n < 0:
            return 1 / (self ** (-n))
        result = self
        for _ in range(n - 1):
            result = result * self
        return result


def _reciprocal_scalar(x):
    if isinstance(x, (int, Fraction)):
        if x == 0:
            raise ZeroDivisionError("division by zero scalar")
        return Fraction(1, 1) / x
    return 1.0 / x


def _divide(num: JetPoly, den: JetPoly) -> JetPoly:
    """Graded long division; requires a nonzero constant term in ``den``."""
    b0 = den.value
    if b0 == 0:
        raise JetDomainError("division by a jet with zero constant term")
    coeffs: Dict[MultiIndex, object] = {}
    den_rest = [(a, c) for a, c in den.coeffs.items() if sum(a) > 0]
    for alpha in taylor_indices(num.nvars, num.order):
        acc = num.coefficient(alpha)
        for beta, cb in den_rest:
            gamma = tuple(x - y for x, y in zip(alpha, beta))
            if min(gamma) < 0:
                continue
            cg = coeffs.get(gamma)
            if cg is not None:
                acc = acc - cb * cg
        if acc == 0 and not isinstance(acc, float):
            continue
        if isinstance(acc, (int, Fraction)) and isinstance(b0, (int, Fraction)):
            coeffs[alpha] = Fraction(acc) / b0 if not isinstance(acc, Fraction) else acc / b0
        else:
            coeffs[alpha] = acc / b0
    return JetPoly(num.nvars, num.order, num.base, coeffs)


# ----------------------------------------------------------------------
# univariate composition: f(jet) from the Taylor series of f at jet.value
# ----------------------------------------------------------------------


def substitute_series(series: Sequence, delta: JetPoly) -> JetPoly:
    """Evaluate sum_i series[i] * delta**i by Horner; delta has zero constant term."""
    result = delta.like_constant(series[-1])
    for s in reversed(series[:-1]):
        result = result * delta + s
    return result


def _delta(jet: JetPoly) -> JetPoly:
    coeffs = {a: c for a, c in jet.coeffs.items() if sum(a) > 0}
    return JetPoly(jet.nvars, jet.order, jet.base, coeffs)


def _compose(jet: JetPoly, series: Sequence) -> JetPoly:
    return substitute_series(series, _delta(jet))


def jet_exp(jet: JetPoly) -> JetPoly:
    k = jet.order
    e = math.exp(float(jet.value))
    series = [e]
    for i in range(1, k + 1):
        series.append(series[-1] / i)
    return _compose(jet, series)


def jet_ln(jet: JetPoly) -> JetPoly:
    c0 = jet.value
    if c0 <= 0:
        raise JetDomainError(f"ln of non-positive value {c0}")
    k = jet.order
    series: List[object] = [math.log(float(c0))]
    # higher coefficients are rational in c0; keeping them exact lets the
    # exact-rational mode survive a single log (only the value goes float)
    exact = isinstance(c0, (int, Fraction))
    p = Fraction(c0) if exact else float(c0)
    for i in range(1, k + 1):
        coeff = (Fraction((-1) ** (i + 1), i) / p**i) if exact else ((-1) ** (i + 1) / (i * p**i))
        series.append(coeff)
    return _compose(jet, series)


def jet_sin(jet: JetPoly) -> JetPoly:
    x = float(jet.value)
    cycle = [math.sin(x), math.cos(x), -math.sin(x), -math.cos(x)]
    series = []
    fact = 1.0
    for i in range(jet.order + 1):
        if i > 0:
            fact *= i
        series.append(cycle[i % 4] / fact)
    return _compose(jet, series)


def jet_cos(jet: JetPoly) -> JetPoly:
    x = float(jet.value)
    cycle = [math.cos(x), -math.sin(x), -math.cos(x), math.sin(x)]
    series = []
    fact = 1.0
    for i in range(jet.order + 1):
        if i > 0:
            fact *= i
        series.append(cycle[i % 4] / fact)
    return _compose(jet, series)


def jet_tan(jet: JetPoly) -> JetPoly:
    c = math.cos(float(jet.value))
    if c == 0.0:
        raise JetDomainError("tan at a pole")
    return jet_sin(jet) / jet_cos(jet)


def jet_sqrt(jet: JetPoly) -> JetPoly:
    c0 = jet.value
    if c0 <= 0:
        raise JetDomainError(f"sqrt of non-positive value {c0}")
    return jet_pow(jet, Fraction(1, 2))


def jet_sign(jet: JetPoly) -> JetPoly:
    c0 = jet.value
    if c0 == 0:
        raise JetDomainError("sign of a jet with zero constant term")
    return jet.like_constant(1 if c0 > 0 else -1)


def jet_abs(jet: JetPoly) -> JetPoly:
    c0 = jet.value
    if c0 == 0:
        raise JetDomainError("abs of a jet with zero constant term")
    return jet if c0 > 0 else -jet


def jet_pow(jet: JetPoly, exponent) -> JetPoly:
    """jet ** exponent for integer or real exponents.

    Integer exponents are exact (repeated multiplication / reciprocal);
    general exponents use the binomial series and require a positive base.
    """
    if isinstance(exponent, Fraction) and exponent.denominator == 1:
        exponent = int(exponent)
    if isinstance(exponent, float) and exponent.is_integer():
        exponent = int(exponent)
    if isinstance(exponent, int):
        if exponent < 0 and jet.value == 0:
            raise JetDomainError("negative power of a jet with zero constant term")
        return jet**exponent
    c0 = jet.value
    if c0 <= 0:
        raise JetDomainError(f"non-integer power of non-positive value {c0}")
    r = float(exponent)
    c0f = float(c0)
    series = []
    binom = 1.0
    for i in range(jet.order + 1):
        if i > 0:
            binom *= (r - (i - 1)) / i
        series.append(binom * c0f ** (r - i))
    return _compose(jet, series)


UNARY_FUNCTIONS = {
    "exp": jet_exp,
    "ln": jet_ln,
    "sin": jet_sin,
    "cos": jet_cos,
    "tan": jet_tan,
    "abs": jet_abs,
    "sign": jet_sign,
    "sqrt": jet_sqrt,
}


# ----------------------------------------------------------------------
# univariate helpers (used by the jet actions on function germs)
# ----------------------------------------------------------------------


def jet_from_derivatives(derivs: Sequence, base) -> JetPoly:
    """Univariate jet from raw derivative values f(c), f'(c), ..."""
    coeffs: Dict[MultiIndex, object] = {}
    fact = 1
    for k, d in enumerate(derivs):
        if k > 0:
            fact *= k
        if d == 0 and not isinstance(d, float):
            continue
        if isinstance(d, (int, Fraction)):
            coeffs[(k,)] = Fraction(d, fact) if not isinstance(d, Fraction) else d / fact
        else:
            coeffs[(k,)] = d / fact
    return JetPoly(1, len(derivs) - 1, (base,), coeffs)


def derivatives_from_jet(jet: JetPoly) -> list:
    """Raw derivative list f(c), f'(c), ... of a univariate jet."""
    if jet.nvars != 1:
        raise JetShapeError("derivatives_from_jet expects a univariate jet")
    out = []
    fact = 1
    for k in range(jet.order + 1):
        if k > 0:
            fact *= k
        out.append(jet.coefficient((k,)) * fact)
    return out


def compose_univariate(outer: JetPoly, inner: JetPoly) -> JetPoly:
    """Jet of ``outer o inner`` where inner's value equals outer's base point.

    ``outer`` is univariate; ``inner`` may live in any jet space.
    """
    if outer.nvars != 1:
        raise JetShapeError("outer jet must be univariate")
    if inner.value != outer.base[0]:
        raise JetShapeError("inner jet value must equal the outer jet's base point")
    series = [outer.coefficient((k,)) for k in range(outer.order + 1)]
    return _compose(inner, series)


def inverse_univariate(jet: JetPoly) -> JetPoly:
    """Jet of the inverse function at the transformed base point.

    For y = f(x) with f'(x0) != 0, returns the jet of f^{-1} at y0 = f(x0)
    (so its value is x0).  Computed by fixed-point iteration on the truncated
    composition identity f(f^{-1}(y)) = y.
    """
    if jet.nvars != 1:
        raise JetShapeError("inverse_univariate expects a univariate jet")
    s1 = jet.coefficient((1,))
    if s1 == 0:
        raise JetDomainError("cannot invert a jet with vanishing first derivative")
    k = jet.order
    y0 = jet.value
    x0 = jet.base[0]
    series = [jet.coefficient((i,)) for i in range(k + 1)]  # f around x0
    dy = JetPoly.variable(0, 1, k, (y0,)) - y0  # y - y0 as a jet in y
    # p = (f^{-1}(y) - x0); iterate p <- (dy - sum_{i>=2} s_i p^i) / s1
    p = dy / s1
    for _ in range(k):
        tail = dy.like_constant(0)
        q = p * p
        for i in range(2, k + 1):
            if series[i] != 0:
                tail = tail + series[i] * q
            if i < k:
                q = q * p
        p = (dy - tail) / s1
    return p + x0
