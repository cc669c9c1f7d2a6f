"""Differential invariants on jets, the three group actions, signature curves
and the local-equivalence decider.

The three normal forms are classified by jets of their defining functions:

* one function of one variable (dimension >= 4), acted on by a 6-parameter
  group (affine source, fractional-linear target, a discrete flip);
* a pair of functions of one variable (3D, holonomy 2), acted on by a
  4-parameter affine group;
* one function of two variables (3D, holonomy 1), acted on by an
  infinite-dimensional pseudogroup.

All invariants are rational in the jet entries, so exact (Fraction) inputs
produce exact values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Tuple, Union

from . import exprlang
from .jets import (
    JetDomainError,
    JetPoly,
    compose_univariate,
    derivatives_from_jet,
    inverse_univariate,
    jet_from_derivatives,
    jet_ln,
)


class SingularStratumError(ValueError):
    """The jet sits on a singular stratum where the invariants are undefined."""


class MobiusPoleError(ValueError):
    pass


def _sq(x):
    return x * x


def _exactify(values):
    """Promote ints to Fractions so rational formulas stay exact on int jets."""
    return tuple(Fraction(v) if isinstance(v, int) else v for v in values)


# ----------------------------------------------------------------------
# jets of one function of one variable
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class PsiJet:
    """Raw derivatives (value, first, second, ...) of the defining function at base."""

    base: object
    derivs: Tuple[object, ...]

    def __post_init__(self):
        if len(self.derivs) < 2:
            raise ValueError("need at least a 1-jet")
        if not self.derivs[1] > 0:
            raise ValueError(f"the defining function must have positive derivative (got {self.derivs[1]})")

    @property
    def order(self) -> int:
        return len(self.derivs) - 1

    def require(self, order: int) -> None:
        if self.order < order:
            raise ValueError(f"need a jet of order >= {order}, got {self.order}")


def psi_jet_from_expr(psi: Union[str, exprlang.Expr], t, order: int = 6) -> PsiJet:
    env = {"t": JetPoly.variable(0, 1, order, (t,))}
    jet = exprlang.eval_jet(psi, env)
    return PsiJet(base=t, derivs=tuple(derivatives_from_jet(jet)))


class PsiInvariants(NamedTuple):
    I: object
    J: object
    sign_disc: int


_SINGULAR_CUT = Fraction(1, 10**10)


def _discriminant(p: Sequence):
    return 2 * p[1] * p[3] - 3 * _sq(p[2])


def _disc_scale(p: Sequence) -> float:
    return max(abs(float(p[1] * p[3])), float(_sq(p[2])), 1e-300)


def _psi_pair(p: Sequence):
    """The two generating rational invariants, evaluated on anything with
    field arithmetic (numbers or jets)."""
    disc = _discriminant(p)
    num_first = p[1] * p[1] * p[4] - 4 * p[1] * p[2] * p[3] + 3 * p[2] ** 3
    first = _sq(num_first) / disc**3
    second = p[1] * (p[1] * p[1] * p[5] - 5 * p[1] * p[2] * p[4] + 5 * _sq(p[2]) * p[3]) / _sq(disc)
    return first, second, disc


def psi_invariants(jet: PsiJet) -> PsiInvariants:
    """Generating invariant pair (I, J) plus the sign of the discriminant
    2 psi1 psi3 - 3 psi2^2; raises SingularStratumError on the D = 0 stratum."""
    jet.require(5)
    p = _exactify(jet.derivs)
    disc = _discriminant(p)
    if abs(float(disc)) <= 1e-10 * _disc_scale(p):
        raise SingularStratumError("discriminant 2 psi1 psi3 - 3 psi2^2 vanishes (homogeneous stratum)")
    first, second, disc = _psi_pair(p)
    return PsiInvariants(first, second, 1 if disc > 0 else -1)


def derived_invariant(jet: PsiJet) -> object:
    """dJ/dI along the jet: D_t(J) / D_t(I) through order-6 entries.

    Singular when D_t(I) vanishes (constant first invariant, cohomogeneity <= 1).
    """
    jet.require(6)
    p = _exactify(jet.derivs)
    disc = _discriminant(p)
    if abs(float(disc)) <= 1e-10 * _disc_scale(p):
        raise SingularStratumError("discriminant vanishes (homogeneous stratum)")
    lifted = [
        JetPoly(1, 1, (jet.base,), {(0,): p[k], (1,): p[k + 1]}) for k in range(jet.order)
    ]
    first, second, _ = _psi_pair(lifted)
    dI = first.coefficient((1,))
    dJ = second.coefficient((1,))
    scale = max(abs(float(first.value)), abs(float(second.value)), 1.0)
    if abs(float(dI)) <= 1e-10 * scale:
        raise SingularStratumError("first invariant is constant along the jet (cohomogeneity <= 1 stratum)")
    return dJ / dI


# ----------------------------------------------------------------------
# the 6-parameter action on one-variable jets
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class GroupElemD4:
    """Affine source (s1, s2), unimodular fractional-linear target (a, b, c, d),
    and flip epsilon in {+1, -1}.  Applied as: source map, then target map,
    then flip."""

    s1: float = 0.0
    s2: float = 0.0
    a: float = 1.0
    b: float = 0.0
    c: float = 0.0
    d: float = 1.0
    eps: int = 1

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not det > 0:
            raise ValueError("fractional-linear part needs positive determinant")
        if self.eps not in (1, -1):
            raise ValueError("eps must be +1 or -1")
        root = math.sqrt(det)
        object.__setattr__(self, "a", self.a / root)
        object.__setattr__(self, "b", self.b / root)
        object.__setattr__(self, "c", self.c / root)
        object.__setattr__(self, "d", self.d / root)


def act_d4(elem: GroupElemD4, jet: PsiJet) -> PsiJet:
    """Transformed jet at the transformed base point."""
    base = jet.base
    derivs = list(jet.derivs)
    # source map: t -> e^{2 s2} t + s1, new function psi(e^{-2 s2}(t - s1))
    if elem.s1 != 0.0 or elem.s2 != 0.0:
        lam = math.exp(-2.0 * elem.s2)
        base = math.exp(2.0 * elem.s2) * float(base) + elem.s1
        derivs = [d * lam**k for k, d in enumerate(derivs)]
    # target map: psi -> (a psi + b) / (c psi + d)
    if (elem.a, elem.b, elem.c, elem.d) != (1.0, 0.0, 0.0, 1.0):
        denom0 = elem.c * float(derivs[0]) + elem.d
        if abs(denom0) < 1e-12:
            raise MobiusPoleError(f"target map has a pole at the jet value {derivs[0]}")
        j = jet_from_derivatives(derivs, 0)
        out = (elem.a * j + elem.b) / (elem.c * j + elem.d)
        derivs = derivatives_from_jet(out)
    # flip: (t, psi) -> (-t, -psi(-t))
    if elem.eps == -1:
        base = -base
        derivs = [d if k % 2 == 1 else -d for k, d in enumerate(derivs)]
    return PsiJet(base=base, derivs=tuple(derivs))


def random_d4_element(rng, jet_value: float) -> GroupElemD4:
    """Seeded random element whose target map avoids the pole at jet_value."""
    for _ in range(100):
        a = rng.uniform(-2, 2)
        b = rng.uniform(-2, 2)
        c = rng.uniform(-2, 2)
        d = rng.uniform(-2, 2)
        if a * d - b * c < 0.1:
            continue
        det = math.sqrt(a * d - b * c)
        if abs((c * jet_value + d) / det) < 0.2:
            continue
        return GroupElemD4(
            s1=rng.uniform(-1, 1),
            s2=rng.uniform(-0.5, 0.5),
            a=a,
            b=b,
            c=c,
            d=d,
            eps=rng.choice([1, -1]),
        )
    raise RuntimeError("could not draw a pole-free group element")


# ----------------------------------------------------------------------
# pairs of one-variable jets (3D, holonomy 2)
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class PairJet:
    """Jets of the pair (a(u), c(u)) at a common base point."""

    base: object
    a: Tuple[object, ...]
    c: Tuple[object, ...]

    def __post_init__(self):
        if len(self.a) < 3 or len(self.c) < 3:
            raise ValueError("need at least 2-jets of both functions")

    @property
    def order(self) -> int:
        return min(len(self.a), len(self.c)) - 1


def pair_jet_from_exprs(a, c, u, order: int = 2) -> PairJet:
    env = {"u": JetPoly.variable(0, 1, order, (u,))}
    aj = exprlang.eval_jet(a, env)
    cj = exprlang.eval_jet(c, env)
    return PairJet(base=u, a=tuple(derivatives_from_jet(aj)), c=tuple(derivatives_from_jet(cj)))


class PairInvariants(NamedTuple):
    I: object
    J: object
    K: object


def pair_invariants(jet: PairJet) -> PairInvariants:
    """Generating invariants of the pair action; the bare factors are read at
    order zero (a0^4, a0^5), which the scaling-invariance test pins down."""
    a, c = _exactify(jet.a), _exactify(jet.c)
    scale = max(abs(float(a[0])), abs(float(a[1])), 1e-300)
    if abs(float(a[1])) <= 1e-10 * scale:
        raise SingularStratumError("a'(u) vanishes (extra-symmetry stratum)")
    first = (a[0] * c[1] - c[0] * a[1]) * a[0] ** 4 / a[1] ** 4
    second = a[0] * a[2] / _sq(a[1])
    third = (a[0] * c[2] - c[0] * a[2]) * a[0] ** 5 / a[1] ** 5
    return PairInvariants(first, second, third)


@dataclass(frozen=True)
class GroupElem3D2:
    """(A1, A2) translations and (A3, A4) scalings acting on the pair."""

    A1: float = 0.0
    A2: float = 0.0
    A3: float = 1.0
    A4: float = 1.0

    def __post_init__(self):
        if self.A3 == 0 or self.A4 == 0:
            raise ValueError("A3 and A4 must be nonzero")


def act_3d2(elem: GroupElem3D2, jet: PairJet) -> PairJet:
    """Pushforward of the pair jet; the base moves to A3 A4 u + A1."""
    s = elem.A3 * elem.A4
    mu_a = 1 / (elem.A3 * _sq(elem.A4))
    mu_c = 1 / (_sq(elem.A3) * elem.A4)
    base = s * jet.base + elem.A1
    a = tuple(ak * mu_a / s**k for k, ak in enumerate(jet.a))
    c = tuple(
        (ck * mu_c - elem.A2 * ak * mu_a) / s**k for k, (ak, ck) in enumerate(zip(jet.a, jet.c))
    )
    return PairJet(base=base, a=a, c=c)


def random_3d2_element(rng) -> GroupElem3D2:
    sign3 = rng.choice([1, -1])
    sign4 = rng.choice([1, -1])
    return GroupElem3D2(
        A1=rng.uniform(-1, 1),
        A2=rng.uniform(-1, 1),
        A3=sign3 * rng.uniform(0.5, 2.0),
        A4=sign4 * rng.uniform(0.5, 2.0),
    )


# ----------------------------------------------------------------------
# jets of one function of two variables (3D, holonomy 1)
# ----------------------------------------------------------------------
# variable order inside the 2-variable jets: (x, u)

_X, _U = 0, 1


def f_jet_from_expr(F, x, u, order: int = 4) -> JetPoly:
    env = {
        "x": JetPoly.variable(_X, 2, order, (x, u)),
        "u": JetPoly.variable(_U, 2, order, (x, u)),
    }
    return exprlang.eval_jet(F, env)


class SurfaceInvariants(NamedTuple):
    I: object
    J: object


def _fpart(jet: JetPoly, i: int, j: int):
    """Raw partial d_x^i d_u^j F."""
    return jet.partial((i, j))


def surface_invariants(jet: JetPoly) -> SurfaceInvariants:
    """Generating invariants of the two-variable family (order >= 4 jet)."""
    if jet.nvars != 2 or jet.order < 4:
        raise ValueError("need an order >= 4 jet in (x, u)")
    fu, fx = _fpart(jet, 0, 1), _fpart(jet, 1, 0)
    fux = _fpart(jet, 1, 1)
    fuux, fuxx = _fpart(jet, 1, 2), _fpart(jet, 2, 1)
    fuuxx = _fpart(jet, 2, 2)
    scale = max(abs(float(fu)), abs(float(fx)), abs(float(fux)), 1e-300)
    if abs(float(fux)) <= 1e-10 * scale:
        raise SingularStratumError("mixed derivative F_ux vanishes")
    first = (-2 * fu * fux + fuux) * (fx * fux + fuxx) / fux**3
    second = (-2 * fu * fx * fux - 2 * fu * fuxx + fx * fuux + fuuxx) / _sq(fux)
    return SurfaceInvariants(first, second)


def surface_derived_pair(jet: JetPoly) -> Tuple[object, object]:
    """The derived invariants (nabla_1 I, nabla_2 I) from an order >= 4 jet.

    nabla_1 = ((F_uxx + F_x F_ux)/F_ux^2) D_u,  nabla_2 = ((F_uux - 2 F_u F_ux)/F_ux^2) D_x.
    """
    if jet.nvars != 2 or jet.order < 4:
        raise ValueError("need an order >= 4 jet in (x, u)")
    fu, fx = _fpart(jet, 0, 1), _fpart(jet, 1, 0)
    fux = _fpart(jet, 1, 1)
    fuux, fuxx = _fpart(jet, 1, 2), _fpart(jet, 2, 1)
    scale = max(abs(float(fu)), abs(float(fx)), abs(float(fux)), 1e-300)
    if abs(float(fux)) <= 1e-10 * scale:
        raise SingularStratumError("mixed derivative F_ux vanishes")
    out = []
    for direction in (_U, _X):
        lift = {}
        for (i, j) in [(0, 1), (1, 0), (1, 1), (1, 2), (2, 1)]:
            shifted = (i, j + 1) if direction == _U else (i + 1, j)
            lift[(i, j)] = JetPoly(
                1, 1, (0.0,), {(0,): jet.partial((i, j)), (1,): jet.partial(shifted)}
            )
        p = {
            "fu": lift[(0, 1)],
            "fx": lift[(1, 0)],
            "fux": lift[(1, 1)],
            "fuux": lift[(1, 2)],
            "fuxx": lift[(2, 1)],
        }
        first = (-2 * p["fu"] * p["fux"] + p["fuux"]) * (p["fx"] * p["fux"] + p["fuxx"]) / p["fux"] ** 3
        out.append(first.coefficient((1,)))
    dI_du, dI_dx = out
    nabla1 = (fuxx + fx * fux) / _sq(fux) * dI_du
    nabla2 = (fuux - 2 * fu * fux) / _sq(fux) * dI_dx
    return nabla1, nabla2


@dataclass(frozen=True)
class PseudoElem3D1:
    """A pseudogroup element: jets of the two reparametrizations plus the
    fiber scaling constant.  alpha, beta are raw derivative tuples at the
    source base point; alpha'(x) != 0, beta'(u) != 0 and c1 beta'(u) > 0."""

    alpha: Tuple[float, ...]
    beta: Tuple[float, ...]
    c1: float = 1.0

    def __post_init__(self):
        if len(self.alpha) < 2 or len(self.beta) < 2:
            raise ValueError("need at least 1-jets of the reparametrizations")
        if self.alpha[1] == 0 or self.beta[1] == 0:
            raise ValueError("reparametrizations must have nonzero derivative")
        if not self.c1 * self.beta[1] > 0:
            raise ValueError("need c1 * beta'(u) > 0")


def act_3d1(elem: PseudoElem3D1, jet: JetPoly) -> JetPoly:
    """Pushforward of the two-variable jet under
    (x, u, F) -> (alpha(x), beta(u), F o (alpha^-1, beta^-1) - ln(c1 beta' / alpha'^2) / 2)."""
    if jet.nvars != 2:
        raise ValueError("expected a jet in (x, u)")
    order = jet.order
    if len(elem.alpha) < order + 1 or len(elem.beta) < order + 1:
        raise ValueError(f"reparametrization jets must have order >= {order}")
    x0, u0 = jet.base
    alpha = jet_from_derivatives(elem.alpha[: order + 1], x0)
    beta = jet_from_derivatives(elem.beta[: order + 1], u0)
    new_base = (float(alpha.value), float(beta.value))

    alpha_inv = inverse_univariate(alpha)  # jet in x~ at alpha(x0), value x0
    beta_inv = inverse_univariate(beta)

    # embed the inverse reparametrizations into the 2-variable target jet space
    def embed(uni: JetPoly, slot: int) -> JetPoly:
        coeffs = {}
        for (k,), cval in uni.coeffs.items():
            key = (k, 0) if slot == _X else (0, k)
            coeffs[key] = cval
        return JetPoly(2, order, new_base, coeffs)

    A = embed(alpha_inv, _X)  # value x0
    B = embed(beta_inv, _U)  # value u0

    # F's Taylor polynomial evaluated at (A, B)
    dA = A - x0
    dB = B - u0
    powA = [dA.like_constant(1)]
    powB = [dB.like_constant(1)]
    for _ in range(order):
        powA.append(powA[-1] * dA)
        powB.append(powB[-1] * dB)
    acc = dA.like_constant(0)
    for (i, j), cval in jet.coeffs.items():
        acc = acc + cval * (powA[i] * powB[j])

    # correction: -(1/2) ln(c1 beta'(beta^-1)) + (1/2) ln(alpha'(alpha^-1)^2)
    beta_prime = compose_univariate(_derivative_jet(elem.beta, u0, order), embed(beta_inv.truncated(order), _U))
    alpha_prime = compose_univariate(_derivative_jet(elem.alpha, x0, order), embed(alpha_inv.truncated(order), _X))
    acc = acc - jet_ln(elem.c1 * beta_prime) / 2 + jet_ln(alpha_prime * alpha_prime) / 2
    return acc


def _derivative_jet(derivs: Sequence[float], base, order: int) -> JetPoly:
    """Order-``order`` jet of the derivative of a reparametrization.

    When the reparametrization jet stops at order + 1, its top derivative is
    completed by zero: the action computed is then exactly that of the
    polynomial representative with the given derivatives.
    """
    vals = list(derivs[1 : order + 2])
    while len(vals) < order + 1:
        vals.append(0)
    return jet_from_derivatives(vals, base)


def random_3d1_element(rng, order: int = 5) -> PseudoElem3D1:
    a1 = rng.choice([1, -1]) * rng.uniform(0.6, 1.8)
    b1 = rng.choice([1, -1]) * rng.uniform(0.6, 1.8)
    alpha = (rng.uniform(-1, 1), a1) + tuple(rng.uniform(-0.3, 0.3) for _ in range(order - 1))
    beta = (rng.uniform(-1, 1), b1) + tuple(rng.uniform(-0.3, 0.3) for _ in range(order - 1))
    c1 = math.copysign(rng.uniform(0.5, 2.0), b1)
    return PseudoElem3D1(alpha=alpha, beta=beta, c1=c1)


# ----------------------------------------------------------------------
# signature curves and the equivalence decider
# ----------------------------------------------------------------------

PSI_CURVE = "psi"
PAIR_CURVE = "pair"
SURFACE_CURVE = "surface"

DEGENERACY_TOL = 1e-6


@dataclass(frozen=True)
class SignatureCurve:
    kind: str
    params: Tuple  # parameter samples (numbers, or (x, u) pairs)
    tuples: Tuple[Tuple[float, ...], ...]
    signs: Tuple[int, ...]  # discriminant signs (psi kind only)
    n_singular: int

    @property
    def diameter(self) -> float:
        if len(self.tuples) < 2:
            return 0.0
        out = 0.0
        dims = len(self.tuples[0])
        for k in range(dims):
            vals = [t[k] for t in self.tuples]
            out = max(out, max(vals) - min(vals))
        return out

    @property
    def scale(self) -> float:
        if not self.tuples:
            return 1.0
        return max(1.0, max(abs(v) for t in self.tuples for v in t))

    @property
    def degenerate(self) -> bool:
        """Point curve: all sampled tuples coincide up to tolerance (or all
        samples were singular)."""
        if not self.tuples:
            return True
        return self.diameter <= DEGENERACY_TOL * self.scale


def _finite(*values) -> bool:
    return all(math.isfinite(v) for v in values)


def psi_signature_curve(psi, lo: float, hi: float, samples: int = 64) -> SignatureCurve:
    params, tuples, signs, singular = [], [], [], 0
    for k in range(samples):
        t = lo + (hi - lo) * k / (samples - 1) if samples > 1 else lo
        try:
            jet = psi_jet_from_expr(psi, t, order=5)
            inv = psi_invariants(jet)
        except (SingularStratumError, exprlang.ExprDomainError):
            singular += 1
            continue
        pair = (float(inv.I), float(inv.J))
        if not _finite(*pair):
            singular += 1
            continue
        params.append(t)
        tuples.append(pair)
        signs.append(inv.sign_disc)
    return SignatureCurve(PSI_CURVE, tuple(params), tuple(tuples), tuple(signs), singular)


def pair_signature_curve(a, c, lo: float, hi: float, samples: int = 64) -> SignatureCurve:
    params, tuples, singular = [], [], 0
    for k in range(samples):
        u = lo + (hi - lo) * k / (samples - 1) if samples > 1 else lo
        try:
            jet = pair_jet_from_exprs(a, c, u, order=2)
            inv = pair_invariants(jet)
        except (SingularStratumError, exprlang.ExprDomainError):
            singular += 1
            continue
        tup = (float(inv.I), float(inv.J), float(inv.K))
        if not _finite(*tup):
            singular += 1
            continue
        params.append(u)
        tuples.append(tup)
    return SignatureCurve(PAIR_CURVE, tuple(params), tuple(tuples), (), singular)


def surface_signature_curve(
    F, x_range: Tuple[float, float], u_range: Tuple[float, float], nx: int = 8, nu: int = 8
) -> SignatureCurve:
    params, tuples, singular = [], [], 0
    for i in range(nx):
        x = x_range[0] + (x_range[1] - x_range[0]) * i / max(nx - 1, 1)
        for j in range(nu):
            u = u_range[0] + (u_range[1] - u_range[0]) * j / max(nu - 1, 1)
            try:
                jet = f_jet_from_expr(F, x, u, order=4)
                inv = surface_invariants(jet)
                d1, d2 = surface_derived_pair(jet)
            except (SingularStratumError, exprlang.ExprDomainError):
                singular += 1
                continue
            tup = (float(inv.I), float(inv.J), float(d1), float(d2))
            if not _finite(*tup):
                singular += 1
                continue
            params.append((x, u))
            tuples.append(tup)
    return SignatureCurve(SURFACE_CURVE, tuple(params), tuple(tuples), (), singular)


@dataclass(frozen=True)
class EquivalenceVerdict:
    verdict: str  # "Equivalent" | "Distinct" | "Degenerate"
    hausdorff: Optional[float]
    signs: Tuple[Tuple[int, ...], Tuple[int, ...]]
    reason: str


def _hausdorff(A: Sequence[Tuple[float, ...]], B: Sequence[Tuple[float, ...]]) -> float:
    def one_sided(P, Q):
        worst = 0.0
        for p in P:
            best = min(math.dist(p, q) for q in Q)
            worst = max(worst, best)
        return worst

    return max(one_sided(A, B), one_sided(B, A))


def equivalence_test(c1: SignatureCurve, c2: SignatureCurve, tol: float = 1e-6) -> EquivalenceVerdict:
    """Compare two signature curves as unparametrized subsets of invariant space.

    Degenerate (point) curves are never declared Equivalent here; they carry
    their discriminant signs so the caller can route them to the symmetry
    classifier.
    """
    if c1.kind != c2.kind:
        raise ValueError(f"cannot compare curves of kinds {c1.kind!r} and {c2.kind!r}")
    signs = (tuple(sorted(set(c1.signs))), tuple(sorted(set(c2.signs))))
    if c1.degenerate or c2.degenerate:
        return EquivalenceVerdict(
            "Degenerate", None, signs, "at least one curve is a point curve; classify via symmetry kernels"
        )
    if c1.kind == PSI_CURVE and set(c1.signs).isdisjoint(set(c2.signs)):
        return EquivalenceVerdict("Distinct", None, signs, "discriminant signs differ")
    h = _hausdorff(c1.tuples, c2.tuples)
    diam = max(c1.diameter, c2.diameter)
    rel = h / diam if diam > 0 else h
    if rel <= tol:
        return EquivalenceVerdict("Equivalent", rel, signs, "signature curves coincide")
    return EquivalenceVerdict("Distinct", rel, signs, f"normalized Hausdorff distance {rel:.3e} exceeds {tol:.1e}")
