"""Symmetry detection by linear algebra on the symmetry ODE systems, the
cohomogeneity trichotomy, and normal-form identification.

A linear combination of the five extra coordinate-form-preserving fields is a
symmetry of the one-function family exactly when its coefficient vector lies
in the kernel of a sampled linear system; the kernel dimension gives the
cohomogeneity and the kernel vector pins down the normal form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import exprlang
from .exprlang import Expr
from .invariants import (
    SingularStratumError,
    pair_invariants,
    pair_jet_from_exprs,
    psi_invariants,
    psi_jet_from_expr,
)
from .jets import JetPoly, derivatives_from_jet

KERNEL_SV_TOL = 1e-9
PATTERN_TOL = 1e-7


@dataclass(frozen=True)
class SymmetryKernel:
    samples: Tuple[float, ...]
    rows: np.ndarray
    dim: int
    basis: np.ndarray  # shape (dim, n_unknowns), unit rows
    smallest_nonzero_sv: float
    singular_values: np.ndarray


def _kernel_from_rows(rows: np.ndarray, samples: Sequence[float], sv_tol: float = KERNEL_SV_TOL) -> SymmetryKernel:
    n = rows.shape[1]
    _, sv, vt = np.linalg.svd(rows)
    top = float(sv[0]) if sv.size else 0.0
    if top <= 0:
        return SymmetryKernel(tuple(samples), rows, n, np.eye(n), 0.0, sv)
    rank = int(np.sum(sv > sv_tol * top))
    dim = n - rank
    kernel_rows = vt[rank:] if dim > 0 else np.zeros((0, n))
    smallest = float(sv[rank - 1]) if rank > 0 else 0.0
    return SymmetryKernel(tuple(samples), rows, dim, kernel_rows, smallest, sv)


def _default_samples(lo: float, hi: float, count: int, seed: int) -> List[float]:
    # low-discrepancy placement, seedable (same radical-inverse scheme as the catalog)
    from .catalog import _halton

    start = 1 + 911 * (seed + 1)
    return [lo + (hi - lo) * _halton(start + k, 2) for k in range(count)]


def psi_symmetry_kernel(
    psi: Union[str, Expr],
    ts: Optional[Sequence[float]] = None,
    interval: Tuple[float, float] = (0.6, 1.8),
    n_samples: int = 16,
    seed: int = 0,
) -> SymmetryKernel:
    """Kernel of the sampled symmetry system for the one-function family.

    A combination (a1..a5) of the five extra fields is a symmetry iff
    (a1 + 2 t a2) psi' + a5 psi^2 - 2 a4 psi + a3 = 0; each sample point
    contributes the row [psi', 2 t psi', 1, -2 psi, psi^2].
    """
    if ts is None:
        ts = _default_samples(interval[0], interval[1], n_samples, seed)
    if len(ts) < 8:
        raise ValueError("need at least 8 sample points for a stable rank decision")
    psi_e = exprlang.as_expr(psi)
    rows = []
    for t in ts:
        jet = exprlang.eval_jet(psi_e, {"t": JetPoly.variable(0, 1, 1, (t,))})
        p0, p1 = derivatives_from_jet(jet)
        rows.append([float(p1), 2.0 * t * float(p1), 1.0, -2.0 * float(p0), float(p0) ** 2])
    return _kernel_from_rows(np.array(rows), ts)


def psi_symmetry_residual(psi: Union[str, Expr], coeffs: Sequence[float], ts: Sequence[float]) -> float:
    """Max relative residual of the symmetry ODE at fresh sample points."""
    psi_e = exprlang.as_expr(psi)
    worst = 0.0
    for t in ts:
        jet = exprlang.eval_jet(psi_e, {"t": JetPoly.variable(0, 1, 1, (t,))})
        p0, p1 = (float(x) for x in derivatives_from_jet(jet))
        row = np.array([p1, 2.0 * t * p1, 1.0, -2.0 * p0, p0 * p0])
        scale = float(np.linalg.norm(row)) * float(np.linalg.norm(coeffs))
        worst = max(worst, abs(float(row @ np.asarray(coeffs))) / max(scale, 1e-300))
    return worst


def kernel_3d2(
    a: Union[str, Expr],
    c: Union[str, Expr],
    us: Optional[Sequence[float]] = None,
    interval: Tuple[float, float] = (0.5, 1.5),
    n_samples: int = 16,
    seed: int = 0,
) -> SymmetryKernel:
    """Kernel of the sampled symmetry system for the 3D pair family.

    Unknowns (A1, A2, A3, A4); each sample point u yields two rows,
        [a', 0, u a' + a,  u a' + 2a]  and  [c', a, u c' + 2c, u c' + c].
    """
    if us is None:
        us = _default_samples(interval[0], interval[1], n_samples, seed)
    a_e, c_e = exprlang.as_expr(a), exprlang.as_expr(c)
    rows = []
    for u in us:
        env = {"u": JetPoly.variable(0, 1, 1, (u,))}
        a0, a1 = (float(x) for x in derivatives_from_jet(exprlang.eval_jet(a_e, env)))
        c0, c1 = (float(x) for x in derivatives_from_jet(exprlang.eval_jet(c_e, env)))
        rows.append([a1, 0.0, u * a1 + a0, u * a1 + 2.0 * a0])
        rows.append([c1, a0, u * c1 + 2.0 * c0, u * c1 + c0])
    return _kernel_from_rows(np.array(rows), us)


def kernel_3d2_residual(a, c, coeffs: Sequence[float], us: Sequence[float]) -> float:
    a_e, c_e = exprlang.as_expr(a), exprlang.as_expr(c)
    worst = 0.0
    v = np.asarray(coeffs)
    for u in us:
        env = {"u": JetPoly.variable(0, 1, 1, (u,))}
        a0, a1 = (float(x) for x in derivatives_from_jet(exprlang.eval_jet(a_e, env)))
        c0, c1 = (float(x) for x in derivatives_from_jet(exprlang.eval_jet(c_e, env)))
        for row in ([a1, 0.0, u * a1 + a0, u * a1 + 2.0 * a0], [c1, a0, u * c1 + 2.0 * c0, u * c1 + c0]):
            row = np.asarray(row)
            scale = float(np.linalg.norm(row)) * float(np.linalg.norm(v))
            worst = max(worst, abs(float(row @ v)) / max(scale, 1e-300))
    return worst


# ----------------------------------------------------------------------
# classification
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ClassificationResult:
    cohomogeneity: int
    kind: str
    parameter: Optional[float]
    kernel: SymmetryKernel
    consistent: bool
    evidence: Dict[str, object] = field(default_factory=dict)


def _psi_kind_from_vector(v: np.ndarray) -> Tuple[str, Optional[float]]:
    """Normal-form kind from a unit kernel vector (a1, a2, a3, a4, a5).

    The translation/scaling split of the source factor is decided by a2; the
    conjugacy class of the target generator by the sign of the quadratic
    discriminant a4^2 - a3 a5 (hyperbolic / parabolic / elliptic).  The
    family parameter for Power/TanLog is the conjugation-invariant ratio
    sqrt(|a4^2 - a3 a5|) / |a2|; for Log it is the direct kernel readout
    -a3 / (2 a2) (Log normal forms keep the parabolic generator at infinity,
    so no conjugation correction applies).
    """
    a1, a2, a3, a4, a5 = (float(x) for x in v)
    disc = a4 * a4 - a3 * a5
    if abs(a2) <= PATTERN_TOL:
        if disc > PATTERN_TOL:
            return "Exp", None
        if disc < -PATTERN_TOL:
            return "Tan", None
        return "Inconsistent", None  # parabolic with a2 = 0 would be the homogeneous case
    if disc > PATTERN_TOL * (a2 * a2):
        return "Power", math.sqrt(disc) / abs(a2)
    if disc < -PATTERN_TOL * (a2 * a2):
        return "TanLog", math.sqrt(-disc) / (2.0 * abs(a2))
    return "Log", -a3 / (2.0 * a2)


def classify_psi(
    psi: Union[str, Expr],
    interval: Tuple[float, float] = (0.6, 1.8),
    n_samples: int = 16,
    seed: int = 0,
) -> ClassificationResult:
    """Cohomogeneity and normal-form kind of a one-function structure.

    Cross-checks the kernel dimension against invariant-constancy evidence;
    a mismatch is reported as kind "Inconsistent", never silently resolved.
    """
    kern = psi_symmetry_kernel(psi, interval=interval, n_samples=n_samples, seed=seed)
    lo, hi = interval
    probe = [lo + (hi - lo) * k / 10 for k in range(11)]
    n_singular = 0
    values = []
    for t in probe:
        try:
            inv = psi_invariants(psi_jet_from_expr(psi, t, order=5))
            values.append((float(inv.I), float(inv.J)))
        except (SingularStratumError, exprlang.ExprDomainError):
            n_singular += 1
    if values:
        scale = max(1.0, max(abs(v) for pair in values for v in pair))
        spread = max(
            max(p[k] for p in values) - min(p[k] for p in values) for k in range(2)
        )
        constant_invariants = spread <= 1e-6 * scale
    else:
        spread = 0.0
        constant_invariants = True
    all_singular = n_singular == len(probe)

    evidence: Dict[str, object] = {
        "invariant_spread": spread,
        "singular_samples": n_singular,
        "kernel_singular_values": kern.singular_values.tolist(),
    }

    cohom = 2 - kern.dim
    if kern.dim == 2:
        kind, parameter = "Homogeneous", None
        consistent = all_singular
    elif kern.dim == 1:
        kind, parameter = _psi_kind_from_vector(kern.basis[0])
        consistent = kind != "Inconsistent" and constant_invariants and not all_singular
    elif kern.dim == 0:
        kind, parameter = "Generic", None
        consistent = not constant_invariants and not all_singular
    else:
        kind, parameter, consistent = "Inconsistent", None, False
    if not consistent:
        # kernel and invariant evidence disagree: report, never answer silently
        evidence["best_guess"] = {"cohomogeneity": cohom, "kind": kind, "parameter": parameter}
        return ClassificationResult(cohom, "Inconsistent", parameter, kern, False, evidence)
    return ClassificationResult(cohom, kind, parameter, kern, True, evidence)


_3D2_KINDS = {0: "Generic3D2", 1: "OneSymmetry3D2", 2: "TwoSymmetry3D2"}


def classify_3d2(
    a: Union[str, Expr],
    c: Union[str, Expr],
    interval: Tuple[float, float] = (0.5, 1.5),
    n_samples: int = 16,
    seed: int = 0,
) -> ClassificationResult:
    """Cohomogeneity (= 3 - kernel dim: the pair family has no automatic
    symmetries) and symmetry count for the 3D holonomy-2 family."""
    kern = kernel_3d2(a, c, interval=interval, n_samples=n_samples, seed=seed)
    lo, hi = interval
    probe = [lo + (hi - lo) * k / 10 for k in range(11)]
    n_singular = 0
    values = []
    for u in probe:
        try:
            inv = pair_invariants(pair_jet_from_exprs(a, c, u, order=2))
            values.append(tuple(float(x) for x in inv))
        except (SingularStratumError, exprlang.ExprDomainError):
            n_singular += 1
    if values:
        scale = max(1.0, max(abs(v) for tup in values for v in tup))
        spread = max(max(p[k] for p in values) - min(p[k] for p in values) for k in range(3))
        constant_invariants = spread <= 1e-6 * scale
    else:
        spread, constant_invariants = 0.0, True
    evidence = {
        "invariant_spread": spread,
        "singular_samples": n_singular,
        "kernel_singular_values": kern.singular_values.tolist(),
    }
    kind = _3D2_KINDS.get(kern.dim, "Inconsistent")
    consistent = (kern.dim == 0) == (not constant_invariants) and kind != "Inconsistent"
    cohom = 3 - kern.dim
    if not consistent:
        return ClassificationResult(cohom, "Inconsistent", None, kern, False, evidence)
    return ClassificationResult(cohom, kind, None, kern, True, evidence)


def symmetry_residual_3d1(
    F: Union[str, Expr],
    A: Union[str, Expr],
    B: Union[str, Expr],
    C0: float,
    C1: float,
    points: Sequence[Tuple[float, float]],
) -> float:
    """Residual of the candidate field A(x) d_x + B(u) d_u + (C0 + C1 v) d_v
    as a symmetry of the two-variable family:

        A F_x + B F_u + (C1 + B'(u))/2 - A'(x) = 0

    at the given (x, u) points.  (The unknowns are functions, so there is no
    finite kernel search here; candidates are user-supplied.)
    """
    F_e, A_e, B_e = exprlang.as_expr(F), exprlang.as_expr(A), exprlang.as_expr(B)
    if set(exprlang.variables_of(A_e)) - {"x"}:
        raise ValueError("A must depend only on x")
    if set(exprlang.variables_of(B_e)) - {"u"}:
        raise ValueError("B must depend only on u")
    worst = 0.0
    for x, u in points:
        env2 = {
            "x": JetPoly.variable(0, 2, 1, (x, u)),
            "u": JetPoly.variable(1, 2, 1, (x, u)),
        }
        Fj = exprlang.eval_jet(F_e, env2)
        fx, fu = (float(v) for v in Fj.gradient())
        envx = {"x": JetPoly.variable(0, 1, 1, (x,))}
        envu = {"u": JetPoly.variable(0, 1, 1, (u,))}
        Aj = exprlang.eval_jet(A_e, envx)
        Bj = exprlang.eval_jet(B_e, envu)
        A0, A1 = (float(v) for v in derivatives_from_jet(Aj))
        B0, B1 = (float(v) for v in derivatives_from_jet(Bj))
        resid = A0 * fx + B0 * fu + (C1 + B1) / 2.0 - A1
        worst = max(worst, abs(resid))
    return worst


# ----------------------------------------------------------------------
# Lie-bracket closure for polynomial vector fields
# ----------------------------------------------------------------------

Poly = Dict[Tuple[int, ...], Fraction]


def _poly_zero() -> Poly:
    return {}


def _poly_add(p: Poly, q: Poly, factor: Fraction = Fraction(1)) -> Poly:
    out = dict(p)
    for k, v in q.items():
        s = out.get(k, Fraction(0)) + factor * v
        if s == 0:
            out.pop(k, None)
        else:
            out[k] = s
    return out


def _poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for k1, v1 in p.items():
        for k2, v2 in q.items():
            key = tuple(a + b for a, b in zip(k1, k2))
            s = out.get(key, Fraction(0)) + v1 * v2
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
    return out


def _poly_diff(p: Poly, i: int) -> Poly:
    out: Poly = {}
    for k, v in p.items():
        if k[i] > 0:
            key = tuple(a - 1 if j == i else a for j, a in enumerate(k))
            out[key] = v * k[i]
    return out


def expr_to_poly(e: Union[str, Expr], names: Sequence[str]) -> Poly:
    """Exact polynomial form of an Expr; raises if the Expr is not polynomial."""
    e = exprlang.as_expr(e)
    n = len(names)

    def walk(node) -> Poly:
        if isinstance(node, exprlang.Const):
            return {(0,) * n: Fraction(node.value)} if node.value != 0 else {}
        if isinstance(node, exprlang.Var):
            if node.name not in names:
                raise ValueError(f"unknown coordinate {node.name!r}")
            key = tuple(1 if names[i] == node.name else 0 for i in range(n))
            return {key: Fraction(1)}
        if isinstance(node, exprlang.Neg):
            return {k: -v for k, v in walk(node.operand).items()}
        if isinstance(node, exprlang.BinOp):
            if node.op == "+":
                return _poly_add(walk(node.left), walk(node.right))
            if node.op == "-":
                return _poly_add(walk(node.left), walk(node.right), Fraction(-1))
            if node.op == "*":
                return _poly_mul(walk(node.left), walk(node.right))
            if node.op == "/":
                right = walk(node.right)
                if list(right.keys()) not in ([()], [(0,) * n]) or (0,) * n not in right:
                    raise ValueError("division only by constants in polynomial fields")
                cval = right[(0,) * n]
                return {k: v / cval for k, v in walk(node.left).items()}
            if node.op == "^":
                if not isinstance(node.right, exprlang.Const) or Fraction(node.right.value).denominator != 1:
                    raise ValueError("only integer powers in polynomial fields")
                m = int(node.right.value)
                if m < 0:
                    raise ValueError("negative powers are not polynomial")
                out = {(0,) * n: Fraction(1)}
                base = walk(node.left)
                for _ in range(m):
                    out = _poly_mul(out, base)
                return out
        raise ValueError(f"not a polynomial expression: {exprlang.to_source(node)}")

    return walk(e)


@dataclass(frozen=True)
class BracketClosure:
    closed: bool
    structure_constants: Dict[Tuple[int, int], Tuple[Fraction, ...]]
    failures: Tuple[Tuple[int, int], ...]


def field_bracket(X: Sequence[Poly], Y: Sequence[Poly]) -> List[Poly]:
    """[X, Y]^a = X^b d_b Y^a - Y^b d_b X^a for polynomial component vectors."""
    n = len(X)
    out = []
    for a in range(n):
        acc: Poly = {}
        for b in range(n):
            acc = _poly_add(acc, _poly_mul(X[b], _poly_diff(Y[a], b)))
            acc = _poly_add(acc, _poly_mul(Y[b], _poly_diff(X[a], b)), Fraction(-1))
        out.append(acc)
    return out


def bracket_closure(
    fields: Sequence[Sequence[Union[str, Expr]]],
    names: Sequence[str],
) -> BracketClosure:
    """Pairwise Lie brackets of polynomial vector fields, expanded exactly and
    expressed in the span; non-representable brackets are flagged."""
    polys = [[expr_to_poly(comp, names) for comp in f] for f in fields]
    n = len(names)

    # collect all monomial slots appearing anywhere (fields and brackets)
    brackets = {}
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            brackets[(i, j)] = field_bracket(polys[i], polys[j])
    slots = set()
    for f in polys:
        for a, comp in enumerate(f):
            slots.update((a, k) for k in comp)
    for br in brackets.values():
        for a, comp in enumerate(br):
            slots.update((a, k) for k in comp)
    slots = sorted(slots)
    index = {s: i for i, s in enumerate(slots)}

    def vectorize(f: Sequence[Poly]) -> List[Fraction]:
        v = [Fraction(0)] * len(slots)
        for a, comp in enumerate(f):
            for k, val in comp.items():
                v[index[(a, k)]] = val
        return v

    basis_vecs = [vectorize(f) for f in polys]
    constants: Dict[Tuple[int, int], Tuple[Fraction, ...]] = {}
    failures: List[Tuple[int, int]] = []
    for key, br in brackets.items():
        target = vectorize(br)
        sol = _solve_exact(basis_vecs, target)
        if sol is None:
            failures.append(key)
        else:
            constants[key] = tuple(sol)
    return BracketClosure(closed=not failures, structure_constants=constants, failures=tuple(failures))


def _solve_exact(basis: List[List[Fraction]], target: List[Fraction]) -> Optional[List[Fraction]]:
    """Solve sum_k x_k basis[k] = target exactly over the rationals, or None."""
    m = len(target)
    n = len(basis)
    # augmented columns: basis vectors as columns
    A = [[basis[k][r] for k in range(n)] + [target[r]] for r in range(m)]
    row = 0
    pivots = []
    for col in range(n):
        piv = next((r for r in range(row, m) if A[r][col] != 0), None)
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        pv = A[row][col]
        A[row] = [x / pv for x in A[row]]
        for r in range(m):
            if r != row and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if A[r][n] != 0:
            return None
    sol = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        sol[col] = A[r][n]
    # verify (columns without pivots default to zero)
    for r in range(m):
        acc = sum((sol[k] * basis[k][r] for k in range(n)), Fraction(0))
        if acc != target[r]:
            return None
    return sol
