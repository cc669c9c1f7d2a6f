"""Coordinate tensor calculus at a point for Weyl structures.

Everything here evaluates expressions through jets, so all partial
derivatives are exact to floating precision (no finite differencing on the
main path).  Index conventions, used consistently throughout:

* Christoffel symbols: gamma[a][b][c] = Gamma^a_{bc}, symmetric in (b, c).
* Curvature as endomorphism-valued 2-form: R(e_a, e_b) e_c = R^d_{cab} e_d,
  stored as array[d][c][a][b]; equivalently R(e_a,e_b) is the matrix
  dGamma_b/dx^a - dGamma_a/dx^b + [Gamma_a, Gamma_b].
* nabla R stored as array[e][d][c][a][b] = (nabla_e R)^d_{cab}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import exprlang
from .exprlang import Expr, eval_jet, eval_number
from .jets import JetPoly


class DomainViolation(ValueError):
    """The evaluation point violates a chart constraint."""


class SingularMetricError(ValueError):
    pass


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    """Coordinate names plus strict positivity constraints on the domain."""

    names: Tuple[str, ...]
    constraints: Tuple[Expr, ...] = ()

    def __post_init__(self):
        if len(self.names) < 3:
            raise ValueError("charts must have dimension >= 3")
        if len(set(self.names)) != len(self.names):
            raise ValueError("coordinate names must be unique")
        for c in self.constraints:
            bad = set(exprlang.variables_of(c)) - set(self.names)
            if bad:
                raise ValueError(f"constraint references unknown coordinates {sorted(bad)}")

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True, eq=False)
class WeylStructure:
    """A chart, symmetric metric components and 1-form components, all Exprs.

    ``metric[i][j]`` may be None for an identically zero component.  The
    metric must be Lorentzian, signature (1, d-1), at every evaluated point.
    """

    chart: Chart
    metric: Tuple[Tuple[Optional[Expr], ...], ...]
    one_form: Tuple[Optional[Expr], ...]
    family: str = "custom"
    params: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.chart.dim


def make_structure(
    chart: Chart,
    metric_entries: Dict[Tuple[str, str], Union[str, Expr]],
    one_form: Optional[Dict[str, Union[str, Expr]]] = None,
    family: str = "custom",
    params: Optional[dict] = None,
) -> WeylStructure:
    """Build a WeylStructure from sparse named components (mirrored symmetrically)."""
    d = chart.dim
    grid: List[List[Optional[Expr]]] = [[None] * d for _ in range(d)]
    for (a, b), e in metric_entries.items():
        i, j = chart.index(a), chart.index(b)
        node = exprlang.as_expr(e)
        grid[i][j] = node
        grid[j][i] = node
    omega: List[Optional[Expr]] = [None] * d
    for a, e in (one_form or {}).items():
        omega[chart.index(a)] = exprlang.as_expr(e)
    return WeylStructure(
        chart=chart,
        metric=tuple(tuple(row) for row in grid),
        one_form=tuple(omega),
        family=family,
        params=dict(params or {}),
    )


# ----------------------------------------------------------------------
# evaluation plumbing
# ----------------------------------------------------------------------


def coordinate_jets(chart: Chart, point: Sequence, order: int) -> Dict[str, JetPoly]:
    d = chart.dim
    return {name: JetPoly.variable(i, d, order, point) for i, name in enumerate(chart.names)}


def check_domain(structure: WeylStructure, point: Sequence) -> None:
    env = dict(zip(structure.chart.names, point))
    for c in structure.chart.constraints:
        value = eval_number(c, env)
        if not value > 0:
            raise DomainViolation(
                f"constraint {exprlang.to_source(c)} > 0 violated at {tuple(point)} (value {value})"
            )


def metric_jets(structure: WeylStructure, point: Sequence, order: int) -> List[List[JetPoly]]:
    env = coordinate_jets(structure.chart, point, order)
    template = env[structure.chart.names[0]]
    zero = template.like_constant(0)
    d = structure.dim
    out: List[List[JetPoly]] = [[zero] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            e = structure.metric[i][j]
            if e is not None:
                jet = eval_jet(e, env)
                out[i][j] = jet
                out[j][i] = jet
    return out


def one_form_jets(structure: WeylStructure, point: Sequence, order: int) -> List[JetPoly]:
    env = coordinate_jets(structure.chart, point, order)
    zero = env[structure.chart.names[0]].like_constant(0)
    return [zero if e is None else eval_jet(e, env) for e in structure.one_form]


def metric_values(structure: WeylStructure, point: Sequence) -> np.ndarray:
    g = metric_jets(structure, point, 0)
    d = structure.dim
    return np.array([[float(g[i][j].value) for j in range(d)] for i in range(d)])


def check_signature(structure: WeylStructure, point: Sequence) -> np.ndarray:
    """Check Lorentzian signature (one negative eigenvalue); returns g values."""
    gv = metric_values(structure, point)
    eig = np.linalg.eigvalsh(gv)
    if abs(np.linalg.det(gv)) < 1e-12:
        raise SingularMetricError(f"metric is singular at {tuple(point)}")
    negatives = int(np.sum(eig < 0))
    if negatives != 1:
        raise SignatureError(f"metric has signature with {negatives} negative directions at {tuple(point)}")
    return gv


def _invert_jet_matrix(g: List[List[JetPoly]]) -> List[List[JetPoly]]:
    """Invert a matrix of jets by Gauss-Jordan with constant-term pivoting."""
    d = len(g)
    zero = g[0][0].like_constant(0)
    one = g[0][0].like_constant(1)
    aug = [[g[i][j] for j in range(d)] + [one if i == j else zero for j in range(d)] for i in range(d)]
    for col in range(d):
        pivot_row = max(range(col, d), key=lambda r: abs(float(aug[r][col].value)))
        if abs(float(aug[pivot_row][col].value)) < 1e-14:
            raise SingularMetricError("metric is singular (no usable pivot)")
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        inv_pivot = 1 / aug[col][col]
        aug[col] = [entry * inv_pivot for entry in aug[col]]
        for r in range(d):
            if r == col:
                continue
            factor = aug[r][col]
            if factor.coeffs:
                aug[r] = [er - factor * ec for er, ec in zip(aug[r], aug[col])]
    return [row[d:] for row in aug]


# ----------------------------------------------------------------------
# connections
# ----------------------------------------------------------------------


@dataclass(eq=False)
class Connection:
    """Christoffel symbols with their partial-derivative jets to ``depth``."""

    chart: Chart
    point: Tuple
    depth: int
    gamma: List[List[List[JetPoly]]]  # gamma[a][b][c] = Gamma^a_{bc}, jets of order depth

    @property
    def dim(self) -> int:
        return self.chart.dim

    def values(self) -> np.ndarray:
        d = self.dim
        out = np.zeros((d, d, d))
        for a in range(d):
            for b in range(d):
                for c in range(d):
                    out[a, b, c] = float(self.gamma[a][b][c].value)
        return out

    def derivative_values(self) -> np.ndarray:
        """array[e][a][b][c] = d_e Gamma^a_{bc} (requires depth >= 1)."""
        d = self.dim
        out = np.zeros((d, d, d, d))
        unit = [0] * d
        for a in range(d):
            for b in range(d):
                for c in range(d):
                    jet = self.gamma[a][b][c]
                    for e in range(d):
                        unit[e] = 1
                        out[e, a, b, c] = float(jet.coefficient(tuple(unit)))
                        unit[e] = 0
        return out


def levi_civita(structure: WeylStructure, point: Sequence, depth: int = 1) -> Connection:
    """Levi-Civita connection of the metric alone: half g^{ad}(d_b g_dc + d_c g_bd - d_d g_bc)."""
    check_domain(structure, point)
    check_signature(structure, point)
    g = metric_jets(structure, point, depth + 1)
    return _christoffel_from(structure, point, depth, g, omega=None)


def weyl_connection(structure: WeylStructure, point: Sequence, depth: int = 1) -> Connection:
    """Weyl connection: Levi-Civita plus K^a_bc = delta^a_b w_c + delta^a_c w_b - g_bc g^{ad} w_d."""
    check_domain(structure, point)
    check_signature(structure, point)
    g = metric_jets(structure, point, depth + 1)
    omega = one_form_jets(structure, point, depth)
    return _christoffel_from(structure, point, depth, g, omega=omega)


def _christoffel_from(
    structure: WeylStructure,
    point: Sequence,
    depth: int,
    g: List[List[JetPoly]],
    omega: Optional[List[JetPoly]],
) -> Connection:
    d = structure.dim
    dg = [[[g[i][j].derivative(e) for e in range(d)] for j in range(d)] for i in range(d)]
    g_low = [[g[i][j].truncated(depth) for j in range(d)] for i in range(d)]
    ginv = _invert_jet_matrix(g_low)
    zero = g_low[0][0].like_constant(0)

    gamma: List[List[List[JetPoly]]] = [[[zero] * d for _ in range(d)] for _ in range(d)]
    for b in range(d):
        for c in range(b, d):
            for a in range(d):
                acc = zero
                for e in range(d):
                    bracket = dg[e][c][b] + dg[b][e][c] - dg[b][c][e]
                    if bracket.coeffs and ginv[a][e].coeffs:
                        acc = acc + ginv[a][e] * bracket
                entry = acc / 2
                gamma[a][b][c] = entry
                gamma[a][c][b] = entry

    if omega is not None:
        omega_up = [zero] * d  # g^{ad} w_d
        for a in range(d):
            acc = zero
            for e in range(d):
                if ginv[a][e].coeffs and omega[e].coeffs:
                    acc = acc + ginv[a][e] * omega[e]
            omega_up[a] = acc
        for a in range(d):
            for b in range(d):
                for c in range(b, d):
                    k = zero
                    if a == b and omega[c].coeffs:
                        k = k + omega[c]
                    if a == c and omega[b].coeffs:
                        k = k + omega[b]
                    if g_low[b][c].coeffs and omega_up[a].coeffs:
                        k = k - g_low[b][c] * omega_up[a]
                    if k.coeffs:
                        entry = gamma[a][b][c] + k
                        gamma[a][b][c] = entry
                        gamma[a][c][b] = entry

    return Connection(chart=structure.chart, point=tuple(point), depth=depth, gamma=gamma)


# ----------------------------------------------------------------------
# curvature and its covariant derivative
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PointTensor:
    """Dense tensor components at a point with index variance labels."""

    chart: Chart
    point: Tuple
    variances: Tuple[str, ...]  # 'u' (contravariant) / 'd' (covariant)
    array: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.array**2)))


def _curvature_jets(conn: Connection) -> List[List[List[List[JetPoly]]]]:
    """R[d][c][a][b] jets of order depth-1; antisymmetric slots (a, b)."""
    d = conn.dim
    gamma = conn.gamma
    dgamma = [[[[gamma[x][y][z].derivative(e) for e in range(d)] for z in range(d)] for y in range(d)] for x in range(d)]
    zero = dgamma[0][0][0][0].like_constant(0)
    gl = [[[gamma[x][y][z].truncated(conn.depth - 1) for z in range(d)] for y in range(d)] for x in range(d)]
    R = [[[[zero] * d for _ in range(d)] for _ in range(d)] for _ in range(d)]
    for a in range(d):
        for b in range(a + 1, d):
            for dd in range(d):
                for c in range(d):
                    acc = dgamma[dd][b][c][a] - dgamma[dd][a][c][b]
                    for f in range(d):
                        t1 = gl[dd][a][f]
                        t2 = gl[f][b][c]
                        if t1.coeffs and t2.coeffs:
                            acc = acc + t1 * t2
                        t3 = gl[dd][b][f]
                        t4 = gl[f][a][c]
                        if t3.coeffs and t4.coeffs:
                            acc = acc - t3 * t4
                    R[dd][c][a][b] = acc
                    R[dd][c][b][a] = -acc
    return R


def _tensor_values(jets4, d: int) -> np.ndarray:
    out = np.zeros((d,) * 4)
    for i in range(d):
        for j in range(d):
            for a in range(d):
                for b in range(d):
                    out[i, j, a, b] = float(jets4[i][j][a][b].value)
    return out


def curvature(structure: WeylStructure, point: Sequence) -> PointTensor:
    """Curvature of the Weyl connection as R^d_{cab} (see module docstring)."""
    conn = weyl_connection(structure, point, depth=1)
    R = _curvature_jets(conn)
    return PointTensor(structure.chart, tuple(point), ("u", "d", "d", "d"), _tensor_values(R, structure.dim))


def nabla_R(structure: WeylStructure, point: Sequence) -> PointTensor:
    """Covariant derivative (nabla_e R)^d_{cab} of the (1,3) curvature tensor."""
    conn = weyl_connection(structure, point, depth=2)
    return PointTensor(
        structure.chart, tuple(point), ("d", "u", "d", "d", "d"), _nabla_R_values(conn)
    )


def _nabla_R_values(conn: Connection) -> np.ndarray:
    Rjets = _curvature_jets(conn)  # order depth-1 >= 1
    return _nabla_R_from(conn, Rjets, _tensor_values(Rjets, conn.dim))


def _nabla_R_from(conn: Connection, Rjets, R: np.ndarray) -> np.ndarray:
    d = conn.dim
    dR = np.zeros((d,) * 5)
    unit = [0] * d
    for i in range(d):
        for c in range(d):
            for a in range(d):
                for b in range(a + 1, d):
                    jet = Rjets[i][c][a][b]
                    for e in range(d):
                        unit[e] = 1
                        v = float(jet.coefficient(tuple(unit)))
                        unit[e] = 0
                        dR[e, i, c, a, b] = v
                        dR[e, i, c, b, a] = -v
    G = conn.values()  # G[a, b, c] = Gamma^a_{bc}
    # nabla_e R^d_cab = d_e R + G^d_ef R^f_cab - G^f_ec R^d_fab - G^f_ea R^d_cfb - G^f_eb R^d_caf
    out = dR.copy()
    out += np.einsum("def,fcab->edcab", G, R)
    out -= np.einsum("fec,dfab->edcab", G, R)
    out -= np.einsum("fea,dcfb->edcab", G, R)
    out -= np.einsum("feb,dcaf->edcab", G, R)
    return out


def weyl_compatibility_residual(structure: WeylStructure, point: Sequence) -> float:
    """max |(nabla g + 2 w x g)_{e,ab}| / max(1, |g|): the construction identity."""
    conn = weyl_connection(structure, point, depth=1)
    d = structure.dim
    g = metric_jets(structure, point, 1)
    omega = one_form_jets(structure, point, 0)
    gv = np.array([[float(g[i][j].value) for j in range(d)] for i in range(d)])
    dg = np.zeros((d, d, d))
    unit = [0] * d
    for i in range(d):
        for j in range(d):
            jet = g[i][j]
            for e in range(d):
                unit[e] = 1
                dg[e, i, j] = float(jet.coefficient(tuple(unit)))
                unit[e] = 0
    G = conn.values()
    w = np.array([float(o.value) for o in omega])
    nabla_g = dg - np.einsum("fea,fb->eab", G, gv) - np.einsum("feb,af->eab", G, gv)
    resid = nabla_g + 2.0 * np.einsum("e,ab->eab", w, gv)
    return float(np.max(np.abs(resid)) / max(1.0, np.max(np.abs(gv))))


# ----------------------------------------------------------------------
# recurrence and holonomy
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class RecurrenceReport:
    status: str  # "ok" | "no_curvature"
    recurrent: bool
    theta: Optional[np.ndarray]  # recurrence 1-form components, theta_e
    max_residual: float
    weight: Optional[float]  # least-squares w in theta = -w * omega
    weight_residual: Optional[float]
    closed_at_point: bool


def recurrence_theta(
    structure: WeylStructure, point: Sequence, tol: float = 1e-8, jet_order: int = 3
) -> RecurrenceReport:
    """Fit theta with nabla_e R = theta_e R and test the recurrence identity.

    theta_e is the Frobenius projection <nabla_e R, R> / <R, R>; the residual
    for each e is relative when |nabla_e R| > 1e-8, absolute otherwise.  The
    weight w is the least-squares solution of theta = -w * omega, reported
    only when the 1-form does not vanish at the point.  ``jet_order`` is the
    metric truncation order (>= 3); results are truncation-independent, so
    raising it only cross-checks the jet plumbing.
    """
    if jet_order < 3:
        raise ValueError("the recurrence identity needs metric jets of order >= 3")
    d = structure.dim
    conn = weyl_connection(structure, point, depth=jet_order - 1)
    Rjets = _curvature_jets(conn)
    conn_R = _tensor_values(Rjets, d)
    nr = _nabla_R_from(conn, Rjets, conn_R)
    r = conn_R.ravel()
    rnorm = float(np.sqrt(r @ r))
    if rnorm < 1e-13:
        return RecurrenceReport("no_curvature", False, None, 0.0, None, None, False)
    theta = np.array([float(nr[e].ravel() @ r) / (rnorm**2) for e in range(d)])
    max_resid = 0.0
    for e in range(d):
        diff = nr[e] - theta[e] * conn_R
        dn = float(np.sqrt(np.sum(nr[e] ** 2)))
        resid = float(np.sqrt(np.sum(diff**2)))
        if dn > 1e-8:
            resid /= dn
        max_resid = max(max_resid, resid)
    omega = one_form_jets(structure, point, 0)
    w = np.array([float(o.value) for o in omega])
    wnorm = float(np.sqrt(w @ w))
    if wnorm > 1e-10:
        weight = -float(theta @ w) / (wnorm**2)
        weight_residual = float(np.sqrt(np.sum((theta + weight * w) ** 2)))
        closed = False
    else:
        weight, weight_residual, closed = None, None, True
    return RecurrenceReport("ok", bool(max_resid <= tol), theta, max_resid, weight, weight_residual, closed)


@dataclass(frozen=True)
class HolonomyReport:
    span_dim: int
    singular_values: np.ndarray
    null_direction: Optional[np.ndarray]  # common curvature eigenvector, annotation only


def holonomy_span_dim(structure: WeylStructure, point: Sequence, rank_tol: float = 1e-7) -> HolonomyReport:
    """Numerical rank of span{R(e_a, e_b)} inside End(T_pM) (Ambrose-Singer span)."""
    R = curvature(structure, point).array
    d = structure.dim
    rows = [R[:, :, a, b].ravel() for a in range(d) for b in range(a + 1, d)]
    mat = np.stack(rows)
    sv = np.linalg.svd(mat, compute_uv=False)
    top = sv[0] if sv.size else 0.0
    if top <= 0:
        return HolonomyReport(0, sv, None)
    rank = int(np.sum(sv > rank_tol * top))
    return HolonomyReport(rank, sv, _common_eigendirection(structure, point, R, rank_tol))


def _common_eigendirection(structure, point, R: np.ndarray, tol: float) -> Optional[np.ndarray]:
    """Best-effort search for the parallel null direction (report annotation)."""
    d = R.shape[0]
    mats = [R[:, :, a, b] for a in range(d) for b in range(a + 1, d)]
    mats = [m for m in mats if np.max(np.abs(m)) > tol]
    if not mats:
        return None
    rng = np.random.default_rng(0)
    combo = sum(rng.uniform(0.5, 1.5) * m for m in mats)
    try:
        gv = metric_values(structure, point)
        vals, vecs = np.linalg.eig(combo)
    except np.linalg.LinAlgError:  # pragma: no cover
        return None
    scale = max(np.max(np.abs(m)) for m in mats)
    for k in range(d):
        if abs(vals[k].imag) > 1e-9:
            continue
        v = np.real(vecs[:, k])
        vn = np.linalg.norm(v)
        if vn < 1e-12:
            continue
        v = v / vn
        if abs(v @ gv @ v) > 1e-6:
            continue
        if all(np.linalg.norm(m @ v - ((v @ m @ v)) * v) <= 1e-6 * max(1.0, np.max(np.abs(m))) for m in mats):
            return v
    return None


# ----------------------------------------------------------------------
# conformal Weyl tensor (of the metric alone, Levi-Civita based)
# ----------------------------------------------------------------------


def conformal_weyl_tensor(structure: WeylStructure, point: Sequence) -> PointTensor:
    """Conformal Weyl curvature C_{abcd} of the metric part (d >= 4 for the
    vanishing test to imply conformal flatness)."""
    conn = levi_civita(structure, point, depth=1)
    d = structure.dim
    Rup = _tensor_values(_curvature_jets(conn), d)  # R^a_{bcd}
    gv = metric_values(structure, point)
    ginv = np.linalg.inv(gv)
    Rlow = np.einsum("ae,ebcd->abcd", gv, Rup)
    ric = np.einsum("abad->bd", Rup)
    scal = float(np.einsum("bd,bd->", ginv, ric))
    n = d
    C = Rlow.copy()
    C -= (
        np.einsum("ac,bd->abcd", gv, ric)
        - np.einsum("ad,bc->abcd", gv, ric)
        + np.einsum("bd,ac->abcd", gv, ric)
        - np.einsum("bc,ad->abcd", gv, ric)
    ) / (n - 2)
    C += scal * (np.einsum("ac,bd->abcd", gv, gv) - np.einsum("ad,bc->abcd", gv, gv)) / ((n - 1) * (n - 2))
    return PointTensor(structure.chart, tuple(point), ("d", "d", "d", "d"), C)


# ----------------------------------------------------------------------
# Lie derivative symmetry check
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class LieDerivativeReport:
    lam: float
    metric_residual: float
    one_form_residual: float


def lie_derivative_check(
    structure: WeylStructure, field_components: Sequence[Union[str, Expr]], point: Sequence
) -> LieDerivativeReport:
    """Residuals of L_Y g = 2 lam g and L_Y omega = -d lam for a vector field Y.

    lam is recovered pointwise by the Frobenius fit of L_Y g against 2 g and
    its differential comes from carrying the fit through order-1 jets.
    """
    chart = structure.chart
    d = chart.dim
    if len(field_components) != d:
        raise ValueError(f"field needs {d} components, got {len(field_components)}")
    check_domain(structure, point)
    env2 = coordinate_jets(chart, point, 2)
    g2 = metric_jets(structure, point, 2)
    w2 = one_form_jets(structure, point, 2)
    Y2 = [eval_jet(exprlang.as_expr(c), env2) for c in field_components]

    g1 = [[g2[i][j].truncated(1) for j in range(d)] for i in range(d)]
    Y1 = [y.truncated(1) for y in Y2]
    dg = [[[g2[i][j].derivative(e) for e in range(d)] for j in range(d)] for i in range(d)]
    dY = [[Y2[c].derivative(a) for a in range(d)] for c in range(d)]  # dY[c][a] = d_a Y^c

    zero = g1[0][0].like_constant(0)
    lie_g = [[zero] * d for _ in range(d)]
    for a in range(d):
        for b in range(a, d):
            acc = zero
            for c in range(d):
                if Y1[c].coeffs and dg[a][b][c].coeffs:
                    acc = acc + Y1[c] * dg[a][b][c]
                if g1[c][b].coeffs and dY[c][a].coeffs:
                    acc = acc + g1[c][b] * dY[c][a]
                if g1[a][c].coeffs and dY[c][b].coeffs:
                    acc = acc + g1[a][c] * dY[c][b]
            lie_g[a][b] = acc
            lie_g[b][a] = acc

    num = zero
    den = zero
    for a in range(d):
        for b in range(d):
            if lie_g[a][b].coeffs and g1[a][b].coeffs:
                num = num + lie_g[a][b] * g1[a][b]
            if g1[a][b].coeffs:
                den = den + g1[a][b] * g1[a][b]
    lam_jet = num / (2 * den)
    lam0 = float(lam_jet.value)
    dlam = np.array([float(x) for x in lam_jet.gradient()])

    res_g = 0.0
    for a in range(d):
        for b in range(d):
            res_g += (float(lie_g[a][b].value) - 2.0 * lam0 * float(g1[a][b].value)) ** 2
    res_g = math.sqrt(res_g)

    w1 = [w.truncated(1) for w in w2]
    dw = [[w2[a].derivative(c) for c in range(d)] for a in range(d)]  # dw[a][c] = d_c w_a
    lie_w = np.zeros(d)
    for a in range(d):
        acc = 0.0
        for c in range(d):
            acc += float(Y1[c].value) * float(dw[a][c].value)
            acc += float(w1[c].value) * float(dY[c][a].value)
        lie_w[a] = acc
    res_w = float(np.linalg.norm(lie_w + dlam))
    return LieDerivativeReport(lam=lam0, metric_residual=float(res_g), one_form_residual=res_w)
