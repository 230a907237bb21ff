"""Left-invariant torsion tensors from metric Lie algebras.

A metric Lie algebra with an orthonormal bracket table and a compatible
quaternionic structure yields genuine intrinsic-torsion tensors: the
Levi-Civita connection comes from the Koszul formula

    2 <nabla_x y, z> = <[x,y], z> - <[y,z], x> + <[z,x], y>,

invariant forms differentiate by slot insertion of nabla, the exterior
derivative is the bracket alternation

    db(x_0..x_p) = sum_{i<j} (-1)^{i+j} b([x_i, x_j], x_0..^i..^j..x_p),

and the Nijenhuis tensor of each complex structure measures integrability.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .exterior import (
    AltForm,
    MixedTorsion,
    MixedTwoFormFamily,
    alternate5,
    contract12,
    tables,
    wedge,
    wedge1,
)
from .structure import (
    AXES,
    QuatStructure,
    insert,
    standard_structure,
    structure_from_json,
)
from .torsion import from_nabla_omegas, is_in_W
from .classify import (
    DerivedFromDOmega,
    classification_report,
                        )


class AlgebraError(ValueError):
    """Raised for bracket tables that do not define a Lie algebra."""


@dataclass
class MetricLieAlgebra:
    """Structure constants c[i,j,k] with [e_i, e_j] = sum_k c[i,j,k] e_k in an
    orthonormal basis, plus a quaternionic structure on the same space.

    The constructor antisymmetrises the bracket table but a Jacobi failure is
    an error, never repaired."""

    structure: QuatStructure
    c: np.ndarray = field(repr=False)
    jacobi_tol: float = 1e-12

    def __post_init__(self):
        dim = self.structure.dim
        self.c = np.asarray(self.c, dtype=float)
        if self.c.shape != (dim, dim, dim):
            raise AlgebraError(f"bracket table must be {dim}^3")
        self.c = 0.5 * (self.c - self.c.transpose(1, 0, 2))
        jac = (np.einsum("ijm,mkl->ijkl", self.c, self.c)
               + np.einsum("jkm,mil->ijkl", self.c, self.c)
               + np.einsum("kim,mjl->ijkl", self.c, self.c))
        resid = float(np.abs(jac).max())
        if resid > self.jacobi_tol:
            raise AlgebraError(f"Jacobi identity fails ({resid:.2e})")

    @property
    def dim(self) -> int:
        return self.structure.dim

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.c)

    def is_abelian(self, tol: float = 0.0) -> bool:
        return float(np.abs(self.c).max()) <= tol


def koszul(g: MetricLieAlgebra) -> np.ndarray:
    """Connection coefficients G[x, j, k] = <nabla_{e_x} e_j, e_k>."""
    c = g.c
    G = 0.5 * (c - np.einsum("jki->ijk", c) + np.einsum("kij->ijk", c))
    # metric compatibility and torsion-freeness are structural here, but a
    # cheap check guards against index slips
    if float(np.abs(G + G.transpose(0, 2, 1)).max()) > 1e-12:
        raise AlgebraError("connection is not metric")
    if float(np.abs(G - G.transpose(1, 0, 2)
                    - c.transpose(0, 1, 2)).max()) > 1e-12:
        raise AlgebraError("connection has torsion")
    return G


def nabla_dense(g: MetricLieAlgebra, G: np.ndarray,
                t: np.ndarray) -> np.ndarray:
    """Covariant derivative of an invariant dense (0,s)-tensor:
    out[x, ...] = (nabla_{e_x} t)(...)."""
    dim = g.dim
    s = t.ndim
    out = np.zeros((dim,) + t.shape)
    for x in range(dim):
        M = G[x].T      # matrix of nabla_{e_x}: e_j -> sum_k G[x,j,k] e_k
        acc = np.zeros_like(t)
        for i in range(1, s + 1):
            acc += insert(M, i, t)  # insert carries the minus sign
        out[x] = acc
    return out


def nabla_form(g: MetricLieAlgebra, G: np.ndarray, w: AltForm) -> np.ndarray:
    """Rows of coefficient vectors of nabla w (one row per direction)."""
    dim = g.dim
    tab = tables(dim)
    t, sidx, z, r, sign = tab.der_table(w.degree)
    rows = np.zeros((dim, tab.nforms(w.degree)))
    for x in range(dim):
        M = G[x].T
        D = np.zeros((tab.nforms(w.degree),) * 2)
        np.add.at(D, (t, sidx), M[z, r] * sign)
        rows[x] = -(D @ w.coeffs)
    return rows


def nabla_omega(g: MetricLieAlgebra, G: np.ndarray,
                axis: str) -> MixedTwoFormFamily:
    """nabla w_A as a mixed two-form family."""
    A = g.structure.mats[axis]
    mats = np.zeros((g.dim, g.dim, g.dim))
    for x in range(g.dim):
        M = G[x].T
        mats[x] = -(M.T @ A + A @ M)
    return MixedTwoFormFamily(g.dim, mats)


def nabla_Omega(g: MetricLieAlgebra, G: np.ndarray) -> MixedTorsion:
    return MixedTorsion(g.dim, nabla_form(g, G, g.structure.Omega))


def ce_d(g: MetricLieAlgebra, b: AltForm) -> AltForm:
    """Bracket alternation differential of an invariant form."""
    dim, p = g.dim, b.degree
    if p + 1 > dim:
        return AltForm.zero(dim, min(p + 1, dim + 1))
    tab = tables(dim)
    idx_p = tab.index(p)
    out = AltForm.zero(dim, p + 1)
    for oi, T in enumerate(tab.tuples(p + 1)):
        val = 0.0
        for i, j in itertools.combinations(range(p + 1), 2):
            rest = tuple(T[m] for m in range(p + 1) if m not in (i, j))
            br = g.c[T[i], T[j]]
            for k in np.nonzero(br)[0]:
                if k in rest:
                    continue
                pos = sum(1 for x in rest if x < k)
                S = rest[:pos] + (int(k),) + rest[pos:]
                val += ((-1.0) ** (i + j) * br[k]
                        * (-1.0) ** pos * b.coeffs[idx_p[S]])
        out.coeffs[oi] = val
    return out


def nijenhuis(g: MetricLieAlgebra, axis: str) -> np.ndarray:
    """N_A(x, y, z) = <e_x, N_A(e_y, e_z)> with
    N_A(Y, Z) = [Y,Z] + A[AY,Z] + A[Y,AZ] - [AY,AZ]."""
    A = g.structure.mats[axis]
    c = g.c
    t1 = np.einsum("yzx->xyz", c)
    t2 = np.einsum("xv,uy,uzv->xyz", A, A, c)
    t3 = np.einsum("xv,uz,yuv->xyz", A, A, c)
    t4 = np.einsum("uy,wz,uwx->xyz", A, A, c)
    return t1 + t2 + t3 - t4


def gray_residual(g: MetricLieAlgebra, G: np.ndarray, axis: str) -> float:
    """Residual of 2 nabla w_A = d w_A - A_(2)A_(3) d w_A - A_(2) N_A."""
    A = g.structure.mats[axis]
    dw = ce_d(g, g.structure.omega[axis]).dense()
    NA = nijenhuis(g, axis)
    rhs = dw - insert(A, 2, insert(A, 3, dw)) - insert(A, 2, NA)
    lhs = 2.0 * nabla_omega(g, G, axis).mats
    return float(np.abs(lhs - rhs).max())


def codiff_omega_2form(g: MetricLieAlgebra, G: np.ndarray,
                       axis: str) -> np.ndarray:
    """d* w_A as a one-form: -(sum_r (nabla_{e_r} w_A)(e_r, .))."""
    mats = nabla_omega(g, G, axis).mats
    return -np.einsum("rrz->z", mats)


def codiff_Omega(g: MetricLieAlgebra, G: np.ndarray | None = None,
                 tol: float = 1e-9) -> dict:
    """The codifferential of the fundamental form computed three ways:

    * contraction: -C12(nabla Omega);
    * hodge: -star d star Omega (bracket-alternation differential);
    * structural: -2 sum_A <A . hook d w_A, w_A> ^ w_A - 2 sum_A d w_A(A., A., A.),
      equivalently 2 sum_A (d* w_A ^ w_A - d w_A(A., A., A.)).

    Raises if the routes disagree beyond tol (relative).  The report also
    carries, per axis: the residual of A d* w_A = -<. hook d w_A, w_A>; the
    residual of the wedge-trace display
    2 <A . hook d w_A, w_A> = star_inv(star dOmega ^ w_A ^ w_A)
    (the d* w_A variant of its left side is degree-invalid and cannot be
    formed); and the residual of the combination that does hold,
    star_inv(star dOmega ^ w_A ^ w_A) = -12 xi - 8 k1 xi_A
    with xi, xi_A those of d* Omega."""
    s = g.structure
    if G is None:
        G = koszul(g)
    nOm = nabla_Omega(g, G)
    route_contraction = contract12(nOm)
    route_hodge = -1.0 * s.star(ce_d(g, s.star(s.Omega)))
    dwa = {a: ce_d(g, s.omega[a]) for a in AXES}
    u = {}
    for a in AXES:
        A = s.mats[a]
        dwd = dwa[a].dense()
        # w[y] = <e_y hook dw_A, w_A>; u = <A . hook dw_A, w_A> = -A w
        w = 0.5 * np.einsum("yrs,rs->y", dwd, A)
        u[a] = -(A @ w)
    route_structural = AltForm.zero(s.dim, 3)
    for a in AXES:
        route_structural = (route_structural
                            - 2.0 * wedge1(u[a], s.omega[a])
                            + 2.0 * s.act_axis(a, dwa[a]))
    variants = {
        "contraction": route_contraction,
        "hodge": route_hodge,
        "structural": route_structural,
    }
    # same expression through the two-form codifferentials
    alt = AltForm.zero(s.dim, 3)
    for a in AXES:
        alt = alt + 2.0 * (wedge1(codiff_omega_2form(g, G, a), s.omega[a])
                           + s.act_axis(a, dwa[a]))
    variants["two_form_codiff"] = alt

    scale = max(route_contraction.norm(), 1e-300)
    names = list(variants)
    pair = {}
    for i, x in enumerate(names):
        for y in names[i + 1:]:
            pair[f"{x}|{y}"] = float(np.linalg.norm(
                variants[x].coeffs - variants[y].coeffs)) / scale
    dOm = ce_d(g, s.Omega)
    from .threeform import xi_triple

    tri = xi_triple(route_contraction, s)
    leedd = {}
    astperp = {}
    astperp_fixed = {}
    for a in AXES:
        A = s.mats[a]
        lhs = A @ codiff_omega_2form(g, G, a)
        dwd = dwa[a].dense()
        rhs = -0.5 * np.einsum("yrs,rs->y", dwd, A)
        leedd[a] = float(np.abs(lhs - rhs).max())
        wAA = s.star_inv(wedge(wedge(s.star(dOm), s.omega[a]), s.omega[a]))
        astperp[a] = float(np.abs(2.0 * u[a] - wAA.coeffs).max()) / scale
        fixed = -12.0 * tri.xi - 8.0 * s.k1 * tri[a]
        astperp_fixed[a] = float(np.abs(fixed - wAA.coeffs).max()) / scale
    worst = max(pair.values())
    report = {
        "pairwise": pair,
        "two_form_codiff_identity": leedd,
        "wedge_trace_displayed": astperp,
        "wedge_trace_xi_combination": astperp_fixed,
    }
    if worst > tol:
        raise AlgebraError(
            "codifferential routes disagree: "
            + ", ".join(f"{k}={v:.2e}" for k, v in pair.items()))
    return {"value": route_contraction, "variants": variants,
            "report": report}


def classify_algebra(g: MetricLieAlgebra, tol: float = 1e-8) -> dict:
    """End-to-end pipeline: connection, torsion, class, table residuals and
    the structural cross-identities."""
    s = g.structure
    G = koszul(g)
    nOm = nabla_Omega(g, G)
    ok, resid = is_in_W(nOm, s, max(tol, 1e-10))
    checks = {"torsion_membership": resid}
    nw = {a: nabla_omega(g, G, a) for a in AXES}
    assembled = from_nabla_omegas(2.0 * nw["I"], 2.0 * nw["J"],
                                  2.0 * nw["K"], s)
    scale = max(nOm.norm(), 1e-300)
    checks["product_rule"] = float(
        np.linalg.norm(assembled.rows - nOm.rows)) / scale
    dOm_ce = ce_d(g, s.Omega)
    checks["alternation_vs_differential"] = float(np.linalg.norm(
        alternate5(nOm).coeffs - dOm_ce.coeffs)) / scale
    checks["gray_identity"] = max(gray_residual(g, G, a) for a in AXES)
    checks["nijenhuis_trace"] = max(
        float(np.abs(np.einsum("iix->x", nijenhuis(g, a))).max())
        for a in AXES)
    cod = codiff_Omega(g, G)
    checks["codifferential_pairwise"] = max(
        cod["report"]["pairwise"].values())
    checks["wedge_trace_xi_combination"] = max(
        cod["report"]["wedge_trace_xi_combination"].values())
    report = classification_report(nOm, s, tol)
    d = DerivedFromDOmega.from_dOmega(dOm_ce, s, scale=nOm.norm())
    from .threeform import xi_triple
    tri = xi_triple(contract12(nOm), s)
    checks["xi_hodge_vs_contraction"] = float(
        np.linalg.norm(d.xi - tri.xi)) / scale
    report["checks"] = checks
    report["codifferential"] = cod["report"]
    report["abelian"] = g.is_abelian()
    return report


# ---------------------------------------------------------------------------
# construction helpers and JSON interchange
# ---------------------------------------------------------------------------


def abelian_algebra(n: int) -> MetricLieAlgebra:
    s = standard_structure(n)
    return MetricLieAlgebra(s, np.zeros((s.dim,) * 3))


def two_step_nilpotent(n: int, seed: int, center: int = 4,
                       scale: float = 1.0) -> MetricLieAlgebra:
    """Random two-step nilpotent algebra: brackets of the first 4n - center
    basis vectors land in the span of the last `center` ones (Jacobi holds
    identically)."""
    s = standard_structure(n)
    dim = s.dim
    rng = np.random.default_rng(seed)
    c = np.zeros((dim,) * 3)
    base = dim - center
    vals = rng.standard_normal((base, base, center)) * scale
    for i in range(base):
        for j in range(i + 1, base):
            c[i, j, base:] = vals[i, j]
            c[j, i, base:] = -vals[i, j]
    return MetricLieAlgebra(s, c)


def algebra_to_json(g: MetricLieAlgebra) -> dict:
    brackets = []
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            for k in np.nonzero(g.c[i, j])[0]:
                brackets.append([i, j, int(k), float(g.c[i, j, k])])
    return {"n": g.structure.n, "brackets": brackets, "structure": "standard"}


def algebra_from_json(data: dict) -> MetricLieAlgebra:
    n = int(data["n"])
    sdata = data.get("structure", "standard")
    s = standard_structure(n) if sdata == "standard" else structure_from_json(sdata)
    c = np.zeros((s.dim,) * 3)
    for i, j, k, v in data.get("brackets", []):
        c[int(i), int(j), int(k)] += float(v)
        c[int(j), int(i), int(k)] -= float(v)
    return MetricLieAlgebra(s, c)


def load_algebra(path: str) -> MetricLieAlgebra:
    with open(path) as fh:
        return algebra_from_json(json.load(fh))
