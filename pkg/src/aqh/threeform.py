"""Analysis of 3-forms: the one-forms xi and xi_A, the eigenprojectors of L,
the fifteen membership conditions on the invariant subspaces of Lambda^3, and
the right inverse of the torsion contraction.

Lambda^3 splits as (K + E)H + (L3E + E)S^3H with

    (K+E)H    = { L(b) =  3 b },
    (L3E+E)S3H = { L(b) = -3 b },
    EH        = { b = xi_b hook Omega },
    E(H+S3H)  = { b = -2 sum_A (A xi_{b;A}) ^ w_A },

where
    xi_b(x)     = (1/(12(2n+1))) sum_A b(e_r, A e_r, A x)
    xi_{b;A}(x) = -(3/(2(n-1))) xi_b(x) - (1/(4(n-1))) <Ax hook b, w_A>.

The right inverse hat_dstar of the torsion contraction sends a 3-form b to

    (1/18) sum_A i_A(. hook L b) ^ w_A
    - (2 k1 / 3 k2) sum_{A,B} i_A(. hook (B xi_{b;B} ^ w_B)) ^ w_A
    - ((4 k1^2 + k2^2)/(12 k1 k2)) { . ^ (xi_b hook Omega) - xi_b ^ (. hook Omega) }

with k1 = n - 1, k2 = 2n + 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exterior import AltForm, DegreeError, MixedTorsion, interior
from .structure import AXES, QuatStructure

K2_FACTOR = 12  # xi normalisation 1/(12 k2)


@dataclass
class OneFormTriple:
    """The basis-dependent one-forms (xi_I, xi_J, xi_K) of a 3-form plus the
    global xi; tagged with the structure they were computed in."""

    xi_I: np.ndarray
    xi_J: np.ndarray
    xi_K: np.ndarray
    xi: np.ndarray
    structure: QuatStructure

    def __getitem__(self, axis: str) -> np.ndarray:
        return {"I": self.xi_I, "J": self.xi_J, "K": self.xi_K}[axis]

    def as_dict(self) -> dict[str, list[float]]:
        return {
            "xi_I": self.xi_I.tolist(),
            "xi_J": self.xi_J.tolist(),
            "xi_K": self.xi_K.tolist(),
            "xi": self.xi.tolist(),
        }


# ---------------------------------------------------------------------------
# xi maps as matrices Lambda^3 -> one-forms
# ---------------------------------------------------------------------------


def _trace_matrices(s: QuatStructure) -> dict[str, np.ndarray]:
    """V_A (dim x N3): (V_A b)[y] = <e_y hook b, w_A>."""

    def build():
        dim, tab = s.dim, s.tab
        N3, N2 = tab.nforms(3), tab.nforms(2)
        eye = np.eye(dim)
        out = {}
        # interior-by-e_y as a matrix stack INT[y]: N2 x N3
        u, _m, r, t, sign = tab.exp_table(3)
        INT = np.zeros((dim, N2, N3))
        np.add.at(INT, (r, t, u), sign)
        for a in AXES:
            w = s.omega[a].coeffs
            out[a] = np.einsum("c,ycb->yb", w, INT)
        return out

    return s.cache("trace_matrices", build)


def xi_matrix(s: QuatStructure) -> np.ndarray:
    """Matrix of b -> xi_b: xi_b(x) = -(1/(6 k2)) sum_A <Ax hook b, w_A>."""

    def build():
        V = _trace_matrices(s)
        out = np.zeros((s.dim, s.tab.nforms(3)))
        for a in AXES:
            out += s.mats[a] @ V[a]
        return out / (6 * s.k2)

    return s.cache("xi_matrix", build)


def xia_matrix(s: QuatStructure, axis: str) -> np.ndarray:
    """Matrix of b -> xi_{b;A}."""

    def build():
        V = _trace_matrices(s)
        return (-(3.0 / (2 * s.k1)) * xi_matrix(s)
                + (1.0 / (4 * s.k1)) * (s.mats[axis] @ V[axis]))

    return s.cache(("xia_matrix", axis), build)


def xi(b: AltForm, s: QuatStructure) -> np.ndarray:
    if b.degree != 3:
        raise DegreeError("xi is defined on 3-forms")
    return xi_matrix(s) @ b.coeffs


def xi_triple(b: AltForm, s: QuatStructure) -> OneFormTriple:
    if b.degree != 3:
        raise DegreeError("xi_triple is defined on 3-forms")
    vals = {a: xia_matrix(s, a) @ b.coeffs for a in AXES}
    return OneFormTriple(vals["I"], vals["J"], vals["K"], xi(b, s), s)


# ---------------------------------------------------------------------------
# projector matrices on Lambda^3
# ---------------------------------------------------------------------------

PROJ3_LABELS = ("KH", "EH", "L3ES3H", "ES3H", "plus3", "minus3", "EHS3H")


def hook_omega_matrix(s: QuatStructure) -> np.ndarray:
    """K1 (N3 x dim): columns e_y hook Omega."""

    def build():
        dim = s.dim
        eye = np.eye(dim)
        return np.stack(
            [interior(eye[y], s.Omega).coeffs for y in range(dim)], axis=1)

    return s.cache("hook_omega_matrix", build)


def wedge_xi_omega_matrix(s: QuatStructure) -> np.ndarray:
    """M3 (N3 x N3): b -> sum_A (A xi_{b;A}) ^ w_A."""

    def build():
        out = np.zeros((s.tab.nforms(3), s.tab.nforms(3)))
        for a in AXES:
            W = s.wedge_omega_matrix(a, 1)
            out += W @ (s.mats[a] @ xia_matrix(s, a))
        return out

    return s.cache("m3_matrix", build)


def proj3_matrix(s: QuatStructure, label: str) -> np.ndarray:
    def build():
        N3 = s.tab.nforms(3)
        L3 = s.L_matrix(3)
        eye = np.eye(N3)
        plus3 = (3 * eye + L3) / 6.0
        minus3 = (3 * eye - L3) / 6.0
        P_EH = hook_omega_matrix(s) @ xi_matrix(s)
        P_EHS = -2.0 * wedge_xi_omega_matrix(s)
        mats = {
            "plus3": plus3,
            "minus3": minus3,
            "EH": P_EH,
            "EHS3H": P_EHS,
            "ES3H": P_EHS - P_EH,
            "KH": plus3 - P_EH,
        }
        mats["L3ES3H"] = minus3 - mats["ES3H"]
        return mats

    if label not in PROJ3_LABELS:
        raise KeyError(f"unknown 3-form subspace label {label!r}")
    return s.cache("proj3", build)[label]


def proj3(b: AltForm, label: str, s: QuatStructure) -> AltForm:
    if b.degree != 3:
        raise DegreeError("proj3 acts on 3-forms")
    return AltForm(b.dim, 3, proj3_matrix(s, label) @ b.coeffs)


# ---------------------------------------------------------------------------
# the fifteen membership rows (plus zero and the full space)
# ---------------------------------------------------------------------------

# Row conditions, evaluated on precomputed data:
#   Lb - 3b, Lb + 3b, xiC = xi hook Omega, m = sum_A (A xi_A) ^ w_A,
#   m_noA = sum_A xi_A ^ w_A (the prefix-free reading, kept for comparison).

TABLE1_IDS = (
    "0", "KH", "EH", "L3E.S3H", "E.S3H",
    "(K+E)H", "KH+L3E.S3H", "KH+E.S3H", "EH+L3E.S3H", "E(H+S3H)",
    "(L3E+E)S3H", "(K+E)H+L3E.S3H", "(K+E)H+E.S3H", "KH+(L3E+E)S3H",
    "EH+(L3E+E)S3H", "full",
)

TABLE1_COMPONENTS = {
    "0": frozenset(),
    "KH": frozenset({"KH"}),
    "EH": frozenset({"EH"}),
    "L3E.S3H": frozenset({"L3ES3H"}),
    "E.S3H": frozenset({"ES3H"}),
    "(K+E)H": frozenset({"KH", "EH"}),
    "KH+L3E.S3H": frozenset({"KH", "L3ES3H"}),
    "KH+E.S3H": frozenset({"KH", "ES3H"}),
    "EH+L3E.S3H": frozenset({"EH", "L3ES3H"}),
    "E(H+S3H)": frozenset({"EH", "ES3H"}),
    "(L3E+E)S3H": frozenset({"L3ES3H", "ES3H"}),
    "(K+E)H+L3E.S3H": frozenset({"KH", "EH", "L3ES3H"}),
    "(K+E)H+E.S3H": frozenset({"KH", "EH", "ES3H"}),
    "KH+(L3E+E)S3H": frozenset({"KH", "L3ES3H", "ES3H"}),
    "EH+(L3E+E)S3H": frozenset({"EH", "L3ES3H", "ES3H"}),
    "full": frozenset({"KH", "EH", "L3ES3H", "ES3H"}),
}


def table1_residuals(b: AltForm, row_id: str, s: QuatStructure,
                     es3h_prefix: bool = True) -> list[float]:
    """Residual norms of the displayed conditions for one row.

    es3h_prefix selects the reading of the "KH + ES3H" row: True uses
    L(b) = 3b + 12 sum_A (A xi_{b;A}) ^ w_A (the reading that annihilates
    projected members), False the prefix-free variant printed alongside it.
    """
    if row_id not in TABLE1_COMPONENTS:
        raise KeyError(f"unknown Table-1 row {row_id!r}")
    if b.degree != 3:
        raise DegreeError("membership rows act on 3-forms")
    Lb = s.L_map(b).coeffs
    bb = b.coeffs
    tri = xi_triple(b, s)
    xiC = interior(tri.xi, s.Omega).coeffs
    m = np.zeros_like(bb)
    m_noA = np.zeros_like(bb)
    for a in AXES:
        W = s.wedge_omega_matrix(a, 1)
        m += W @ (s.mats[a] @ tri[a])
        m_noA += W @ tri[a]
    m12 = m if es3h_prefix else m_noA

    def nrm(v):
        return float(np.linalg.norm(v))

    xia_eq = [nrm(tri.xi_I - tri.xi_J), nrm(tri.xi_J - tri.xi_K)]
    rows = {
        "0": [nrm(bb)],
        "KH": [nrm(Lb - 3 * bb), nrm(tri.xi)],
        "EH": [nrm(bb - xiC)],
        "L3E.S3H": [nrm(Lb + 3 * bb), nrm(tri.xi_I), nrm(tri.xi_J),
                    nrm(tri.xi_K)],
        "E.S3H": [nrm(bb + 2 * m), nrm(tri.xi)],
        "(K+E)H": [nrm(Lb - 3 * bb)],
        "KH+L3E.S3H": [nrm(tri.xi_I), nrm(tri.xi_J), nrm(tri.xi_K)],
        "KH+E.S3H": [nrm(Lb - 3 * bb - 12 * m12)],
        "EH+L3E.S3H": [nrm(Lb + 3 * bb - 6 * xiC)] + xia_eq,
        "E(H+S3H)": [nrm(bb + 2 * m)],
        "(L3E+E)S3H": [nrm(Lb + 3 * bb)],
        "(K+E)H+L3E.S3H": xia_eq,
        "(K+E)H+E.S3H": [nrm(Lb - 3 * bb - 6 * xiC - 12 * m)],
        "KH+(L3E+E)S3H": [nrm(tri.xi)],
        "EH+(L3E+E)S3H": [nrm(Lb + 3 * bb - 6 * xiC)],
        "full": [0.0],
    }
    return rows[row_id]


def table1_member(b: AltForm, row_id: str, s: QuatStructure,
                  tol: float = 1e-9) -> bool:
    scale = max(b.norm(), 1e-300)
    return max(table1_residuals(b, row_id, s)) <= tol * scale


# ---------------------------------------------------------------------------
# the canonical embedding of 3-forms and the right inverse of the contraction
# ---------------------------------------------------------------------------


def se_matrix(s: QuatStructure) -> np.ndarray:
    """Matrix (dim*N4 x N3) of b -> rows sum_A i_A(x hook b) ^ w_A."""

    def build():
        dim, tab = s.dim, s.tab
        N3, N2, N4 = tab.nforms(3), tab.nforms(2), tab.nforms(4)
        u, _m, r, t, sign = tab.exp_table(3)
        INT = np.zeros((dim, N2, N3))
        np.add.at(INT, (r, t, u), sign)
        SE = np.zeros((dim, N4, N3))
        for a in AXES:
            core = s.wedge_omega_matrix(a, 2) @ (-s.deriv(a, 2))
            SE += np.einsum("cb,xbn->xcn", core, INT)
        return SE.reshape(dim * N4, N3)

    return s.cache("se_matrix", build)


def r_matrix(s: QuatStructure) -> np.ndarray:
    """Matrix (dim*N4 x dim) of zeta -> rows
    x ^ (zeta hook Omega) - zeta ^ (x hook Omega)."""

    def build():
        dim, tab = s.dim, s.tab
        N4 = tab.nforms(4)
        eye = np.eye(dim)
        K1 = hook_omega_matrix(s)
        u, _m, r, t, sign = tab.exp_table(4)
        R = np.zeros((dim, N4, dim))
        for x in range(dim):
            # x ^ (zeta hook Omega): wedge1 with fixed first factor e_x
            W1 = np.zeros((N4, tab.nforms(3)))
            np.add.at(W1, (u, t), sign * eye[x][r])
            xo = interior(eye[x], s.Omega)
            # zeta ^ (x hook Omega): wedge1 linear in zeta
            W2 = np.zeros((N4, dim))
            np.add.at(W2, (u, r), sign * xo.coeffs[t])
            R[x] = W1 @ K1 - W2
        return R.reshape(dim * N4, dim)

    return s.cache("r_matrix", build)


def hat_matrix(s: QuatStructure) -> np.ndarray:
    """Matrix of the right inverse of the torsion contraction."""

    def build():
        SE = se_matrix(s)
        k1, k2 = s.k1, s.k2
        c3 = (4 * k1 ** 2 + k2 ** 2) / (12.0 * k1 * k2)
        return (SE @ s.L_matrix(3) / 18.0
                - (2 * k1 / (3.0 * k2)) * (SE @ wedge_xi_omega_matrix(s))
                - c3 * (r_matrix(s) @ xi_matrix(s)))

    return s.cache("hat_matrix", build)


def torsion_embed(b: AltForm, s: QuatStructure) -> MixedTorsion:
    """rows x -> sum_A i_A(x hook b) ^ w_A."""
    if b.degree != 3:
        raise DegreeError("the embedding acts on 3-forms")
    return MixedTorsion.from_flat(s.dim, se_matrix(s) @ b.coeffs)


def hat_dstar(b: AltForm, s: QuatStructure) -> MixedTorsion:
    if b.degree != 3:
        raise DegreeError("hat_dstar acts on 3-forms")
    return MixedTorsion.from_flat(s.dim, hat_matrix(s) @ b.coeffs)


def dstar_matrix(s: QuatStructure) -> np.ndarray:
    """Matrix (N3 x dim*N4) of the first-slot contraction (with minus)."""

    def build():
        dim, tab = s.dim, s.tab
        N3, N4 = tab.nforms(3), tab.nforms(4)
        t, r, u, sign = tab.c12_table()
        D = np.zeros((N3, dim, N4))
        np.add.at(D, (t, r, u), -sign)
        return D.reshape(N3, dim * N4)

    return s.cache("dstar_matrix", build)
