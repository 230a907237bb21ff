"""The intrinsic-torsion space W inside V* (x) Lambda^4 V*.

W is the image of the fiber of admissible mixed 2-form families under the
row-wise embedding

    F(c)_x = (1/4) sum_A i_A(c_x) ^ w_A,

where the fiber consists of the c whose rows satisfy

    i)*   c_x + sum_A c_x(A., A.) = 0
    ii)*  <c_x, w_A> = 0           for A = I, J, K.

Because F acts row by row, W = V* (x) W4 for a fixed subspace W4 of 4-forms;
every row of a W element satisfies L(row) = 2 row, and the inverse of F is

    -8n c(x, y, z) = <x hook a, y ^ (z hook Omega) - z ^ (y hook Omega)>.
"""

from __future__ import annotations

import math

import numpy as np

from .exterior import (
        MixedTorsion,
    MixedTwoFormFamily,
    interior,
    tables,
    wedge22_rows,
)
from .structure import AXES, QuatStructure


class MembershipError(ValueError):
    """Raised when a tensor fails a required subspace membership test."""


def w_dim(n: int) -> int:
    """dim W = 4n * 3(2n+1)(n-1)."""
    return 4 * n * 3 * (2 * n + 1) * (n - 1)


def fiber_residuals(c: MixedTwoFormFamily, s: QuatStructure) -> tuple[float, float]:
    """Residual norms of the two fiber conditions, not normalised."""
    T = sum(s.mats[a].T @ c.mats @ s.mats[a] for a in AXES)
    res_i = float(np.linalg.norm(c.mats + T)) / math.sqrt(2.0)
    res_ii = 0.0
    for a in AXES:
        tr = 0.5 * np.einsum("xij,ij->x", c.mats, s.mats[a])
        res_ii += float(np.linalg.norm(tr)) ** 2
    return res_i, math.sqrt(res_ii)


def fiber_project(c: MixedTwoFormFamily, s: QuatStructure) -> MixedTwoFormFamily:
    """Row-wise orthogonal projection onto the fiber: with T = sum_A c(A., A.)
    take (3c - Tc)/4, then remove the w_A traces."""
    T = sum(s.mats[a].T @ c.mats @ s.mats[a] for a in AXES)
    out = (3.0 * c.mats - T) / 4.0
    for a in AXES:
        A = s.mats[a]
        tr = 0.5 * np.einsum("xij,ij->x", out, A)
        out = out - tr[:, None, None] / (2 * s.n) * A
    return MixedTwoFormFamily(c.dim, out)


def F_map(c: MixedTwoFormFamily, s: QuatStructure, check: bool = True,
          tol: float = 1e-8) -> MixedTorsion:
    if check:
        scale = max(c.norm(), 1e-300)
        r1, r2 = fiber_residuals(c, s)
        if max(r1, r2) > tol * scale:
            raise MembershipError(
                f"input is outside the fiber: residuals "
                f"{r1 / scale:.2e}, {r2 / scale:.2e}")
    rows = np.zeros((c.dim, math.comb(c.dim, 4)))
    for a in AXES:
        A = s.mats[a]
        iA = -(A.T @ c.mats + c.mats @ A)
        rows += 0.25 * wedge22_rows(iA, A)
    return MixedTorsion(c.dim, rows)


def _hook_omega_table(s: QuatStructure) -> np.ndarray:
    """G[y, z] = coefficients of y ^ (z hook Omega) for basis vectors y, z."""

    def build():
        dim = s.dim
        N4 = math.comb(dim, 4)
        G = np.zeros((dim, dim, N4))
        eye = np.eye(dim)
        for z in range(dim):
            zo = interior(eye[z], s.Omega)
            for y in range(dim):
                u, _m, r, t, sign = tables(dim).exp_table(4)
                vals = sign * eye[y][r] * zo.coeffs[t]
                G[y, z] = np.bincount(u, weights=vals, minlength=N4)
        return G

    return s.cache("hook_omega_table", build)


def f_inverse_raw(a: MixedTorsion, s: QuatStructure) -> MixedTwoFormFamily:
    """The contraction inverse of F, valid on W (no membership check)."""
    G = _hook_omega_table(s)
    c = np.einsum("xc,yzc->xyz", a.rows, G)
    c = c - c.transpose(0, 2, 1)
    return MixedTwoFormFamily(a.dim, -c / (8 * s.n))


def F_inverse(a: MixedTorsion, s: QuatStructure, tol: float = 1e-8) -> MixedTwoFormFamily:
    ok, resid = is_in_W(a, s, tol)
    if not ok:
        raise MembershipError(
            f"tensor is not in the torsion space (residual {resid:.2e})")
    return f_inverse_raw(a, s)


def is_in_W(a: MixedTorsion, s: QuatStructure, tol: float = 1e-8) -> tuple[bool, float]:
    """Membership test: every row in the L = 2 eigenspace of L on 4-forms,
    and the F round trip reproduces the tensor."""
    scale = max(a.norm(), 1e-300)
    L4 = s.L_matrix(4)
    row_resid = float(np.linalg.norm(a.rows @ L4.T - 2.0 * a.rows)) / scale
    back = F_map(f_inverse_raw(a, s), s, check=False)
    rt_resid = float(np.linalg.norm(back.rows - a.rows)) / scale
    resid = max(row_resid, rt_resid)
    return resid <= tol, resid


def extract_cA(a: MixedTorsion, s: QuatStructure,
               tol: float = 1e-8) -> dict[str, MixedTwoFormFamily]:
    """The unique triple with a = sum_A c_A ^ w_A:
    -4n c_A(x; y, z) = sum_r a(x; y, z, e_r, A e_r)."""
    ok, resid = is_in_W(a, s, tol)
    if not ok:
        raise MembershipError(
            f"tensor is not in the torsion space (residual {resid:.2e})")
    dim = a.dim
    flat, sign = tables(dim).dense_table(4)
    out = {}
    dense = np.zeros((dim, dim ** 4))
    for k in range(flat.shape[0]):
        dense[:, flat[k]] = sign[k] * a.rows
    dense = dense.reshape((dim,) * 5)
    for name in AXES:
        A = s.mats[name]
        mats = np.einsum("xyzrs,sr->xyz", dense, A) / (-4 * s.n)
        out[name] = MixedTwoFormFamily(dim, mats)
    return out


def family_conditions(cA: dict[str, MixedTwoFormFamily],
                      s: QuatStructure) -> dict[str, float]:
    """Residuals of the three conditions satisfied by the c_A triple:
    i) c_A(x; A., A.) = -c_A, ii) the cyclic mixed-insertion sum vanishes,
    iii) all w_B traces vanish."""
    I, J, K = s.I, s.J, s.K
    res_i = 0.0
    for name in AXES:
        A = s.mats[name]
        res_i += float(np.linalg.norm(
            A.T @ cA[name].mats @ A + cA[name].mats)) ** 2
    # I_(2)J_(3)c_K + J_(2)K_(3)c_I + K_(2)I_(3)c_J = 0
    mix = (I.T @ cA["K"].mats @ J + J.T @ cA["I"].mats @ K
           + K.T @ cA["J"].mats @ I)
    res_ii = float(np.linalg.norm(mix))
    res_iii = 0.0
    for name in AXES:
        for bname in AXES:
            tr = 0.5 * np.einsum("xij,ij->x", cA[name].mats, s.mats[bname])
            res_iii += float(np.linalg.norm(tr)) ** 2
    return {"i": math.sqrt(res_i), "ii": res_ii, "iii": math.sqrt(res_iii)}


def reassemble(cA: dict[str, MixedTwoFormFamily], s: QuatStructure) -> MixedTorsion:
    """sum_A c_A ^ w_A, the wedge acting on the form slots only."""
    rows = np.zeros((s.dim, math.comb(s.dim, 4)))
    for name in AXES:
        rows += wedge22_rows(cA[name].mats, s.mats[name])
    return MixedTorsion(s.dim, rows)


def from_nabla_omegas(dI: MixedTwoFormFamily, dJ: MixedTwoFormFamily,
                      dK: MixedTwoFormFamily, s: QuatStructure,
                      tol: float = 1e-6) -> MixedTorsion:
    """Assemble sum_A d_A ^ w_A from d_A = 2 nabla w_A, after validating the
    two admissibility conditions i)', ii)' the d_A must satisfy."""
    dA = {"I": dI, "J": dJ, "K": dK}
    scale = max(max(d.norm() for d in dA.values()), 1e-300)
    res_i = {}
    for name in AXES:
        A = s.mats[name]
        res_i[name] = float(np.linalg.norm(
            A.T @ dA[name].mats @ A + dA[name].mats)) / scale
    I, J, K = s.I, s.J, s.K
    mix = (I.T @ dA["K"].mats @ J + J.T @ dA["I"].mats @ K
           + K.T @ dA["J"].mats @ I)
    res_ii = float(np.linalg.norm(mix)) / scale
    if max(max(res_i.values()), res_ii) > tol:
        raise MembershipError(
            "input two-form families are not admissible: "
            + ", ".join(f"i)'[{k}]={v:.2e}" for k, v in res_i.items())
            + f", ii)'={res_ii:.2e}")
    return reassemble(dA, s)


def fiber_basis_matrix(s: QuatStructure) -> np.ndarray:
    """Orthonormal basis Q (N4 x r) of the 4-form subspace F(fiber rows);
    W = V* (x) span(Q)."""

    def build():
        dim, tab = s.dim, s.tab
        N2 = tab.nforms(2)
        cols = []
        for k in range(N2):
            rows = np.zeros((dim, N2))
            rows[0, k] = 1.0
            fam = MixedTwoFormFamily.from_coeff_rows(dim, rows)
            img = F_map(fiber_project(fam, s), s, check=False)
            cols.append(img.rows[0])
        M = np.stack(cols, axis=1)
        u, sv, _ = np.linalg.svd(M, full_matrices=False)
        r = w_dim(s.n) // dim
        if not (sv[r - 1] > 1e-10 and (len(sv) <= r or sv[r] < 1e-10)):
            raise MembershipError("unexpected fiber rank")
        return u[:, :r]

    return s.cache("fiber_basis", build)


def w_coords(a: MixedTorsion, s: QuatStructure) -> np.ndarray:
    """Coordinates of a in the orthonormal W basis (dim x r, flattened)."""
    Q = fiber_basis_matrix(s)
    return (a.rows @ Q).reshape(-1)


def w_embed(coords: np.ndarray, s: QuatStructure) -> MixedTorsion:
    Q = fiber_basis_matrix(s)
    rows = coords.reshape(s.dim, Q.shape[1]) @ Q.T
    return MixedTorsion(s.dim, rows)


def w_operator_matrix(op, s: QuatStructure) -> np.ndarray:
    """Matrix of a W-preserving operator in the orthonormal W basis."""
    Q = fiber_basis_matrix(s)
    r = Q.shape[1]
    D = s.dim * r
    M = np.zeros((D, D))
    for k in range(D):
        e = np.zeros(D)
        e[k] = 1.0
        M[:, k] = w_coords(op(w_embed(e, s)), s)
    return M


def random_W_element(s: QuatStructure, seed: int) -> MixedTorsion:
    """Gaussian rows, projected to the fiber, pushed through F."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((s.dim, s.dim, s.dim))
    raw = raw - raw.transpose(0, 2, 1)
    fam = fiber_project(MixedTwoFormFamily(s.dim, raw), s)
    return F_map(fam, s, check=False)
