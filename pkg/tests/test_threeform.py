"""Three-form analysis: xi maps, projectors, membership rows, right inverse."""

import math

import numpy as np
import pytest

from aqh import (
    AltForm,
    contract12,
    hat_dstar,
        interior,
    is_in_W,
    proj3,
        table1_member,
    table1_residuals,
    wedge1,
    xi,
    xi_triple,
)
from aqh.structure import AXES
from aqh.threeform import (
    TABLE1_COMPONENTS,
    proj3_matrix,
    )


def rand3(rng, dim):
    return AltForm(dim, 3, rng.standard_normal(math.comb(dim, 3)))


def brute_xi(b, s):
    """Independent evaluation of the defining double contraction."""
    d = b.dense()
    out = np.zeros(s.dim)
    for ax in AXES:
        A = s.mats[ax]
        out += np.einsum("sr,rsy,yx->x", A, d, A)
    return out / (12 * s.k2)


def test_xi_matches_brute_force(s2, s3, rng):
    for s in (s2, s3):
        b = rand3(rng, s.dim)
        np.testing.assert_allclose(xi(b, s), brute_xi(b, s), atol=1e-12)


def test_xi_on_hook_forms(s2, rng):
    x = rng.standard_normal(8)
    b = interior(x, s2.Omega)
    np.testing.assert_allclose(xi(b, s2), x, atol=1e-12)
    tri = xi_triple(b, s2)
    for ax in AXES:
        np.testing.assert_allclose(tri[ax], x, atol=1e-12)


def test_xi_zero_cases(s2, rng):
    assert np.abs(xi(AltForm.zero(8, 3), s2)).max() == 0.0
    bK = proj3(rand3(rng, 8), "KH", s2)
    assert np.abs(xi(bK, s2)).max() / bK.norm() < 1e-12
    tri = xi_triple(bK, s2)
    for ax in AXES:
        assert np.abs(tri[ax]).max() / bK.norm() < 1e-12


def test_xi_triple_mean(s2, rng):
    # the global one-form is the mean of the triple on projected input
    b = proj3(rand3(rng, 8), "EHS3H", s2)
    tri = xi_triple(b, s2)
    mean = (tri.xi_I + tri.xi_J + tri.xi_K) / 3.0
    np.testing.assert_allclose(tri.xi, mean, atol=1e-12)


def test_es3h_parameterization(s2, rng):
    # b = -2 sum_A (A z_A) ^ w_A with sum z_A = 0 lies in ES3H: xi = 0 and
    # the triple recovers the z's
    z = {ax: rng.standard_normal(8) for ax in ("I", "J")}
    z["K"] = -z["I"] - z["J"]
    b = AltForm.zero(8, 3)
    for ax in AXES:
        b = b + (-2.0) * wedge1(s2.mats[ax] @ z[ax], s2.omega[ax])
    assert np.abs(xi(b, s2)).max() < 1e-12
    tri = xi_triple(b, s2)
    for ax in AXES:
        np.testing.assert_allclose(tri[ax], z[ax], atol=1e-12)
    assert table1_member(b, "E.S3H", s2)


def test_proj3_traces_and_algebra(s2, s3):
    want = {2: {"KH": 32, "EH": 8, "L3ES3H": 0, "ES3H": 16},
            3: {"KH": 128, "EH": 12, "L3ES3H": 56, "ES3H": 24}}
    for s in (s2, s3):
        mats = {lab: proj3_matrix(s, lab) for lab in want[s.n]}
        for lab, tr in want[s.n].items():
            assert np.trace(mats[lab]) == pytest.approx(tr, abs=1e-8)
        total = sum(mats.values())
        assert np.abs(total - np.eye(s.tab.nforms(3))).max() < 1e-10
        for lab, P in mats.items():
            assert np.abs(P @ P - P).max() < 1e-10
        assert np.trace(proj3_matrix(s, "EHS3H")) == pytest.approx(12 * s.n)


def test_proj3_decomposition_consistency(s2, rng):
    b = rand3(rng, 8)
    lhs = proj3(b, "EH", s2) + proj3(b, "KH", s2)
    rhs = proj3(b, "plus3", s2)
    np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-12)


def test_proj3_rejects_unknown_label(s2, rng):
    with pytest.raises(KeyError):
        proj3(rand3(rng, 8), "nope", s2)


def test_l3es3h_projector_vanishes_at_dim8(s2):
    assert np.linalg.norm(proj3_matrix(s2, "L3ES3H")) < 1e-10


def test_table1_members_and_rejections(s3, rng):
    b = rand3(rng, 12)
    parts = {lab: proj3(b, lab, s3) for lab in ("KH", "EH", "L3ES3H", "ES3H")}
    for row_id, comps in TABLE1_COMPONENTS.items():
        member = AltForm.zero(12, 3)
        for lab in comps:
            member = member + parts[lab]
        if member.norm() > 1e-10:
            assert table1_member(member, row_id, s3), row_id
        outside = [lab for lab in parts if lab not in comps]
        if outside and row_id != "full":
            nm = member + parts[outside[0]]
            assert not table1_member(nm, row_id, s3, tol=1e-6), row_id


def test_table1_zero_in_every_row(s2):
    z = AltForm.zero(8, 3)
    for row_id in TABLE1_COMPONENTS:
        assert table1_member(z, row_id, s2)


def test_table1_hook_form_is_EH(s2, rng):
    b = interior(rng.standard_normal(8), s2.Omega)
    assert table1_member(b, "EH", s2)
    assert max(table1_residuals(b, "EH", s2)) / b.norm() < 1e-12


def test_table1_es3h_prefix_readings(s3, rng):
    # of the two displayed variants for the "KH+E.S3H" row, only the one
    # with the extra complex-structure action annihilates members
    b = rand3(rng, 12)
    mix = proj3(b, "KH", s3) + proj3(b, "ES3H", s3)
    with_prefix = max(table1_residuals(mix, "KH+E.S3H", s3,
                                       es3h_prefix=True)) / mix.norm()
    without = max(table1_residuals(mix, "KH+E.S3H", s3,
                                   es3h_prefix=False)) / mix.norm()
    assert with_prefix < 1e-9
    assert without > 1e-2


def test_hat_dstar_zero(s2):
    assert hat_dstar(AltForm.zero(8, 3), s2).norm() == 0.0


def test_hat_dstar_right_inverse(s2, s3, rng):
    for s in (s2, s3):
        for _ in range(20):
            b = rand3(rng, s.dim)
            back = contract12(hat_dstar(b, s))
            assert np.linalg.norm(back.coeffs - b.coeffs) / b.norm() < 1e-9


def test_hat_dstar_lands_in_torsion_space(s2, s3, rng):
    for s in (s2, s3):
        h = hat_dstar(rand3(rng, s.dim), s)
        ok, resid = is_in_W(h, s)
        assert ok, resid


def test_hat_dstar_inverts_contraction_of_members(s3, pool3):
    import aqh.projectors as PR

    # for b := d*a the right inverse rebuilds each visible component of a
    a = sum(pool3.values(), start=list(pool3.values())[0] * 0.0)
    ds = contract12(a)
    for X, lab in ((PR.ComponentLabel.KH, "KH"), (PR.ComponentLabel.EH, "EH"),
                   (PR.ComponentLabel.ES3H, "ES3H"),
                   (PR.ComponentLabel.L3ES3H, "L3ES3H")):
        part = hat_dstar(proj3(ds, lab, s3), s3)
        assert np.linalg.norm(part.rows - pool3[X].rows) / a.norm() < 1e-9


def test_xi_equivariance_under_rotation(s2, rng):
    from aqh import random_rotation, rotate_adapted

    b = rand3(rng, 8)
    s_new = rotate_adapted(random_rotation(rng), s2)
    np.testing.assert_allclose(xi(b, s_new), xi(b, s2), atol=1e-10)
    # the triple transforms, its reassembly does not
    t_old = xi_triple(b, s2)
    t_new = xi_triple(b, s_new)
    old = AltForm.zero(8, 3)
    new = AltForm.zero(8, 3)
    for ax in AXES:
        old = old + wedge1(s2.mats[ax] @ t_old[ax], s2.omega[ax])
        new = new + wedge1(s_new.mats[ax] @ t_new[ax], s_new.omega[ax])
    np.testing.assert_allclose(new.coeffs, old.coeffs, atol=1e-10)
