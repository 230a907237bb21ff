"""The torsion space W: fiber, embedding, extraction, membership."""


import numpy as np
import pytest

from aqh import (
        F_inverse,
    F_map,
    MembershipError,
    MixedTorsion,
    MixedTwoFormFamily,
    extract_cA,
    fiber_project,
    from_nabla_omegas,
    is_in_W,
    random_W_element,
    w_dim,
)
from aqh.structure import AXES
from aqh.torsion import (
    f_inverse_raw,
    family_conditions,
    fiber_basis_matrix,
    fiber_residuals,
    reassemble,
)


def random_family(s, seed):
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((s.dim,) * 3)
    return MixedTwoFormFamily(s.dim, raw - raw.transpose(0, 2, 1))


def test_fiber_projector_idempotent(s2):
    c = random_family(s2, 0)
    p1 = fiber_project(c, s2)
    p2 = fiber_project(p1, s2)
    np.testing.assert_allclose(p1.mats, p2.mats, atol=1e-12)
    r1, r2 = fiber_residuals(p1, s2)
    assert max(r1, r2) / p1.norm() < 1e-10


def test_fiber_projector_kills_kahler_rows(s2):
    rows = np.tile(s2.I, (8, 1, 1))
    out = fiber_project(MixedTwoFormFamily(8, rows), s2)
    assert out.norm() < 1e-12


def test_conjugation_sum_eigenvalues(s2):
    # T c = sum_A c(A., A.) has eigenvalues exactly {3, -1} on 2-forms
    N2 = s2.tab.nforms(2)
    pairs = np.asarray(s2.tab.tuples(2))
    T = np.zeros((N2, N2))
    for col in range(N2):
        M = np.zeros((8, 8))
        i, j = pairs[col]
        M[i, j], M[j, i] = 1.0, -1.0
        img = sum(s2.mats[ax].T @ M @ s2.mats[ax] for ax in AXES)
        T[:, col] = img[pairs[:, 0], pairs[:, 1]]
    ev = np.linalg.eigvalsh(0.5 * (T + T.T))
    assert np.abs((ev - 3.0) * (ev + 1.0)).max() < 1e-9


def test_F_zero_and_validation(s2):
    z = MixedTwoFormFamily.zero(8)
    assert F_map(z, s2).norm() == 0.0
    c = random_family(s2, 1)  # not in the fiber
    with pytest.raises(MembershipError):
        F_map(c, s2)


def test_F_round_trips(s2, s3):
    for s in (s2, s3):
        for seed in range(20):
            c = fiber_project(random_family(s, seed), s)
            a = F_map(c, s)
            back = f_inverse_raw(a, s)
            assert np.linalg.norm(back.mats - c.mats) / c.norm() < 1e-9
            again = F_map(back, s, check=False)
            assert np.linalg.norm(again.rows - a.rows) / a.norm() < 1e-9


def test_F_inverse_output_in_fiber(s2):
    a = random_W_element(s2, 3)
    c = F_inverse(a, s2)
    r1, r2 = fiber_residuals(c, s2)
    assert max(r1, r2) / c.norm() < 1e-9


def test_F_inverse_rejects_non_members(s2):
    bad = MixedTorsion(8, np.tile(s2.Omega.coeffs, (8, 1)))
    with pytest.raises(MembershipError):
        F_inverse(bad, s2)


def test_embedded_rows_have_L_eigenvalue_two(s2):
    a = random_W_element(s2, 4)
    L4 = s2.L_matrix(4)
    assert np.linalg.norm(a.rows @ L4.T - 2 * a.rows) / a.norm() < 1e-12


def test_is_in_W(s2):
    a = random_W_element(s2, 5)
    ok, resid = is_in_W(a, s2)
    assert ok and resid < 1e-12
    bad = MixedTorsion(8, np.tile(s2.Omega.coeffs, (8, 1)))
    ok, resid = is_in_W(bad, s2)
    assert not ok and resid > 1e-3


def test_extract_cA_conditions_and_reassembly(s2, s3):
    for s in (s2, s3):
        a = random_W_element(s, 6)
        cA = extract_cA(a, s)
        conds = family_conditions(cA, s)
        assert max(conds.values()) / a.norm() < 1e-9
        re = reassemble(cA, s)
        assert np.linalg.norm(re.rows - a.rows) / a.norm() < 1e-9


def test_extract_cA_zero(s2):
    cA = extract_cA(MixedTorsion.zero(8), s2)
    assert all(v.norm() == 0.0 for v in cA.values())


def test_from_nabla_omegas_validation(s2):
    bad = random_family(s2, 7)
    with pytest.raises(MembershipError):
        from_nabla_omegas(bad, bad, bad, s2)


def test_from_nabla_omegas_matches_direct_derivative(s2):
    from aqh import koszul, nabla_Omega, nabla_omega, two_step_nilpotent

    g = two_step_nilpotent(2, 11)
    G = koszul(g)
    direct = nabla_Omega(g, G)
    nw = {a: nabla_omega(g, G, a) for a in AXES}
    assembled = from_nabla_omegas(2.0 * nw["I"], 2.0 * nw["J"],
                                  2.0 * nw["K"], s2)
    assert np.linalg.norm(assembled.rows - direct.rows) / direct.norm() < 1e-12


def test_extracted_triple_traces_vanish(s2):
    # after extraction every row of c_I is trace-free against w_J, w_K
    a = random_W_element(s2, 8)
    cA = extract_cA(a, s2)
    for name in AXES:
        for bname in AXES:
            tr = 0.5 * np.einsum("xij,ij->x", cA[name].mats, s2.mats[bname])
            assert np.abs(tr).max() / a.norm() < 1e-9


def test_random_W_element_determinism(s2):
    a = random_W_element(s2, 12)
    b = random_W_element(s2, 12)
    np.testing.assert_array_equal(a.rows, b.rows)
    c = random_W_element(s2, 13)
    gram = np.array([
        [np.sum(a.rows * a.rows), np.sum(a.rows * c.rows)],
        [np.sum(c.rows * a.rows), np.sum(c.rows * c.rows)]])
    assert np.linalg.det(gram) > 1e-6


def test_torsion_space_dimension(s2, s3):
    for s, expected in ((s2, 120), (s3, 504)):
        assert w_dim(s.n) == expected
        Q = fiber_basis_matrix(s)
        assert s.dim * Q.shape[1] == expected
        samples = np.stack([random_W_element(s, 900 + i).flat()
                            for i in range(expected + 12)])
        sv = np.linalg.svd(samples, compute_uv=False)
        assert int((sv > sv[0] * 1e-10).sum()) == expected
