import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stressfree.linalg2 import rotation, svd2
from stressfree.ngon_geometry import build_config, stretch_a
from stressfree.wells import (
    NLCEWellParams,
    alpha_from_a,
    bain_matrix,
    director,
    director_angles,
    dist_to_wells,
    enumerate_wells,
    limit_membership,
    membership_cauchy_green,
    nlce_anisotropy,
    scale_to_nlce,
    symmetry_group,
)

# 40-digit mpmath values of σ1(U) and σ1⁴ at α = 0.1 (λ² + λ⁻² = |U|²).
SIGMA1_ORACLE = {3: 3.6187565847353633, 4: 3.2942562211690878, 5: 3.1760013985509767, 10: 3.0405122067897949}
RN_ORACLE = {3: 171.48948071979802, 4: 117.76859641202529, 5: 101.74726404192972, 10: 85.464745810023848}


def test_identity_at_a_equal_one():
    for n in (3, 4, 9):
        assert np.allclose(bain_matrix(n, 1.0).U, np.eye(2), atol=1e-15)


@pytest.mark.parametrize("n", [3, 5, 8, 13])
def test_bain_invariants(n):
    al = 0.3
    cfg = build_config(n, al)
    a = stretch_a(n, al)
    W = bain_matrix(n, a, cfg.e11)
    assert np.linalg.det(W.U) == pytest.approx(1.0, abs=1e-13)
    # U e11 = a e11 and the second edge is shortened by 1/a
    assert np.allclose(W.U @ cfg.e11, a * cfg.e11, atol=1e-12)
    assert np.linalg.norm(W.U @ cfg.en1) == pytest.approx(1.0 / a, abs=1e-12)
    # flipping (e11, e11⊥) together leaves U unchanged
    assert np.allclose(bain_matrix(n, a, -cfg.e11).U, W.U, atol=1e-15)


def test_frame_lookup_matches_config():
    cfg = build_config(7, 0.2)
    a = stretch_a(7, 0.2)
    assert alpha_from_a(7, a) == pytest.approx(0.2, abs=1e-13)
    assert np.allclose(bain_matrix(7, a).U, bain_matrix(7, a, cfg.e11).U, atol=1e-12)


def test_bain_rejects_bad_a():
    with pytest.raises(ValueError):
        bain_matrix(3, 0.0)
    with pytest.raises(ValueError):
        bain_matrix(3, -1.0)


@pytest.mark.parametrize("n", sorted(SIGMA1_ORACLE))
def test_sigma1_oracle(n):
    U = bain_matrix(n, stretch_a(n, 0.1)).U
    assert svd2(U).s1 == pytest.approx(SIGMA1_ORACLE[n], abs=1e-12)
    assert nlce_anisotropy(n, stretch_a(n, 0.1)) == pytest.approx(RN_ORACLE[n], rel=1e-12)


def test_anisotropy_reference_values():
    for n, target in ((3, 171), (4, 118), (5, 102), (10, 85)):
        assert abs(nlce_anisotropy(n, stretch_a(n, 0.1)) - target) <= 1.0
    assert abs(nlce_anisotropy(50, stretch_a(50, 0.35)) - 3.5) <= 0.05
    for n in (3, 6, 11):
        assert nlce_anisotropy(n, stretch_a(n, 0.5)) == pytest.approx(1.0, abs=1e-14)


def test_offdiagonal_vanishes_for_large_n():
    W = bain_matrix(10_000, 2.0, np.array([1.0, 0.0]))
    assert abs(W.U[0, 1]) < 1e-3


@pytest.mark.parametrize("n", [3, 4, 7, 12])
def test_symmetry_group(n):
    G = symmetry_group(n, build_config(n, 0.3).e11)
    assert len(G) == 2 * n
    assert any(np.allclose(P, np.eye(2)) for P in G.elements)
    assert G.closure_residual() <= 1e-12
    dets = [np.linalg.det(P) for P in G.elements]
    assert sum(d < 0 for d in dets) == n
    if n == 4:
        assert any(np.allclose(P, rotation(math.pi / 2), atol=1e-15) for P in G.elements)


def test_well_counts():
    assert len(enumerate_wells(3, 1.0).wells) == 1
    assert len(enumerate_wells(3, math.sqrt(2)).wells) == 6
    assert len(enumerate_wells(4, 2.0).wells) == 4
    for n in range(3, 12):
        m = len(enumerate_wells(n, stretch_a(n, 0.3)).wells)
        assert m == (2 * n if n % 2 else n)


@given(st.integers(3, 15), st.floats(0.05, 0.95))
def test_wells_share_singular_values(n, al):
    W = enumerate_wells(n, stretch_a(n, al))
    s = W.singular_values()
    assert np.abs(s - s[0]).max() <= 1e-12 * max(1.0, s[0, 0])
    assert np.allclose(np.linalg.det(W.wells), 1.0, atol=1e-12)
    for M in W.wells:
        assert limit_membership(M, s[0, 0], 1e-10)


def test_cauchy_green_membership():
    W = enumerate_wells(5, stretch_a(5, 0.3))
    ok, d = membership_cauchy_green(W.U, W)
    assert ok and d <= 1e-14
    ok, d = membership_cauchy_green(rotation(0.7) @ W.U, W)
    assert ok and d <= 1e-13
    with pytest.raises(ValueError):
        membership_cauchy_green(np.diag([1.0, -1.0]), W)


def test_cauchy_green_agrees_with_coset_distance():
    rng = np.random.default_rng(5)
    for _ in range(2000):
        n = int(rng.integers(3, 9))
        W = enumerate_wells(n, stretch_a(n, float(rng.uniform(0.1, 0.9))))
        F = rotation(rng.uniform(-3, 3)) @ W.wells[int(rng.integers(len(W.wells)))]
        if rng.random() < 0.5:
            F = F + rng.uniform(1e-4, 0.1) * rng.normal(size=(2, 2))
        if np.linalg.det(F) <= 0:
            continue
        assert membership_cauchy_green(F, W, 1e-8)[0] == (dist_to_wells(F, W) <= 1e-8)


def test_non_member_distance_bounded_below_by_singular_gap():
    W = enumerate_wells(4, 2.0)
    F = np.diag([1.5, 1 / 1.5])
    s = svd2(W.U)
    gap = math.hypot(s.s1 - 1.5, s.s2 - 1 / 1.5)
    assert dist_to_wells(F, W) >= gap - 1e-12
    assert not membership_cauchy_green(F, W)[0]


def test_limit_membership_examples():
    assert limit_membership(np.diag([2.0, 0.5]), 2.0)
    assert limit_membership(np.diag([2.0, 0.5]), 0.5)
    assert not limit_membership(np.eye(2), 2.0)


def test_nlce_scaling():
    r = 3.7
    F = rotation(0.3) @ np.diag([r**0.25, r**-0.25])
    G = scale_to_nlce(F, r)
    assert NLCEWellParams(r).contains(G)
    assert NLCEWellParams(r).det == pytest.approx(r ** (1 / 6))
    assert not NLCEWellParams(r).contains(F)


def test_director():
    d, th = director(np.diag([3.0, 1.0]))
    assert np.allclose(d, [1.0, 0.0]) and th == 0.0
    for psi in (0.3, 1.2, 2.9, -0.4):
        _, th = director(rotation(psi) @ np.diag([3.0, 1.0]))
        assert th == pytest.approx(psi % math.pi, abs=1e-12)
    with pytest.raises(ValueError):
        director(np.eye(2))


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(1.1, 5.0))
def test_director_is_top_eigenvector(psi, chi, s):
    F = rotation(psi) @ np.diag([s, 1 / s]) @ rotation(chi)
    d, th = director(F)
    w, V = np.linalg.eigh(F @ F.T)
    assert abs(abs(d @ V[:, 1]) - 1.0) <= 1e-10
    assert 0.0 <= th < math.pi
    assert director_angles(F[None])[0] == pytest.approx(th, abs=1e-12)
