import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stressfree.ngon_geometry import (
    build_config,
    necessary_angle,
    polygon_area,
    quartic_coefficients,
    quartic_roots,
    radius_ratio,
    stretch_a,
    verify_isneg,
)

ns = st.integers(3, 40)
alphas = st.floats(0.01, 0.99)

# Frozen from a 40-digit mpmath evaluation of the same closed form.
RADIUS_ORACLE = {(3, 0.25): 0.31783724519578224, (10, 0.3): 0.74617616829740298, (7, 0.3): 0.65317452945633303}


@pytest.mark.parametrize("key", sorted(RADIUS_ORACLE))
def test_radius_ratio_oracle(key):
    assert radius_ratio(*key) == pytest.approx(RADIUS_ORACLE[key], abs=1e-15)


def test_radius_ratio_symmetric_square():
    assert radius_ratio(4, 0.5) == pytest.approx(math.sqrt(2) - 1, abs=1e-15)


def test_radius_ratio_large_n_expansion():
    for al in (0.2, 0.5, 0.7):
        errs = [abs(radius_ratio(n, al) - (1 - 2 * math.pi * math.sqrt(al * (1 - al)) / n)) * n * n for n in (100, 400, 1600)]
        assert max(errs) < 50.0
        assert errs[-1] == pytest.approx(errs[-2], rel=0.05)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.5])
def test_domain_errors(bad):
    with pytest.raises(ValueError):
        radius_ratio(5, bad)
    with pytest.raises(ValueError):
        stretch_a(5, bad)
    with pytest.raises(ValueError):
        build_config(5, bad)


def test_n_too_small():
    with pytest.raises(ValueError):
        build_config(2, 0.3)


def test_stretch_a_examples():
    assert stretch_a(7, 0.5) == pytest.approx(1.0, abs=1e-15)
    assert stretch_a(3, 0.25) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert stretch_a(5, 1e-6) > 1e2


@given(ns, alphas, alphas)
def test_stretch_a_decreasing(n, a1, a2):
    if abs(a1 - a2) < 1e-9:
        return
    lo, hi = sorted((a1, a2))
    assert stretch_a(n, lo) > stretch_a(n, hi)


@given(ns, alphas)
def test_config_invariants(n, al):
    cfg = build_config(n, al)
    assert 0.0 < cfg.r_I < 1.0
    assert cfg.r_I == pytest.approx(radius_ratio(n, al), abs=1e-12)
    assert cfg.tiling_residual() <= 1e-12
    assert cfg.measured_angle() == pytest.approx(necessary_angle(n), abs=1e-12)
    assert cfg.l1 / cfg.l2 == pytest.approx(stretch_a(n, al), rel=1e-12)
    # all triangles carry the same orientation
    assert len(set(cfg.triangle_signs().tolist())) == 1


def test_config_n10():
    cfg = build_config(10, 0.3)
    assert cfg.triangles.shape == (20, 3)
    assert cfg.tiling_residual() <= 1e-12


def test_triangle_rule():
    cfg = build_config(5, 0.3)
    n = cfg.n
    # vertex numbering: E_k -> k-1, I_k -> n + k-1
    assert list(cfg.triangles[0]) == [0, n + n - 1, n]  # T1 = (E1, I_n, I1)
    assert list(cfg.triangles[1]) == [0, n, 1]  # T2 = (E1, I1, E2)


def test_symmetric_triangle_is_rotated_dual():
    cfg = build_config(3, 0.5)
    ang = np.arctan2(cfg.I[:, 1], cfg.I[:, 0]) - np.arctan2(cfg.E[:, 1], cfg.E[:, 0])
    assert np.allclose(np.mod(ang, 2 * math.pi), math.pi / 3, atol=1e-14)
    assert cfg.r_I == pytest.approx(2 - math.sqrt(3), abs=1e-15)  # (1 - sin(pi/3)) / cos(pi/3)
    assert cfg.tiling_residual() <= 1e-12


def test_scale():
    a = build_config(6, 0.3, r_E=2.0)
    b = build_config(6, 0.3)
    assert np.allclose(a.vertices, 2 * b.vertices, atol=1e-15)
    assert polygon_area(a.E) == pytest.approx(4 * polygon_area(b.E))


def test_json_fields():
    d = build_config(4, 0.3).to_json()
    assert set(d) == {"n", "alpha", "rE", "rI", "E", "I", "triangles"}


# ---------------------------------------------------------------- quartic

def test_exactly_one_admissible_root_grid():
    for n in range(3, 51):
        for k in range(1, 100):
            rep = quartic_roots(n, k / 100)
            assert rep.admissible == [0], (n, k)
            assert rep.roots[0].real == pytest.approx(radius_ratio(n, k / 100), abs=1e-12)
            if rep.real[1]:
                assert rep.roots[1].real >= 1.0


def test_fourth_root_excluded_for_hexagon():
    rep = quartic_roots(6, 0.3)
    assert math.isnan(rep.roots[3].real)
    assert 3 not in rep.admissible


@pytest.mark.parametrize("n,al", [(3, 0.1), (5, 0.3), (8, 0.47), (20, 0.8)])
def test_root_matches_polynomial_solver(n, al):
    roots = np.roots(quartic_coefficients(n, al))
    real = roots[np.abs(roots.imag) < 1e-9].real
    assert np.min(np.abs(real - radius_ratio(n, al))) <= 1e-10


def test_isneg():
    for n in range(5, 51):
        for k in range(1, 100):
            assert verify_isneg(n, k / 100) < 0.0
    assert verify_isneg(10, 0.5) < 0.0
    al = 0.3
    asym = -4 * math.pi**3 / 200**3 * math.sqrt(al * (1 - al))
    assert verify_isneg(200, al) / asym == pytest.approx(1.0, abs=0.2)
    with pytest.raises(ValueError):
        verify_isneg(3, 0.3)
