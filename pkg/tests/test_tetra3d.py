import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stressfree import tetra3d
from stressfree.tetra3d import (
    R_MAX,
    SIMPLICES,
    build,
    build_vertex,
    build_x3,
    exact_det_residual,
    grid,
    region_classes,
    rotation3,
    shear_form,
    singular_value_scan,
)

rs = st.floats(0.02, 0.32)
x3_thetas = st.floats(0.01, math.pi / 2 - 0.01)


def test_rotation3():
    R = rotation3([0, 0, 1], math.pi / 2)
    assert np.allclose(R @ [1, 0, 0], [0, 1, 0], atol=1e-15)
    assert np.allclose(R @ R.T, np.eye(3), atol=1e-15)
    assert np.linalg.det(rotation3([1, 2, 3], 0.7)) == pytest.approx(1.0)


def test_parameter_checks():
    with pytest.raises(ValueError):
        build_x3(0.4, 0.3)
    with pytest.raises(ValueError):
        build_x3(0.2, 0.0)
    with pytest.raises(ValueError):
        build_x3(0.2, math.pi / 2)
    with pytest.raises(ValueError):
        build("edge", 0.2, 0.3)
    build_vertex(0.2, -0.3)
    build_vertex(0.2, 0.0)


def test_region_classes():
    assert len(SIMPLICES) == 14
    assert set(region_classes("x3")) == {"capA", "capB", "edge_perp", "edge_obl"}
    assert set(region_classes("vertex")) == {"capA_ax", "capA", "capB_ax", "capB", "edge_ax", "edge_off"}
    assert region_classes("x3").count("edge_perp") == 2


@given(rs, x3_thetas)
def test_x3_construction(r, th):
    c = build_x3(r, th)
    assert c.det_residual() <= 1e-12
    assert c.middle_residual() <= 1e-10
    assert c.facet_continuity() <= 1e-12
    assert c.tiling_valid()


def test_x3_reference_point():
    c = build_x3(0.2, 0.3)
    assert c.volume_residual() <= 1e-14
    for sf in c.red_shears():
        assert sf.s == pytest.approx(2 * math.tan(0.3), abs=1e-12)
        assert abs(sf.b @ sf.m) <= 1e-12
        G = np.eye(3) + sf.s * np.outer(sf.b, sf.m)
        L = sf.frame.T @ G @ sf.frame
        assert L[1, 0] == pytest.approx(sf.s, abs=1e-12)
        assert np.allclose(np.diag(L), 1.0, atol=1e-12)


def test_shear_form_rejects_non_shears():
    with pytest.raises(ValueError):
        shear_form(np.diag([2.0, 1.0, 1.0]))
    with pytest.raises(ValueError):
        shear_form(np.diag([1.5, 0.5, 1.0]))


@given(rs, st.floats(-1.2, 1.2))
def test_vertex_austenite(r, th):
    c = build_vertex(r, th)
    a = c.austenite_residuals()
    assert a["identity"] <= 1e-12 and a["rotation"] <= 1e-12
    assert c.facet_continuity() <= 1e-12


def test_vertex_inverts_at_large_angle():
    assert build_vertex(0.2, 0.3).tiling_valid()
    assert not build_vertex(0.3, 1.5).tiling_valid()


def test_small_angle_tends_to_identity():
    for axis in ("x3", "vertex"):
        c = build(axis, 0.2, 1e-8)
        assert np.abs(c.gradients() - np.eye(3)).max() <= 1e-6


def test_exact_residual_agrees_on_well_conditioned_cell():
    r, th = 0.2, 0.3
    assert exact_det_residual("x3", r, th) <= 1e-30
    assert build_x3(r, th).det_residual() <= 1e-14


def test_tiling_by_sampling():
    # points of T1 \ T2 fall in exactly one deformed-config shell simplex (source side)
    c = build_x3(0.2, 0.3)
    rng = np.random.default_rng(0)
    P = c.points
    X = P[SIMPLICES]
    cover = 0
    for _ in range(400):
        k = rng.integers(len(SIMPLICES))
        w = rng.dirichlet(np.ones(4))
        y = w @ X[k]
        hits = 0
        for s in X:
            M = np.column_stack([s[1] - s[0], s[2] - s[0], s[3] - s[0]])
            lam = np.linalg.solve(M, y - s[0])
            bary = np.concatenate([[1 - lam.sum()], lam])
            hits += bool(np.all(bary > 1e-9))
        cover += hits == 1
    assert cover >= 390  # a few land within 1e-9 of a facet


def test_grid():
    assert np.array_equal(grid(0.0, 1.0, 3), [0.0, 0.5, 1.0])
    assert np.array_equal(grid(0.0, 1.0, 1), [0.5])
    with pytest.raises(ValueError):
        grid(0.0, 1.0, 0)


def test_scan_matches_direct_builds():
    th = grid(0.1, 1.4, 4)
    rr = grid(0.05, 0.3, 3)
    res = singular_value_scan("x3", th, rr)
    for i, t in enumerate(th):
        for j, r in enumerate(rr):
            d = build_x3(r, t).class_sigma_min()
            for c, name in enumerate(res.class_names):
                assert res.sigma_min[i, j, c] == pytest.approx(d[name], abs=1e-12)
    assert len(list(res.rows())) == 4 * 3 * len(res.class_names)
    with pytest.raises(ValueError):
        singular_value_scan("x3", [], rr)
    with pytest.raises(ValueError):
        singular_value_scan("x3", th, [R_MAX])


def _band(steps):
    return grid(0.05, math.pi / 2 - 0.05, steps), grid(0.02, 0.31, steps)


@pytest.mark.parametrize("axis,tol", [("x3", 0.05), ("vertex", 0.05)])
def test_scan_grid_consistency(axis, tol):
    vals = [singular_value_scan(axis, *_band(s)).min_disparity()[0] for s in (10, 50, 100)]
    assert max(vals) / min(vals) - 1 <= tol


def test_vertex_scan_residuals_after_refinement():
    res = singular_value_scan("vertex", *_band(50))
    assert res.det_residual <= 1e-12
    assert res.det_residual_float > res.det_residual
    assert res.refined_cells > 0
    assert res.middle_residual <= 1e-10
    assert 0.85 <= res.tiling_valid.mean() < 1.0


def test_json():
    d = build_vertex(0.1, 0.2).to_json()
    assert d["axis"] == "vertex" and len(d["gradients"]) == 14
    assert tetra3d.T1_VOLUME == pytest.approx(8 / 3)
