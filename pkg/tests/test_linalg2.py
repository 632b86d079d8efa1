import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stressfree.linalg2 import (
    dist_to_rotation_coset,
    dist_to_rotation_coset_closed,
    dist_to_so3,
    is_rotation,
    polar_decompose,
    reflection_about,
    rotation,
    rotation_angle,
    singular_values,
    svd2,
)

entries = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
mat2 = st.lists(entries, min_size=4, max_size=4).map(lambda v: np.array(v).reshape(2, 2))


def test_rotation_basics():
    assert np.array_equal(rotation(0.0), np.eye(2))
    assert np.allclose(rotation(math.pi), -np.eye(2), atol=1e-15)
    assert np.allclose(rotation(math.pi / 2) @ [1.0, 0.0], [0.0, 1.0], atol=1e-15)
    assert is_rotation(rotation(1.234))
    assert rotation_angle(rotation(2.5)) == pytest.approx(2.5, abs=1e-15)


def test_reflection():
    assert np.array_equal(reflection_about([1.0, 0.0]), np.diag([1.0, -1.0]))
    assert np.array_equal(reflection_about([0.0, 1.0]), np.diag([-1.0, 1.0]))
    P = reflection_about([math.sqrt(2) / 2, math.sqrt(2) / 2])
    assert np.allclose(P @ P, np.eye(2), atol=1e-15)
    assert np.linalg.det(P) == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        reflection_about([1.0, 0.1])


def test_svd2_examples():
    assert singular_values(np.diag([2.0, 0.5])) == pytest.approx((2.0, 0.5))
    assert singular_values(rotation(0.4)) == pytest.approx((1.0, 1.0))
    z = svd2(np.zeros((2, 2)))
    assert (z.s1, z.s2) == (0.0, 0.0)
    # equal singular values: everything goes to the right factor
    assert svd2(rotation(0.7)).left == 0.0


@given(mat2)
def test_svd2_reconstructs(M):
    s = svd2(M)
    assert s.s1 >= s.s2 >= 0.0
    assert np.abs(s.reconstruct() - M).max() <= 1e-13 * max(1.0, s.s1)
    assert s.s1 * s.s2 == pytest.approx(abs(np.linalg.det(M)), rel=1e-12, abs=1e-12)
    assert np.allclose([s.s1, s.s2], np.linalg.svd(M, compute_uv=False), atol=1e-12 * max(1.0, s.s1))


def test_svd2_random_batch():
    rng = np.random.default_rng(1)
    worst = 0.0
    for M in rng.uniform(-10, 10, (10_000, 2, 2)):
        s = svd2(M)
        worst = max(worst, np.abs(s.reconstruct() - M).max() / max(1.0, s.s1))
    assert worst <= 1e-13


def test_coset_distance_examples():
    assert dist_to_rotation_coset(np.eye(2), np.eye(2)) == 0.0
    for th in np.linspace(-3, 3, 7):
        assert dist_to_rotation_coset(rotation(th), np.eye(2)) <= 1e-15
    assert dist_to_rotation_coset(np.diag([2.0, 1.0]), np.eye(2)) == pytest.approx(1.0, abs=1e-15)


def _brute(F, M, count=1_000_000):
    th = np.linspace(-math.pi, math.pi, count, endpoint=False)
    c, s = np.cos(th), np.sin(th)
    RM = np.stack([c * M[0, 0] - s * M[1, 0], c * M[0, 1] - s * M[1, 1], s * M[0, 0] + c * M[1, 0], s * M[0, 1] + c * M[1, 1]])
    return float(np.sqrt(((F.reshape(4, 1) - RM) ** 2).sum(axis=0)).min())


def test_coset_distance_brute_force():
    rng = np.random.default_rng(2)
    for _ in range(5):
        F, M = rng.normal(size=(2, 2, 2))
        assert dist_to_rotation_coset(F, M) == pytest.approx(_brute(F, M), abs=1e-5)


@given(mat2, mat2)
def test_coset_distance_closed_form_agrees(F, M):
    d = dist_to_rotation_coset(F, M)
    assert d == pytest.approx(dist_to_rotation_coset_closed(F, M), abs=1e-6 * (1 + np.abs(F).max() + np.abs(M).max()))


@given(mat2, st.floats(-math.pi, math.pi))
def test_coset_distance_left_invariant(F, th):
    M = np.diag([1.5, 0.5])
    assert dist_to_rotation_coset(rotation(th) @ F, M) == pytest.approx(dist_to_rotation_coset(F, M), abs=1e-10)


def test_polar():
    R, V = polar_decompose(np.eye(2))
    assert np.allclose(R, np.eye(2)) and np.allclose(V, np.eye(2))
    R, V = polar_decompose(rotation(0.3))
    assert np.allclose(R, rotation(0.3), atol=1e-15) and np.allclose(V, np.eye(2), atol=1e-15)
    M = np.diag([4.0, 1.0]) @ rotation(0.2)
    R, V = polar_decompose(M)
    assert np.abs(R @ V - M).max() <= 1e-13
    assert np.allclose(sorted(np.linalg.eigvalsh(V)), [1.0, 4.0], atol=1e-13)
    with pytest.raises(ValueError):
        polar_decompose(np.diag([1.0, -1.0]))


def test_dist_to_so3():
    assert dist_to_so3(np.eye(3)) <= 1e-15
    assert dist_to_so3(np.diag([1.0, 1.0, 2.0])) == pytest.approx(1.0)
