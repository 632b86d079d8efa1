"""Small-matrix algebra: 2x2 rotations, reflections, closed-form SVD,
polar decomposition and distance to a rotation coset SO(2)·M.

Matrices are plain ``numpy`` arrays of shape (2, 2) or (3, 3).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

Mat2 = np.ndarray
Mat3 = np.ndarray

UNIT_TOL = 1e-12


def rotation(angle: float) -> Mat2:
    """Counterclockwise rotation by ``angle`` radians."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def rotation_angle(R: Mat2) -> float:
    """Angle in (-pi, pi] of the rotation part of ``R``."""
    return math.atan2(R[1, 0] - R[0, 1], R[0, 0] + R[1, 1])


def perp(e) -> np.ndarray:
    """``e`` turned by +90 degrees."""
    return np.array([-e[1], e[0]], dtype=float)


def reflection_about(e, tol: float = UNIT_TOL) -> Mat2:
    """e⊗e − e⊥⊗e⊥, the reflection fixing the line through ``e``."""
    e = np.asarray(e, dtype=float)
    if abs(math.hypot(e[0], e[1]) - 1.0) > tol:
        raise ValueError(f"reflection axis must be a unit vector, got |e|={np.linalg.norm(e)!r}")
    p = perp(e)
    return np.outer(e, e) - np.outer(p, p)


@dataclass(frozen=True)
class SVD2:
    """M = Q(left) · diag(s1, det_sign·s2) · Q(right)."""

    s1: float
    s2: float
    left: float
    right: float
    det_sign: int

    def reconstruct(self) -> Mat2:
        return rotation(self.left) @ np.diag([self.s1, self.det_sign * self.s2]) @ rotation(self.right)


def svd2(M: Mat2) -> SVD2:
    # Closed form from splitting M into a rotation part (e, h) and a
    # reflection part (f, g); no iteration, so results are reproducible.
    M = np.asarray(M, dtype=float)
    e = 0.5 * (M[0, 0] + M[1, 1])
    f = 0.5 * (M[0, 0] - M[1, 1])
    g = 0.5 * (M[1, 0] + M[0, 1])
    h = 0.5 * (M[1, 0] - M[0, 1])
    q = math.hypot(e, h)
    r = math.hypot(f, g)
    a2 = math.atan2(h, e)
    # Tie-break for s1 == s2: put everything in the right factor.
    a1 = math.atan2(g, f) if r != 0.0 else -a2
    left = 0.5 * (a2 + a1)
    right = 0.5 * (a2 - a1)
    sign = 1 if q >= r else -1
    return SVD2(q + r, abs(q - r), left, right, sign)


def singular_values(M: Mat2) -> tuple[float, float]:
    s = svd2(M)
    return s.s1, s.s2


def dist_to_rotation_coset(F: Mat2, M: Mat2) -> float:
    """min over R in SO(2) of |F − R M| (Frobenius).

    Equals sqrt(|F|² + |M|² − 2(σ1 ± σ2)) with σ from F Mᵀ (sign of det).
    The minimizer is the rotation part of F Mᵀ; the norm is taken directly
    to avoid cancellation when F is close to the coset.
    """
    F = np.asarray(F, dtype=float)
    M = np.asarray(M, dtype=float)
    X = F @ M.T
    p, q = X[0, 0] + X[1, 1], X[1, 0] - X[0, 1]
    R = rotation(math.atan2(q, p)) if (p != 0.0 or q != 0.0) else np.eye(2)
    return float(np.linalg.norm(F - R @ M))


def dist_to_rotation_coset_closed(F: Mat2, M: Mat2) -> float:
    """Same quantity through the singular values of F Mᵀ (kept as a cross-check)."""
    F = np.asarray(F, dtype=float)
    M = np.asarray(M, dtype=float)
    s = svd2(F @ M.T)
    d2 = float(np.sum(F * F) + np.sum(M * M) - 2.0 * (s.s1 + s.det_sign * s.s2))
    return math.sqrt(d2) if d2 > 0.0 else 0.0


def polar_decompose(M: Mat2) -> tuple[Mat2, Mat2]:
    """M = R V with R a rotation and V symmetric positive definite."""
    M = np.asarray(M, dtype=float)
    if np.linalg.det(M) <= 0.0:
        raise ValueError("polar decomposition into SO(2) x SPD needs det(M) > 0")
    R = rotation(rotation_angle(M))
    V = R.T @ M
    return R, 0.5 * (V + V.T)


def is_rotation(M: Mat2 | Mat3, tol: float = 1e-12) -> bool:
    M = np.asarray(M, dtype=float)
    eye = np.eye(M.shape[0])
    return bool(np.max(np.abs(M.T @ M - eye)) <= tol and abs(np.linalg.det(M) - 1.0) <= tol)


def dist_to_so3(M: Mat3) -> float:
    """Frobenius distance from a 3x3 matrix to SO(3)."""
    U, S, Vt = np.linalg.svd(np.asarray(M, dtype=float))
    d = np.sign(np.linalg.det(U @ Vt))
    R = U @ np.diag([1.0, 1.0, d]) @ Vt
    return float(np.linalg.norm(M - R))
