"""Stretch well U(a), its dihedral symmetry group, the finite well set
K_n(a) = ∪ SO(2) P U Pᵀ, membership tests, and the nematic-elastomer limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .linalg2 import perp, reflection_about, rotation, svd2
from .ngon_geometry import build_config

DEDUP_TOL = 1e-10


@dataclass(frozen=True)
class WellMatrix:
    U: np.ndarray
    n: int
    a: float
    e11: np.ndarray
    e11_perp: np.ndarray


def alpha_from_a(n: int, a: float) -> float:
    """Invert a(alpha) (strictly decreasing) by bisection."""
    if not a > 0.0:
        raise ValueError(f"a must be positive, got {a!r}")
    t = 2.0 * math.pi / n

    def f(al: float) -> float:
        return math.sin(t * (1.0 - al)) / math.sin(t * al) - a * a

    lo, hi = 1e-15, 1.0 - 1e-15
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def frame(n: int, a: float) -> tuple[np.ndarray, np.ndarray]:
    """(e11, e11⊥) of the configuration whose stretch is a (r_E = 1)."""
    if abs(a - 1.0) == 0.0:
        cfg = build_config(n, 0.5)
    else:
        cfg = build_config(n, alpha_from_a(n, a))
    return cfg.e11, cfg.e11_perp


def bain_matrix(n: int, a: float, e11=None) -> WellMatrix:
    """U = a e11⊗e11 + a⁻¹ e11⊥⊗e11⊥ + ((a⁻¹ − a)/tan φ) e11⊗e11⊥."""
    if int(n) != n or n < 3:
        raise ValueError(f"n must be an integer >= 3, got {n!r}")
    if not a > 0.0:
        raise ValueError(f"a must be positive, got {a!r}")
    if e11 is None:
        e11, _ = frame(n, a)
    e11 = np.asarray(e11, dtype=float)
    ep = perp(e11)
    # 1/tan((n-2)pi/(2n)) = tan(pi/n)
    off = (1.0 / a - a) * math.tan(math.pi / n)
    U = a * np.outer(e11, e11) + np.outer(ep, ep) / a + off * np.outer(e11, ep)
    return WellMatrix(U, int(n), float(a), e11, ep)


def bain_in_frame(n: int, a: float) -> np.ndarray:
    """U written in the (e11, e11⊥) basis."""
    t = math.tan(math.pi / n)
    return np.array([[a, (1.0 / a - a) * t], [0.0, 1.0 / a]])


@dataclass(frozen=True)
class SymmetryGroup:
    n: int
    elements: tuple  # 2n matrices: rotations first, then reflections

    def __len__(self) -> int:
        return len(self.elements)

    def closure_residual(self) -> float:
        E = np.array(self.elements)
        worst = 0.0
        for A in E:
            prods = A @ E
            d = np.abs(prods[:, None, :, :] - E[None, :, :, :]).max(axis=(2, 3)).min(axis=1)
            worst = max(worst, float(d.max()))
        return worst


def symmetry_group(n: int, e11) -> SymmetryGroup:
    """Rotations by 2πj/n and reflections P0·rotation with P0 fixing e11."""
    P0 = reflection_about(e11)
    rots = [rotation(2.0 * math.pi * j / n) for j in range(n)]
    refl = [P0 @ R for R in rots]
    return SymmetryGroup(int(n), tuple(rots + refl))


@dataclass(frozen=True)
class WellSet:
    n: int
    a: float
    U: np.ndarray
    wells: np.ndarray  # (m, 2, 2)

    @property
    def cauchy_green(self) -> np.ndarray:
        return np.einsum("kji,kjl->kil", self.wells, self.wells)

    def singular_values(self) -> np.ndarray:
        return _kernels.svd2_values(np.ascontiguousarray(self.wells))

    def to_json(self) -> dict:
        return {"n": self.n, "a": self.a, "U": self.U.tolist(), "wells": self.wells.tolist()}


def enumerate_wells(n: int, a: float, tol: float = DEDUP_TOL, e11=None) -> WellSet:
    W = bain_matrix(n, a, e11)
    G = symmetry_group(n, W.e11)
    kept: list[np.ndarray] = []
    cgs: list[np.ndarray] = []
    for P in G.elements:
        M = P @ W.U @ P.T
        C = M.T @ M
        if all(np.linalg.norm(C - D) > tol for D in cgs):
            kept.append(M)
            cgs.append(C)
    return WellSet(int(n), float(a), W.U, np.array(kept))


def membership_cauchy_green(F, wells: WellSet, tol: float = 1e-10) -> tuple[bool, float]:
    F = np.asarray(F, dtype=float)
    if np.linalg.det(F) <= 0.0:
        raise ValueError("Cauchy-Green membership needs det F > 0")
    C = F.T @ F
    d = float(np.min(np.linalg.norm(wells.cauchy_green - C, axis=(1, 2))))
    return d <= tol, d


def dist_to_wells(F, wells: WellSet, include_rotations: bool = False) -> float:
    """Coset distance from F to K_n(a) (optionally also to SO(2))."""
    W = wells.wells
    if include_rotations:
        W = np.concatenate([W, np.eye(2)[None]], axis=0)
    F = np.ascontiguousarray(np.asarray(F, dtype=float).reshape(-1, 2, 2))
    return float(_kernels.coset_dist(F, np.ascontiguousarray(W)).min())


def dist_to_wells_batch(F: np.ndarray, wells: WellSet, include_rotations: bool = False) -> np.ndarray:
    W = wells.wells
    if include_rotations:
        W = np.concatenate([W, np.eye(2)[None]], axis=0)
    return _kernels.coset_dist(np.ascontiguousarray(F, dtype=float), np.ascontiguousarray(W)).min(axis=1)


def limit_membership(F, a: float, tol: float = 1e-12) -> bool:
    """det F = 1 and singular values (max(a, 1/a), min(a, 1/a)), all within tol."""
    F = np.asarray(F, dtype=float)
    s = svd2(F)
    hi, lo = max(a, 1.0 / a), min(a, 1.0 / a)
    return abs(np.linalg.det(F) - 1.0) <= tol and abs(s.s1 - hi) <= tol and abs(s.s2 - lo) <= tol


@dataclass(frozen=True)
class NLCEWellParams:
    r: float

    @property
    def singular_values(self) -> tuple[float, float]:
        return self.r ** (1.0 / 3.0), self.r ** (-1.0 / 6.0)

    @property
    def det(self) -> float:
        return self.r ** (1.0 / 6.0)

    def contains(self, F, tol: float = 1e-10) -> bool:
        s = svd2(F)
        hi, lo = self.singular_values
        return abs(np.linalg.det(F) - self.det) <= tol and abs(s.s1 - hi) <= tol and abs(s.s2 - lo) <= tol


def nlce_anisotropy(n: int, a: float, tol: float = 1e-10) -> float:
    """r_n = σ1(U)^4, after checking every well of K_n(a) has σ = (σ1, 1/σ1)."""
    W = enumerate_wells(n, a)
    s1 = svd2(W.U).s1
    for M in W.wells:
        if not limit_membership(M, s1, tol):
            raise AssertionError("well set is not contained in K_inf(sigma1)")
    return s1**4


def scale_to_nlce(F, r: float) -> np.ndarray:
    """Map a det-1 matrix with σ = (r^{1/4}, r^{-1/4}) into K_2D(r) by the scalar r^{1/12}."""
    return r ** (1.0 / 12.0) * np.asarray(F, dtype=float)


def director(F, tol: float = 1e-12) -> tuple[np.ndarray, float]:
    """Unit eigenvector of F Fᵀ for its larger eigenvalue, angle folded into [0, π)."""
    F = np.asarray(F, dtype=float)
    if np.linalg.det(F) <= 0.0:
        raise ValueError("director needs det F > 0")
    s = svd2(F)
    if s.s1 - s.s2 <= tol * max(1.0, s.s1):
        raise ValueError("degenerate director: equal singular values")
    theta = math.fmod(s.left, math.pi)
    if theta < 0.0:
        theta += math.pi
    if theta >= math.pi:  # -tiny + π rounds to π
        theta = 0.0
    return np.array([math.cos(theta), math.sin(theta)]), theta


def director_angles(F: np.ndarray) -> np.ndarray:
    """Vectorized director angle in [0, π) for a stack of 2x2 matrices."""
    F = np.asarray(F, dtype=float)
    f = 0.5 * (F[:, 0, 0] - F[:, 1, 1])
    g = 0.5 * (F[:, 1, 0] + F[:, 0, 1])
    e = 0.5 * (F[:, 0, 0] + F[:, 1, 1])
    h = 0.5 * (F[:, 1, 0] - F[:, 0, 1])
    left = 0.5 * (np.arctan2(h, e) + np.arctan2(g, f))
    out = np.mod(left, np.pi)
    out[out >= np.pi] = 0.0
    return out

