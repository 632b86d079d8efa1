"""Small-strain counterpart: linearized wells E_j, their dihedral orbit,
the displacement obtained by differentiating the exact family at α = 1/2,
the explicit annulus field w and the planar nematic relation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg2 import rotation
from .ngon_geometry import build_config, stretch_a
from .single_layer import TRIANGLE, Q, build_single_layer
from .wells import bain_matrix

DEDUP_TOL = 1e-10


@dataclass(frozen=True)
class Strain2:
    """Symmetric trace-free 2x2 matrix [[e11, e12], [e12, -e11]]."""

    e11: float
    e12: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.e11, self.e12], [self.e12, -self.e11]])

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.e11, self.e12])

    @classmethod
    def from_matrix(cls, M) -> "Strain2":
        M = np.asarray(M, dtype=float)
        return cls(0.5 * (M[0, 0] - M[1, 1]), 0.5 * (M[0, 1] + M[1, 0]))

    def conjugate(self, R: np.ndarray) -> "Strain2":
        return Strain2.from_matrix(R @ self.matrix @ R.T)


def sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + np.swapaxes(M, -1, -2))


def half_angle_cot(n: int) -> float:
    """cot(φ_n/2) with φ_n = (n−2)π/n; equals tan(π/n)."""
    return 1.0 / math.tan((n - 2) * math.pi / (2 * n))


def strain_E(n: int, j: int) -> Strain2:
    """Linearized well on T_j, written in the (e11, e11⊥) frame."""
    if int(n) != n or n < 3:
        raise ValueError(f"n must be an integer >= 3, got {n!r}")
    if not (1 <= j <= 2 * n):
        raise ValueError(f"j must lie in 1..{2 * n}, got {j!r}")
    c = half_angle_cot(n)
    if j % 2:
        base, k = Strain2(1.0, -c), (j - 1) // 2
    else:
        base, k = Strain2(1.0, c), (j - 2) // 2
    return base.conjugate(Q(n, k))


def symmetric_frame(n: int) -> np.ndarray:
    """Columns (e11, e11⊥) of the α = 1/2 configuration."""
    cfg = build_config(n, 0.5)
    return np.column_stack([cfg.e11, cfg.e11_perp])


def stretch_rate(n: int) -> float:
    """da/dα at α = 1/2, equal to −(2π/n) cot(π/n)."""
    return -(2.0 * math.pi / n) / math.tan(math.pi / n)


def strain_target(n: int, j: int) -> np.ndarray:
    """Expected e(∇ d/dα u) on T_j in global coordinates."""
    B = symmetric_frame(n)
    return stretch_rate(n) * (B @ strain_E(n, j).matrix @ B.T)


@dataclass(frozen=True)
class LinWellSet:
    n: int
    wells: tuple

    def radii(self) -> np.ndarray:
        return np.array([np.hypot(w.e11, w.e12) for w in self.wells])


def dihedral_orbit(n: int, E: Strain2 | None = None) -> LinWellSet:
    """Distinct R E Rᵀ over rotations Q(2πk/n) and reflections diag(1,−1)·Q(2πk/n)."""
    if E is None:
        E = strain_E(n, 1)
    P0 = np.diag([1.0, -1.0])
    kept: list[Strain2] = []
    for k in range(n):
        R = rotation(2.0 * math.pi * k / n)
        for G in (R, P0 @ R):
            S = E.conjugate(G)
            if all(np.hypot(S.e11 - T.e11, S.e12 - T.e12) > DEDUP_TOL for T in kept):
                kept.append(S)
    return LinWellSet(int(n), tuple(kept))


def orbit_count(n: int) -> int:
    return len(dihedral_orbit(n).wells)


def strain_action_residual(E: Strain2, phi: float) -> float:
    """|vec(Q(φ) E Q(φ)ᵀ) − rotation(2φ) vec(E)|."""
    lhs = E.conjugate(rotation(phi)).vector
    return float(np.linalg.norm(lhs - rotation(2.0 * phi) @ E.vector))


# ---------------------------------------------------------------- strain-well identities

def half_turn_residual(n: int) -> float:
    """max_i |E_(i) − E_(i+n)|: the strain pattern repeats after half a turn."""
    E = [strain_E(n, j).matrix for j in range(1, 2 * n + 1)]
    return float(max(np.abs(E[i] - E[(i + n) % (2 * n)]).max() for i in range(2 * n)))


def reflected_half_turn_residual(n: int) -> float:
    """Odd n: Q_{(n−1)/2} P0 E_1 P0 Q_{(n−1)/2}ᵀ = E_1 in the (e11, e11⊥) frame."""
    if n % 2 == 0:
        raise ValueError("this form of the identity is stated for odd n")
    P0 = np.diag([1.0, -1.0])
    R = Q(n, (n - 1) / 2)
    E1 = strain_E(n, 1).matrix
    return float(np.abs(R @ P0 @ E1 @ P0 @ R.T - E1).max())


def iteration_residual(n: int) -> float:
    """max_i |Q_{1/2} E_(i+1) Q_{1/2}ᵀ − Q_1 E_(i) Q_1ᵀ|; exact in the linear theory."""
    Qh, Q1 = Q(n, 0.5), Q(n, 1)
    worst = 0.0
    for i in range(1, 2 * n + 1):
        a = strain_E(n, i % (2 * n) + 1).matrix
        b = strain_E(n, i).matrix
        worst = max(worst, float(np.abs(Qh @ a @ Qh.T - Q1 @ b @ Q1.T).max()))
    return worst


def rank_one_coefficient(n: int) -> float:
    """c with E_1 − E_2 = c · e(e1⊗e2)."""
    D = strain_E(n, 1).matrix - strain_E(n, 2).matrix
    return float(D[0, 1] / 0.5)


# ---------------------------------------------------------------- displacement

@dataclass(frozen=True)
class LinearizedMap:
    n: int
    h: float
    vertices: np.ndarray  # α = 1/2 triangulation
    pieces: tuple  # (kind, verts, D, d) with displacement x ↦ D x + d
    exterior: np.ndarray

    def strains(self) -> np.ndarray:
        return np.array([sym(D) for kind, _v, D, _d in self.pieces if kind == TRIANGLE])

    def vertex_jumps(self) -> float:
        from .single_layer import AffinePiece, PiecewiseAffineMap

        pcs = tuple(AffinePiece(k, v, D, d) for k, v, D, d in self.pieces)
        return float(PiecewiseAffineMap(self.vertices, pcs).vertex_residuals().max())


def linearized_map(n: int, h: float = 1e-4) -> LinearizedMap:
    """Central difference in α of the normalized single layer at α = 1/2."""
    if not (0.0 < h <= 1e-3):
        raise ValueError("h must lie in (0, 1e-3]")
    plus = build_single_layer(build_config(n, 0.5 + h))
    minus = build_single_layer(build_config(n, 0.5 - h))
    ref = build_config(n, 0.5)
    pieces = []
    for p, m in zip(plus.pieces, minus.pieces):
        pieces.append((p.kind, p.verts, (p.A - m.A) / (2 * h), (p.b - m.b) / (2 * h)))
    return LinearizedMap(int(n), float(h), ref.vertices, tuple(pieces), pieces[0][2])


def strain_errors(n: int, h: float = 1e-4) -> np.ndarray:
    lm = linearized_map(n, h)
    S = lm.strains()
    T = np.array([strain_target(n, j) for j in range(1, 2 * n + 1)])
    return np.abs(S - T).max(axis=(1, 2))


def richardson_ratio(n: int, h: float = 1e-4) -> float:
    """error(h) / error(h/2); close to 4 for a second-order difference."""
    return float(strain_errors(n, h).max() / strain_errors(n, h / 2).max())


def basis_independence_check(n: int, h: float = 1e-4) -> tuple[float, float]:
    """(|d/dα(BᵀUB) − Bᵀ(dU/dα)B|, |B'ᵀB + BᵀB'|) at α = 1/2 by central differences."""

    def parts(al: float):
        cfg = build_config(n, al)
        U = bain_matrix(n, stretch_a(n, al), cfg.e11).U
        B = np.column_stack([cfg.e11, cfg.e11_perp])
        return U, B

    Up, Bp = parts(0.5 + h)
    Um, Bm = parts(0.5 - h)
    _U0, B0 = parts(0.5)
    d_conj = (Bp.T @ Up @ Bp - Bm.T @ Um @ Bm) / (2 * h)
    conj_d = B0.T @ ((Up - Um) / (2 * h)) @ B0
    dB = (Bp - Bm) / (2 * h)
    return float(np.abs(d_conj - conj_d).max()), float(np.abs(dB.T @ B0 + B0.T @ dB).max())


# ---------------------------------------------------------------- limit field w

def w_field(x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(w(x), ∇w(x), e(∇w)(x)) with w = 2(1 − log r²)(x2, −x1)."""
    x1, x2 = float(x[0]), float(x[1])
    r2 = x1 * x1 + x2 * x2
    if r2 == 0.0:
        raise ValueError("w is not defined at the origin")
    f = 2.0 * (1.0 - math.log(r2))
    val = f * np.array([x2, -x1])
    G = np.array(
        [
            [-4.0 * x1 * x2 / r2, f - 4.0 * x2 * x2 / r2],
            [-f + 4.0 * x1 * x1 / r2, 4.0 * x1 * x2 / r2],
        ]
    )
    S = (4.0 / r2) * np.array([[-x1 * x2, 0.5 * (x1 * x1 - x2 * x2)], [0.5 * (x1 * x1 - x2 * x2), x1 * x2]])
    return val, G, S


def w_gradient(x) -> np.ndarray:
    return w_field(x)[1]


def in_linear_limit_set(S, c: float, tol: float = 1e-12) -> bool:
    """S ∈ {c R diag(1, −1) Rᵀ}: symmetric, trace-free, eigenvalues ±c."""
    S = np.asarray(S, dtype=float)
    if abs(S[0, 1] - S[1, 0]) > tol or abs(S[0, 0] + S[1, 1]) > tol:
        return False
    return abs(math.hypot(S[0, 0], S[0, 1]) - abs(c)) <= tol


def eikonal_residual(grad, Mprime, x) -> float:
    """(∂1ṽ1 + e11(M′) − 1/4)² + (sym part of ∂ṽ off-diagonal + e12(M′))² − 9/16.

    ``grad`` is a callable x ↦ ∇ṽ(x) or a fixed 2x2 matrix.
    """
    G = np.asarray(grad(x) if callable(grad) else grad, dtype=float)
    M = np.asarray(Mprime, dtype=float)
    t1 = G[0, 0] + M[0, 0] - 0.25
    t2 = 0.5 * (G[1, 0] + G[0, 1]) + 0.5 * (M[0, 1] + M[1, 0])
    return t1 * t1 + t2 * t2 - 9.0 / 16.0


def eikonal_scale() -> float:
    """The c for which c·w solves the relation with e(M′) = diag(1/4, 1/4)."""
    # |e(∇w)| has eigenvalues ±2, so c² · 4 = 9/16.
    return 3.0 / 8.0
