"""Nested "onion ring" iteration of the single layer, the symmetry relations
between layers, the obstruction to iterating exactly, and energy bookkeeping.

Ring k is ring 0 scaled by r_I^k and rotated by Q_α^k; its gradients are
R_*^k Q_α^k F Q_α^{-k}. Layer 0 is the un-normalized single layer (exterior
R_E), so a one-ring onion coincides with it bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg2 import rotation
from .ngon_geometry import NGonConfig, build_config, radius_ratio, stretch_a
from .single_layer import (
    EXTERIOR,
    INNER,
    TRIANGLE,
    AffinePiece,
    Check,
    PiecewiseAffineMap,
    Q,
    Report,
    boundary_rotations,
    build_single_layer,
    inner_angle,
    triangle_gradients,
)
from .wells import WellSet, bain_in_frame, bain_matrix, dist_to_wells_batch, enumerate_wells


def rings_to_half(n: int, alpha: float) -> int:
    """N_n: the least N >= 1 with r_I^N <= 1/2."""
    x = radius_ratio(n, alpha)
    N = max(1, math.ceil(math.log(0.5) / math.log(x)))
    # guard the ceil against rounding in the log ratio
    while N > 1 and x ** (N - 1) <= 0.5:
        N -= 1
    while x**N > 0.5:
        N += 1
    return N


def default_layers(n: int, alpha: float) -> int:
    """Number of rings k = 0..N_n."""
    return rings_to_half(n, alpha) + 1


@dataclass(frozen=True)
class OnionConstruction:
    config: NGonConfig
    layers: int
    r_I: float
    R_E: np.ndarray
    R_star: np.ndarray
    Q_alpha: np.ndarray
    map: PiecewiseAffineMap
    base_gradients: np.ndarray  # F on T_1..T_2n of ring 0

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def alpha(self) -> float:
        return self.config.alpha

    def ring_gradients(self, k: int) -> np.ndarray:
        M = np.linalg.matrix_power(self.R_star @ self.Q_alpha, k)
        Qk = np.linalg.matrix_power(self.Q_alpha, k)
        return np.einsum("ab,jbc,dc->jad", M, self.base_gradients, Qk)

    def core_gradient(self) -> np.ndarray:
        return self.R_E @ np.linalg.matrix_power(self.R_star, self.layers)


def build_onion(n: int, alpha: float, layers: int | None = None) -> OnionConstruction:
    cfg = build_config(n, alpha)
    L = default_layers(n, alpha) if layers is None else int(layers)
    if L < 1:
        raise ValueError(f"layers must be >= 1, got {layers!r}")
    base = build_single_layer(cfg, normalize=False)
    F, _U, _P0 = triangle_gradients(cfg)
    R_I, R_E = boundary_rotations(cfg)
    R_star = rotation(inner_angle(n, alpha))
    Qa = Q(n, alpha)
    x = cfg.r_I

    # Rings of vertices: ring 0 = E, ring k >= 1 = x^{k-1} Q_α^{k-1} I.
    rings = [cfg.E]
    M = np.eye(2)
    s = 1.0
    for _k in range(1, L + 1):
        rings.append(s * cfg.I @ M.T)
        M = Qa @ M
        s *= x
    V = np.vstack(rings)

    def vidx(k: int, local: int) -> int:
        # local index into [E; I] of ring-0 numbering, shifted to ring k
        return (k + (1 if local >= n else 0)) * n + (local % n)

    pieces = [base.pieces[0]]
    Rk = np.eye(2)  # (R_* Q_α)^k
    Qk = np.eye(2)
    sk = 1.0
    for k in range(L):
        for pc in base.pieces:
            if pc.kind != TRIANGLE:
                continue
            if k == 0:
                A, b = pc.A, pc.b
            else:
                A = Rk @ pc.A @ Qk.T
                b = sk * (Rk @ pc.b)
            verts = tuple(vidx(k, v) for v in pc.verts)
            pieces.append(AffinePiece(TRIANGLE, verts, A, b, (k, pc.label[1])))
        Rk = R_star @ Qa @ Rk
        Qk = Qa @ Qk
        sk *= x
    core = R_E @ np.linalg.matrix_power(R_star, L)
    pieces.append(AffinePiece(INNER, tuple(range(L * n, (L + 1) * n)), core, np.zeros(2)))
    meta = dict(base.meta)
    meta["layers"] = L
    m = PiecewiseAffineMap(V, tuple(pieces), False, meta)
    return OnionConstruction(cfg, L, x, R_E, R_star, Qa, m, F)


def continuity_residual(on: OnionConstruction) -> float:
    r = on.map.vertex_residuals()
    return float(r.max()) if r.size else 0.0


# ---------------------------------------------------------------- layer symmetries

def layer_symmetry_residuals(n: int, alpha: float, mutate: bool = False) -> dict[str, float]:
    """Half-turn and iteration identities between triangle gradients.

    With ``mutate`` the transpose in the half-turn relation is toggled and Q_α
    is replaced by Q_2α, so both residuals should become large.
    """
    cfg = build_config(n, alpha)
    F, _U, _P0 = triangle_gradients(cfg)
    R_I, R_E = boundary_rotations(cfg)
    R_star = rotation(inner_angle(n, alpha))
    Qa = Q(n, 2 * alpha if mutate else alpha)
    Q1 = Q(n, 1)
    m = 2 * n
    half = []
    for i in range(m):
        j = (i + n) % m
        if (n % 2 == 1) != mutate:
            half.append(np.abs(F[i] - F[j].T).max())
        else:
            half.append(np.abs(F[i] - F[j]).max())
    it = []
    for i in range(0, m, 2):  # odd triangle numbers 1, 3, ...
        lhs = R_star @ Qa @ F[i + 1] @ Qa.T
        rhs = Q1 @ F[i] @ Q1.T
        it.append(np.abs(lhs - rhs).max())
    return {"half_turn": float(max(half)), "iterpos": float(max(it))}


def verify_layer_symmetries(on: OnionConstruction, tol: float = 1e-12) -> Report:
    r = layer_symmetry_residuals(on.n, on.alpha)
    ring = 0.0
    grads = {pc.label: pc.A for pc in on.map.pieces if pc.kind == TRIANGLE}
    for k in range(on.layers):
        G = on.ring_gradients(k)
        for j in range(2 * on.n):
            ring = max(ring, float(np.abs(grads[(k, j + 1)] - G[j]).max()))
    return Report(
        (
            Check("half_turn", r["half_turn"], tol),
            Check("iterpos", r["iterpos"], tol),
            Check("ring_gradients", ring, tol),
        )
    )


# ---------------------------------------------------------------- non-iterability

def noniterability_gap(n: int, alpha: float, wells: WellSet | None = None) -> tuple[float, float]:
    """Distance of the second-ring gradients to K_n(a): (outer type, inner type)."""
    cfg = build_config(n, alpha)
    F, _U, _P0 = triangle_gradients(cfg)
    if wells is None:
        wells = enumerate_wells(n, stretch_a(n, alpha), e11=cfg.e11)
    R_star = rotation(inner_angle(n, alpha))
    Qa = Q(n, alpha)
    G = np.einsum("ab,jbc,dc->jad", R_star @ Qa, F, Qa)
    d = dist_to_wells_batch(G, wells)
    return float(d[1::2].max()), float(d[0::2].max())


def eigenvector_residual(n: int, alpha: float) -> float:
    """|U1ᵀU1 v − λ v| for the closed-form v at angle (2π/n)(α − 1)/2."""
    U1 = bain_in_frame(n, stretch_a(n, alpha))
    C = U1.T @ U1
    t = (2.0 * math.pi / n) * (alpha - 1.0) / 2.0
    v = np.array([math.cos(t), math.sin(t)])
    lam = v @ C @ v
    return float(np.linalg.norm(C @ v - lam * v))


def mismatch_norm(n: int, a: float) -> float:
    """|U − Uᵀ|/√2, i.e. the off-diagonal mismatch tan(π/n)|a − 1/a|."""
    U = bain_matrix(n, a).U
    return float(np.linalg.norm(U - U.T) / math.sqrt(2.0))


# ---------------------------------------------------------------- energy

@dataclass(frozen=True)
class EnergyReport:
    elastic: float
    surface: float
    bound: float
    epsilon: float
    per_ring: tuple

    @property
    def total(self) -> float:
        return self.elastic + self.epsilon * self.surface

    @property
    def constant(self) -> float:
        """elastic / bound; nan when the bound vanishes."""
        return self.elastic / self.bound if self.bound > 0.0 else math.nan


def bound_sum(n: int, alpha: float, layers: int) -> float:
    x = radius_ratio(n, alpha)
    return float(sum(x ** (2 * j) * abs(2 * j * alpha - round(2 * j * alpha)) for j in range(1, layers)))


def energy_report(on: OnionConstruction, epsilon: float = 1e-3, wells: WellSet | None = None) -> EnergyReport:
    if not epsilon > 0.0:
        raise ValueError("epsilon must be positive")
    m = on.map
    if wells is None:
        wells = enumerate_wells(on.n, stretch_a(on.n, on.alpha), e11=on.config.e11)
    tri = [k for k, pc in enumerate(m.pieces) if pc.kind == TRIANGLE]
    G = np.array([m.pieces[k].A for k in tri])
    d = dist_to_wells_batch(G, wells, include_rotations=True)
    areas = np.array([m.area(k) for k in tri])
    per_ring = np.zeros(on.layers)
    for k, dk, ak in zip(tri, d, areas):
        per_ring[m.pieces[k].label[0]] += ak * dk * dk
    surface = 0.0
    for i, j, p, q in m.edges():
        length = float(np.linalg.norm(m.vertices[q] - m.vertices[p]))
        surface += length * float(np.linalg.norm(m.pieces[i].A - m.pieces[j].A))
    return EnergyReport(
        float(per_ring.sum()), surface, bound_sum(on.n, on.alpha, on.layers), float(epsilon), tuple(per_ring.tolist())
    )


def ring_layer_of(on: OnionConstruction, piece: AffinePiece) -> int:
    return piece.label[0] if piece.kind == TRIANGLE else (-1 if piece.kind == EXTERIOR else on.layers)


def single_layer_residual(n: int, alpha: float) -> float:
    """Max difference between a one-ring onion and the un-normalized single layer."""
    on = build_onion(n, alpha, 1)
    sl = build_single_layer(build_config(n, alpha), normalize=False)
    res = 0.0
    for p, q in zip(on.map.pieces, sl.pieces):
        res = max(res, float(np.abs(p.A - q.A).max()), float(np.abs(p.b - q.b).max()))
    res = max(res, float(np.abs(on.map.vertices - sl.vertices).max()))
    return res

