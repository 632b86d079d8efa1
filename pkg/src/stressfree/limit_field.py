"""The n → ∞ limit of the onion construction: a closed-form spiral
deformation on the annulus 1/2 < |x| < 1, its gradient field, and
diagnostics for how fast the finite-n constructions approach it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .linalg2 import rotation
from .onion import build_onion, rings_to_half
from .single_layer import exterior_angle, inner_angle
from .wells import limit_membership


@dataclass(frozen=True)
class LimitParams:
    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")

    @property
    def a(self) -> float:
        return math.sqrt((1.0 - self.alpha) / self.alpha)

    @property
    def rho0(self) -> float:
        return (2.0 * self.alpha - 1.0) / math.sqrt(self.alpha * (1.0 - self.alpha))

    @property
    def beta0(self) -> float:
        return math.asin(1.0 - 2.0 * self.alpha)

    @property
    def e11(self) -> np.ndarray:
        return np.array([math.sqrt(1.0 - self.alpha), -math.sqrt(self.alpha)])

    @property
    def U_inf(self) -> np.ndarray:
        e = self.e11
        p = np.array([-e[1], e[0]])
        return self.a * np.outer(e, e) + np.outer(p, p) / self.a

    @property
    def profile(self) -> np.ndarray:
        """Image of e_1 on the unit circle."""
        al = self.alpha
        return np.array([2.0 * math.sqrt(al * (1.0 - al)), 1.0 - 2.0 * al])


def _polar(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.hypot(X[:, 0], X[:, 1]), np.arctan2(X[:, 1], X[:, 0])


def _rot_stack(theta: np.ndarray) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def limit_gradients(p: LimitParams, X) -> np.ndarray:
    """∇v at each row of X, shape (m, 2, 2)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    r, w = _polar(X)
    if np.any(r == 0.0):
        raise ValueError("the limit gradient is undefined at the origin")
    out = np.empty((len(X), 2, 2))
    outer = r >= 1.0
    core = r <= 0.5
    ann = ~(outer | core)
    out[outer] = rotation(p.beta0)
    out[core] = rotation(p.beta0) @ rotation(p.rho0 * math.log(0.5))
    if ann.any():
        Rw = _rot_stack(w[ann])
        Rl = _rot_stack(p.rho0 * np.log(r[ann]))
        out[ann] = Rl @ Rw @ p.U_inf @ np.swapaxes(Rw, 1, 2)
    return out


def limit_gradient(p: LimitParams, x) -> np.ndarray:
    return limit_gradients(p, np.asarray(x, dtype=float)[None, :])[0]


def limit_deformations(p: LimitParams, X, check: bool = True) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    r, w = _polar(X)
    if check and (np.any(r < 0.5) or np.any(r > 1.0)):
        raise ValueError("the limit deformation formula holds on 1/2 <= |x| <= 1")
    ang = w + p.rho0 * np.log(r)
    return r[:, None] * (_rot_stack(ang) @ p.profile)


def limit_deformation(p: LimitParams, x) -> np.ndarray:
    return limit_deformations(p, np.asarray(x, dtype=float)[None, :])[0]


def annulus_samples(count: int, seed: int = 0, r_min: float = 0.5, r_max: float = 1.0) -> np.ndarray:
    """Area-uniform points in r_min < |x| < r_max."""
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(r_min * r_min, r_max * r_max, count))
    w = rng.uniform(-math.pi, math.pi, count)
    return np.stack([r * np.cos(w), r * np.sin(w)], axis=1)


def fd_gradients(p: LimitParams, X: np.ndarray, h: float) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    cols = []
    for d in np.eye(2):
        cols.append((limit_deformations(p, X + h * d, check=False) - limit_deformations(p, X - h * d, check=False)) / (2 * h))
    return np.stack(cols, axis=2)


def verify_gradient_consistency(p: LimitParams, samples: np.ndarray, h: float = 1e-5) -> float:
    """Max |central-difference ∇v − closed-form ∇v| over the samples."""
    if h > 1e-4:
        raise ValueError("use h <= 1e-4")
    J = fd_gradients(p, samples, h)
    G = limit_gradients(p, samples)
    return float(np.abs(J - G).max())


def tangential_jumps(p: LimitParams, count: int = 64) -> dict[str, float]:
    """Jump of ∇v·t across |x| = 1 and |x| = 1/2 (t the circle tangent)."""
    w = np.linspace(-math.pi, math.pi, count, endpoint=False)
    out = {}
    for name, r, other in (("outer", 1.0, rotation(p.beta0)), ("inner", 0.5, rotation(p.beta0) @ rotation(p.rho0 * math.log(0.5)))):
        T = np.stack([-np.sin(w), np.cos(w)], axis=1)
        Rw = _rot_stack(w)
        G = rotation(p.rho0 * math.log(r)) @ Rw @ p.U_inf @ np.swapaxes(Rw, 1, 2)
        jump = np.einsum("kab,kb->ka", G, T) - T @ other.T
        out[name] = float(np.abs(jump).max())
        out[name + "_full"] = float(np.abs(G - other).max())
    return out


def membership_residual(p: LimitParams, samples: np.ndarray, tol: float = 1e-12) -> int:
    """Number of annulus samples whose gradient fails the det/singular-value test."""
    G = limit_gradients(p, samples)
    return int(sum(not limit_membership(g, p.a, tol) for g in G))


# ---------------------------------------------------------------- finite n

@dataclass(frozen=True)
class ConvergenceResult:
    alpha: float
    n_list: tuple
    errors: tuple
    resampled: tuple


def _onion_gradients(n: int, alpha: float):
    on = build_onion(n, alpha)
    cfg = on.config
    tri = cfg.vertices[cfg.triangles]
    G = np.stack([on.ring_gradients(k) for k in range(on.layers)])
    return on, tri, G


def finite_n_gradients(n: int, alpha: float, X: np.ndarray):
    """∇v_n at X via layer pull-back; also the distance to the nearest triangle edge."""
    on, tri, G = _onion_gradients(n, alpha)
    lay, idx, dist = _kernels.locate(
        np.ascontiguousarray(X, dtype=float), np.ascontiguousarray(on.config.E), np.ascontiguousarray(tri),
        np.ascontiguousarray(on.Q_alpha.T), 1.0 / on.r_I, on.layers,
    )
    out = np.empty((len(X), 2, 2))
    shell = lay >= 0
    out[shell] = G[lay[shell], idx[shell]]
    out[lay == -1] = on.R_E
    out[lay == -2] = on.core_gradient()
    return out, lay, dist


def convergence_test(
    alpha: float,
    n_list=(50, 200),
    samples: int = 1000,
    seed: int = 0,
    r_min: float = 0.55,
    r_max: float = 0.95,
    edge_tol: float = 1e-6,
) -> ConvergenceResult:
    """Sup over samples of |∇v_n − ∇v| for each n.

    The sample annulus keeps a margin from |x| = 1/2 and |x| = 1, where the
    limit field jumps and the polygon does not reach the circle.
    """
    p = LimitParams(alpha)
    errs, redo = [], []
    for n in n_list:
        rng = np.random.default_rng([seed, int(n)])
        X = annulus_samples(samples, seed, r_min, r_max)
        count = 0
        while True:
            Gn, lay, dist = finite_n_gradients(n, alpha, X)
            bad = (lay >= 0) & (dist < edge_tol)
            if not bad.any():
                break
            count += int(bad.sum())
            r = np.sqrt(rng.uniform(r_min * r_min, r_max * r_max, int(bad.sum())))
            w = rng.uniform(-math.pi, math.pi, int(bad.sum()))
            X[bad] = np.stack([r * np.cos(w), r * np.sin(w)], axis=1)
        G = limit_gradients(p, X)
        errs.append(float(np.linalg.norm(Gn - G, axis=(1, 2)).max()))
        redo.append(count)
    return ConvergenceResult(float(alpha), tuple(int(n) for n in n_list), tuple(errs), tuple(redo))


def rstar_power_gap(n: int, alpha: float) -> float:
    """|angle(R_*^{N_n}) − ρ0 log(1/2)| wrapped to [0, π]."""
    N = rings_to_half(n, alpha)
    ang = N * inner_angle(n, alpha) - LimitParams(alpha).rho0 * math.log(0.5)
    return abs(math.remainder(ang, 2.0 * math.pi))


def exterior_angle_gap(n: int, alpha: float) -> float:
    return abs(exterior_angle(n, alpha) - LimitParams(alpha).beta0)

