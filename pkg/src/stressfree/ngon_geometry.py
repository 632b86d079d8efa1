"""Nested regular n-gons: vertices, the 2n shell triangles, the radius ratio
forced by volume preservation, and the analysis of the four candidate radius
ratios that solve the squared compatibility equation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg2 import perp

DEGENERATE_RATIO = 1e-6


def _check(n: int, alpha: float) -> None:
    if int(n) != n or n < 3:
        raise ValueError(f"n must be an integer >= 3, got {n!r}")
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")


def radius_ratio(n: int, alpha: float) -> float:
    """r_I / r_E for which every shell triangle can be mapped volume-preservingly."""
    _check(n, alpha)
    t = 2.0 * math.pi / n
    root = math.sqrt(math.sin(t * alpha) * math.sin(t * (1.0 - alpha)))
    return (math.cos(math.pi * (1.0 - 2.0 * alpha) / n) - root) / math.cos(math.pi / n)


def stretch_a(n: int, alpha: float) -> float:
    """Stretch a = l1/l2 of the well U(a); decreasing in alpha, a(1/2) = 1."""
    _check(n, alpha)
    t = 2.0 * math.pi / n
    return math.sqrt(math.sin(t * (1.0 - alpha)) / math.sin(t * alpha))


def necessary_angle(n: int) -> float:
    """Interior angle (n-2)pi/(2n) between e_11 and e_n1."""
    return (n - 2) * math.pi / (2 * n)


@dataclass(frozen=True)
class NGonConfig:
    n: int
    alpha: float
    r_E: float
    r_I: float
    E: np.ndarray  # (n, 2), E[i] is E_{i+1}
    I: np.ndarray  # (n, 2), I[i] is I_{i+1}
    # Triangle T_{j+1} as indices into the stacked vertex array [E; I].
    triangles: np.ndarray = field(repr=False)
    degenerate: bool = False

    @property
    def vertices(self) -> np.ndarray:
        return np.vstack([self.E, self.I])

    def triangle(self, j: int) -> np.ndarray:
        """Vertices of T_j (1-based, as a (3, 2) array)."""
        return self.vertices[self.triangles[j - 1]]

    @property
    def l1(self) -> float:
        return float(np.linalg.norm(self.E[0] - self.I[-1]))

    @property
    def l2(self) -> float:
        return float(np.linalg.norm(self.E[0] - self.I[0]))

    def e(self, i: int, j: int) -> np.ndarray:
        """Unit vector from E_j towards I_i (1-based)."""
        d = self.I[i - 1] - self.E[j - 1]
        return d / np.linalg.norm(d)

    @property
    def e11(self) -> np.ndarray:
        return self.e(1, 1)

    @property
    def e11_perp(self) -> np.ndarray:
        return perp(self.e11)

    @property
    def en1(self) -> np.ndarray:
        return self.e(self.n, 1)

    def measured_angle(self) -> float:
        c = float(np.clip(self.e11 @ self.en1, -1.0, 1.0))
        return math.acos(c)

    def tiling_residual(self) -> float:
        """Relative mismatch between the triangle areas and the shell area."""
        V = self.vertices
        tri = V[self.triangles]
        areas = 0.5 * np.abs(
            (tri[:, 1, 0] - tri[:, 0, 0]) * (tri[:, 2, 1] - tri[:, 0, 1])
            - (tri[:, 1, 1] - tri[:, 0, 1]) * (tri[:, 2, 0] - tri[:, 0, 0])
        )
        shell = polygon_area(self.E) - polygon_area(self.I)
        return abs(areas.sum() - shell) / shell

    def triangle_signs(self) -> np.ndarray:
        tri = self.vertices[self.triangles]
        return np.sign(
            (tri[:, 1, 0] - tri[:, 0, 0]) * (tri[:, 2, 1] - tri[:, 0, 1])
            - (tri[:, 1, 1] - tri[:, 0, 1]) * (tri[:, 2, 0] - tri[:, 0, 0])
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "rE": self.r_E,
            "rI": self.r_I,
            "E": self.E.tolist(),
            "I": self.I.tolist(),
            "triangles": self.triangles.tolist(),
        }


def polygon_area(P: np.ndarray) -> float:
    x, y = P[:, 0], P[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def triangle_indices(n: int) -> np.ndarray:
    """Index triples into [E_1..E_n, I_1..I_n] for T_1..T_2n."""
    E = lambda i: (i - 1) % n  # noqa: E731
    I = lambda i: n + (i - 1) % n  # noqa: E731,E741
    tris = []
    for j in range(1, 2 * n + 1):
        if j % 2:
            k = (j + 1) // 2
            tris.append((E(k), I(k - 1), I(k)))
        else:
            k = j // 2
            tris.append((E(k), I(k), E(k + 1)))
    return np.array(tris, dtype=np.int64)


def build_config(n: int, alpha: float, r_E: float = 1.0) -> NGonConfig:
    _check(n, alpha)
    if not r_E > 0.0:
        raise ValueError(f"r_E must be positive, got {r_E!r}")
    x = radius_ratio(n, alpha)
    r_I = r_E * x
    k = np.arange(n)
    ang = 2.0 * np.pi * k / n
    E = r_E * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    ang_i = ang + 2.0 * np.pi * alpha / n
    I = r_I * np.stack([np.cos(ang_i), np.sin(ang_i)], axis=1)  # noqa: E741
    return NGonConfig(int(n), float(alpha), float(r_E), r_I, E, I, triangle_indices(n), x < DEGENERATE_RATIO)


# ---------------------------------------------------------------- quartic roots

@dataclass(frozen=True)
class QuarticRootReport:
    n: int
    alpha: float
    roots: tuple  # four complex values (nan when undefined)
    real: tuple
    in_unit: tuple
    satisfies: tuple

    @property
    def admissible(self) -> list[int]:
        return [i for i in range(4) if self.real[i] and self.in_unit[i] and self.satisfies[i]]


def _compat_lhs_rhs(n: int, alpha: float, x: float) -> tuple[float, float]:
    """Both sides of l1 l2 cos(phi) = (I_n − E_1)·(I_1 − E_1) at r_E = 1."""
    t = 2.0 * math.pi / n
    l1 = math.sqrt(1.0 + x * x - 2.0 * x * math.cos(t * (1.0 - alpha)))
    l2 = math.sqrt(1.0 + x * x - 2.0 * x * math.cos(t * alpha))
    lhs = l1 * l2 * math.cos(necessary_angle(n))
    rhs = 1.0 + x * x * math.cos(t) - 2.0 * x * math.cos(math.pi / n) * math.cos(math.pi * (1.0 - 2.0 * alpha) / n)
    return lhs, rhs


def quartic_coefficients(n: int, alpha: float) -> np.ndarray:
    """Coefficients (highest first) of the squared compatibility relation in x."""
    t = 2.0 * math.pi / n
    c2 = math.cos(necessary_angle(n)) ** 2
    p1 = np.array([1.0, -2.0 * math.cos(t * alpha), 1.0])
    p2 = np.array([1.0, -2.0 * math.cos(t * (1.0 - alpha)), 1.0])
    q = np.array([math.cos(t), -2.0 * math.cos(math.pi / n) * math.cos(math.pi * (1 - 2 * alpha) / n), 1.0])
    return c2 * np.polymul(p1, p2) - np.polymul(q, q)


def quartic_roots(n: int, alpha: float, tol: float = 1e-10) -> QuarticRootReport:
    _check(n, alpha)
    t = 2.0 * math.pi / n
    half_rho = math.pi * (1.0 - 2.0 * alpha) / n
    s = math.sqrt(math.sin(t * alpha) * math.sin(t * (1.0 - alpha)))
    c1 = math.cos(math.pi / n)
    c3 = math.cos(3.0 * math.pi / n)
    c2 = math.cos(t)
    ch = math.cos(half_rho)
    disc = complex(c2 * c2 * ch * ch - c3 * c1) ** 0.5
    roots = [(ch - s) / c1, (ch + s) / c1]
    # Third root in rationalized form, finite through cos(3pi/n) = 0.
    roots.append(c1 / (c2 * ch + disc))
    if abs(c3) < 1e-15:  # n = 6: the fourth root runs off to infinity
        roots.append(complex(math.nan, 0.0))
    else:
        roots.append((c2 * ch + disc) / c3)
    roots = [complex(r) for r in roots]
    real, in_unit, sat = [], [], []
    for r in roots:
        is_real = math.isfinite(r.real) and abs(r.imag) <= 1e-14
        real.append(is_real)
        in_unit.append(is_real and 0.0 < r.real < 1.0)
        if is_real:
            lhs, rhs = _compat_lhs_rhs(n, alpha, r.real)
            sat.append(abs(lhs - rhs) <= tol * max(1.0, abs(rhs)))
        else:
            sat.append(False)
    return QuarticRootReport(int(n), float(alpha), tuple(roots), tuple(real), tuple(in_unit), tuple(sat))


def verify_isneg(n: int, alpha: float) -> float:
    """1 + x^2 cos(2pi/n) − 2x cos(pi/n) cos(rho_n/2) at the third root; should be < 0."""
    if n < 4:
        raise ValueError("the sign check applies to n >= 4")
    rep = quartic_roots(n, alpha)
    x = rep.roots[2]
    if not rep.real[2]:
        raise ValueError(f"third root is not real for n={n}, alpha={alpha}")
    x = x.real
    return 1.0 + x * x * math.cos(2 * math.pi / n) - 2.0 * x * math.cos(math.pi / n) * math.cos(
        math.pi * (1.0 - 2.0 * alpha) / n
    )
