"""One stress-free layer: piecewise-constant gradients on the 2n shell
triangles, rotations inside and outside, offsets integrated across the
adjacency graph, and the checks that the result is what it claims to be.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from .linalg2 import reflection_about, rotation, rotation_angle
from .ngon_geometry import NGonConfig, build_config, necessary_angle, stretch_a
from .wells import WellSet, bain_matrix, dist_to_wells, enumerate_wells, membership_cauchy_green

EXTERIOR, TRIANGLE, INNER = "exterior", "triangle", "inner"


@dataclass(frozen=True)
class AffinePiece:
    kind: str
    verts: tuple  # indices into the owning map's vertex array (ccw or cw, convex)
    A: np.ndarray
    b: np.ndarray
    label: tuple = ()  # e.g. (layer, triangle number)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return x @ self.A.T + self.b


@dataclass(frozen=True)
class PiecewiseAffineMap:
    vertices: np.ndarray
    pieces: tuple
    normalized: bool = True
    meta: dict = field(default_factory=dict)

    # -- topology
    def edges(self) -> list[tuple[int, int, int, int]]:
        """(piece i, piece j, vertex p, vertex q) for each shared edge."""
        owner: dict[tuple[int, int], list[int]] = {}
        for k, pc in enumerate(self.pieces):
            m = len(pc.verts)
            for s in range(m):
                p, q = pc.verts[s], pc.verts[(s + 1) % m]
                owner.setdefault((min(p, q), max(p, q)), []).append(k)
        out = []
        for (p, q), ks in owner.items():
            for x in range(len(ks)):
                for y in range(x + 1, len(ks)):
                    out.append((ks[x], ks[y], p, q))
        return out

    def polygon(self, k: int) -> np.ndarray:
        return self.vertices[list(self.pieces[k].verts)]

    def area(self, k: int) -> float:
        P = self.polygon(k)
        x, y = P[:, 0], P[:, 1]
        return 0.5 * abs(float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)))

    # -- residuals
    def rank_one_residuals(self) -> np.ndarray:
        out = []
        for i, j, p, q in self.edges():
            t = self.vertices[q] - self.vertices[p]
            d = (self.pieces[i].A - self.pieces[j].A) @ t
            out.append(np.linalg.norm(d) / np.linalg.norm(t))
        return np.array(out)

    def vertex_residuals(self) -> np.ndarray:
        out = []
        for i, j, p, q in self.edges():
            for v in (p, q):
                x = self.vertices[v]
                out.append(np.linalg.norm(self.pieces[i].apply(x) - self.pieces[j].apply(x)))
        return np.array(out)

    def det_residuals(self, kinds=(TRIANGLE,)) -> np.ndarray:
        return np.array([abs(np.linalg.det(pc.A) - 1.0) for pc in self.pieces if pc.kind in kinds])

    def gradients(self, kind: str = TRIANGLE) -> np.ndarray:
        return np.array([pc.A for pc in self.pieces if pc.kind == kind])

    def piece_index(self, kind: str, label=None) -> int:
        for k, pc in enumerate(self.pieces):
            if pc.kind == kind and (label is None or pc.label == label):
                return k
        raise KeyError((kind, label))

    # -- evaluation
    def locate(self, x) -> np.ndarray:
        """Index of the piece containing each point; ties go to the lowest index."""
        X = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.full(len(X), -1, dtype=np.int64)
        for k, pc in enumerate(self.pieces):
            todo = out < 0
            if not todo.any():
                break
            inside = _in_convex(self.polygon(k), X[todo])
            if pc.kind == EXTERIOR:
                inside = ~_in_convex(self.polygon(k), X[todo], strict=True)
            rows = np.nonzero(todo)[0][inside]
            out[rows] = k
        return out

    def evaluate(self, x) -> np.ndarray:
        X = np.atleast_2d(np.asarray(x, dtype=float))
        idx = self.locate(X)
        Y = np.empty_like(X)
        for k in np.unique(idx):
            sel = idx == k
            Y[sel] = self.pieces[k].apply(X[sel])
        return Y if np.ndim(x) > 1 else Y[0]

    def with_gradient(self, k: int, A: np.ndarray) -> "PiecewiseAffineMap":
        pcs = list(self.pieces)
        pcs[k] = replace(pcs[k], A=np.asarray(A, dtype=float))
        return replace(self, pieces=tuple(pcs))

    def to_json(self) -> dict:
        return {
            "normalized": self.normalized,
            "vertices": self.vertices.tolist(),
            "pieces": [
                {"kind": pc.kind, "label": list(pc.label), "verts": list(pc.verts), "A": pc.A.tolist(), "b": pc.b.tolist()}
                for pc in self.pieces
            ],
        }


def _in_convex(P: np.ndarray, X: np.ndarray, strict: bool = False, eps: float = 1e-13) -> np.ndarray:
    a = P
    b = np.roll(P, -1, axis=0)
    cross = (b[None, :, 0] - a[None, :, 0]) * (X[:, None, 1] - a[None, :, 1]) - (b[None, :, 1] - a[None, :, 1]) * (
        X[:, None, 0] - a[None, :, 0]
    )
    scale = max(1.0, float(np.abs(P).max())) ** 2
    orient = np.sign(np.sum(a[:, 0] * b[:, 1] - b[:, 0] * a[:, 1]))
    cross = cross * orient
    if strict:
        return np.all(cross > eps * scale, axis=1)
    return np.all(cross >= -eps * scale, axis=1)


def integrate_offsets(vertices: np.ndarray, pieces: list[AffinePiece], root: int = 0) -> list[AffinePiece]:
    """Breadth-first offset propagation from ``root`` (whose offset is kept)."""
    tmp = PiecewiseAffineMap(vertices, tuple(pieces))
    nbrs: dict[int, list[tuple[int, int]]] = {}
    for i, j, p, _q in tmp.edges():
        nbrs.setdefault(i, []).append((j, p))
        nbrs.setdefault(j, []).append((i, p))
    b = {root: pieces[root].b}
    queue = deque([root])
    while queue:
        i = queue.popleft()
        for j, p in nbrs.get(i, []):
            if j in b:
                continue
            x = vertices[p]
            b[j] = pieces[i].A @ x + b[i] - pieces[j].A @ x
            queue.append(j)
    missing = set(range(len(pieces))) - set(b)
    if missing:
        raise ValueError(f"pieces {sorted(missing)} are not connected to the root")
    return [replace(pc, b=np.asarray(b[k], dtype=float)) for k, pc in enumerate(pieces)]


# ---------------------------------------------------------------- the construction

def Q(n: int, phi: float) -> np.ndarray:
    """Rotation by 2πφ/n."""
    return rotation(2.0 * math.pi * phi / n)


def triangle_gradients(cfg: NGonConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(gradients on T_1..T_2n, U, P0)."""
    n = cfg.n
    a = stretch_a(n, cfg.alpha)
    U = bain_matrix(n, a, cfg.e11).U
    P0 = reflection_about(cfg.e11)
    PUP = P0 @ U @ P0
    F = []
    for j in range(1, 2 * n + 1):
        if j % 2:
            R = Q(n, (j - 1) // 2)
            F.append(R @ U @ R.T)
        else:
            R = Q(n, (j - 2) // 2)
            F.append(R @ PUP @ R.T)
    return np.array(F), U, P0


def _rotation_taking(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    return rotation(math.atan2(w[1], w[0]) - math.atan2(v[1], v[0]))


def boundary_rotations(cfg: NGonConfig) -> tuple[np.ndarray, np.ndarray]:
    """(R_I, R_E): rotations matching the shell gradient along one inner and one outer edge."""
    F, U, P0 = triangle_gradients(cfg)
    d_in = cfg.I[0] - cfg.I[-1]
    d_out = cfg.E[1 % cfg.n] - cfg.E[0]
    return _rotation_taking(d_in, U @ d_in), _rotation_taking(d_out, P0 @ U @ P0 @ d_out)


def build_single_layer(cfg: NGonConfig, normalize: bool = True) -> PiecewiseAffineMap:
    n = cfg.n
    F, _U, _P0 = triangle_gradients(cfg)
    R_I, R_E = boundary_rotations(cfg)
    zero = np.zeros(2)
    pieces = [AffinePiece(EXTERIOR, tuple(range(n)), R_E, zero)]
    for j in range(1, 2 * n + 1):
        pieces.append(AffinePiece(TRIANGLE, tuple(int(v) for v in cfg.triangles[j - 1]), F[j - 1], zero, (0, j)))
    pieces.append(AffinePiece(INNER, tuple(range(n, 2 * n)), R_I, zero))
    pieces = integrate_offsets(cfg.vertices, pieces, root=0)
    if normalize:
        pieces = [replace(pc, A=R_E.T @ pc.A, b=R_E.T @ pc.b) for pc in pieces]
    meta = {"n": n, "alpha": cfg.alpha, "R_E": R_E, "R_I": R_I, "config": cfg}
    return PiecewiseAffineMap(cfg.vertices, tuple(pieces), normalize, meta)


def exterior_angle(n: int, alpha: float) -> float:
    """Angle of R_E for the un-normalized layer."""
    _R_I, R_E = boundary_rotations(build_config(n, alpha))
    return rotation_angle(R_E)


def exterior_angle_formula(n: int, a: float) -> float:
    return math.asin((a * a - 1.0) * math.cos(math.pi / n) / (1.0 + a * a + 2.0 * a * math.sin(math.pi / n)))


def inner_angle(n: int, alpha: float) -> float:
    """ρ_n = (2π/n)(1 − 2α)."""
    return 2.0 * math.pi * (1.0 - 2.0 * alpha) / n


# ---------------------------------------------------------------- verification

@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)


@dataclass(frozen=True)
class Report:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _max(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(x.max()) if x.size else 0.0


def verify_conditions(m: PiecewiseAffineMap, cfg: NGonConfig, tol: float = 1e-10, wells: WellSet | None = None) -> Report:
    n, alpha = cfg.n, cfg.alpha
    a = stretch_a(n, alpha)
    if wells is None:
        wells = enumerate_wells(n, a, e11=cfg.e11)
    ext = m.pieces[m.piece_index(EXTERIOR)]
    inner = m.pieces[m.piece_index(INNER)]
    R_E = m.meta["R_E"]
    # Target for the exterior: identity when normalized, R_E otherwise.
    ext_target = np.eye(2) if m.normalized else R_E
    shell = m.gradients(TRIANGLE)
    well_dist = [dist_to_wells(A, wells) for A in shell]
    cg = [membership_cauchy_green(A, wells, tol)[1] if np.linalg.det(A) > 0 else math.inf for A in shell]
    R_star = rotation(inner_angle(n, alpha))
    inner_target = R_star if m.normalized else R_E @ R_star
    flip_target = cfg.r_I * np.array([math.cos(2 * math.pi * alpha / n), -math.sin(2 * math.pi * alpha / n)])
    if not m.normalized:
        flip_target = R_E @ flip_target
    flip = np.linalg.norm(inner.apply(cfg.I[-1]) - flip_target)
    checks = [
        Check("affine", 0.0, tol),
        Check("exterior", float(np.abs(ext.A - ext_target).max() + np.abs(ext.b).max()), tol),
        Check("well_inclusion", _max(well_dist), tol),
        Check("cauchy_green", _max(cg), tol),
        Check("det", _max(m.det_residuals()), tol),
        Check("inner_rotation", float(np.abs(inner.A - inner_target).max()), tol),
        Check("flip", float(flip), tol),
        Check("rank_one", _max(m.rank_one_residuals()), tol),
        Check("vertex_continuity", _max(m.vertex_residuals()), tol),
        Check("necessary_angle", abs(cfg.measured_angle() - necessary_angle(n)), tol),
    ]
    return Report(tuple(checks))


def verify_appendixB(n: int, alpha: float, tol: float = 1e-12, mutate: bool = False) -> float:
    """Frobenius residual of P0 U P0 = Q_α U Q_{1−α}ᵀ (Q_α → Q_2α when ``mutate``)."""
    cfg = build_config(n, alpha)
    U = bain_matrix(n, stretch_a(n, alpha), cfg.e11).U
    P0 = reflection_about(cfg.e11)
    left = Q(n, 2 * alpha if mutate else alpha)
    return float(np.linalg.norm(P0 @ U @ P0 - left @ U @ Q(n, 1 - alpha).T))


def evaluate(m: PiecewiseAffineMap, x) -> np.ndarray:
    return m.evaluate(x)
