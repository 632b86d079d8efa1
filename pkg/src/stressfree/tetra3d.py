"""Volume-preserving piecewise-affine maps between nested dual tetrahedra.

The outer tetrahedron T1 is fixed pointwise. The inner one,
T2 = r R(−θ)(−T1), is sent to r R(+θ)(−T1). The shell T1 \\ T2 is cut into
14 simplices and each is mapped affinely by its vertex images. Every
gradient then has det 1 and singular values (λ, 1, 1/λ). The scans below
show that the smallest singular values never agree across region types.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import _kernels
from .linalg2 import dist_to_so3

V = np.array([[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])
AXES = {"x3": np.array([0.0, 0.0, 1.0]), "vertex": np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0)}
R_MAX = 1.0 / 3.0
T1_VOLUME = 8.0 / 3.0
REFINE_TOL = 1e-13


def _build_simplices():
    # point indices: 0..3 outer vertices V_i, 4..7 inner vertices P_i
    simp, kinds = [], []
    for i in range(4):
        simp.append([j for j in range(4) if j != i] + [4 + i])
        kinds.append(("capA", i))
    for i in range(4):
        simp.append([i] + [4 + j for j in range(4) if j != i])
        kinds.append(("capB", i))
    for i, j in itertools.combinations(range(4), 2):
        k, l = (m for m in range(4) if m not in (i, j))
        simp.append([i, j, 4 + k, 4 + l])
        kinds.append(("edge", (i, j)))
    return np.array(simp), tuple(kinds)


SIMPLICES, KINDS = _build_simplices()


def region_classes(axis: str) -> tuple[str, ...]:
    """Class label per simplex. Labels ending in ``_ax`` are austenite caps."""
    _check_axis(axis)
    out = []
    for kind, key in KINDS:
        if kind in ("capA", "capB"):
            out.append(kind + "_ax" if axis == "vertex" and key == 0 else kind)
        elif axis == "x3":
            i, j = key
            out.append("edge_perp" if V[i, 2] == V[j, 2] else "edge_obl")
        else:
            out.append("edge_ax" if 0 in key else "edge_off")
    return tuple(out)


def austenite_classes(axis: str) -> tuple[str, ...]:
    return ("capA_ax", "capB_ax") if axis == "vertex" else ()


def rotation3(axis_vec, theta: float) -> np.ndarray:
    """Rotation by ``theta`` about the unit vector ``axis_vec``."""
    a = np.asarray(axis_vec, dtype=float)
    a = a / np.linalg.norm(a)
    K = np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
    return np.eye(3) + math.sin(theta) * K + (1.0 - math.cos(theta)) * (K @ K)


def _check_axis(axis: str) -> None:
    if axis not in AXES:
        raise ValueError(f"axis must be 'x3' or 'vertex', got {axis!r}")


def _check_params(axis: str, r: float, theta: float) -> None:
    _check_axis(axis)
    if not (0.0 < r < R_MAX):
        raise ValueError(f"r must lie in (0, 1/3), got {r!r}")
    lo = 0.0 if axis == "x3" else -math.pi / 2
    if not (lo < theta < math.pi / 2) and not (axis == "vertex" and theta == 0.0):
        raise ValueError(f"theta out of range for axis {axis!r}: {theta!r}")


def _points(axis: str, r: float, theta: float) -> tuple[np.ndarray, np.ndarray]:
    ax = AXES[axis]
    src = np.vstack([V, r * (-V) @ rotation3(ax, -theta).T])
    dst = np.vstack([V, r * (-V) @ rotation3(ax, theta).T])
    return src, dst


@dataclass(frozen=True)
class ShearForm:
    """G = I + s b⊗m with b ⊥ m unit vectors."""

    s: float
    b: np.ndarray
    m: np.ndarray

    @property
    def frame(self) -> np.ndarray:
        """Columns (m, b, m×b); in this frame G is unit lower triangular with (2,1) entry s."""
        return np.column_stack([self.m, self.b, np.cross(self.m, self.b)])


def shear_form(G: np.ndarray, tol: float = 1e-10) -> ShearForm:
    N = np.asarray(G, dtype=float) - np.eye(3)
    U, S, Vt = np.linalg.svd(N)
    if S[1] > tol * max(1.0, S[0]):
        raise ValueError("gradient is not a rank-one perturbation of the identity")
    b, m = U[:, 0], Vt[0]
    if abs(b @ m) > tol:
        raise ValueError("rank-one part is not a shear (b not orthogonal to m)")
    return ShearForm(float(S[0]), b, m)


@dataclass(frozen=True)
class TetraConstruction:
    axis: str
    r: float
    theta: float
    points: np.ndarray  # (8, 3) reference vertices
    images: np.ndarray  # (8, 3)
    classes: tuple = field(repr=False)

    @property
    def simplices(self) -> np.ndarray:
        return SIMPLICES

    def gradients(self) -> np.ndarray:
        G, _S = _kernels.simplex_grads(self.points[SIMPLICES], self.images[SIMPLICES])
        return G

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.gradients(), compute_uv=False)

    def signed_volumes(self) -> np.ndarray:
        X = self.points[SIMPLICES]
        return np.linalg.det(np.swapaxes(X[:, 1:] - X[:, :1], 1, 2)) / 6.0

    def det_residual(self) -> float:
        return float(np.abs(np.linalg.det(self.gradients()) - 1.0).max())

    def middle_residual(self) -> float:
        return float(np.abs(self.singular_values()[:, 1] - 1.0).max())

    def volume_residual(self) -> float:
        """Relative gap between Σ|vol| and vol(T1) − vol(T2)."""
        target = T1_VOLUME * (1.0 - self.r**3)
        return float(abs(np.abs(self.signed_volumes()).sum() - target) / target)

    def orientation_consistent(self) -> bool:
        src, _ = _points(self.axis, self.r, 0.0)
        X = src[SIMPLICES]
        ref_sign = np.sign(np.linalg.det(np.swapaxes(X[:, 1:] - X[:, :1], 1, 2)))
        return bool(np.all(np.sign(self.signed_volumes()) == ref_sign))

    def tiling_valid(self, tol: float = 1e-12) -> bool:
        """Shell simplices tile T1 \\ T2: orientations agree with θ = 0 and the volumes add up."""
        return self.orientation_consistent() and self.volume_residual() <= tol

    def facet_continuity(self) -> float:
        """Max disagreement of neighbouring affine maps at points of shared facets."""
        G = self.gradients()
        worst = 0.0
        for s, t in itertools.combinations(range(len(SIMPLICES)), 2):
            shared = sorted(set(SIMPLICES[s]) & set(SIMPLICES[t]))
            if len(shared) != 3:
                continue
            P = self.points[shared]
            x = P.mean(axis=0)
            ys = [G[k] @ (x - self.points[SIMPLICES[k][0]]) + self.images[SIMPLICES[k][0]] for k in (s, t)]
            worst = max(worst, float(np.abs(ys[0] - ys[1]).max()))
        return worst

    def class_gradients(self, name: str) -> np.ndarray:
        G = self.gradients()
        return G[[k for k, c in enumerate(self.classes) if c == name]]

    def austenite_residuals(self) -> dict[str, float]:
        """capA_ax should be the identity, capB_ax a rotation (vertex axis only)."""
        if self.axis != "vertex":
            return {}
        A = self.class_gradients("capA_ax")[0]
        B = self.class_gradients("capB_ax")[0]
        return {"identity": float(np.abs(A - np.eye(3)).max()), "rotation": dist_to_so3(B)}

    def red_shears(self) -> list[ShearForm]:
        """Shear form of the x3-axis edge simplices whose outer edge is perpendicular to x3."""
        if self.axis != "x3":
            raise ValueError("the pure-shear regions belong to the x3 construction")
        return [shear_form(G) for G in self.class_gradients("edge_perp")]

    def class_sigma_min(self) -> dict[str, float]:
        S = self.singular_values()[:, 2]
        out: dict[str, float] = {}
        for c, s in zip(self.classes, S):
            out[c] = min(out.get(c, math.inf), float(s))
        return out

    def to_json(self) -> dict:
        return {
            "axis": self.axis,
            "r": self.r,
            "theta": self.theta,
            "points": self.points.tolist(),
            "images": self.images.tolist(),
            "simplices": SIMPLICES.tolist(),
            "classes": list(self.classes),
            "gradients": self.gradients().tolist(),
        }


def build(axis: str, r: float, theta: float) -> TetraConstruction:
    _check_params(axis, r, theta)
    src, dst = _points(axis, float(r), float(theta))
    return TetraConstruction(axis, float(r), float(theta), src, dst, region_classes(axis))


def build_x3(r: float, theta: float) -> TetraConstruction:
    return build("x3", r, theta)


def build_vertex(r: float, theta: float) -> TetraConstruction:
    return build("vertex", r, theta)


def exact_det_residual(axis: str, r: float, theta: float, dps: int = 40) -> float:
    """max |det ∇u − 1| with the construction redone in ``dps``-digit arithmetic.

    Near the parameters where a shell simplex flattens, double precision
    loses digits in det(∇u); this recomputes the same vertices exactly enough
    that only the construction itself is tested.
    """
    _check_params(axis, r, theta)
    with mpmath.workdps(dps):
        a = [mpmath.mpf(float(x)) for x in AXES[axis]]
        nrm = mpmath.sqrt(sum(x * x for x in a))
        a = [x / nrm for x in a]
        K = mpmath.matrix([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])
        t = mpmath.mpf(float(theta))
        rr = mpmath.mpf(float(r))

        def rot(angle):
            return mpmath.eye(3) + mpmath.sin(angle) * K + (1 - mpmath.cos(angle)) * (K * K)

        outer = [mpmath.matrix([float(x) for x in v]) for v in V]
        Rm, Rp = rot(-t), rot(t)
        src = outer + [rr * (Rm * (-v)) for v in outer]
        dst = outer + [rr * (Rp * (-v)) for v in outer]
        worst = mpmath.mpf(0)
        for simplex in SIMPLICES:
            D = mpmath.matrix(3, 3)
            E = mpmath.matrix(3, 3)
            for k in range(3):
                for c in range(3):
                    D[c, k] = src[simplex[k + 1]][c] - src[simplex[0]][c]
                    E[c, k] = dst[simplex[k + 1]][c] - dst[simplex[0]][c]
            worst = max(worst, abs(mpmath.det(E) / mpmath.det(D) - 1))
        return float(worst)


# ---------------------------------------------------------------- scans

def grid(lo: float, hi: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise ValueError("grid needs at least one step")
    if steps == 1:
        return np.array([0.5 * (lo + hi)])
    return np.linspace(lo, hi, steps)


@dataclass(frozen=True)
class ScanResult:
    axis: str
    thetas: np.ndarray
    rs: np.ndarray
    class_names: tuple
    sigma_min: np.ndarray  # (Nθ, Nr, C), per class
    sigma_simplex: np.ndarray  # (Nθ, Nr, 14)
    disparity: np.ndarray  # (Nθ, Nr)
    tiling_valid: np.ndarray  # (Nθ, Nr) bool
    det_residual: float  # after exact recomputation of ill-conditioned cells
    det_residual_float: float  # straight double-precision value
    refined_cells: int
    middle_residual: float

    def min_disparity(self, valid_only: bool = False) -> tuple[float, float, float]:
        """(value, θ, r) of the smallest disparity."""
        D = np.where(self.tiling_valid, self.disparity, np.inf) if valid_only else self.disparity
        i, j = np.unravel_index(int(np.argmin(D)), D.shape)
        return float(D[i, j]), float(self.thetas[i]), float(self.rs[j])

    def rows(self):
        """(axis, theta, r, region_class, sigma_min, disparity) in grid order."""
        for i, t in enumerate(self.thetas):
            for j, r in enumerate(self.rs):
                for c, name in enumerate(self.class_names):
                    yield self.axis, float(t), float(r), name, float(self.sigma_min[i, j, c]), float(self.disparity[i, j])


def singular_value_scan(axis: str, theta_grid, r_grid) -> ScanResult:
    _check_axis(axis)
    thetas = np.asarray(theta_grid, dtype=float)
    rs = np.asarray(r_grid, dtype=float)
    if thetas.size == 0 or rs.size == 0:
        raise ValueError("empty scan grid")
    for t in thetas:
        for r in rs:
            _check_params(axis, r, t)
    labels = region_classes(axis)
    skip = set(austenite_classes(axis))
    names = tuple(dict.fromkeys(c for c in labels if c not in skip))

    # One batched gradient computation for all cells.
    src = np.empty((thetas.size, rs.size, 8, 3))
    dst = np.empty_like(src)
    for i, t in enumerate(thetas):
        for j, r in enumerate(rs):
            src[i, j], dst[i, j] = _points(axis, r, t)
    X = src[:, :, SIMPLICES].reshape(-1, 4, 3)
    Y = dst[:, :, SIMPLICES].reshape(-1, 4, 3)
    G, S = _kernels.simplex_grads(np.ascontiguousarray(X), np.ascontiguousarray(Y))
    cell_det = np.abs(np.linalg.det(G) - 1.0).reshape(thetas.size, rs.size, -1).max(axis=2)
    det_float = float(cell_det.max())
    refine = np.argwhere(cell_det > REFINE_TOL)
    for i, j in refine:
        cell_det[i, j] = exact_det_residual(axis, rs[j], thetas[i])
    mid_res = float(np.abs(S[:, 1] - 1.0).max())
    smin = S[:, 2].reshape(thetas.size, rs.size, len(SIMPLICES))

    sig = np.empty((thetas.size, rs.size, len(names)))
    for c, name in enumerate(names):
        cols = [k for k, lab in enumerate(labels) if lab == name]
        sig[:, :, c] = smin[:, :, cols].min(axis=2)
    disparity = sig.max(axis=2) - sig.min(axis=2)

    vols = np.linalg.det(np.swapaxes(X[:, 1:] - X[:, :1], 1, 2)).reshape(thetas.size, rs.size, -1) / 6.0
    valid = np.empty((thetas.size, rs.size), dtype=bool)
    for j, r in enumerate(rs):
        s0, _ = _points(axis, r, 0.0)
        P = s0[SIMPLICES]
        ref = np.sign(np.linalg.det(np.swapaxes(P[:, 1:] - P[:, :1], 1, 2)))
        target = T1_VOLUME * (1.0 - r**3)
        ok_sign = np.all(np.sign(vols[:, j]) == ref, axis=1)
        ok_vol = np.abs(np.abs(vols[:, j]).sum(axis=1) - target) <= 1e-12 * target
        valid[:, j] = ok_sign & ok_vol
    return ScanResult(
        axis, thetas, rs, names, sig, smin, disparity, valid, float(cell_det.max()), det_float, len(refine), mid_res
    )
