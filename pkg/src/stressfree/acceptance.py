"""The acceptance checks, one function per criterion, each returning rows.

A row is (criterion, check, value, relation, bound). ``value`` is the worst
case observed over the parameter set named in the check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import limit_field as lf
from . import linearized as lin
from . import tetra3d
from .ngon_geometry import build_config, quartic_roots, radius_ratio, stretch_a, verify_isneg
from .onion import (
    build_onion,
    eigenvector_residual,
    energy_report,
    layer_symmetry_residuals,
    noniterability_gap,
)
from .single_layer import build_single_layer, verify_appendixB, verify_conditions
from .wells import dist_to_wells, enumerate_wells, membership_cauchy_green, nlce_anisotropy

ALPHAS_9 = tuple(round(0.1 * k, 1) for k in range(1, 10))


@dataclass(frozen=True)
class Row:
    criterion: int
    check: str
    value: float
    relation: str  # "<=", ">=", "==", "<", ">"
    bound: float

    @property
    def passed(self) -> bool:
        v, b = self.value, self.bound
        if not math.isfinite(v):
            return False
        return {"<=": v <= b, ">=": v >= b, "==": v == b, "<": v < b, ">": v > b}[self.relation]


# ---------------------------------------------------------------- 1

def criterion_1(seed: int = 0) -> list[Row]:
    rows = []
    for n, al, target, tol in ((3, 0.1, 171, 1.0), (4, 0.1, 118, 1.0), (5, 0.1, 102, 1.0), (10, 0.1, 85, 1.0), (50, 0.35, 3.5, 0.05)):
        r = nlce_anisotropy(n, stretch_a(n, al))
        rows.append(Row(1, f"|r_n - {target}| at n={n} alpha={al}", abs(r - target), "<=", tol))
    return rows


# ---------------------------------------------------------------- 2, 3, 4

def criterion_2(seed: int = 0) -> list[Row]:
    worst = {k: 0.0 for k in ("rank_one", "vertex_continuity", "det", "well_inclusion", "flip", "necessary_angle")}
    for n in range(3, 13):
        for al in ALPHAS_9:
            cfg = build_config(n, al)
            rep = verify_conditions(build_single_layer(cfg), cfg, tol=1e-10)
            for k in worst:
                worst[k] = max(worst[k], rep[k].residual)
    tols = {"rank_one": 1e-10, "vertex_continuity": 1e-10, "det": 1e-12, "well_inclusion": 1e-10, "flip": 1e-12, "necessary_angle": 1e-12}
    return [Row(2, f"{k} over n=3..12 x alpha=0.1..0.9", worst[k], "<=", tols[k]) for k in worst]


def criterion_3(seed: int = 0) -> list[Row]:
    outer, inner, eig = 0.0, math.inf, 0.0
    for n in range(3, 9):
        for al in (0.2, 0.35, 0.47):
            o, i = noniterability_gap(n, al)
            outer, inner = max(outer, o), min(inner, i)
            eig = max(eig, eigenvector_residual(n, al))
    half = max(max(noniterability_gap(n, 0.5)) for n in range(3, 9))
    return [
        Row(3, "outer_gap max over n=3..8 x {0.2,0.35,0.47}", outer, "<=", 1e-10),
        Row(3, "inner_gap min over n=3..8 x {0.2,0.35,0.47}", inner, ">=", 1e-4),
        Row(3, "both gaps at alpha=0.5, n=3..8", half, "<=", 1e-12),
        Row(3, "closed-form eigenvector residual", eig, "<=", 1e-12),
    ]


def criterion_4(seed: int = 0) -> list[Row]:
    ht = it = ab = 0.0
    m_ht = m_it = m_ab = math.inf
    for n in range(3, 13):
        for al in ALPHAS_9:
            r = layer_symmetry_residuals(n, al)
            ht, it = max(ht, r["half_turn"]), max(it, r["iterpos"])
            ab = max(ab, verify_appendixB(n, al))
            if al == 0.5:  # U = I: every mutation is invisible
                continue
            m = layer_symmetry_residuals(n, al, mutate=True)
            m_ht, m_it = min(m_ht, m["half_turn"]), min(m_it, m["iterpos"])
            m_ab = min(m_ab, verify_appendixB(n, al, mutate=True))
    return [
        Row(4, "half-turn identity", ht, "<=", 1e-12),
        Row(4, "iterated-position identity", it, "<=", 1e-12),
        Row(4, "reflection identity P0 U P0 = Q_a U Q_(1-a)^T", ab, "<=", 1e-12),
        Row(4, "mutated half-turn (alpha != 0.5)", m_ht, ">=", 1e-3),
        Row(4, "mutated iterated-position (alpha != 0.5)", m_it, ">=", 1e-3),
        Row(4, "mutated reflection identity (alpha != 0.5)", m_ab, ">=", 1e-3),
    ]


# ---------------------------------------------------------------- 5

def criterion_5(seed: int = 0) -> list[Row]:
    rows = []
    for al in (0.2, 0.35):
        p = lf.LimitParams(al)
        res = lf.convergence_test(al, (50, 200), samples=1000, seed=seed)
        rows.append(Row(5, f"error(200)/error(50) at alpha={al}", res.errors[1] / res.errors[0], "<=", 1.0 / 3.0))
        X = lf.annulus_samples(1000, seed)
        rows.append(Row(5, f"finite-difference gradient, h=1e-5, alpha={al}", lf.verify_gradient_consistency(p, X, 1e-5), "<=", 1e-8))
        v = lf.limit_deformations(p, X)
        rows.append(
            Row(5, f"| |v(x)| - |x| | at alpha={al}", float(np.abs(np.linalg.norm(v, axis=1) - np.linalg.norm(X, axis=1)).max()), "<=", 1e-12)
        )
        rows.append(Row(5, f"annulus gradients failing limit membership, alpha={al}", float(lf.membership_residual(p, X)), "==", 0.0))
    return rows


# ---------------------------------------------------------------- 6

def criterion_6(seed: int = 0) -> list[Row]:
    rows = []
    bad = sum(lin.orbit_count(n) != n for n in range(3, 16, 2))
    rows.append(Row(6, "odd n in 3..15 with orbit_count(n) != n", float(bad), "==", 0.0))

    X = lf.annulus_samples(10_000, seed)
    eig = eik = eik38 = 0.0
    M = np.diag([0.25, 0.25])
    for x in X:
        _v, G, S = lin.w_field(x)
        ev = np.linalg.eigvalsh(S)
        eig = max(eig, abs(ev[0] + 2.0), abs(ev[1] - 2.0))
        eik = max(eik, abs(lin.eikonal_residual(4.0 / 3.0 * G, M, x)))
        eik38 = max(eik38, abs(lin.eikonal_residual(lin.eikonal_scale() * G, M, x)))
    rows.append(Row(6, "eigenvalues of e(grad w) = +-2 at 1e4 points", eig, "<=", 1e-12))
    rows.append(Row(6, "Eikonal residual of (4/3)w, e(M')=diag(1/4,1/4)", eik, "<=", 1e-12))
    rows.append(Row(6, "Eikonal residual of (3/8)w, e(M')=diag(1/4,1/4)", eik38, "<=", 1e-12))

    err = 0.0
    ratio_dev = 0.0
    for n in range(3, 13):
        err = max(err, float(lin.strain_errors(n, 1e-4).max()))
        ratio_dev = max(ratio_dev, abs(lin.richardson_ratio(n, 1e-4) - 4.0))
    rows.append(Row(6, "linearized strain vs E_j at h=1e-4, n=3..12", err, "<=", 1e-6))
    rows.append(Row(6, "|Richardson ratio - 4|, n=3..12", ratio_dev, "<=", 0.1))

    cor = 0.0
    for n in range(3, 16):
        cor = max(cor, lin.half_turn_residual(n), lin.iteration_residual(n))
        if n % 2:
            cor = max(cor, lin.reflected_half_turn_residual(n))
    rows.append(Row(6, "strain-well identities, n=3..15", cor, "<=", 1e-12))
    return rows


# ---------------------------------------------------------------- 7

@lru_cache(maxsize=None)
def _wells(n: int, k: int):
    return enumerate_wells(n, stretch_a(n, k / 100.0))


def _membership_disagreements(count: int, seed: int) -> int:
    """Disagreements between Cauchy-Green and coset membership on random instances."""
    rng = np.random.default_rng(seed)
    tol_cg, tol_dist = 1e-8, 1e-8
    bad = 0
    for k in range(count):
        W = _wells(int(rng.integers(3, 13)), int(rng.integers(1, 100)))
        th = rng.uniform(-math.pi, math.pi)
        R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
        F = R @ W.wells[int(rng.integers(len(W.wells)))]
        if k % 2:
            F = F + rng.uniform(1e-4, 1e-1) * rng.standard_normal((2, 2))
        else:
            F = F + 1e-14 * rng.standard_normal((2, 2))
        if np.linalg.det(F) <= 0.0:
            continue
        a = membership_cauchy_green(F, W, tol_cg)[0]
        b = dist_to_wells(F, W) <= tol_dist
        bad += int(a != b)
    return bad


def criterion_7(seed: int = 0) -> list[Row]:
    not_one = 0
    worst = 0.0
    for n in range(3, 51):
        for k in range(1, 100):
            al = k / 100.0
            rep = quartic_roots(n, al)
            adm = rep.admissible
            if len(adm) != 1:
                not_one += 1
                continue
            worst = max(worst, abs(rep.roots[adm[0]].real - radius_ratio(n, al)))
    isneg = max(verify_isneg(n, k / 100.0) for n in range(5, 51) for k in range(1, 100))
    return [
        Row(7, "grid points without exactly one admissible root", float(not_one), "==", 0.0),
        Row(7, "|admissible root - r_I|", worst, "<=", 1e-10),
        Row(7, "max sign quantity, n=5..50", isneg, "<", 0.0),
        Row(7, "membership test disagreements on 1e4 instances", float(_membership_disagreements(10_000, seed)), "==", 0.0),
    ]


# ---------------------------------------------------------------- 8

def criterion_8(seed: int = 0, steps: int = 50) -> list[Row]:
    rows = []
    th = tetra3d.grid(0.05, math.pi / 2 - 0.05, steps)
    rr = tetra3d.grid(0.02, 0.31, steps)
    for axis in ("x3", "vertex"):
        res = tetra3d.singular_value_scan(axis, th, rr)
        rows.append(Row(8, f"{axis}: |det - 1| on every simplex", res.det_residual, "<=", 1e-12))
        rows.append(Row(8, f"{axis}: |sigma_2 - 1|", res.middle_residual, "<=", 1e-10))
        rows.append(Row(8, f"{axis}: min disparity over the band", res.min_disparity()[0], ">", 1e-2))
    aus = 0.0
    for t in th:
        for r in rr:
            d = tetra3d.build_vertex(r, t).austenite_residuals()
            aus = max(aus, d["identity"], d["rotation"])
    rows.append(Row(8, "vertex: austenite caps identity / rotation", aus, "<=", 1e-12))
    return rows


# ---------------------------------------------------------------- 9

def criterion_9(seed: int = 0) -> list[Row]:
    single = max(energy_report(build_onion(n, al, 1)).elastic for n in (3, 5, 8) for al in (0.2, 0.47))
    surf = min(energy_report(build_onion(n, al, 1)).surface for n in (3, 5, 8) for al in (0.2, 0.47))
    consts = [energy_report(build_onion(3, 0.47, L)).constant for L in range(2, 7)]
    return [
        Row(9, "single-layer elastic energy", single, "<=", 1e-20),
        Row(9, "single-layer surface energy (min)", surf, ">", 0.0),
        Row(9, "max/min of elastic/bound for 2..6 rings at (3, 0.47)", max(consts) / min(consts), "<=", 2.0),
    ]


# ---------------------------------------------------------------- 10

def criterion_10(seed: int = 0) -> list[Row]:
    """Two in-process renders of a seeded sub-report must agree byte for byte."""
    a = format_rows(criterion_1(seed) + criterion_3(seed) + criterion_5(seed))
    b = format_rows(criterion_1(seed) + criterion_3(seed) + criterion_5(seed))
    return [Row(10, "repeated seeded report differs", float(a != b), "==", 0.0)]


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}

SUITES = {
    "all": tuple(range(1, 11)),
    "nonlinear": (1, 2, 3, 4),
    "limit": (5,),
    "linear": (6,),
    "appendix": (4, 7),
    "3d": (8,),
    "energy": (9,),
    "determinism": (10,),
}


def run(suite: str = "all", seed: int = 0) -> list[Row]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    rows: list[Row] = []
    for c in SUITES[suite]:
        rows.extend(CRITERIA[c](seed))
    return rows


def format_rows(rows: list[Row]) -> str:
    lines = []
    for r in rows:
        mark = "PASS" if r.passed else "FAIL"
        lines.append(f"[{mark}] {r.criterion:>2}  {r.check}: {float(r.value)!r} {r.relation} {float(r.bound)!r}")
    return "\n".join(lines) + "\n"
