"""Command-line interface.

Exit status: 0 when every check passes, 1 when a verification fails,
2 for usage errors (argparse's own convention).
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import export
from .export import Header, Shape

FORMATS = {
    "construct": ("json", "csv"),
    "star": ("svg", "csv", "json"),
    "limit": ("csv", "json", "svg"),
    "linearize": ("csv", "json", "svg"),
    "scan3d": ("csv", "json"),
    "verify": ("text", "csv", "json"),
    "roots": ("json", "csv"),
}


# ---------------------------------------------------------------- argument types

def _int_at_least(lo: int):
    def parse(s: str) -> int:
        try:
            v = int(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {v}")
        return v

    return parse


def _float_in(lo: float, hi: float, lo_open: bool = True, hi_open: bool = True):
    def parse(s: str) -> float:
        try:
            v = float(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a number, got {s!r}") from None
        ok_lo = v > lo if lo_open else v >= lo
        ok_hi = v < hi if hi_open else v <= hi
        if not (math.isfinite(v) and ok_lo and ok_hi):
            lb = "(" if lo_open else "["
            rb = ")" if hi_open else "]"
            raise argparse.ArgumentTypeError(f"must lie in {lb}{lo}, {hi}{rb}, got {v}")
        return v

    return parse


_alpha = _float_in(0.0, 1.0)
_positive = _float_in(0.0, math.inf)


def build_parser() -> argparse.ArgumentParser:
    from . import __version__

    p = argparse.ArgumentParser(prog="stressfree", description="Stress-free n-gon constructions and checks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt_default: str):
        sp.add_argument("--format", default=fmt_default)
        sp.add_argument("--out", default=None, help="output file (default: stdout)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=_positive, default=1e-10)

    sp = sub.add_parser("construct", help="single layer, with verification report")
    sp.add_argument("--n", type=_int_at_least(3), required=True)
    sp.add_argument("--alpha", type=_alpha, required=True)
    common(sp, "json")

    sp = sub.add_parser("star", help="iterated layers: director-field SVG or per-ring CSV")
    sp.add_argument("--n", type=_int_at_least(3), required=True)
    sp.add_argument("--alpha", type=_alpha, required=True)
    sp.add_argument("--layers", type=_int_at_least(1), default=None)
    common(sp, "svg")

    sp = sub.add_parser("limit", help="n -> infinity spiral field on the annulus")
    sp.add_argument("--alpha", type=_alpha, required=True)
    sp.add_argument("--samples", type=_int_at_least(1), default=1000)
    sp.add_argument("--h", type=_float_in(0.0, 1e-4, hi_open=False), default=1e-5)
    common(sp, "csv")

    sp = sub.add_parser("linearize", help="linearized wells, displacement and the field w")
    sp.add_argument("--n", type=_int_at_least(3), required=True)
    sp.add_argument("--h", type=_float_in(0.0, 1e-3, hi_open=False), default=1e-4)
    sp.add_argument("--field", choices=("orbit", "w"), default="orbit", help="what the CSV holds")
    common(sp, "csv")

    sp = sub.add_parser("scan3d", help="smallest singular values over a (theta, r) grid")
    sp.add_argument("--axis", choices=("x3", "vertex"), default="x3")
    sp.add_argument("--theta-min", type=float, default=0.05)
    sp.add_argument("--theta-max", type=float, default=math.pi / 2 - 0.05)
    sp.add_argument("--theta-steps", type=_int_at_least(1), default=50)
    sp.add_argument("--r-min", type=float, default=0.02)
    sp.add_argument("--r-max", type=float, default=0.31)
    sp.add_argument("--r-steps", type=_int_at_least(1), default=50)
    common(sp, "csv")

    from .acceptance import SUITES

    sp = sub.add_parser("verify", help="run the acceptance suite")
    sp.add_argument("--suite", choices=tuple(SUITES), default="all")
    common(sp, "text")

    sp = sub.add_parser("roots", help="the four radius roots and their admissibility")
    sp.add_argument("--n", type=_int_at_least(3), required=True)
    sp.add_argument("--alpha", type=_alpha, required=True)
    common(sp, "json")
    return p


# ---------------------------------------------------------------- commands

def _checks_json(report) -> list[dict]:
    return [{"name": c.name, "residual": c.residual, "tol": c.tol, "passed": c.passed} for c in report.checks]


def cmd_construct(args, header: Header) -> int:
    from .ngon_geometry import build_config
    from .single_layer import build_single_layer, verify_conditions

    cfg = build_config(args.n, args.alpha)
    m = build_single_layer(cfg)
    rep = verify_conditions(m, cfg, tol=args.tol)
    if args.format == "json":
        body = {"config": cfg.to_json(), "map": m.to_json(), "checks": _checks_json(rep), "passed": rep.passed}
        text = export.to_json(body, header)
    else:
        rows = [(c.name, c.residual, c.tol, c.passed) for c in rep.checks]
        text = export.to_csv(("check", "residual", "tol", "passed"), rows, header)
    export.write(text, args.out)
    return 0 if rep.passed else 1


def _piece_color(A: np.ndarray) -> str:
    from .linalg2 import svd2

    s = svd2(A)
    if s.s1 - s.s2 <= 1e-9 * s.s1:
        return export.NEUTRAL
    return export.color_for_angle(float(np.mod(s.left, math.pi)))


def star_shapes(on, scale: float) -> tuple[list[Shape], list[Shape]]:
    """Reference and deformed pieces (exterior omitted), coloured by director angle."""
    from .single_layer import EXTERIOR

    m = on.map
    ref, dfm = [], []
    for k, pc in enumerate(m.pieces):
        if pc.kind == EXTERIOR:
            continue
        P = m.polygon(k)
        color = _piece_color(pc.A)
        ref.append(Shape(P, fill=color, width=0.001))
        dfm.append(Shape(scale * pc.apply(P), fill=color, width=0.001))
    return ref, dfm


def cmd_star(args, header: Header) -> int:
    from .ngon_geometry import stretch_a
    from .onion import (
        build_onion,
        continuity_residual,
        energy_report,
        noniterability_gap,
        verify_layer_symmetries,
    )
    from .wells import nlce_anisotropy

    on = build_onion(args.n, args.alpha, args.layers)
    cont = continuity_residual(on)
    sym = verify_layer_symmetries(on, tol=max(args.tol, 1e-12))
    ok = cont <= args.tol and sym.passed
    r_n = nlce_anisotropy(args.n, stretch_a(args.n, args.alpha))
    scale = r_n ** (1.0 / 12.0)
    if args.format == "svg":
        ref, dfm = star_shapes(on, scale)
        text = export.to_svg([ref, dfm], header)
    else:
        en = energy_report(on)
        outer, inner = noniterability_gap(args.n, args.alpha)
        x = on.r_I
        rows = []
        for k in range(on.layers):
            term = x ** (2 * k) * abs(2 * k * args.alpha - round(2 * k * args.alpha)) if k else 0.0
            rows.append((k, x**k, en.per_ring[k], term))
        notes = {
            "layers": on.layers,
            "outer_gap": outer,
            "inner_gap": inner,
            "continuity": cont,
            "elastic": en.elastic,
            "surface": en.surface,
            "bound": en.bound,
            "nlce_scale": scale,
        }
        if args.format == "csv":
            text = export.to_csv(("ring", "radius", "elastic", "bound_term"), rows, header, notes)
        else:
            body = dict(notes, rings=[list(r) for r in rows], map=on.map.to_json(), checks=_checks_json(sym))
            text = export.to_json(body, header)
    export.write(text, args.out)
    return 0 if ok else 1


def cmd_limit(args, header: Header) -> int:
    from . import limit_field as lf
    from .wells import director_angles

    p = lf.LimitParams(args.alpha)
    X = lf.annulus_samples(args.samples, args.seed)
    G = lf.limit_gradients(p, X)
    fd = lf.verify_gradient_consistency(p, X, args.h)
    bad = lf.membership_residual(p, X)
    v = lf.limit_deformations(p, X)
    norm = float(np.abs(np.linalg.norm(v, axis=1) - np.linalg.norm(X, axis=1)).max())
    ok = fd <= 1e-8 and bad == 0 and norm <= 1e-12
    if args.format == "csv":
        th = director_angles(G)
        rows = [(x[0], x[1], g[0, 0], g[0, 1], g[1, 0], g[1, 1], t) for x, g, t in zip(X, G, th)]
        notes = {"alpha": args.alpha, "fd_residual": fd, "membership_failures": bad, "norm_residual": norm}
        text = export.to_csv(("x1", "x2", "g11", "g12", "g21", "g22", "director"), rows, header, notes)
    elif args.format == "json":
        body = {
            "alpha": args.alpha,
            "rho0": p.rho0,
            "beta0": p.beta0,
            "U_inf": p.U_inf,
            "fd_residual": fd,
            "membership_failures": bad,
            "norm_residual": norm,
            "tangential_jumps": lf.tangential_jumps(p),
        }
        text = export.to_json(body, header)
    else:
        shapes = []
        for r in np.linspace(0.5, 1.0, 6):
            w = np.linspace(-math.pi, math.pi, 121)
            C = np.stack([r * np.cos(w), r * np.sin(w)], axis=1)
            shapes.append(Shape(lf.limit_deformations(p, C), closed=False, width=0.002))
        for w0 in np.linspace(-math.pi, math.pi, 24, endpoint=False):
            rr = np.linspace(0.5, 1.0, 21)
            C = np.stack([rr * math.cos(w0), rr * math.sin(w0)], axis=1)
            shapes.append(Shape(lf.limit_deformations(p, C), closed=False, width=0.002))
        text = export.to_svg([shapes], header)
    export.write(text, args.out)
    return 0 if ok else 1


def cmd_linearize(args, header: Header) -> int:
    from . import limit_field as lf
    from . import linearized as lin

    n, h = args.n, args.h
    errs = lin.strain_errors(n, h)
    ratio = lin.richardson_ratio(n, h)
    ident = max(lin.half_turn_residual(n), lin.iteration_residual(n))
    if n % 2:
        ident = max(ident, lin.reflected_half_turn_residual(n))
    ok = float(errs.max()) <= max(1e-6, 1e2 * h * h) and ident <= 1e-12
    orbit = lin.dihedral_orbit(n)
    if args.format == "csv" and args.field == "orbit":
        rows = [(k, w.e11, w.e12) for k, w in enumerate(orbit.wells)]
        notes = {"n": n, "orbit_count": len(orbit.wells), "max_strain_error": float(errs.max()), "richardson": ratio}
        text = export.to_csv(("k", "e11", "e12"), rows, header, notes)
    elif args.format == "csv":
        X = lf.annulus_samples(400, args.seed)
        rows = []
        for x in X:
            val, _G, S = lin.w_field(x)
            rows.append((x[0], x[1], val[0], val[1], S[0, 0], S[0, 1]))
        text = export.to_csv(("x1", "x2", "w1", "w2", "e11", "e12"), rows, header)
    elif args.format == "json":
        body = {
            "n": n,
            "h": h,
            "strains": [lin.strain_E(n, j).vector for j in range(1, 2 * n + 1)],
            "orbit": [w.vector for w in orbit.wells],
            "max_strain_error": float(errs.max()),
            "richardson": ratio,
            "identity_residual": ident,
            "rank_one_coefficient": lin.rank_one_coefficient(n),
            "basis_independence": lin.basis_independence_check(n, h),
        }
        text = export.to_json(body, header)
    else:
        P = np.array([w.vector for w in orbit.wells])
        order = np.argsort(np.arctan2(P[:, 1], P[:, 0]))
        shapes = [Shape(P[order], fill="none", width=0.004)]
        for q in P:
            shapes.append(Shape(np.array([[0.0, 0.0], q]), closed=False, width=0.002))
        text = export.to_svg([shapes], header)
    export.write(text, args.out)
    return 0 if ok else 1


def cmd_scan3d(args, header: Header, parser) -> int:
    from . import tetra3d

    lo = 0.0 if args.axis == "x3" else -math.pi / 2
    if not (lo < args.theta_min <= args.theta_max < math.pi / 2):
        parser.error(f"theta range must lie in ({lo}, pi/2) for axis {args.axis}")
    if not (0.0 < args.r_min <= args.r_max < 1.0 / 3.0):
        parser.error("r range must lie in (0, 1/3)")
    th = tetra3d.grid(args.theta_min, args.theta_max, args.theta_steps)
    rr = tetra3d.grid(args.r_min, args.r_max, args.r_steps)
    res = tetra3d.singular_value_scan(args.axis, th, rr)
    dmin, tmin, rmin = res.min_disparity()
    ok = res.det_residual <= 1e-12 and res.middle_residual <= 1e-10 and dmin > 1e-2
    notes = {
        "min_disparity": dmin,
        "at_theta": tmin,
        "at_r": rmin,
        "det_residual": res.det_residual,
        "middle_residual": res.middle_residual,
        "tiling_valid_cells": int(res.tiling_valid.sum()),
    }
    if args.format == "csv":
        text = export.to_csv(("axis", "theta", "r", "region_class", "sigma_min", "disparity"), res.rows(), header, notes)
    else:
        body = dict(
            notes,
            axis=args.axis,
            thetas=res.thetas,
            rs=res.rs,
            classes=list(res.class_names),
            sigma_min=res.sigma_min,
            disparity=res.disparity,
            tiling_valid=res.tiling_valid,
        )
        text = export.to_json(body, header)
    export.write(text, args.out)
    return 0 if ok else 1


def cmd_verify(args, header: Header) -> int:
    from .acceptance import format_rows, run

    rows = run(args.suite, args.seed)
    if args.format == "text":
        text = "".join(f"# {line}\n" for line in header.lines()) + format_rows(rows)
        passed = sum(r.passed for r in rows)
        text += f"{passed}/{len(rows)} checks passed\n"
    elif args.format == "csv":
        text = export.to_csv(
            ("criterion", "check", "value", "relation", "bound", "passed"),
            [(r.criterion, r.check, float(r.value), r.relation, float(r.bound), r.passed) for r in rows],
            header,
        )
    else:
        body = {"suite": args.suite, "rows": [dict(vars(r), passed=r.passed) for r in rows]}
        text = export.to_json(body, header)
    export.write(text, args.out)
    return 0 if all(r.passed for r in rows) else 1


def cmd_roots(args, header: Header) -> int:
    from .ngon_geometry import quartic_roots, radius_ratio, verify_isneg

    rep = quartic_roots(args.n, args.alpha, tol=args.tol)
    target = radius_ratio(args.n, args.alpha)
    adm = rep.admissible
    ok = len(adm) == 1 and abs(rep.roots[adm[0]].real - target) <= args.tol
    isneg = None
    if args.n >= 4 and rep.real[2]:
        isneg = verify_isneg(args.n, args.alpha)
        ok = ok and (args.n < 5 or isneg < 0.0)
    rows = [
        (k + 1, rep.roots[k].real, rep.roots[k].imag, rep.real[k], rep.in_unit[k], rep.satisfies[k], k in adm)
        for k in range(4)
    ]
    if args.format == "json":
        keys = ("root", "re", "im", "real", "in_unit", "satisfies", "admissible")
        body = {"n": args.n, "alpha": args.alpha, "r_I": target, "sign_check": isneg, "roots": [dict(zip(keys, r)) for r in rows]}
        text = export.to_json(body, header)
    else:
        notes = {"n": args.n, "alpha": args.alpha, "r_I": target, "sign_check": isneg}
        text = export.to_csv(("root", "re", "im", "real", "in_unit", "satisfies", "admissible"), rows, header, notes)
    export.write(text, args.out)
    return 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format not in FORMATS[args.command]:
        parser.error(f"--format for {args.command} must be one of {', '.join(FORMATS[args.command])}")
    header = Header(" ".join(["stressfree", *argv]), args.seed)
    try:
        if args.command == "scan3d":
            return cmd_scan3d(args, header, parser)
        return _HANDLERS[args.command](args, header)
    except BrokenPipeError:
        # reader went away (e.g. `| head`); silence the flush at exit too
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 1


_HANDLERS = {
    "construct": cmd_construct,
    "star": cmd_star,
    "limit": cmd_limit,
    "linearize": cmd_linearize,
    "verify": cmd_verify,
    "roots": cmd_roots,
}


if __name__ == "__main__":
    sys.exit(main())
