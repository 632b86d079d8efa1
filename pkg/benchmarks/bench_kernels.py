"""Time each batched kernel in its numba and numpy forms.

    python benchmarks/bench_kernels.py [--repeat 5]

The numba column excludes the first (compiling) call; that cost is shown
separately. With STRESSFREE_NO_NUMBA=1 only the numpy column is filled.
"""
import argparse
import math
import time

import numpy as np

from stressfree import _accel, _kernels
from stressfree.limit_field import annulus_samples
from stressfree.ngon_geometry import stretch_a
from stressfree.onion import build_onion
from stressfree.tetra3d import SIMPLICES, _points, grid
from stressfree.wells import enumerate_wells


def _best(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    yield "svd2_values 1e6", "svd2_values", (rng.normal(size=(1_000_000, 2, 2)),)

    W = enumerate_wells(7, stretch_a(7, 0.3)).wells
    yield "coset_dist 2e5 x 14", "coset_dist", (rng.normal(size=(200_000, 2, 2)), W)

    on = build_onion(200, 0.3)
    cfg = on.config
    loc = (
        annulus_samples(20_000, 1, 0.0, 1.1),
        np.ascontiguousarray(cfg.E),
        np.ascontiguousarray(cfg.vertices[cfg.triangles]),
        np.ascontiguousarray(on.Q_alpha.T),
        1.0 / on.r_I,
        on.layers,
    )
    yield "locate 2e4 pts, n=200", "locate", loc

    X, Y = [], []
    for t in grid(0.05, math.pi / 2 - 0.05, 100):
        for r in grid(0.02, 0.31, 100):
            s, d = _points("x3", r, t)
            X.append(s[SIMPLICES])
            Y.append(d[SIMPLICES])
    yield "simplex_grads 100x100 grid", "simplex_grads", (np.concatenate(X), np.concatenate(Y))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"backend: {_accel.backend()}")
    print(f"{'kernel':<28}{'numpy s':>10}{'numba s':>10}{'compile s':>11}{'speedup':>9}")
    for label, name, a in cases():
        t_np = _best(getattr(_kernels, name + "_np"), a, args.repeat)
        if _accel.HAVE_NUMBA:
            nb = getattr(_kernels, name + "_nb")
            t0 = time.perf_counter()
            nb(*a)
            first = time.perf_counter() - t0
            t_nb = _best(nb, a, args.repeat)
            print(f"{label:<28}{t_np:>10.4f}{t_nb:>10.4f}{first:>11.3f}{t_np / t_nb:>8.1f}x")
        else:
            print(f"{label:<28}{t_np:>10.4f}{'-':>10}{'-':>11}{'-':>9}")


if __name__ == "__main__":
    main()
