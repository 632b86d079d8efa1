"""Batched hot loops, each with a numba version and a numpy twin.

The public names dispatch on ``_accel.HAVE_NUMBA``. Both versions are kept
importable (``*_nb`` / ``*_np``) so tests and the benchmark can compare them.
"""
import numpy as np

from ._accel import HAVE_NUMBA, njit


# ---------------------------------------------------------------- 2x2 singular values

def _svd2_values_py(M):
    n = M.shape[0]
    out = np.empty((n, 2))
    for i in range(n):
        e = 0.5 * (M[i, 0, 0] + M[i, 1, 1])
        f = 0.5 * (M[i, 0, 0] - M[i, 1, 1])
        g = 0.5 * (M[i, 1, 0] + M[i, 0, 1])
        h = 0.5 * (M[i, 1, 0] - M[i, 0, 1])
        q = np.sqrt(e * e + h * h)
        r = np.sqrt(f * f + g * g)
        out[i, 0] = q + r
        out[i, 1] = abs(q - r)
    return out


svd2_values_nb = njit(_svd2_values_py)


def svd2_values_np(M):
    M = np.asarray(M, dtype=float)
    e = 0.5 * (M[:, 0, 0] + M[:, 1, 1])
    f = 0.5 * (M[:, 0, 0] - M[:, 1, 1])
    g = 0.5 * (M[:, 1, 0] + M[:, 0, 1])
    h = 0.5 * (M[:, 1, 0] - M[:, 0, 1])
    q = np.hypot(e, h)
    r = np.hypot(f, g)
    return np.stack([q + r, np.abs(q - r)], axis=1)


# ---------------------------------------------------------------- distance to SO(2)·W

def _coset_dist_py(F, W):
    # The optimal R is the rotation part of X = F W^T; evaluating |F - R W|
    # directly avoids the cancellation in |F|^2 + |W|^2 - 2 tr(R^T X).
    nf = F.shape[0]
    nw = W.shape[0]
    out = np.empty((nf, nw))
    for i in range(nf):
        for j in range(nw):
            x00 = 0.0
            x01 = 0.0
            x10 = 0.0
            x11 = 0.0
            for k in range(2):
                x00 += F[i, 0, k] * W[j, 0, k]
                x01 += F[i, 0, k] * W[j, 1, k]
                x10 += F[i, 1, k] * W[j, 0, k]
                x11 += F[i, 1, k] * W[j, 1, k]
            p = x00 + x11
            q = x10 - x01
            nrm = np.sqrt(p * p + q * q)
            c = 1.0
            s = 0.0
            if nrm > 0.0:
                c = p / nrm
                s = q / nrm
            d2 = 0.0
            for k in range(2):
                r0 = F[i, 0, k] - (c * W[j, 0, k] - s * W[j, 1, k])
                r1 = F[i, 1, k] - (s * W[j, 0, k] + c * W[j, 1, k])
                d2 += r0 * r0 + r1 * r1
            out[i, j] = np.sqrt(d2)
    return out


coset_dist_nb = njit(_coset_dist_py)


def coset_dist_np(F, W):
    F = np.asarray(F, dtype=float)
    W = np.asarray(W, dtype=float)
    X = np.einsum("iak,jbk->ijab", F, W)
    p = X[..., 0, 0] + X[..., 1, 1]
    q = X[..., 1, 0] - X[..., 0, 1]
    nrm = np.hypot(p, q)
    safe = np.where(nrm > 0.0, nrm, 1.0)
    c = np.where(nrm > 0.0, p / safe, 1.0)
    s = np.where(nrm > 0.0, q / safe, 0.0)
    RW0 = c[..., None] * W[None, :, 0, :] - s[..., None] * W[None, :, 1, :]
    RW1 = s[..., None] * W[None, :, 0, :] + c[..., None] * W[None, :, 1, :]
    d0 = F[:, None, 0, :] - RW0
    d1 = F[:, None, 1, :] - RW1
    return np.sqrt(np.sum(d0 * d0, axis=-1) + np.sum(d1 * d1, axis=-1))


# ---------------------------------------------------------------- onion point location

def _locate_py(P, outer, tri, inv_rot, inv_scale, layers):
    """Layer and triangle index for each point.

    outer: (n,2) convex outer polygon (ccw).  tri: (T,3,2) layer-0 triangles.
    Layer k is layer 0 pushed forward by x -> scale^k rot^k x, so we pull the
    point back with the inverse pair.  Returns layer (-1 exterior, -2 core),
    triangle index, and the distance to the nearest edge of the containing
    triangle in physical units (inf when not in a triangle).
    """
    npts = P.shape[0]
    ntri = tri.shape[0]
    nout = outer.shape[0]
    lay = np.full(npts, -2, dtype=np.int64)
    idx = np.full(npts, -1, dtype=np.int64)
    dist = np.full(npts, np.inf)
    for p in range(npts):
        y0 = P[p, 0]
        y1 = P[p, 1]
        inside = True
        for e in range(nout):
            a0 = outer[e, 0]
            a1 = outer[e, 1]
            b0 = outer[(e + 1) % nout, 0]
            b1 = outer[(e + 1) % nout, 1]
            if (b0 - a0) * (y1 - a1) - (b1 - a1) * (y0 - a0) < 0.0:
                inside = False
                break
        if not inside:
            lay[p] = -1
            continue
        scale = 1.0
        for k in range(layers):
            found = False
            for t in range(ntri):
                x0 = tri[t, 0, 0]
                x1 = tri[t, 0, 1]
                u0 = tri[t, 1, 0] - x0
                u1 = tri[t, 1, 1] - x1
                v0 = tri[t, 2, 0] - x0
                v1 = tri[t, 2, 1] - x1
                det = u0 * v1 - u1 * v0
                w0 = y0 - x0
                w1 = y1 - x1
                l1 = (w0 * v1 - w1 * v0) / det
                l2 = (u0 * w1 - u1 * w0) / det
                l0 = 1.0 - l1 - l2
                if l0 >= 0.0 and l1 >= 0.0 and l2 >= 0.0:
                    # barycentric coordinate times the opposite height
                    area2 = abs(det)
                    e0 = np.hypot(tri[t, 2, 0] - tri[t, 1, 0], tri[t, 2, 1] - tri[t, 1, 1])
                    e1 = np.hypot(v0, v1)
                    e2 = np.hypot(u0, u1)
                    d = min(l0 * area2 / e0, min(l1 * area2 / e1, l2 * area2 / e2))
                    lay[p] = k
                    idx[p] = t
                    dist[p] = d / scale
                    found = True
                    break
            if found:
                break
            z0 = inv_scale * (inv_rot[0, 0] * y0 + inv_rot[0, 1] * y1)
            z1 = inv_scale * (inv_rot[1, 0] * y0 + inv_rot[1, 1] * y1)
            y0 = z0
            y1 = z1
            scale *= inv_scale
    return lay, idx, dist


locate_nb = njit(_locate_py)


def locate_np(P, outer, tri, inv_rot, inv_scale, layers):
    P = np.asarray(P, dtype=float)
    npts = P.shape[0]
    lay = np.full(npts, -2, dtype=np.int64)
    idx = np.full(npts, -1, dtype=np.int64)
    dist = np.full(npts, np.inf)

    a = outer
    b = np.roll(outer, -1, axis=0)
    cross = (b[None, :, 0] - a[None, :, 0]) * (P[:, None, 1] - a[None, :, 1]) - (
        b[None, :, 1] - a[None, :, 1]
    ) * (P[:, None, 0] - a[None, :, 0])
    lay[~np.all(cross >= 0.0, axis=1)] = -1

    x = tri[:, 0, :]
    u = tri[:, 1, :] - x
    v = tri[:, 2, :] - x
    det = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
    area2 = np.abs(det)
    heights = np.stack(
        [
            area2 / np.hypot(*(tri[:, 2, :] - tri[:, 1, :]).T),
            area2 / np.hypot(v[:, 0], v[:, 1]),
            area2 / np.hypot(u[:, 0], u[:, 1]),
        ],
        axis=1,
    )
    Y = P.copy()
    scale = 1.0
    todo = lay == -2
    for k in range(layers):
        if not todo.any():
            break
        w = Y[todo][:, None, :] - x[None, :, :]
        l1 = (w[..., 0] * v[None, :, 1] - w[..., 1] * v[None, :, 0]) / det
        l2 = (u[None, :, 0] * w[..., 1] - u[None, :, 1] * w[..., 0]) / det
        l0 = 1.0 - l1 - l2
        ok = (l0 >= 0.0) & (l1 >= 0.0) & (l2 >= 0.0)
        hit = ok.any(axis=1)
        first = np.argmax(ok, axis=1)
        rows = np.nonzero(todo)[0]
        sel = rows[hit]
        t = first[hit]
        lam = np.stack([l0, l1, l2], axis=2)[hit, t, :]
        lay[sel] = k
        idx[sel] = t
        dist[sel] = np.min(lam * heights[t], axis=1) / scale
        todo[sel] = False
        Y = inv_scale * (Y @ inv_rot.T)
        scale *= inv_scale
    return lay, idx, dist


# ---------------------------------------------------------------- 3x3 simplex gradients

def _simplex_grads_py(X, Y):
    """Gradient and singular values of the affine map X[s] -> Y[s] per simplex."""
    ns = X.shape[0]
    G = np.empty((ns, 3, 3))
    S = np.empty((ns, 3))
    D = np.empty((3, 3))
    E = np.empty((3, 3))
    for s in range(ns):
        for r in range(3):
            for c in range(3):
                D[c, r] = X[s, r + 1, c] - X[s, 0, c]
                E[c, r] = Y[s, r + 1, c] - Y[s, 0, c]
        g = E @ np.linalg.inv(D)
        G[s] = g
        S[s] = np.linalg.svd(g)[1]
    return G, S


simplex_grads_nb = njit(_simplex_grads_py)


def simplex_grads_np(X, Y):
    D = np.swapaxes(X[:, 1:, :] - X[:, :1, :], 1, 2)
    E = np.swapaxes(Y[:, 1:, :] - Y[:, :1, :], 1, 2)
    G = E @ np.linalg.inv(D)
    S = np.linalg.svd(G, compute_uv=False)
    return G, S


if HAVE_NUMBA:
    svd2_values = svd2_values_nb
    coset_dist = coset_dist_nb
    locate = locate_nb
else:
    svd2_values = svd2_values_np
    coset_dist = coset_dist_np
    locate = locate_np
# Per-simplex LAPACK calls from numba lose to numpy's batched inv/svd (see
# benchmarks/bench_kernels.py), so this one always takes the numpy path.
simplex_grads = simplex_grads_np
