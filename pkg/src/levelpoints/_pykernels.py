"""Pure-Python enumeration kernels.

Same signatures and output contract as the compiled ``_ckernels`` module: each
returns a list of integer tuples (unsorted) for the outer-coordinate slice
``[lo, hi]``.  These are exact for arbitrarily large integers.
"""

from math import gcd, isqrt

import numpy as np

BACKEND = "python"


def det2_points(m, L, H, lo, hi):
    """Integer 2x2 matrices (a, b, c, d) with a*d - b*c = m inside the box, a in [lo, hi]."""
    La, Lb, Lc, Ld = L
    Ha, Hb, Hc, Hd = H
    out = []
    for a in range(max(lo, La), min(hi, Ha) + 1):
        if a == 0:
            # -b*c = m, d free
            for b in range(Lb, Hb + 1):
                if b == 0 or m % b:
                    continue
                c = -m // b
                if Lc <= c <= Hc:
                    out.extend((0, b, c, d) for d in range(Ld, Hd + 1))
            continue
        aa = abs(a)
        t_lo, t_hi = sorted((a * Ld, a * Hd))
        for b in range(Lb, Hb + 1):
            g = gcd(b, aa)
            if m % g:
                continue
            step = aa // g
            c0 = 0 if step == 1 else (-(m // g) * pow(b // g, -1, step)) % step
            # a*d = m + b*c must land in [t_lo, t_hi]
            if b == 0:
                if not t_lo <= m <= t_hi:
                    continue
                clo, chi = Lc, Hc
            elif b > 0:
                clo = max(Lc, -((m - t_lo) // b))
                chi = min(Hc, (t_hi - m) // b)
            else:
                clo = max(Lc, -((m - t_hi) // b))
                chi = min(Hc, (t_lo - m) // b)
            if clo > chi:
                continue
            for c in range(clo + (c0 - clo) % step, chi + 1, step):
                out.append((a, b, c, (m + b * c) // a))
    return out


def pff2_points(m, L, H, lo, hi):
    """Skew 4x4 integer matrices with Pff = m; coordinates (x12, x13, x14, x23, x24, x34).

    With Pff = x13*x24 - x12*x34 - x14*x23, the first four free coordinates fix
    the product x12*x34 = r, which is then split into divisor pairs.
    """
    L0, L1, L2, L3, L4, L5 = L
    H0, H1, H2, H3, H4, H5 = H
    out = []
    for x13 in range(max(lo, L1), min(hi, H1) + 1):
        for x24 in range(L4, H4 + 1):
            p = x13 * x24 - m
            for x14 in range(L2, H2 + 1):
                for x23 in range(L3, H3 + 1):
                    r = p - x14 * x23
                    if r == 0:
                        if L0 <= 0 <= H0:
                            out.extend((0, x13, x14, x23, x24, x34) for x34 in range(L5, H5 + 1))
                        if L5 <= 0 <= H5:
                            out.extend((x12, x13, x14, x23, x24, 0) for x12 in range(L0, H0 + 1) if x12)
                        continue
                    ar = abs(r)
                    for x12 in range(max(L0, -ar), min(H0, ar) + 1):
                        if x12 and r % x12 == 0:
                            x34 = r // x12
                            if L5 <= x34 <= H5:
                                out.append((x12, x13, x14, x23, x24, x34))
    return out


def _isqrt_array(D):
    if D.dtype == object:
        return np.array([isqrt(int(v)) for v in D], dtype=object)
    s = np.floor(np.sqrt(D.astype(np.float64))).astype(np.int64)
    for _ in range(2):
        s -= s * s > D
        s += (s + 1) * (s + 1) <= D
    return s


def quad_points(m, q, L, H, lo, hi, dtype=np.int64):
    """Integer zeros of Q(x) = m in the box, solving the last coordinate from the others.

    ``q`` is the upper-triangular coefficient matrix with ``q[N-1][N-1] != 0``.
    The (up to) two innermost free coordinates are vectorized with numpy.
    """
    N = len(q)
    P = N - 1
    a = q[P][P]
    Lw, Hw = L[P], H[P]
    ranges = [range(L[i], H[i] + 1) for i in range(P)]
    ranges[0] = range(max(lo, L[0]), min(hi, H[0]) + 1)
    if any(len(r) == 0 for r in ranges) or Lw > Hw:
        return []
    nvec = min(2, P)
    outer = ranges[: P - nvec]
    inner = ranges[P - nvec:]
    grid = np.stack(
        [g.ravel() for g in np.meshgrid(*[np.arange(r.start, r.stop, dtype=np.int64) for r in inner], indexing="ij")],
        axis=1,
    ).astype(dtype)
    k = grid.shape[0]
    out = []
    for prefix in _odometer(outer):
        X = np.empty((k, P), dtype=dtype)
        for i, v in enumerate(prefix):
            X[:, i] = v
        X[:, P - nvec:] = grid
        B = np.zeros(k, dtype=dtype)
        C = np.full(k, -m, dtype=dtype)
        for i in range(P):
            if q[i][P]:
                B += q[i][P] * X[:, i]
            for j in range(i, P):
                if q[i][j]:
                    C += q[i][j] * X[:, i] * X[:, j]
        D = B * B - 4 * a * C
        keep = D >= 0
        if not keep.any():
            continue
        X, B, D = X[keep], B[keep], D[keep]
        s = _isqrt_array(D)
        sq = s * s == D
        X, B, s = X[sq], B[sq], s[sq]
        for sign in (1, -1):
            num = -B + sign * s
            ok = num % (2 * a) == 0
            if sign == -1:
                ok &= s != 0
            w = num[ok] // (2 * a)
            rng = (w >= Lw) & (w <= Hw)
            for row, wv in zip(X[ok][rng].tolist(), w[rng].tolist()):
                out.append(tuple(int(v) for v in row) + (int(wv),))
    return out


def _odometer(ranges):
    if not ranges:
        yield ()
        return
    idx = [r.start for r in ranges]
    while True:
        yield tuple(idx)
        i = len(ranges) - 1
        while i >= 0:
            idx[i] += 1
            if idx[i] < ranges[i].stop:
                break
            idx[i] = ranges[i].start
            i -= 1
        if i < 0:
            return
