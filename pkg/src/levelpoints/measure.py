"""Monte Carlo estimate of the invariant measure of a window on the unit level.

The measure of ``W`` is taken as the shell limit

    mu(W) = lim_{eps -> 0} Leb{x : 1 <= f(x) <= 1 + eps, f(x)^(-1/d) x in W} / eps,

which is invariant under every linear map of determinant +-1 preserving ``f``.
Only ratios of such estimates are meaningful.

Sampling is counter-based: sample ``i`` is row ``i % CHUNK`` of a Philox stream
keyed by ``(seed, stream)`` with counter ``i // CHUNK``, so the result does not
depend on how chunks are scheduled across threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateWindowError, DimensionError, UnsupportedFamilyError
from .enumeration import Window
from .varieties import DET, PFF, QUAD, det_bareiss, evaluate_float, quad_coefficient_matrix

CHUNK = 1 << 16
MIN_SAMPLES = 10**4
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    std_error: float  # nan when there were no hits
    samples: int
    epsilon: float
    seed: int
    hits: int
    box_volume: float
    flags: tuple = ()

    def as_row(self):
        se = "nan" if math.isnan(self.std_error) else repr(self.std_error)
        return f"{self.value!r},{se},{self.hits}"


# -- group actions ----------------------------------------------------------


def _sl_inverse(A):
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("group element must be square")
    if det_bareiss(A) != 1:
        raise ValueError("group element must have determinant 1")
    if n == 1:
        return [[1]]
    inv = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(A) if k != i]
            inv[j][i] = (-1) ** (i + j) * det_bareiss(minor)
    return inv


def _twice_gram(family):
    q = quad_coefficient_matrix(family)
    N = len(q)
    return [[2 * q[i][i] if i == j else q[min(i, j)][max(i, j)] for j in range(N)] for i in range(N)]


def action_matrix(family, g):
    """Integer N x N matrix of the linear map ``x -> g.x`` in canonical coordinates.

    ``g`` is ``(A, B)`` with ``X -> A X B^-1`` for det, ``A`` with ``X -> A^T X A``
    for pff, and a signed permutation matrix ``P`` with ``x -> P x`` for quad.
    """
    N = family.N
    if family.kind == DET:
        A, B = g
        n = family.n
        _sl_inverse(A)
        C = _sl_inverse(B)
        return [[A[i][k] * C[l][j] for k in range(n) for l in range(n)] for i in range(n) for j in range(n)]
    if family.kind == PFF:
        A = g
        _sl_inverse(A)
        size = 2 * family.n
        pairs = [(i, j) for i in range(size) for j in range(i + 1, size)]
        return [[A[k][i] * A[l][j] - A[l][i] * A[k][j] for k, l in pairs] for i, j in pairs]
    if family.kind == QUAD:
        P = [list(row) for row in g]
        if len(P) != N or any(len(row) != N for row in P):
            raise DimensionError(f"quad group element must be {N} x {N}")
        lines = P + [list(col) for col in zip(*P)]
        if any(v not in (-1, 0, 1) for row in P for v in row) or any(
            sum(v != 0 for v in line) != 1 for line in lines
        ):
            raise ValueError("quad group element must be a signed permutation matrix")
        S = _twice_gram(family)
        PtSP = [[sum(P[k][i] * S[k][l] * P[l][j] for k in range(N) for l in range(N)) for j in range(N)]
                for i in range(N)]
        if PtSP != S:
            raise ValueError("signed permutation does not preserve the quadratic form")
        return P
    raise UnsupportedFamilyError(family.kind)


def inverse_element(family, g):
    if family.kind == DET:
        A, B = g
        return (_sl_inverse(A), _sl_inverse(B))
    if family.kind == PFF:
        return _sl_inverse(g)
    return [list(col) for col in zip(*g)]


def _image_box(G, bounds):
    out = []
    for row in G:
        lo = sum(min(c * a, c * b) for c, (a, b) in zip(row, bounds))
        hi = sum(max(c * a, c * b) for c, (a, b) in zip(row, bounds))
        out.append((lo, hi))
    return out


def transform_window(family, window, g):
    """Smallest box containing ``g(window)``; equal to it when ``g`` permutes axes."""
    G = action_matrix(family, g)
    return Window(_image_box(G, window.bounds))


def in_transformed(family, window, g, y):
    """Exact-image membership: ``y in g(window)`` iff ``g^-1 y in window``."""
    Ginv = action_matrix(family, inverse_element(family, g))
    z = [sum(c * v for c, v in zip(row, y)) for row in Ginv]
    return window.contains(z)


# -- estimation -------------------------------------------------------------


def shell_box(window, epsilon, d):
    """Smallest box containing ``t*w`` for ``w`` in window, ``1 <= t <= (1+eps)^(1/d)``."""
    s = (1.0 + epsilon) ** (1.0 / d)
    fb = window.float_bounds()
    lo = np.minimum(fb[:, 0], fb[:, 0] * s)
    hi = np.maximum(fb[:, 1], fb[:, 1] * s)
    return lo, hi


def _chunk_hits(family, c, n_rows, seed, stream, box_lo, box_hi, w_lo, w_hi, epsilon, Ginv):
    rng = np.random.Generator(np.random.Philox(key=[seed & _MASK64, stream], counter=[0, 0, c, 0]))
    X = box_lo + rng.random((n_rows, len(box_lo))) * (box_hi - box_lo)
    v = evaluate_float(family, X)
    shell = (v >= 1.0) & (v <= 1.0 + epsilon)
    if not shell.any():
        return 0
    Y = X[shell]
    if Ginv is not None:
        Y = Y @ Ginv.T
    Y = Y * (v[shell] ** (-1.0 / family.d))[:, None]
    return int(np.all((Y >= w_lo) & (Y <= w_hi), axis=1).sum())


def estimate_measure(family, window, epsilon=0.01, samples=10**6, seed=0, *, g=None, stream=0, threads=1):
    """Shell-volume estimate of the measure of ``window`` (or of ``g(window)`` when ``g`` is given)."""
    if window.dim != family.N:
        raise DimensionError(f"window has {window.dim} axes, {family} needs {family.N}")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if samples < MIN_SAMPLES:
        raise ValueError(f"samples must be >= {MIN_SAMPLES}")
    if window.volume() <= 0:
        raise DegenerateWindowError("window has zero volume")
    box_lo, box_hi = shell_box(window, epsilon, family.d)
    Ginv = None
    if g is not None:
        G = action_matrix(family, g)
        Ginv = np.array(action_matrix(family, inverse_element(family, g)), dtype=float)
        img = _image_box(G, [(Fraction(a), Fraction(b)) for a, b in zip(box_lo.tolist(), box_hi.tolist())])
        box_lo = np.array([float(a) for a, _ in img])
        box_hi = np.array([float(b) for _, b in img])
    vol = float(np.prod(box_hi - box_lo))
    if vol <= 0:
        raise DegenerateWindowError("sampling box has zero volume")
    fb = window.float_bounds()
    w_lo, w_hi = fb[:, 0], fb[:, 1]
    nchunks = -(-samples // CHUNK)

    def work(c):
        rows = min(CHUNK, samples - c * CHUNK)
        return _chunk_hits(family, c, rows, seed, stream, box_lo, box_hi, w_lo, w_hi, epsilon, Ginv)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hits = sum(pool.map(work, range(nchunks)))
    else:
        hits = sum(map(work, range(nchunks)))
    p = hits / samples
    value = p * vol / epsilon
    if hits == 0:
        return MeasureEstimate(0.0, float("nan"), samples, epsilon, seed, 0, vol, ("no-hits",))
    se = math.sqrt(p * (1 - p) / samples) * vol / epsilon
    return MeasureEstimate(value, se, samples, epsilon, seed, hits, vol)
