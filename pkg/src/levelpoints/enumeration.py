"""Integer points of ``f = m`` whose radial projection lies in a box window.

A projected point ``m**(-1/d) * x`` lies in the closed box ``prod [lo_i, hi_i]``
iff ``ceil(m**(1/d) lo_i) <= x_i <= floor(m**(1/d) hi_i)``; those integer bounds
are computed exactly, so counts never depend on floating-point rounding.
"""

import hashlib
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product

import numpy as np

from . import kernels
from .arith import ceil_scaled, floor_scaled
from .errors import BudgetExceededError, DegenerateWindowError, DimensionError
from .varieties import (
    DET,
    PFF,
    QUAD,
    PolynomialFamily,
    det_bareiss,
    evaluate_many,
    pfaffian_exact,
    pfaffian_matrix_expand,
    pfaffian_sign,
    quad_coefficient_matrix,
)

log = logging.getLogger(__name__)

GENERATOR_VERSION = "lp1"
DEFAULT_BUDGET = 10**10
BRUTE_FORCE_BUDGET = 10**8
_CHUNK = 1 << 18


def _to_fraction(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        if not math.isfinite(v):
            raise DegenerateWindowError("window bounds must be finite")
        return Fraction(v)
    if isinstance(v, str):
        v = v.strip()
        if v.lower() in ("inf", "-inf", "+inf", "nan", "infinity", "-infinity"):
            raise DegenerateWindowError("window bounds must be finite")
    return Fraction(v)


def _fmt(q):
    """Exact decimal text for ``q`` when it has one, else ``num/den``."""
    den = q.denominator
    k2 = k5 = 0
    while den % 2 == 0:
        den //= 2
        k2 += 1
    while den % 5 == 0:
        den //= 5
        k5 += 1
    if den != 1:
        return f"{q.numerator}/{q.denominator}"
    if q.denominator == 1:
        return str(q.numerator)
    k = max(k2, k5)
    scaled = abs(q.numerator) * (10**k // q.denominator)
    digits = str(scaled).rjust(k + 1, "0")
    text = f"{digits[:-k]}.{digits[-k:]}".rstrip("0")
    return ("-" if q < 0 else "") + text


@dataclass(frozen=True)
class Window:
    """Closed axis-aligned box in unit-level coordinates."""

    bounds: tuple

    def __post_init__(self):
        bounds = tuple((_to_fraction(lo), _to_fraction(hi)) for lo, hi in self.bounds)
        if not bounds:
            raise DimensionError("window needs at least one axis")
        for i, (lo, hi) in enumerate(bounds):
            if not lo < hi:
                raise DegenerateWindowError(f"axis {i}: need lo < hi, got [{lo}, {hi}]")
        object.__setattr__(self, "bounds", bounds)

    @classmethod
    def cube(cls, N, radius):
        r = _to_fraction(radius)
        return cls([(-r, r)] * N)

    @classmethod
    def parse(cls, text):
        rows = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                lo, hi = line.split()
                rows.append((lo, hi))
        return cls(rows)

    @classmethod
    def read(cls, path):
        with open(path) as fh:
            return cls.parse(fh.read())

    def to_text(self):
        return "".join(f"{_fmt(lo)} {_fmt(hi)}\n" for lo, hi in self.bounds)

    @property
    def dim(self):
        return len(self.bounds)

    def hash(self):
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]

    def volume(self):
        return math.prod(float(hi - lo) for lo, hi in self.bounds)

    def float_bounds(self):
        return np.array([[float(lo), float(hi)] for lo, hi in self.bounds])

    def contains(self, y, tol=0.0):
        """Float membership test for a projected point (closed box)."""
        return all(float(lo) - tol <= v <= float(hi) + tol for (lo, hi), v in zip(self.bounds, y))

    def int_bounds(self, m, d):
        """Exact integer ranges ``[ceil(m^(1/d) lo), floor(m^(1/d) hi)]`` per axis."""
        L = [ceil_scaled(m, d, lo) for lo, _ in self.bounds]
        H = [floor_scaled(m, d, hi) for _, hi in self.bounds]
        return L, H

    def split(self, axes, splits):
        """Regular grid of sub-boxes; axes not listed stay whole.  Row-major cell order."""
        edges = []
        for i, (lo, hi) in enumerate(self.bounds):
            k = splits[axes.index(i)] if i in axes else 1
            edges.append([lo + (hi - lo) * Fraction(t, k) for t in range(k + 1)])
        cells = []
        for combo in product(*[range(len(e) - 1) for e in edges]):
            cells.append(Window([(edges[i][t], edges[i][t + 1]) for i, t in enumerate(combo)]))
        return cells


@dataclass(frozen=True)
class PointSet:
    family: object
    m: int
    window: Window
    points: tuple
    version: str = GENERATOR_VERSION
    strategy: str = field(default="", compare=False)
    warnings: tuple = field(default=(), compare=False)

    def __len__(self):
        return len(self.points)

    @property
    def tag(self):
        return self.version + ("+bruteforce-fallback" if "fallback" in self.strategy else "")

    def header(self):
        return f"# family={self.family.key()} m={self.m} window-hash={self.window.hash()} version={self.tag}"

    def to_csv(self):
        lines = [self.header()]
        lines.extend(",".join(map(str, p)) for p in self.points)
        return "\n".join(lines) + "\n"

    def as_array(self):
        if not self.points:
            return np.zeros((0, self.family.N), dtype=np.int64)
        return np.array(self.points, dtype=object if _big(self.points) else np.int64)


def _big(points):
    return max(abs(v) for p in points for v in p) >= 1 << 62


def parse_header(line):
    if not line.startswith("#"):
        raise ValueError("missing point-file header")
    fields = {}
    for token in line[1:].split():
        k, _, v = token.partition("=")
        fields[k] = v
    for k in ("family", "m", "window-hash", "version"):
        if k not in fields:
            raise ValueError(f"header lacks {k}")
    return fields


def _range_size(L, H, idx):
    return math.prod(max(0, H[i] - L[i] + 1) for i in idx)


def _check_budget(volume, budget, what):
    if volume > budget:
        raise BudgetExceededError(f"{what}: {volume} candidate tuples exceed budget {budget}", volume=volume)


def _split_range(lo, hi, parts):
    if lo > hi:
        return []
    size = hi - lo + 1
    parts = max(1, min(parts, size))
    edges = [lo + size * k // parts for k in range(parts + 1)]
    return [(edges[k], edges[k + 1] - 1) for k in range(parts)]


def _run_sliced(fn, lo, hi, threads):
    slices = _split_range(lo, hi, threads)
    if threads <= 1 or len(slices) <= 1:
        return [p for a, b in slices for p in fn(a, b)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda ab: fn(*ab), slices))
    return [p for part in parts for p in part]


def _permuted_quad(q, k):
    """Coefficient matrix of ``Q`` after swapping coordinates ``k`` and ``N-1``."""
    N = len(q)
    perm = list(range(N))
    perm[k], perm[N - 1] = perm[N - 1], perm[k]
    out = [[0] * N for _ in range(N)]
    for i in range(N):
        for j in range(i, N):
            a, b = sorted((perm[i], perm[j]))
            out[i][j] = q[a][b]
    return out, perm


def _solve_linear(c, target, L, H):
    """All ``y`` in the box ``[L, H]`` with ``sum c_j y_j == target``."""
    k = len(c)
    nz = [j for j in range(k) if c[j]]
    zero = [j for j in range(k) if not c[j]]
    if not nz:
        sols = [()] if target == 0 else []
    else:
        g = reduce(math.gcd, (abs(c[j]) for j in nz))
        if target % g:
            return []
        lo_rest = [0] * (len(nz) + 1)
        hi_rest = [0] * (len(nz) + 1)
        for t in range(len(nz) - 1, -1, -1):
            j = nz[t]
            a, b = c[j] * L[j], c[j] * H[j]
            lo_rest[t] = lo_rest[t + 1] + min(a, b)
            hi_rest[t] = hi_rest[t + 1] + max(a, b)
        sols = []

        def rec(t, residual, acc):
            if not lo_rest[t] <= residual <= hi_rest[t]:
                return
            j = nz[t]
            if t == len(nz) - 1:
                if residual % c[j] == 0:
                    y = residual // c[j]
                    if L[j] <= y <= H[j]:
                        sols.append(acc + (y,))
                return
            for y in range(L[j], H[j] + 1):
                rec(t + 1, residual - c[j] * y, acc + (y,))

        rec(0, target, ())
    out = []
    for s in sols:
        for free in product(*[range(L[j], H[j] + 1) for j in zero]):
            y = [0] * k
            for j, v in zip(nz, s):
                y[j] = v
            for j, v in zip(zero, free):
                y[j] = v
            out.append(tuple(y))
    return out


def _rank_full(rows):
    """True iff the integer rows are linearly independent (fraction-free elimination)."""
    A = [list(r) for r in rows]
    ncols = len(A[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][col]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, len(A)):
            if A[i][col]:
                f, p = A[i][col], A[r][col]
                A[i] = [p * u - f * v for u, v in zip(A[i], A[r])]
        r += 1
        if r == len(A):
            return True
    return r == len(A)


def _det_general(m, n, L, H, lo, hi):
    """Det for n >= 3: backtrack over the first n-1 rows, then solve the linear last row."""
    out = []
    last = [(n - 1) * n + j for j in range(n)]
    Ll, Hl = [L[i] for i in last], [H[i] for i in last]

    def row_values(r):
        ranges = [range(L[r * n + j], H[r * n + j] + 1) for j in range(n)]
        if r == 0:
            ranges[0] = range(max(lo, L[0]), min(hi, H[0]) + 1)
        return product(*ranges)

    def rec(rows):
        r = len(rows)
        if r == n - 1:
            cof = []
            for j in range(n):
                minor = [row[:j] + row[j + 1:] for row in rows]
                sign = -1 if (n - 1 + j) % 2 else 1
                cof.append(sign * det_bareiss(minor))
            for y in _solve_linear(cof, m, Ll, Hl):
                out.append(tuple(v for row in rows for v in row) + y)
            return
        for vals in row_values(r):
            new = rows + [vals]
            if _rank_full(new):
                rec(new)

    rec([])
    return out


def _pff_general(m, n, L, H, lo, hi):
    """Pff for n >= 3: Pff is linear in the first-row coordinates; iterate the rest."""
    size = 2 * n
    first = list(range(size - 1))
    rest = list(range(size - 1, n * (2 * n - 1)))
    Lf, Hf = [L[i] for i in first], [H[i] for i in first]
    ranges = [range(L[i], H[i] + 1) for i in rest]
    ranges[0] = range(max(lo, L[rest[0]]), min(hi, H[rest[0]]) + 1)
    norm = pfaffian_sign(n) * pfaffian_sign(n - 1)
    out = []
    for vals in product(*ranges):
        M = pfaffian_matrix_expand((0,) * len(first) + vals, n)
        coeffs = []
        for k in range(1, size):
            keep = [i for i in range(1, size) if i != k]
            minor = [[M[i][j] for j in keep] for i in keep]
            coeffs.append(norm * (1 if k % 2 else -1) * pfaffian_exact(minor))
        for y in _solve_linear(coeffs, m, Lf, Hf):
            out.append(y + vals)
    return out


def _finish(family, m, window, points, strategy, warnings=()):
    points.sort()
    for a, b in zip(points, points[1:]):
        if a == b:
            raise AssertionError(f"duplicate point {a} from {strategy}")
    return PointSet(family, m, window, tuple(points), GENERATOR_VERSION, strategy, tuple(warnings))


def _check_args(family, m, window):
    if m < 1:
        raise ValueError(f"level m must be >= 1, got {m}")
    if window.dim != family.N:
        raise DimensionError(f"window has {window.dim} axes, {family} needs {family.N}")


def enumerate_points(family, m, window, *, budget=DEFAULT_BUDGET, threads=1, backend=None):
    """All integer ``x`` with ``f(x) == m`` and ``pr(x)`` in the closed ``window``."""
    _check_args(family, m, window)
    L, H = window.int_bounds(m, family.d)
    N = family.N
    if any(lo > hi for lo, hi in zip(L, H)):
        return _finish(family, m, window, [], "empty")

    if family.kind == DET and family.n == 2:
        _check_budget(_range_size(L, H, (0, 1, 2)), budget, "det n=2")
        pts = _run_sliced(lambda a, b: kernels.det2_points(m, L, H, a, b, backend), L[0], H[0], threads)
        return _finish(family, m, window, pts, "det2")

    if family.kind == PFF and family.n == 2:
        _check_budget(_range_size(L, H, (0, 1, 2, 3, 4)), budget, "pff n=2")
        pts = _run_sliced(lambda a, b: kernels.pff2_points(m, L, H, a, b, backend), L[1], H[1], threads)
        return _finish(family, m, window, pts, "pff2")

    if family.kind == DET:
        n = family.n
        _check_budget(_range_size(L, H, range(N - 1)), budget, f"det n={n}")
        pts = _run_sliced(lambda a, b: _det_general(m, n, L, H, a, b), L[0], H[0], threads)
        return _finish(family, m, window, pts, "det-linear-slice")

    if family.kind == PFF:
        n = family.n
        rest0 = 2 * n - 1
        _check_budget(_range_size(L, H, range(1, N)), budget, f"pff n={n}")
        pts = _run_sliced(lambda a, b: _pff_general(m, n, L, H, a, b), L[rest0], H[rest0], threads)
        return _finish(family, m, window, pts, "pff-linear-slice")

    q = quad_coefficient_matrix(family)
    diag = [k for k in range(N) if q[k][k]]
    if not diag or N == 1:
        if N == 1 and diag:
            pts = [(x,) for x in range(L[0], H[0] + 1) if q[0][0] * x * x == m]
            return _finish(family, m, window, pts, "quad-1d")
        log.warning("%s: no nonzero square coefficient; falling back to brute force", family)
        ps = enumerate_bruteforce(family, m, window, budget=min(budget, BRUTE_FORCE_BUDGET))
        return _finish(
            family, m, window, list(ps.points), "bruteforce-fallback", ("no nonzero diagonal coefficient",)
        )
    k = N - 1 if q[N - 1][N - 1] else diag[0]
    qp, perm = _permuted_quad(q, k)
    Lp, Hp = [L[perm[i]] for i in range(N)], [H[perm[i]] for i in range(N)]
    _check_budget(_range_size(Lp, Hp, range(N - 1)), budget, "quad")
    pts = _run_sliced(lambda a, b: kernels.quad_points(m, qp, Lp, Hp, a, b, backend), Lp[0], Hp[0], threads)
    if k != N - 1:
        # perm is an involution
        pts = [tuple(p[perm[i]] for i in range(N)) for p in pts]
    return _finish(family, m, window, pts, "quad-last-coordinate")


def enumerate_bruteforce(family, m, window, *, budget=BRUTE_FORCE_BUDGET):
    """Exhaustive scan of the scaled integer box (the oracle for :func:`enumerate_points`)."""
    _check_args(family, m, window)
    L, H = window.int_bounds(m, family.d)
    sizes = [max(0, h - l + 1) for l, h in zip(L, H)]
    volume = math.prod(sizes)
    _check_budget(volume, budget, "brute force")
    pts = []
    if volume:
        lows = np.array(L, dtype=object if max(map(abs, L + H)) >= 1 << 62 else np.int64)
        for start in range(0, volume, _CHUNK):
            idx = np.arange(start, min(volume, start + _CHUNK), dtype=np.int64)
            digits = np.stack(np.unravel_index(idx, sizes), axis=1)
            X = digits + lows
            hit = evaluate_many(family, X) == m
            pts.extend(tuple(int(v) for v in row) for row in X[hit].tolist())
    return _finish(family, m, window, pts, "bruteforce")


def count_points(family, m, window, **kwargs):
    return len(enumerate_points(family, m, window, **kwargs))


# Quadratic forms on Z^4 used by the oracle grid, as (r, s, q_ij for i <= j).
ORACLE_QUADS = (
    (2, 2, (1, 0, 0, 0, 1, 0, 0, -1, 0, -1)),  # x1^2 + x2^2 - x3^2 - x4^2
    (2, 2, (0, 1, 0, 0, 0, 0, 0, 1, 0, -1)),  # x1 x2 + x3^2 - x4^2
    (2, 2, (1, 0, 0, 1, 1, 0, 0, -1, 0, 0)),  # x1^2 + x2^2 - x3^2 + x1 x4, needs a coordinate swap
    (2, 2, (0, 1, 0, 0, 0, 0, 0, 0, 1, 0)),  # x1 x2 + x3 x4, brute-force fallback
    (3, 1, (1, 0, 0, 0, 1, 0, 0, 1, 0, -1)),  # x1^2 + x2^2 + x3^2 - x4^2
)


def oracle_fixtures():
    """``(family, m, window)`` cases on which enumerate_points must equal enumerate_bruteforce."""
    cases = []
    for r in (1.5, 2.5):
        cases += [(PolynomialFamily.determinant(2), m, Window.cube(4, r)) for m in range(1, 7)]
        cases += [(PolynomialFamily.pfaffian(2), m, Window.cube(6, r)) for m in range(1, 5)]
    cases += [(PolynomialFamily.determinant(3), m, Window.cube(9, r)) for m in (1, 2, 3) for r in (1.0, 1.5)]
    for rr, s, q in ORACLE_QUADS:
        fam = PolynomialFamily.quadratic(rr, s, q)
        cases += [(fam, m, Window.cube(4, r)) for m in range(1, 21) for r in (2.5, 4.5)]
    return cases
