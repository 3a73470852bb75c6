"""Polynomial families, canonical coordinates, exact evaluation and radial projection.

Three families are supported:

* ``det``  -- the determinant on n x n matrices, coordinates row-major ``X[i][j]``.
* ``pff``  -- the Pfaffian on 2n x 2n skew-symmetric matrices, coordinates are the
  strict upper triangle ``x_ij`` (i < j) in lexicographic order of ``(i, j)``.
* ``quad`` -- an integral quadratic form ``sum_{i<=j} q_ij x_i x_j``.

The Pfaffian is normalized so that ``Pff(v0) = 1`` for
``v0 = [[0, I_n], [-I_n, 0]]``, i.e. ``Pff = (-1)**(n(n-1)/2) * pf`` where ``pf`` is
the usual first-row expansion.  For n = 2 this gives, in lexicographic coordinates,
``Pff = x13*x24 - x12*x34 - x14*x23``, which is ``x1*x2 - x3*x4 + x5*x6`` under the
relabeling ``(x1, .., x6) = (x13, x24, x12, x34, x14, x32)`` with ``x32 = -x23``.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

from .errors import DimensionError, UnsupportedFamilyError, check_int128

DET = "det"
PFF = "pff"
QUAD = "quad"
KINDS = (DET, PFF, QUAD)


@dataclass(frozen=True)
class PolynomialFamily:
    kind: str
    n: int = 0
    r: int = 0
    s: int = 0
    coeffs: tuple = ()
    warnings: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedFamilyError(f"unknown family kind {self.kind!r}")
        if self.kind in (DET, PFF):
            if self.n < 2:
                raise ValueError(f"{self.kind} family needs n >= 2, got {self.n}")
            return
        N = self.r + self.s
        if N < 1:
            raise ValueError("quadratic family needs r + s >= 1")
        coeffs = tuple(int(c) for c in self.coeffs)
        if len(coeffs) != N * (N + 1) // 2:
            raise DimensionError(
                f"expected {N * (N + 1) // 2} coefficients q_ij (i <= j) for {N} variables, "
                f"got {len(coeffs)}"
            )
        object.__setattr__(self, "coeffs", coeffs)
        eig = np.linalg.eigvalsh(np.array(gram_matrix(self), dtype=float))
        tol = 1e-9 * max(1.0, float(np.abs(eig).max()))
        pos = int((eig > tol).sum())
        neg = int((eig < -tol).sum())
        if (pos, neg) != (self.r, self.s):
            raise ValueError(
                f"coefficients have signature ({pos}, {neg}), declared ({self.r}, {self.s})"
            )
        warns = []
        if not (N >= 4 and self.r >= 2 and self.s >= 1):
            warns.append("signature outside r+s>=4, r>=2, s>=1; asymptotics not guaranteed")
        object.__setattr__(self, "warnings", tuple(warns))

    @classmethod
    def determinant(cls, n):
        return cls(DET, n=n)

    @classmethod
    def pfaffian(cls, n):
        return cls(PFF, n=n)

    @classmethod
    def quadratic(cls, r, s, coeffs):
        return cls(QUAD, r=r, s=s, coeffs=tuple(coeffs))

    @property
    def N(self):
        """Ambient integer dimension."""
        if self.kind == DET:
            return self.n * self.n
        if self.kind == PFF:
            return self.n * (2 * self.n - 1)
        return self.r + self.s

    @property
    def d(self):
        """Homogeneity degree."""
        return 2 if self.kind == QUAD else self.n

    def key(self):
        """Stable textual identifier, used in file headers and cache keys."""
        if self.kind == QUAD:
            return f"quad:r={self.r},s={self.s},q={','.join(map(str, self.coeffs))}"
        return f"{self.kind}:n={self.n}"

    def __str__(self):
        return self.key()


def parse_family(text):
    """Inverse of :meth:`PolynomialFamily.key`."""
    kind, _, rest = text.partition(":")
    params = {}
    if kind == QUAD:
        head, _, q = rest.partition(",q=")
        for item in head.split(","):
            k, _, v = item.partition("=")
            params[k] = int(v)
        coeffs = [int(c) for c in q.split(",")] if q else []
        return PolynomialFamily.quadratic(params["r"], params["s"], coeffs)
    k, _, v = rest.partition("=")
    if k != "n":
        raise ValueError(f"cannot parse family {text!r}")
    return PolynomialFamily(kind, n=int(v))


def quad_coefficient_matrix(family):
    """Upper-triangular integer matrix ``q[i][j]`` (i <= j), zeros below."""
    N = family.N
    q = [[0] * N for _ in range(N)]
    it = iter(family.coeffs)
    for i in range(N):
        for j in range(i, N):
            q[i][j] = next(it)
    return q


def gram_matrix(family):
    """Real symmetric Gram matrix: diagonal ``q_ii``, off-diagonal ``q_ij / 2``."""
    q = quad_coefficient_matrix(family)
    N = len(q)
    return [[q[i][i] if i == j else q[min(i, j)][max(i, j)] / 2 for j in range(N)] for i in range(N)]


def pfaffian_index_pairs(n):
    """Lexicographic list of ``(i, j)``, i < j, for a 2n x 2n skew matrix."""
    return [(i, j) for i in range(2 * n) for j in range(i + 1, 2 * n)]


def pfaffian_matrix_expand(x, n):
    """Skew-symmetric 2n x 2n matrix whose strict upper triangle is ``x``."""
    pairs = pfaffian_index_pairs(n)
    if len(x) != len(pairs):
        raise DimensionError(f"Pfaffian coordinates for n={n} have length {len(pairs)}, got {len(x)}")
    M = [[0] * (2 * n) for _ in range(2 * n)]
    for (i, j), v in zip(pairs, x):
        M[i][j] = v
        M[j][i] = -v
    return M


def pfaffian_upper_triangle(M):
    size = len(M)
    return tuple(M[i][j] for i in range(size) for j in range(i + 1, size))


def as_matrix(x, n):
    """Row-major vector of length n*n as a list of rows."""
    if len(x) != n * n:
        raise DimensionError(f"expected {n * n} entries, got {len(x)}")
    return [list(x[i * n:(i + 1) * n]) for i in range(n)]


def det_bareiss(M):
    """Exact determinant of a square integer matrix by fraction-free elimination."""
    A = [list(row) for row in M]
    size = len(A)
    if size == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(size - 1):
        if A[k][k] == 0:
            for i in range(k + 1, size):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = A[k][k]
        for i in range(k + 1, size):
            Ai, Ak = A[i], A[k]
            for j in range(k + 1, size):
                Ai[j] = check_int128((Ai[j] * pivot - Ai[k] * Ak[j]) // prev)
        prev = pivot
    return check_int128(sign * A[-1][-1])


def pfaffian_sign(n):
    """Normalization factor making ``Pff(v0) = 1``."""
    return -1 if (n * (n - 1) // 2) % 2 else 1


def pfaffian_exact(M):
    """Exact Pfaffian of a skew-symmetric integer matrix, normalized by :func:`pfaffian_sign`."""
    size = len(M)
    if size % 2:
        return 0

    @lru_cache(maxsize=None)
    def pf(idx):
        if not idx:
            return 1
        i0 = idx[0]
        total = 0
        for k in range(1, len(idx)):
            a = M[i0][idx[k]]
            if a:
                rest = idx[1:k] + idx[k + 1:]
                term = a * pf(rest)
                total += term if k % 2 else -term
        return check_int128(total)

    return check_int128(pfaffian_sign(size // 2) * pf(tuple(range(size))))


def evaluate(family, x):
    """Exact integer value ``f(x)``."""
    if len(x) != family.N:
        raise DimensionError(f"{family} expects {family.N} coordinates, got {len(x)}")
    x = [int(v) for v in x]
    if family.kind == DET:
        return det_bareiss(as_matrix(x, family.n))
    if family.kind == PFF:
        return pfaffian_exact(pfaffian_matrix_expand(x, family.n))
    total = 0
    k = 0
    N = family.N
    for i in range(N):
        xi = x[i]
        for j in range(i, N):
            q = family.coeffs[k]
            k += 1
            if q:
                total += q * xi * x[j]
    return check_int128(total)


def project(family, x, m):
    """Radial projection of a level-m point onto the unit level: ``m**(-1/d) * x``."""
    if m < 1:
        raise ValueError("level m must be >= 1")
    if m == 1:
        return tuple(float(v) for v in x)
    scale = float(m) ** (-1.0 / family.d)
    return tuple(v * scale for v in x)


# -- batch evaluation ------------------------------------------------------
# Leibniz / perfect-matching expansions, deliberately a different route from
# the scalar evaluate() above so the brute-force oracle stays independent.


def _perm_sign(p):
    inv = sum(1 for a, b in combinations(range(len(p)), 2) if p[a] > p[b])
    return -1 if inv % 2 else 1


@lru_cache(maxsize=None)
def leibniz_terms(n):
    """``(sign, (flat indices))`` for every permutation of range(n)."""
    return tuple((_perm_sign(p), tuple(i * n + p[i] for i in range(n))) for p in permutations(range(n)))


def _matchings(items):
    if not items:
        yield ()
        return
    first = items[0]
    for k in range(1, len(items)):
        rest = items[1:k] + items[k + 1:]
        for tail in _matchings(rest):
            yield ((first, items[k]),) + tail


@lru_cache(maxsize=None)
def matching_terms(n):
    """``(sign, (coordinate indices))`` for every perfect matching of 2n points."""
    index = {pair: k for k, pair in enumerate(pfaffian_index_pairs(n))}
    terms = []
    for mt in _matchings(tuple(range(2 * n))):
        perm = [v for pair in mt for v in pair]
        terms.append((pfaffian_sign(n) * _perm_sign(perm), tuple(index[pair] for pair in mt)))
    return tuple(terms)


def _quad_terms(family):
    N = family.N
    out = []
    k = 0
    for i in range(N):
        for j in range(i, N):
            if family.coeffs[k]:
                out.append((family.coeffs[k], (i, j)))
            k += 1
    return out


def polynomial_terms(family):
    """Monomial expansion ``[(coefficient, (coordinate indices))]`` of ``f``."""
    if family.kind == DET:
        return list(leibniz_terms(family.n))
    if family.kind == PFF:
        return list(matching_terms(family.n))
    return _quad_terms(family)


def magnitude_bound(family, radius):
    """Upper bound on ``|f(x)|`` over the box ``max |x_i| <= radius``."""
    return sum(abs(c) for c, _ in polynomial_terms(family)) * radius ** family.d


def evaluate_many(family, X):
    """Evaluate ``f`` on each row of an integer array.

    Uses int64 when the result provably fits, exact Python integers otherwise.
    """
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] != family.N:
        raise DimensionError(f"expected shape (k, {family.N}), got {X.shape}")
    radius = int(np.abs(X).max()) if X.size else 0
    if magnitude_bound(family, radius) >= 1 << 62:
        X = X.astype(object)
    else:
        X = X.astype(np.int64, copy=False)
    out = np.zeros(X.shape[0], dtype=X.dtype)
    for coef, idx in polynomial_terms(family):
        term = X[:, idx[0]]
        for j in idx[1:]:
            term = term * X[:, j]
        out += coef * term
    return out


def evaluate_float(family, X):
    """Floating-point evaluation on rows of a real array (used by the measure)."""
    X = np.asarray(X, dtype=float)
    if family.kind == DET:
        n = family.n
        if n == 2:
            return X[:, 0] * X[:, 3] - X[:, 1] * X[:, 2]
        return np.linalg.det(X.reshape(-1, n, n))
    if family.kind == PFF and family.n == 2:
        return X[:, 1] * X[:, 4] - X[:, 0] * X[:, 5] - X[:, 2] * X[:, 3]
    out = np.zeros(X.shape[0])
    for coef, idx in polynomial_terms(family):
        term = X[:, idx[0]].copy()
        for j in idx[1:]:
            term *= X[:, j]
        out += coef * term
    return out
