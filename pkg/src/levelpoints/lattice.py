"""Exact integer linear algebra: Hermite and Smith normal forms, Hecke degrees.

Matrices are lists of rows of Python ints.  The Hermite form used here is the
row-style, upper-triangular canonical representative of the left orbit
``SL_n(Z) . M`` / ``GL_n(Z) . M``: positive diagonal and every entry above a
pivot reduced into ``[0, pivot)``.  Its determinant-m instances are in
bijection with the index-m sublattices of ``Z^n``.
"""

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .arith import divisors, is_prime, xgcd
from .errors import BudgetExceededError, SingularMatrixError, check_int128
from .varieties import det_bareiss

DEFAULT_HNF_BUDGET = 10**6


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B):
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def is_hnf(H):
    n = len(H)
    for i in range(n):
        if H[i][i] <= 0:
            return False
        for j in range(i):
            if H[i][j] != 0:
                return False
        for k in range(i):
            if not 0 <= H[k][i] < H[i][i]:
                return False
    return True


@dataclass(frozen=True)
class HermiteForm:
    H: tuple
    U: tuple


@dataclass(frozen=True, order=True)
class SmithChain:
    chain: tuple

    def __str__(self):
        return ",".join(map(str, self.chain))

    def __iter__(self):
        return iter(self.chain)

    def __len__(self):
        return len(self.chain)


def _freeze(M):
    return tuple(tuple(check_int128(v) for v in row) for row in M)


def hnf(M):
    """Hermite normal form ``H`` with a unimodular witness ``U`` such that ``U @ M == H``."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("hnf expects a square matrix")
    if det_bareiss(M) == 0:
        raise SingularMatrixError("hnf of a singular matrix")
    H = [list(row) for row in M]
    U = identity(n)
    for k in range(n):
        # Combine rows k..n-1 until only row k has a nonzero entry in column k.
        for i in range(k + 1, n):
            a, b = H[k][k], H[i][k]
            if b == 0:
                continue
            g, x, y = xgcd(a, b)
            ag, bg = a // g, b // g
            for T in (H, U):
                rk, ri = T[k], T[i]
                T[k] = [x * u + y * v for u, v in zip(rk, ri)]
                T[i] = [-bg * u + ag * v for u, v in zip(rk, ri)]
        if H[k][k] < 0:
            H[k] = [-v for v in H[k]]
            U[k] = [-v for v in U[k]]
        pivot = H[k][k]
        for i in range(k):
            q = H[i][k] // pivot
            if q:
                H[i] = [u - q * v for u, v in zip(H[i], H[k])]
                U[i] = [u - q * v for u, v in zip(U[i], U[k])]
    return HermiteForm(_freeze(H), _freeze(U))


def snf(M):
    """Smith invariant factors ``d_1 | d_2 | ... | d_n`` of a nonsingular integer matrix."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("snf expects a square matrix")
    if det_bareiss(M) == 0:
        raise SingularMatrixError("snf of a singular matrix")
    A = [list(row) for row in M]
    for t in range(n):
        while True:
            # smallest nonzero entry of the trailing block becomes the pivot
            _, pi, pj = min((abs(A[i][j]), i, j) for i in range(t, n) for j in range(t, n) if A[i][j])
            A[t], A[pi] = A[pi], A[t]
            for row in A:
                row[t], row[pj] = row[pj], row[t]
            p = A[t][t]
            done = True
            for i in range(t + 1, n):
                q = A[i][t] // p
                if q:
                    A[i] = [u - q * v for u, v in zip(A[i], A[t])]
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                if A[t][j]:
                    done = False
            if not done:
                continue
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            A[t] = [u + v for u, v in zip(A[t], A[bad])]
    return SmithChain(tuple(check_int128(abs(A[i][i])) for i in range(n)))


@lru_cache(maxsize=None)
def _hecke(n, m):
    if n == 1:
        return 1
    # last diagonal entry d has n-1 free entries above it, each in [0, d)
    return sum(d ** (n - 1) * _hecke(n - 1, m // d) for d in divisors(m))


def hecke_degree(n, m):
    """Number of n x n Hermite forms of determinant m (index-m sublattices of Z^n)."""
    if n < 2:
        raise ValueError("hecke_degree needs n >= 2")
    if m < 1:
        raise ValueError("hecke_degree needs m >= 1")
    return _hecke(n, m)


def _ordered_factorizations(n, m):
    if n == 1:
        yield (m,)
        return
    for d in divisors(m):
        for rest in _ordered_factorizations(n - 1, m // d):
            yield (d,) + rest


def enumerate_hnf(n, m, budget=DEFAULT_HNF_BUDGET):
    """All n x n Hermite forms of determinant m, in lexicographic row-major order."""
    if n < 2:
        raise ValueError("enumerate_hnf needs n >= 2")
    if m < 1:
        raise ValueError("enumerate_hnf needs m >= 1")
    total = hecke_degree(n, m)
    if total > budget:
        raise BudgetExceededError(f"{total} Hermite forms exceed budget {budget}", volume=total)
    out = []
    above = [(i, j) for j in range(n) for i in range(j)]
    for diag in _ordered_factorizations(n, m):
        for vals in product(*(range(diag[j]) for _, j in above)):
            H = [[0] * n for _ in range(n)]
            for i in range(n):
                H[i][i] = diag[i]
            for (i, j), v in zip(above, vals):
                H[i][j] = v
            out.append(tuple(tuple(row) for row in H))
    out.sort(key=lambda H: [v for row in H for v in row])
    return out


def pfaffian_local_weight(n, p):
    """``sum_{i=0}^{2n-2} p**i``: the prime-level Pfaffian weight without its constant."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return sum(p**i for i in range(2 * n - 1))


def random_unimodular(n, seed, steps):
    """Product of ``steps`` random elementary shears with nonzero offsets in [-2, 2]."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rng = random.Random(seed)
    M = identity(n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.choice((-2, -1, 1, 2))
        M[i] = [u + c * v for u, v in zip(M[i], M[j])]
    return M
