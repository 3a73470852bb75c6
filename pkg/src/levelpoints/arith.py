"""Small exact integer helpers shared by the other modules."""

from fractions import Fraction
from math import gcd, isqrt


def factorize(m):
    """Prime factorization of ``m >= 1`` as a sorted list of ``(p, k)``."""
    if m < 1:
        raise ValueError("factorize needs m >= 1")
    out = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return out


def is_prime(p):
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    return all(p % q for q in range(3, isqrt(p) + 1, 2))


def divisors(m):
    """Positive divisors of ``m >= 1`` in increasing order."""
    divs = [1]
    for p, k in factorize(m):
        divs = [d * p**e for d in divs for e in range(k + 1)]
    return sorted(divs)


def is_squarefree(m):
    return all(k == 1 for _, k in factorize(m))


def iroot(x, d):
    """Largest integer ``k >= 0`` with ``k**d <= x`` for ``x >= 0``."""
    if x < 0:
        raise ValueError("iroot of a negative number")
    if d == 1 or x < 2:
        return x
    if d == 2:
        return isqrt(x)
    k = 1 << -(-x.bit_length() // d)
    while True:
        nxt = ((d - 1) * k + x // k ** (d - 1)) // d
        if nxt >= k:
            break
        k = nxt
    while k**d > x:
        k -= 1
    while (k + 1) ** d <= x:
        k += 1
    return k


def exact_dth_root(x, d):
    """``k`` if ``x == k**d`` for an integer ``k >= 0``, else ``None``."""
    if x < 0:
        return None
    k = iroot(x, d)
    return k if k**d == x else None


def floor_scaled(m, d, q):
    """``floor(m**(1/d) * q)`` computed exactly for rational ``q``."""
    q = Fraction(q)
    if q < 0:
        return -ceil_scaled(m, d, -q)
    num, den = q.numerator, q.denominator
    return iroot(m * num**d // den**d, d)


def ceil_scaled(m, d, q):
    """``ceil(m**(1/d) * q)`` computed exactly for rational ``q``."""
    q = Fraction(q)
    if q < 0:
        return -floor_scaled(m, d, -q)
    num, den = q.numerator, q.denominator
    t = -(-m * num**d // den**d)
    k = iroot(t, d)
    if k**d < t:
        k += 1
    return k


def xgcd(a, b):
    """``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b) >= 0``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def sigma1(m):
    return sum(divisors(m))


__all__ = [
    "factorize",
    "is_prime",
    "divisors",
    "is_squarefree",
    "iroot",
    "exact_dth_root",
    "floor_scaled",
    "ceil_scaled",
    "xgcd",
    "sigma1",
    "gcd",
]
