"""Orbit classes of determinant-level points, weight surrogates and level filters."""

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from .arith import exact_dth_root, factorize, is_squarefree
from .enumeration import enumerate_points
from .errors import UnsupportedFamilyError
from .lattice import SmithChain, hecke_degree, snf
from .varieties import DET, as_matrix

SL_CAVEAT = "classes are Smith normal forms (GL_n(Z) x GL_n(Z)); SL_n(Z) x SL_n(Z) splitting not resolved"


@dataclass(frozen=True)
class OrbitHistogram:
    family: object
    m: int
    window: object
    rows: tuple  # ((SmithChain, count), ...) sorted by chain
    total: int
    possible_chains: int
    caveat: str = SL_CAVEAT

    @property
    def complete(self):
        """Whether every divisor chain of m was observed in the window."""
        return len(self.rows) == self.possible_chains

    def to_csv(self):
        return "".join(f"{chain};{count}\n" for chain, count in self.rows)


def orbit_class(x, family):
    """Smith chain of the matrix ``x``; constant on two-sided unimodular orbits."""
    if family.kind != DET:
        raise UnsupportedFamilyError("orbit classes are only implemented for the determinant family")
    return snf(as_matrix(x, family.n))


@lru_cache(maxsize=None)
def _partitions_at_most(k, parts, largest):
    # partitions of k into at most `parts` parts, each <= largest
    if k == 0:
        return 1
    if parts == 0:
        return 0
    return sum(_partitions_at_most(k - first, parts - 1, first) for first in range(1, min(k, largest) + 1))


def count_divisor_chains(n, m):
    """Number of chains ``d_1 | ... | d_n`` of positive integers with product m."""
    total = 1
    for _, k in factorize(m):
        total *= _partitions_at_most(k, n, k)
    return total


def orbit_histogram(family, m, window, **enum_kwargs):
    if family.kind != DET:
        raise UnsupportedFamilyError("orbit histograms are only implemented for the determinant family")
    ps = enumerate_points(family, m, window, **enum_kwargs)
    counts = Counter(orbit_class(x, family) for x in ps.points)
    rows = tuple(sorted(counts.items()))
    return OrbitHistogram(family, m, window, rows, len(ps), count_divisor_chains(family.n, m))


def is_fundamental_discriminant(m):
    """Squarefree m = 1 mod 4, or m = 4k with k squarefree and k = 2, 3 mod 4."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m % 4 == 1:
        return is_squarefree(m)
    if m % 4 == 0:
        k = m // 4
        return k % 4 in (2, 3) and is_squarefree(k)
    return False


def fundamental_discriminants(limit):
    return [m for m in range(1, limit + 1) if is_fundamental_discriminant(m)]


def radial_scaling_witness(family, m0, m):
    """``k >= 2`` with ``m == m0 * k**d`` (so ``k * V_m0(Z)`` lies in ``V_m(Z)``), else None."""
    if m0 < 1 or m < 1:
        raise ValueError("levels must be >= 1")
    if m % m0:
        return None
    k = exact_dth_root(m // m0, family.d)
    return k if k is not None and k >= 2 else None


def hecke_weight_series(n, m_list):
    return [(m, hecke_degree(n, m)) for m in m_list]


__all__ = [
    "OrbitHistogram",
    "SmithChain",
    "orbit_class",
    "orbit_histogram",
    "count_divisor_chains",
    "is_fundamental_discriminant",
    "fundamental_discriminants",
    "radial_scaling_witness",
    "hecke_weight_series",
]
