"""Integral points on level sets of invariant polynomials.

Enumerates ``{x in Z^N : f(x) = m, m^(-1/d) x in W}`` for the determinant, the
Pfaffian and integral quadratic forms, and provides the pieces needed to watch
those points equidistribute as ``m`` grows: Hermite/Smith forms and Hecke
degrees, Smith-class histograms, a Monte Carlo invariant measure, and an
experiment harness.
"""

from .enumeration import PointSet, Window, count_points, enumerate_bruteforce, enumerate_points
from .errors import (
    ArithmeticOverflowError,
    BudgetExceededError,
    DegenerateWindowError,
    DimensionError,
    SingularMatrixError,
    UnsupportedFamilyError,
)
from .kernels import BACKEND
from .lattice import (
    HermiteForm,
    SmithChain,
    enumerate_hnf,
    hecke_degree,
    hnf,
    pfaffian_local_weight,
    random_unimodular,
    snf,
)
from .measure import MeasureEstimate, estimate_measure, transform_window
from .orbits import (
    OrbitHistogram,
    hecke_weight_series,
    is_fundamental_discriminant,
    orbit_class,
    orbit_histogram,
    radial_scaling_witness,
)
from .varieties import PolynomialFamily, evaluate, pfaffian_matrix_expand, project

__version__ = "0.1.0"
