import os
import subprocess
import sys
from fractions import Fraction

import pytest

from levelpoints import kernels
from levelpoints.enumeration import Window, enumerate_points
from levelpoints.varieties import PolynomialFamily

BACKENDS = ["python"] + (["cython"] if kernels.active is not kernels._pykernels else [])

FAMILIES = [
    PolynomialFamily.determinant(2),
    PolynomialFamily.pfaffian(2),
    PolynomialFamily.quadratic(2, 2, [1, 0, 0, 0, 1, 0, 0, -1, 0, -1]),
    PolynomialFamily.quadratic(3, 1, [1, 1, 0, 0, 1, 0, 0, 1, 2, -1]),
]


def test_backend_reported():
    assert kernels.BACKEND in ("python", "cython")


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("fam", FAMILIES, ids=str)
def test_backends_agree(backend, fam):
    if fam.kind == "pff":
        w = Window([(-1, 1.25)] + [(-0.75, 1)] * 5)
    else:
        w = Window([(-2, 2.5)] + [(-1.75, 2)] * (fam.N - 1))
    for m in (1, 6, 12, 35, 64):
        ref = enumerate_points(fam, m, w, backend="python")
        assert enumerate_points(fam, m, w, backend=backend) == ref


def test_large_quad_level_uses_exact_path():
    fam = FAMILIES[2]
    a, b = 3_162_277_661, 12_345
    m = a * a - b * b  # ~1e19: squares of coordinates overflow int64
    e = Fraction(1, 10**9)
    w = Window([(1 - e, 1 + e), (-e, e), (-e, e), (-Fraction(1, 10**5), Fraction(1, 10**5))])
    q = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]]
    assert not kernels.quad_safe(m, q, *w.int_bounds(m, 2))
    ps = enumerate_points(fam, m, w)
    assert (a, 0, 0, b) in ps.points and (a, 0, 0, -b) in ps.points
    assert all(x[0] ** 2 + x[1] ** 2 - x[2] ** 2 - x[3] ** 2 == m for x in ps.points)


def test_env_var_forces_fallback():
    code = "import levelpoints.kernels as k; print(k.BACKEND, k.active.__name__)"
    env = dict(os.environ, LEVELPOINTS_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "levelpoints._pykernels"]


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.det2_points(1, [0] * 4, [1] * 4, 0, 1, backend="fortran")
