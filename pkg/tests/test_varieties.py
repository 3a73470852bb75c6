import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_skew
from levelpoints.errors import ArithmeticOverflowError, DimensionError
from levelpoints.varieties import (
    PolynomialFamily,
    det_bareiss,
    evaluate,
    evaluate_float,
    evaluate_many,
    gram_matrix,
    parse_family,
    pfaffian_exact,
    pfaffian_matrix_expand,
    pfaffian_upper_triangle,
    project,
)

small_ints = st.integers(-20, 20)


def identity_flat(n):
    return [int(i == j) for i in range(n) for j in range(n)]


def v0_pfaffian(n):
    # block matrix [[0, I], [-I, 0]] in upper-triangle coordinates
    M = [[0] * (2 * n) for _ in range(2 * n)]
    for k in range(n):
        M[k][n + k], M[n + k][k] = 1, -1
    return pfaffian_upper_triangle(M)


def test_dimensions():
    assert (PolynomialFamily.determinant(3).N, PolynomialFamily.determinant(3).d) == (9, 3)
    assert (PolynomialFamily.pfaffian(2).N, PolynomialFamily.pfaffian(2).d) == (6, 2)
    assert PolynomialFamily.pfaffian(3).N == 15


@pytest.mark.parametrize("n", [2, 3, 4])
def test_base_points_have_value_one(n):
    assert evaluate(PolynomialFamily.determinant(n), identity_flat(n)) == 1
    assert evaluate(PolynomialFamily.pfaffian(n), v0_pfaffian(n)) == 1


def test_pfaffian_n2_explicit():
    fam = PolynomialFamily.pfaffian(2)
    x12, x13, x14, x23, x24, x34 = 2, 3, 5, 7, 11, 13
    x = [x12, x13, x14, x23, x24, x34]
    assert evaluate(fam, x) == x13 * x24 - x12 * x34 - x14 * x23


def test_quadratic_signature_checked():
    with pytest.raises(ValueError):
        PolynomialFamily.quadratic(3, 1, [1, 0, 0, 0, 1, 0, 0, -1, 0, -1])
    with pytest.raises(DimensionError):
        PolynomialFamily.quadratic(2, 2, [1, 0, 0])


def test_quadratic_warning_outside_asymptotic_range():
    fam = PolynomialFamily.quadratic(2, 1, [1, 0, 0, 1, 0, -1])
    assert fam.warnings


def test_gram_matrix_halves_cross_terms():
    fam = PolynomialFamily.quadratic(2, 2, [0, 1, 0, 0, 0, 0, 0, 1, 0, -1])
    G = gram_matrix(fam)
    assert G[0][1] == G[1][0] == 0.5 and G[2][2] == 1


@pytest.mark.parametrize("fam", [
    PolynomialFamily.determinant(3),
    PolynomialFamily.pfaffian(2),
    PolynomialFamily.quadratic(2, 2, [1, 0, 0, 0, 1, 0, 0, -1, 0, -1]),
])
def test_key_roundtrip(fam):
    assert parse_family(fam.key()) == fam


@settings(max_examples=200)
@given(st.lists(small_ints, min_size=9, max_size=9))
def test_bareiss_matches_float_det(x):
    M = [x[0:3], x[3:6], x[6:9]]
    assert det_bareiss(M) == round(np.linalg.det(np.array(M, dtype=float)))


@settings(max_examples=100)
@given(st.integers(0, 10**6))
def test_pfaffian_squared_is_det(seed):
    import random
    rng = random.Random(seed)
    for size in (2, 4, 6):
        M = random_skew(rng, size)
        assert pfaffian_exact(M) ** 2 == det_bareiss(M)


def test_pfaffian_odd_size_is_zero():
    assert pfaffian_exact([[0, 1, 2], [-1, 0, 3], [-2, -3, 0]]) == 0


def test_expand_roundtrip_and_dimension_error():
    x = list(range(1, 16))
    M = pfaffian_matrix_expand(x, 3)
    assert all(M[i][j] == -M[j][i] for i in range(6) for j in range(6))
    assert list(pfaffian_upper_triangle(M)) == x
    with pytest.raises(DimensionError):
        pfaffian_matrix_expand(x[:-1], 3)


@pytest.mark.parametrize("fam", [
    PolynomialFamily.determinant(2),
    PolynomialFamily.determinant(3),
    PolynomialFamily.pfaffian(2),
    PolynomialFamily.pfaffian(3),
    PolynomialFamily.quadratic(2, 2, [1, 2, 0, 0, -1, 0, 3, 1, 0, -2]),
])
def test_batch_routes_agree_with_scalar(fam, rng):
    X = np.array([[rng.randint(-6, 6) for _ in range(fam.N)] for _ in range(200)])
    expect = [evaluate(fam, row) for row in X.tolist()]
    assert evaluate_many(fam, X).tolist() == expect
    assert np.allclose(evaluate_float(fam, X), expect)


def test_batch_switches_to_exact_ints():
    fam = PolynomialFamily.determinant(2)
    big = 3 * 10**9
    X = np.array([[big, 1, 1, big]], dtype=object)
    assert evaluate_many(fam, X)[0] == big * big - 1


def test_overflow_detected():
    huge = 1 << 100
    with pytest.raises(ArithmeticOverflowError):
        evaluate(PolynomialFamily.determinant(2), [huge, 0, 0, huge])


def test_project_scales_to_unit_level():
    fam = PolynomialFamily.determinant(2)
    x = [2, 1, 0, 2]  # det 4
    y = project(fam, x, 4)
    assert y == pytest.approx((1.0, 0.5, 0.0, 1.0))
    assert evaluate_float(fam, np.array([y]))[0] == pytest.approx(1.0)


@pytest.mark.parametrize("fam", [
    PolynomialFamily.determinant(2),
    PolynomialFamily.determinant(3),
    PolynomialFamily.pfaffian(2),
    PolynomialFamily.pfaffian(3),
    PolynomialFamily.quadratic(2, 2, [1, 2, 0, 0, -1, 0, 3, 1, 0, -2]),
])
def test_homogeneity(fam, rng):
    for _ in range(30):
        x = [rng.randint(-5, 5) for _ in range(fam.N)]
        v = evaluate(fam, x)
        for k in range(-3, 4):
            assert evaluate(fam, [k * t for t in x]) == k**fam.d * v


@pytest.mark.parametrize("n", [2, 3])
def test_pfaffian_sign_parity(n, rng):
    fam = PolynomialFamily.pfaffian(n)
    for _ in range(50):
        x = [rng.randint(-5, 5) for _ in range(fam.N)]
        assert evaluate(fam, [-t for t in x]) == (-1) ** n * evaluate(fam, x)


def test_pfaffian_n2_against_six_variable_form():
    # (x12, x34, x13, x24, x14, x23) = (a, b, c, d, e, f); normalized so the block base point has value 1
    fam = PolynomialFamily.pfaffian(2)
    a, b, c, d, e, f = 3, -2, 5, 7, -4, 6
    x = [a, c, e, f, d, b]  # lexicographic order x12, x13, x14, x23, x24, x34
    assert evaluate(fam, x) == -(a * b - c * d + e * f)


def test_projection_lands_on_unit_level(rng):
    fams = [PolynomialFamily.determinant(3), PolynomialFamily.pfaffian(2),
            PolynomialFamily.quadratic(2, 2, [1, 0, 0, 0, 1, 0, 0, -1, 0, -1])]
    for fam in fams:
        hits = 0
        while hits < 20:
            x = [rng.randint(-9, 9) for _ in range(fam.N)]
            m = evaluate(fam, x)
            if m <= 0:
                continue
            hits += 1
            y = np.array([project(fam, x, m)])
            assert evaluate_float(fam, y)[0] == pytest.approx(1.0, rel=1e-9)


def test_project_examples(det2, quad22):
    assert project(det2, [2, 0, 0, 2], 4) == (1.0, 0.0, 0.0, 1.0)
    assert project(quad22, [2, 0, 0, 0], 4) == (1.0, 0.0, 0.0, 0.0)
    assert project(det2, [3, 1, 4, 1], 1) == (3.0, 1.0, 4.0, 1.0)
    assert evaluate(quad22, [2, 1, 0, 1]) == 4


def test_expand_small_examples():
    assert pfaffian_matrix_expand([0] * 6, 2) == [[0] * 4 for _ in range(4)]
    M = pfaffian_matrix_expand([1, 0, 0, 0, 0, 1], 2)
    assert M[0][1] == M[2][3] == 1 and M[1][0] == M[3][2] == -1
