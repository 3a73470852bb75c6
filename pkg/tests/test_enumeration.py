from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levelpoints.enumeration import (
    GENERATOR_VERSION,
    PointSet,
    Window,
    count_points,
    enumerate_bruteforce,
    enumerate_points,
    oracle_fixtures,
    parse_header,
)
from levelpoints.errors import BudgetExceededError, DegenerateWindowError, DimensionError
from levelpoints.varieties import PolynomialFamily, evaluate, project


def test_det2_unit_level_count(det2):
    # 2x2 matrices with entries in {-1, 0, 1} and determinant 1
    assert count_points(det2, 1, Window.cube(4, 1.5)) == 20


def test_quad_unit_level_matches_oracle(quad22):
    w = Window.cube(4, 2.5)
    assert enumerate_points(quad22, 1, w) == enumerate_bruteforce(quad22, 1, w)


def test_pff2_unit_level_matches_oracle(pff2):
    w = Window.cube(6, 1.5)
    assert enumerate_points(pff2, 1, w) == enumerate_bruteforce(pff2, 1, w)


def test_empty_integer_box(det2):
    w = Window([(0.1, 0.2)] + [(-1, 1)] * 3)
    ps = enumerate_points(det2, 1, w)
    assert len(ps) == 0 and ps == enumerate_bruteforce(det2, 1, w)


def test_level_must_be_positive(quad22):
    with pytest.raises(ValueError):
        enumerate_points(quad22, -1, Window.cube(4, 2))
    with pytest.raises(ValueError):
        enumerate_bruteforce(quad22, 0, Window.cube(4, 2))


def test_dimension_mismatch(det2):
    with pytest.raises(DimensionError):
        enumerate_points(det2, 1, Window.cube(3, 1))


def test_budget_guards(det2):
    with pytest.raises(BudgetExceededError) as exc:
        enumerate_points(det2, 10**6, Window.cube(4, 3), budget=1000)
    assert exc.value.volume > 1000
    with pytest.raises(BudgetExceededError):
        enumerate_bruteforce(det2, 10**4, Window.cube(4, 3))


def test_window_validation():
    with pytest.raises(DegenerateWindowError):
        Window([(1, 1)])
    with pytest.raises(DegenerateWindowError):
        Window([(0, "inf")])


def test_window_text_roundtrip():
    w = Window([("-1.5", "0.25"), (Fraction(1, 3), 2)])
    assert Window.parse(w.to_text()) == w
    assert w.to_text() == "-1.5 0.25\n1/3 2\n"


def test_window_split_partitions_volume():
    w = Window.cube(4, 1.5)
    cells = w.split((0, 1), (2, 4))
    assert len(cells) == 8
    assert sum(c.volume() for c in cells) == pytest.approx(w.volume())
    assert cells[0].bounds[0] == (Fraction(-3, 2), Fraction(0))
    assert cells[1].bounds[1] == (Fraction(-3, 4), Fraction(0))


def test_boundary_points_are_included(det2):
    # x = (2, 0, 0, 2) at m = 4 projects to (1, 0, 0, 1): on the face of [0, 1] x ...
    w = Window([(0, 1), (-1, 1), (-1, 1), (0, 1)])
    assert (2, 0, 0, 2) in enumerate_points(det2, 4, w).points


@pytest.mark.parametrize("case", oracle_fixtures()[:40:3])
def test_oracle_sample(case):
    fam, m, w = case
    assert enumerate_points(fam, m, w) == enumerate_bruteforce(fam, m, w)


@pytest.mark.parametrize("fam_ix", range(3))
def test_points_revalidate(fam_ix, det2, pff2, quad22):
    fam = (det2, pff2, quad22)[fam_ix]
    m = 7
    w = Window.cube(fam.N, 2)
    ps = enumerate_points(fam, m, w)
    assert len(ps) > 0
    assert list(ps.points) == sorted(set(ps.points))
    for x in ps.points:
        assert evaluate(fam, x) == m
        assert w.contains(project(fam, x, m), tol=1e-12)


def test_det3_revalidates():
    fam = PolynomialFamily.determinant(3)
    ps = enumerate_points(fam, 2, Window.cube(9, 1))
    assert len(ps) > 0 and all(evaluate(fam, x) == 2 for x in ps.points)


def test_pff3_matches_oracle():
    fam = PolynomialFamily.pfaffian(3)
    w = Window([(-1, 1)] * 5 + [(0, 1)] * 10)
    ps = enumerate_points(fam, 1, w)
    assert ps == enumerate_bruteforce(fam, 1, w)
    assert len(ps) > 0


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 30), st.sampled_from([1.5, 2, 2.5]))
def test_transpose_symmetry(m, r):
    det2 = PolynomialFamily.determinant(2)
    w = Window([(-r, r), (0, r), (-r, 0.5), (-1, r)])
    wt = Window([w.bounds[0], w.bounds[2], w.bounds[1], w.bounds[3]])
    a = enumerate_points(det2, m, w).points
    b = enumerate_points(det2, m, wt).points
    assert sorted((x[0], x[2], x[1], x[3]) for x in a) == list(b)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 12))
def test_pfaffian_negation_preserves_count(m):
    pff2 = PolynomialFamily.pfaffian(2)
    w = Window.cube(6, 1.5)
    pts = set(enumerate_points(pff2, m, w).points)
    assert {tuple(-v for v in x) for x in pts} == pts


def test_count_is_monotone_in_window(det2):
    small, big = Window.cube(4, 1), Window.cube(4, 2)
    for m in range(1, 20):
        assert count_points(det2, m, small) <= count_points(det2, m, big)


@pytest.mark.parametrize("threads", [2, 3, 8])
def test_threads_do_not_change_output(threads, det2, quad22):
    for fam in (det2, quad22):
        w = Window.cube(4, 2)
        assert enumerate_points(fam, 97, w, threads=threads).to_csv() == enumerate_points(fam, 97, w).to_csv()


def test_isotropic_quad_falls_back():
    fam = PolynomialFamily.quadratic(2, 2, [0, 1, 0, 0, 0, 0, 0, 0, 1, 0])
    ps = enumerate_points(fam, 3, Window.cube(4, 1.5))
    assert ps.tag.endswith("+bruteforce-fallback")
    assert "bruteforce-fallback" in ps.header()


def test_header_and_csv(det2):
    ps = enumerate_points(det2, 2, Window.cube(4, 1))
    lines = ps.to_csv().splitlines()
    head = parse_header(lines[0])
    assert head == {"family": "det:n=2", "m": "2", "window-hash": ps.window.hash(), "version": GENERATOR_VERSION}
    assert len(lines) == len(ps) + 1
    assert isinstance(ps, PointSet) and ps.as_array().shape == (len(ps), 4)
