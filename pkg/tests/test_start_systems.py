import cmath

import numpy as np
import pytest

from lph.poly import parse, parse_poly, PolySystem
from lph.start_systems import (
    TotalDegreeStart,
    ZeroPolynomialError,
    dedup_points,
    random_slice,
    refine_on,
    solve_square,
    total_degree_roots,
    unit_complex,
    witness_points,
)

XY = ["x", "y"]
XYZ = ["x", "y", "z"]

SEXTIC = "(y^2 - x^3 + 4*x + 1)*((x - y + 6)^3 + x + y)"


def test_unit_complex_modulus():
    rng = np.random.default_rng(1)
    for _ in range(20):
        assert abs(abs(unit_complex(rng)) - 1.0) < 1e-12


def test_random_slice_counts_and_degrees():
    circle = PolySystem(2, [parse_poly("x^2 + y^2 - 1", XY)])
    rng = np.random.default_rng(0)
    sl = random_slice(circle, rng)
    assert len(sl.L) == 1
    assert all(l.degree == 1 for l in sl.L)

    f3 = parse("x*y - 1\nz - x", XYZ)
    sl3 = random_slice(f3, np.random.default_rng(0))
    assert len(sl3.L) == 1


def test_random_slice_reseed_reproduces():
    circle = PolySystem(2, [parse_poly("x^2 + y^2 - 1", XY)])
    a = random_slice(circle, np.random.default_rng(123))
    b = random_slice(circle, np.random.default_rng(123))
    assert a.L[0] == b.L[0]


def test_random_slice_requires_underdetermined():
    square = parse("x - 1\ny - 1", XY)
    with pytest.raises(ValueError):
        random_slice(square, np.random.default_rng(0))


def test_total_degree_roots_cube_roots_of_unity():
    ts = TotalDegreeStart([3], [1.0 + 0j])
    roots = sorted(total_degree_roots(ts), key=lambda z: cmath.phase(z[0]))
    expected = sorted(
        [cmath.exp(2j * cmath.pi * k / 3) for k in range(3)], key=cmath.phase
    )
    for r, e in zip(roots, expected):
        assert abs(r[0] - e) < 1e-12


def test_total_degree_roots_count():
    ts = TotalDegreeStart([2, 1], [1.0, 2.0])
    assert len(list(total_degree_roots(ts))) == 2


def test_total_degree_roots_satisfy_start_system():
    rng = np.random.default_rng(4)
    ts = TotalDegreeStart([2, 2], [unit_complex(rng), unit_complex(rng)])
    system = ts.system()
    roots = list(total_degree_roots(ts))
    assert len(roots) == 4
    for r in roots:
        assert system.residual(r) < 1e-12


def test_dedup_points():
    pts = [np.array([1.0, 2.0]), np.array([1.0 + 1e-8, 2.0]), np.array([3.0, 4.0])]
    assert len(dedup_points(pts)) == 2


def test_refine_on_rejects_non_roots():
    f = parse("x^2 + 1", ["x"])
    assert refine_on(f, np.array([50.0 + 0j])) is None


def test_solve_square_quadratic():
    sols = solve_square(parse("x^2 - 1", ["x"]))
    vals = sorted(round(s[0].real, 8) for s in sols)
    assert vals == [-1.0, 1.0]
    assert all(abs(s[0].imag) < 1e-10 for s in sols)


def test_solve_square_circle_line():
    sols = solve_square(parse("x^2 + y^2 - 1\nx - y", XY))
    r = np.sqrt(2) / 2
    expect = [np.array([r, r]), np.array([-r, -r])]
    assert len(sols) == 2
    for e in expect:
        assert any(np.abs(s - e).max() < 1e-8 for s in sols)


def test_solve_square_sextic_slice_has_six_solutions():
    f = PolySystem(2, [parse_poly(SEXTIC, XY)])
    rng = np.random.default_rng(0)
    sl = random_slice(f, rng)
    sols = solve_square(sl.square, rng=rng)
    assert len(sols) == 6


def test_solve_square_rejects_zero_polynomial():
    f = PolySystem(1, [parse_poly("0", ["x"])])
    with pytest.raises(ZeroPolynomialError):
        solve_square(f)


def test_solve_square_rejects_non_square():
    with pytest.raises(ValueError):
        solve_square(parse("x + y", XY))


def test_witness_points_circle():
    circle = PolySystem(2, [parse_poly("x^2 + y^2 - 1", XY)])
    M, D, sl = witness_points(circle, np.random.default_rng(0))
    assert D == 2
    assert all(circle.residual(m) < 1e-8 for m in M)
    assert all(abs(l.evaluate(m)) < 1e-8 for m in M for l in sl.L)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_witness_points_sextic_degree(seed):
    f = PolySystem(2, [parse_poly(SEXTIC, XY)])
    M, D, _ = witness_points(f, np.random.default_rng(seed))
    assert D == 6


def test_witness_points_sparse_pair_degree():
    f = parse("-62*x*y + 97*y - 4*x*y*z - 4\n80*x - 44*x*y + 71*y^2 - 17*y^3 + 2", XYZ)
    M, D, _ = witness_points(f, np.random.default_rng(0))
    assert D == 7
