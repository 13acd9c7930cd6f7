import numpy as np
import pytest

from lph.poly import parse, parse_poly, PolySystem
from lph.witness import (
    RealFilterConfig,
    augment,
    build_critical_system,
    full_rank_check,
    numerical_rank,
    real_filter,
    real_witness_set,
    witness_bound,
)

XY = ["x", "y"]

SEXTIC = "(y^2 - x^3 + 4*x + 1)*((x - y + 6)^3 + x + y)"


def _circle():
    return PolySystem(2, [parse_poly("x^2 + y^2 - 1", XY)])


def test_build_critical_system_circle():
    prob = build_critical_system(_circle(), np.array([0.0, 1.0]))
    F = prob.full_system()
    # {x^2+y^2-1, 2x*l, 2y*l - 1} with solutions (0, +/-1, +/-1/2)
    for sgn in (1.0, -1.0):
        z = np.array([0.0, sgn, sgn * 0.5], dtype=complex)
        assert F.residual(z) < 1e-12


def test_augment_appends_hyperplane():
    g = augment(_circle(), np.array([0.0, 1.0]), 0.0)
    assert len(g) == 2
    assert g.polys[1] == parse_poly("y", XY)


def test_augment_paper_line():
    g = augment(_circle(), np.array([0.874645, 1.0351]), -3.9825)
    assert g.polys[1] == parse_poly("0.874645*x + 1.0351*y - 3.9825", XY)


def test_augment_recursion_reaches_square():
    f = PolySystem(3, [parse_poly("x^2 + y^2 + z^2 - 1", ["x", "y", "z"])])
    beta = np.array([1.0, 2.0, 3.0])
    g = augment(augment(f, beta, 0.5), beta, -0.5)
    assert len(g) == g.n_vars == 3


def test_real_filter_threshold():
    square = parse("x - 1\ny - 2", XY)
    cfg = RealFilterConfig(refine=False)
    kept = real_filter([np.array([1 + 1e-9j, 2.0])], cfg, square)
    assert len(kept) == 1
    assert np.allclose(kept[0], [1.0, 2.0])
    assert kept[0].dtype == np.float64
    dropped = real_filter([np.array([1 + 0.5j, 2.0])], cfg, square)
    assert dropped == []


def test_real_filter_refines_onto_real_locus():
    system = parse("x^2 - 2\ny - x", XY)
    cfg = RealFilterConfig()
    kept = real_filter([np.array([1.41421 + 1e-8j, 1.41422 - 1e-8j])], cfg, system)
    assert len(kept) == 1
    assert abs(kept[0][0] - np.sqrt(2)) < 1e-8


def test_real_filter_config_validation():
    with pytest.raises(ValueError):
        RealFilterConfig(tau_imag=0.0)


def test_witness_bound_values():
    assert witness_bound(2, 1, 6, 6) == 36
    assert witness_bound(3, 2, 3, 7) == 35


def test_witness_bound_two_terms_when_n_is_k_plus_1():
    # j runs over {0, 1}
    assert witness_bound(4, 3, 2, 5) == 3 * 1 * 5 + 1 * 1 * 5


def test_witness_bound_validation():
    with pytest.raises(ValueError):
        witness_bound(2, 2, 3, 1)
    with pytest.raises(ValueError):
        witness_bound(2, 1, 1, 1)


def test_numerical_rank():
    assert numerical_rank(np.eye(3)) == 3
    assert numerical_rank(np.zeros((2, 2))) == 0
    assert numerical_rank(np.array([[1.0, 2.0], [2.0, 4.0]])) == 1


def test_full_rank_check_circle():
    f = _circle()
    report = full_rank_check(f, [np.array([1.0, 0.0]), np.array([0.6, 0.8])])
    assert all(r["rank"] == 1 and not r["deficient"] for r in report)


def test_full_rank_check_detects_non_radical():
    f = PolySystem(2, [parse_poly("x^2", XY)])
    report = full_rank_check(f, [np.array([0.0, 1.0])])
    assert report[0]["deficient"]


def test_real_witness_set_square_case():
    f = parse("x^2 - 1\ny^2 - 4", XY)
    rws = real_witness_set(f, rng=np.random.default_rng(0))
    pts = sorted(tuple(np.round(wp.point, 6)) for wp in rws.points)
    assert pts == [(-1.0, -2.0), (-1.0, 2.0), (1.0, -2.0), (1.0, 2.0)]
    assert all(wp.stage == 0 for wp in rws.points)


def test_real_witness_set_circle_stages():
    rws = real_witness_set(_circle(), rng=np.random.default_rng(4))
    beta = np.asarray(rws.beta_used, dtype=float)
    unit = beta / np.linalg.norm(beta)
    stage0 = [wp.point for wp in rws.points if wp.stage == 0]
    assert len(stage0) == 2
    for sgn in (1.0, -1.0):
        assert any(np.abs(p - sgn * unit).max() < 1e-8 for p in stage0)
    assert len(rws.points) <= 4


def test_real_witness_set_points_on_variety():
    f = PolySystem(2, [parse_poly(SEXTIC, XY)])
    rws = real_witness_set(f, rng=np.random.default_rng(1))
    assert rws.points
    for wp in rws.points:
        assert f.residual(wp.point.astype(complex)) < 1e-6


def test_real_witness_set_reproducible():
    a = real_witness_set(_circle(), rng=np.random.default_rng(7))
    b = real_witness_set(_circle(), rng=np.random.default_rng(7))
    assert len(a.points) == len(b.points)
    for pa, pb in zip(a.points, b.points):
        assert np.array_equal(pa.point, pb.point)
        assert pa.stage == pb.stage


def test_real_witness_set_rejects_overdetermined():
    f = parse("x - 1\ny - 1\nx + y", XY)
    with pytest.raises(ValueError):
        real_witness_set(f)
