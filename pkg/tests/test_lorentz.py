from fractions import Fraction

import pytest

from src.models.errors import NotCausal, NotMonotone, NotSummable, OutsideTriangle
from src.models.lorentz import CausalPoint, RaySequence, TriangleNorm
from src.services import lorentz_service

U = (Fraction(3, 5), Fraction(4, 5))


@pytest.mark.parametrize("p, t, x, expected", [
    ("2", 5, 3, 4.0),
    ("1", 3, 1, 2.0),
    ("inf", 5, 3, 5.0),
    ("2", 0, 0, 0.0),
])
def test_triangle_norm_values(p, t, x, expected):
    assert lorentz_service.tri_norm(TriangleNorm.lp(p), t, x) == pytest.approx(expected)


def test_triangle_norm_outside_domain():
    with pytest.raises(OutsideTriangle):
        TriangleNorm.lp(2)(1, 2)


def test_triangle_dual_matches_conjugate():
    norm = TriangleNorm.lp(2)
    assert lorentz_service.tri_dual(norm, 5, 3) == pytest.approx(4.0, abs=1e-4)


@pytest.mark.parametrize("p", ["1", "2", "3/2"])
def test_triangle_dual_audit(p):
    report = lorentz_service.tri_dual_audit(p, points=12, grid=400)
    assert report["verdict"] == "pass"


def test_bidual_of_lp_norm_is_itself():
    report = lorentz_service.bidual_fixed_point(TriangleNorm.lp(2), grid=400)
    assert report["verdict"] == "pass"


def test_bidual_of_x_increasing_norm_shows_gap():
    report = lorentz_service.bidual_fixed_point(lorentz_service.x_increasing_violator(), grid=400)
    assert report["verdict"] == "gap"
    assert report["witness"] is not None


def test_pairing_inequality():
    assert lorentz_service.pairing_audit("2", grid=10)["verdict"] == "pass"


def test_lorentz_norm_reverse_triangle():
    assert lorentz_service.lorentz_superadditivity("l2", "2", d=2, cases=100)["verdict"] == "pass"


def test_lorentz_norm_outside_future_cone():
    hn = lorentz_service.lorentzify("l2", TriangleNorm.lp(2))
    assert hn(5, [3, 0]) == pytest.approx(4.0)
    with pytest.raises(NotCausal):
        hn(1, [3, 4])


def test_causal_order_is_a_partial_order():
    assert lorentz_service.causal_audit(d=2, samples=100)["verdict"] == "pass"


@pytest.mark.parametrize("name", ["constant", "timelike", "null", "cauchy"])
def test_fixed_ray_families(name):
    seq, expected = lorentz_service.fixed_ray_families()[name]
    assert lorentz_service.classify_directed(seq).key() == expected.key()


def test_null_ray_limit_value():
    seq, _ = lorentz_service.fixed_ray_families()["null"]
    result = lorentz_service.classify_directed(seq)
    assert result.kind == "null-infinity"
    assert result.c == Fraction(1)
    assert result.w == U


def test_classification_ignores_finite_prefix():
    seq, _ = lorentz_service.fixed_ray_families()["timelike"]
    assert lorentz_service.classify_tail_invariance(seq)["invariant"]


def test_too_slow_ray_is_not_monotone():
    seq = RaySequence("timelike-ray", CausalPoint(Fraction(0), (Fraction(0), Fraction(0))), U, Fraction(1, 2))
    with pytest.raises(NotMonotone):
        lorentz_service.classify_directed(seq)


def test_minkowski_claim_is_consistent():
    result = lorentz_service.minkowski_claim()
    assert result["consistent"]
    assert len(result["rows"]) == 4


@pytest.mark.parametrize("s, m, expected", [
    (1, [Fraction(3, 5), Fraction(4, 5)], True),
    (1, [1, 1], False),
    (2, [-1, 1], True),
])
def test_positive_functional_on_future_cone(s, m, expected):
    result = lorentz_service.positive_functional_audit(s, m, "l2")
    assert result["closed_form"] is expected
    assert result["agree"]


def test_positive_functional_suite_small():
    assert lorentz_service.positive_functional_suite("l1", d=2, cases=40)["verdict"] == "pass"


def test_geometric_sequence_gives_causal_chain():
    result = lorentz_service.completeness_pair("geometric", [0, 0], [3, 4])
    assert result["holds"]
    assert result["sup"]["t"] == 5


def test_harmonic_sequence_is_not_summable():
    with pytest.raises(NotSummable):
        lorentz_service.completeness_pair("harmonic", [0, 0], [1, 0])
