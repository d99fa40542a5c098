from fractions import Fraction

import pytest

from src.models.errors import ValidationError
from src.models.polygon import ConvexPolygon, convex_hull
from src.services import geometry_service

SQUARE = ConvexPolygon.of([(0, 0), (1, 0), (1, 1), (0, 1)])
TRIANGLE = ConvexPolygon.of([(0, 0), (2, 0), (0, 2)])


def test_sum_of_unit_squares():
    total = geometry_service.minkowski_sum(SQUARE, SQUARE)
    assert total.area == 4
    assert total == SQUARE.scale(2)


def test_edge_merge_matches_hull_of_pairwise_sums():
    assert geometry_service.minkowski_sum(SQUARE, TRIANGLE) == geometry_service.minkowski_sum_hull(SQUARE, TRIANGLE)


def test_sum_with_segment():
    segment = ConvexPolygon.hull_of([(0, 0), (1, 0)])
    assert segment.degenerate
    assert geometry_service.minkowski_sum(SQUARE, segment).area == 2


def test_brunn_minkowski_equality_for_homothets():
    result = geometry_service.bm_audit(SQUARE, SQUARE)
    assert result["holds"]
    assert result["equality"]


def test_brunn_minkowski_strict_for_square_and_triangle():
    result = geometry_service.bm_report(SQUARE, TRIANGLE)
    assert result["holds"]
    assert not result["equality"]
    assert result["verdict"] == "pass"
    assert result["area_b"] == "2"


def test_bm_suite_small():
    report = geometry_service.bm_suite(cases=20)
    assert report["verdict"] == "pass"


def test_minkowski_laws():
    assert geometry_service.minkowski_law_audit(cases=10)["verdict"] == "pass"


def test_distributivity_fails_for_two_points():
    result = geometry_service.distributivity_failure_witness(samples=5)
    assert result["scaled_size"] == 2
    assert result["sum_size"] == 3
    assert result["strict"]
    assert result["convex_equality"]


def test_homothet():
    image = geometry_service.homothet(SQUARE, Fraction(1, 2), (1, 1))
    assert image.area == Fraction(1, 4)


def test_polygon_validation():
    with pytest.raises(ValidationError):
        ConvexPolygon.of([(0, 0), (2, 0), (1, Fraction(1, 10)), (1, -5), (1, 0)])
    with pytest.raises(ValidationError):
        SQUARE.scale(-1)


def test_convex_hull_drops_interior_and_collinear_points():
    hull = convex_hull([(1, 1), (2, 2), (0, 2), (1, 0), (0, 0), (2, 0)])
    assert hull == [(0, 0), (2, 0), (2, 2), (0, 2)]
    assert convex_hull([(1, 1), (1, 1)]) == [(1, 1)]
