from fractions import Fraction

import pytest

from src.data import fixtures
from src.models.cone import ConeVec, DiscreteCone
from src.models.errors import HypothesisFailed, NotComparable, PreconditionFailed, ValidationError
from src.models.extreal import INF, ZERO, ExtNonneg
from src.models.functional import DualVector
from src.services import extension_service

CONE = DiscreteCone([1, 1])


def test_riesz_kantorovich_join_and_meet():
    L1, L2 = DualVector(CONE, [1, 3]), DualVector(CONE, [2, 1])
    result = extension_service.rk_join_meet(L1, L2, ConeVec([1, 1]))
    assert result.join == ExtNonneg(5)
    assert result.meet == ExtNonneg(2)
    assert result.agree
    assert result.to_dict()["lp_join"] == {"num": 5, "den": 1}


def test_riesz_kantorovich_grid_splits_infinite_coordinates():
    cone = DiscreteCone([Fraction(2, 3), 2, Fraction(1, 2)])
    L1 = DualVector(cone, [4, "inf", 0])
    L2 = DualVector(cone, ["inf", Fraction(1, 4), 9])
    result = extension_service.rk_join_meet(L1, L2, ConeVec([Fraction(3, 2), 0, "inf"]))
    assert result.meet == ExtNonneg(4)
    assert result.grid_meet == ExtNonneg(4)
    assert result.join == result.grid_join == INF
    assert result.agree


def test_riesz_kantorovich_equal_functionals():
    L = DualVector(CONE, [Fraction(1, 2), 2])
    result = extension_service.rk_join_meet(L, L, ConeVec([2, 3]))
    assert result.join == result.meet == ExtNonneg(7)


def test_riesz_kantorovich_at_zero():
    L1, L2 = DualVector(CONE, [1, "inf"]), DualVector(CONE, [4, 0])
    result = extension_service.rk_join_meet(L1, L2, ConeVec.zeros(2))
    assert result.join == ZERO
    assert result.meet == ZERO


def test_riesz_kantorovich_rejects_mismatched_cones():
    with pytest.raises(ValidationError):
        extension_service.rk_join_meet(DualVector(CONE, [1, 1]), DualVector(DiscreteCone([1, 2]), [1, 1]),
                                       ConeVec([1, 1]))


def test_functional_difference():
    M = extension_service.functional_difference(DualVector(CONE, [1, 2]), DualVector(CONE, [3, "inf"]))
    assert M.f == ConeVec([2, "inf"])
    with pytest.raises(NotComparable):
        extension_service.functional_difference(DualVector(CONE, [3, 0]), DualVector(CONE, [1, 1]))


def test_order_coincidence_audit():
    assert extension_service.order_coincidence_audit(n=3, cases=8)["verdict"] == "pass"


@pytest.mark.parametrize("name, spec, bounds", fixtures.extension_instances(),
                         ids=[obj["name"] for obj in fixtures.EXTENSION_INSTANCES])
def test_extension_instances(name, spec, bounds):
    extension_service.check_hypothesis(spec, bounds)
    result = extension_service.extend_all(spec, bounds, budget=16)
    assert result.extends, name
    assert result.within_bounds, name
    assert result.passed


def test_extension_order_does_not_break_extension():
    _, spec, bounds = fixtures.extension_instances()[3]
    result = extension_service.extend_all(spec, bounds, order=[2, 0, 1], budget=16)
    assert result.passed
    assert result.order == [2, 0, 1]


@pytest.mark.parametrize("name, spec, bounds", fixtures.infeasible_instances(),
                         ids=[obj["name"] for obj in fixtures.INFEASIBLE_INSTANCES])
def test_infeasible_instances_are_rejected(name, spec, bounds):
    with pytest.raises(HypothesisFailed) as info:
        extension_service.check_hypothesis(spec, bounds)
    assert info.value.witness is not None


def test_extend_all_rejects_bad_order():
    _, spec, bounds = fixtures.extension_instances()[0]
    with pytest.raises(ValidationError):
        extension_service.extend_all(spec, bounds, order=[0, 0])


def test_hahn_banach_on_l1_norm():
    forms = [[1, 1], [1, -1], [-1, 1], [-1, -1]]
    result = extension_service.hahn_banach(forms, [[1, 0]], [Fraction(1, 2)])
    assert result.passed
    assert result.t_hat[0] == Fraction(1, 2)
    assert abs(result.t_hat[1]) <= 1


@pytest.mark.parametrize("name, forms, basis, values", fixtures.hahn_banach_instances(),
                         ids=[obj["name"] for obj in fixtures.HAHN_BANACH_INSTANCES])
def test_hahn_banach_instances(name, forms, basis, values):
    result = extension_service.hahn_banach(forms, basis, values, budget=8)
    assert result.extension.passed, name
    assert sum(result.weights) == 1
    assert result.lp_agrees
    assert result.passed
    assert result.hull_weights is not None


def test_hahn_banach_goes_through_the_future_cone():
    forms = [[1, 1], [1, -1], [-1, 1], [-1, -1]]
    spec = extension_service.future_cone_spec(extension_service.Sublinear(forms), [(Fraction(1), Fraction(0))],
                                              [Fraction(1, 2)])
    # (1, 0), (1, e_1), (1, -e_1) を x_j = t − ℓ_j·v で写したもの
    assert spec.generators == [(1, 1, 1, 1), (2, 2, 0, 0), (0, 0, 2, 2)]
    assert spec.values == [1, Fraction(3, 2), Fraction(1, 2)]
    result = extension_service.hahn_banach(forms, [[1, 0]], [Fraction(1, 2)], budget=8)
    assert result.generators == 3
    assert len(result.extension.steps) == 4
    assert result.to_dict()["future_cone_generators"] == 3


def test_future_cone_of_a_plane_uses_the_edges_of_p():
    p = extension_service.Sublinear([[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]])
    basis = [(Fraction(1), Fraction(0), Fraction(0)), (Fraction(0), Fraction(1), Fraction(0))]
    assert extension_service._fan_rays(p, basis) == sorted([(-1, Fraction(1, 2)), (1, -2), (1, 1)])


def test_hahn_banach_without_subspace():
    result = extension_service.hahn_banach([[1, 0], [0, 1]], [], [])
    assert result.passed


def test_hahn_banach_rejects_dominated_violation():
    with pytest.raises(PreconditionFailed):
        extension_service.hahn_banach([[1, 1], [-1, -1]], [[1, 0]], [2])


def test_extension_step_values():
    _, line, line_bounds = fixtures.extension_instances()[4]
    assert extension_service.extension_step(line, line_bounds, [1]).value == ExtNonneg(3)
    _, diagonal, diagonal_bounds = fixtures.extension_instances()[0]
    assert extension_service.extension_step(diagonal, diagonal_bounds, [1, 0]).value == ExtNonneg(3)
    assert extension_service.extension_step(diagonal, diagonal_bounds, [0, 0]).value == ZERO
    with pytest.raises(ValidationError):
        extension_service.extension_step(diagonal, diagonal_bounds, [-1, 0])
