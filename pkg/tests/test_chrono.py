from fractions import Fraction

import pytest

from src.models.cone import ConeVec
from src.models.errors import EmptyOpen, NotComparable, ValidationError
from src.services import chrono_service
from src.services.chrono_service import BasicOpenSpec, ChronInstance

L1 = ChronInstance.of([1, 1], "1")


def test_chronological_relation_depends_on_norm():
    v, w = ConeVec([1, 1]), ConeVec([2, 1])
    assert L1.rel(v, w)
    # p < 0 では座標が 0 の差は正でない
    assert not ChronInstance.of([1, 1], "-1").rel(v, w)
    assert not L1.rel(v, v)


def test_relation_needs_order():
    with pytest.raises(NotComparable):
        L1.rel(ConeVec([1, 2]), ConeVec([2, 1]))
    assert not L1.below(ConeVec([1, 2]), ConeVec([2, 1]))


def test_chronological_laws_small():
    report = chrono_service.chron_laws(samples=30, n=2, tags=("1", "-1"))
    assert report["verdict"] == "pass"


def test_diamond_shrink_thirds():
    spec = BasicOpenSpec(L1, [ConeVec([0, 0])], [ConeVec([3, 3])])
    step = chrono_service.diamond_shrink(spec)
    assert step.v_bar == ConeVec([1, 1])
    assert step.w_bar == ConeVec([2, 2])
    assert step.midpoint == ConeVec([Fraction(3, 2), Fraction(3, 2)])
    assert step.passed


def test_empty_open_set_is_rejected():
    spec = BasicOpenSpec(L1, [ConeVec([2, 2])], [ConeVec([1, 1])])
    with pytest.raises(EmptyOpen):
        chrono_service.diamond_shrink(spec)


def test_witness_outside_open_set():
    spec = BasicOpenSpec(L1, [ConeVec([0, 0])], [ConeVec([3, 3])])
    with pytest.raises(ValidationError):
        chrono_service.diamond_shrink(spec, witness=ConeVec([5, 5]))


def test_shrink_iterate_is_nested():
    spec = BasicOpenSpec(L1, [ConeVec([0, 0])], [ConeVec([3, 3])])
    result = chrono_service.shrink_iterate(spec, iters=4)
    assert result["nested"]
    assert result["common_point_in_all"]
    assert result["verdict"] == "pass"


def test_baire_shrink_report_random_spec():
    result = chrono_service.baire_shrink_report(iters=5, seed=3)
    assert result["iterations"] == 5
    assert result["verdict"] == "pass"
    assert "spec" in result


def test_singleton_open_set_for_concave_norm():
    result = chrono_service.chron_pathology_witness(Fraction(1, 2), (1, 1))
    assert result["member"]
    assert result["singleton"]
    assert result["verdict"] == "pass"


def test_pathology_needs_exponent_between_zero_and_one():
    with pytest.raises(ValidationError):
        chrono_service.chron_pathology_witness(2, (1, 1))


def test_diamond_open_grid_covers_all_points():
    rows = chrono_service.diamond_open_grid(values=(1, 2))
    assert len(rows) == 4
    assert all(r["singleton"] for r in rows)


def test_chron_rel():
    v, w = ConeVec([1, 1]), ConeVec([2, 1])
    assert chrono_service.chron_rel(L1, v, w) is True
    assert chrono_service.chron_rel(L1, v, v) is False
