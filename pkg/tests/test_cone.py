from fractions import Fraction

import hypothesis
import pytest

from conftest import cone_vecs
from src.models.cone import AffineChain, ConeVec, cone_inf, cone_sup
from src.models.errors import NotComparable, PreconditionFailed
from src.models.extreal import INF, ZERO
from src.services import lattice_service


def test_cone_operations():
    ops = lattice_service.cone_ops(ConeVec([2, 3]), ConeVec([5, "inf"]))
    assert ops["sum"] == ConeVec([7, "inf"])
    assert ops["difference"] == ConeVec([3, "inf"])
    assert ConeVec([2, "inf"]).eps() == ConeVec([0, "inf"])
    assert ConeVec([2, 0]).scale(INF) == ConeVec(["inf", 0])


def test_difference_requires_order():
    with pytest.raises(NotComparable):
        ConeVec([1, 2]).minus(ConeVec([2, 1]))


def test_modularity_example():
    x, y = ConeVec([1, 3]), ConeVec([2, 1])
    assert x.join(y) == ConeVec([2, 3])
    assert x.meet(y) == ConeVec([1, 1])
    assert x + y == x.join(y) + x.meet(y)


def test_decomposition_example():
    result = lattice_service.decomposition_witness(ConeVec([3, 0]), ConeVec([0, 3]),
                                                   ConeVec([2, 1]), ConeVec([1, 2]))
    assert result["z11"] == ConeVec([2, 0])
    assert result["z22"] == ConeVec([0, 2])
    assert result["z12"] == ConeVec([1, 0])
    assert result["z21"] == ConeVec([0, 1])
    assert result["holds"]


def test_decomposition_needs_equal_sums():
    with pytest.raises(PreconditionFailed):
        lattice_service.decomposition_witness(ConeVec([1]), ConeVec([1]), ConeVec([1]), ConeVec([2]))


def test_ddp_split_finite_chain():
    chain = AffineChain([2, 3], [0, 0], [1, 1])
    result = lattice_service.ddp_split(chain, ConeVec([1, 1]), ConeVec([1, 2]))
    assert result["holds"]
    assert result["cases"] == [1, 1]


def test_ddp_split_trivial_part():
    chain = AffineChain([1, 0], [0, 1], [1, 0])
    v = chain.sup()
    result = lattice_service.ddp_split(chain, v, ConeVec.zeros(2))
    assert result["holds"]
    assert all(h == [ZERO.to_json()] * 2 for h in result["H"])


def test_lattice_law_suite_small():
    report = lattice_service.lattice_law_suite(n=3, cases=200, seed=11)
    assert report["verdict"] == "pass"
    assert all(r["failed"] == 0 for r in report["rows"])


def test_wedge_axioms():
    assert lattice_service.wedge_axioms(samples=32)["verdict"] == "pass"


def test_sup_and_inf_of_family():
    family = [ConeVec([1, "inf"]), ConeVec([3, 0])]
    assert cone_sup(family) == ConeVec([3, "inf"])
    assert cone_inf(family) == ConeVec([1, 0])


@hypothesis.given(cone_vecs(3), cone_vecs(3))
def test_modularity_holds_with_infinite_coordinates(x, y):
    assert x + y == x.join(y) + x.meet(y)


@hypothesis.given(cone_vecs(3), cone_vecs(3), cone_vecs(3))
def test_meet_distributes_below_sum(x, y, z):
    assert (x + y).meet(z) <= x.meet(z) + y.meet(z)


@hypothesis.given(cone_vecs(2), cone_vecs(2))
def test_infinite_part_is_additive(x, y):
    assert (x + y).eps() == x.eps() + y.eps()


@hypothesis.given(cone_vecs(2))
def test_scalar_action(v):
    assert v.scale(0) == ConeVec.zeros(2)
    assert v.scale(Fraction(1, 2)) + v.scale(Fraction(1, 2)) == v


def test_decomposition_into_two_summands():
    v1, v2 = lattice_service.decomposition_one(ConeVec([3, 1]), ConeVec([2, 2]), ConeVec([2, 0]))
    assert v1 == ConeVec([2, 1])
    assert v2 == ConeVec([1, 0])
    with pytest.raises(PreconditionFailed):
        lattice_service.decomposition_one(ConeVec([5, 0]), ConeVec([2, 2]), ConeVec([2, 0]))
