from fractions import Fraction

import pytest

from src.models.cone import ConeVec, DiscreteCone
from src.models.errors import PreconditionFailed, UnknownCatalogId
from src.models.poset import FinitePoset
from src.services import lattice_service, mcp_service

CHAIN2 = FinitePoset.chain(2)


def test_sum_functional_passes():
    cone = DiscreteCone([1, 2, Fraction(1, 2)])
    T = mcp_service.sum_functional_map(cone, ConeVec([1, "inf", 3]))
    assert mcp_service.check_mcp(T, budget=32).passed


def test_identity_passes():
    report = mcp_service.check_mcp(mcp_service.identity_map(DiscreteCone.uniform(2)), budget=16)
    assert report.passed
    assert report.to_dict()["verdict"] == "pass"


def test_catalog_c_fails_with_horizontal_chain():
    report = mcp_service.check_mcp(mcp_service.catalog_functional_map("c", 0, 1))
    assert not report.passed
    assert report.counterexample["chain"] == "(n, 0)"


@pytest.mark.parametrize("cone_id, lam, eta, expected, chain", [
    ("a", 0, 1, True, None),
    ("c", 0, 1, False, "(n, 0)"),
    ("c", 1, 0, False, "(0, n)"),
    ("c", 1, 1, True, None),
    ("d", 0, 1, False, "(n, 1 - 1/n), n ≥ 2"),
    ("d", 1, 2, True, None),
    ("e", 1, 0, False, None),
    ("f", 1, 0, True, None),
])
def test_catalog_classification(cone_id, lam, eta, expected, chain):
    result = lattice_service.catalog_cone_query(cone_id, lam, eta)
    assert result["has_mcp"] is expected
    if chain is not None:
        assert result["witness"]["chain"] == chain


def test_unknown_catalog_id():
    with pytest.raises(UnknownCatalogId):
        lattice_service.catalog_cone_query("z", 1, 1)


def test_lexicographic_sup_is_not_least():
    result = lattice_service.roman_sup_check()
    assert result["verdict"] == "pass"
    assert result["is_least"] is False


def test_finite_characterizations():
    constant = mcp_service.characterizations(CHAIN2, CHAIN2, [0, 0])
    assert all(constant.values())
    flipped = mcp_service.characterizations(CHAIN2, CHAIN2, [1, 0])
    assert not any(flipped[k] for k in "abcde")


def test_characterizations_agree_on_three_element_posets():
    assert mcp_service.equivalences_audit(3).agree


def test_projection_of_monotone_map_is_itself():
    report = mcp_service.pr_project_finite(CHAIN2, CHAIN2, [0, 1])
    assert report.projected == [0, 1]
    assert report.agrees


def test_projection_of_decreasing_map():
    report = mcp_service.pr_project_finite(CHAIN2, CHAIN2, [1, 0])
    assert report.projected == [0, 0]
    assert report.oracle == [0, 0]


def test_projection_needs_complete_lattice_target():
    with pytest.raises(PreconditionFailed):
        mcp_service.pr_project_finite(CHAIN2, FinitePoset.antichain(2), [0, 1])


def test_projection_audit_small():
    report = mcp_service.projection_audit(cases=40, max_n=4, max_lattice=3)
    assert report["verdict"] == "pass"
    assert {r["family"] for r in report["rows"]} >= {"projection_oracle", "projection_idempotent"}


def test_p_iterate_rejects_non_monotone_map():
    with pytest.raises(PreconditionFailed):
        mcp_service.p_iterate_finite(CHAIN2, CHAIN2, [1, 0])


def test_filtered_infimum_is_not_preserved():
    result = mcp_service.filtered_inf_demo(4)
    assert result["T_of_inf"] == {"num": 0, "den": 1}
    assert result["inf_of_T"] == "inf"
    assert result["filtered"]
    assert result["T_of_A_N_on_window"] == {"num": 0, "den": 1}
    assert result["T_values"] == ["inf"] * 5
    assert result["respects_filtered_inf"] is False


def test_pointwise_sup_of_sum_functionals():
    result = mcp_service.pointwise_sup_family_check(n=2, cases=4, seed=3)
    assert result["verdict"] == "pass"
    assert len(result["rows"]) == 4


def test_weighted_projection_is_maximal():
    spec = mcp_service.WeightedFunctionalSpec(mu=(1, 1), w=(2, 3), support=(0,))
    projection = mcp_service.pr_project_weighted(spec, budget=16)
    assert projection.f == ConeVec([2, "inf"])
    assert projection.dominated
    assert projection.maximal
    assert projection.to_dict()["verdict"] == "pass"
