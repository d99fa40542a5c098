from fractions import Fraction

import hypothesis
import hypothesis.strategies as strat
import pytest

from src.models.cone import AffineChain, ConeVec, DiscreteCone
from src.models.errors import BoundaryCase, NotProbability, ValidationError
from src.models.extreal import INF, ONE, ZERO, ExtNonneg, as_float
from src.models.functional import DualVector
from src.models.norms import LpTag
from src.services import norm_service

ZERO_JSON = {"num": 0, "den": 1}
ONE_JSON = {"num": 1, "den": 1}
NEGATIVE_TAGS = ("-2", "-1", "-1/2", "-inf")


@pytest.mark.parametrize("tag", ["1", "1/2", "-1", "-inf", "0+", "0-"])
def test_norm_of_constant_one(half_half, tag):
    assert norm_service.lp_norm(half_half, [1, 1], tag) == ONE


def test_negative_exponent_with_a_zero_coordinate(half_half):
    assert norm_service.lp_norm(half_half, [0, 1], "-1") == ZERO
    assert norm_service.lp_norm(half_half, [0, 1], "1/2") == ExtNonneg(Fraction(1, 4))


def test_essential_infimum(uniform3):
    assert norm_service.lp_norm(uniform3, [3, 1, 2], "-inf") == ONE


def test_harmonic_norm(half_half):
    assert norm_service.lp_norm(half_half, [1, 4], "-1") == ExtNonneg(Fraction(8, 5))


def test_log_norms_of_mixed_zero_and_infinity(half_half):
    assert norm_service.lp_norm(half_half, [0, "inf"], "0+") == INF
    assert norm_service.lp_norm(half_half, [0, "inf"], "0-") == ZERO
    assert norm_service.lp_norm(half_half, [0, 4], "0-") == ZERO


def test_log_norm_geometric_mean(half_half):
    assert norm_service.lp_norm(half_half, [1, 4], "0+") == ExtNonneg(2)
    report = norm_service.norm_report(half_half, [1, 4], "0-")
    assert report["norm"] == {"num": 2, "den": 1}
    assert report["integrals"]["both_diverge"] is False


def test_log_norm_needs_probability_weights():
    with pytest.raises(NotProbability):
        norm_service.lp_norm(DiscreteCone([1, 1]), [1, 1], "0+")


def test_normalize():
    cone = norm_service.normalize(DiscreteCone([1, 3]))
    assert cone.mu == (Fraction(1, 4), Fraction(3, 4))
    assert cone.is_probability


def test_tag_parsing():
    assert LpTag.parse("-1").conjugate() == LpTag.parse("1/2")
    assert LpTag.parse("1").conjugate() == LpTag.parse("-inf")
    assert LpTag.parse("0+").conjugate() == LpTag.parse("0-")
    with pytest.raises(ValidationError):
        LpTag.parse("2")
    with pytest.raises(ValidationError):
        LpTag.parse("0")


def test_dual_attainment_harmonic(half_half):
    result = norm_service.dual_attain(half_half, [1, 4], "-1", levels=(10, 100))
    assert result.norm == ExtNonneg(Fraction(8, 5))
    assert result.passed
    assert result.to_dict()["pairing"] == {"num": 8, "den": 5}


def test_dual_attainment_log_norm(half_half):
    result = norm_service.dual_attain(half_half, [1, 4], "0+", levels=(10,))
    assert result.norm == ExtNonneg(2)
    assert result.attains


def test_dual_attainment_rejects_boundary_vectors(half_half):
    with pytest.raises(BoundaryCase):
        norm_service.dual_attain(half_half, [0, 4], "1/2")


def test_bidual_equality_for_positive_exponent(half_half):
    result = norm_service.bidual_audit(half_half, [1, 4], "1/2", levels=(10,))
    assert result.mode == "equality"
    assert result.verdict == "pass"


def test_bidual_is_only_recorded_for_negative_exponent(half_half):
    assert norm_service.bidual_audit(half_half, [1, 4], "-1", levels=(10,)).verdict == "recorded"


def test_l0_identities(half_half):
    result = norm_service.l0_identities(half_half, [1, 4], [2, Fraction(1, 2)])
    assert result["verdict"] == "pass"
    assert {r["family"] for r in result["rows"]} == {"l0_reciprocal", "l0_product"}


def test_l0_identities_need_probability_weights():
    with pytest.raises(NotProbability):
        norm_service.l0_identities(DiscreteCone([1, 2]), [1, 1])


@pytest.mark.parametrize("tag", NEGATIVE_TAGS)
def test_window_norms_jump_at_the_top(tag):
    result = norm_service.lp_mcp_counterexample(4, tag, budget=8)
    assert result["chain_norms"] == [ZERO_JSON, ZERO_JSON, ZERO_JSON, ONE_JSON]
    assert result["jump_at_sup"]
    assert result["reference_p1"][-1] == ONE_JSON
    assert result["shifted"]["counterexample"] is None
    assert result["verdict"] == "pass"


def test_shifted_norm_converges_slowly_but_preserves_the_sup():
    # (1 - 1/k, k, k, k) + 1 の値は k^(-1/2) の速さでしか 32 に近づかない
    chain = AffineChain([1, 0, 0, 0], [0, 1, 1, 1], [1, 0, 0, 0])
    cone = DiscreteCone.uniform(4)
    shift = ConeVec([1, 1, 1, 1])
    assert norm_service._shifted_chain((cone, LpTag.parse("-1/2"), shift, chain)) is None


def test_window_norms_require_negative_exponent():
    with pytest.raises(ValidationError):
        norm_service.lp_mcp_counterexample(4, "1/2")


@hypothesis.settings(max_examples=40)
@hypothesis.given(strat.lists(strat.integers(1, 9), min_size=3, max_size=3),
                  strat.lists(strat.integers(1, 9), min_size=3, max_size=3))
def test_harmonic_norm_is_superadditive(f, g):
    cone = DiscreteCone.uniform(3)
    total = norm_service.lp_norm(cone, [a + b for a, b in zip(f, g)], "-1")
    assert total >= norm_service.lp_norm(cone, f, "-1") + norm_service.lp_norm(cone, g, "-1")


@pytest.mark.parametrize("tag", NEGATIVE_TAGS)
@hypothesis.settings(max_examples=30)
@hypothesis.given(strat.lists(strat.integers(1, 9), min_size=3, max_size=3),
                  strat.lists(strat.integers(1, 9), min_size=3, max_size=3))
def test_negative_norms_are_superadditive(tag, f, g):
    cone = DiscreteCone.uniform(3)
    total = as_float(norm_service.lp_norm(cone, [a + b for a, b in zip(f, g)], tag))
    parts = as_float(norm_service.lp_norm(cone, f, tag)) + as_float(norm_service.lp_norm(cone, g, tag))
    assert total >= parts * (1 - 1e-9)


@pytest.mark.parametrize("tag", NEGATIVE_TAGS + ("1/2", "1"))
def test_norm_law_audit(tag):
    result = norm_service.norm_law_audit(tag, n=3, cases=24, seed=5)
    assert result["verdict"] == "pass"


@pytest.mark.parametrize("q", ["-2", "-1", "-1/2"])
def test_mcp_unstable_family_stays_in_the_bracket(q):
    result = norm_service.mcp_unstable_family(12, q)
    assert result["verdict"] == "pass"
    assert [r["n"] for r in result["rows"]] == [2, 3, 4, 6, 12]
    assert all(r["holds"] and r["in_bracket"] for r in result["rows"])


def test_mcp_unstable_family_bracket_for_harmonic_norm():
    assert norm_service.mcp_unstable_family(6, "-1")["bracket"] == [1.0, 2.0]
    with pytest.raises(ValidationError):
        norm_service.mcp_unstable_family(6, "1/2")


def test_operator_norm_uses_conjugate_exponent(half_half):
    L = DualVector(half_half, [1, 4])
    result = norm_service.operator_norm(L, "-1")
    assert result.value == ExtNonneg(Fraction(9, 4))
    assert result.grid_ok is not False
    assert norm_service.operator_norm(DualVector(half_half, [0, 0]), "1/2").value == ZERO


def test_reverse_holder_audit():
    assert norm_service.reverse_holder_audit(n=2, cases=16, seed=5)["verdict"] == "pass"
