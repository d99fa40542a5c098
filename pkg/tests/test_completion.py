import pytest

from src.data import fixtures
from src.models.errors import BudgetExceeded, NotPartialOrder, ValidationError
from src.models.poset import FinitePoset, finite_lattices, unlabelled_posets
from src.services import closure_service, completion_service


def _v_shape() -> FinitePoset:
    # 0, 1 < 2
    return FinitePoset.from_pairs(3, [(0, 2), (1, 2)])


def test_cycle_is_not_a_partial_order():
    with pytest.raises(NotPartialOrder):
        FinitePoset([[True, True], [True, True]])


def test_finite_closure_needs_no_iteration():
    P = FinitePoset.antichain(3)
    report = closure_service.closure_suite(P, [0, 1])
    assert report.iteration_count == 0
    assert report.bar == frozenset({0, 1})


def test_tip_of_singleton_and_of_unrelated_pair():
    P = _v_shape()
    assert closure_service.tip(P, [1]) == 1
    assert closure_service.tip(P, [0, 1]) is None


def test_doppiafreccia_needs_two_steps():
    P = fixtures.doppiafreccia()
    report = closure_service.closure_suite(P, [closure_service.whole_sort("P")])
    assert report.iteration_count == 2
    assert P.same(report.bar, P.whole())


@pytest.mark.parametrize("alpha", [1, 2, 3])
def test_alphafreccia_needs_alpha_steps(alpha):
    P = fixtures.alphafreccia(alpha)
    report = closure_service.closure_suite(P, [closure_service.whole_sort(f"L{alpha}")])
    assert report.iteration_count == alpha


def test_iteration_budget_is_enforced():
    P = fixtures.alphafreccia(3)
    with pytest.raises(BudgetExceeded):
        closure_service.closure_suite(P, [closure_service.whole_sort("L3")], depth=1)


def test_dm_of_antichain_adds_bottom_and_top():
    dm = completion_service.dm_completion(FinitePoset.antichain(2))
    assert len(dm.cuts) == 4
    assert len(dm.added) == 2
    assert dm.lattice.is_complete_lattice()


def test_dm_of_chain_is_itself():
    dm = completion_service.dm_completion(FinitePoset.chain(3))
    assert len(dm.cuts) == 3
    assert dm.added == []


def test_power_set_claim_is_consistent():
    report = completion_service.check_completion_claim(completion_service.power_set_claim(3))
    assert report.consistent


def test_identity_on_complete_poset_is_consistent():
    L = FinitePoset.chain(4)
    claim = completion_service.CompletionClaim("finite", L, L, list(range(L.n)), name="chain4")
    assert completion_service.check_completion_claim(claim).consistent


def test_shared_top_claim_is_refuted():
    claim = completion_service.CompletionClaim("branch", fixtures.two_open_chains(),
                                               fixtures.two_chains_shared_top(), name="shared-top")
    report = completion_service.check_completion_claim(claim, budget=64)
    assert not report.consistent
    assert report.counterexample is not None


def test_directed_and_dm_completions_differ_on_four_rows():
    report = completion_service.compare_completions(fixtures.four_rows())
    assert report.ts_identity
    assert not report.t_injective
    assert report.witness is not None


def test_finite_lattices_are_their_own_completions():
    for L in finite_lattices(4):
        report = completion_service.compare_completions(L)
        assert report.ts_identity and report.t_injective
        assert len(report.dm) == L.n


def test_one_point_poset():
    P = FinitePoset.chain(1)
    report = completion_service.compare_completions(P)
    assert report.completion == report.dm
    assert len(report.dm) == 1


def test_truncation_holds_on_a_finite_chain():
    report = completion_service.truncation_check(FinitePoset.chain(3), meet_map=True)
    assert report.passed
    assert report.checked == 3
    assert report.meet_map
    assert report.to_dict()["verdict"] == "pass"


def test_product_of_finite_chains_is_consistent():
    result = completion_service.check_product_completion(FinitePoset.chain(2), FinitePoset.chain(3))
    assert result["verdict"] == "consistent"
    assert result["checked"] > 0
    assert result["counterexample"] is None


def test_product_with_an_antichain_is_consistent():
    result = completion_service.check_product_completion(FinitePoset.antichain(2), FinitePoset.chain(2))
    assert result["verdict"] == "consistent"


def test_dedekind_macneille_does_not_commute_with_products():
    A = FinitePoset.antichain(2)
    result = completion_service.check_product_completion(A, A, completion="dm")
    assert result["verdict"] == "fail"
    assert result["counterexample"] == {"kind": "size", "sizes": [6, 16]}
    chain = completion_service.check_product_completion(FinitePoset.chain(2), FinitePoset.chain(2), completion="dm")
    assert chain["verdict"] == "consistent"


def test_product_of_branch_presentations():
    result = completion_service.check_product_completion(fixtures.naturals(), fixtures.naturals(), budget=9)
    assert result["verdict"] == "consistent"
    assert result["checked"] == 9
    result = completion_service.check_product_completion(fixtures.naturals(), fixtures.two_chains_shared_top(), budget=12)
    assert result["verdict"] == "consistent"


def test_product_of_mixed_kinds_is_rejected():
    with pytest.raises(ValidationError):
        completion_service.check_product_completion(FinitePoset.chain(2), fixtures.naturals())


def test_finite_poset_is_its_own_directed_completion():
    P = FinitePoset.antichain(2)
    assert completion_service.directed_completion_branch(P) is P
    enhanced = completion_service.directed_completion_branch(P, enhanced=True)
    assert enhanced.n == 3
    assert enhanced.bottom() == 2


def test_naturals_gain_one_formal_sup():
    completion = completion_service.directed_completion_branch(fixtures.naturals())
    assert completion.layers == 1
    assert len(completion.formal) == 1


def test_unlabelled_posets_on_three_points():
    assert len(unlabelled_posets(3)) == 5
