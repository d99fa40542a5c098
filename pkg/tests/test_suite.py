import pytest

from src.models.errors import ValidationError
from src.services import suite_service
from src.services.suite_service import SuiteConfig

QUICK = SuiteConfig(quick=True, budget=32)


def test_quick_suites_pass():
    report = suite_service.run_suite([15, 1, 4], QUICK)
    assert report["suites"] == [1, 4, 15]
    assert report["verdict"] == "pass"
    assert [row["suite"] for row in report["rows"]] == sorted(row["suite"] for row in report["rows"])


def test_rows_carry_family_and_anchor():
    report = suite_service.run_suite([1], QUICK)
    assert len(report["rows"]) == 4
    for row in report["rows"]:
        assert row["family"] == "closure_iteration_depth"
        assert row["anchor"].startswith("closure.")
        assert row["verdict"] == "pass"


@pytest.mark.parametrize("suite_id", suite_service.suite_ids())
def test_every_quick_suite_passes(suite_id):
    report = suite_service.run_suite([suite_id], QUICK)
    failed = [row for row in report["rows"] if row["verdict"] != "pass"]
    assert report["rows"]
    assert report["verdict"] == "pass", failed


def test_size_overrides():
    config = SuiteConfig(quick=True, overrides={"bm_cases": 3})
    assert config.size("bm_cases") == 3
    assert config.size("lattice_cases") == suite_service.QUICK_SIZES["lattice_cases"]
    assert SuiteConfig().size("lattice_cases") == suite_service.FULL_SIZES["lattice_cases"]


def test_unknown_suite_id():
    with pytest.raises(ValidationError):
        suite_service.run_suite([99], QUICK)


def test_suite_ids_are_contiguous():
    assert suite_service.suite_ids() == list(range(1, 16))


def test_extension_suite_runs_every_hahn_banach_instance():
    rows = suite_service.run_suite([8], QUICK)["rows"]
    assert len([row for row in rows if row["family"] == "hahn_banach"]) == 5


def test_lp_suite_includes_norm_laws_and_unstable_family():
    families = {row["family"] for row in suite_service.run_suite([9], QUICK)["rows"]}
    assert {"norm_superadditive", "mcp_unstable_family", "lp_mcp_counterexample"} <= families
