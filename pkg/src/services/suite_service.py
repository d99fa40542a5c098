import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config import DEFAULT_SEED, SAMPLED_CHAINS
from src.data import fixtures
from src.models.cone import DiscreteCone
from src.models.errors import HypothesisFailed, ValidationError
from src.models.functional import DualVector
from src.models.lorentz import TriangleNorm
from src.models.norms import LpTag
from src.models.poset import finite_lattices
from src.services import (chrono_service, closure_service, completion_service, extension_service,
                          geometry_service, lattice_service, lorentz_service, matrix_service, mcp_service,
                          norm_service)
from src.services.parallel import run_cases

# ロガーの設定
logger = logging.getLogger(__name__)

# 既定の規模 (full) と、テストや手元確認用の縮小版 (quick)
FULL_SIZES = {
    "projection_cases": 1000,
    "lattice_cases": 10 ** 4,
    "rk_cases": 200,
    "holder_cases": 10 ** 4,
    "matrix_cases": 10 ** 4,
    "matrix_dual_samples": 10 ** 4,
    "lorentz_points": 100,
    "positive_cases": 1000,
    "bm_cases": 200,
    "lattice_max_n": 6,
}
QUICK_SIZES = {
    "projection_cases": 60,
    "lattice_cases": 200,
    "rk_cases": 24,
    "holder_cases": 40,
    "matrix_cases": 50,
    "matrix_dual_samples": 500,
    "lorentz_points": 12,
    "positive_cases": 40,
    "bm_cases": 20,
    "lattice_max_n": 4,
}

HOLDER_EXPONENTS = ("-2", "-1", "-1/2", "1/2", "1", "0+", "0-")
MATRIX_EXPONENTS = ("-2", "-1", "-1/2", "1/2")
NEGATIVE_EXPONENTS = ("-2", "-1", "-1/2", "-inf")


@dataclass
class SuiteConfig:
    """スイートの実行設定 (シード・予算・規模)"""
    seed: int = DEFAULT_SEED
    budget: int = SAMPLED_CHAINS
    quick: bool = False
    overrides: Dict[str, int] = field(default_factory=dict)

    def size(self, key: str) -> int:
        if key in self.overrides:
            return self.overrides[key]
        return (QUICK_SIZES if self.quick else FULL_SIZES)[key]


def _row(family: str, anchor: str, passed: bool, checked: int = 1, failed: Optional[int] = None,
         **detail: Any) -> Dict[str, Any]:
    row = {"family": family, "anchor": anchor, "checked": checked,
           "failed": (0 if passed else 1) if failed is None else failed,
           "verdict": "pass" if passed else "fail"}
    if detail:
        row["detail"] = detail
    return row


def _audit_rows(report: Dict[str, Any], anchor: str, prefix: str = "", **extra: Any) -> List[Dict[str, Any]]:
    """監査の行 (family / checked / failed) を共通の形に揃える"""
    rows = []
    for r in report["rows"]:
        detail = dict(extra)
        if r.get("first_failure") is not None:
            detail["first_failure"] = r["first_failure"]
        rows.append(_row(prefix + r["family"], r.get("anchor", anchor), r["failed"] == 0,
                         r["checked"], r["failed"], **detail))
    return rows


# ----------------------------------------------------------------------
# 1. 閉包の反復回数
# ----------------------------------------------------------------------
def closure_depths(config: SuiteConfig) -> List[Dict[str, Any]]:
    cases = [("doppiafreccia", fixtures.doppiafreccia(), "P", 2)]
    cases += [(f"alphafreccia{a}", fixtures.alphafreccia(a), f"L{a}", a) for a in (1, 2, 3)]
    rows = []
    for name, P, sort, expected in cases:
        report = closure_service.closure_suite(P, [closure_service.whole_sort(sort)])
        whole = P.same(report.bar, P.whole())
        rows.append(_row("closure_iteration_depth", f"closure.{name}",
                         report.iteration_count == expected and whole,
                         expected=expected, iterations=report.iteration_count, reaches_whole=whole))
    return rows


# ----------------------------------------------------------------------
# 2. 完備化の主張
# ----------------------------------------------------------------------
def completion_claims(config: SuiteConfig) -> List[Dict[str, Any]]:
    Claim = completion_service.CompletionClaim
    positive = [
        completion_service.power_set_claim(3),
        Claim("branch", fixtures.two_open_chains(), fixtures.two_chains_own_tops(), name="two-chains-own-tops"),
        Claim("cone", DiscreteCone.uniform(3), name="finite-vectors"),
        Claim("classifier", name="minkowski-classifier"),
    ]
    negative = [
        Claim("branch", fixtures.two_open_chains(), fixtures.two_chains_shared_top(), name="two-chains-shared-top"),
        Claim("branch", fixtures.chain_only(), fixtures.chain_with_two_caps(), name="chain-with-two-caps"),
    ]
    rows = []
    for claim in positive:
        report = completion_service.check_completion_claim(claim, config.budget)
        rows.append(_row("completion_claim_consistent", f"completion.{claim.name}", report.consistent,
                         report.checked, counterexample=report.counterexample))
    for claim in negative:
        report = completion_service.check_completion_claim(claim, config.budget)
        found = not report.consistent and report.counterexample is not None
        rows.append(_row("completion_claim_refuted", f"completion.{claim.name}", found,
                         report.checked, counterexample=report.counterexample))
    return rows


# ----------------------------------------------------------------------
# 3. DM 完備化と有向完備化
# ----------------------------------------------------------------------
def completion_comparison(config: SuiteConfig) -> List[Dict[str, Any]]:
    report = completion_service.compare_completions(fixtures.four_rows())
    rows = [_row("directed_vs_dm", "comparison.directed-vs-dm",
                 report.ts_identity and not report.t_injective and report.witness is not None,
                 ts_identity=report.ts_identity, witness=report.witness)]
    seen = set()
    checked = failed = 0
    first = None
    for L in finite_lattices(config.size("lattice_max_n")):
        key = L.canonical_key()
        if key in seen:
            continue
        seen.add(key)
        checked += 1
        cmp = completion_service.compare_completions(L)
        if not (cmp.ts_identity and cmp.t_injective and len(cmp.dm) == L.n):
            failed += 1
            first = first or L.to_json()
    rows.append(_row("finite_lattice_completions_identity", "comparison.finite-lattices", failed == 0,
                     checked, failed, first_failure=first))
    return rows


# ----------------------------------------------------------------------
# 4. カタログ錐の双対
# ----------------------------------------------------------------------
# (錐, λ, η, Mcp をもつか, 反例の鎖)
CATALOG_EXPECTATIONS = (
    ("a", 0, 1, True, None),
    ("a", 1, 1, True, None),
    ("a", "inf", 0, True, None),
    ("b", 0, 1, True, None),
    ("b", 2, 3, True, None),
    ("c", 0, 1, False, "(n, 0)"),
    ("c", 1, 0, False, "(0, n)"),
    ("c", 1, 1, True, None),
    ("c", 0, 0, True, None),
    ("d", 0, 1, False, "(n, 1 - 1/n), n ≥ 2"),
    ("d", 1, 2, True, None),
    ("e", 0, 1, True, None),
    ("e", 1, 0, False, None),
    ("f", 1, 0, True, None),
    ("f", 0, 1, False, None),
)


def catalog_classification(config: SuiteConfig) -> List[Dict[str, Any]]:
    rows = []
    for cone_id, lam, eta, expected, chain in CATALOG_EXPECTATIONS:
        result = lattice_service.catalog_cone_query(cone_id, lam, eta, config.budget, config.seed)
        witness = result["witness"]
        ok = result["has_mcp"] == expected
        if chain is not None:
            ok = ok and witness is not None and witness.get("chain") == chain
        rows.append(_row("catalog_dual", f"catalog.{cone_id}", ok, lam=str(lam), eta=str(eta),
                         expected=expected, has_mcp=result["has_mcp"], witness=witness))
    roman = lattice_service.roman_sup_check()
    rows.append(_row("lexicographic_sup", "catalog.f", roman["verdict"] == "pass",
                     smaller_upper_bound=roman["smaller_upper_bound"]))
    return rows


# ----------------------------------------------------------------------
# 5. 射影 Pr
# ----------------------------------------------------------------------
def projection(config: SuiteConfig) -> List[Dict[str, Any]]:
    report = mcp_service.projection_audit(config.size("projection_cases"), seed=config.seed)
    return _audit_rows(report, "mcp.projection")


# ----------------------------------------------------------------------
# 6. 格子法則
# ----------------------------------------------------------------------
def lattice_laws(config: SuiteConfig) -> List[Dict[str, Any]]:
    report = lattice_service.lattice_law_suite(4, config.size("lattice_cases"), config.seed)
    return _audit_rows(report, "cone.lattice-laws", "lattice_")


# ----------------------------------------------------------------------
# 7. Riesz–Kantorovich
# ----------------------------------------------------------------------
def _rk_case(seed: int) -> Dict[str, Any]:
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    cone = DiscreteCone([Fraction(rng.randint(1, 4), rng.randint(1, 3)) for _ in range(n)])
    L1, L2 = DualVector(cone, cone.random_vec(rng)), DualVector(cone, cone.random_vec(rng))
    v = cone.random_vec(rng)
    return {"n": n, "agree": extension_service.rk_join_meet(L1, L2, v).agree,
            "f1": L1.f.to_json(), "f2": L2.f.to_json(), "v": v.to_json()}


def riesz_kantorovich(config: SuiteConfig) -> List[Dict[str, Any]]:
    results = run_cases(_rk_case, [config.seed * 104729 + k for k in range(config.size("rk_cases"))])
    failures = [r for r in results if not r["agree"]]
    order = extension_service.order_coincidence_audit(seed=config.seed)
    return [
        _row("riesz_kantorovich", "extension.riesz-kantorovich", not failures, len(results), len(failures),
             first_failure=failures[0] if failures else None),
        _row("order_coincidence", "extension.order-coincidence", order["verdict"] == "pass", len(order["rows"])),
    ]


# ----------------------------------------------------------------------
# 8. 拡張と Hahn–Banach
# ----------------------------------------------------------------------
def extension(config: SuiteConfig) -> List[Dict[str, Any]]:
    rows = []
    for name, spec, bounds in fixtures.extension_instances():
        result = extension_service.extend_all(spec, bounds, budget=config.budget, seed=config.seed)
        rows.append(_row("extension_feasible", f"extension.{name}", result.passed,
                         extends=result.extends, within_bounds=result.within_bounds,
                         functional=result.functional.to_json()))
    for name, spec, bounds in fixtures.infeasible_instances():
        try:
            extension_service.check_hypothesis(spec, bounds)
            rows.append(_row("extension_infeasible", f"extension.{name}", False, witness=None))
        except HypothesisFailed as e:
            rows.append(_row("extension_infeasible", f"extension.{name}", True, witness=e.witness))
    for name, forms, basis, values in fixtures.hahn_banach_instances():
        hb = extension_service.hahn_banach(forms, basis, values, budget=config.budget, seed=config.seed)
        rows.append(_row("hahn_banach", f"extension.hahn-banach.{name}", hb.passed,
                         t_hat=[str(x) for x in hb.t_hat], lp_agrees=hb.lp_agrees))
    return rows


# ----------------------------------------------------------------------
# 9. 逆 Hölder と双対
# ----------------------------------------------------------------------
def _conjugate_pairs(exponents: Sequence[str]) -> List[Tuple[str, str]]:
    return [(p, str(LpTag.parse(p).conjugate())) for p in exponents]


def lp_duality(config: SuiteConfig) -> List[Dict[str, Any]]:
    report = norm_service.reverse_holder_audit(3, config.size("holder_cases"), config.seed,
                                               _conjugate_pairs(HOLDER_EXPONENTS))
    rows = _audit_rows(report, "lp.reverse-holder")
    cone = DiscreteCone.uniform(3)
    rng = random.Random(config.seed)
    for p in HOLDER_EXPONENTS:
        f = [Fraction(rng.randint(1, 9), rng.randint(1, 4)) for _ in range(cone.n)]
        result = norm_service.dual_attain(cone, f, p, levels=norm_service.GRID_LEVELS[:2])
        shown = result.to_dict()
        rows.append(_row("dual_attain", "lp.dual-attain", result.passed, p=p,
                         norm=shown["norm"], pairing=shown["pairing"]))
    # 0 と ∞ を含む規約のもとでの L⁰ の恒等式
    for f in ([1, 4, 2], [0, 4, 1], ["inf", 1, 2], [0, "inf", 3]):
        result = norm_service.l0_identities(cone, f, [2, 1, 3])
        rows.append(_row("l0_identities", "lp.l0", result["verdict"] == "pass", f=f))
    for p in NEGATIVE_EXPONENTS:
        result = norm_service.lp_mcp_counterexample(4, p, config.budget, config.seed)
        rows.append(_row("lp_mcp_counterexample", "lp.mcp-failure",
                         result["verdict"] == "pass" and result["jump_at_sup"], p=p,
                         chain_norms=result["chain_norms"]))
    for p in NEGATIVE_EXPONENTS + ("1/2",):
        report = norm_service.norm_law_audit(p, 3, config.size("holder_cases"), config.seed)
        rows += _audit_rows(report, "lp.norm-laws", "norm_", p=p)
    for q in ("-2", "-1", "-1/2"):
        family = norm_service.mcp_unstable_family(12, q)
        rows.append(_row("mcp_unstable_family", "lp.mcp-unstable", family["verdict"] == "pass",
                         len(family["rows"]), q=q, norms=[r["norm"] for r in family["rows"]]))
    return rows


# ----------------------------------------------------------------------
# 10. 行列の双対
# ----------------------------------------------------------------------
def matrix_duality(config: SuiteConfig) -> List[Dict[str, Any]]:
    rows = []
    dims = (2, 3, 4, 5, 6)
    # 標本数は指数と次元の全ての組で合わせて matrix_cases
    per_dim = max(1, config.size("matrix_cases") // (len(dims) * len(MATRIX_EXPONENTS)))
    rng = np.random.default_rng(config.seed)
    for p in MATRIX_EXPONENTS:
        for d in dims:
            report = matrix_service.matrix_audit(d, p, per_dim, config.seed)
            rows += _audit_rows(report, "matrix.trace-duality", "matrix_", p=p, d=d)
        for d in (3, 6):
            A = matrix_service.random_pd(d, rng)
            attain = matrix_service.matrix_dual_attain(A, p, config.size("matrix_dual_samples"), config.seed)
            rows.append(_row("matrix_dual_attain", "matrix.dual-attain", attain.passed, p=p, d=d,
                             gap=attain.pairing - attain.norm))
            equal = matrix_service.young_equality_case(A, p)
            B = matrix_service.random_pd(d, rng)
            generic = matrix_service.young_audit(A, B, p)
            flag_ok = (equal.equality and equal.tight and equal.holds and generic.holds
                       and generic.tight == generic.equality)
            rows.append(_row("matrix_young", "matrix.young", flag_ok, p=p, d=d,
                             equality_distance=equal.distance, generic_distance=generic.distance))
    for d in (2, 4, 6):
        A = matrix_service.random_pd(d, rng)
        geometric = matrix_service.matrix_p_norm(A, "0")
        det_root = float(np.linalg.det(A.array)) ** (1.0 / d)
        rows.append(_row("matrix_l0_determinant", "matrix.l0", abs(geometric - det_root) <= 1e-10 * max(1.0, det_root),
                         d=d, norm=geometric, det_root=det_root))
    return rows


# ----------------------------------------------------------------------
# 11. 三角形ノルムの双対
# ----------------------------------------------------------------------
def lorentz_duality(config: SuiteConfig) -> List[Dict[str, Any]]:
    rows = []
    for p in lorentz_service.DUAL_EXPONENTS:
        audit = lorentz_service.tri_dual_audit(p, config.size("lorentz_points"), config.seed)
        rows.append(_row("triangle_dual", "lorentz.triangle-dual", audit["verdict"] == "pass",
                         audit["checked"], audit["failed"], p=p, max_error=audit["max_error"]))
    bidual = lorentz_service.bidual_fixed_point(TriangleNorm.lp(2))
    rows.append(_row("triangle_bidual", "lorentz.bidual", bidual["verdict"] == "pass",
                     len(bidual["rows"]), max_gap=bidual["max_gap"]))
    violator = lorentz_service.bidual_fixed_point(lorentz_service.x_increasing_violator())
    rows.append(_row("triangle_bidual_gap", "lorentz.bidual", violator["witness"] is not None,
                     len(violator["rows"]), witness=violator["witness"]))
    positive = lorentz_service.positive_functional_suite("l2", 3, config.size("positive_cases"), config.seed)
    rows.append(_row("positive_functional", "lorentz.positive-functional", positive["verdict"] == "pass",
                     positive["checked"], positive["failed"]))
    return rows


# ----------------------------------------------------------------------
# 12. Minkowski の分類器
# ----------------------------------------------------------------------
def minkowski_classifier(config: SuiteConfig) -> List[Dict[str, Any]]:
    claim = lorentz_service.minkowski_claim()
    return [_row(r["family"], r["anchor"], r["consistent"], expected=r["expected"], got=r["got"],
                 tail_invariant=r["tail_invariant"]) for r in claim["rows"]]


# ----------------------------------------------------------------------
# 13. Baire の縮小
# ----------------------------------------------------------------------
def baire_shrink(config: SuiteConfig) -> List[Dict[str, Any]]:
    shrink = chrono_service.baire_shrink_report(iters=10, seed=config.seed)
    witness = chrono_service.chron_pathology_witness(Fraction(1, 2), (1, 1))
    return [
        _row("baire_shrink", "chrono.baire-shrink", shrink["verdict"] == "pass", shrink["iterations"],
             nested=shrink["nested"], common_point=shrink["common_point"]),
        _row("chronological_singleton", "chrono.singleton-open", witness["verdict"] == "pass",
             point=witness["point"], box=witness["box"]),
    ]


# ----------------------------------------------------------------------
# 14. Brunn–Minkowski
# ----------------------------------------------------------------------
def brunn_minkowski(config: SuiteConfig) -> List[Dict[str, Any]]:
    rows = _audit_rows(geometry_service.bm_suite(config.size("bm_cases"), config.seed), "geometry.brunn_minkowski")
    witness = geometry_service.distributivity_failure_witness(seed=config.seed)
    rows.append(_row("minkowski_distributivity_failure", "geometry.distributivity",
                     witness["scaled_size"] == 2 and witness["sum_size"] == 3 and witness["strict"]
                     and witness["convex_equality"],
                     scaled_size=witness["scaled_size"], sum_size=witness["sum_size"]))
    return rows


# ----------------------------------------------------------------------
# 15. 両側の障害
# ----------------------------------------------------------------------
def two_sided_obstruction(config: SuiteConfig) -> List[Dict[str, Any]]:
    demo = mcp_service.filtered_inf_demo(4)
    ok = demo["T_of_inf"] == {"num": 0, "den": 1} and demo["inf_of_T"] == "inf" and demo["filtered"]
    return [_row("filtered_inf", "mcp.filtered-inf", ok, T_of_inf=demo["T_of_inf"], inf_of_T=demo["inf_of_T"])]


SUITES: Dict[int, Callable[[SuiteConfig], List[Dict[str, Any]]]] = {
    1: closure_depths,
    2: completion_claims,
    3: completion_comparison,
    4: catalog_classification,
    5: projection,
    6: lattice_laws,
    7: riesz_kantorovich,
    8: extension,
    9: lp_duality,
    10: matrix_duality,
    11: lorentz_duality,
    12: minkowski_classifier,
    13: baire_shrink,
    14: brunn_minkowski,
    15: two_sided_obstruction,
}


def suite_ids() -> List[int]:
    return sorted(SUITES)


def run_suite(ids: Optional[Sequence[int]] = None, config: Optional[SuiteConfig] = None) -> Dict[str, Any]:
    """
    受け入れスイートを実行し、スイート ID 順に行を並べたレポートを返す

    スイートは並列に実行してよいが、行の順序は ID と各スイート内の順序で決まる。

    Args:
        ids: 実行するスイート ID (省略時は全て)
        config: 実行設定

    Returns:
        Dict[str, Any]: verdict と rows (各行に suite / family / anchor)

    Raises:
        ValidationError: 未知のスイート ID の場合
    """
    config = config or SuiteConfig()
    ids = suite_ids() if ids is None else sorted(set(int(i) for i in ids))
    unknown = [i for i in ids if i not in SUITES]
    if unknown:
        raise ValidationError(f"未知のスイート ID です: {unknown} (有効: 1〜{len(SUITES)})")

    def run_one(suite_id: int) -> List[Dict[str, Any]]:
        logger.info(f"スイート {suite_id} ({SUITES[suite_id].__name__}) を実行します")
        rows = SUITES[suite_id](config)
        return [{"suite": suite_id, **row} for row in rows]

    results = run_cases(run_one, ids)
    rows = [row for suite_rows in results for row in suite_rows]
    failed = [row for row in rows if row["verdict"] != "pass"]
    for row in failed:
        logger.warning(f"スイート {row['suite']} の {row['family']} ({row['anchor']}) が失敗しました")
    verdict = "pass" if not failed else "fail"
    logger.info(f"受け入れスイート: {len(ids)} 件, {len(rows)} 行, 失敗 {len(failed)} 行")
    return {"suites": ids, "quick": config.quick, "rows": rows, "verdict": verdict}
