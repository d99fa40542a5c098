import logging
import random
from fractions import Fraction
from typing import Any, Dict, List, Sequence, Tuple

from src.config import CHAIN_LENGTH, DEFAULT_SEED, SAMPLED_CHAINS
from src.models.catalog_cone import CatalogCone
from src.models.cone import AffineChain, ConeVec, DiscreteCone, cone_inf, cone_sup
from src.models.errors import NotComparable, PreconditionFailed, ValidationError
from src.models.extreal import INF, ZERO, ExtNonneg
from src.services.mcp_service import catalog_functional_map, check_mcp
from src.services.parallel import run_cases

# ロガーの設定
logger = logging.getLogger(__name__)

# 1/n 型の判定で使う n の範囲
SCALE_STEPS = 8


# ----------------------------------------------------------------------
# 基本演算
# ----------------------------------------------------------------------
def cone_ops(v: ConeVec, w: ConeVec, lam: Any = 1) -> Dict[str, Any]:
    """
    v + w, λv, v∧w, v∨w, εv, ∞v と (v ≤ w なら) w − v を返す

    Raises:
        NotComparable: v ≰ w の場合 (差のみ)
    """
    lam_e = lam if isinstance(lam, ExtNonneg) else ExtNonneg(lam)
    if lam_e.is_inf:
        raise ValidationError("スカラーは有限である必要があります (∞v は別に返します)")
    return {
        "sum": v + w,
        "scalar": v.scale(lam_e),
        "meet": v.meet(w),
        "join": v.join(w),
        "eps": v.eps(),
        "infinity": v.scale(INF),
        "difference": w.minus(v),
    }


def min_difference(w: ConeVec, v: ConeVec) -> ConeVec:
    """v + z = w を満たす最小の z (∞ − ∞ の座標は 0)"""
    if not v <= w:
        raise NotComparable(f"{v} ≰ {w} のため差を取れません")
    return ConeVec(ZERO if a == b else a.minus(b) for a, b in zip(w, v))


# ----------------------------------------------------------------------
# 分解
# ----------------------------------------------------------------------
def decomposition_witness(v1: ConeVec, v2: ConeVec, w1: ConeVec, w2: ConeVec) -> Dict[str, Any]:
    """
    v1 + v2 = w1 + w2 のとき z11 = v1∧w1, z22 = v2∧w2, z12 = v1 − z11, z21 = v2 − z22 を返す

    z11 + z12 = v1, z21 + z22 = v2, z11 + z21 + εw2 ≥ w1, z12 + z22 + εw1 ≥ w2 を確認する。

    Raises:
        PreconditionFailed: v1 + v2 ≠ w1 + w2 の場合
    """
    if v1 + v2 != w1 + w2:
        raise PreconditionFailed(f"v1 + v2 = {v1 + v2} と w1 + w2 = {w1 + w2} が一致しません")
    z11 = v1.meet(w1)
    z22 = v2.meet(w2)
    z12 = v1.minus(z11)
    z21 = v2.minus(z22)
    relations = {
        "row1": z11 + z12 == v1,
        "row2": z21 + z22 == v2,
        "col1": z11 + z21 + w2.eps() >= w1,
        "col2": z12 + z22 + w1.eps() >= w2,
    }
    return {"z11": z11, "z12": z12, "z21": z21, "z22": z22, "relations": relations,
            "holds": all(relations.values())}


def decomposition_four(v1: ConeVec, v2: ConeVec, w1: ConeVec, w2: ConeVec) -> Dict[str, Any]:
    """
    v1 + v2 = w1 + w2 のとき z11 + z12 = v1, z21 + z22 = v2 + εv1, z11 + z21 = w1,
    z12 + z22 = w2 + εw1 を満たす z_ij を構成する

    z11 = v1∧w1 から始め、z22 = ((v2 + εv1) − z21) + εw1 とおく。
    """
    if v1 + v2 != w1 + w2:
        raise PreconditionFailed(f"v1 + v2 = {v1 + v2} と w1 + w2 = {w1 + w2} が一致しません")
    z11 = v1.meet(w1)
    z12 = v1.minus(z11)
    z21 = w1.minus(z11)
    z22 = (v2 + v1.eps()).minus(z21) + w1.eps()
    relations = {
        "row1": z11 + z12 == v1,
        "row2": z21 + z22 == v2 + v1.eps(),
        "col1": z11 + z21 == w1,
        "col2": z12 + z22 == w2 + w1.eps(),
    }
    return {"z11": z11, "z12": z12, "z21": z21, "z22": z22, "relations": relations,
            "holds": all(relations.values())}


def decomposition_one(v: ConeVec, w1: ConeVec, w2: ConeVec) -> Tuple[ConeVec, ConeVec]:
    """
    v ≤ w1 + w2 のとき v = v1 + v2 (v_i ≤ w_i) と分解する

    Raises:
        PreconditionFailed: v ≰ w1 + w2 の場合
    """
    if not v <= w1 + w2:
        raise PreconditionFailed(f"{v} ≰ w1 + w2 = {w1 + w2}")
    v1 = v.meet(w1)
    v2 = min_difference(v, v1)
    if not (v1 + v2 == v and v1 <= w1 and v2 <= w2):
        raise RuntimeError("分解の構成が不正です")
    return v1, v2


# ----------------------------------------------------------------------
# 有向分解性 (鎖の分割)
# ----------------------------------------------------------------------
def _ddp_pair(x: ExtNonneg, g: ExtNonneg, h: ExtNonneg) -> Tuple[ExtNonneg, ExtNonneg, int]:
    """座標ごとの4通りの場合分け (G, H, 場合番号)"""
    if not g.is_inf:
        G = min(g, x)
        return G, x.minus(G), 1 if not h.is_inf else 2
    if not h.is_inf:
        H = min(h, x)
        return x.minus(H), H, 3
    half = x / 2
    return half, half, 4


def ddp_split(chain: AffineChain, g: ConeVec, h: ConeVec, length: int = CHAIN_LENGTH) -> Dict[str, Any]:
    """
    上限 v の鎖と v = g + h から上限 g, h の鎖 G, H (G + H = 各項) を作る

    上限は座標ごとの分割写像が [0,∞] 上で連続かつ単調なので、鎖の厳密な上限での値として求める。

    Raises:
        PreconditionFailed: g + h が鎖の上限と一致しない場合
    """
    v = chain.sup()
    if g + h != v:
        raise PreconditionFailed(f"g + h = {g + h} が鎖の上限 {v} と一致しません")

    def split(x: ConeVec) -> Tuple[ConeVec, ConeVec, List[int]]:
        parts = [_ddp_pair(xi, gi, hi) for xi, gi, hi in zip(x, g, h)]
        return ConeVec(p[0] for p in parts), ConeVec(p[1] for p in parts), [p[2] for p in parts]

    terms = chain.terms(length)
    G_terms, H_terms = [], []
    sums_ok = True
    for x in terms:
        G, H, _ = split(x)
        G_terms.append(G)
        H_terms.append(H)
        sums_ok = sums_ok and G + H == x
    G_sup, H_sup, cases = split(v)
    monotone = all(a <= b for a, b in zip(G_terms, G_terms[1:])) and all(
        a <= b for a, b in zip(H_terms, H_terms[1:]))
    result = {
        "cases": cases,
        "G": [x.to_json() for x in G_terms[:4]],
        "H": [x.to_json() for x in H_terms[:4]],
        "sums": sums_ok,
        "monotone": monotone,
        "sup_G": G_sup.to_json(),
        "sup_H": H_sup.to_json(),
        "sups_match": G_sup == g and H_sup == h,
    }
    result["holds"] = sums_ok and monotone and result["sups_match"]
    return result


# ----------------------------------------------------------------------
# 格子法則の標本検査
# ----------------------------------------------------------------------
def _eps_cancellation(a: ConeVec, b: ConeVec, v: ConeVec) -> bool:
    return (a + v <= b + v) == (a + v.eps() <= b + v.eps())


def _scaled_cancellation(a: ConeVec, b: ConeVec, v: ConeVec) -> bool:
    lhs = a + v <= b + v
    rhs = all(a + v.scale(Fraction(1, n)) <= b + v.scale(Fraction(1, n)) for n in range(1, SCALE_STEPS + 1))
    return lhs == rhs


def _quasi_eps_max(v: ConeVec, w: ConeVec) -> bool:
    """max {z : w ≤ z ≤ w + v/n ∀n} = w + ε(w + v) を座標ごとに確認する"""
    z = w + (w + v).eps()
    if not w <= z:
        return False
    if not all(z <= w + v.scale(Fraction(1, n)) for n in range(1, SCALE_STEPS + 1)):
        return False
    # 有限座標を増やすと十分大きな n で上界を外れる
    for i, (zi, vi) in enumerate(zip(z, v)):
        if zi.is_inf:
            continue
        n = int(vi.value) + 2
        if not zi + 1 > w[i] + vi / n:
            return False
    return True


def _distributivity_two(family: Sequence[ConeVec], y: ConeVec) -> bool:
    left = cone_sup([x.meet(y) for x in family])
    middle = cone_sup(list(family)).meet(y)
    right = left + y.join(cone_sup(list(family))).eps()
    return left <= middle <= right


def _sample_case(args: Tuple[DiscreteCone, int]) -> Dict[str, bool]:
    cone, seed = args
    rng = random.Random(seed)
    x, y, z, w = (cone.random_vec(rng) for _ in range(4))
    lam = Fraction(rng.randint(0, 6), rng.randint(1, 3))
    family = [cone.random_vec(rng) for _ in range(3)]
    checks: Dict[str, bool] = {}
    checks["distributivity_i"] = (x + y).meet(z) <= x.meet(z) + y.meet(z)
    checks["modularity"] = x + y == x.join(y) + x.meet(y)
    # x + y = z' + w' となる組でのモジュラー性
    zp, wp = decomposition_one(x + y, x.join(y), x.meet(y) + y)
    checks["modularity_general"] = x + y == x.join(zp) + y.meet(wp)
    checks["distributivity_ii"] = _distributivity_two(family, y)
    checks["eps_additive"] = (x + y).eps() == x.eps() + y.eps()
    checks["cancellation_scaled"] = _scaled_cancellation(x, y, z)
    checks["cancellation_eps"] = _eps_cancellation(x, y, z)
    checks["quasi_eps_max"] = _quasi_eps_max(x, y)
    checks["decomposition_ii"] = decomposition_witness(x, y, *decomposition_one(x + y, z + x, y + w))["holds"]
    checks["decomposition_i"] = decomposition_four(x, y, *decomposition_one(x + y, z + x, y + w))["holds"]
    lo, hi = x.meet(y), x.join(y)
    checks["eps_difference"] = hi.minus(lo).eps() == hi.eps()
    checks["difference_linear"] = (
        hi.minus(lo).scale(lam) + (x + y).minus(x) == (hi.scale(lam) + x + y).minus(lo.scale(lam) + x))
    checks["sup_scaling"] = cone_sup([f.scale(lam) for f in family]) == cone_sup(family).scale(lam)
    checks["sup_translation"] = cone_sup([w + f for f in family]) == w + cone_sup(family)
    checks["inf_translation"] = cone_inf([w + f for f in family]) == w + cone_inf(family)
    return checks


def lattice_law_suite(n: int = 4, cases: int = 200, seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """
    離散錐上で格子法則を無作為な元で厳密に確かめる

    Args:
        n: 次元
        cases: 標本数
        seed: 乱数シード

    Returns:
        Dict[str, Any]: 法則ごとの成立件数と最初の失敗例
    """
    if n < 1 or cases < 1:
        raise ValidationError(f"次元と標本数は正である必要があります: n={n}, cases={cases}")
    rng = random.Random(seed)
    cone = DiscreteCone([Fraction(rng.randint(1, 4), rng.randint(1, 3)) for _ in range(n)])
    results = run_cases(_sample_case, [(cone, seed * 100003 + k) for k in range(cases)])
    rows = []
    for family in results[0]:
        failures = [k for k, r in enumerate(results) if not r[family]]
        rows.append({"family": family, "checked": cases, "failed": len(failures),
                     "first_failure": failures[0] if failures else None})
    verdict = "pass" if all(r["failed"] == 0 for r in rows) else "fail"
    logger.info(f"格子法則: {len(rows)} 種 × {cases} 件 ({verdict})")
    return {"n": n, "mu": cone.to_json()["mu"], "rows": rows, "verdict": verdict}


def wedge_axioms(n: int = 3, samples: int = 64, seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """
    離散錐の楔の公理 (和の可換モノイド、スカラー倍の法則、反対称性、v = sup_{η<1} ηv) を確かめる
    """
    rng = random.Random(seed)
    cone = DiscreteCone([Fraction(rng.randint(1, 4), rng.randint(1, 3)) for _ in range(n)])
    counts: Dict[str, int] = {}

    def record(name: str, ok: bool) -> None:
        counts.setdefault(name, 0)
        if not ok:
            counts[name] += 1

    zero = cone.zero()
    for _ in range(samples):
        u, v, w = (cone.random_vec(rng) for _ in range(3))
        lam = Fraction(rng.randint(0, 5), rng.randint(1, 3))
        eta = Fraction(rng.randint(0, 5), rng.randint(1, 3))
        record("commutative", u + v == v + u)
        record("associative", (u + v) + w == u + (v + w))
        record("identity", u + zero == u)
        record("scalar_compose", v.scale(eta).scale(lam) == v.scale(lam * eta))
        record("scalar_zero", v.scale(0) == zero)
        record("scalar_one", v.scale(1) == v)
        record("scalar_sum", v.scale(lam + eta) == v.scale(lam) + v.scale(eta))
        record("scalar_distributes", (v + w).scale(lam) == v.scale(lam) + w.scale(lam))
        record("antisymmetric", not (u <= v and v <= u) or u == v)
        record("sup_below_one", _sup_below_one(v))
    rows = [{"family": k, "checked": samples, "failed": c} for k, c in counts.items()]
    verdict = "pass" if all(c == 0 for c in counts.values()) else "fail"
    return {"rows": rows, "verdict": verdict}


def _sup_below_one(v: ConeVec) -> bool:
    """v は {ηv : η < 1} の上界であり、有限座標を δ 下げた元は上界でない"""
    if not all(v.scale(Fraction(k, k + 1)) <= v for k in range(1, SCALE_STEPS + 1)):
        return False
    for i, vi in enumerate(v):
        if vi.is_inf or vi.is_zero:
            continue
        delta = vi.value / 3
        eta = 1 - delta / (2 * vi.value)
        if not eta * vi.value > vi.value - delta:
            return False
    return True


# ----------------------------------------------------------------------
# カタログ錐
# ----------------------------------------------------------------------
def catalog_cone_query(cone_id: str, lam: Any, eta: Any, budget: int = SAMPLED_CHAINS,
                       seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """
    カタログ錐上の L_{λ,η} が双対の元か、Mcp をもつかを判定する

    a〜d は鎖による Mcp 検査 (反例は登録済みの鎖が先)、e, f は正値性で判定する。
    e では上限をもつ鎖は最終的に定数なので Mcp は自明に成り立つ。

    Raises:
        UnknownCatalogId: 未知の ID の場合
    """
    C = CatalogCone(cone_id)
    result: Dict[str, Any] = {"id": cone_id, "description": C.description,
                              "lambda": str(lam), "eta": str(eta)}
    if C.extended:
        report = check_mcp(catalog_functional_map(cone_id, lam, eta), budget, seed)
        result["is_cone_element_functional"] = report.passed
        result["has_mcp"] = report.passed
        result["witness"] = report.counterexample
        result["budget_relative"] = report.passed
        return result
    negative = C.positivity_witness(lam, eta)
    positive = negative is None
    result["is_cone_element_functional"] = positive
    result["has_mcp"] = positive
    result["witness"] = None if positive else {"kind": "negative-value", "element": C.render(negative),
                                               "value": str(C.functional(lam, eta)(negative))}
    result["budget_relative"] = False
    return result


def roman_sup_check(samples: int = SCALE_STEPS) -> Dict[str, Any]:
    """
    辞書式順序の楔で (1,0) が {λ(1,0) : λ < 1} の上界だが最小ではないことを示す

    離散錐では v = sup_{η<1} ηv が成り立つことを対比として確かめる。
    """
    C = CatalogCone("f")
    family = [(Fraction(k, k + 1), Fraction(0)) for k in range(1, samples + 1)]
    top = (Fraction(1), Fraction(0))
    lower = (Fraction(1), Fraction(-1))
    is_upper = all(C.leq(x, top) for x in family)
    lower_is_upper = all(C.leq(x, lower) for x in family)
    below = C.leq(lower, top) and lower != top
    rng = random.Random(DEFAULT_SEED)
    cone = DiscreteCone([1, 1, 1])
    contrast = all(_sup_below_one(cone.random_vec(rng)) for _ in range(samples))
    verdict = is_upper and lower_is_upper and below and contrast
    return {
        "upper_bound": is_upper,
        "smaller_upper_bound": C.render(lower),
        "smaller_is_upper_bound": lower_is_upper,
        "smaller_below_top": below,
        "is_least": not (lower_is_upper and below),
        "discrete_cone_contrast": contrast,
        "verdict": "pass" if verdict else "fail",
    }


