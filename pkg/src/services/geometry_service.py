import logging
import random
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Set

from src.config import DEFAULT_SEED
from src.models.extreal import to_fraction
from src.models.polygon import ConvexPolygon, Point, cross, to_point
from src.services.parallel import run_cases

# ロガーの設定
logger = logging.getLogger(__name__)


def _extended(vertices: Sequence[Point]) -> List[Point]:
    return list(vertices) + list(vertices[:2])


def minkowski_sum(a: ConvexPolygon, b: ConvexPolygon) -> ConvexPolygon:
    """
    凸多角形の Minkowski 和 A ⊕ B を辺の偏角順の併合で求める

    両方とも最も下の頂点から反時計回りなので辺の偏角は [0, 2π) で単調に並ぶ。
    点・線分を含む場合は頂点和の凸包で求める。

    Args:
        a, b: 凸多角形

    Returns:
        ConvexPolygon: 和 (頂点数は |A| + |B| 以下)
    """
    if a.degenerate or b.degenerate:
        return minkowski_sum_hull(a, b)
    p, q = _extended(a.vertices), _extended(b.vertices)
    n, m = len(a.vertices), len(b.vertices)
    i = j = 0
    result: List[Point] = []
    while i < n or j < m:
        result.append((p[i][0] + q[j][0], p[i][1] + q[j][1]))
        turn = cross((Fraction(0), Fraction(0)),
                     (p[i + 1][0] - p[i][0], p[i + 1][1] - p[i][1]),
                     (q[j + 1][0] - q[j][0], q[j + 1][1] - q[j][1]))
        if turn >= 0 and i < n:
            i += 1
        if turn <= 0 and j < m:
            j += 1
    # 平行な辺は併合で同一直線上の頂点になるので凸包で落とす
    return ConvexPolygon.hull_of(result)


def minkowski_sum_hull(a: ConvexPolygon, b: ConvexPolygon) -> ConvexPolygon:
    """頂点の全ての和の凸包 (O(|A||B|) の照合用)"""
    return ConvexPolygon.hull_of((x1 + x2, y1 + y2) for x1, y1 in a.vertices for x2, y2 in b.vertices)


def homothet(a: ConvexPolygon, lam: Any, t: Any = (0, 0)) -> ConvexPolygon:
    """λA + t"""
    return a.scale(lam).translate(t)


def random_convex_polygon(rng: random.Random, points: int = 8, span: int = 12) -> ConvexPolygon:
    """格子点の乱数の凸包 (面積が正になるまで引き直す)"""
    while True:
        polygon = ConvexPolygon.hull_of(
            (Fraction(rng.randint(-span, span), rng.randint(1, 3)), Fraction(rng.randint(-span, span), rng.randint(1, 3)))
            for _ in range(points))
        if not polygon.degenerate:
            return polygon


def bm_audit(a: ConvexPolygon, b: ConvexPolygon) -> Dict[str, Any]:
    """
    Brunn–Minkowski の不等式 |A ⊕ B| ≥ (√|A| + √|B|)² を平方根なしで厳密に確かめる

    S = |A ⊕ B| に対し S − |A| − |B| ≥ 0 かつ (S − |A| − |B|)² ≥ 4|A||B| と同値。

    Returns:
        Dict[str, Any]: 面積・差・判定 (等号成立も含む)
    """
    total = minkowski_sum(a, b).area
    area_a, area_b = a.area, b.area
    excess = total - area_a - area_b
    lhs, rhs = excess * excess, 4 * area_a * area_b
    holds = excess >= 0 and lhs >= rhs
    return {
        "area_a": str(area_a), "area_b": str(area_b), "area_sum": str(total),
        "excess": str(excess), "excess_squared": str(lhs), "four_ab": str(rhs),
        "holds": holds, "equality": holds and lhs == rhs,
    }


def _bm_case(seed: int) -> Dict[str, Any]:
    rng = random.Random(seed)
    a, b = random_convex_polygon(rng), random_convex_polygon(rng)
    result = bm_audit(a, b)
    result["merge_matches_hull"] = minkowski_sum(a, b) == minkowski_sum_hull(a, b)
    result["a"], result["b"] = a.to_json(), b.to_json()
    return result


def bm_suite(cases: int = 200, seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """乱数の凸多角形の組と相似な組で Brunn–Minkowski を確かめる"""
    results = run_cases(_bm_case, [seed * 7919 + i for i in range(cases)])
    failures = [r for r in results if not (r["holds"] and r["merge_matches_hull"])]
    rng = random.Random(seed)
    homothets = []
    for _ in range(10):
        a = random_convex_polygon(rng)
        lam = Fraction(rng.randint(1, 6), rng.randint(1, 3))
        b = homothet(a, lam, (rng.randint(-5, 5), rng.randint(-5, 5)))
        homothets.append(bm_audit(a, b)["equality"])
    rows = [
        {"family": "brunn_minkowski", "anchor": "geometry.brunn_minkowski", "checked": len(results),
         "failed": len(failures), "first_failure": failures[0] if failures else None},
        {"family": "brunn_minkowski_homothet_equality", "anchor": "geometry.brunn_minkowski",
         "checked": len(homothets), "failed": homothets.count(False)},
    ]
    verdict = "pass" if all(r["failed"] == 0 for r in rows) else "fail"
    logger.info(f"Brunn–Minkowski: {len(results)} 組, 違反 {len(failures)} 件")
    return {"rows": rows, "verdict": verdict}


def _point_sum(xs: Set[Point], ys: Set[Point]) -> Set[Point]:
    return {(a[0] + b[0], a[1] + b[1]) for a in xs for b in ys}


def _point_scale(lam: Fraction, xs: Set[Point]) -> Set[Point]:
    return {(lam * x, lam * y) for x, y in xs}


def distributivity_failure_witness(points: Optional[Sequence[Any]] = None, lam: Any = 1, eta: Any = 1,
                                   samples: int = 20, seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """
    (λ + η)A ⊆ λA + ηA が凸でない有限集合では真の包含になることを示す

    既定の A = {0, e₁} では |2A| = 2 < 3 = |A + A|。凸多角形では等号が成り立つことを
    乱数の多角形で確かめる。
    """
    lam, eta = to_fraction(lam), to_fraction(eta)
    base = {to_point(p) for p in (points or [(0, 0), (1, 0)])}
    scaled = _point_scale(lam + eta, base)
    summed = _point_sum(_point_scale(lam, base), _point_scale(eta, base))
    rng = random.Random(seed)
    convex_equal = []
    for _ in range(samples):
        a = random_convex_polygon(rng)
        l1, l2 = Fraction(rng.randint(1, 5), rng.randint(1, 3)), Fraction(rng.randint(1, 5), rng.randint(1, 3))
        convex_equal.append(a.scale(l1 + l2) == minkowski_sum(a.scale(l1), a.scale(l2)))
    enc = sorted([str(x), str(y)] for x, y in scaled)
    return {
        "set": sorted([str(x), str(y)] for x, y in base),
        "scaled": enc,
        "sum": sorted([str(x), str(y)] for x, y in summed),
        "scaled_size": len(scaled),
        "sum_size": len(summed),
        "contained": scaled <= summed,
        "strict": scaled < summed,
        "convex_equality": all(convex_equal),
        "convex_checked": len(convex_equal),
    }


def minkowski_law_audit(cases: int = 50, seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """Minkowski 和の可換律・結合律と {0} が単位元であることを確かめる"""
    rng = random.Random(seed)
    origin = ConvexPolygon.hull_of([(0, 0)])
    counts = {"commutative": 0, "associative": 0, "identity": 0}
    for _ in range(cases):
        a, b, c = (random_convex_polygon(rng) for _ in range(3))
        counts["commutative"] += minkowski_sum(a, b) != minkowski_sum(b, a)
        counts["associative"] += minkowski_sum(minkowski_sum(a, b), c) != minkowski_sum(a, minkowski_sum(b, c))
        counts["identity"] += minkowski_sum(a, origin) != a
    rows = [{"family": f"minkowski_{law}", "anchor": "geometry.minkowski_sum", "checked": cases, "failed": bad}
            for law, bad in counts.items()]
    return {"rows": rows, "verdict": "pass" if all(r["failed"] == 0 for r in rows) else "fail"}


def bm_report(a: ConvexPolygon, b: ConvexPolygon) -> Dict[str, Any]:
    total = minkowski_sum(a, b)
    result = bm_audit(a, b)
    result.update({"a": a.to_dict(), "b": b.to_dict(), "minkowski_sum": total.to_dict(),
                   "verdict": "pass" if result["holds"] else "fail"})
    return result
