import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.config import DEFAULT_SEED
from src.models.cone import ConeVec, DiscreteCone, cone_inf, cone_sup
from src.models.errors import EmptyOpen, NotComparable, ValidationError
from src.models.extreal import INF, ExtNonneg, to_fraction
from src.models.norms import LpTag
from src.services.norm_service import lp_norm
from src.services.parallel import run_cases

# ロガーの設定
logger = logging.getLogger(__name__)

# 法則の確認に使うノルム
LAW_TAGS = ("1", "1/2", "-1", "-inf", "0+")


@dataclass
class ChronInstance:
    """双曲ノルム hn を備えた離散錐 (v ≪ w ⇔ hn(w ⊖ v) > 0)"""
    cone: DiscreteCone
    tag: LpTag

    @classmethod
    def of(cls, mu: Sequence[Any], tag: Any) -> "ChronInstance":
        return cls(DiscreteCone(mu), tag if isinstance(tag, LpTag) else LpTag.parse(str(tag)))

    def hn(self, v: ConeVec) -> Any:
        return lp_norm(self.cone, v, self.tag)

    def positive(self, v: ConeVec) -> bool:
        value = self.hn(v)
        if isinstance(value, ExtNonneg):
            return not value.is_zero
        return value > 0

    def rel(self, v: ConeVec, w: ConeVec) -> bool:
        """
        v ≪ w を判定する

        v + z = w となる z の最大は格子差 w ⊖ v なので hn(w ⊖ v) > 0 で決まる。

        Raises:
            NotComparable: v ≰ w の場合
        """
        return self.positive(w.minus(v))

    def below(self, v: ConeVec, w: ConeVec) -> bool:
        """v ≪ w (比較不能なら False)"""
        try:
            return self.rel(v, w)
        except NotComparable:
            return False

    def to_dict(self) -> Dict[str, Any]:
        return {"mu": [str(m) for m in self.cone.mu], "tag": str(self.tag)}


def chron_rel(instance: ChronInstance, v: ConeVec, w: ConeVec) -> bool:
    return instance.rel(v, w)


# ----------------------------------------------------------------------
# ≪ の法則
# ----------------------------------------------------------------------
def _law_case(args: Tuple[ChronInstance, int]) -> Dict[str, List[bool]]:
    instance, seed = args
    rng = random.Random(seed)
    cone = instance.cone

    def vec(rate: float = 0.15) -> ConeVec:
        return cone.random_vec(rng, inf_rate=rate)

    v, d1, d2 = vec(), vec(), vec()
    w = v + d1
    z = w + d2
    out: Dict[str, List[bool]] = {name: [] for name in
                                  ("push_up_left", "push_up_right", "transitive", "contained_in_leq",
                                   "scaling", "cancellation", "cancellation_eps_free")}
    # v ≤ w ≪ z ⇒ v ≪ z / v ≪ w ≤ z ⇒ v ≪ z
    if instance.rel(w, z):
        out["push_up_left"].append(instance.rel(v, z))
    if instance.rel(v, w):
        out["push_up_right"].append(instance.rel(v, z))
        if instance.rel(w, z):
            out["transitive"].append(instance.rel(v, z))
        lam = Fraction(rng.randint(1, 9), rng.randint(1, 4))
        out["scaling"].append(instance.rel(v.scale(lam), w.scale(lam)))
    x, y = vec(), vec()
    if instance.below(x, y):
        out["contained_in_leq"].append(x <= y)
    # a + v ≪ b + v ⇒ a + εv ≪ b + εv
    a, shift = vec(), vec(0.3)
    b = a + vec()
    if instance.rel(a + shift, b + shift):
        out["cancellation"].append(instance.rel(a + shift.eps(), b + shift.eps()))
        if shift.is_finite:
            out["cancellation_eps_free"].append(instance.rel(a, b))
    return out


def chron_laws(samples: int = 1000, n: int = 3, tags: Sequence[Any] = LAW_TAGS,
               seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """
    ≪ の押し上げ・推移律・スケーリング・キャンセル則を乱数の三つ組で確認する

    Args:
        samples: ノルムごとの標本数
        n: 錐の次元
        tags: 確認するノルム
        seed: 乱数シード

    Returns:
        Dict[str, Any]: 法則ごとの行と判定
    """
    rows = []
    for tag in tags:
        instance = ChronInstance(DiscreteCone.uniform(n), LpTag.parse(str(tag)))
        results = run_cases(_law_case, [(instance, seed * 100_003 + i) for i in range(samples)])
        merged: Dict[str, List[bool]] = {}
        for result in results:
            for law, checks in result.items():
                merged.setdefault(law, []).extend(checks)
        for law, checks in merged.items():
            rows.append({"family": f"chronological_{law}", "tag": str(tag), "checked": len(checks),
                         "failed": checks.count(False)})
    failed = sum(r["failed"] for r in rows)
    logger.info(f"≪ の法則: {len(rows)} 行, 違反 {failed} 件")
    return {"rows": rows, "verdict": "pass" if failed == 0 else "fail"}


# ----------------------------------------------------------------------
# 基本開集合と菱形の縮小
# ----------------------------------------------------------------------
@dataclass
class BasicOpenSpec:
    """U((v_i); (w_j)) = ∩ I⁺(v_i) ∩ ∩ I⁻(w_j)"""
    instance: ChronInstance
    lower: List[ConeVec] = field(default_factory=list)
    upper: List[ConeVec] = field(default_factory=list)

    def __post_init__(self) -> None:
        n = self.instance.cone.n
        for v in self.lower + self.upper:
            if len(v) != n:
                raise ValidationError(f"ベクトルの長さ {len(v)} が次元 {n} と一致しません")

    def contains(self, x: ConeVec) -> bool:
        return all(self.instance.below(v, x) for v in self.lower) and \
            all(self.instance.below(x, w) for w in self.upper)

    def bounds(self) -> Tuple[ConeVec, ConeVec]:
        """v = sup v_i (空なら 0)、w = inf w_j (空なら ∞)"""
        n = self.instance.cone.n
        v = cone_sup(self.lower) if self.lower else ConeVec.zeros(n)
        w = cone_inf(self.upper) if self.upper else ConeVec.infinite(n)
        return v, w

    def to_json(self) -> Dict[str, Any]:
        return {"instance": self.instance.to_dict(), "v": [v.to_json() for v in self.lower],
                "w": [w.to_json() for w in self.upper]}


def in_diamond(x: ConeVec, lo: ConeVec, hi: ConeVec) -> bool:
    """J(lo, hi) = {x : lo ≤ x ≤ hi}"""
    return lo <= x <= hi


@dataclass
class ShrinkStep:
    v: ConeVec
    w: ConeVec
    v_bar: ConeVec
    w_bar: ConeVec
    shrunk: BasicOpenSpec
    midpoint: ConeVec
    certificates: Dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.certificates.values())

    def to_dict(self) -> Dict[str, Any]:
        return {"v": self.v.to_json(), "w": self.w.to_json(), "v_bar": self.v_bar.to_json(),
                "w_bar": self.w_bar.to_json(), "midpoint": self.midpoint.to_json(),
                "shrunk": self.shrunk.to_json(), "certificates": self.certificates, "passed": self.passed}


def diamond_shrink(spec: BasicOpenSpec, witness: Optional[ConeVec] = None) -> ShrinkStep:
    """
    空でない基本開集合 U に含まれ、内部が空でない菱形 J(v̄, w̄) を作る

    v̄ = v + z/3、w̄ = v + 2z/3 (z = w ⊖ v)、縮小した開集合は ṽ_i = v_i + z/3、
    w̃_j = w_j ⊖ z/3。証明書はすべて厳密な有理数演算で確かめる。

    Args:
        spec: 基本開集合
        witness: U の点 (省略時は v_i ≪ w と v ≪ w_j から非空性を判定する)

    Returns:
        ShrinkStep: 縮小の結果と証明書

    Raises:
        EmptyOpen: U が空の場合
        ValidationError: witness が U に属さない場合
    """
    instance = spec.instance
    if witness is not None and not spec.contains(witness):
        raise ValidationError(f"{witness} は基本開集合に属しません")
    v, w = spec.bounds()
    vwi = all(instance.below(vi, w) for vi in spec.lower) and all(instance.below(v, wj) for wj in spec.upper)
    if not vwi:
        raise EmptyOpen("v_i ≪ inf w_j または sup v_i ≪ w_j が成り立たないため開集合は空です")
    z = w.minus(v)
    third = z.scale(Fraction(1, 3))
    v_bar = v + third
    w_bar = v + z.scale(Fraction(2, 3))
    lower = [vi + third for vi in spec.lower]
    upper = [wj.minus(third) for wj in spec.upper]
    shrunk = BasicOpenSpec(instance, lower, upper)
    midpoint = v + z.scale(Fraction(1, 2))
    lo, hi = shrunk.bounds()
    certificates = {
        "nonempty": spec.contains(midpoint) or not (spec.lower or spec.upper),
        "lower_below_v_bar": all(instance.below(vi, v_bar) for vi in spec.lower),
        "w_bar_below_upper": all(instance.below(w_bar, wj) for wj in spec.upper),
        "diamond_inside": not spec.lower or lo == v_bar,
        "shrunk_upper_bound": not spec.upper or lo <= hi and hi <= w_bar,
        "eps_bookkeeping": not spec.upper or hi + third == w,
        "midpoint_in_shrunk": shrunk.contains(midpoint),
    }
    step = ShrinkStep(v, w, v_bar, w_bar, shrunk, midpoint, certificates)
    if not step.passed:
        logger.warning(f"縮小の証明書が成り立ちません: {certificates}")
    return step


def shrink_iterate(spec: BasicOpenSpec, iters: int = 10) -> Dict[str, Any]:
    """
    縮小を繰り返し、入れ子の菱形の列と共通点を証明する

    共通点は最後の v̄ (v̄ の列は単調増加なのでその上限の有限近似)。

    Returns:
        Dict[str, Any]: 各段の証明書・入れ子性・共通点
    """
    steps: List[ShrinkStep] = []
    current = spec
    for _ in range(iters):
        step = diamond_shrink(current)
        steps.append(step)
        current = step.shrunk
    nested = all(a.v_bar <= b.v_bar and b.w_bar <= a.w_bar for a, b in zip(steps, steps[1:]))
    common = steps[-1].v_bar if steps else None
    in_all = common is not None and all(in_diamond(common, s.v_bar, s.w_bar) for s in steps)
    passed = nested and in_all and all(s.passed for s in steps)
    logger.info(f"菱形の縮小 {iters} 回: 入れ子 {nested}, 共通点 {in_all}")
    return {
        "iterations": len(steps),
        "steps": [s.to_dict() for s in steps],
        "nested": nested,
        "common_point": common.to_json() if common is not None else None,
        "common_point_in_all": in_all,
        "verdict": "pass" if passed else "fail",
    }


def random_open_spec(instance: ChronInstance, rng: random.Random, lower: int = 2, upper: int = 2) -> BasicOpenSpec:
    """空でない基本開集合を乱数で作る (w_j は sup v_i に正の余裕を足して作る)"""
    cone = instance.cone
    vs = [cone.random_vec(rng, inf_rate=0.0) for _ in range(lower)]
    top = cone_sup(vs) if vs else cone.zero()
    ws = []
    for _ in range(upper):
        pad = [INF if rng.random() < 0.1 else ExtNonneg(Fraction(rng.randint(1, 9), rng.randint(1, 3)))
               for _ in range(cone.n)]
        ws.append(top + ConeVec(pad))
    return BasicOpenSpec(instance, vs, ws)


def baire_shrink_report(spec: Optional[BasicOpenSpec] = None, iters: int = 10,
                        seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    if spec is None:
        instance = ChronInstance(DiscreteCone.uniform(3), LpTag.parse("1"))
        spec = random_open_spec(instance, random.Random(seed))
    result = shrink_iterate(spec, iters)
    result["spec"] = spec.to_json()
    return result


# ----------------------------------------------------------------------
# [0,∞]² と ‖·‖_p (0 < p < 1) の一点開集合
# ----------------------------------------------------------------------
def _pair(a: ExtNonneg, b: ExtNonneg) -> ConeVec:
    return ConeVec([a, b])


def chron_pathology_witness(p: Any = Fraction(1, 2), point: Tuple[Any, Any] = (1, 1)) -> Dict[str, Any]:
    """
    ([0,∞]², ‖·‖_p) で一点集合 {(a,b)} が時間的半空間の有限個の共通部分であることを示す

    a, b > 0 の有限値では I⁻((a',b)) ∩ I⁻((a,b')) ∩ I⁺((a'',b)) ∩ I⁺((a,b'')) を使う。
    (a,b) ≪ (a,b) となる点 (∞ 座標をもつ点) では I⁺((a,b)) ∩ I⁻((a,b)) を使う。
    共通部分の元 x は sup(下側の点) ≤ x ≤ inf(上側の点) を満たすので、
    この箱が (a,b) 一点であれば一点集合が証明される。
    """
    p = to_fraction(p)
    if not 0 < p < 1:
        raise ValidationError(f"p は (0,1) の範囲で指定してください: {p}")
    instance = ChronInstance(DiscreteCone([1, 1]), LpTag("power", p))
    a, b = ExtNonneg(point[0]), ExtNonneg(point[1])
    x = _pair(a, b)
    lower: List[ConeVec] = []
    upper: List[ConeVec] = []
    if instance.below(x, x):
        lower, upper = [x], [x]
    else:
        upper = [_pair(a + 1, b), _pair(a, b + 1)]
        if not a.is_zero:
            lower.append(_pair(a / 2, b))
        if not b.is_zero:
            lower.append(_pair(a, b / 2))
    spec = BasicOpenSpec(instance, lower, upper)
    lo = cone_sup(lower) if lower else ConeVec.zeros(2)
    hi = cone_inf(upper)
    member = spec.contains(x)
    singleton = member and lo == x == hi
    if not singleton:
        logger.warning(f"{x} では半空間の共通部分が一点になりません (箱 {lo} – {hi})")
    return {
        "p": str(p),
        "point": x.to_json(),
        "lower": [v.to_json() for v in lower],
        "upper": [w.to_json() for w in upper],
        "member": member,
        "box": {"lo": lo.to_json(), "hi": hi.to_json()},
        "singleton": singleton,
        "self_below": instance.below(x, x),
        "verdict": "pass" if singleton else "fail",
    }


def diamond_open_grid(p: Any = Fraction(1, 2), values: Sequence[Any] = (0, 1, 2, "inf")) -> List[Dict[str, Any]]:
    """格子上の各点で J((a,b),(a,b)) が開集合かどうかの一覧"""
    rows = []
    for a in values:
        for b in values:
            result = chron_pathology_witness(p, (a, b))
            rows.append({"family": "chronological_singleton", "point": result["point"],
                         "singleton": result["singleton"], "self_below": result["self_below"]})
    return rows