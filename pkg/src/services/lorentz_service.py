import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config import DEFAULT_SEED, TOL_LORENTZ, TOL_MATRIX, TOL_RELATIVE
from src.models.errors import Inconclusive, NotCausal, NotMonotone, NotSummable, ValidationError
from src.models.extreal import to_fraction
from src.models.lorentz import (CausalPoint, RaySequence, TriangleNorm, banach_norm, check_banach,
                                dual_banach, exact_norm, norm_leq)
from src.services.parallel import run_cases

# ロガーの設定
logger = logging.getLogger(__name__)

# 単位レベル集合上の1変数最小化の格子数
LEVEL_GRID = 2000
# 黄金分割による局所改良の反復数
GOLDEN_STEPS = 80
GOLDEN = (math.sqrt(5) - 1) / 2

# 双対の照合に使う指数
DUAL_EXPONENTS = ("1", "3/2", "2", "3", "inf")


# ----------------------------------------------------------------------
# 三角形ノルムとその双対
# ----------------------------------------------------------------------
def tri_norm(norm: TriangleNorm, t: Any, x: Any) -> float:
    """|(t,x)| (OutsideTriangle は TriangleNorm が送出する)"""
    return norm(t, x)


def _ratio(norm_values: np.ndarray, numerators: np.ndarray) -> np.ndarray:
    """(s − r y) / n(r): n = ∞ では 0 (λ → 0 の極限)、n = 0 では到達不能"""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(norm_values == 0, np.inf,
                        np.where(np.isinf(norm_values), 0.0, numerators / norm_values))


def _level_min(fn: Callable[[np.ndarray], np.ndarray], grid: int = LEVEL_GRID) -> Tuple[float, float]:
    """
    [0,1] 上の fn の最小値を格子探索と黄金分割で求める

    Returns:
        Tuple[float, float]: (最小値, 最小点)
    """
    r = np.linspace(0.0, 1.0, grid + 1)
    values = fn(r)
    i = int(np.argmin(values))
    best, best_r = float(values[i]), float(r[i])
    lo, hi = r[max(i - 1, 0)], r[min(i + 1, grid)]
    a, b = hi - GOLDEN * (hi - lo), lo + GOLDEN * (hi - lo)
    fa, fb = float(fn(np.array([a]))[0]), float(fn(np.array([b]))[0])
    for _ in range(GOLDEN_STEPS):
        if fa <= fb:
            hi, b, fb = b, a, fa
            a = hi - GOLDEN * (hi - lo)
            fa = float(fn(np.array([a]))[0])
        else:
            lo, a, fa = a, b, fb
            b = lo + GOLDEN * (hi - lo)
            fb = float(fn(np.array([b]))[0])
    for value, point in ((fa, a), (fb, b)):
        if value < best:
            best, best_r = value, float(point)
    return best, best_r


def _real(value: Any) -> float:
    return value if isinstance(value, float) else float(to_fraction(value))


def _check_point(s: float, y: float) -> None:
    if y < 0 or y > s:
        raise ValidationError(f"({s}, {y}) は三角形 0 ≤ x ≤ t の外です")


def tri_dual(norm: TriangleNorm, s: Any, y: Any, grid: int = LEVEL_GRID) -> float:
    """
    |(s,y)|_* = inf { ts − xy : |(t,x)| ≥ 1 } を単位レベル集合上の1変数最小化で求める

    (t,x) = λ(1,r) と書くと値は (s − r y) / |(1,r)| (|(1,r)| = ∞ の方向では 0)。

    Args:
        norm: 三角形ノルム
        s, y: 0 ≤ y ≤ s
        grid: 格子数

    Returns:
        float: 双対ノルムの値
    """
    s_f, y_f = _real(s), _real(y)
    _check_point(s_f, y_f)
    value, _ = _level_min(lambda r: _ratio(norm.profile(r), s_f - r * y_f), grid)
    return max(value, 0.0)


def dual_norm(norm: TriangleNorm, grid: int = LEVEL_GRID) -> TriangleNorm:
    """双対ノルム |·|_* を r の格子上で tri_dual により表にし、折れ線で補間する"""
    r = np.linspace(0.0, 1.0, grid + 1)
    values = np.array([tri_dual(norm, 1.0, float(x), grid) for x in r])
    return TriangleNorm(f"dual({norm.name})", lambda x: np.interp(x, r, values), True)


def _interior_points(count: int, seed: int) -> List[Tuple[float, float]]:
    rng = random.Random(seed)
    points = []
    for _ in range(count):
        s = rng.uniform(0.5, 3.0)
        points.append((s, s * rng.uniform(0.02, 0.98)))
    return points


def tri_dual_audit(p: Any, points: int = 100, seed: int = DEFAULT_SEED,
                   grid: int = LEVEL_GRID) -> Dict[str, Any]:
    """
    |·|_p の双対が |·|_q (1/p + 1/q = 1) と一致することを内部点で確認する
    """
    norm = TriangleNorm.lp(p)
    conj = norm.conjugate
    sample = _interior_points(points, seed)

    def case(point: Tuple[float, float]) -> Dict[str, Any]:
        s, y = point
        numeric = tri_dual(norm, s, y, grid)
        closed = conj(s, y)
        return {"s": s, "y": y, "dual": numeric, "closed_form": closed,
                "error": abs(numeric - closed), "holds": abs(numeric - closed) <= TOL_LORENTZ * max(1.0, closed)}

    rows = run_cases(case, sample)
    failed = [r for r in rows if not r["holds"]]
    verdict = "pass" if not failed else "fail"
    logger.info(f"三角形ノルムの双対 p={p}: {len(rows)} 点, 最大誤差 {max(r['error'] for r in rows):.2e}")
    return {"family": "triangle_dual", "p": str(p), "q": conj.name, "checked": len(rows),
            "failed": len(failed), "max_error": max(r["error"] for r in rows),
            "first_failure": failed[0] if failed else None, "verdict": verdict}


def bidual_fixed_point(norm: TriangleNorm, grid: int = LEVEL_GRID,
                       points: Sequence[float] = tuple(i / 10 for i in range(10)),
                       slack: float = TOL_LORENTZ) -> Dict[str, Any]:
    """
    |·|_** と |·| を内部点 (1, r) で比較する

    x 減少的と宣言されたノルムでは差が 2·slack 以内であることを判定する。
    そうでないノルムでは差と最大の差を与える点を報告する。
    """
    inner = dual_norm(norm, grid)
    rows = []
    for r in points:
        bidual = tri_dual(inner, 1.0, r, grid)
        original = norm(1.0, r)
        if math.isinf(original) and math.isinf(bidual):
            gap = 0.0
        elif math.isinf(bidual):
            gap = math.inf
        else:
            gap = bidual - original
        rows.append({"t": 1.0, "x": r, "norm": original, "bidual": bidual, "gap": gap})
    finite_gaps = [abs(row["gap"]) for row in rows]
    worst = max(rows, key=lambda row: abs(row["gap"]))
    if norm.x_decreasing:
        verdict = "pass" if max(finite_gaps) <= 2 * slack else "fail"
    else:
        verdict = "gap"
    return {"norm": norm.to_dict(), "rows": rows, "max_gap": max(finite_gaps),
            "witness": {"t": worst["t"], "x": worst["x"]} if abs(worst["gap"]) > 2 * slack else None,
            "verdict": verdict}


def x_increasing_violator() -> TriangleNorm:
    """r ∈ [0, 1/2] で増加し、その後 0 に下がる折れ線のノルム"""
    return TriangleNorm.tabulated([0.0, 0.5, 1.0], [1.0, 1.2, 0.0], name="x-increasing-patch")


def pairing_audit(p: Any, grid: int = 40, tol: float = TOL_MATRIX) -> Dict[str, Any]:
    """|(t,x)|_p |(s,y)|_q ≤ ts − xy を格子点の組で確認する"""
    norm = TriangleNorm.lp(p)
    conj = norm.conjugate
    ratios = [i / grid for i in range(grid + 1)]
    scales = (0.5, 1.0, 2.0)
    checked, failures = 0, []
    for t in scales:
        for a in ratios:
            for s in scales:
                for b in ratios:
                    x, y = a * t, b * s
                    lhs = norm(t, x) * conj(s, y)
                    rhs = t * s - x * y
                    checked += 1
                    if lhs > rhs + tol * max(1.0, rhs):
                        failures.append({"t": t, "x": x, "s": s, "y": y, "lhs": lhs, "rhs": rhs})
    return {"family": "triangle_pairing", "p": str(p), "checked": checked, "failed": len(failures),
            "first_failure": failures[0] if failures else None,
            "verdict": "pass" if not failures else "fail"}


# ----------------------------------------------------------------------
# Lorentz 化
# ----------------------------------------------------------------------
@dataclass
class LorentzNorm:
    """未来錐 {(t,v) : ‖v‖ ≤ t} 上の双曲ノルム hn(t,v) = |(t, ‖v‖)|"""
    banach: str
    triangle: TriangleNorm

    def __call__(self, t: Any, v: Sequence[Any]) -> float:
        """
        Raises:
            NotCausal: ‖v‖ > t の場合
        """
        length = banach_norm(v, self.banach)
        t_f = float(t)
        if length > t_f * (1 + TOL_RELATIVE) + TOL_RELATIVE:
            raise NotCausal(f"‖v‖ = {length} > t = {t} のため未来錐の外です")
        return self.triangle(t_f, min(length, t_f))


def lorentzify(banach: str, triangle: TriangleNorm) -> LorentzNorm:
    return LorentzNorm(check_banach(banach), triangle)


def _future_point(rng: random.Random, d: int, banach: str) -> Tuple[float, List[float]]:
    t = rng.uniform(0.1, 3.0)
    v = [rng.uniform(-1.0, 1.0) for _ in range(d)]
    length = banach_norm(v, banach)
    shrink = rng.uniform(0.0, 1.0) * t / length if length > 0 else 0.0
    return t, [x * shrink for x in v]


def lorentz_superadditivity(banach: str = "l2", p: Any = "2", d: int = 3, cases: int = 1000,
                            seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """hn(a + b) ≥ hn(a) + hn(b) を未来錐の乱数の組で確認する"""
    hn = lorentzify(banach, TriangleNorm.lp(p))
    rng = random.Random(seed)
    failures = []
    for _ in range(cases):
        (t1, v1), (t2, v2) = _future_point(rng, d, banach), _future_point(rng, d, banach)
        total = hn(t1 + t2, [a + b for a, b in zip(v1, v2)])
        parts = hn(t1, v1) + hn(t2, v2)
        if total < parts - TOL_RELATIVE * max(1.0, parts):
            failures.append({"a": [t1, v1], "b": [t2, v2], "sum_norm": total, "norm_sum": parts})
    return {"family": "lorentz_reverse_triangle", "banach": banach, "p": str(p), "checked": cases,
            "failed": len(failures), "first_failure": failures[0] if failures else None,
            "verdict": "pass" if not failures else "fail"}


# ----------------------------------------------------------------------
# 因果順序
# ----------------------------------------------------------------------
def causal_leq(a: CausalPoint, b: CausalPoint, banach: str = "l2") -> bool:
    """(t,x) ≤ (s,y) ⇔ ‖x − y‖ ≤ s − t (厳密)"""
    return a.leq(b, banach)


def _random_point(rng: random.Random, d: int) -> CausalPoint:
    return CausalPoint(Fraction(rng.randint(-4, 4), rng.randint(1, 2)),
                       tuple(Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(d)))


def _future_step(rng: random.Random, d: int, banach: str) -> CausalPoint:
    v = tuple(Fraction(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(d))
    length = exact_norm(v, banach)
    if length is None:
        length = Fraction(math.ceil(banach_norm(v, banach) * 1000), 1000)
    return CausalPoint(length + Fraction(rng.randint(0, 2), 2), v)


def causal_audit(d: int = 2, samples: int = 500, banach: str = "l2", seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """
    因果関係が半順序 (反射律・反対称律・推移律) であることを乱数の三つ組で確認する

    推移律は未来向きの増分を足して作った鎖でも確かめる。
    """
    check_banach(banach)
    rng = random.Random(seed)
    counts = {"reflexive": [0, 0], "antisymmetric": [0, 0], "transitive": [0, 0]}
    first: Dict[str, Any] = {}

    def record(law: str, ok: bool, witness: Any) -> None:
        counts[law][0] += 1
        if not ok:
            counts[law][1] += 1
            first.setdefault(law, witness)

    for _ in range(samples):
        a, b, c = (_random_point(rng, d) for _ in range(3))
        record("reflexive", causal_leq(a, a, banach), str(a))
        if causal_leq(a, b, banach) and causal_leq(b, a, banach):
            record("antisymmetric", a == b, [str(a), str(b)])
        if causal_leq(a, b, banach) and causal_leq(b, c, banach):
            record("transitive", causal_leq(a, c, banach), [str(a), str(b), str(c)])
        b2 = a + _future_step(rng, d, banach)
        c2 = b2 + _future_step(rng, d, banach)
        record("transitive", causal_leq(a, c2, banach), [str(a), str(b2), str(c2)])
        record("antisymmetric", not (b2 != a and causal_leq(b2, a, banach)), [str(a), str(b2)])
    rows = [{"family": f"causal_{law}", "checked": n, "failed": bad, "first_failure": first.get(law)}
            for law, (n, bad) in counts.items()]
    verdict = "pass" if all(r["failed"] == 0 for r in rows) else "fail"
    return {"d": d, "banach": banach, "rows": rows, "verdict": verdict}


# ----------------------------------------------------------------------
# Minkowski 時空の完備化の分類
# ----------------------------------------------------------------------
@dataclass
class Classification:
    kind: str
    t: Optional[Fraction] = None
    v: Optional[Tuple[Fraction, ...]] = None
    c: Optional[Fraction] = None
    w: Optional[Tuple[Fraction, ...]] = None
    evidence: Dict[str, Any] = field(default_factory=dict)

    def key(self) -> Tuple[Any, ...]:
        return (self.kind, self.t, self.v, self.c, self.w)

    def to_dict(self) -> Dict[str, Any]:
        def enc(x: Any) -> Any:
            if x is None:
                return None
            if isinstance(x, tuple):
                return [str(a) for a in x]
            return str(x)
        return {"kind": self.kind, "t": enc(self.t), "v": enc(self.v), "c": enc(self.c),
                "w": enc(self.w), "evidence": self.evidence}


def _c_value(p: CausalPoint) -> float:
    return float(p.t) - banach_norm(p.v, "l2")


def classify_directed(seq: RaySequence, tol: float = 1e-9, K: int = 8) -> Classification:
    """
    因果順序で単調な列の上限を Point / TimeInfinity / NullInfinity に分類する

    t と c = t − ‖v‖ の単調な極限を使う。c → ∞ なら TimeInfinity、t と c が有限なら
    Point(T, lim v)、c 有限で t → ∞ なら NullInfinity(c, lim v/‖v‖)。組み込みの族は
    閉形式で厳密に、explicit 列は K 項の Cauchy 判定で扱う。

    Raises:
        NotMonotone: 列が単調でない場合
        Inconclusive: explicit 列が K 項以内に Cauchy と判定できない場合
    """
    terms = seq.terms(K + 1)
    for a, b in zip(terms, terms[1:]):
        if not causal_leq(a, b):
            raise NotMonotone(f"{a} ≰ {b} のため単調な列ではありません")
    evidence = {"c_values": [_c_value(p) for p in terms], "t_values": [float(p.t) for p in terms]}

    if seq.kind == "constant":
        return Classification("point", seq.base.t, seq.base.v, evidence=evidence)
    if seq.kind == "cauchy-tail":
        return Classification("point", seq.base.t + seq.speed,
                              tuple(b + u for b, u in zip(seq.base.v, seq.direction)), evidence=evidence)
    if seq.kind in ("timelike-ray", "null-ray"):
        length = seq.direction_norm
        if seq.speed < length:
            raise NotMonotone(f"速さ {seq.speed} < ‖u‖ = {length} のため単調な列ではありません")
        if seq.speed == 0:
            return Classification("point", seq.base.t, seq.base.v, evidence=evidence)
        if seq.speed > length:
            return Classification("time-infinity", evidence=evidence)
        # 速さ = ‖u‖: c_k → t0 − ⟨v0, u⟩/‖u‖、方向 u/‖u‖
        inner = sum((b * u for b, u in zip(seq.base.v, seq.direction)), Fraction(0))
        return Classification("null-infinity", c=seq.base.t - inner / length,
                              w=tuple(u / length for u in seq.direction), evidence=evidence)

    # explicit: 最後の K/2 項の増分で Cauchy 判定する
    tail = terms[-(K // 2 + 1):]
    steps = [max(float(b.t - a.t), banach_norm([y - x for x, y in zip(a.v, b.v)], "l2"))
             for a, b in zip(tail, tail[1:])]
    if all(s <= tol for s in steps):
        last = terms[-1]
        return Classification("point", last.t, last.v, evidence=evidence)
    raise Inconclusive(f"{K} 項以内で Cauchy 列と判定できません (増分 {steps[-1]:.3e})")


def fixed_ray_families() -> Dict[str, Tuple[RaySequence, Classification]]:
    """定数列・時間的半直線・光的半直線と期待される分類"""
    u = (Fraction(3, 5), Fraction(4, 5))
    zero = (Fraction(0), Fraction(0))
    return {
        "constant": (RaySequence("constant", CausalPoint(Fraction(2), (Fraction(1), Fraction(-1)))),
                     Classification("point", Fraction(2), (Fraction(1), Fraction(-1)))),
        "timelike": (RaySequence("timelike-ray", CausalPoint(Fraction(0), zero), u, Fraction(2)),
                     Classification("time-infinity")),
        "null": (RaySequence("null-ray", CausalPoint(Fraction(0), tuple(-x for x in u)), u, Fraction(1)),
                 Classification("null-infinity", c=Fraction(1), w=u)),
        "cauchy": (RaySequence("cauchy-tail", CausalPoint(Fraction(0), zero), u, Fraction(1)),
                   Classification("point", Fraction(1), u)),
    }


def classify_tail_invariance(seq: RaySequence, shifts: Sequence[int] = (1, 2, 5), tol: float = 1e-9,
                             K: int = 8) -> Dict[str, Any]:
    """先頭を落とした列でも同じ分類になることを確認する"""
    base = classify_directed(seq, tol, K)
    rows = []
    for m in shifts:
        shifted = classify_directed(seq.shifted(m), tol, K)
        rows.append({"shift": m, "kind": shifted.kind, "same": shifted.key() == base.key()})
    return {"classification": base.to_dict(), "rows": rows, "invariant": all(r["same"] for r in rows)}


def minkowski_claim() -> Dict[str, Any]:
    """
    固定の列の族で分類器の主張を確認する (完備化の主張の検査から使う)

    Returns:
        Dict[str, Any]: rows / consistent / counterexample
    """
    rows = []
    counterexample = None
    for name, (seq, expected) in fixed_ray_families().items():
        got = classify_directed(seq)
        tail = classify_tail_invariance(seq)
        ok = got.key() == expected.key() and tail["invariant"]
        rows.append({"family": "minkowski_classifier", "anchor": f"minkowski.{name}",
                     "expected": expected.kind, "got": got.to_dict(), "tail_invariant": tail["invariant"],
                     "consistent": ok})
        if not ok and counterexample is None:
            counterexample = {"family": name, "expected": expected.to_dict(), "got": got.to_dict()}
    return {"rows": rows, "consistent": counterexample is None, "counterexample": counterexample}


# ----------------------------------------------------------------------
# 正値汎関数と完備性
# ----------------------------------------------------------------------
def _extreme_directions(m: Sequence[Fraction], banach: str, rng: random.Random, count: int) -> List[List[float]]:
    """単位球面上の方向 (乱数と ⟨m,v⟩ を最小にする方向)"""
    d = len(m)
    dirs = []
    for _ in range(count):
        v = [rng.uniform(-1.0, 1.0) for _ in range(d)]
        length = banach_norm(v, banach)
        if length > 0:
            dirs.append([x / length for x in v])
    mf = [float(x) for x in m]
    if any(mf):
        if banach == "l2":
            length = banach_norm(mf, "l2")
            dirs.append([-x / length for x in mf])
        elif banach == "l1":
            j = max(range(d), key=lambda i: abs(mf[i]))
            dirs.append([-math.copysign(1.0, mf[j]) if i == j else 0.0 for i in range(d)])
        else:
            dirs.append([-math.copysign(1.0, x) if x else 0.0 for x in mf])
    return dirs


def positive_functional_audit(s: Any, m: Sequence[Any], banach: str = "l2", samples: int = 64,
                              seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """
    F(t,v) = s·t + ⟨m,v⟩ の未来錐上での正値性と ‖m‖_* ≤ s の一致を確認する

    (a) 単位球面上の標本点 (1, v) での F ≥ 0、(b) 双対ノルムの閉形式での判定。
    一致しない場合や (a) が破れる場合はその点を報告する。
    """
    check_banach(banach)
    s = to_fraction(s)
    m = [to_fraction(x) for x in m]
    rng = random.Random(seed)
    dual = dual_banach(banach)
    closed = norm_leq(m, s, dual)
    worst_value, worst_point = math.inf, None
    for v in _extreme_directions(m, banach, rng, samples):
        value = float(s) + sum(float(a) * b for a, b in zip(m, v))
        if value < worst_value:
            worst_value, worst_point = value, v
    sampled = worst_value >= -1e-12
    return {
        "s": str(s), "m": [str(x) for x in m], "banach": banach, "dual_norm": dual,
        "dual_norm_value": banach_norm(m, dual),
        "positive_sampled": sampled, "closed_form": closed,
        "agree": sampled == closed,
        "witness": None if sampled else {"t": 1.0, "v": worst_point, "value": worst_value},
    }


def positive_functional_suite(banach: str = "l2", d: int = 3, cases: int = 1000,
                              seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """乱数の (s, m) で正値性と双対ノルムの判定が一致することを確認する"""
    rng = random.Random(seed)
    args = []
    for i in range(cases):
        m = [Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(d)]
        length = banach_norm(m, dual_banach(banach))
        # 境界付近を含むように s を ‖m‖_* の前後から選ぶ
        s = Fraction(round(length * rng.uniform(0.5, 1.5) * 64), 64)
        args.append((s, m, seed + i))
    results = run_cases(lambda a: positive_functional_audit(a[0], a[1], banach, seed=a[2]), args)
    mismatches = [r for r in results if not r["agree"]]
    return {"family": "positive_functional", "banach": banach, "checked": len(results),
            "failed": len(mismatches), "first_failure": mismatches[0] if mismatches else None,
            "verdict": "pass" if not mismatches else "fail"}


SEQUENCE_KINDS = ("constant", "geometric", "harmonic")


def completeness_pair(kind: str, x0: Sequence[Any], w: Optional[Sequence[Any]] = None,
                      ratio: Any = Fraction(1, 2), t0: Any = 0, count: int = 16) -> Dict[str, Any]:
    """
    増分が総和可能な点列 x_n から因果的な鎖 (t_n, x_n) を作り、上限が (T, lim x) であることを確かめる

    t_n = t0 + Σ_{i<n} ‖x_{i+1} − x_i‖ とし、geometric (x_n = x0 + (1 − r^n) w) では
    T = t0 + ‖w‖、lim x = x0 + w。逆に鎖から x の極限を取り出し、
    ‖x_n − lim x‖ ≤ T − t_n を確認する。

    Raises:
        NotSummable: 増分が総和可能でない場合 (harmonic)
    """
    if kind not in SEQUENCE_KINDS:
        raise ValidationError(f"不明な列の種別です: {kind}")
    x0 = tuple(to_fraction(x) for x in x0)
    t0 = to_fraction(t0)
    if kind == "harmonic":
        raise NotSummable("増分 ‖w‖/n の和は発散します")
    if kind == "constant":
        w_vec = tuple(Fraction(0) for _ in x0)
        r = Fraction(0)
    else:
        if w is None:
            raise ValidationError("geometric 列には方向 w が必要です")
        w_vec = tuple(to_fraction(x) for x in w)
        r = to_fraction(ratio)
        if not 0 < r < 1:
            raise NotSummable(f"比 {r} では増分が総和可能ではありません")
    length = exact_norm(w_vec, "l2")
    if length is None:
        raise ValidationError("方向 w の ℓ2 ノルムが有理数ではありません")

    def x_at(n: int) -> Tuple[Fraction, ...]:
        return tuple(a + (1 - r ** n) * b for a, b in zip(x0, w_vec))

    chain, t = [], t0
    for n in range(count):
        chain.append(CausalPoint(t, x_at(n)))
        # ‖x_{n+1} − x_n‖ = ‖w‖ (1 − r) r^n
        t += length * (1 - r) * r ** n
    sup = CausalPoint(t0 + length, tuple(a + b for a, b in zip(x0, w_vec)))
    is_chain = all(causal_leq(a, b) for a, b in zip(chain, chain[1:]))
    below_sup = all(causal_leq(p, sup) for p in chain)
    gaps = [sup.t - p.t for p in chain]
    net = [float(length * r ** n) for n in range(count)]
    return {
        "kind": kind,
        "chain": [p.to_json() for p in chain[:6]],
        "sup": sup.to_json(),
        "is_chain": is_chain,
        "sup_is_upper_bound": below_sup,
        "gaps": [str(g) for g in gaps[:6]],
        "gap_to_sup": str(gaps[-1]),
        "net_limit": [str(x) for x in sup.v],
        "net_distance": net[:6],
        "holds": is_chain and below_sup and gaps == sorted(gaps, reverse=True),
    }


def lorentz_report(command: str, **kwargs: Any) -> Dict[str, Any]:
    """CLI の lorentz サブコマンド用の分岐"""
    if command == "dual":
        norm = TriangleNorm.lp(kwargs["p"])
        s, y = kwargs["point"]
        value = tri_dual(norm, s, y)
        tol = kwargs.get("tol") or TOL_LORENTZ
        conj = norm.conjugate
        return {"p": str(kwargs["p"]), "point": [str(s), str(y)], "dual": value,
                "closed_form": conj(s, y), "verdict": "pass" if abs(value - conj(s, y)) <= tol else "fail"}
    if command == "norm":
        norm = TriangleNorm.lp(kwargs["p"])
        t, x = kwargs["point"]
        return {"p": str(kwargs["p"]), "point": [str(t), str(x)], "norm": tri_norm(norm, t, x), "verdict": "pass"}
    if command == "classify":
        result = classify_directed(kwargs["ray"])
        tail = classify_tail_invariance(kwargs["ray"])
        return {"classification": result.to_dict(), "tail_invariant": tail["invariant"],
                "verdict": "pass" if tail["invariant"] else "fail"}
    if command == "positive":
        result = positive_functional_audit(kwargs["s"], kwargs["m"], kwargs.get("banach", "l2"))
        result["verdict"] = "pass" if result["agree"] else "fail"
        return result
    raise ValidationError(f"不明な lorentz サブコマンドです: {command}")
