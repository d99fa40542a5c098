import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config import DEFAULT_SEED, SAMPLED_CHAINS, TOL_EXACT_FLOAT, TOL_MATRIX, TOL_RELATIVE
from src.models.cone import AffineChain, ConeVec, DiscreteCone
from src.models.errors import BoundaryCase, NotProbability, ValidationError
from src.models.extreal import INF, ONE, ZERO, ExtNonneg, PowerResult, as_float, exact_power, ext_pow
from src.models.functional import DualVector
from src.models.norms import ESSINF, LOG_UPPER, POWER, LpTag, SignedIntegralResult
from src.services.parallel import run_cases

# ロガーの設定
logger = logging.getLogger(__name__)

# 下限の格子探索の刻み (1/10, 1/100, 1/1000)
GRID_LEVELS = (10, 100, 1000)
# 1段階あたりの格子点数の上限 (超える段階は省略する)
MAX_GRID_POINTS = 600_000

# 逆 Hölder 不等式を確認する共役対
HOLDER_PAIRS = (("1", "-inf"), ("-inf", "1"), ("1/2", "-1"), ("-1", "1/2"),
                ("1/3", "-1/2"), ("0+", "0-"), ("0-", "0+"))

# シフト写像の鎖の検査に使う添字
SHIFT_PROBES = (1, 10, 100, 1000, 10 ** 4, 10 ** 5, 10 ** 6)


# ----------------------------------------------------------------------
# 値の演算 (厳密値と浮動小数点の混在)
# ----------------------------------------------------------------------
def _float_pow(x: float, e: float) -> float:
    if x == 0:
        return 0.0 if e > 0 else math.inf
    if math.isinf(x):
        return math.inf if e > 0 else 0.0
    return x ** e


def _pow(value: PowerResult, e: Fraction) -> PowerResult:
    if isinstance(value, ExtNonneg):
        return ext_pow(value, e)
    return _float_pow(value, float(e))


def _mul(a: PowerResult, b: PowerResult) -> PowerResult:
    """積 (0·∞ = 0)"""
    if isinstance(a, ExtNonneg) and isinstance(b, ExtNonneg):
        return a * b
    af, bf = as_float(a), as_float(b)
    if af == 0 or bf == 0:
        return 0.0
    return af * bf


def _add(a: PowerResult, b: PowerResult) -> PowerResult:
    if isinstance(a, ExtNonneg) and isinstance(b, ExtNonneg):
        return a + b
    return as_float(a) + as_float(b)


def _div(a: PowerResult, b: PowerResult) -> PowerResult:
    """a / b (b は有限正)"""
    if isinstance(a, ExtNonneg) and isinstance(b, ExtNonneg) and not a.is_inf:
        return ExtNonneg(a.value / b.value)
    return as_float(a) / as_float(b)


def _ext_sum(terms: Sequence[PowerResult]) -> PowerResult:
    if any(not isinstance(t, ExtNonneg) for t in terms):
        return math.fsum(as_float(t) for t in terms)
    total = ZERO
    for t in terms:
        total = total + t
    return total


def is_close(a: PowerResult, b: PowerResult, tol: float = TOL_RELATIVE) -> bool:
    """相対誤差 tol での一致 (両方厳密なら完全一致)"""
    if isinstance(a, ExtNonneg) and isinstance(b, ExtNonneg):
        return a == b
    af, bf = as_float(a), as_float(b)
    if math.isinf(af) or math.isinf(bf):
        return af == bf
    return math.isclose(af, bf, rel_tol=tol, abs_tol=TOL_EXACT_FLOAT)


def is_geq(a: PowerResult, b: PowerResult, tol: float = TOL_RELATIVE) -> bool:
    """a ≥ b を相対誤差 tol で判定する (両方厳密なら厳密に)"""
    if isinstance(a, ExtNonneg) and isinstance(b, ExtNonneg):
        return a >= b
    af, bf = as_float(a), as_float(b)
    if math.isinf(af):
        return True
    if math.isinf(bf):
        return False
    return af >= bf - tol * max(abs(bf), 1.0)


def _render(value: PowerResult) -> Any:
    if isinstance(value, ExtNonneg):
        return value.to_json()
    return "inf" if math.isinf(value) else value


def _as_vec(cone: DiscreteCone, f: Any) -> ConeVec:
    return f if isinstance(f, ConeVec) and len(f) == cone.n else cone.vec(f)


# ----------------------------------------------------------------------
# ノルム
# ----------------------------------------------------------------------
def normalize(cone: DiscreteCone) -> DiscreteCone:
    """重みを確率測度に正規化する (CLI の --normalize 用)"""
    total = cone.total
    return DiscreteCone([m / total for m in cone.mu])


def _require_probability(cone: DiscreteCone, tag: LpTag) -> None:
    if tag.is_log and not cone.is_probability:
        raise NotProbability(f"L⁰ ノルムには確率重みが必要です (Σμ = {cone.total})")


def pairing(cone: DiscreteCone, f: Any, g: Any) -> ExtNonneg:
    """⟨f, g⟩ = Σ f_i g_i μ_i (0·∞ = 0)"""
    return cone.pairing(_as_vec(cone, f), _as_vec(cone, g))


def log_integrals(cone: DiscreteCone, f: Any) -> SignedIntegralResult:
    """
    log f の正部分・負部分の重みつき和を計算する

    Args:
        cone: 離散錐 (重み)
        f: [0,∞] 値ベクトル

    Returns:
        SignedIntegralResult: S⁺, S⁻ と ∫₊, ∫₋
    """
    f = _as_vec(cone, f)
    pos: List[float] = []
    neg: List[float] = []
    for fi, m in zip(f, cone.mu):
        if fi.is_inf:
            pos.append(math.inf)
        elif fi.is_zero:
            neg.append(math.inf)
        else:
            q = fi.value
            lg = math.log(q.numerator) - math.log(q.denominator)
            if lg > 0:
                pos.append(float(m) * lg)
            else:
                neg.append(-float(m) * lg)
    return SignedIntegralResult(math.fsum(pos), math.fsum(neg))


def _geometric_mean(cone: DiscreteCone, f: ConeVec) -> Optional[Fraction]:
    """Π f_i^{μ_i} が有理数なら厳密に返す"""
    result = Fraction(1)
    for fi, m in zip(f, cone.mu):
        r = exact_power(fi.value, m)
        if r is None:
            return None
        result *= r
    return result


def lp_norm(cone: DiscreteCone, f: Any, tag: Any) -> PowerResult:
    """
    L^p ノルム ‖f‖_p を計算する

    p ∈ [−∞,1]\\{0} では (Σ f_i^p μ_i)^{1/p}、−∞ では min f、
    0± では exp(∫± log f)。結果が有理数になる場合は ExtNonneg、
    そうでなければ float を返す。

    Args:
        cone: 離散錐 (重み μ)
        f: [0,∞] 値ベクトル
        tag: ノルムタグ (LpTag または "1/2", "-inf", "0+" など)

    Returns:
        PowerResult: ノルムの値

    Raises:
        NotProbability: 0± で重みの和が 1 でない場合
    """
    tag = LpTag.parse(tag)
    f = _as_vec(cone, f)
    _require_probability(cone, tag)
    if tag.kind == ESSINF:
        return min(f)
    if tag.kind == POWER:
        terms = [_mul(_pow(fi, tag.p), ExtNonneg(m)) for fi, m in zip(f, cone.mu)]
        return _pow(_ext_sum(terms), 1 / tag.p)

    integrals = log_integrals(cone, f)
    value = integrals.upper if tag.kind == LOG_UPPER else integrals.lower
    if value.value == math.inf:
        return INF
    if value.value == -math.inf:
        return ZERO
    exact = _geometric_mean(cone, f)
    if exact is not None:
        return ExtNonneg(exact)
    return value.exp()


def batch_norms(G: np.ndarray, mu: np.ndarray, tag: LpTag) -> np.ndarray:
    """行ごとの L^p ノルム (浮動小数点、規約は lp_norm と同じ)"""
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if tag.kind == ESSINF:
            return G.min(axis=1)
        if tag.kind == POWER:
            p = float(tag.p)
            S = (np.power(G, p) * mu).sum(axis=1)
            return np.power(S, 1.0 / p)
        L = np.log(G)
        pos = (np.maximum(L, 0.0) * mu).sum(axis=1)
        neg = (np.maximum(-L, 0.0) * mu).sum(axis=1)
        both = np.isinf(pos) & np.isinf(neg)
        fallback = np.inf if tag.kind == LOG_UPPER else -np.inf
        return np.exp(np.where(both, fallback, pos - neg))


def float_norm(values: Sequence[float], mu: Sequence[float], tag: Any) -> float:
    """浮動小数点のベクトルの L^p ノルム (行列のスペクトルなどに使う)"""
    G = np.asarray([values], dtype=float)
    return float(batch_norms(G, np.asarray(mu, dtype=float), LpTag.parse(tag))[0])


def _norm_of(cone: DiscreteCone, values: Sequence[PowerResult], tag: LpTag) -> PowerResult:
    if all(isinstance(v, ExtNonneg) for v in values):
        return lp_norm(cone, ConeVec(values), tag)
    G = np.array([[as_float(v) for v in values]])
    mu = np.array([float(m) for m in cone.mu])
    return float(batch_norms(G, mu, tag)[0])


def _pairing_of(cone: DiscreteCone, f: ConeVec, values: Sequence[PowerResult]) -> PowerResult:
    if all(isinstance(v, ExtNonneg) for v in values):
        return cone.pairing(f, ConeVec(values))
    terms = [_mul(_mul(fi, v), ExtNonneg(m)) for fi, v, m in zip(f, values, cone.mu)]
    return _ext_sum(terms)


# ----------------------------------------------------------------------
# 格子による下限探索
# ----------------------------------------------------------------------
def simplex_grid(n: int, steps: int) -> np.ndarray:
    """Σ k_i = steps となる非負整数ベクトルの全体 (行ごと)"""
    if n == 1:
        return np.array([[steps]], dtype=np.int64)
    if n == 2:
        k = np.arange(steps + 1, dtype=np.int64)
        return np.stack([k, steps - k], axis=1)
    blocks = []
    for k in range(steps + 1):
        sub = simplex_grid(n - 1, steps - k)
        blocks.append(np.hstack([np.full((len(sub), 1), k, dtype=np.int64), sub]))
    return np.vstack(blocks)


def grid_infimum(cone: DiscreteCone, f: ConeVec, tag: LpTag,
                 levels: Sequence[int] = GRID_LEVELS) -> Dict[str, Any]:
    """
    inf { ⟨f,g⟩ / ‖g‖_tag : g は単体上の格子点 } を段階ごとに求める

    格子は入れ子 (刻みが前の段階の約数) なので下限は段階ごとに非増加になる。
    """
    mu = np.array([float(m) for m in cone.mu])
    fv = np.array([as_float(x) for x in f])
    rows = []
    for steps in levels:
        count = math.comb(steps + cone.n - 1, cone.n - 1)
        if count > MAX_GRID_POINTS:
            rows.append({"steps": steps, "points": count, "skipped": True})
            continue
        G = simplex_grid(cone.n, steps).astype(float) / steps
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            pair = (np.where(G > 0, G * fv, 0.0) * mu).sum(axis=1)
            norms = batch_norms(G, mu, tag)
            usable = (norms > 0) & np.isfinite(norms)
            ratio = np.where(usable, pair / np.where(usable, norms, 1.0), np.inf)
        best = int(np.argmin(ratio))
        rows.append({"steps": steps, "points": count, "skipped": False,
                     "infimum": float(ratio[best]), "argmin": [float(x) for x in G[best]]})
    computed = [r["infimum"] for r in rows if not r["skipped"]]
    monotone = all(b <= a for a, b in zip(computed, computed[1:]))
    return {"levels": rows, "monotone": monotone,
            "infimum": computed[-1] if computed else None}


# ----------------------------------------------------------------------
# 双対の達成
# ----------------------------------------------------------------------
@dataclass
class DualAttainment:
    tag: LpTag
    norm: PowerResult
    g: List[PowerResult]
    g_norm: PowerResult
    pairing: PowerResult
    grid: Dict[str, Any]

    @property
    def normalized(self) -> bool:
        return is_close(self.g_norm, ONE)

    @property
    def attains(self) -> bool:
        return is_close(self.pairing, self.norm)

    @property
    def grid_ok(self) -> bool:
        if self.grid["infimum"] is None:
            return self.grid["monotone"]
        return self.grid["monotone"] and is_geq(self.grid["infimum"], self.norm)

    @property
    def passed(self) -> bool:
        return self.normalized and self.attains and self.grid_ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": str(self.tag),
            "q": str(self.tag.conjugate()),
            "norm": _render(self.norm),
            "g_star": [_render(v) for v in self.g],
            "g_star_norm": _render(self.g_norm),
            "pairing": _render(self.pairing),
            "normalized": self.normalized,
            "attains": self.attains,
            "grid": self.grid,
            "grid_ok": self.grid_ok,
            "verdict": "pass" if self.passed else "fail",
        }


def _strictly_positive(f: ConeVec) -> bool:
    return all(not (x.is_zero or x.is_inf) for x in f)


def _attaining_vector(cone: DiscreteCone, f: ConeVec, tag: LpTag, norm: PowerResult) -> List[PowerResult]:
    if tag.kind == ESSINF:
        j = min(range(cone.n), key=lambda i: f[i])
        return [ExtNonneg(1 / cone.mu[i]) if i == j else ZERO for i in range(cone.n)]
    if tag.kind == POWER:
        if tag.p == 1:
            return [ONE] * cone.n
        e = tag.p - 1
        denom = _pow(norm, e)
        return [_div(_pow(fi, e), denom) for fi in f]
    # 0±: g = ‖f‖ / f
    return [_div(norm, fi) for fi in f]


def dual_attain(cone: DiscreteCone, f: Any, tag: Any, levels: Sequence[int] = GRID_LEVELS) -> DualAttainment:
    """
    ‖f‖_p = inf { ⟨f,g⟩ : ‖g‖_q ≥ 1 } の達成点 g* を閉形式で求める

    g* = f^{p−1} / ‖f‖_p^{p−1} (p = 1 では g* ≡ 1、p = −∞ では最小座標の e_j/μ_j、
    0± では ‖f‖/f)。格子探索で g* より良い g がないことを確かめる。

    Args:
        cone: 離散錐
        f: 0 と ∞ を含まない有限正ベクトル
        tag: ノルムタグ
        levels: 格子の刻み

    Returns:
        DualAttainment: g*, ‖g*‖_q, ⟨f,g*⟩ と格子探索の結果

    Raises:
        BoundaryCase: f が 0 または ∞ を含む場合
        NotProbability: 0± で重みの和が 1 でない場合
    """
    tag = LpTag.parse(tag)
    f = _as_vec(cone, f)
    _require_probability(cone, tag)
    if not _strictly_positive(f):
        raise BoundaryCase(f"{f} は 0 または ∞ を含むため達成点がありません (不等式のみ成立)")
    q = tag.conjugate()
    norm = lp_norm(cone, f, tag)
    g = _attaining_vector(cone, f, tag, norm)
    result = DualAttainment(tag, norm, g, _norm_of(cone, g, q), _pairing_of(cone, f, g),
                            grid_infimum(cone, f, q, levels))
    logger.debug(f"dual_attain p={tag}: ‖f‖={_render(norm)} ⟨f,g*⟩={_render(result.pairing)}")
    return result


# ----------------------------------------------------------------------
# 逆 Hölder 不等式と L⁰ の恒等式
# ----------------------------------------------------------------------
def _boundary_vectors(n: int) -> List[ConeVec]:
    zero_inf = [ZERO if i % 2 == 0 else INF for i in range(n)]
    inf_one = [INF if i == 0 else ONE for i in range(n)]
    zero_one = [ZERO if i == 0 else ExtNonneg(i + 1) for i in range(n)]
    return [ConeVec(zero_inf), ConeVec(inf_one), ConeVec(zero_one), ConeVec([ONE] * n)]


def _holder_case(args: Tuple[DiscreteCone, LpTag, LpTag, ConeVec, ConeVec]) -> Optional[Dict[str, Any]]:
    cone, p, q, f, g = args
    lhs = cone.pairing(f, g)
    rhs = _mul(lp_norm(cone, f, p), lp_norm(cone, g, q))
    if is_geq(lhs, rhs):
        return None
    return {"f": f.to_json(), "g": g.to_json(), "pairing": _render(lhs), "product": _render(rhs)}


def reverse_holder_audit(n: int = 3, cases: int = 64, seed: int = DEFAULT_SEED,
                         pairs: Sequence[Tuple[str, str]] = HOLDER_PAIRS) -> Dict[str, Any]:
    """
    ⟨f,g⟩ ≥ ‖f‖_p ‖g‖_q を共役対ごとに確認する (0 と ∞ を含む境界ベクトルを含む)

    Returns:
        Dict[str, Any]: 共役対ごとの行と判定
    """
    cone = DiscreteCone.uniform(n)
    rng = random.Random(seed)
    vectors = [(cone.random_vec(rng, inf_rate=0.15), cone.random_vec(rng, inf_rate=0.15))
               for _ in range(cases)]
    boundary = _boundary_vectors(n)
    vectors += [(a, b) for a in boundary for b in boundary]
    rows = []
    for p_text, q_text in pairs:
        p, q = LpTag.parse(p_text), LpTag.parse(q_text)
        if p.conjugate() != q:
            raise ValidationError(f"{p} と {q} は共役ではありません")
        failures = [r for r in run_cases(_holder_case, [(cone, p, q, f, g) for f, g in vectors]) if r]
        rows.append({"family": "reverse_holder", "p": str(p), "q": str(q), "checked": len(vectors),
                     "failed": len(failures), "first_failure": failures[0] if failures else None})
    verdict = "pass" if all(r["failed"] == 0 for r in rows) else "fail"
    logger.info(f"逆 Hölder 不等式: {len(pairs)} 組 × {len(vectors)} 例, 判定 {verdict}")
    return {"n": n, "rows": rows, "verdict": verdict}


def _reciprocal_vec(f: ConeVec) -> ConeVec:
    return ConeVec(INF if x.is_zero else ZERO if x.is_inf else ExtNonneg(1 / x.value) for x in f)


def _reciprocal_value(value: PowerResult) -> PowerResult:
    if isinstance(value, ExtNonneg):
        return INF if value.is_zero else ZERO if value.is_inf else ExtNonneg(1 / value.value)
    return math.inf if value == 0 else 0.0 if math.isinf(value) else 1.0 / value


def l0_identities(cone: DiscreteCone, f: Any, g: Optional[Any] = None) -> Dict[str, Any]:
    """
    ‖f‖_{0±} = 1/‖1/f‖_{0∓} と、有界正の f, g に対する ‖fg‖₀ = ‖f‖₀‖g‖₀ を確認する

    Raises:
        NotProbability: 重みの和が 1 でない場合
    """
    if not cone.is_probability:
        raise NotProbability(f"L⁰ ノルムには確率重みが必要です (Σμ = {cone.total})")
    f = _as_vec(cone, f)
    inv = _reciprocal_vec(f)
    rows = []
    for tag, dual in (("0+", "0-"), ("0-", "0+")):
        lhs = lp_norm(cone, f, tag)
        rhs = _reciprocal_value(lp_norm(cone, inv, dual))
        rows.append({"family": "l0_reciprocal", "tag": tag, "norm": _render(lhs),
                     "reciprocal_side": _render(rhs), "holds": is_close(lhs, rhs, TOL_EXACT_FLOAT)})
    if g is not None:
        g = _as_vec(cone, g)
        if _strictly_positive(f) and _strictly_positive(g):
            fg = ConeVec(a * b for a, b in zip(f, g))
            lhs = lp_norm(cone, fg, "0+")
            rhs = _mul(lp_norm(cone, f, "0+"), lp_norm(cone, g, "0+"))
            rows.append({"family": "l0_product", "norm": _render(lhs), "product": _render(rhs),
                         "holds": is_close(lhs, rhs, TOL_EXACT_FLOAT)})
        else:
            rows.append({"family": "l0_product", "holds": None, "note": "有界正でないため対象外"})
    verdict = "pass" if all(r["holds"] is not False for r in rows) else "fail"
    return {"f": f.to_json(), "rows": rows, "verdict": verdict}


# ----------------------------------------------------------------------
# 作用素ノルムと双双対
# ----------------------------------------------------------------------
@dataclass
class OperatorNormResult:
    source: LpTag
    value: PowerResult
    grid: Optional[Dict[str, Any]] = None

    @property
    def grid_ok(self) -> Optional[bool]:
        if self.grid is None or self.grid["infimum"] is None:
            return None
        return self.grid["monotone"] and is_geq(self.grid["infimum"], self.value)

    def to_dict(self) -> Dict[str, Any]:
        return {"source": str(self.source), "value": _render(self.value),
                "grid": self.grid, "grid_ok": self.grid_ok}


def operator_norm(L: DualVector, source: Any, levels: Sequence[int] = GRID_LEVELS[:2]) -> OperatorNormResult:
    """
    ‖L‖ = inf { L(v) : ‖v‖_source ≥ 1 } (L ≡ 0 なら 0)

    L = L_f の閉形式は共役ノルム ‖f‖_{source*}。格子探索で下から越えないことを確かめる。
    """
    source = LpTag.parse(source)
    if all(x.is_zero for x in L.f):
        return OperatorNormResult(source, ZERO)
    value = lp_norm(L.cone, L.f, source.conjugate())
    return OperatorNormResult(source, value, grid_infimum(L.cone, L.f, source, levels))


def mcp_unstable_family(N: int = 12, q: Any = "-1") -> Dict[str, Any]:
    """
    f_n = 1 + ∞·χ_{先頭 N/n 座標} (n | N, n ≥ 2) の ‖f_n‖_q = (1 − 1/n)^{1/q} を確認する

    q < 0 では値は [1, 2^{−1/q}] に収まり、L_{f_n} の作用素ノルム (元のノルムは共役指数) と一致する。
    """
    tag = LpTag.parse(q)
    if not (tag.kind == POWER and tag.p < 0):
        raise ValidationError(f"q は負の有理数である必要があります: {q}")
    cone = DiscreteCone.uniform(N)
    upper = 2.0 ** (-1.0 / float(tag.p))
    rows = []
    for n in range(2, N + 1):
        if N % n:
            continue
        head = N // n
        f = ConeVec([INF] * head + [ONE] * (N - head))
        norm = lp_norm(cone, f, tag)
        expected = _pow(ExtNonneg(1 - Fraction(1, n)), 1 / tag.p)
        op = operator_norm(DualVector(cone, f), tag.conjugate(), levels=())
        rows.append({"family": "mcp_unstable", "n": n, "norm": _render(norm),
                     "expected": _render(expected), "operator_norm": _render(op.value),
                     "in_bracket": 1.0 - TOL_RELATIVE <= as_float(norm) <= upper * (1 + TOL_RELATIVE),
                     "holds": is_close(norm, expected) and is_close(op.value, norm)})
    verdict = "pass" if all(r["holds"] and r["in_bracket"] for r in rows) else "fail"
    return {"N": N, "q": str(tag), "bracket": [1.0, upper], "rows": rows, "verdict": verdict}


@dataclass
class BidualResult:
    tag: LpTag
    norm: PowerResult
    bidual: PowerResult
    mode: str
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        if not is_geq(self.bidual, self.norm):
            return "fail"
        if self.mode == "inequality":
            return "pass"
        if self.tag.is_negative:
            # p < 0 ではノルムが Mcp をもたないため等号は判定しない
            return "recorded"
        return "pass" if is_close(self.bidual, self.norm, TOL_MATRIX) else "fail"

    def to_dict(self) -> Dict[str, Any]:
        b, n = as_float(self.bidual), as_float(self.norm)
        gap = None if math.isinf(b) or math.isinf(n) else b - n
        return {"p": str(self.tag), "norm": _render(self.norm), "bidual": _render(self.bidual),
                "mode": self.mode, "gap": gap, "details": self.details, "verdict": self.verdict}


def bidual_audit(cone: DiscreteCone, f: Any, tag: Any, levels: Sequence[int] = GRID_LEVELS) -> BidualResult:
    """
    hn**(Ψ(f)) = inf { L(f) : hn*(L) ≥ 1 } と hn(f) = ‖f‖_p を比較する

    有限正の f では g* = dual_attain(f) を求め、hn*(L_{g*}) をもう一度 dual_attain
    (共役指数) で評価して候補値 ⟨f,g*⟩ / hn*(L_{g*}) を得る。格子上の候補と合わせた
    最小値を双双対の値とする。境界の f では格子のみで hn** ≥ hn を確認する。
    """
    tag = LpTag.parse(tag)
    f = _as_vec(cone, f)
    q = tag.conjugate()
    norm = lp_norm(cone, f, tag)
    grid = grid_infimum(cone, f, q, levels)
    grid_value = grid["infimum"] if grid["infimum"] is not None else math.inf
    try:
        outer = dual_attain(cone, f, tag, levels=())
    except BoundaryCase:
        logger.debug(f"{f} は境界ベクトルのため格子のみで双双対を評価します")
        return BidualResult(tag, norm, grid_value, "inequality", {"grid": grid})
    inner = dual_attain(cone, ConeVec(ExtNonneg(v) for v in outer.g), q, levels=())
    candidate = _div(outer.pairing, inner.norm)
    bidual = candidate if is_geq(grid_value, candidate, 0.0) else grid_value
    return BidualResult(tag, norm, bidual, "equality",
                        {"dual_norm_of_g_star": _render(inner.norm), "candidate": _render(candidate),
                         "grid": grid})


# ----------------------------------------------------------------------
# Mcp の欠如とシフト写像
# ----------------------------------------------------------------------
def _window_norms(N: int, tag: LpTag) -> List[PowerResult]:
    cone = DiscreteCone.uniform(N)
    return [lp_norm(cone, [ONE] * k + [ZERO] * (N - k), tag) for k in range(1, N + 1)]


def _tail_bound(cone: DiscreteCone, tag: LpTag, chain: AffineChain, shift: ConeVec, k: int,
                at_sup: float) -> float:
    """
    k 番目の項と上限の差の上界

    有限の上限をもつ座標では x_k = sup − c/k、発散する座標では y^p → 0 (p < 0) なので、
    冪和では |Σ μ y_k^p − Σ μ y^p| ≤ Σ_有限 μ |p| y_k^{p−1} c/k + Σ_発散 μ y_k^p、
    本質的下限では max(c/k, (m − y_k)^+) が上界になる。
    """
    y = [float(x.value) for x in chain.term(k) + shift]
    if tag.kind == ESSINF:
        gaps = [float(ci) / k if bi == 0 else max(0.0, at_sup - yi)
                for yi, bi, ci in zip(y, chain.b, chain.c)]
        return max(gaps)
    p = float(tag.p)
    bound = 0.0
    for yi, bi, ci, m in zip(y, chain.b, chain.c, cone.mu):
        if bi == 0:
            bound += float(m) * abs(p) * yi ** (p - 1) * float(ci) / k
        else:
            bound += float(m) * yi ** p
    return bound


def _shifted_chain(args: Tuple[DiscreteCone, LpTag, ConeVec, AffineChain]) -> Optional[Dict[str, Any]]:
    """
    g ↦ ‖g + f‖_p が鎖の上限を保つかを確認する

    値の列の単調性に加えて、各添字で上限での値との差が _tail_bound 以下であることを見る。
    上界は k → ∞ で 0 に収束するので、これが成り立てば極限は上限での値に等しい。
    """
    cone, tag, shift, chain = args
    values = [as_float(lp_norm(cone, chain.term(k) + shift, tag)) for k in SHIFT_PROBES]
    at_sup = as_float(lp_norm(cone, chain.sup() + shift, tag))
    monotone = all(b >= a - TOL_RELATIVE * max(a, 1.0) for a, b in zip(values, values[1:]))
    below = all(v <= at_sup * (1 + TOL_RELATIVE) for v in values)
    if math.isinf(at_sup):
        # 全座標が発散: 確率重みの冪平均は最小の座標以上
        last = chain.term(SHIFT_PROBES[-1]) + shift
        converges = values[-1] >= min(float(x.value) for x in last) * (1 - TOL_RELATIVE)
    elif tag.kind == ESSINF:
        converges = all(at_sup - v <= _tail_bound(cone, tag, chain, shift, k, at_sup) + TOL_EXACT_FLOAT
                        for v, k in zip(values, SHIFT_PROBES))
    else:
        p = float(tag.p)
        sum_sup = at_sup ** p
        converges = all(abs(v ** p - sum_sup) <= _tail_bound(cone, tag, chain, shift, k, at_sup) * (1 + TOL_RELATIVE)
                        + TOL_EXACT_FLOAT * sum_sup
                        for v, k in zip(values, SHIFT_PROBES))
    if monotone and below and converges:
        return None
    return {"chain": chain.describe(), "values": values, "value_at_sup": at_sup}


def lp_mcp_counterexample(N: int = 4, p: Any = "-1", budget: int = SAMPLED_CHAINS,
                          seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """
    指示関数の窓 f_k = χ_{1..k} でのノルムの列と、シフト写像 g ↦ ‖g+f‖_p の鎖検査

    p < 0 では ‖f_k‖_p = 0 (k < N) かつ ‖f_N‖_p = 1 となり、p = 1 では k/N で増加する。
    シフト f ≡ 1 (‖f‖_p = 1 > 0) の写像は標本の鎖で上限を保つ。

    Returns:
        Dict[str, Any]: 窓のノルム列・シフト写像の検査結果・判定
    """
    tag = LpTag.parse(p)
    if not tag.is_negative:
        raise ValidationError(f"Mcp の欠如は p < 0 の現象です: {p}")
    window = _window_norms(N, tag)
    reference = _window_norms(N, LpTag.parse("1"))
    pattern = all(as_float(v) == 0 for v in window[:-1]) and as_float(window[-1]) == 1

    cone = DiscreteCone.uniform(N)
    shift = ConeVec([ONE] * N)
    rng = random.Random(seed)
    chains = [AffineChain([1] * N, [0] * N, [1] * N),
              AffineChain([0] * N, [1] * N, [0] * N),
              AffineChain([1] + [0] * (N - 1), [0] + [1] * (N - 1), [1] + [0] * (N - 1))]
    chains += [AffineChain.random(N, rng) for _ in range(budget)]
    failures = [r for r in run_cases(_shifted_chain, [(cone, tag, shift, ch) for ch in chains]) if r]
    verdict = "pass" if pattern and not failures else "fail"
    logger.info(f"p={tag} の窓: {[_render(v) for v in window]}, シフト写像の反例 {len(failures)} 件")
    return {
        "N": N,
        "p": str(tag),
        "chain_norms": [_render(v) for v in window],
        "sup_norm": _render(window[-1]),
        "jump_at_sup": pattern,
        "reference_p1": [_render(v) for v in reference],
        "shifted": {"shift_norm": _render(lp_norm(cone, shift, tag)), "checked": len(chains),
                    "counterexample": failures[0] if failures else None},
        "verdict": verdict,
    }


# ----------------------------------------------------------------------
# 双曲ノルムの公理
# ----------------------------------------------------------------------
def _norm_law_case(args: Tuple[DiscreteCone, LpTag, ConeVec, ConeVec, Fraction]) -> Dict[str, bool]:
    cone, tag, f, g, lam = args
    nf, ng, nfg = lp_norm(cone, f, tag), lp_norm(cone, g, tag), lp_norm(cone, f + g, tag)
    scaled = lp_norm(cone, f.scale(lam), tag)
    return {
        "superadditive": is_geq(nfg, _add(nf, ng)),
        "monotone": is_geq(nfg, nf),
        "homogeneous": is_close(scaled, _mul(ExtNonneg(lam), nf)),
    }


def norm_law_audit(tag: Any, n: int = 3, cases: int = 64, seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """超加法性 ‖f+g‖ ≥ ‖f‖+‖g‖・単調性・正斉次性を標本で確認する"""
    tag = LpTag.parse(tag)
    cone = DiscreteCone.uniform(n)
    rng = random.Random(seed)
    args = [(cone, tag, cone.random_vec(rng), cone.random_vec(rng), Fraction(rng.randint(1, 9), rng.randint(1, 4)))
            for _ in range(cases)]
    results = run_cases(_norm_law_case, args)
    rows = []
    for law in ("superadditive", "monotone", "homogeneous"):
        failed = [i for i, r in enumerate(results) if not r[law]]
        first = None
        if failed:
            _, _, f, g, lam = args[failed[0]]
            first = {"f": f.to_json(), "g": g.to_json(), "lambda": str(lam)}
        rows.append({"family": law, "checked": len(results), "failed": len(failed), "first_failure": first})
    verdict = "pass" if all(r["failed"] == 0 for r in rows) else "fail"
    return {"p": str(tag), "rows": rows, "verdict": verdict}


def norm_report(cone: DiscreteCone, f: Any, tag: Any) -> Dict[str, Any]:
    """CLI 用: ノルムの値と (0± では) 対数積分"""
    tag = LpTag.parse(tag)
    f = _as_vec(cone, f)
    norm = lp_norm(cone, f, tag)
    result: Dict[str, Any] = {"p": str(tag), "f": f.to_json(), "norm": _render(norm),
                              "exact": isinstance(norm, ExtNonneg)}
    if tag.is_log:
        result["integrals"] = log_integrals(cone, f).to_dict()
    return result
