import itertools
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.config import DEFAULT_SEED, LP_MAX_SIZE, SAMPLED_CHAINS
from src.models.cone import ConeVec, DiscreteCone
from src.models.errors import (BudgetExceeded, HypothesisFailed, NotComparable, PreconditionFailed,
                               Unbounded, ValidationError)
from src.models.extreal import INF, ZERO, ExtNonneg, to_fraction
from src.models.functional import BoundPair, DualVector, SubwedgeSpec
from src.services.mcp_service import McpReport, check_mcp, sum_functional_map
from src.services.simplex import INFEASIBLE, UNBOUNDED, solve_lp

# ロガーの設定
logger = logging.getLogger(__name__)

# 分解格子の刻み
GRID_STEP = Fraction(1, 8)
# 格子オラクルを使う最大次元
GRID_MAX_DIM = 4

Vector = Tuple[Fraction, ...]


def _vec_json(v: Sequence[Fraction]) -> List[Dict[str, int]]:
    return [{"num": x.numerator, "den": x.denominator} for x in v]


def _dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


# ----------------------------------------------------------------------
# Riesz–Kantorovich の公式
# ----------------------------------------------------------------------
@dataclass
class RKResult:
    join: ExtNonneg
    meet: ExtNonneg
    join_split: Tuple[ConeVec, ConeVec]
    meet_split: Tuple[ConeVec, ConeVec]
    grid_join: Optional[ExtNonneg] = None
    grid_meet: Optional[ExtNonneg] = None
    lp_join: Optional[Fraction] = None
    lp_meet: Optional[Fraction] = None

    @property
    def agree(self) -> bool:
        checks = []
        if self.grid_join is not None:
            checks += [self.grid_join == self.join, self.grid_meet == self.meet]
        if self.lp_join is not None:
            checks += [ExtNonneg(self.lp_join) == self.join, ExtNonneg(self.lp_meet) == self.meet]
        return all(checks)

    def to_dict(self) -> Dict[str, Any]:
        def opt(x: Any) -> Any:
            if x is None:
                return None
            return x.to_json() if isinstance(x, ExtNonneg) else ExtNonneg(x).to_json()
        return {
            "join": self.join.to_json(),
            "meet": self.meet.to_json(),
            "join_split": [v.to_json() for v in self.join_split],
            "meet_split": [v.to_json() for v in self.meet_split],
            "grid_join": opt(self.grid_join),
            "grid_meet": opt(self.grid_meet),
            "lp_join": opt(self.lp_join),
            "lp_meet": opt(self.lp_meet),
            "agree": self.agree,
        }


def _split(v: ConeVec, take_first: Sequence[bool]) -> Tuple[ConeVec, ConeVec]:
    v1 = ConeVec(x if t else ZERO for x, t in zip(v, take_first))
    v2 = ConeVec(ZERO if t else x for x, t in zip(v, take_first))
    return v1, v2


def _coordinate_splits(x: ExtNonneg, steps: Sequence[Fraction]) -> List[Tuple[ExtNonneg, ExtNonneg]]:
    """座標 x の分解 (a, b), a + b = x の候補 (∞ は (∞,0), (0,∞), (∞,∞))"""
    if x.is_inf:
        return [(INF, ZERO), (ZERO, INF), (INF, INF)]
    return [(x * t, x.minus(x * t)) for t in steps]


def _grid_oracle(L1: DualVector, L2: DualVector, v: ConeVec) -> Tuple[ExtNonneg, ExtNonneg]:
    """v1 = t·v (t_i ∈ {0, 1/8, …, 1}、∞ 座標は3通り) の分解上で L1(v1) + L2(v2) の最大・最小を取る"""
    steps = [GRID_STEP * k for k in range(int(1 / GRID_STEP) + 1)]
    best_max, best_min = ZERO, INF
    for pairs in itertools.product(*(_coordinate_splits(x, steps) for x in v)):
        v1 = ConeVec(a for a, _ in pairs)
        v2 = ConeVec(b for _, b in pairs)
        total = L1(v1) + L2(v2)
        best_max = max(best_max, total)
        best_min = min(best_min, total)
    return best_max, best_min


def _lp_oracle(L1: DualVector, L2: DualVector, v: ConeVec) -> Tuple[Fraction, Fraction]:
    """0 ≤ v1 ≤ v 上の L1(v1) + L2(v − v1) を LP で最大化・最小化する"""
    mu = L1.cone.mu
    diff = [(a.value - b.value) * m for a, b, m in zip(L1.f, L2.f, mu)]
    base = sum((b.value * x.value * m for b, x, m in zip(L2.f, v, mu)), Fraction(0))
    n = len(v)
    A = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    b = [x.value for x in v]
    high = solve_lp([-d for d in diff], A, b)
    low = solve_lp(diff, A, b)
    return base - high.value, base + low.value


def rk_join_meet(L1: DualVector, L2: DualVector, v: ConeVec) -> RKResult:
    """
    Riesz–Kantorovich の公式で (L1∨L2)(v) と (L1∧L2)(v) を求める

    閉形式 Σ max(f1,f2)_i v_i μ_i, Σ min(f1,f2)_i v_i μ_i と最適分解 v = v1 + v2 を返し、
    刻み 1/8 の分解格子と LP (すべて有限のとき) で照合する。

    Args:
        L1: 双対ベクトル
        L2: 双対ベクトル (同じ錐)
        v: 評価点

    Returns:
        RKResult: 上限・下限の値、分解、オラクルの値
    """
    if L1.cone.mu != L2.cone.mu:
        raise ValidationError("異なる錐の双対ベクトルです")
    if len(v) != L1.n:
        raise ValidationError(f"v の長さ {len(v)} が次元 {L1.n} と一致しません")
    join = L1.join(L2)(v)
    meet = L1.meet(L2)(v)
    join_split = _split(v, [a >= b for a, b in zip(L1.f, L2.f)])
    meet_split = _split(v, [a <= b for a, b in zip(L1.f, L2.f)])
    result = RKResult(join, meet, join_split, meet_split)

    # 分解の値が閉形式に一致すること
    if L1(join_split[0]) + L2(join_split[1]) != join or L1(meet_split[0]) + L2(meet_split[1]) != meet:
        raise RuntimeError("Riesz–Kantorovich の分解が閉形式に一致しません")

    if len(v) <= GRID_MAX_DIM:
        result.grid_join, result.grid_meet = _grid_oracle(L1, L2, v)
    if v.is_finite and L1.f.is_finite and L2.f.is_finite:
        result.lp_join, result.lp_meet = _lp_oracle(L1, L2, v)
    logger.debug(f"RK: join = {join}, meet = {meet}")
    return result


def functional_difference(L1: DualVector, L2: DualVector) -> DualVector:
    """
    L1 + M = L2 を満たす M を座標ごとの差 f2 ⊖ f1 として構成する

    Raises:
        NotComparable: f1 ≰ f2 の場合
    """
    if not L1 <= L2:
        raise NotComparable(f"{L1.f} ≰ {L2.f} のため差の汎関数は存在しません")
    return DualVector(L1.cone, L2.f.minus(L1.f))


def order_coincidence_audit(n: int = 3, cases: int = 32, seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """
    離散錐上で L1 ≤ L2 なら L1 + M = L2 となる M が取れることを無作為な組で確認する
    """
    rng = random.Random(seed)
    cone = DiscreteCone([Fraction(rng.randint(1, 4), rng.randint(1, 3)) for _ in range(n)])
    rows = []
    for case in range(cases):
        f1 = cone.random_vec(rng)
        f2 = f1 + cone.random_vec(rng)
        L1, L2 = DualVector(cone, f1), DualVector(cone, f2)
        M = functional_difference(L1, L2)
        samples = [cone.random_vec(rng) for _ in range(8)]
        ok = all(L1(g) + M(g) == L2(g) for g in samples)
        rows.append({"case": case, "f1": f1.to_json(), "f2": f2.to_json(), "holds": ok})
    passed = all(r["holds"] for r in rows)
    return {"rows": rows, "verdict": "pass" if passed else "fail"}


# ----------------------------------------------------------------------
# 拡張ステップ
# ----------------------------------------------------------------------
@dataclass
class ExtensionStep:
    v: Vector
    value: ExtNonneg
    witness: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"v": _vec_json(self.v), "value": self.value.to_json(), "witness": self.witness}


class _Layout:
    """
    拡張 LP の変数配置: α (a の係数), γ (c の係数), b, d, s (ψ の上界), r (φ の下界)

    φ が零写像なら b, r を、ψ が ∞-写像なら d, s を持たない。
    """

    def __init__(self, spec: SubwedgeSpec, bounds: BoundPair):
        self.spec = spec
        self.bounds = bounds
        m, n = spec.m, spec.n
        self.alpha = list(range(0, m))
        self.gamma = list(range(m, 2 * m))
        pos = 2 * m
        self.b: List[int] = []
        self.d: List[int] = []
        if not bounds.phi_is_zero:
            self.b = list(range(pos, pos + n))
            pos += n
        if not bounds.psi_is_infinite:
            self.d = list(range(pos, pos + n))
            pos += n
        self.s = pos if not bounds.psi_is_infinite else None
        pos += 0 if self.s is None else 1
        self.r = pos if not bounds.phi_is_zero else None
        pos += 0 if self.r is None else 1
        self.size = pos

    def objective(self) -> List[Fraction]:
        """M(c) + ψ(d) − M(a) − φ(b)"""
        c = [Fraction(0)] * self.size
        for k, val in enumerate(self.spec.values):
            c[self.alpha[k]] = -val
            c[self.gamma[k]] = val
        if self.s is not None:
            c[self.s] = Fraction(1)
        if self.r is not None:
            c[self.r] = Fraction(-1)
        return c

    def constraints(self, v: Sequence[Fraction]) -> Tuple[List[List[Fraction]], List[Fraction]]:
        """a + v + b ≤ c + d (座標ごと) と s ≥ L_{ψ_k}(d), r ≤ L_{φ_j}(b)"""
        A: List[List[Fraction]] = []
        rhs: List[Fraction] = []
        for i in range(self.spec.n):
            row = [Fraction(0)] * self.size
            for k, g in enumerate(self.spec.generators):
                row[self.alpha[k]] = g[i]
                row[self.gamma[k]] = -g[i]
            if self.b:
                row[self.b[i]] = Fraction(1)
            if self.d:
                row[self.d[i]] = Fraction(-1)
            A.append(row)
            rhs.append(-v[i])
        if self.s is not None:
            for w in self.bounds.weights(self.bounds.psi):
                row = [Fraction(0)] * self.size
                for i, wi in enumerate(w):
                    row[self.d[i]] = wi
                row[self.s] = Fraction(-1)
                A.append(row)
                rhs.append(Fraction(0))
        if self.r is not None:
            for w in self.bounds.weights(self.bounds.phi):
                row = [Fraction(0)] * self.size
                for i, wi in enumerate(w):
                    row[self.b[i]] = -wi
                row[self.r] = Fraction(1)
                A.append(row)
                rhs.append(Fraction(0))
        return A, rhs

    def quadruple(self, x: Sequence[Fraction], v: Optional[Sequence[Fraction]] = None) -> Dict[str, Any]:
        """解から (a, b, c, d) を組み立てる (v を渡すと b に v を加える)"""
        n = self.spec.n
        a, _ = self.spec.combine([x[j] for j in self.alpha])
        c, _ = self.spec.combine([x[j] for j in self.gamma])
        b = [x[j] for j in self.b] if self.b else [Fraction(0)] * n
        d = [x[j] for j in self.d] if self.d else [Fraction(0)] * n
        if v is not None:
            b = [bi + vi for bi, vi in zip(b, v)]
        return {"a": _vec_json(a), "b": _vec_json(b), "c": _vec_json(c), "d": _vec_json(d)}


def _check_size(spec: SubwedgeSpec) -> None:
    if spec.m + spec.n > LP_MAX_SIZE:
        raise BudgetExceeded(f"LP の規模 m + n = {spec.m + spec.n} が上限 {LP_MAX_SIZE} を超えます")


def check_hypothesis(spec: SubwedgeSpec, bounds: BoundPair) -> None:
    """
    拡張の仮定 a + b ≤ c + d ⇒ M(a) + φ(b) ≤ M(c) + ψ(d) を LP で確認する

    斉次なので係数の総和 ≤ 1 で正規化し、目的関数の最小値が負なら反例の4つ組を返す。

    Raises:
        HypothesisFailed: 仮定が成り立たない場合 (witness に (a, b, c, d))
    """
    layout = _Layout(spec, bounds)
    A, rhs = layout.constraints([Fraction(0)] * spec.n)
    norm = [Fraction(0)] * layout.size
    for j in layout.alpha + layout.gamma + layout.b + layout.d:
        norm[j] = Fraction(1)
    A.append(norm)
    rhs.append(Fraction(1))
    result = solve_lp(layout.objective(), A, rhs, lexicographic=True)
    if result.status == UNBOUNDED:
        raise Unbounded("仮定の検査 LP が非有界です")
    if result.value < 0:
        witness = layout.quadruple(result.x)
        logger.warning(f"拡張の仮定が成り立ちません: {witness}")
        raise HypothesisFailed("a + b ≤ c + d なのに M(a) + φ(b) > M(c) + ψ(d) となる組があります", witness)


def extension_step(spec: SubwedgeSpec, bounds: BoundPair, v: Sequence[Any],
                   verify: bool = True) -> ExtensionStep:
    """
    1方向の拡張値 M̂(v) = inf {(M(c) + ψ(d)) ⊖ (M(a) + φ(b)) : a + v + b ≤ c + d} を厳密な LP で求める

    φ = 0, ψ = ∞-写像なら inf {M(c) − M(a) : a + v ≤ c, a, c ∈ W′} に帰着する。
    制約を満たす組がなければ +∞。

    Args:
        spec: 部分楔と値
        bounds: 上下界
        v: 拡張する方向 (非負有理数)
        verify: 先に仮定を確認するか

    Returns:
        ExtensionStep: 値と最適な (a, b, c, d)

    Raises:
        BudgetExceeded: m + n が LP_MAX_SIZE を超える場合
        HypothesisFailed: 仮定が成り立たない場合
        Unbounded: LP が非有界の場合
    """
    v = tuple(to_fraction(x) for x in v)
    if len(v) != spec.n:
        raise ValidationError(f"v の長さ {len(v)} が次元 {spec.n} と一致しません")
    if any(x < 0 for x in v):
        raise ValidationError("v は非負である必要があります")
    _check_size(spec)
    if verify:
        check_hypothesis(spec, bounds)

    layout = _Layout(spec, bounds)
    A, rhs = layout.constraints(v)
    result = solve_lp(layout.objective(), A, rhs, lexicographic=True)
    if result.status == INFEASIBLE:
        logger.debug(f"v = {[str(x) for x in v]}: 制約族が空なので M̂(v) = +∞")
        return ExtensionStep(v, INF)
    if result.status == UNBOUNDED:
        raise Unbounded(f"v = {[str(x) for x in v]} で拡張 LP が非有界です")
    if result.value < 0:
        raise HypothesisFailed("拡張 LP の最適値が負です", layout.quadruple(result.x, v))
    step = ExtensionStep(v, ExtNonneg(result.value), layout.quadruple(result.x))
    logger.debug(f"M̂({[str(x) for x in v]}) = {step.value}")
    return step


@dataclass
class ExtensionResult:
    functional: DualVector
    order: List[int]
    steps: List[ExtensionStep]
    extends: bool
    within_bounds: bool
    grid_points: int
    mcp: Optional[McpReport] = None

    @property
    def passed(self) -> bool:
        return self.extends and self.within_bounds and (self.mcp is None or self.mcp.passed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "functional": self.functional.to_json(),
            "order": self.order,
            "steps": [s.to_dict() for s in self.steps],
            "extends": self.extends,
            "within_bounds": self.within_bounds,
            "grid_points": self.grid_points,
            "mcp": None if self.mcp is None else self.mcp.to_dict(),
            "verdict": "pass" if self.passed else "fail",
        }


def _sample_grid(n: int) -> List[ConeVec]:
    levels = [ZERO, ExtNonneg(Fraction(1, 2)), ExtNonneg(1), ExtNonneg(2)]
    if n <= GRID_MAX_DIM:
        return [ConeVec(p) for p in itertools.product(levels, repeat=n)]
    # 高次元では座標軸と対角のみ
    grid = [ConeVec.zeros(n), ConeVec([1] * n)]
    for i in range(n):
        grid.append(ConeVec([1 if j == i else 0 for j in range(n)]))
    return grid


def extend_all(spec: SubwedgeSpec, bounds: BoundPair, order: Optional[Sequence[int]] = None,
               budget: int = SAMPLED_CHAINS, seed: int = DEFAULT_SEED) -> ExtensionResult:
    """
    基本ベクトル e_i を与えられた順に W′ へ加えて全体に拡張する

    各ステップで M̂(e_i) を求め、有限なら (e_i, M̂(e_i)) を生成元に追加する (+∞ の方向は
    以後の a, c に使えないので加えない)。結果の f_i = M̂(e_i)/μ_i は双対ベクトルなので
    射影 Pr で不変であり、鎖による Mcp 検査で確かめる。

    Returns:
        ExtensionResult: 双対ベクトル、各ステップ、拡張性と上下界の確認

    Raises:
        BudgetExceeded: m + n が LP_MAX_SIZE を超える場合
        HypothesisFailed: 仮定が成り立たない場合
    """
    n = spec.n
    order = list(range(n)) if order is None else [int(i) for i in order]
    if sorted(order) != list(range(n)):
        raise ValidationError(f"基底の順序は 0..{n - 1} の並べ替えである必要があります: {order}")
    _check_size(spec)
    check_hypothesis(spec, bounds)

    current = spec
    values: List[ExtNonneg] = [ZERO] * n
    steps = []
    for i in order:
        e = tuple(Fraction(1) if j == i else Fraction(0) for j in range(n))
        step = extension_step(current, bounds, e, verify=False)
        steps.append(step)
        values[i] = step.value
        if not step.value.is_inf:
            current = current.with_generator(e, step.value.value)
        logger.info(f"e_{i}: M̂ = {step.value}")

    cone = spec.cone
    f = ConeVec(val / m for val, m in zip(values, cone.mu))
    L = DualVector(cone, f)

    extends = all(L(ConeVec(g)) == ExtNonneg(val) for g, val in zip(spec.generators, spec.values))
    grid = _sample_grid(n)
    within = all(bounds.lower(g) <= L(g) <= bounds.upper(g) for g in grid)
    mcp = check_mcp(sum_functional_map(cone, f, name="extension"), budget, seed)
    result = ExtensionResult(L, order, steps, extends, within, len(grid), mcp)
    if not result.passed:
        logger.warning(f"拡張の検証に失敗しました: extends={extends}, within_bounds={within}")
    return result


# ----------------------------------------------------------------------
# 古典的な Hahn–Banach
# ----------------------------------------------------------------------
class Sublinear:
    """多面体型の劣線形関数 p(v) = max_j ℓ_j·v"""

    def __init__(self, forms: Sequence[Sequence[Any]]):
        self.forms: List[Vector] = [tuple(to_fraction(x) for x in f) for f in forms]
        if not self.forms:
            raise ValidationError("p には少なくとも1つの線形形式が必要です")
        self.d = len(self.forms[0])
        if any(len(f) != self.d for f in self.forms):
            raise ValidationError("線形形式の長さが揃っていません")

    def __call__(self, v: Sequence[Fraction]) -> Fraction:
        return max(_dot(f, v) for f in self.forms)

    def dominates(self, t: Sequence[Fraction]) -> Optional[List[Fraction]]:
        """t ≤ p なら t を ℓ_j の凸結合で表す重みを返す (そうでなければ None)"""
        k = len(self.forms)
        A_eq = [[f[i] for f in self.forms] for i in range(self.d)] + [[Fraction(1)] * k]
        b_eq = list(t) + [Fraction(1)]
        result = solve_lp([Fraction(0)] * k, A_eq=A_eq, b_eq=b_eq, lexicographic=True)
        return result.x if result.optimal else None

    def to_json(self) -> Dict[str, Any]:
        return {"forms": [_vec_json(f) for f in self.forms]}


@dataclass
class HahnBanachResult:
    t_hat: List[Fraction]
    weights: List[Fraction]
    m_hat: List[Dict[str, Any]]
    extension: ExtensionResult
    generators: int
    extends: bool
    hull_weights: Optional[List[Fraction]]
    lp_agrees: bool
    grid_levels: List[int]
    grid_ok: bool

    @property
    def passed(self) -> bool:
        return (self.extension.passed and self.extends and self.hull_weights is not None
                and self.lp_agrees and self.grid_ok)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t_hat": _vec_json(self.t_hat),
            "weights": _vec_json(self.weights),
            "future_cone_values": self.m_hat,
            "future_cone_generators": self.generators,
            "extension": self.extension.to_dict(),
            "extends": self.extends,
            "hull_weights": None if self.hull_weights is None else _vec_json(self.hull_weights),
            "lp_agrees": self.lp_agrees,
            "grid_levels": self.grid_levels,
            "grid_ok": self.grid_ok,
            "verdict": "pass" if self.passed else "fail",
        }


def _subspace_lp(p: Sublinear, basis: List[Vector], T: List[Fraction],
                 target: Vector, box: bool) -> Tuple[Any, Any]:
    """
    w = Σ β_j b_j について min s − T(w), s ≥ ℓ·(w − target) を解く

    変数は β (符号自由) と s (符号自由)。box なら |β_j| ≤ 1 を課す。
    """
    k = len(basis)
    A, rhs = [], []
    for form in p.forms:
        A.append([_dot(form, b) for b in basis] + [Fraction(-1)])
        rhs.append(_dot(form, target))
    if box:
        for j in range(k):
            for sign in (1, -1):
                row = [Fraction(0)] * (k + 1)
                row[j] = Fraction(sign)
                A.append(row)
                rhs.append(Fraction(1))
    c = [-t for t in T] + [Fraction(1)]
    result = solve_lp(c, A, rhs, free=[True] * (k + 1), lexicographic=True)
    return result, [sum((result.x[j] * b[i] for j, b in enumerate(basis)), Fraction(0))
                    for i in range(p.d)] if result.optimal else None


def _lp_bounds(p: Sublinear, basis: List[Vector], T: List[Fraction], e: Vector) -> Tuple[Fraction, Fraction]:
    """T ≤ p を保つ拡張の T̂(e) がとりうる区間 [max_w T(w) − p(w − e), min_w p(w + e) − T(w)]"""
    minus_e = tuple(-x for x in e)
    if not basis:
        return -p(minus_e), p(e)
    low, _ = _subspace_lp(p, basis, T, e, box=False)
    high, _ = _subspace_lp(p, basis, T, minus_e, box=False)
    if not (low.optimal and high.optimal):
        raise Unbounded(f"T̂({[str(x) for x in e]}) の範囲を求める LP が {low.status}/{high.status} です")
    return -low.value, high.value


def _det(rows: List[List[Fraction]]) -> Fraction:
    if not rows:
        return Fraction(1)
    return sum(((-1) ** j * rows[0][j] * _det([r[:j] + r[j + 1:] for r in rows[1:]])
                for j in range(len(rows)) if rows[0][j]), Fraction(0))


def _rank(rows: Sequence[Sequence[Fraction]]) -> int:
    work = [list(r) for r in rows]
    rank = 0
    for c in range(len(work[0]) if work else 0):
        pivot = next((i for i in range(rank, len(work)) if work[i][c] != 0), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for i in range(len(work)):
            if i != rank and work[i][c] != 0:
                factor = work[i][c] / work[rank][c]
                work[i] = [a - factor * b for a, b in zip(work[i], work[rank])]
        rank += 1
    return rank


def _null_direction(rows: Sequence[Sequence[Fraction]], k: int) -> Optional[Vector]:
    """k − 1 本の行すべてに直交する方向 (一般化された外積)"""
    beta = tuple((-1) ** j * _det([list(r[:j]) + list(r[j + 1:]) for r in rows]) for j in range(k))
    return beta if any(beta) else None


def _fan_rays(p: Sublinear, basis: List[Vector]) -> List[Vector]:
    """
    p を部分空間に制限したときの線形性の領域の辺 (部分空間の座標で、正規化済み)

    辺はちょうど k − 1 本の独立な等号 ℓ_i = ℓ_j が成り立つ方向。
    領域が直線を含むときは座標方向 ±e_j も加える。
    """
    k = len(basis)
    if k == 0:
        return []
    restricted = [tuple(_dot(f, b) for b in basis) for f in p.forms]
    normals = [tuple(a - b for a, b in zip(f, g)) for f, g in itertools.combinations(restricted, 2)]
    normals = [n for n in normals if any(n)]
    rays = set()
    for rows in itertools.combinations(normals, k - 1):
        beta = _null_direction(rows, k)
        if beta is None:
            continue
        for sign in (1, -1):
            cand = tuple(sign * x for x in beta)
            values = [_dot(f, cand) for f in restricted]
            top = max(values)
            active = [f for f, val in zip(restricted, values) if val == top]
            tie = [[a - b for a, b in zip(f, active[0])] for f in active[1:]]
            if _rank(tie) == k - 1:
                lead = abs(next(x for x in cand if x != 0))
                rays.add(tuple(x / lead for x in cand))
    if _rank(normals) < k:
        for j in range(k):
            for sign in (1, -1):
                rays.add(tuple(Fraction(sign if i == j else 0) for i in range(k)))
    return sorted(rays)


def future_cone_spec(p: Sublinear, basis: List[Vector], T: List[Fraction]) -> SubwedgeSpec:
    """
    未来錐 F = {(t, v) : p(v) ≤ t} を座標 x_j = t − ℓ_j·v で ℚ_{≥0}^k に埋め込み、
    部分楔 F′ = {(t, v) ∈ F : v ∈ V′} の生成元と M(t, v) = t − T(v) を返す

    F′ は (1, 0) と各辺 w = Σ β_j b_j の (p(w), w) で生成される。
    F の順序 (t,v) ⪯ (s,w) ⇔ p(w − v) ≤ s − t は埋め込み先の座標ごとの順序と一致する。
    """
    points = [(Fraction(1), tuple(Fraction(0) for _ in range(p.d)), Fraction(0))]
    for beta in _fan_rays(p, basis):
        w = tuple(sum((c * b[i] for c, b in zip(beta, basis)), Fraction(0)) for i in range(p.d))
        points.append((p(w), w, _dot(beta, T)))
    generators = [[t - _dot(f, v) for f in p.forms] for t, v, _ in points]
    values = [t - tv for t, _, tv in points]
    logger.debug(f"未来錐: 座標 {len(p.forms)}, F′ の生成元 {len(generators)}")
    return SubwedgeSpec(DiscreteCone([1] * len(p.forms)), generators, values)


def hahn_banach(p_forms: Sequence[Sequence[Any]], basis: Sequence[Sequence[Any]], T_values: Sequence[Any],
                grid_levels: Sequence[int] = (1, 2, 4), budget: int = SAMPLED_CHAINS,
                seed: int = DEFAULT_SEED) -> HahnBanachResult:
    """
    部分空間上の T ≤ p を ℚ^d 全体の線形 T̂ ≤ p に拡張する

    未来錐 F 上の部分楔 F′ と M(t, v) = t − T(v) ≥ 0 を作り、φ = 0, ψ = ∞-写像として
    extend_all で拡張する。拡張は埋め込み先の双対ベクトル w なので M̂(t, v) = Σ_j w_j (t − ℓ_j·v)、
    M̂(1, 0) = Σ_j w_j = 1 から T̂ = Σ_j w_j ℓ_j を得る (ℓ_j の凸結合なので T̂ ≤ p)。
    部分空間上の LP が与える T̂(e_i) の範囲と照合する。

    Args:
        p_forms: p を定める線形形式
        basis: 部分空間の基底
        T_values: 基底での T の値
        grid_levels: T̂ ≤ p を確かめる格子の細かさ
        budget: 拡張の Mcp 検査で使う鎖の数
        seed: 乱数シード

    Returns:
        HahnBanachResult: T̂、未来錐上の拡張、各種確認

    Raises:
        PreconditionFailed: 部分空間上で T ≰ p の場合
        BudgetExceeded: 未来錐の LP が LP_MAX_SIZE を超える場合
    """
    p = Sublinear(p_forms)
    basis_v: List[Vector] = [tuple(to_fraction(x) for x in b) for b in basis]
    T = [to_fraction(t) for t in T_values]
    if len(basis_v) != len(T):
        raise ValidationError(f"基底 {len(basis_v)} 個に対して T の値が {len(T)} 個です")
    if any(len(b) != p.d for b in basis_v):
        raise ValidationError(f"基底の長さが次元 {p.d} と一致しません")

    # T ≤ p on V′ (斉次なので |β_j| ≤ 1 で十分)
    zero = tuple(Fraction(0) for _ in range(p.d))
    if basis_v:
        check, w = _subspace_lp(p, basis_v, T, zero, box=True)
        if check.value < 0:
            raise PreconditionFailed(f"部分空間上で T ≰ p です: w = {[str(x) for x in w]}")

    spec = future_cone_spec(p, basis_v, T)
    extension = extend_all(spec, BoundPair(spec.cone), budget=budget, seed=seed)
    if not extension.functional.f.is_finite:
        raise Unbounded("未来錐上の拡張が有限の双対ベクトルになりません")
    weights = [x.value for x in extension.functional.f]
    t_hat = [sum((wj * f[i] for wj, f in zip(weights, p.forms)), Fraction(0)) for i in range(p.d)]

    m_hat = []
    lp_agrees = True
    for i in range(p.d):
        e = tuple(Fraction(1) if j == i else Fraction(0) for j in range(p.d))
        low, high = _lp_bounds(p, basis_v, T, e)
        if not low <= t_hat[i] <= high:
            lp_agrees = False
            logger.warning(f"T̂(e_{i}) = {t_hat[i]} が LP の範囲 [{low}, {high}] の外です")
        t = p(e)
        m_hat.append({"t": {"num": t.numerator, "den": t.denominator}, "v": _vec_json(e),
                      "m": ExtNonneg(t - t_hat[i]).to_json(), "lp_range": _vec_json([low, high])})
        logger.debug(f"T̂(e_{i}) = {t_hat[i]} ∈ [{low}, {high}]")

    extends = all(_dot(t_hat, b) == t for b, t in zip(basis_v, T))
    hull = p.dominates(t_hat)
    grid_ok = all(_dot(t_hat, v) <= p(v) for level in grid_levels for v in _vertex_grid(p.d, level))
    result = HahnBanachResult(t_hat, weights, m_hat, extension, spec.m, extends, hull, lp_agrees,
                              list(grid_levels), grid_ok)
    logger.info(f"Hahn–Banach: T̂ = {[str(x) for x in t_hat]} ({'pass' if result.passed else 'fail'})")
    return result


def _vertex_grid(d: int, level: int) -> List[Vector]:
    steps = [Fraction(k, level) for k in range(-level, level + 1)]
    return [tuple(v) for v in itertools.product(steps, repeat=d)]
