import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from src.config import CHAIN_LENGTH, DEFAULT_SEED, ITERATION_DEPTH, SAMPLED_CHAINS
from src.models.catalog_cone import CatalogCone
from src.models.cone import AffineChain, ConeVec, DiscreteCone, cone_inf
from src.models.errors import BudgetExceeded, PreconditionFailed, ValidationError
from src.models.extreal import INF, ZERO, ExtNonneg, to_fraction
from src.models.poset import FinitePoset, finite_lattices, unlabelled_posets
from src.services.closure_service import closure_suite
from src.services.parallel import run_cases

# ロガーの設定
logger = logging.getLogger(__name__)

# 予算の上限 (標本鎖数の倍率)
MAX_BUDGET_FACTOR = 100


# ----------------------------------------------------------------------
# 鎖で表示された写像
# ----------------------------------------------------------------------
@dataclass
class ChainPresentedMap:
    """
    鎖 (上限が宣言された単調列) で表示された写像

    value は元の像、source_sup は鎖の宣言された上限、image_sup は像の列の
    厳密な上限を返す。target_leq は値域の順序。
    """
    name: str
    value: Callable[[Any], Any]
    source_sup: Callable[[Any], Any]
    image_sup: Callable[[Any], Any]
    term: Callable[[Any, int], Any]
    source_leq: Callable[[Any, Any], bool]
    target_leq: Callable[[Any, Any], bool]
    sample_chain: Optional[Callable[[random.Random], Any]] = None
    adversarial: List[Any] = field(default_factory=list)
    describe: Callable[[Any], str] = str
    render: Callable[[Any], str] = str


@dataclass
class McpReport:
    name: str
    budget: int
    checked: int = 0
    counterexample: Optional[Dict[str, Any]] = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "verdict": "pass" if self.passed else "fail",
            "budget": self.budget,
            "checked": self.checked,
            "budget_relative": self.passed,
            "note": "予算内の鎖で反例なし (予算相対の判定)" if self.passed else "反例の鎖あり",
            "counterexample": self.counterexample,
        }


def _first(chain: Any) -> int:
    return getattr(chain, "first", 1)


def _check_chain(T: ChainPresentedMap, chain: Any) -> Optional[Dict[str, Any]]:
    """1本の鎖で T(sup x_k) = sup T(x_k) と単調性を確認する"""
    start = _first(chain)
    terms = [T.term(chain, k) for k in range(start, start + CHAIN_LENGTH)]
    top = T.source_sup(chain)
    for x, y in zip(terms, terms[1:]):
        if not T.source_leq(x, y):
            raise ValidationError(f"{T.describe(chain)} は単調な列ではありません")
    if not T.source_leq(terms[-1], top):
        raise ValidationError(f"{T.describe(chain)} の宣言された上限が上界ではありません")
    values = [T.value(x) for x in terms]
    for x, y, vx, vy in zip(terms, terms[1:], values, values[1:]):
        if not T.target_leq(vx, vy):
            return {"kind": "not-monotone", "chain": T.describe(chain),
                    "x": T.render(x), "y": T.render(y),
                    "value_x": T.render(vx), "value_y": T.render(vy)}
    at_sup = T.value(top)
    sup_values = T.image_sup(chain)
    if at_sup != sup_values:
        return {"kind": "sup-not-preserved", "chain": T.describe(chain),
                "sup": T.render(top), "value_at_sup": T.render(at_sup),
                "sup_of_values": T.render(sup_values)}
    return None


def check_mcp(T: ChainPresentedMap, budget: int = SAMPLED_CHAINS, seed: int = DEFAULT_SEED) -> McpReport:
    """
    T(sup x_k) = sup T(x_k) を登録済みの反例候補と標本の鎖で確認する

    無限の定義域では「合格」は予算内で反例が見つからなかったことを意味する。

    Args:
        T: 鎖で表示された写像
        budget: 標本の鎖の数
        seed: 乱数シード

    Returns:
        McpReport: 判定 (反例があれば鎖と2つの値)

    Raises:
        BudgetExceeded: 予算が上限を超えた場合
    """
    if budget < 0:
        raise ValidationError(f"予算は非負である必要があります: {budget}")
    if budget > MAX_BUDGET_FACTOR * SAMPLED_CHAINS:
        raise BudgetExceeded(f"予算 {budget} が上限 {MAX_BUDGET_FACTOR * SAMPLED_CHAINS} を超えています")
    rng = random.Random(seed)
    chains = list(T.adversarial)
    if T.sample_chain is not None:
        chains += [T.sample_chain(rng) for _ in range(budget)]
    report = McpReport(T.name, budget)
    results = run_cases(lambda ch: _check_chain(T, ch), chains)
    for result in results:
        report.checked += 1
        if result is not None:
            report.counterexample = result
            logger.warning(f"{T.name}: Mcp の反例 {result['chain']}")
            return report
    logger.debug(f"{T.name}: {report.checked} 本の鎖で反例なし")
    return report


def linear_chain_sup(weights: Sequence[ExtNonneg], chain: AffineChain) -> ExtNonneg:
    """
    sup_k Σ_i w_i x_{k,i} を厳密に計算する (w_i ∈ [0,∞]、0·∞ = 0)

    座標 i が恒等的に 0 でなければ w_i = ∞ の項は ∞、発散する座標に
    正の重みがあれば ∞、それ以外は Σ w_i a_i。
    """
    total = ZERO
    for w, a, b, c in zip(weights, chain.a, chain.b, chain.c):
        if w.is_zero:
            continue
        if w.is_inf:
            if a or b or c:
                return INF
            continue
        if b > 0:
            return INF
        total = total + w * a
    return total


def sum_functional_map(cone: DiscreteCone, f: ConeVec, name: str = "") -> ChainPresentedMap:
    """L(X) 上の L_f(g) = Σ f_i g_i μ_i"""
    weights = [fi * m for fi, m in zip(f, cone.mu)]
    return ChainPresentedMap(
        name=name or f"sum{list(map(str, f))}",
        value=lambda g: cone.pairing(f, g),
        source_sup=lambda ch: ch.sup(),
        image_sup=lambda ch: linear_chain_sup(weights, ch),
        term=lambda ch, k: ch.term(k),
        source_leq=lambda x, y: x <= y,
        target_leq=lambda s, t: s <= t,
        sample_chain=lambda rng: AffineChain.random(cone.n, rng),
        adversarial=_axis_chains(cone.n),
        describe=lambda ch: ch.describe(),
    )


def _axis_chains(n: int) -> List[AffineChain]:
    """各座標で発散する鎖と 1 − 1/n で収束する鎖"""
    chains = []
    for i in range(n):
        b = [0] * n
        b[i] = 1
        chains.append(AffineChain([0] * n, b, [0] * n))
        a = [0] * n
        c = [0] * n
        a[i] = 1
        c[i] = 1
        chains.append(AffineChain(a, [0] * n, c))
    return chains


def identity_map(cone: DiscreteCone) -> ChainPresentedMap:
    return ChainPresentedMap(
        name="identity",
        value=lambda g: g,
        source_sup=lambda ch: ch.sup(),
        image_sup=lambda ch: ch.sup(),
        term=lambda ch, k: ch.term(k),
        source_leq=lambda x, y: x <= y,
        target_leq=lambda x, y: x <= y,
        sample_chain=lambda rng: AffineChain.random(cone.n, rng),
        adversarial=_axis_chains(cone.n),
        describe=lambda ch: ch.describe(),
    )


def catalog_functional_map(cone_id: str, lam: Any, eta: Any) -> ChainPresentedMap:
    """
    カタログ錐 (a〜d) 上の L_{λ,η}(a,b) = λa + ηb

    Raises:
        UnknownCatalogId: 未知の ID の場合
        ValidationError: e, f (実数値の楔) の場合
    """
    C = CatalogCone(cone_id)
    if not C.extended:
        raise ValidationError(f"錐 {cone_id} は鎖による Mcp 判定の対象外です")
    L = C.functional(lam, eta)
    weights = [ExtNonneg(lam), ExtNonneg(eta)]

    def image_sup(ch: AffineChain) -> ExtNonneg:
        return linear_chain_sup(weights, ch)

    def source_sup(ch: AffineChain) -> Any:
        s = C.chain_sup(ch)
        if s is None:
            raise ValidationError(f"{ch.describe()} は錐 {cone_id} で上限をもちません")
        return s

    return ChainPresentedMap(
        name=f"catalog-{cone_id}({lam},{eta})",
        value=L,
        source_sup=source_sup,
        image_sup=image_sup,
        term=C.term,
        source_leq=C.leq,
        target_leq=lambda s, t: s <= t,
        sample_chain=C.random_chain,
        adversarial=C.witness_chains(),
        describe=lambda ch: ch.describe(),
        render=lambda v: C.render(v) if isinstance(v, tuple) else str(v),
    )


def finite_map(P: FinitePoset, Q: FinitePoset, mapping: Sequence[int], name: str = "") -> ChainPresentedMap:
    """
    有限半順序集合の間の写像 (鎖は極大な鎖、上限は最後の元)

    有限の場合は全ての極大鎖を反例候補として登録する。
    """
    chains = _maximal_chains(P)

    def term(ch: Tuple[int, ...], k: int) -> int:
        return ch[min(k - 1, len(ch) - 1)]

    return ChainPresentedMap(
        name=name or "finite-map",
        value=lambda x: mapping[x],
        source_sup=lambda ch: ch[-1],
        image_sup=lambda ch: Q.sup([mapping[x] for x in ch]),
        term=term,
        source_leq=P.leq,
        target_leq=Q.leq,
        adversarial=chains,
        describe=lambda ch: "<".join(P.labels[x] for x in ch),
        render=lambda x: Q.labels[x] if isinstance(x, int) else str(x),
    )


def _maximal_chains(P: FinitePoset) -> List[Tuple[int, ...]]:
    covers = {x: [y for y in P.elements if y != x and P.leq(x, y)
                  and not any(z not in (x, y) and P.leq(x, z) and P.leq(z, y) for z in P.elements)]
              for x in P.elements}
    minimal = [x for x in P.elements if not any(y != x and P.leq(y, x) for y in P.elements)]
    chains: List[Tuple[int, ...]] = []

    def extend(path: Tuple[int, ...]) -> None:
        nxt = covers[path[-1]]
        if not nxt:
            chains.append(path)
            return
        for y in nxt:
            extend(path + (y,))

    for x in minimal:
        extend((x,))
    return chains


# ----------------------------------------------------------------------
# (a)〜(e) の同値性
# ----------------------------------------------------------------------
class _Closures:
    """有限半順序集合の全部分集合について bar / hat / tip を前計算する"""

    def __init__(self, P: FinitePoset):
        self.P = P
        self.subsets = list(P.subsets())
        self.bar: Dict[frozenset, frozenset] = {}
        self.hat: Dict[frozenset, frozenset] = {}
        for A in self.subsets:
            report = closure_suite(P, A)
            self.bar[A] = frozenset(report.bar)
            self.hat[A] = frozenset(report.hat)

    def closure(self, A: frozenset) -> Tuple[frozenset, frozenset]:
        if A not in self.bar:
            report = closure_suite(self.P, A)
            self.bar[A] = frozenset(report.bar)
            self.hat[A] = frozenset(report.hat)
        return self.bar[A], self.hat[A]

    def tip(self, A: frozenset) -> Optional[int]:
        return self.P.maximum(self.closure(A)[0])


def characterizations(P: FinitePoset, Q: FinitePoset, T: Sequence[int],
                      cp: Optional[_Closures] = None, cq: Optional[_Closures] = None) -> Dict[str, bool]:
    """
    写像 T: P → Q について Mcp の5つの特徴付け (a)〜(e) を評価する

    Args:
        P: 定義域
        Q: 値域
        T: 写像 (添字の列)

    Returns:
        Dict[str, bool]: a〜e と monotone の判定
    """
    cp = cp or _Closures(P)
    cq = cq or _Closures(Q)
    image = lambda A: frozenset(T[a] for a in A)  # noqa: E731
    monotone = P.is_monotone(T, Q)

    # (a) 上限をもつ有向集合の上限を保つ
    a = True
    for D in P.directed_subsets():
        s = P.sup(D)
        if s is None:
            continue
        if Q.sup(image(D)) != T[s]:
            a = False
            break

    # (b) 単調で T(A) ≤ u ⇒ T(hat A) ≤ u
    b = monotone
    if b:
        for A in cp.subsets:
            _, hat_A = cp.closure(A)
            bounds = Q.upper_bounds(image(A))
            if not all(Q.leq(T[x], u) for x in hat_A for u in bounds):
                b = False
                break

    # (c) 単調で T(bar A) ⊆ bar T(A)
    c = monotone
    if c:
        for A in cp.subsets:
            bar_A, _ = cp.closure(A)
            if not image(bar_A) <= cq.closure(image(A))[0]:
                c = False
                break

    # (d) T(hat A) ⊆ hat T(A)
    d = True
    for A in cp.subsets:
        _, hat_A = cp.closure(A)
        if not image(hat_A) <= cq.closure(image(A))[1]:
            d = False
            break

    # (e) 先端をもつ A について T(A) も先端をもち T(tip A) = tip T(A)
    e = True
    for A in cp.subsets:
        t = cp.tip(A)
        if t is None:
            continue
        if cq.tip(image(A)) != T[t]:
            e = False
            break

    return {"a": a, "b": b, "c": c, "d": d, "e": e, "monotone": monotone}


@dataclass
class EquivalenceReport:
    max_n: int
    maps: int = 0
    exhaustive: bool = True
    disagreements: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return not self.disagreements

    def to_dict(self) -> Dict[str, Any]:
        return {
            "max_n": self.max_n,
            "maps": self.maps,
            "exhaustive": self.exhaustive,
            "verdict": "pass" if self.agree else "fail",
            "disagreements": self.disagreements[:10],
        }


def equivalences_audit(max_n: int, budget: int = SAMPLED_CHAINS, seed: int = DEFAULT_SEED) -> EquivalenceReport:
    """
    要素数 max_n 以下の半順序集合の間の写像で (a)〜(e) と単調性が一致するか確認する

    3 以下は全列挙、それを超える分は予算内で無作為抽出する。

    Args:
        max_n: 要素数の上限 (5 以下)
        budget: 抽出する写像の数
        seed: 乱数シード

    Returns:
        EquivalenceReport: 一致しなかった写像の一覧

    Raises:
        ValidationError: max_n が範囲外の場合
    """
    if not 1 <= max_n <= 5:
        raise ValidationError(f"max_n は 1 以上 5 以下である必要があります: {max_n}")
    small = [P for n in range(1, min(max_n, 3) + 1) for P in unlabelled_posets(n)]
    large = [P for n in range(4, max_n + 1) for P in unlabelled_posets(n)]
    closures = {id(P): _Closures(P) for P in small}
    report = EquivalenceReport(max_n, exhaustive=max_n <= 3)

    def record(P: FinitePoset, Q: FinitePoset, T: Sequence[int], verdicts: Dict[str, bool]) -> None:
        report.maps += 1
        if len(set(verdicts.values())) > 1:
            report.disagreements.append({
                "source": P.to_json(), "target": Q.to_json(), "map": list(T), "verdicts": verdicts})

    for P in small:
        for Q in small:
            for T in itertools.product(range(Q.n), repeat=P.n):
                record(P, Q, T, characterizations(P, Q, T, closures[id(P)], closures[id(Q)]))

    if large:
        rng = random.Random(seed)
        everything = small + large
        cache: Dict[int, _Closures] = dict(closures)
        for _ in range(budget):
            P = rng.choice(large)
            Q = rng.choice(everything)
            # 単調な写像も十分に含まれるよう、半分は単調写像から選ぶ
            if rng.random() < 0.5:
                T = _random_monotone(P, Q, rng)
            else:
                T = [rng.randrange(Q.n) for _ in range(P.n)]
            for R in (P, Q):
                if id(R) not in cache:
                    cache[id(R)] = _Closures(R)
            record(P, Q, T, characterizations(P, Q, T, cache[id(P)], cache[id(Q)]))

    if report.agree:
        logger.info(f"(a)〜(e) の同値性: {report.maps} 個の写像で一致")
    else:
        logger.warning(f"(a)〜(e) の同値性: {len(report.disagreements)} 件の不一致")
    return report


def _random_monotone(P: FinitePoset, Q: FinitePoset, rng: random.Random) -> List[int]:
    """線形拡大の順に上界を保ちながら値を選ぶ"""
    order = sorted(P.elements, key=lambda x: len(P.down([x])))
    T = [0] * P.n
    for x in order:
        below = [T[y] for y in P.elements if y != x and P.leq(y, x) and y in order[:order.index(x)]]
        options = sorted(Q.upper_bounds(below))
        T[x] = rng.choice(options) if options else rng.randrange(Q.n)
    return T


# ----------------------------------------------------------------------
# 射影 Pr
# ----------------------------------------------------------------------
@dataclass
class ProjectionReport:
    projected: List[int]
    oracle: Optional[List[int]] = None
    minorants: int = 0

    @property
    def agrees(self) -> bool:
        return self.oracle is None or self.oracle == self.projected

    def to_dict(self, L: Optional[FinitePoset] = None) -> Dict[str, Any]:
        def show(values: Optional[List[int]]) -> Any:
            if values is None:
                return None
            return [L.labels[v] for v in values] if L is not None else values
        return {"projected": show(self.projected), "oracle": show(self.oracle),
                "minorants": self.minorants, "verdict": "pass" if self.agrees else "fail"}


def _check_complete_lattice(L: FinitePoset) -> None:
    if not L.is_complete_lattice():
        raise PreconditionFailed("値域は有限完備束である必要があります")


def pr_project_finite(P: FinitePoset, L: FinitePoset, T: Sequence[int], oracle: bool = True) -> ProjectionReport:
    """
    Pr(T)(x) = ∧{T(y) : y ≥ x} を計算し、全列挙した単調な下界の上限と照合する

    Args:
        P: 定義域 (有限半順序集合)
        L: 値域 (有限完備束)
        T: 写像
        oracle: 全列挙による照合を行うか

    Returns:
        ProjectionReport: 射影と照合結果

    Raises:
        PreconditionFailed: 値域が完備束でない場合
    """
    _check_complete_lattice(L)
    if len(T) != P.n:
        raise ValidationError("写像の長さが定義域と一致しません")
    projected = [L.inf([T[y] for y in P.up_set([x])]) for x in P.elements]
    report = ProjectionReport(projected)
    if oracle:
        options = [[y for y in L.elements if L.leq(y, T[x])] for x in P.elements]
        best = [L.bottom()] * P.n
        for S in itertools.product(*options):
            if P.is_monotone(S, L):
                report.minorants += 1
                best = [L.join(a, b) for a, b in zip(best, S)]
        report.oracle = best
        if not report.agrees:
            logger.error(f"Pr の計算が全列挙と一致しません: {projected} != {best}")
    return report


def _complete_targets(max_n: int) -> List[FinitePoset]:
    seen: Dict[bytes, FinitePoset] = {}
    for L in finite_lattices(max_n):
        seen.setdefault(L.canonical_key(), L)
    return list(seen.values())


def _projection_case(args: Tuple[FinitePoset, FinitePoset, int]) -> Dict[str, Any]:
    P, L, seed = args
    rng = random.Random(seed)
    T = [rng.randrange(L.n) for _ in P.elements]
    # T ≤ T′ を各点で上に動かして作る
    T_up = [rng.choice(sorted(L.upper_bounds([t]))) for t in T]
    report = pr_project_finite(P, L, T)
    again = pr_project_finite(P, L, report.projected, oracle=False).projected
    upper = pr_project_finite(P, L, T_up, oracle=False).projected
    return {
        "P": P.n, "L": L.n, "T": T,
        "oracle": report.agrees,
        "idempotent": again == report.projected,
        "monotone": all(L.leq(a, b) for a, b in zip(report.projected, upper)),
        "is_monotone_minorant": P.is_monotone(report.projected, L)
        and all(L.leq(a, t) for a, t in zip(report.projected, T)),
    }


def projection_audit(cases: int = 1000, max_n: int = 5, max_lattice: int = 4,
                     seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """
    無作為な写像 T: P → L で Pr を全列挙の上限と照合し、冪等性と単調性を確かめる

    P は要素数 max_n 以下の非同型な半順序、L は要素数 max_lattice 以下の有限束。

    Returns:
        Dict[str, Any]: 性質ごとの件数と最初の失敗例
    """
    rng = random.Random(seed)
    sources = [P for n in range(1, max_n + 1) for P in unlabelled_posets(n)]
    targets = _complete_targets(max_lattice)
    jobs = [(rng.choice(sources), rng.choice(targets), seed * 7919 + k) for k in range(cases)]
    results = run_cases(_projection_case, jobs)
    rows = []
    for family in ("oracle", "idempotent", "monotone", "is_monotone_minorant"):
        failures = [r for r in results if not r[family]]
        rows.append({"family": f"projection_{family}", "anchor": "mcp.projection", "checked": len(results),
                     "failed": len(failures), "first_failure": failures[0] if failures else None})
    verdict = "pass" if all(r["failed"] == 0 for r in rows) else "fail"
    logger.info(f"Pr の照合: {cases} 件 ({verdict})")
    return {"rows": rows, "verdict": verdict}


def p_iterate_finite(P: FinitePoset, L: FinitePoset, T: Sequence[int],
                     depth: Optional[int] = None) -> List[List[int]]:
    """
    P(T)(x) = inf{sup T(A) : A 有向, sup A = x} の反復を不動点まで計算する

    単調な T に対してのみ公開する。

    Returns:
        List[List[int]]: 反復の列 (最後が不動点)

    Raises:
        PreconditionFailed: T が単調でない場合、または値域が完備束でない場合
        BudgetExceeded: 反復が上限を超えた場合
    """
    _check_complete_lattice(L)
    if not P.is_monotone(T, L):
        raise PreconditionFailed("P の反復は単調な写像に対してのみ扱います")
    depth = ITERATION_DEPTH if depth is None else depth
    directed = [(D, P.sup(D)) for D in P.directed_subsets()]
    current = list(T)
    iterates = [current]
    for _ in range(depth + 1):
        nxt = []
        for x in P.elements:
            sups = [L.sup([current[a] for a in D]) for D, s in directed if s == x]
            nxt.append(L.inf(sups))
        if nxt == current:
            return iterates
        iterates.append(nxt)
        current = nxt
    raise BudgetExceeded(f"P の反復が上限 {depth} を超えました")


@dataclass
class WeightedFunctionalSpec:
    """L(g) = Σ w_i g_i μ_i (g が S の外で 0 のとき)、それ以外は +∞"""
    mu: Tuple[Fraction, ...]
    w: Tuple[ExtNonneg, ...]
    support: Tuple[int, ...]

    def __post_init__(self) -> None:
        self.mu = tuple(to_fraction(m) for m in self.mu)
        self.w = tuple(x if isinstance(x, ExtNonneg) else ExtNonneg(x) for x in self.w)
        self.support = tuple(sorted(set(self.support)))
        if len(self.mu) != len(self.w):
            raise ValidationError("μ と w の長さが一致しません")
        if any(m <= 0 for m in self.mu):
            raise ValidationError("重みは正である必要があります")
        if any(not 0 <= i < len(self.mu) for i in self.support):
            raise ValidationError(f"台の添字が範囲外です: {self.support}")

    @property
    def n(self) -> int:
        return len(self.mu)

    def __call__(self, g: ConeVec) -> ExtNonneg:
        if any(not g[i].is_zero for i in range(self.n) if i not in self.support):
            return INF
        total = ZERO
        for i in self.support:
            total = total + self.w[i] * g[i] * self.mu[i]
        return total


@dataclass
class WeightedProjection:
    f: ConeVec
    mcp: McpReport
    dominated: bool
    maximal: bool
    grid_points: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "f": self.f.to_json(),
            "mcp": self.mcp.to_dict(),
            "dominated": self.dominated,
            "maximal": self.maximal,
            "grid_points": self.grid_points,
            "verdict": "pass" if self.mcp.passed and self.dominated and self.maximal else "fail",
        }


def pr_project_weighted(spec: WeightedFunctionalSpec, budget: int = SAMPLED_CHAINS,
                        seed: int = DEFAULT_SEED) -> WeightedProjection:
    """
    重みつき汎関数の射影 f (S 上で w、S の外で +∞) を求めて検証する

    L_f の Mcp、格子点上の L_f ≤ L、そして f のどの有限座標を増やしても
    基本ベクトル上で L_f ≤ L が破れることを確認する。
    """
    f = ConeVec(spec.w[i] if i in spec.support else INF for i in range(spec.n))
    cone = DiscreteCone(spec.mu)
    mcp = check_mcp(sum_functional_map(cone, f, name="projected-weighted"), budget, seed)

    grid = [ConeVec(p) for p in itertools.product([ZERO, ExtNonneg(Fraction(1, 2)), ExtNonneg(1), INF],
                                                  repeat=min(spec.n, 4))]
    if spec.n > 4:
        grid = [ConeVec(list(g) + [ZERO] * (spec.n - 4)) for g in grid]
    dominated = all(cone.pairing(f, g) <= spec(g) for g in grid)

    # 有限座標 i を増やすと e_i で L を超える
    maximal = True
    for i, fi in enumerate(f):
        if fi.is_inf:
            continue
        e = ConeVec([1 if j == i else 0 for j in range(spec.n)])
        bumped = ConeVec([x + 1 if j == i else x for j, x in enumerate(f)])
        if not cone.pairing(bumped, e) > spec(e):
            maximal = False
    return WeightedProjection(f, mcp, dominated, maximal, len(grid))


def _filtered_term(i: int, width: int) -> ConeVec:
    """A_i の先頭 width 座標"""
    return ConeVec([ZERO] * min(i, width) + [INF] * max(0, width - i))


def filtered_inf_demo(N: int = 4) -> Dict[str, Any]:
    """
    A_i = (0,…,0,∞,∞,…) (先頭 i 個が 0) の減少列で和 T が下限を保たないことを示す

    窓 {1..N} には A_0..A_N の先頭 N 座標を表示する。T は窓を広げると単調に増えるので、
    T(A_i) は先頭 N + 1 座標の和で下から押さえる。各座標はいずれ 0 になるため下限は 0。

    Returns:
        Dict[str, Any]: T(inf A_i) と inf T(A_i)、鎖、各種確認
    """
    if N < 1:
        raise ValidationError(f"N は 1 以上である必要があります: {N}")
    chain = [_filtered_term(i, N) for i in range(N + 1)]
    filtered = all(chain[i + 1] <= chain[i] for i in range(N))
    # 窓の外の座標 N+k は i > N+k の A_i で 0 なので下限は窓の下限と一致する
    infimum = cone_inf(chain)
    total = lambda v: sum(v, ZERO)  # noqa: E731
    values = [total(_filtered_term(i, N + 1)) for i in range(N + 1)]
    inf_values = min(values)
    result = {
        "N": N,
        "chain": [v.to_json() for v in chain],
        "filtered": filtered,
        "T_of_inf": total(infimum).to_json(),
        "inf_of_T": inf_values.to_json(),
        "T_values": [v.to_json() for v in values],
        "T_of_A_N_on_window": total(chain[N]).to_json(),
        "respects_filtered_inf": total(infimum) == inf_values,
    }
    logger.debug(f"下限の非保存: T(inf) = {total(infimum)}, inf T = {inf_values}")
    return result


def pointwise_sup_family_check(n: int = 3, cases: int = 16, seed: int = DEFAULT_SEED,
                               budget: int = SAMPLED_CHAINS // 4) -> Dict[str, Any]:
    """
    L_{f_j} (f_j は単調な双対ベクトルの鎖) の各点上限が Mcp をもつことを確認する

    各点上限 T(g) = sup_j L_{f_j}(g) を鎖の上限として直接計算し、
    L_{sup f_j} と一致することと check_mcp の合格を確かめる。
    """
    rng = random.Random(seed)
    cone = DiscreteCone([Fraction(rng.randint(1, 3), rng.randint(1, 3)) for _ in range(n)])
    rows = []
    for case in range(cases):
        family = AffineChain.random(n, rng)
        F = family.sup()

        def pointwise(g: ConeVec, family: AffineChain = family) -> ExtNonneg:
            return linear_chain_sup([gi * m for gi, m in zip(g, cone.mu)], family)

        T = sum_functional_map(cone, F, name=f"pointwise-sup{case}")
        samples = [cone.random_vec(rng) for _ in range(8)]
        formula = all(pointwise(g) == cone.pairing(F, g) for g in samples)
        T.value = pointwise
        report = check_mcp(T, budget, seed + case)
        rows.append({"case": case, "family": family.describe(), "formula": formula,
                     "mcp": report.passed})
    passed = all(r["formula"] and r["mcp"] for r in rows)
    return {"rows": rows, "verdict": "pass" if passed else "fail"}
