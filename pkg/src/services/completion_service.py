import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.config import DEFAULT_SEED, ITERATION_DEPTH, SAMPLED_CHAINS
from src.models.branch_poset import (BOTTOM, AttachRule, Branch, BranchPoset, Code,
                                     Condition, Slice)
from src.models.cone import AffineChain, ConeVec, DiscreteCone
from src.models.errors import (BudgetExceeded, NoJoins, UnsupportedPresentation,
                               ValidationError)
from src.models.extreal import INF
from src.models.poset import FinitePoset
from src.services.closure_service import closure_suite, render_subset

# ロガーの設定
logger = logging.getLogger(__name__)

# 分岐表示の検査で使う添字の窓
CHECK_WINDOW = 3

TOP_LABEL = "⊤"


def code_label(code: Code) -> str:
    sort, idx = code
    return f"{sort}{list(idx)}" if idx else sort


# ----------------------------------------------------------------------
# Dedekind–MacNeille 完備化
# ----------------------------------------------------------------------
@dataclass
class DMCompletion:
    """切断の束と埋め込み ι_DM"""
    source: FinitePoset
    cuts: List[FrozenSet[int]]
    lattice: FinitePoset
    embedding: List[int]
    added: List[int] = field(default_factory=list)

    def join(self, i: int, j: int) -> int:
        """(A ∪ B)^{ul}"""
        return self.index_of(ul(self.source, self.cuts[i] | self.cuts[j]))

    def meet(self, i: int, j: int) -> int:
        return self.index_of(self.cuts[i] & self.cuts[j])

    def index_of(self, cut: FrozenSet[int]) -> int:
        return self.cuts.index(cut)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "size": len(self.cuts),
            "cuts": [sorted(c) for c in self.cuts],
            "labels": list(self.lattice.labels),
            "embedding": list(self.embedding),
            "added": [self.lattice.labels[i] for i in self.added],
            "complete_lattice": self.lattice.is_complete_lattice(),
        }


def ul(P: FinitePoset, A: FrozenSet[int]) -> FrozenSet[int]:
    """A^{ul}"""
    return P.lower_bounds(P.upper_bounds(A))


def dm_completion(P: FinitePoset) -> DMCompletion:
    """
    有限半順序集合の Dedekind–MacNeille 完備化を計算する

    切断 A = A^{ul} は主イデアル ↓x の共通部分として得られるので、
    {X} ∪ {↓x} を共通部分で閉じる。

    Args:
        P: 有限半順序集合

    Returns:
        DMCompletion: 切断の束と埋め込み
    """
    whole = frozenset(P.elements)
    principal = [P.down([x]) for x in P.elements]
    cuts = {whole, *principal}
    frontier = set(cuts)
    while frontier:
        new = set()
        for a in frontier:
            for b in cuts:
                c = a & b
                if c not in cuts and c not in new:
                    new.add(c)
        cuts |= new
        frontier = new
    ordered = sorted(cuts, key=lambda c: (len(c), sorted(c)))
    k = len(ordered)
    leq = np.array([[a <= b for b in ordered] for a in ordered], dtype=bool)

    embedding = [ordered.index(c) for c in principal]
    labels = []
    for i, c in enumerate(ordered):
        if i in embedding:
            labels.append(P.labels[embedding.index(i)])
        elif i == 0:
            labels.append("⊥")
        elif i == k - 1:
            labels.append(TOP_LABEL)
        else:
            labels.append("{" + ",".join(P.labels[x] for x in sorted(c)) + "}")
    lattice = FinitePoset(leq, labels, check=False)
    added = [i for i in range(k) if i not in embedding]
    logger.debug(f"DM 完備化: {P.n} 点 → {k} 切断 (追加 {len(added)})")
    return DMCompletion(P, ordered, lattice, embedding, added)


def dm_completion_branch(B: BranchPoset, window: int = CHECK_WINDOW) -> Dict[str, Any]:
    """
    分岐表示の DM 完備化で加わる元を求める

    上限をもたない鎖ごとに窓内の上界を調べ、上界がなければ ⊤ に、
    最小の上界があればそれに送る。最小元がなければ ⊥ を加える。

    Returns:
        Dict[str, Any]: added (追加元ラベル) と chain_cuts (鎖 → 切断ラベル)

    Raises:
        UnsupportedPresentation: 上界はあるが最小の上界がない鎖がある場合
    """
    added: List[str] = []
    if not B.has_minimum(window):
        added.append("⊥")
    chain_cuts: Dict[str, str] = {}
    for branch in B.chain_sorts():
        if B.limit_of(branch.name) is not None:
            continue
        for prefix in itertools.product(range(window), repeat=branch.arity - 1):
            bounds = B.chain_upper_bounds(branch.name, tuple(prefix), window)
            key = code_label((branch.name, tuple(prefix))) if prefix else branch.name
            if not bounds:
                chain_cuts[key] = TOP_LABEL
                continue
            least = [m for m in bounds if all(B.leq(m, u) for u in bounds)]
            if not least:
                raise UnsupportedPresentation(f"鎖 {key} の切断を表示できません")
            chain_cuts[key] = code_label(least[0])
    if TOP_LABEL in chain_cuts.values():
        added.append(TOP_LABEL)
    return {"added": added, "chain_cuts": chain_cuts}


# ----------------------------------------------------------------------
# 有向完備化 (分岐表示)
# ----------------------------------------------------------------------
@dataclass
class BranchCompletion:
    """分岐表示の有向完備化"""
    source: BranchPoset
    poset: BranchPoset
    layers: int
    formal: Dict[str, Tuple[str, int]] = field(default_factory=dict)
    bottom_added: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "layers": self.layers,
            "formal": {name: {"chain": src, "layer": layer}
                       for name, (src, layer) in sorted(self.formal.items())},
            "bottom_added": self.bottom_added,
            "presentation": self.poset.to_json(),
        }


def chain_below(P: BranchPoset, s: Tuple[str, Tuple[int, ...]], t: Tuple[str, Tuple[int, ...]]) -> bool:
    """鎖 s の上限 ≤ 鎖 t の上限 (s ⊆ hat(↓t) で判定)"""
    hat = closure_suite(P, P.down(P.subset([Slice(*t)]))).hat
    return P.subset_of(P.subset([Slice(*s)]), hat)


def _prefixes(arity: int, window: int) -> List[Tuple[int, ...]]:
    return [tuple(p) for p in itertools.product(range(window), repeat=arity)]


def _formal_layer(P: BranchPoset, pending: List[Branch], layer: int,
                  window: int) -> Tuple[List[Branch], List[AttachRule], Dict[str, Tuple[str, int]]]:
    """未完備な鎖ソートに形式的上限のソートを1層加える"""
    new_branches: List[Branch] = []
    new_rules: List[AttachRule] = []
    formal: Dict[str, Tuple[str, int]] = {}
    hats: Dict[str, Branch] = {}

    for branch in pending:
        arity = branch.arity - 1
        for prefix in _prefixes(arity, min(window, 2)):
            bounds = P.chain_upper_bounds(branch.name, prefix, window)
            if bounds:
                raise UnsupportedPresentation(
                    f"鎖 {code_label((branch.name, prefix))} は上界 {code_label(bounds[0])} をもつが limit が宣言されていません")
        declared = P.limit_chain_declared(branch.name)
        prefixes = _prefixes(arity, window)
        if arity >= 1:
            for p, q in itertools.permutations(prefixes, 2):
                below = chain_below(P, (branch.name, p), (branch.name, q))
                if declared:
                    expected = p[:-1] == q[:-1] and p[-1] <= q[-1]
                    if below != expected:
                        raise UnsupportedPresentation(
                            f"{branch.name} の上限の列が宣言と一致しません: {p} と {q}")
                elif below:
                    raise UnsupportedPresentation(
                        f"{branch.name} の上限同士の順序が宣言されていません: {p} ≤ {q}")
        name = f"{branch.name}^"
        hat = Branch(name, arity=arity, chain=declared or arity == 0, formal=True)
        hats[branch.name] = hat
        new_branches.append(hat)
        new_rules.append(AttachRule("limit", branch.name, name))
        formal[name] = (branch.name, layer)

    # 異なる鎖ソートの上限同士の順序
    for s_branch, t_branch in itertools.permutations(pending, 2):
        s_hat, t_hat = hats[s_branch.name], hats[t_branch.name]
        if s_hat.arity == 0 and t_hat.arity == 0:
            if chain_below(P, (s_branch.name, ()), (t_branch.name, ())):
                new_rules.append(AttachRule("below", s_hat.name, t_hat.name))
            continue
        if s_hat.arity == t_hat.arity:
            prefixes = _prefixes(s_hat.arity, min(window, 2))
            verdicts = {(p, q): chain_below(P, (s_branch.name, p), (t_branch.name, q))
                        for p in prefixes for q in prefixes}
            diagonal = all(verdicts[(p, p)] for p in prefixes)
            off = any(v for (p, q), v in verdicts.items() if p != q)
            if diagonal and not off:
                conds = tuple(Condition("==", f"s{k}", f"d{k}") for k in range(s_hat.arity))
                new_rules.append(AttachRule("below", s_hat.name, t_hat.name, conds))
                continue
            if not any(verdicts.values()):
                continue
        else:
            s_pre = _prefixes(s_hat.arity, min(window, 2))
            t_pre = _prefixes(t_hat.arity, min(window, 2))
            verdicts = [chain_below(P, (s_branch.name, p), (t_branch.name, q)) for p in s_pre for q in t_pre]
            if all(verdicts):
                new_rules.append(AttachRule("below", s_hat.name, t_hat.name))
                continue
            if not any(verdicts):
                continue
        raise UnsupportedPresentation(
            f"{s_branch.name} と {t_branch.name} の上限の順序を規則で表せません")
    return new_branches, new_rules, formal


def _verify_formal(before: BranchPoset, after: BranchPoset, formal: Dict[str, Tuple[str, int]],
                   layer: int, window: int) -> None:
    """既存の元 x と新しい上限 f について x ≤ f ⇔ x ∈ hat(↓鎖) を確認する"""
    elements = before.window_elements(window)
    for name, (src, lay) in formal.items():
        if lay != layer:
            continue
        arity = after.branches[name].arity
        for prefix in _prefixes(arity, min(window, 2)):
            hat = closure_suite(before, before.down(before.subset([Slice(src, prefix)]))).hat
            for x in elements:
                if before.contains(hat, x) != after.leq(x, (name, prefix)):
                    raise UnsupportedPresentation(
                        f"形式的上限 {code_label((name, prefix))} と {code_label(x)} の順序を決定できません")


def directed_completion_branch(B: Union[BranchPoset, FinitePoset], enhanced: bool = False,
                               depth: Optional[int] = None,
                               window: int = CHECK_WINDOW) -> Union[BranchCompletion, FinitePoset]:
    """
    分岐表示の有向完備化を層ごとに構成する

    各層で、limit をもたない無限鎖の族に形式的上限のソート S^ を加える。
    limit_chain が宣言されていれば S^ は鎖、そうでなければ反鎖になる。

    Args:
        B: 分岐表示 (有限半順序集合ならそのまま返す)
        enhanced: 最小元がないとき ⊥ を加えるかどうか
        depth: 層数の上限
        window: 判定に使う添字の窓

    Returns:
        BranchCompletion: 完備化と層数

    Raises:
        UnsupportedPresentation: 上限の状態が規則から決まらない場合
        BudgetExceeded: 層数が上限を超えた場合
    """
    if isinstance(B, FinitePoset):
        if enhanced and B.n and B.bottom() is None:
            return _add_finite_bottom(B)
        return B

    depth = ITERATION_DEPTH if depth is None else depth
    current = B
    layers = 0
    formal: Dict[str, Tuple[str, int]] = {}
    while True:
        pending = [b for b in current.chain_sorts() if current.limit_of(b.name) is None]
        if not pending:
            break
        layers += 1
        if layers > depth:
            raise BudgetExceeded(f"完備化の層数が上限 {depth} を超えました")
        branches, rules, added = _formal_layer(current, pending, layers, window)
        pending_names = {b.name for b in pending}
        kept_rules = [r for r in current.rules
                      if r.src != BOTTOM and not (r.kind == "limit_chain" and r.src in pending_names)]
        base = [b for b in current.branches.values() if b.name != BOTTOM]
        nxt = BranchPoset(base + branches, kept_rules + rules,
                          bottom=current.has_bottom, name=current.name)
        formal.update(added)
        _verify_formal(current, nxt, formal, layers, window)
        logger.debug(f"完備化 第{layers}層: {sorted(added)} を追加")
        current = nxt

    bottom_added = False
    if enhanced and not current.has_bottom and not current.has_minimum(window):
        current = BranchPoset([b for b in current.branches.values()], current.rules,
                              bottom=True, name=current.name)
        bottom_added = True
    logger.info(f"{B.name or B} の完備化: {layers} 層, 形式的上限 {len(formal)} 種")
    return BranchCompletion(B, current, layers, formal, bottom_added)


def _add_finite_bottom(P: FinitePoset) -> FinitePoset:
    n = P.n
    leq = np.zeros((n + 1, n + 1), dtype=bool)
    leq[:n, :n] = P.leq_matrix
    leq[n, :] = True
    return FinitePoset(leq, list(P.labels) + ["⊥"], check=False)


# ----------------------------------------------------------------------
# 完備化の主張の検査
# ----------------------------------------------------------------------
@dataclass
class CompletionClaim:
    """
    完備化の主張: X, 候補 Y, 埋め込み j

    kind は finite / branch / cone / classifier のいずれか。
    """
    kind: str
    source: Any = None
    target: Any = None
    embedding: Optional[Sequence[int]] = None
    name: str = ""


@dataclass
class ClaimReport:
    name: str
    kind: str
    target_complete: bool = True
    mcp_of_j: bool = True
    density: bool = True
    criterion: bool = True
    checked: int = 0
    counterexample: Optional[Dict[str, Any]] = None
    note: str = ""

    @property
    def consistent(self) -> bool:
        return self.counterexample is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "kind": self.kind,
            "target_complete": self.target_complete,
            "mcp_of_j": self.mcp_of_j,
            "density": self.density,
            "criterion": self.criterion,
            "checked": self.checked,
            "verdict": "consistent" if self.consistent else "fail",
            "counterexample": self.counterexample,
            "note": self.note,
        }


def check_completion_claim(claim: CompletionClaim, budget: int = SAMPLED_CHAINS) -> ClaimReport:
    """
    (Y, j) が X の有向完備化であるという主張を予算内で検査する

    Y の完備性、j の Mcp、稠密性、そして有向集合 B と a ∈ X について
    j(a) ≤ tip j(B) ⇔ a ∈ hat B の両方向を確認する。

    Args:
        claim: 完備化の主張
        budget: 検査する有向集合の数の上限

    Returns:
        ClaimReport: 検査結果 (反例があればそれを含む)

    Raises:
        ValidationError: 未知の種別の場合
    """
    if claim.kind == "finite":
        report = _check_finite_claim(claim, budget)
    elif claim.kind == "branch":
        report = _check_branch_claim(claim, budget)
    elif claim.kind == "cone":
        report = _check_cone_claim(claim, budget)
    elif claim.kind == "classifier":
        from src.services.lorentz_service import minkowski_claim
        result = minkowski_claim()
        report = ClaimReport(claim.name or "minkowski", "classifier", checked=len(result["rows"]))
        if not result["consistent"]:
            report.criterion = False
            report.counterexample = result["counterexample"]
    else:
        raise ValidationError(f"未知の主張の種別です: {claim.kind}")
    if report.consistent:
        report.note = "予算内で反例なし"
        logger.info(f"主張 {report.name}: 予算内で矛盾なし ({report.checked} 件)")
    else:
        logger.warning(f"主張 {report.name}: 反例 {report.counterexample}")
    return report


def _check_finite_claim(claim: CompletionClaim, budget: int) -> ClaimReport:
    X: FinitePoset = claim.source
    Y: FinitePoset = claim.target
    j = list(claim.embedding) if claim.embedding is not None else list(range(X.n))
    report = ClaimReport(claim.name or "finite", "finite")
    if len(j) != X.n or any(not 0 <= y < Y.n for y in j):
        raise ValidationError("埋め込みの長さまたは値が不正です")
    if len(set(j)) != len(j):
        report.mcp_of_j = False
        a, b = next((a, b) for a, b in itertools.combinations(range(X.n), 2) if j[a] == j[b])
        report.counterexample = {"kind": "not-injective", "elements": [X.labels[a], X.labels[b]]}
        return report
    if not X.is_monotone(j, Y):
        report.mcp_of_j = False
        a, b = next((a, b) for a, b in itertools.product(X.elements, repeat=2)
                    if X.leq(a, b) and not Y.leq(j[a], j[b]))
        report.counterexample = {"kind": "not-monotone", "elements": [X.labels[a], X.labels[b]]}
        return report
    missing = [y for y in Y.elements if y not in j]
    if missing:
        report.density = False
        report.counterexample = {"kind": "not-dense", "element": Y.labels[missing[0]]}
        return report
    for count, b in enumerate(X.elements):
        if count >= budget:
            break
        report.checked += 1
        hat = closure_suite(X, [b]).hat
        for a in X.elements:
            if Y.leq(j[a], j[b]) != (a in hat):
                report.criterion = False
                report.counterexample = {"kind": "criterion", "B": [X.labels[b]], "a": X.labels[a]}
                return report
    return report


def _sample_chains(P: BranchPoset, budget: int, window: int) -> List[Tuple[str, Tuple[int, ...]]]:
    chains = []
    for branch in P.chain_sorts():
        for prefix in _prefixes(branch.arity - 1, window):
            chains.append((branch.name, prefix))
    return chains[:budget]


def chain_sup(Y: BranchPoset, sort: str, prefix: Tuple[int, ...], window: int) -> Optional[Code]:
    """Y における鎖 sort(prefix, ·) の上限 (宣言された limit、なければ最小の上界)"""
    target = Y.limit_of(sort)
    if target is not None:
        return target, prefix
    bounds = Y.chain_upper_bounds(sort, prefix, window)
    least = [m for m in bounds if all(Y.leq(m, u) for u in bounds)]
    return least[0] if least else None


def _check_branch_claim(claim: CompletionClaim, budget: int) -> ClaimReport:
    X: BranchPoset = claim.source
    Y: BranchPoset = claim.target
    window = CHECK_WINDOW
    report = ClaimReport(claim.name or X.name or "branch", "branch")
    missing = [s for s in X.branches if s not in Y.branches]
    if missing:
        raise ValidationError(f"Y に X のソートがありません: {missing}")

    # Y の完備性
    for sort, prefix in _sample_chains(Y, budget, window):
        report.checked += 1
        if chain_sup(Y, sort, prefix, window) is None:
            report.target_complete = False
            bounds = Y.chain_upper_bounds(sort, prefix, window)
            report.counterexample = {"kind": "missing-sup", "chain": [sort, list(prefix)],
                                     "upper_bounds": [code_label(u) for u in bounds]}
            return report
    violation = Y.check_limits(window)
    if violation is not None:
        report.target_complete = False
        report.counterexample = {"kind": "limit-not-least", "limit": code_label(violation[0]),
                                 "upper_bound": code_label(violation[1])}
        return report

    # j の Mcp: X の上限は Y でも上限
    for sort, prefix in _sample_chains(X, budget, window):
        target = X.limit_of(sort)
        if target is None:
            continue
        sup_y = chain_sup(Y, sort, prefix, window)
        if sup_y != (target, prefix):
            report.mcp_of_j = False
            report.counterexample = {"kind": "sup-not-preserved", "chain": [sort, list(prefix)],
                                     "sup_in_X": code_label((target, prefix)),
                                     "sup_in_Y": code_label(sup_y) if sup_y else None}
            return report

    # 稠密性: Y の新しい元は X の鎖の上限から (反復的に) 得られる
    reached = set(X.branches)
    changed = True
    while changed:
        changed = False
        for rule in Y.rules:
            if rule.kind == "limit" and rule.src in reached and rule.dst not in reached:
                reached.add(rule.dst)
                changed = True
    extra = [s for s in Y.branches if s not in reached and s != BOTTOM]
    if extra:
        report.density = False
        report.counterexample = {"kind": "not-dense", "sort": extra[0]}
        return report

    # 判定基準 j(a) ≤ tip j(B) ⇔ a ∈ hat B
    samples: List[Tuple[Any, Code]] = []
    for sort, prefix in _sample_chains(X, budget, window):
        tip = chain_sup(Y, sort, prefix, window)
        samples.append((Slice(sort, prefix), tip))
    for code in X.window_elements(window):
        if len(samples) >= budget:
            break
        samples.append((Slice(code[0], code[1]), code))
    elements = X.window_elements(window)
    for B, tip in samples[:budget]:
        report.checked += 1
        hat = closure_suite(X, X.down(X.subset([B]))).hat
        for a in elements:
            in_y = Y.leq(a, tip)
            in_hat = X.contains(hat, a)
            if in_y != in_hat:
                report.criterion = False
                report.counterexample = {"kind": "criterion", "B": [B.sort, list(B.prefix)],
                                         "tip": code_label(tip), "a": code_label(a),
                                         "leq_in_Y": in_y, "in_hat": in_hat}
                return report
    return report


def _check_cone_claim(claim: CompletionClaim, budget: int) -> ClaimReport:
    """
    有限値ベクトルの錐 X ⊂ Y = [0,∞]^n の主張

    X は Y の下集合、Y の各元は X の鎖 y ∧ k の上限、そして x ↦ x ∧ b が
    鎖の上限を保つ (切り詰め性) ことを標本の鎖で確認する。
    """
    cone: DiscreteCone = claim.source if isinstance(claim.source, DiscreteCone) else DiscreteCone.uniform(3)
    rng = random.Random(DEFAULT_SEED)
    report = ClaimReport(claim.name or "finite-vectors", "cone")
    for _ in range(budget):
        report.checked += 1
        y = cone.random_vec(rng, inf_rate=0.3)
        x = cone.random_vec(rng, inf_rate=0.0)
        # 下集合: x の下の元は有限
        below = x.meet(y)
        if not below.is_finite:
            report.criterion = False
            report.counterexample = {"kind": "not-lower-set", "x": str(x)}
            return report
        # 稠密性: y ∧ k の上限が y
        bound = max([int(a.value) + 1 for a in y if not a.is_inf] + [1])
        approx = [y.meet(ConeVec([k] * cone.n)) for k in range(1, bound + 2)]
        if any(not approx[i] <= approx[i + 1] for i in range(len(approx) - 1)):
            report.density = False
            report.counterexample = {"kind": "not-monotone", "y": str(y)}
            return report
        last = approx[-1]
        limit = ConeVec(INF if a.is_inf else b for a, b in zip(y, last))
        if limit != y:
            report.density = False
            report.counterexample = {"kind": "not-dense", "y": str(y)}
            return report
        # 切り詰め: sup(x_k ∧ b) = (sup x_k) ∧ b
        chain = AffineChain.random(cone.n, rng)
        b = cone.random_vec(rng, inf_rate=0.3)
        expected = chain.sup().meet(b)
        k = 64
        term = chain.term(k).meet(b)
        for i, (e, t, gap) in enumerate(zip(expected, term, chain.tail_gap(k))):
            if t > e:
                report.mcp_of_j = False
                report.counterexample = {"kind": "meet-exceeds-sup", "coordinate": i}
                return report
            if e.is_inf:
                # b_i = ∞ かつ発散する座標: 項は k とともに非有界
                if not chain.term(2 * k)[i] > term[i]:
                    report.mcp_of_j = False
                    report.counterexample = {"kind": "meet-stalls", "coordinate": i}
                    return report
                continue
            if gap is not None and e.value - t.value > gap:
                report.mcp_of_j = False
                report.counterexample = {"kind": "meet-gap", "coordinate": i}
                return report
    return report


def power_set_claim(k: int) -> CompletionClaim:
    """{0..k-1} の有限部分集合 (窓内では全部分集合) と冪集合の主張"""
    X = FinitePoset.power_set(k)
    return CompletionClaim("finite", X, FinitePoset.power_set(k), list(range(X.n)), name=f"power-set{k}")


# ----------------------------------------------------------------------
# 切り詰め性
# ----------------------------------------------------------------------
@dataclass
class TruncationReport:
    passed: bool = True
    checked: int = 0
    witness: Optional[Dict[str, Any]] = None
    meet_map: Optional[bool] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"verdict": "pass" if self.passed else "fail", "checked": self.checked,
                "witness": self.witness, "meet_map_mcp": self.meet_map}


def truncation_check(Y: Union[FinitePoset, BranchPoset], X: Optional[Sequence[Any]] = None,
                     budget: int = SAMPLED_CHAINS, meet_map: bool = False) -> TruncationReport:
    """
    切り詰め性を検査する: tip B ≥ a ∈ X なら a ∈ hat((↓B) ∩ (↓a))

    Args:
        Y: 完備な半順序集合
        X: 下集合 (有限なら要素番号、分岐表示ならソート名、省略時は Y 全体)
        budget: 検査する有向集合の数の上限
        meet_map: x ↦ x ∧ b の Mcp も検査するかどうか (有限束のみ)

    Returns:
        TruncationReport: 判定と反例
    """
    report = TruncationReport()
    if isinstance(Y, FinitePoset):
        members = list(X) if X is not None else list(Y.elements)
        for count, b in enumerate(Y.elements):
            if count >= budget:
                break
            report.checked += 1
            down_b = Y.down([b])
            for a in members:
                if not Y.leq(a, b):
                    continue
                hat = closure_suite(Y, down_b & Y.down([a])).hat
                if a not in hat:
                    report.passed = False
                    report.witness = {"B": [Y.labels[b]], "a": Y.labels[a]}
                    return report
        if meet_map:
            report.meet_map = Y.is_lattice() and all(
                Y.is_monotone([Y.meet(x, b) for x in Y.elements], Y) for b in Y.elements)
        return report

    window = CHECK_WINDOW
    sorts = set(X) if X is not None else set(Y.branches)
    elements = [c for c in Y.window_elements(window) if c[0] in sorts]
    samples: List[Tuple[Slice, Optional[Code]]] = []
    for sort, prefix in _sample_chains(Y, budget, window):
        samples.append((Slice(sort, prefix), chain_sup(Y, sort, prefix, window)))
    for code in Y.window_elements(window):
        samples.append((Slice(code[0], code[1]), code))
    for B, tip in samples[:budget]:
        if tip is None:
            continue
        report.checked += 1
        down_b = Y.down(Y.subset([B]))
        for a in elements:
            if not Y.leq(a, tip):
                continue
            cut = Y.intersect(down_b, Y.down(Y.subset([a])))
            hat = closure_suite(Y, cut).hat
            if not Y.contains(hat, a):
                report.passed = False
                report.witness = {"B": [B.sort, list(B.prefix)], "tip": code_label(tip),
                                  "a": code_label(a), "truncated": render_subset(cut)}
                logger.info(f"切り詰め性の反例: B={B}, a={code_label(a)}")
                return report
    return report


# ----------------------------------------------------------------------
# 完備化の比較
# ----------------------------------------------------------------------
@dataclass
class ComparisonReport:
    completion: List[str]
    dm: List[str]
    S: Dict[str, str]
    T: Dict[str, str]
    ts_identity: bool
    t_injective: bool
    witness: Optional[List[str]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "completion": self.completion,
            "dm": self.dm,
            "S": dict(sorted(self.S.items())),
            "T": dict(sorted(self.T.items())),
            "ts_identity": self.ts_identity,
            "t_injective": self.t_injective,
            "witness": self.witness,
        }


def _injectivity_witness(T: Dict[str, str]) -> Optional[List[str]]:
    seen: Dict[str, str] = {}
    for x in sorted(T):
        image = T[x]
        if image in seen:
            return [seen[image], x]
        seen[image] = x
    return None


def compare_completions(P: Union[FinitePoset, BranchPoset]) -> ComparisonReport:
    """
    有向完備化 (強化版) と DM 完備化の比較写像 S, T を構成する

    Args:
        P: 二項上限をもつ半順序集合

    Returns:
        ComparisonReport: S, T、T∘S = id の判定、T の単射性と反例

    Raises:
        NoJoins: 二項上限が存在しない組がある場合
    """
    if isinstance(P, BranchPoset):
        return _compare_branch(P)
    for i, j in itertools.combinations(P.elements, 2):
        if P.join(i, j) is None:
            raise NoJoins(f"{P.labels[i]} と {P.labels[j]} の上限が存在しません")
    dm = dm_completion(P)
    completion = directed_completion_branch(P, enhanced=True)
    labels = list(completion.labels)
    dm_labels = list(dm.lattice.labels)
    T: Dict[str, str] = {}
    for x in P.elements:
        T[labels[x]] = dm_labels[dm.embedding[x]]
    if completion.n > P.n:
        T[labels[P.n]] = dm_labels[0]
    S: Dict[str, str] = {}
    for idx, cut in enumerate(dm.cuts):
        top = P.maximum(cut)
        S[dm_labels[idx]] = labels[top] if top is not None else labels[-1]
    ts_identity = all(T[S[d]] == d for d in dm_labels)
    witness = _injectivity_witness(T)
    return ComparisonReport(labels, dm_labels, S, T, ts_identity, witness is None, witness)


def _compare_branch(P: BranchPoset, window: int = CHECK_WINDOW) -> ComparisonReport:
    elements = P.window_elements(window)
    wider = P.window_elements(window + 1)
    for x, y in itertools.combinations(elements, 2):
        bounds = [z for z in wider if P.leq(x, z) and P.leq(y, z)]
        if not any(all(P.leq(m, u) for u in bounds) for m in bounds):
            raise NoJoins(f"{code_label(x)} と {code_label(y)} の上限が窓内に存在しません")

    comp = directed_completion_branch(P, enhanced=True, window=window)
    dm_info = dm_completion_branch(P, window)
    formal = sorted(comp.formal)
    for name in formal:
        if comp.poset.branches[name].arity != 0:
            raise UnsupportedPresentation(f"添字つきの形式的上限 {name} の比較はサポートしていません")

    labels = [code_label(c) for c in elements]
    completion = labels + formal + (["⊥"] if comp.bottom_added else [])
    dm = labels + list(dm_info["added"])

    T: Dict[str, str] = {label: label for label in labels}
    for name in formal:
        src, _ = comp.formal[name]
        T[name] = dm_info["chain_cuts"].get(src, TOP_LABEL)
    if comp.bottom_added:
        T["⊥"] = "⊥"

    S: Dict[str, str] = {label: label for label in labels}
    if "⊥" in dm_info["added"]:
        S["⊥"] = "⊥"
    if TOP_LABEL in dm_info["added"]:
        tops = [f for f in formal
                if all(comp.poset.leq((g, ()), (f, ())) for g in formal)
                and all(comp.poset.leq(x, (f, ())) for x in elements)]
        if not tops:
            raise UnsupportedPresentation("完備化に最大元が見つかりません")
        S[TOP_LABEL] = tops[0]

    ts_identity = all(T[S[d]] == d for d in dm)
    witness = _injectivity_witness(T)
    if witness:
        logger.info(f"T は単射でない: {witness[0]} と {witness[1]} が同じ切断に移る")
    return ComparisonReport(completion, dm, S, T, ts_identity, witness is None, witness)


# ----------------------------------------------------------------------
# 直積の完備化
# ----------------------------------------------------------------------
PRODUCT_WINDOW = 2


def check_product_completion(X: Union[FinitePoset, BranchPoset], Y: Union[FinitePoset, BranchPoset],
                             budget: int = SAMPLED_CHAINS, completion: str = "directed") -> Dict[str, Any]:
    """
    直積の完備化が完備化の直積と一致するかを確認する

    有限の場合は X × Y を構成してその完備化を求め、因子の完備化の直積と順序を比べたうえで、
    X × Y の有向集合 B ごとに X × Y の中で計算した hat(B) を因子側の hat と照合する。
    分岐表示の場合は窓の中の組 (a, b) について X × Y の順序で閉包を反復し、
    因子の完備化での (a, b) ≤ (sup π1 B, sup π2 B) と一致するかを見る。

    Args:
        X: 1つめの因子
        Y: 2つめの因子
        budget: 検査する有向集合の数の上限
        completion: "directed" (有向完備化) または "dm" (有限のみ)

    Returns:
        Dict[str, Any]: verdict, checked, counterexample
    """
    if completion not in ("directed", "dm"):
        raise ValidationError(f"不明な完備化です: {completion}")
    if isinstance(X, FinitePoset) and isinstance(Y, FinitePoset):
        if completion == "dm":
            return _check_finite_product_dm(X, Y)
        return _check_finite_product(X, Y, budget)
    if not (isinstance(X, BranchPoset) and isinstance(Y, BranchPoset)):
        raise ValidationError("直積の検査は同じ種類の半順序集合の組に対して行います")
    if completion != "directed":
        raise UnsupportedPresentation("分岐表示の直積は有向完備化のみ検査できます")
    return _check_branch_product(X, Y, budget)


def _product_result(checked: int, counterexample: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    if counterexample is not None:
        logger.info(f"直積の完備化が一致しません: {counterexample}")
    return {"verdict": "consistent" if counterexample is None else "fail",
            "checked": checked, "counterexample": counterexample}


def _check_finite_product(X: FinitePoset, Y: FinitePoset, budget: int) -> Dict[str, Any]:
    P = X.product(Y)
    completed = directed_completion_branch(P)
    factors = directed_completion_branch(X).product(directed_completion_branch(Y))
    if completed.n != factors.n or not np.array_equal(completed.leq_matrix, factors.leq_matrix):
        return _product_result(0, {"kind": "order", "sizes": [completed.n, factors.n]})

    checked = 0
    for B in itertools.islice(P.directed_subsets(), budget):
        checked += 1
        inside = closure_suite(P, B).hat
        hat1 = closure_suite(X, {i // Y.n for i in B}).hat
        hat2 = closure_suite(Y, {i % Y.n for i in B}).hat
        expected = frozenset(a * Y.n + b for a in hat1 for b in hat2)
        if inside != expected:
            a = min(inside ^ expected)
            return _product_result(checked, {"kind": "criterion", "B": [P.labels[i] for i in sorted(B)],
                                             "a": P.labels[a]})
    return _product_result(checked, None)


def _check_finite_product_dm(X: FinitePoset, Y: FinitePoset) -> Dict[str, Any]:
    completed = dm_completion(X.product(Y)).lattice
    factors = dm_completion(X).lattice.product(dm_completion(Y).lattice)
    if completed.n != factors.n:
        return _product_result(1, {"kind": "size", "sizes": [completed.n, factors.n]})
    if completed.n > 6:
        raise UnsupportedPresentation("7 点以上の束の同型判定はサポートしていません")
    if completed.canonical_key() != factors.canonical_key():
        return _product_result(1, {"kind": "order", "sizes": [completed.n, factors.n]})
    return _product_result(1, None)


def _sample_items(P: BranchPoset, budget: int, window: int) -> List[Tuple[str, Any]]:
    items: List[Tuple[str, Any]] = [("chain", c) for c in _sample_chains(P, budget, window)]
    items += [("point", c) for c in P.window_elements(window)]
    return items


def _item_terms(item: Tuple[str, Any], depth: int) -> List[Code]:
    kind, value = item
    if kind == "point":
        return [value]
    sort, prefix = value
    return [(sort, prefix + (k,)) for k in range(depth)]


def _item_sup(comp: BranchCompletion, item: Tuple[str, Any], window: int) -> Code:
    kind, value = item
    if kind == "point":
        return value
    sup = chain_sup(comp.poset, value[0], value[1], window)
    if sup is None:
        raise UnsupportedPresentation(f"完備化で鎖 {value[0]}{list(value[1])} の上限が決まりません")
    return sup


def _check_branch_product(X: BranchPoset, Y: BranchPoset, budget: int) -> Dict[str, Any]:
    window = PRODUCT_WINDOW
    depth = window + 1
    cx = directed_completion_branch(X, window=CHECK_WINDOW)
    cy = directed_completion_branch(Y, window=CHECK_WINDOW)
    xs, ys = _sample_items(X, budget, window), _sample_items(Y, budget, window)
    pairs = list(itertools.product(X.window_elements(window), Y.window_elements(window)))

    def leq(p: Tuple[Code, Code], q: Tuple[Code, Code]) -> bool:
        return X.leq(p[0], q[0]) and Y.leq(p[1], q[1])

    def diagonal(i1: Tuple[str, Any], i2: Tuple[str, Any]) -> List[Tuple[Code, Code]]:
        t1, t2 = _item_terms(i1, depth), _item_terms(i2, depth)
        return [(t1[min(k, len(t1) - 1)], t2[min(k, len(t2) - 1)]) for k in range(max(len(t1), len(t2)))]

    # 有向集合の上限候補: 少なくとも一方が鎖の組
    candidates = [diagonal(i1, i2) for i1, i2 in itertools.product(xs, ys)
                  if i1[0] == "chain" or i2[0] == "chain"]

    def least_upper_bound(terms: List[Tuple[Code, Code]]) -> Optional[Tuple[Code, Code]]:
        bounds = [u for u in pairs if all(leq(t, u) for t in terms)]
        least = [m for m in bounds if all(leq(m, u) for u in bounds)]
        return least[0] if least else None

    checked = 0
    for i1, i2 in itertools.islice(itertools.product(xs, ys), budget):
        checked += 1
        # 生成元の ↓ の和として X × Y の部分集合を保持する
        tops = [diagonal(i1, i2)[-1]]

        def member(p: Tuple[Code, Code]) -> bool:
            return any(leq(p, g) for g in tops)

        for _ in range(ITERATION_DEPTH):
            added = []
            for terms in candidates:
                if not all(member(t) for t in terms):
                    continue
                sup = least_upper_bound(terms)
                if sup is not None and not member(sup) and sup not in added:
                    added.append(sup)
            if not added:
                break
            tops.extend(added)

        t1, t2 = _item_sup(cx, i1, CHECK_WINDOW), _item_sup(cy, i2, CHECK_WINDOW)
        for a in pairs:
            in_completion = cx.poset.leq(a[0], t1) and cy.poset.leq(a[1], t2)
            if in_completion != member(a):
                return _product_result(checked, {"kind": "criterion",
                                                 "B": [_render_item(i1), _render_item(i2)],
                                                 "a": [code_label(a[0]), code_label(a[1])]})
    return _product_result(checked, None)


def _render_item(item: Tuple[str, Any]) -> Any:
    kind, value = item
    if kind == "point":
        return code_label(value)
    return [value[0], list(value[1])]
