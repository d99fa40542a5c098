import itertools
import logging
import re
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from src.config import WINDOW
from src.models.errors import UnsupportedPresentation, ValidationError

# ロガーの設定
logger = logging.getLogger(__name__)

Code = Tuple[str, Tuple[int, ...]]

BOTTOM = "⊥"

_VAR = re.compile(r"^([sd])(\d+)$")


@dataclass(frozen=True)
class Branch:
    """分岐 (ソート): 要素は (name, 添字タプル)、最後の添字方向に鎖をなす"""
    name: str
    arity: int = 1
    length: Optional[int] = None
    chain: bool = True
    formal: bool = False


@dataclass(frozen=True)
class Condition:
    """添字条件 s_k op d_l (または s_k op 定数)"""
    op: str
    left: str
    right: Union[str, int]

    def holds(self, src: Tuple[int, ...], dst: Tuple[int, ...]) -> bool:
        lhs = src[int(self.left[1:])]
        rhs = self.right if isinstance(self.right, int) else dst[int(self.right[1:])]
        if self.op == "<":
            return lhs < rhs
        if self.op == "<=":
            return lhs <= rhs
        return lhs == rhs


@dataclass(frozen=True)
class AttachRule:
    """分岐間の順序規則 (limit / below / limit_chain)"""
    kind: str
    src: str
    dst: Optional[str] = None
    conditions: Tuple[Condition, ...] = ()


@dataclass(frozen=True)
class Slice:
    """ソート sort のうち添字が prefix で始まる要素全体 (prefix が完全なら1点)"""
    sort: str
    prefix: Tuple[int, ...] = ()


class BranchSubset:
    """スライスの有限和で表した部分集合"""

    def __init__(self, items: Iterable[Slice] = ()):
        self.items: FrozenSet[Slice] = frozenset(items)

    def __iter__(self) -> Iterator[Slice]:
        return iter(sorted(self.items, key=lambda s: (s.sort, len(s.prefix), s.prefix)))

    def __len__(self) -> int:
        return len(self.items)

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, BranchSubset) and self.items == other.items

    def __hash__(self) -> int:
        return hash(self.items)

    def __repr__(self) -> str:
        parts = [f"{s.sort}{list(s.prefix)}" for s in self]
        return "{" + ", ".join(parts) + "}"


def _slice_covers(big: Slice, small: Slice) -> bool:
    return big.sort == small.sort and small.prefix[:len(big.prefix)] == big.prefix


class BranchPoset:
    """有限個の ℕ-鎖とその接続規則で表示された可算半順序集合"""

    def __init__(self, branches: Sequence[Branch], rules: Sequence[AttachRule] = (),
                 bottom: bool = False, name: str = ""):
        """
        分岐表示を初期化し検証する

        Args:
            branches: ソートのリスト
            rules: 接続規則のリスト
            bottom: 最小元 ⊥ を追加するかどうか
            name: 表示名

        Raises:
            UnsupportedPresentation: 規則がサポート外の形の場合
        """
        self.name = name
        self.branches: Dict[str, Branch] = {}
        for branch in branches:
            if branch.name in self.branches:
                raise UnsupportedPresentation(f"ソート名が重複しています: {branch.name}")
            if branch.arity < 0:
                raise UnsupportedPresentation(f"アリティが負です: {branch.name}")
            self.branches[branch.name] = branch
        self.rules: List[AttachRule] = list(rules)
        self.has_bottom = bottom
        if bottom and BOTTOM not in self.branches:
            self.branches[BOTTOM] = Branch(BOTTOM, arity=0)
            for sort in list(self.branches):
                if sort != BOTTOM:
                    self.rules.append(AttachRule("below", BOTTOM, sort))
        self._validate()
        self._leq_cache: Dict[Tuple[Code, Code], bool] = {}

    # ------------------------------------------------------------------
    # 検証
    # ------------------------------------------------------------------
    def _validate(self) -> None:
        limits: Dict[str, str] = {}
        for rule in self.rules:
            if rule.src not in self.branches:
                raise UnsupportedPresentation(f"未知のソート: {rule.src}")
            src = self.branches[rule.src]
            if rule.kind == "limit":
                dst = self._branch(rule.dst)
                if not src.chain or src.length is not None or src.arity < 1:
                    raise UnsupportedPresentation(f"limit は無限鎖のソートにのみ付けられます: {src.name}")
                if dst.arity != src.arity - 1:
                    raise UnsupportedPresentation(f"limit の行き先のアリティが不正です: {src.name}→{dst.name}")
                if src.name in limits:
                    raise UnsupportedPresentation(f"limit が重複しています: {src.name}")
                limits[src.name] = dst.name
            elif rule.kind == "below":
                dst = self._branch(rule.dst)
                for cond in rule.conditions:
                    self._check_condition(cond, src, dst)
            elif rule.kind == "limit_chain":
                if src.arity < 2 or not src.chain or src.length is not None:
                    raise UnsupportedPresentation(f"limit_chain はアリティ2以上の無限鎖ソートが必要です: {src.name}")
            else:
                raise UnsupportedPresentation(f"未知の規則種別: {rule.kind}")
        for rule in self.rules:
            if rule.kind == "limit_chain" and rule.src in limits:
                raise UnsupportedPresentation(f"limit と limit_chain が衝突しています: {rule.src}")
        self._limits = limits

    def _branch(self, name: Optional[str]) -> Branch:
        if name is None or name not in self.branches:
            raise UnsupportedPresentation(f"未知のソート: {name}")
        return self.branches[name]

    @staticmethod
    def _check_condition(cond: Condition, src: Branch, dst: Branch) -> None:
        if cond.op not in ("<", "<=", "=="):
            raise UnsupportedPresentation(f"未知の比較演算子: {cond.op}")
        m = _VAR.match(cond.left)
        if not m or m.group(1) != "s" or int(m.group(2)) >= src.arity:
            raise UnsupportedPresentation(f"条件の左辺が不正です: {cond.left}")
        if not isinstance(cond.right, int):
            m = _VAR.match(cond.right)
            if not m or m.group(1) != "d" or int(m.group(2)) >= dst.arity:
                raise UnsupportedPresentation(f"条件の右辺が不正です: {cond.right}")

    # ------------------------------------------------------------------
    # 照会
    # ------------------------------------------------------------------
    def limit_of(self, sort: str) -> Optional[str]:
        return self._limits.get(sort)

    def limit_chain_declared(self, sort: str) -> bool:
        return any(r.kind == "limit_chain" and r.src == sort for r in self.rules)

    def is_element(self, code: Code) -> bool:
        sort, idx = code
        branch = self.branches.get(sort)
        if branch is None or len(idx) != branch.arity or any(i < 0 for i in idx):
            return False
        return not (branch.arity and branch.length is not None and idx[-1] >= branch.length)

    def chain_sorts(self) -> List[Branch]:
        """無限鎖をもつソート"""
        return [b for b in self.branches.values()
                if b.chain and b.arity >= 1 and b.length is None]

    def window_elements(self, window: int = WINDOW) -> List[Code]:
        """全添字が window 未満の要素"""
        codes = []
        for branch in sorted(self.branches.values(), key=lambda b: b.name):
            ranges = [range(window)] * branch.arity
            if branch.arity and branch.length is not None:
                ranges[-1] = range(min(window, branch.length))
            for idx in itertools.product(*ranges):
                codes.append((branch.name, tuple(idx)))
        return codes

    def whole(self) -> BranchSubset:
        return BranchSubset(Slice(name) for name in self.branches)

    # ------------------------------------------------------------------
    # 順序
    # ------------------------------------------------------------------
    def _predecessors(self, code: Code, bound: int) -> Iterator[Code]:
        """code の直下の要素 (添字は bound 以下に制限)"""
        sort, idx = code
        branch = self.branches[sort]
        if branch.chain and branch.arity and idx[-1] > 0:
            yield sort, idx[:-1] + (idx[-1] - 1,)
        for rule in self.rules:
            if rule.dst != sort:
                continue
            src = self.branches[rule.src]
            if rule.kind == "limit":
                for i in range(bound + 1):
                    yield rule.src, idx + (i,)
            elif rule.kind == "below":
                ranges = [range(bound + 1)] * src.arity
                if src.arity and src.length is not None:
                    ranges[-1] = range(min(bound + 1, src.length))
                for sidx in itertools.product(*ranges):
                    if all(c.holds(sidx, idx) for c in rule.conditions):
                        yield rule.src, tuple(sidx)

    def leq(self, x: Code, y: Code) -> bool:
        """
        x ≤ y を判定する (添字上界つきの下向き探索)

        Args:
            x: 要素コード
            y: 要素コード

        Returns:
            bool: x ≤ y なら True
        """
        if x == y:
            return True
        key = (x, y)
        if key in self._leq_cache:
            return self._leq_cache[key]
        bound = max([0, *x[1], *y[1]]) + 1
        seen = {y}
        frontier = [y]
        found = False
        while frontier and not found:
            nxt = []
            for node in frontier:
                for pred in self._predecessors(node, bound):
                    if pred == x:
                        found = True
                        break
                    if pred not in seen:
                        seen.add(pred)
                        nxt.append(pred)
                if found:
                    break
            frontier = nxt
        self._leq_cache[key] = found
        return found

    # ------------------------------------------------------------------
    # 部分集合演算
    # ------------------------------------------------------------------
    def normalize(self, items: Iterable[Slice]) -> BranchSubset:
        items = set(items)
        kept = [s for s in items
                if not any(o != s and _slice_covers(o, s) for o in items)]
        return BranchSubset(kept)

    def point(self, code: Code) -> Slice:
        if not self.is_element(code):
            raise ValidationError(f"要素ではありません: {code}")
        return Slice(code[0], tuple(code[1]))

    def subset(self, codes: Iterable[Union[Code, Slice]]) -> BranchSubset:
        items = []
        for c in codes:
            items.append(c if isinstance(c, Slice) else self.point(c))
        return self.normalize(items)

    def is_point(self, item: Slice) -> bool:
        return len(item.prefix) == self.branches[item.sort].arity

    def contains(self, A: BranchSubset, x: Code) -> bool:
        target = Slice(x[0], tuple(x[1]))
        return any(_slice_covers(item, target) for item in A.items)

    def subset_of(self, A: BranchSubset, B: BranchSubset) -> bool:
        return all(any(_slice_covers(b, a) for b in B.items) for a in A.items)

    def same(self, A: BranchSubset, B: BranchSubset) -> bool:
        return self.subset_of(A, B) and self.subset_of(B, A)

    def union(self, A: BranchSubset, B: BranchSubset) -> BranchSubset:
        return self.normalize(A.items | B.items)

    def up(self, A: BranchSubset) -> BranchSubset:
        """
        A^↑: A に有向部分集合の上限を加える (1ステップ)

        無限鎖は最終的に一つの鎖スライスに入るので、スライスが含む鎖の上限だけを加える。
        """
        added = set(A.items)
        for item in A.items:
            branch = self.branches[item.sort]
            target = self.limit_of(item.sort)
            if target is None or len(item.prefix) > branch.arity - 1:
                continue
            added.add(Slice(target, item.prefix))
        return self.normalize(added)

    def _below_sources(self, rule: AttachRule, prefix: Tuple[int, ...]) -> List[Slice]:
        """規則 rule の行き先スライス (dst, prefix) の下にある元のスライス"""
        src = self.branches[rule.src]
        fixed = len(prefix)
        upper: Dict[int, int] = {}
        exact: Dict[int, int] = {}
        for cond in rule.conditions:
            k = int(cond.left[1:])
            if isinstance(cond.right, int):
                rhs = cond.right
            else:
                l = int(cond.right[1:])
                if l >= fixed:
                    # 行き先の添字が動くので上界にならない
                    continue
                rhs = prefix[l]
            if cond.op == "==":
                exact[k] = rhs
            cap = rhs - 1 if cond.op == "<" else rhs
            upper[k] = min(upper.get(k, cap), cap)
        free = [k for k in range(src.arity) if k not in upper]
        head = src.arity - len(free)
        if free != list(range(head, src.arity)):
            raise UnsupportedPresentation(
                f"規則 {rule.src}→{rule.dst} の自由添字が接尾辞になっていません")
        ranges = []
        for k in range(head):
            cap = upper[k]
            if k == src.arity - 1 and src.length is not None:
                cap = min(cap, src.length - 1)
            if cap < 0 or exact.get(k, 0) > cap:
                return []
            ranges.append([exact[k]] if k in exact else range(cap + 1))
        return [Slice(rule.src, tuple(sidx)) for sidx in itertools.product(*ranges)]

    def down(self, A: BranchSubset) -> BranchSubset:
        """↓A (作業リストによる下方閉包)"""
        result = set(A.items)
        work = list(A.items)
        while work:
            item = work.pop()
            branch = self.branches[item.sort]
            new: List[Slice] = []
            if self.is_point(item):
                idx = item.prefix
                if branch.chain and branch.arity:
                    new.extend(Slice(item.sort, idx[:-1] + (j,)) for j in range(idx[-1]))
            for rule in self.rules:
                if rule.dst != item.sort:
                    continue
                if rule.kind == "limit":
                    new.append(Slice(rule.src, item.prefix))
                elif rule.kind == "below":
                    new.extend(self._below_sources(rule, item.prefix))
            for s in new:
                if not any(_slice_covers(r, s) for r in result):
                    result.add(s)
                    work.append(s)
        return self.normalize(result)

    def maximum(self, A: BranchSubset) -> Optional[Code]:
        """A の最大元 (点のスライスのみが候補)"""
        for item in A:
            if not self.is_point(item):
                continue
            code = (item.sort, item.prefix)
            if self.subset_of(A, self.down(self.subset([code]))):
                return code
        return None

    def has_minimum(self, window: int = WINDOW) -> bool:
        elements = self.window_elements(window)
        return any(all(self.leq(m, x) for x in elements) for m in elements
                   if all(i == 0 for i in m[1]))

    def chain_upper_bounds(self, sort: str, prefix: Tuple[int, ...],
                           window: int = WINDOW) -> List[Code]:
        """鎖 sort(prefix, ·) の窓内の上界"""
        bounds = []
        for y in self.window_elements(window):
            if y[0] == sort and y[1][:-1] == prefix:
                continue
            depth = max([0, *y[1]]) + 2
            if all(self.leq((sort, prefix + (i,)), y) for i in range(depth + 1)):
                bounds.append(y)
        return bounds

    def intersect(self, A: BranchSubset, B: BranchSubset) -> BranchSubset:
        """A ∩ B (スライス同士の交わりは小さい方か空)"""
        items = []
        for a in A.items:
            for b in B.items:
                if _slice_covers(a, b):
                    items.append(b)
                elif _slice_covers(b, a):
                    items.append(a)
        return self.normalize(items)

    def check_limits(self, window: int = WINDOW) -> Optional[Tuple[Code, Code]]:
        """
        宣言された limit が窓内で最小上界になっているか検証する

        Returns:
            Optional[Tuple[Code, Code]]: 違反 (limit, それより小さくない上界)、なければ None
        """
        for sort, target in self._limits.items():
            arity = self.branches[sort].arity
            for prefix in itertools.product(range(2), repeat=arity - 1):
                sup = (target, tuple(prefix))
                for y in self.chain_upper_bounds(sort, tuple(prefix), window):
                    if not self.leq(sup, y):
                        return sup, y
        return None

    # ------------------------------------------------------------------
    # 直積・JSON
    # ------------------------------------------------------------------
    def to_json(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "bottom": self.has_bottom,
            "branches": [
                {"name": b.name, "arity": b.arity, "length": b.length,
                 "chain": b.chain, "formal": b.formal}
                for b in self.branches.values() if b.name != BOTTOM
            ],
            "attach": [
                {"kind": r.kind, "src": r.src, "dst": r.dst,
                 "when": [[c.op, c.left, c.right] for c in r.conditions]}
                for r in self.rules if r.src != BOTTOM
            ],
        }

    @classmethod
    def from_json(cls, obj: Dict[str, Any]) -> "BranchPoset":
        try:
            branches = [Branch(b["name"], int(b.get("arity", 1)), b.get("length"),
                               bool(b.get("chain", True)), bool(b.get("formal", False)))
                        for b in obj["branches"]]
            rules = [AttachRule(r["kind"], r["src"], r.get("dst"),
                                tuple(Condition(c[0], c[1], c[2]) for c in r.get("when", [])))
                     for r in obj.get("attach", [])]
        except (KeyError, TypeError, IndexError) as e:
            raise ValidationError(f"分岐表示の JSON が不正です: {str(e)}") from e
        return cls(branches, rules, bottom=bool(obj.get("bottom", False)), name=obj.get("name", ""))

    def __repr__(self) -> str:
        return f"BranchPoset({self.name or list(self.branches)})"


