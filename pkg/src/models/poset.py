import itertools
import logging
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence

import numpy as np

from src.models.errors import NotPartialOrder, ValidationError

# ロガーの設定
logger = logging.getLogger(__name__)

Subset = FrozenSet[int]


def validate_partial_order(leq: np.ndarray) -> Optional[str]:
    """
    ブール行列が半順序かどうかを検証する

    Args:
        leq: n×n のブール行列

    Returns:
        Optional[str]: エラーメッセージ（問題がなければNone）
    """
    if leq.ndim != 2 or leq.shape[0] != leq.shape[1]:
        return f"関係行列が正方行列ではありません: {leq.shape}"
    if not np.all(np.diag(leq)):
        return "反射律が成り立ちません"
    both = leq & leq.T
    np.fill_diagonal(both, False)
    if np.any(both):
        i, j = np.argwhere(both)[0]
        return f"反対称律が成り立ちません: {i} と {j}"
    composed = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
    if np.any(composed & ~leq):
        i, j = np.argwhere(composed & ~leq)[0]
        return f"推移律が成り立ちません: {i} ≤ … ≤ {j}"
    return None


def transitive_closure(leq: np.ndarray) -> np.ndarray:
    """Warshall 法による反射推移閉包"""
    closure = np.array(leq, dtype=bool)
    np.fill_diagonal(closure, True)
    for k in range(closure.shape[0]):
        closure |= np.outer(closure[:, k], closure[k, :])
    return closure


class FinitePoset:
    """有限半順序集合 (関係はブール行列で保持する)"""

    def __init__(self, leq: Any, labels: Optional[Sequence[str]] = None, check: bool = True):
        """
        有限半順序集合を初期化する

        Args:
            leq: n×n のブール行列 (leq[i, j] は i ≤ j)
            labels: 要素のラベル
            check: 半順序の検証を行うかどうか

        Raises:
            NotPartialOrder: 関係が半順序でない場合
        """
        self.leq_matrix = np.array(leq, dtype=bool)
        if self.leq_matrix.ndim != 2:
            self.leq_matrix = self.leq_matrix.reshape((0, 0))
        if check:
            message = validate_partial_order(self.leq_matrix)
            if message:
                raise NotPartialOrder(message)
        n = self.leq_matrix.shape[0]
        self.labels = list(labels) if labels is not None else [str(i) for i in range(n)]
        if len(self.labels) != n:
            raise ValidationError("ラベル数と要素数が一致しません")

    # ------------------------------------------------------------------
    # 構築
    # ------------------------------------------------------------------
    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]],
                   labels: Optional[Sequence[str]] = None) -> "FinitePoset":
        """生成関係の組から推移閉包をとって構築する"""
        base = np.eye(n, dtype=bool)
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise ValidationError(f"要素番号が範囲外です: ({i}, {j})")
            base[i, j] = True
        return cls(transitive_closure(base), labels)

    @classmethod
    def chain(cls, k: int) -> "FinitePoset":
        return cls(np.triu(np.ones((k, k), dtype=bool)))

    @classmethod
    def antichain(cls, k: int) -> "FinitePoset":
        return cls(np.eye(k, dtype=bool))

    @classmethod
    def power_set(cls, k: int) -> "FinitePoset":
        """{0..k-1} の冪集合 (包含順序、要素はビットマスク)"""
        size = 1 << k
        masks = np.arange(size)
        leq = (masks[:, None] & ~masks[None, :]) == 0
        labels = ["{" + ",".join(str(b) for b in range(k) if m >> b & 1) + "}" for m in range(size)]
        return cls(leq, labels)

    @classmethod
    def from_json(cls, obj: Dict[str, Any]) -> "FinitePoset":
        elements = obj.get("elements")
        if not isinstance(elements, list):
            raise ValidationError("'elements' はリストである必要があります")
        return cls.from_pairs(len(elements), obj.get("leq", []), [str(e) for e in elements])

    def to_json(self) -> Dict[str, Any]:
        pairs = [[int(i), int(j)] for i, j in np.argwhere(self.leq_matrix) if i != j]
        return {"elements": list(self.labels), "leq": pairs}

    # ------------------------------------------------------------------
    # 基本演算
    # ------------------------------------------------------------------
    @property
    def n(self) -> int:
        return self.leq_matrix.shape[0]

    @property
    def elements(self) -> range:
        return range(self.n)

    def leq(self, i: int, j: int) -> bool:
        return bool(self.leq_matrix[i, j])

    def up(self, A: Iterable[int]) -> Subset:
        """A^↑: 有限の有向集合は最大元を含むので A 自身"""
        return frozenset(A)

    def down(self, A: Iterable[int]) -> Subset:
        """↓A"""
        A = list(A)
        if not A:
            return frozenset()
        mask = np.any(self.leq_matrix[:, A], axis=1)
        return frozenset(int(i) for i in np.flatnonzero(mask))

    def up_set(self, A: Iterable[int]) -> Subset:
        A = list(A)
        if not A:
            return frozenset()
        mask = np.any(self.leq_matrix[A, :], axis=0)
        return frozenset(int(i) for i in np.flatnonzero(mask))

    def upper_bounds(self, A: Iterable[int]) -> Subset:
        A = list(A)
        if not A:
            return frozenset(self.elements)
        mask = np.all(self.leq_matrix[A, :], axis=0)
        return frozenset(int(i) for i in np.flatnonzero(mask))

    def lower_bounds(self, A: Iterable[int]) -> Subset:
        A = list(A)
        if not A:
            return frozenset(self.elements)
        mask = np.all(self.leq_matrix[:, A], axis=1)
        return frozenset(int(i) for i in np.flatnonzero(mask))

    def maximum(self, A: Iterable[int]) -> Optional[int]:
        A = list(A)
        for candidate in A:
            if all(self.leq_matrix[a, candidate] for a in A):
                return candidate
        return None

    def minimum(self, A: Iterable[int]) -> Optional[int]:
        A = list(A)
        for candidate in A:
            if all(self.leq_matrix[candidate, a] for a in A):
                return candidate
        return None

    def sup(self, A: Iterable[int]) -> Optional[int]:
        return self.minimum(self.upper_bounds(A))

    def inf(self, A: Iterable[int]) -> Optional[int]:
        return self.maximum(self.lower_bounds(A))

    def join(self, i: int, j: int) -> Optional[int]:
        return self.sup([i, j])

    def meet(self, i: int, j: int) -> Optional[int]:
        return self.inf([i, j])

    def is_directed(self, A: Iterable[int]) -> bool:
        """空でなく、任意の2元が A 内に上界を持つ"""
        A = list(A)
        if not A:
            return False
        members = set(A)
        for a, b in itertools.combinations(A, 2):
            common = self.upper_bounds([a, b]) & members
            if not common:
                return False
        return True

    def union(self, A: Iterable[int], B: Iterable[int]) -> Subset:
        return frozenset(A) | frozenset(B)

    def contains(self, A: Iterable[int], x: int) -> bool:
        return x in frozenset(A)

    def subset_of(self, A: Iterable[int], B: Iterable[int]) -> bool:
        return frozenset(A) <= frozenset(B)

    def same(self, A: Iterable[int], B: Iterable[int]) -> bool:
        return frozenset(A) == frozenset(B)

    def subsets(self) -> Iterator[Subset]:
        """全部分集合を列挙する"""
        for mask in range(1 << self.n):
            yield frozenset(i for i in range(self.n) if mask >> i & 1)

    def directed_subsets(self) -> Iterator[Subset]:
        for A in self.subsets():
            if self.is_directed(A):
                yield A

    # ------------------------------------------------------------------
    # 性質
    # ------------------------------------------------------------------
    def is_lattice(self) -> bool:
        if self.n == 0:
            return False
        return all(self.join(i, j) is not None and self.meet(i, j) is not None
                   for i, j in itertools.combinations(self.elements, 2))

    def is_complete_lattice(self) -> bool:
        """有限束は空集合の上限・下限 (最小元・最大元) も持つ"""
        return self.is_lattice() and self.sup([]) is not None and self.inf([]) is not None

    def bottom(self) -> Optional[int]:
        return self.minimum(self.elements)

    def top(self) -> Optional[int]:
        return self.maximum(self.elements)

    def is_monotone(self, mapping: Sequence[int], target: "FinitePoset") -> bool:
        idx = np.argwhere(self.leq_matrix)
        return all(target.leq(mapping[i], mapping[j]) for i, j in idx)

    def product(self, other: "FinitePoset") -> "FinitePoset":
        leq = np.kron(self.leq_matrix, other.leq_matrix).astype(bool)
        labels = [f"({a},{b})" for a in self.labels for b in other.labels]
        return FinitePoset(leq, labels, check=False)

    def canonical_key(self) -> bytes:
        """同型類の代表キー (全置換の最小バイト列、n ≤ 6 向け)"""
        best = None
        for perm in itertools.permutations(range(self.n)):
            key = self.leq_matrix[np.ix_(perm, perm)].tobytes()
            if best is None or key < best:
                best = key
        return best if best is not None else b""

    def __repr__(self) -> str:
        return f"FinitePoset(n={self.n})"


# ----------------------------------------------------------------------
# 列挙
# ----------------------------------------------------------------------
def _lower_sets(leq: np.ndarray) -> Iterator[List[int]]:
    k = leq.shape[0]
    for mask in range(1 << k):
        members = [i for i in range(k) if mask >> i & 1]
        closed = True
        for i in members:
            below = np.flatnonzero(leq[:, i])
            if any(not (mask >> int(b) & 1) for b in below):
                closed = False
                break
        if closed:
            yield members


def naturally_labelled_posets(n: int) -> Iterator[FinitePoset]:
    """
    自然なラベル付け (i ≤ j ⇒ i ≤ j as integers) の半順序を全列挙する

    新しい要素 k は既存要素の下集合の真上に置かれる。

    Args:
        n: 要素数

    Yields:
        FinitePoset: 半順序集合
    """
    if n == 0:
        yield FinitePoset(np.zeros((0, 0), dtype=bool), check=False)
        return

    def extend(leq: np.ndarray) -> Iterator[np.ndarray]:
        k = leq.shape[0]
        if k == n:
            yield leq
            return
        for below in _lower_sets(leq):
            grown = np.zeros((k + 1, k + 1), dtype=bool)
            grown[:k, :k] = leq
            grown[k, k] = True
            grown[below, k] = True
            yield from extend(grown)

    for leq in extend(np.ones((1, 1), dtype=bool)):
        yield FinitePoset(leq, check=False)


def unlabelled_posets(n: int) -> List[FinitePoset]:
    """同型を除いた半順序集合のリスト"""
    seen = {}
    for poset in naturally_labelled_posets(n):
        key = poset.canonical_key()
        if key not in seen:
            seen[key] = poset
    logger.debug(f"{n} 要素の非同型半順序: {len(seen)} 個")
    return list(seen.values())


def finite_lattices(max_n: int) -> Iterator[FinitePoset]:
    """要素数 1..max_n の (ラベル付き) 有限束を列挙する"""
    for n in range(1, max_n + 1):
        for poset in naturally_labelled_posets(n):
            if poset.is_lattice():
                yield poset
