import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Union

from src.config import ITERATION_DEPTH
from src.models.branch_poset import BranchPoset, BranchSubset, Slice
from src.models.errors import BudgetExceeded
from src.models.poset import FinitePoset

# ロガーの設定
logger = logging.getLogger(__name__)

AnyPoset = Union[FinitePoset, BranchPoset]


@dataclass
class ClosureReport:
    """閉包演算の結果"""
    down: Any
    iterates: List[Any] = field(default_factory=list)
    bar: Any = None
    hat: Any = None
    iteration_count: int = 0
    hat_iteration_count: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "down": render_subset(self.down),
            "iterates": [render_subset(a) for a in self.iterates],
            "bar": render_subset(self.bar),
            "hat": render_subset(self.hat),
            "iteration_count": self.iteration_count,
            "hat_iteration_count": self.hat_iteration_count,
        }


def render_subset(A: Any) -> Any:
    """部分集合を JSON 向けに整形する"""
    if isinstance(A, BranchSubset):
        return [[s.sort, list(s.prefix)] for s in A]
    return sorted(int(a) for a in A)


def as_subset(P: AnyPoset, A: Optional[Iterable[Any]]) -> Any:
    """入力 (要素列・スライス列・部分集合) を P の部分集合表現に揃える"""
    if isinstance(P, BranchPoset):
        if isinstance(A, BranchSubset):
            return A
        return P.subset(A or [])
    return frozenset(A or [])


def closure_suite(P: AnyPoset, A: Optional[Iterable[Any]], depth: Optional[int] = None) -> ClosureReport:
    """
    ↓A、↑ の反復、bar A、hat A を計算する

    Args:
        P: 半順序集合 (有限または分岐表示)
        A: 部分集合
        depth: 反復の上限 (省略時は設定値)

    Returns:
        ClosureReport: 閉包の計算結果と反復回数

    Raises:
        BudgetExceeded: 反復が上限を超えた場合
    """
    depth = ITERATION_DEPTH if depth is None else depth
    A = as_subset(P, A)
    report = ClosureReport(down=P.down(A), iterates=[A])

    # bar A: ↑ の不動点
    current = A
    while True:
        nxt = P.up(current)
        if P.same(nxt, current):
            break
        report.iteration_count += 1
        if report.iteration_count > depth:
            raise BudgetExceeded(f"↑ の反復が上限 {depth} を超えました")
        report.iterates.append(nxt)
        current = nxt
    report.bar = current

    # hat A: ↓∘↑ の不動点
    current = report.down
    while True:
        nxt = P.down(P.up(current))
        if P.same(nxt, current):
            break
        report.hat_iteration_count += 1
        if report.hat_iteration_count > depth:
            raise BudgetExceeded(f"↓∘↑ の反復が上限 {depth} を超えました")
        current = nxt
    report.hat = current

    logger.debug(f"閉包計算: ↑ {report.iteration_count} 回, ↓∘↑ {report.hat_iteration_count} 回")
    return report


def bar(P: AnyPoset, A: Iterable[Any]) -> Any:
    return closure_suite(P, A).bar


def hat(P: AnyPoset, A: Iterable[Any]) -> Any:
    return closure_suite(P, A).hat


def tip(P: AnyPoset, A: Iterable[Any]) -> Optional[Any]:
    """
    A の先端 max(bar A) を返す

    Args:
        P: 半順序集合
        A: 部分集合

    Returns:
        Optional[Any]: 先端 (存在しない場合は None)
    """
    return P.maximum(closure_suite(P, A).bar)


def whole_sort(sort: str) -> Slice:
    return Slice(sort)
