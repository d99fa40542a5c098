import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, Optional, Sequence

from src.models.errors import ValidationError
from src.models.extreal import to_fraction

# ロガーの設定
logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

# 1回の求解でのピボット数の上限
MAX_PIVOTS = 10000


@dataclass
class LPResult:
    """LP の結果 (x は元の変数の値)"""
    status: str
    x: Optional[List[Fraction]] = None
    value: Optional[Fraction] = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class SimplexTableau:
    """
    等式制約 A x = b (b ≥ 0), x ≥ 0 の正準形タブロー

    基底列は単位ベクトル、最終列が右辺。
    """

    def __init__(self, rows: List[List[Fraction]], basis: List[int]):
        self.rows = rows
        self.basis = basis
        self.pivots = 0

    @property
    def width(self) -> int:
        return len(self.rows[0]) - 1 if self.rows else 0

    def pivot(self, i: int, j: int) -> None:
        piv = self.rows[i][j]
        self.rows[i] = [v / piv for v in self.rows[i]]
        for k, row in enumerate(self.rows):
            if k != i and row[j] != 0:
                f = row[j]
                self.rows[k] = [a - f * b for a, b in zip(row, self.rows[i])]
        self.basis[i] = j
        self.pivots += 1

    def reduced_costs(self, cost: Sequence[Fraction]) -> List[Fraction]:
        return [cost[j] - sum((cost[self.basis[i]] * row[j] for i, row in enumerate(self.rows)), Fraction(0))
                for j in range(self.width)]

    def bland_step(self, cost: Sequence[Fraction], allowed: Sequence[bool]) -> str:
        """Bland の規則で1回ピボットする (optimal / unbounded / continue)"""
        reduced = self.reduced_costs(cost)
        entering = next((j for j in range(self.width) if allowed[j] and reduced[j] < 0), None)
        if entering is None:
            return OPTIMAL
        candidates = [(row[-1] / row[entering], self.basis[i], i)
                      for i, row in enumerate(self.rows) if row[entering] > 0]
        if not candidates:
            return UNBOUNDED
        _, _, leaving = min(candidates)
        self.pivot(leaving, entering)
        return "continue"

    def run(self, cost: Sequence[Fraction], allowed: Sequence[bool]) -> str:
        while True:
            status = self.bland_step(cost, allowed)
            if status != "continue":
                return status
            if self.pivots > MAX_PIVOTS:
                raise RuntimeError("ピボット数が上限を超えました")

    def solution(self) -> List[Fraction]:
        x = [Fraction(0)] * self.width
        for i, j in enumerate(self.basis):
            x[j] = self.rows[i][-1]
        return x


def _matrix(A: Optional[Sequence[Sequence[Any]]], n: int) -> List[List[Fraction]]:
    rows = [[to_fraction(v) for v in row] for row in (A or [])]
    if any(len(row) != n for row in rows):
        raise ValidationError(f"制約行列の列数が変数の数 {n} と一致しません")
    return rows


def _solve_standard(c: List[Fraction], A_ub: List[List[Fraction]], b_ub: List[Fraction],
                    A_eq: List[List[Fraction]], b_eq: List[Fraction]) -> LPResult:
    n = len(c)
    m_ub = len(A_ub)
    # 変数: 元の変数 n, スラック m_ub, 人工変数 (各行1つ)
    rows: List[List[Fraction]] = []
    for k, (row, rhs) in enumerate(list(zip(A_ub, b_ub)) + list(zip(A_eq, b_eq))):
        slack = [Fraction(0)] * m_ub
        if k < m_ub:
            slack[k] = Fraction(1)
        full = list(row) + slack
        if rhs < 0:
            full = [-v for v in full]
            rhs = -rhs
        rows.append(full + [rhs])
    m = len(rows)
    width = n + m_ub
    for i, row in enumerate(rows):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        rows[i] = row[:-1] + art + [row[-1]]
    tableau = SimplexTableau(rows, [width + i for i in range(m)])

    # 第1段階: 人工変数の和を最小化
    phase1 = [Fraction(0)] * width + [Fraction(1)] * m
    tableau.run(phase1, [True] * (width + m))
    if sum((tableau.rows[i][-1] for i, j in enumerate(tableau.basis) if j >= width), Fraction(0)) > 0:
        return LPResult(INFEASIBLE, pivots=tableau.pivots)

    # 基底に残った人工変数を追い出す (追い出せない行は冗長なので削除)
    i = 0
    while i < len(tableau.rows):
        if tableau.basis[i] >= width:
            j = next((j for j in range(width) if tableau.rows[i][j] != 0), None)
            if j is None:
                del tableau.rows[i]
                del tableau.basis[i]
                continue
            tableau.pivot(i, j)
        i += 1

    # 第2段階
    cost = list(c) + [Fraction(0)] * (m_ub + m)
    allowed = [True] * width + [False] * m
    status = tableau.run(cost, allowed)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, pivots=tableau.pivots)
    x = tableau.solution()[:n]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult(OPTIMAL, x, value, tableau.pivots)


def solve_lp(c: Sequence[Any], A_ub: Optional[Sequence[Sequence[Any]]] = None,
             b_ub: Optional[Sequence[Any]] = None, A_eq: Optional[Sequence[Sequence[Any]]] = None,
             b_eq: Optional[Sequence[Any]] = None, free: Optional[Sequence[bool]] = None,
             lexicographic: bool = False) -> LPResult:
    """
    min c·x s.t. A_ub x ≤ b_ub, A_eq x = b_eq を有理数で厳密に解く

    free で指定した変数は符号自由 (内部で x = x⁺ − x⁻ に分解)、それ以外は x ≥ 0。
    lexicographic が真なら最適解のうち辞書式最小のものを返す。

    Args:
        c: 目的関数の係数
        A_ub: 不等式制約の係数行列
        b_ub: 不等式制約の右辺
        A_eq: 等式制約の係数行列
        b_eq: 等式制約の右辺
        free: 符号自由な変数のフラグ
        lexicographic: 辞書式最小の最適解を求めるか

    Returns:
        LPResult: 状態 (optimal / infeasible / unbounded)、解、最適値
    """
    c = [to_fraction(v) for v in c]
    n = len(c)
    A_ub_m = _matrix(A_ub, n)
    A_eq_m = _matrix(A_eq, n)
    b_ub_v = [to_fraction(v) for v in (b_ub or [])]
    b_eq_v = [to_fraction(v) for v in (b_eq or [])]
    if len(A_ub_m) != len(b_ub_v) or len(A_eq_m) != len(b_eq_v):
        raise ValidationError("制約の行数と右辺の長さが一致しません")
    free = list(free) if free is not None else [False] * n

    # 符号自由な変数を分解する
    split = [j for j in range(n) if free[j]]

    def expand(row: List[Fraction]) -> List[Fraction]:
        return row + [-row[j] for j in split]

    result = _solve_standard(expand(c), [expand(r) for r in A_ub_m], b_ub_v,
                             [expand(r) for r in A_eq_m], b_eq_v)
    if result.optimal and lexicographic:
        result = _lexicographic(expand(c), [expand(r) for r in A_ub_m], b_ub_v,
                                [expand(r) for r in A_eq_m], b_eq_v, result)
    if result.optimal:
        x = result.x[:n]
        for k, j in enumerate(split):
            x[j] -= result.x[n + k]
        result = LPResult(OPTIMAL, x, result.value, result.pivots)
    logger.debug(f"LP ({len(A_ub_m)}+{len(A_eq_m)} 制約, {n} 変数): {result.status}")
    return result


def _lexicographic(c: List[Fraction], A_ub: List[List[Fraction]], b_ub: List[Fraction],
                   A_eq: List[List[Fraction]], b_eq: List[Fraction], first: LPResult) -> LPResult:
    """最適値を固定したうえで x_0, x_1, … を順に最小化する"""
    A_eq = list(A_eq) + [list(c)]
    b_eq = list(b_eq) + [first.value]
    pivots = first.pivots
    x = first.x
    n = len(c)
    for k in range(n):
        unit = [Fraction(1) if j == k else Fraction(0) for j in range(n)]
        step = _solve_standard(unit, A_ub, b_ub, A_eq, b_eq)
        pivots += step.pivots
        if not step.optimal:
            break
        x = step.x
        A_eq = A_eq + [unit]
        b_eq = b_eq + [step.x[k]]
    return LPResult(OPTIMAL, x, first.value, pivots)
