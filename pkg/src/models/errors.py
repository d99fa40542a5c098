from typing import Any, Optional


class HyperconeError(Exception):
    """hypercone の基底例外"""
    pass


class ValidationError(HyperconeError):
    """入力データ検証エラー"""
    pass


class PowerZeroExponent(HyperconeError):
    """指数 0 の冪は定義されない"""
    pass


class NotComparable(HyperconeError):
    """順序関係にない要素の差・比較"""
    pass


class BudgetExceeded(HyperconeError):
    """探索予算の超過"""
    pass


class UnsupportedPresentation(HyperconeError):
    """サポート外の分岐表示"""
    pass


class NoJoins(HyperconeError):
    """二項上限が存在しない"""
    pass


class UnknownCatalogId(HyperconeError):
    """未知のカタログ錐 ID"""
    pass


class PreconditionFailed(HyperconeError):
    """事前条件違反"""
    pass


class HypothesisFailed(HyperconeError):
    """拡張定理の仮定が成り立たない"""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class Unbounded(HyperconeError):
    """LP が非有界"""
    pass


class NotProbability(HyperconeError):
    """重みが確率測度でない"""
    pass


class BoundaryCase(HyperconeError):
    """境界値 (0 または ∞) を含むため達成点が存在しない"""
    pass


class NotSymmetric(HyperconeError):
    """対称行列でない"""
    pass


class NotPSD(HyperconeError):
    """半正定値でない"""
    pass


class NotPD(HyperconeError):
    """正定値でない"""
    pass


class OutsideTriangle(HyperconeError):
    """三角形 T = {0 ≤ x ≤ t} の外の点"""
    pass


class NotCausal(HyperconeError):
    """因果的でない点 (‖v‖ > t)"""
    pass


class NotMonotone(HyperconeError):
    """単調でない列"""
    pass


class Inconclusive(HyperconeError):
    """予算内で判定できない"""
    pass


class NotSummable(HyperconeError):
    """増分が総和可能でない"""
    pass


class EmptyOpen(HyperconeError):
    """基本開集合が空"""
    pass


class NotPartialOrder(HyperconeError):
    """関係が半順序でない"""
    pass
