import logging
from typing import Any, Dict, List, Sequence

import numpy as np

from src.models.errors import NotSymmetric, ValidationError

# ロガーの設定
logger = logging.getLogger(__name__)

# 扱う行列の最大次元
MAX_DIM = 8


class SymMatrix:
    """d×d 実対称行列 (d ≤ 8、対称性は厳密に要求する)"""

    def __init__(self, entries: Any):
        """
        Args:
            entries: 行優先の2次元配列

        Raises:
            ValidationError: 正方でない・次元が大きすぎる・有限でない場合
            NotSymmetric: 対称でない場合
        """
        array = np.array(entries, dtype=float)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] == 0:
            raise ValidationError(f"正方行列ではありません: 形状 {array.shape}")
        if array.shape[0] > MAX_DIM:
            raise ValidationError(f"次元 {array.shape[0]} は上限 {MAX_DIM} を超えています")
        if not np.all(np.isfinite(array)):
            raise ValidationError("行列の成分は有限である必要があります")
        if not np.array_equal(array, array.T):
            raise NotSymmetric("行列が対称ではありません")
        self.array = array

    @classmethod
    def symmetrized(cls, array: np.ndarray) -> "SymMatrix":
        """丸め誤差で崩れた対称性を (A + Aᵀ)/2 で戻して生成する"""
        return cls((array + array.T) / 2)

    @classmethod
    def identity(cls, d: int) -> "SymMatrix":
        return cls(np.eye(d))

    @classmethod
    def diag(cls, values: Sequence[float]) -> "SymMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def d(self) -> int:
        return self.array.shape[0]

    @property
    def is_diagonal(self) -> bool:
        return bool(np.count_nonzero(self.array - np.diag(np.diagonal(self.array))) == 0)

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        if other.d != self.d:
            raise ValidationError(f"次元が一致しません: {self.d} と {other.d}")
        return SymMatrix(self.array + other.array)

    def trace_pairing(self, other: "SymMatrix") -> float:
        """(1/d) Tr(AB)"""
        return float(np.trace(self.array @ other.array)) / self.d

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.array, "fro"))

    def to_json(self) -> List[List[float]]:
        return self.array.tolist()

    @classmethod
    def from_json(cls, obj: Any) -> "SymMatrix":
        if isinstance(obj, dict):
            if "a" not in obj:
                raise ValidationError("行列の指定に 'a' がありません")
            obj = obj["a"]
        return cls(obj)

    def to_dict(self) -> Dict[str, Any]:
        return {"d": self.d, "a": self.to_json()}

    def __repr__(self) -> str:
        return f"SymMatrix({self.to_json()})"
