import logging
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.models.cone import ConeVec, DiscreteCone
from src.models.errors import ValidationError
from src.models.extreal import INF, ZERO, ExtNonneg, to_fraction

# ロガーの設定
logger = logging.getLogger(__name__)


def _encode(q: Fraction) -> Dict[str, int]:
    return {"num": q.numerator, "den": q.denominator}


class DualVector:
    """離散錐上の線形汎関数 L_f(g) = Σ f_i g_i μ_i (f_i ∈ [0,∞])"""

    def __init__(self, cone: DiscreteCone, f: Any):
        self.cone = cone
        self.f = f if isinstance(f, ConeVec) else ConeVec(f)
        if len(self.f) != cone.n:
            raise ValidationError(f"双対ベクトルの長さ {len(self.f)} が次元 {cone.n} と一致しません")

    @property
    def n(self) -> int:
        return self.cone.n

    def __call__(self, g: ConeVec) -> ExtNonneg:
        return self.cone.pairing(self.f, g)

    def join(self, other: "DualVector") -> "DualVector":
        return DualVector(self.cone, self.f.join(other.f))

    def meet(self, other: "DualVector") -> "DualVector":
        return DualVector(self.cone, self.f.meet(other.f))

    def __le__(self, other: "DualVector") -> bool:
        return self.f <= other.f

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, DualVector) and self.f == other.f and self.cone.mu == other.cone.mu

    def __hash__(self) -> int:
        return hash((self.f, self.cone.mu))

    def __repr__(self) -> str:
        return f"DualVector{self.f}"

    def to_json(self) -> Dict[str, Any]:
        return {"mu": [_encode(m) for m in self.cone.mu], "f": self.f.to_json()}

    @classmethod
    def from_json(cls, obj: Dict[str, Any]) -> "DualVector":
        if "mu" not in obj or "f" not in obj:
            raise ValidationError("双対ベクトルには 'mu' と 'f' が必要です")
        return cls(DiscreteCone(obj["mu"]), obj["f"])


class SubwedgeSpec:
    """
    部分楔 W′ = cone(g_1..g_m) ⊂ ℚ_{≥0}^n と生成元上の値 M(g_k)

    生成元は有限座標のみ。M の線形性の検査は拡張処理の仮定の LP が担う。
    """

    def __init__(self, cone: DiscreteCone, generators: Sequence[Sequence[Any]], values: Sequence[Any]):
        """
        Args:
            cone: 全体の離散錐
            generators: 生成元 (非負有理数のベクトル)
            values: 生成元での値 (非負有理数)

        Raises:
            ValidationError: 長さや符号が不正な場合
        """
        self.cone = cone
        self.generators: List[Tuple[Fraction, ...]] = [tuple(to_fraction(x) for x in g) for g in generators]
        self.values: List[Fraction] = [to_fraction(v) for v in values]
        if len(self.generators) != len(self.values):
            raise ValidationError(f"生成元 {len(self.generators)} 個に対して値が {len(self.values)} 個です")
        for g in self.generators:
            if len(g) != cone.n:
                raise ValidationError(f"生成元の長さ {len(g)} が次元 {cone.n} と一致しません")
            if any(x < 0 for x in g):
                raise ValidationError(f"生成元は非負である必要があります: {[str(x) for x in g]}")
        if any(v < 0 for v in self.values):
            raise ValidationError("生成元での値は非負である必要があります")

    @property
    def n(self) -> int:
        return self.cone.n

    @property
    def m(self) -> int:
        return len(self.generators)

    def with_generator(self, g: Sequence[Fraction], value: Fraction) -> "SubwedgeSpec":
        return SubwedgeSpec(self.cone, self.generators + [tuple(g)], self.values + [value])

    def combine(self, coeffs: Sequence[Fraction]) -> Tuple[Tuple[Fraction, ...], Fraction]:
        """Σ α_k g_k とその値 Σ α_k M(g_k)"""
        vec = tuple(sum((a * g[i] for a, g in zip(coeffs, self.generators)), Fraction(0))
                    for i in range(self.n))
        value = sum((a * v for a, v in zip(coeffs, self.values)), Fraction(0))
        return vec, value

    def to_json(self) -> Dict[str, Any]:
        return {
            "mu": [_encode(m) for m in self.cone.mu],
            "generators": [[_encode(x) for x in g] for g in self.generators],
            "values": [_encode(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, obj: Dict[str, Any]) -> "SubwedgeSpec":
        for key in ("mu", "generators", "values"):
            if key not in obj:
                raise ValidationError(f"部分楔の指定に '{key}' がありません")
        return cls(DiscreteCone(obj["mu"]), obj["generators"], obj["values"])


class BoundPair:
    """
    上下界 φ ≤ M̂ ≤ ψ

    φ は零写像 (phi が空) または有限双対ベクトルの最小値 min_j L_{φ_j}、
    ψ は ∞-写像 (psi が None: 0 で 0、それ以外で +∞) または有限双対ベクトルの最大値 max_k L_{ψ_k}。
    """

    def __init__(self, cone: DiscreteCone, phi: Optional[Sequence[Sequence[Any]]] = None,
                 psi: Optional[Sequence[Sequence[Any]]] = None):
        self.cone = cone
        self.phi: List[ConeVec] = [self._finite(p, "φ") for p in (phi or [])]
        self.psi: Optional[List[ConeVec]] = None if psi is None else [self._finite(p, "ψ") for p in psi]
        if self.psi is not None and not self.psi:
            raise ValidationError("ψ には少なくとも1つの双対ベクトルが必要です")

    def _finite(self, values: Any, label: str) -> ConeVec:
        v = values if isinstance(values, ConeVec) else ConeVec(values)
        if len(v) != self.cone.n:
            raise ValidationError(f"{label} の長さ {len(v)} が次元 {self.cone.n} と一致しません")
        if not v.is_finite:
            raise ValidationError(f"{label} の双対ベクトルは有限である必要があります")
        return v

    @property
    def phi_is_zero(self) -> bool:
        return not self.phi

    @property
    def psi_is_infinite(self) -> bool:
        return self.psi is None

    def lower(self, g: ConeVec) -> ExtNonneg:
        if not self.phi:
            return ZERO
        return min(self.cone.pairing(p, g) for p in self.phi)

    def upper(self, g: ConeVec) -> ExtNonneg:
        if self.psi is None:
            return ZERO if all(x.is_zero for x in g) else INF
        return max(self.cone.pairing(p, g) for p in self.psi)

    def weights(self, forms: Sequence[ConeVec]) -> List[List[Fraction]]:
        """各双対ベクトルの係数 f_i μ_i (LP の行)"""
        return [[fi.value * m for fi, m in zip(f, self.cone.mu)] for f in forms]

    def to_json(self) -> Dict[str, Any]:
        return {
            "phi": [p.to_json() for p in self.phi],
            "psi": None if self.psi is None else [p.to_json() for p in self.psi],
        }

    @classmethod
    def from_json(cls, cone: DiscreteCone, obj: Optional[Dict[str, Any]]) -> "BoundPair":
        if not obj:
            return cls(cone)
        return cls(cone, obj.get("phi") or [], obj.get("psi"))
