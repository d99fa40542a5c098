import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.models.errors import OutsideTriangle, ValidationError
from src.models.extreal import integer_root, to_fraction

# ロガーの設定
logger = logging.getLogger(__name__)

BANACH_TAGS = ("l1", "l2", "linf")

Vector = Tuple[Fraction, ...]


# ----------------------------------------------------------------------
# ℚ^d 上のノルム (ℓ1 / ℓ2 / ℓ∞)
# ----------------------------------------------------------------------
def check_banach(tag: str) -> str:
    if tag not in BANACH_TAGS:
        raise ValidationError(f"不明なノルムです: {tag} (l1 / l2 / linf)")
    return tag


def dual_banach(tag: str) -> str:
    """双対ノルム (ℓ1 ↔ ℓ∞, ℓ2 ↔ ℓ2)"""
    return {"l1": "linf", "l2": "l2", "linf": "l1"}[check_banach(tag)]


def exact_sqrt(q: Fraction) -> Optional[Fraction]:
    """有理数の平方根が有理数ならそれを返す"""
    rn = integer_root(q.numerator, 2)
    rd = integer_root(q.denominator, 2)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


def exact_norm(v: Sequence[Fraction], tag: str) -> Optional[Fraction]:
    """‖v‖ が有理数ならその値 (ℓ2 ではピタゴラス的な場合のみ)"""
    tag = check_banach(tag)
    if tag == "l1":
        return sum((abs(x) for x in v), Fraction(0))
    if tag == "linf":
        return max((abs(x) for x in v), default=Fraction(0))
    return exact_sqrt(sum((x * x for x in v), Fraction(0)))


def banach_norm(v: Sequence[Any], tag: str) -> float:
    exact = exact_norm([to_fraction(x) for x in v], tag) if all(not isinstance(x, float) for x in v) else None
    if exact is not None:
        return float(exact)
    arr = np.asarray([float(x) for x in v])
    order = {"l1": 1, "l2": 2, "linf": np.inf}[check_banach(tag)]
    return float(np.linalg.norm(arr, order)) if arr.size else 0.0


def norm_leq(v: Sequence[Fraction], r: Fraction, tag: str) -> bool:
    """‖v‖ ≤ r を厳密に判定する (ℓ2 は二乗で比較)"""
    if r < 0:
        return False
    if check_banach(tag) == "l2":
        return sum((x * x for x in v), Fraction(0)) <= r * r
    return exact_norm(v, tag) <= r


# ----------------------------------------------------------------------
# 因果点
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class CausalPoint:
    """ℚ × ℚ^d の点 (t, v)。(t,x) ≤ (s,y) ⇔ ‖x − y‖ ≤ s − t"""
    t: Fraction
    v: Vector

    @classmethod
    def of(cls, t: Any, v: Sequence[Any]) -> "CausalPoint":
        return cls(to_fraction(t), tuple(to_fraction(x) for x in v))

    @property
    def d(self) -> int:
        return len(self.v)

    def leq(self, other: "CausalPoint", tag: str = "l2") -> bool:
        if other.d != self.d:
            raise ValidationError(f"次元が一致しません: {self.d} と {other.d}")
        diff = tuple(b - a for a, b in zip(self.v, other.v))
        return norm_leq(diff, other.t - self.t, tag)

    def __add__(self, other: "CausalPoint") -> "CausalPoint":
        return CausalPoint(self.t + other.t, tuple(a + b for a, b in zip(self.v, other.v)))

    def to_json(self) -> Dict[str, Any]:
        def enc(q: Fraction) -> Any:
            return q.numerator if q.denominator == 1 else {"num": q.numerator, "den": q.denominator}
        return {"t": enc(self.t), "v": [enc(x) for x in self.v]}

    def __str__(self) -> str:
        return f"({self.t}, ({', '.join(str(x) for x in self.v)}))"


# ----------------------------------------------------------------------
# 三角形 T = {0 ≤ x ≤ t} 上のノルム
# ----------------------------------------------------------------------
def parse_lp_exponent(value: Any) -> Optional[Fraction]:
    """[1,∞] の指数 (∞ は None)"""
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "∞"):
        return None
    if isinstance(value, float) and math.isinf(value):
        return None
    p = to_fraction(value)
    if p < 1:
        raise ValidationError(f"三角形ノルムの指数は [1,∞] です: {value}")
    return p


def conjugate_exponent(p: Optional[Fraction]) -> Optional[Fraction]:
    """1/p + 1/q = 1 (1 ↔ ∞)"""
    if p is None:
        return Fraction(1)
    if p == 1:
        return None
    return p / (p - 1)


class TriangleNorm:
    """
    T 上の 1-斉次な関数 |(t,x)| = t·n(x/t)

    profile は r = x/t ∈ [0,1] に対する n(r) = |(1,r)| をベクトル化して返す。
    """

    def __init__(self, name: str, profile: Callable[[np.ndarray], np.ndarray],
                 x_decreasing: bool, p: Optional[Fraction] = None, is_lp: bool = False):
        self.name = name
        self.profile = profile
        self.x_decreasing = x_decreasing
        self.p = p
        self.is_lp = is_lp

    @classmethod
    def lp(cls, p: Any) -> "TriangleNorm":
        """|(t,x)|_p = (t^p − x^p)^{1/p}、|(t,x)|_∞ = t"""
        exponent = parse_lp_exponent(p)
        if exponent is None:
            return cls("lp(inf)", lambda r: np.ones_like(r, dtype=float), True, None, True)
        e = float(exponent)

        def profile(r: np.ndarray) -> np.ndarray:
            with np.errstate(invalid="ignore"):
                return np.power(np.clip(1.0 - np.power(r, e), 0.0, None), 1.0 / e)
        return cls(f"lp({exponent})", profile, True, exponent, True)

    @classmethod
    def infinite(cls) -> "TriangleNorm":
        """(0,0) 以外で +∞"""
        return cls("infinite", lambda r: np.full_like(r, np.inf, dtype=float), True)

    @classmethod
    def tabulated(cls, rs: Sequence[float], values: Sequence[float], name: str = "tabulated") -> "TriangleNorm":
        """n(r) を折れ線で与える (x 減少性は表から判定する)"""
        rs_arr = np.asarray(rs, dtype=float)
        vals = np.asarray(values, dtype=float)
        if rs_arr.ndim != 1 or rs_arr.shape != vals.shape or rs_arr.size < 2:
            raise ValidationError("表の r と値の長さが一致しません")
        if rs_arr[0] != 0.0 or rs_arr[-1] != 1.0 or np.any(np.diff(rs_arr) <= 0):
            raise ValidationError("表の r は 0 から 1 までの狭義増加列である必要があります")
        if np.any(vals < 0):
            raise ValidationError("表の値は非負である必要があります")
        decreasing = bool(np.all(np.diff(vals) <= 0))
        return cls(name, lambda r: np.interp(r, rs_arr, vals), decreasing)

    @property
    def conjugate(self) -> Optional["TriangleNorm"]:
        """Lp ノルムの双対 |·|_q (それ以外は None)"""
        if not self.is_lp:
            return None
        q = conjugate_exponent(self.p)
        return TriangleNorm.lp("inf" if q is None else q)

    def at(self, r: float) -> float:
        return float(self.profile(np.array([r], dtype=float))[0])

    def __call__(self, t: Any, x: Any) -> float:
        """
        Raises:
            OutsideTriangle: (t,x) が T にない場合
        """
        t_val, x_val = _coord(t), _coord(x)
        if x_val < 0 or x_val > t_val:
            raise OutsideTriangle(f"({t}, {x}) は三角形 0 ≤ x ≤ t の外です")
        if t_val == 0:
            return 0.0
        value = self.at(float(x_val) / float(t_val))
        return math.inf if math.isinf(value) else float(t_val) * value

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "x_decreasing": self.x_decreasing}


def _coord(value: Any) -> Any:
    if isinstance(value, float):
        return value
    return to_fraction(value)


# ----------------------------------------------------------------------
# 単調列の族
# ----------------------------------------------------------------------
RAY_KINDS = ("constant", "timelike-ray", "null-ray", "cauchy-tail", "explicit")


@dataclass
class RaySequence:
    """
    因果順序で単調な点列

    timelike-ray / null-ray: (t0 + speed·k, v0 + k·u)
    cauchy-tail: (t0 + speed·(1 − 2^{−k}), v0 + (1 − 2^{−k})·u)
    explicit: 与えられた有限列
    """
    kind: str
    base: CausalPoint
    direction: Vector = ()
    speed: Fraction = Fraction(0)
    points: List[CausalPoint] = field(default_factory=list)
    start: int = 1

    def __post_init__(self) -> None:
        if self.kind not in RAY_KINDS:
            raise ValidationError(f"不明な列の種別です: {self.kind}")
        if self.kind in ("timelike-ray", "null-ray", "cauchy-tail"):
            if len(self.direction) != self.base.d:
                raise ValidationError("方向ベクトルの次元が基点と一致しません")
            if self.direction_norm is None:
                raise ValidationError("方向ベクトルの ℓ2 ノルムが有理数ではありません (ピタゴラス的な方向が必要)")
        if self.kind == "explicit" and not self.points:
            raise ValidationError("explicit 列には点が必要です")

    @property
    def direction_norm(self) -> Optional[Fraction]:
        return exact_norm(self.direction, "l2")

    def term(self, k: int) -> CausalPoint:
        if self.kind == "constant":
            return self.base
        if self.kind == "explicit":
            index = min(k - self.start, len(self.points) - 1)
            return self.points[max(index, 0)]
        if self.kind == "cauchy-tail":
            w = 1 - Fraction(1, 2 ** k)
        else:
            w = Fraction(k)
        return CausalPoint(self.base.t + self.speed * w, tuple(b + w * u for b, u in zip(self.base.v, self.direction)))

    def terms(self, count: int) -> List[CausalPoint]:
        return [self.term(k) for k in range(self.start, self.start + count)]

    def shifted(self, m: int) -> "RaySequence":
        """先頭 m 項を落とした列"""
        if self.kind == "explicit":
            return RaySequence(self.kind, self.base, points=self.points[m:] or self.points[-1:], start=self.start)
        return RaySequence(self.kind, self.base, self.direction, self.speed, start=self.start + m)

    def to_json(self) -> Dict[str, Any]:
        obj: Dict[str, Any] = {"kind": self.kind, "base": self.base.to_json(), "start": self.start}
        if self.direction:
            obj["direction"] = [str(x) for x in self.direction]
            obj["speed"] = str(self.speed)
        if self.points:
            obj["points"] = [p.to_json() for p in self.points]
        return obj

    @classmethod
    def from_json(cls, obj: Dict[str, Any]) -> "RaySequence":
        if "kind" not in obj:
            raise ValidationError("列の指定に 'kind' がありません")
        kind = obj["kind"]
        if kind == "explicit":
            points = [CausalPoint.of(p["t"], p["v"]) for p in obj.get("points", [])]
            if not points:
                raise ValidationError("explicit 列には点が必要です")
            return cls(kind, points[0], points=points)
        base = obj.get("base", {"t": 0, "v": [0] * len(obj.get("direction", []))})
        return cls(kind, CausalPoint.of(base["t"], base["v"]),
                   tuple(to_fraction(x) for x in obj.get("direction", [])),
                   to_fraction(obj.get("speed", 0)), start=int(obj.get("start", 1)))
