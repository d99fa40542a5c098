import logging
import math
from fractions import Fraction
from functools import total_ordering
from typing import Any, Dict, Optional, Tuple, Union

from src.models.errors import NotComparable, PowerZeroExponent, ValidationError

# ロガーの設定
logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]

INF_TOKENS = ("inf", "+inf", "∞", "+∞", "infinity")


def to_fraction(value: Any) -> Fraction:
    """
    各種入力を有理数に変換する

    Args:
        value: int / Fraction / "a/b" 文字列 / {"num","den"} 辞書 / 有限 float

    Returns:
        Fraction: 変換結果

    Raises:
        ValidationError: 変換できない場合
    """
    if isinstance(value, bool):
        raise ValidationError(f"真偽値は有理数に変換できません: {value}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, dict) and "num" in value and "den" in value:
        if int(value["den"]) == 0:
            raise ValidationError("分母が 0 です")
        return Fraction(int(value["num"]), int(value["den"]))
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            raise ValidationError(f"有限の数ではありません: {value}")
        # 10進表記経由で 0.1 -> 1/10 とする
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValidationError(f"有理数として解釈できません: {value}") from e
    raise ValidationError(f"サポートされていない数値型です: {type(value).__name__}")


def integer_root(n: int, k: int) -> Optional[int]:
    """n の整数 k 乗根 (割り切れない場合は None)"""
    if n < 0 or k < 1:
        return None
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    return x if x ** k == n else None


def exact_power(q: Fraction, p: Fraction) -> Optional[Fraction]:
    """
    正の有理数 q の有理数乗 q^p を厳密に計算する

    Args:
        q: 正の有理数
        p: 指数

    Returns:
        Optional[Fraction]: 結果が有理数ならその値、そうでなければ None
    """
    p = Fraction(p)
    if p.denominator == 1:
        return q ** p.numerator
    rn = integer_root(q.numerator, p.denominator)
    rd = integer_root(q.denominator, p.denominator)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd) ** p.numerator


@total_ordering
class ExtNonneg:
    """[0, +∞] の厳密な値 (有理数または +∞)"""

    __slots__ = ("_value",)

    def __init__(self, value: Any = 0):
        if isinstance(value, ExtNonneg):
            self._value = value._value
            return
        if isinstance(value, str) and value.strip().lower() in INF_TOKENS:
            self._value = None
            return
        if isinstance(value, float) and math.isinf(value):
            if value < 0:
                raise ValidationError("-∞ は [0,∞] の元ではありません")
            self._value = None
            return
        q = to_fraction(value)
        if q < 0:
            raise ValidationError(f"負の値は [0,∞] の元ではありません: {q}")
        self._value = q

    @classmethod
    def inf(cls) -> "ExtNonneg":
        return cls("inf")

    @property
    def is_inf(self) -> bool:
        return self._value is None

    @property
    def is_zero(self) -> bool:
        return self._value == 0

    @property
    def value(self) -> Fraction:
        """有限値を返す (∞ の場合は ValueError)"""
        if self._value is None:
            raise ValueError("+∞ に有限値はありません")
        return self._value

    def __add__(self, other: Any) -> "ExtNonneg":
        other = _coerce(other)
        if self.is_inf or other.is_inf:
            return INF
        return ExtNonneg(self._value + other._value)

    __radd__ = __add__

    def __mul__(self, other: Any) -> "ExtNonneg":
        other = _coerce(other)
        # 0·∞ = 0
        if self.is_zero or other.is_zero:
            return ZERO
        if self.is_inf or other.is_inf:
            return INF
        return ExtNonneg(self._value * other._value)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Any) -> "ExtNonneg":
        q = to_fraction(scalar)
        if q <= 0:
            raise ValidationError("正のスカラーでのみ除算できます")
        return self * (1 / q)

    def minus(self, other: Any) -> "ExtNonneg":
        """格子差 self ⊖ other (other ≤ self が必要)"""
        other = _coerce(other)
        if other > self:
            raise NotComparable(f"{other} ≰ {self} のため差を取れません")
        if self.is_inf:
            return INF
        return ExtNonneg(self._value - other._value)

    def eps(self) -> "ExtNonneg":
        """無限部分 ε(a)"""
        return INF if self.is_inf else ZERO

    def __eq__(self, other: Any) -> bool:
        try:
            other = _coerce(other)
        except (ValidationError, TypeError):
            return NotImplemented
        return self._value == other._value

    def __lt__(self, other: Any) -> bool:
        other = _coerce(other)
        if self.is_inf:
            return False
        if other.is_inf:
            return True
        return self._value < other._value

    def __hash__(self) -> int:
        return hash(math.inf) if self.is_inf else hash(self._value)

    def __float__(self) -> float:
        return math.inf if self.is_inf else float(self._value)

    def __repr__(self) -> str:
        return f"ExtNonneg({self})"

    def __str__(self) -> str:
        return "inf" if self.is_inf else str(self._value)

    def to_json(self) -> Any:
        if self.is_inf:
            return "inf"
        return {"num": self._value.numerator, "den": self._value.denominator}

    @classmethod
    def from_json(cls, obj: Any) -> "ExtNonneg":
        return cls(obj)


def _coerce(value: Any) -> ExtNonneg:
    return value if isinstance(value, ExtNonneg) else ExtNonneg(value)


ZERO = ExtNonneg(0)
ONE = ExtNonneg(1)
INF = ExtNonneg.inf()

PowerResult = Union[ExtNonneg, float]


def ext_pow(a: Any, p: Any) -> PowerResult:
    """
    規約付きの冪 a^p を計算する

    0^p = 0 (p > 0), 0^p = ∞ (p < 0), ∞^p = ∞ (p > 0), ∞^p = 0 (p < 0)。
    有限正の a では結果が有理数なら ExtNonneg、そうでなければ float を返す。

    Args:
        a: 底
        p: 有理数の指数

    Returns:
        PowerResult: 冪の値

    Raises:
        PowerZeroExponent: p = 0 の場合
    """
    a = _coerce(a)
    p = to_fraction(p)
    if p == 0:
        raise PowerZeroExponent("指数 0 の冪は扱いません")
    if a.is_zero:
        return ZERO if p > 0 else INF
    if a.is_inf:
        return INF if p > 0 else ZERO
    exact = exact_power(a.value, p)
    if exact is not None:
        return ExtNonneg(exact)
    return float(a.value) ** float(p)


def reciprocal(a: Any) -> ExtNonneg:
    """逆数 (1/0 = ∞, 1/∞ = 0)"""
    a = _coerce(a)
    if a.is_zero:
        return INF
    if a.is_inf:
        return ZERO
    return ExtNonneg(1 / a.value)


def as_float(value: Any) -> float:
    """ExtNonneg / 数値を float に変換する (∞ は math.inf)"""
    if isinstance(value, ExtNonneg):
        return float(value)
    return float(value)


def ext_arith(a: Any, b: Any, lam: Any = 1, p: Optional[Any] = None) -> Dict[str, Any]:
    """
    和・積・スカラー倍・冪をまとめて計算する

    Args:
        a: 第1引数
        b: 第2引数
        lam: 非負有理数のスカラー
        p: 冪の指数 (None の場合は冪を計算しない)

    Returns:
        Dict[str, Any]: sum / product / scalar / power

    Raises:
        PowerZeroExponent: p = 0 の場合
    """
    a = _coerce(a)
    b = _coerce(b)
    lam = to_fraction(lam)
    if lam < 0:
        raise ValidationError("スカラーは非負である必要があります")
    result = {
        "sum": a + b,
        "product": a * b,
        "scalar": a * lam,
    }
    if p is not None:
        result["power"] = ext_pow(a, p)
    return result


def ext_diff_eps(a: Any, b: Any) -> Tuple[ExtNonneg, ExtNonneg]:
    """
    格子差 a ⊖ b と無限部分 ε(a) を返す

    Raises:
        NotComparable: b > a の場合
    """
    a = _coerce(a)
    return a.minus(b), a.eps()


@total_ordering
class ExtSigned:
    """[-∞, +∞] の値 (L⁰ の積分計算専用)"""

    __slots__ = ("value",)

    def __init__(self, value: Any):
        if isinstance(value, ExtSigned):
            value = value.value
        if isinstance(value, float) and math.isnan(value):
            raise ValidationError("NaN は扱えません")
        self.value = value

    @property
    def is_finite(self) -> bool:
        return not (isinstance(self.value, float) and math.isinf(self.value))

    def __add__(self, other: Any) -> "ExtSigned":
        """(+∞) + (−∞) = −∞ の規約で加算する"""
        other = other if isinstance(other, ExtSigned) else ExtSigned(other)
        if not self.is_finite and not other.is_finite and self.value != other.value:
            return ExtSigned(-math.inf)
        return ExtSigned(self.value + other.value)

    def add_upper(self, other: Any) -> "ExtSigned":
        """(+∞) + (−∞) = +∞ の規約で加算する"""
        other = other if isinstance(other, ExtSigned) else ExtSigned(other)
        if not self.is_finite and not other.is_finite and self.value != other.value:
            return ExtSigned(math.inf)
        return ExtSigned(self.value + other.value)

    def __neg__(self) -> "ExtSigned":
        return ExtSigned(-self.value)

    def __eq__(self, other: Any) -> bool:
        other_value = other.value if isinstance(other, ExtSigned) else other
        return self.value == other_value

    def __lt__(self, other: Any) -> bool:
        other_value = other.value if isinstance(other, ExtSigned) else other
        return self.value < other_value

    def __hash__(self) -> int:
        return hash(("ExtSigned", self.value))

    def exp(self) -> float:
        """exp (exp(−∞) = 0, exp(+∞) = ∞)"""
        if self.value == -math.inf:
            return 0.0
        if self.value == math.inf:
            return math.inf
        return math.exp(float(self.value))

    def __repr__(self) -> str:
        return f"ExtSigned({self.value})"
