import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Optional

from src.models.errors import ValidationError
from src.models.extreal import ExtSigned, to_fraction

# ロガーの設定
logger = logging.getLogger(__name__)

POWER = "power"
ESSINF = "-inf"
LOG_UPPER = "0+"
LOG_LOWER = "0-"


@dataclass(frozen=True)
class LpTag:
    """
    L^p ノルムの指数タグ

    kind が power のとき p は [−∞,1] の 0 以外の有理数。
    -inf は本質的下限、0+ / 0- は対数積分による L⁰ ノルム (確率重みが必要)。
    """
    kind: str
    p: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.kind == POWER:
            if self.p is None or self.p == 0 or self.p > 1:
                raise ValidationError(f"指数は [−∞,1] の 0 以外の有理数です: {self.p}")
        elif self.kind not in (ESSINF, LOG_UPPER, LOG_LOWER):
            raise ValidationError(f"不明なノルムタグです: {self.kind}")

    @classmethod
    def parse(cls, text: Any) -> "LpTag":
        """
        "1", "-1", "1/2", "-inf", "0+", "0-" 形式のタグを解釈する

        Raises:
            ValidationError: 解釈できない場合
        """
        if isinstance(text, LpTag):
            return text
        token = str(text).strip().lower().replace("⁺", "+").replace("⁻", "-")
        if token in ("-inf", "-infinity", "-∞"):
            return cls(ESSINF)
        if token in ("0+", "0-"):
            return cls(token)
        try:
            p = to_fraction(token)
        except ValidationError as e:
            raise ValidationError(f"ノルムタグとして解釈できません: {text}") from e
        if p == 0:
            raise ValidationError("p = 0 は 0+ または 0- で指定してください")
        return cls(POWER, p)

    @property
    def is_log(self) -> bool:
        return self.kind in (LOG_UPPER, LOG_LOWER)

    @property
    def is_negative(self) -> bool:
        """p < 0 (−∞ を含む)"""
        return self.kind == ESSINF or (self.kind == POWER and self.p < 0)

    def conjugate(self) -> "LpTag":
        """共役指数 1/p + 1/q = 1 (1 ↔ −∞, 0+ ↔ 0-)"""
        if self.kind == ESSINF:
            return LpTag(POWER, Fraction(1))
        if self.kind == LOG_UPPER:
            return LpTag(LOG_LOWER)
        if self.kind == LOG_LOWER:
            return LpTag(LOG_UPPER)
        if self.p == 1:
            return LpTag(ESSINF)
        return LpTag(POWER, self.p / (self.p - 1))

    def __str__(self) -> str:
        return str(self.p) if self.kind == POWER else self.kind

    def to_json(self) -> str:
        return str(self)


@dataclass
class SignedIntegralResult:
    """
    log f の積分 ∫₊ / ∫₋

    positive / negative は log⁺ f, log⁻ f の重みつき和 (どちらも +∞ になりうる)。
    両方が発散するとき ∫₊ = +∞, ∫₋ = −∞、それ以外は両者とも S⁺ − S⁻。
    """
    positive: float
    negative: float

    @property
    def both_diverge(self) -> bool:
        return math.isinf(self.positive) and math.isinf(self.negative)

    @property
    def upper(self) -> ExtSigned:
        if self.both_diverge:
            return ExtSigned(math.inf)
        return ExtSigned(self.positive).add_upper(ExtSigned(-self.negative))

    @property
    def lower(self) -> ExtSigned:
        if self.both_diverge:
            return ExtSigned(-math.inf)
        return ExtSigned(self.positive) + ExtSigned(-self.negative)

    def to_dict(self) -> Dict[str, Any]:
        def enc(x: float) -> Any:
            if math.isinf(x):
                return "inf" if x > 0 else "-inf"
            return x
        return {
            "positive_part": enc(self.positive),
            "negative_part": enc(self.negative),
            "integral_upper": enc(self.upper.value),
            "integral_lower": enc(self.lower.value),
            "both_diverge": self.both_diverge,
        }
