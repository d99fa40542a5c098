import logging
import random
from fractions import Fraction
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from src.models.errors import NotComparable, ValidationError
from src.models.extreal import INF, ZERO, ExtNonneg, to_fraction

# ロガーの設定
logger = logging.getLogger(__name__)


def _ext(value: Any) -> ExtNonneg:
    return value if isinstance(value, ExtNonneg) else ExtNonneg(value)


class ConeVec:
    """離散錐 L(X) の元: 有限添字集合上の [0,∞] 値ベクトル"""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable[Any]):
        self.coords: Tuple[ExtNonneg, ...] = tuple(_ext(c) for c in coords)

    @classmethod
    def zeros(cls, n: int) -> "ConeVec":
        return cls([ZERO] * n)

    @classmethod
    def infinite(cls, n: int) -> "ConeVec":
        return cls([INF] * n)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[ExtNonneg]:
        return iter(self.coords)

    def __getitem__(self, i: int) -> ExtNonneg:
        return self.coords[i]

    def _check(self, other: "ConeVec") -> None:
        if len(other) != len(self):
            raise ValidationError(f"次元が一致しません: {len(self)} と {len(other)}")

    def __add__(self, other: "ConeVec") -> "ConeVec":
        self._check(other)
        return ConeVec(a + b for a, b in zip(self, other))

    def scale(self, lam: Any) -> "ConeVec":
        """λv (λ は非負有理数または ∞、0·∞ = 0)"""
        lam = _ext(lam)
        return ConeVec(lam * a for a in self)

    def meet(self, other: "ConeVec") -> "ConeVec":
        self._check(other)
        return ConeVec(min(a, b) for a, b in zip(self, other))

    def join(self, other: "ConeVec") -> "ConeVec":
        self._check(other)
        return ConeVec(max(a, b) for a, b in zip(self, other))

    def __le__(self, other: "ConeVec") -> bool:
        self._check(other)
        return all(a <= b for a, b in zip(self, other))

    def __ge__(self, other: "ConeVec") -> bool:
        return other <= self

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, ConeVec) and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def eps(self) -> "ConeVec":
        """無限部分 εv (座標ごと)"""
        return ConeVec(a.eps() for a in self)

    def minus(self, other: "ConeVec") -> "ConeVec":
        """
        格子差 self − other (other ≤ self が必要)

        Raises:
            NotComparable: other ≰ self の場合
        """
        self._check(other)
        if not other <= self:
            raise NotComparable(f"{other} ≰ {self} のため差を取れません")
        return ConeVec(a.minus(b) for a, b in zip(self, other))

    @property
    def is_finite(self) -> bool:
        return not any(a.is_inf for a in self)

    def to_json(self) -> List[Any]:
        return [a.to_json() for a in self]

    def __repr__(self) -> str:
        return "(" + ", ".join(str(a) for a in self) + ")"


def cone_sup(family: Sequence[ConeVec]) -> ConeVec:
    """族の座標ごとの上限 (空族は呼び出し側で扱う)"""
    if not family:
        raise ValidationError("空の族の上限は次元が決まりません")
    result = family[0]
    for v in family[1:]:
        result = result.join(v)
    return result


def cone_inf(family: Sequence[ConeVec]) -> ConeVec:
    if not family:
        raise ValidationError("空の族の下限は次元が決まりません")
    result = family[0]
    for v in family[1:]:
        result = result.meet(v)
    return result


class DiscreteCone:
    """有限集合上の重みつき離散錐 L(X)"""

    def __init__(self, mu: Sequence[Any]):
        """
        Args:
            mu: 正の有理数の重み

        Raises:
            ValidationError: 重みが正でない場合
        """
        self.mu: Tuple[Fraction, ...] = tuple(to_fraction(m) for m in mu)
        if not self.mu:
            raise ValidationError("重みが空です")
        if any(m <= 0 for m in self.mu):
            raise ValidationError(f"重みは正である必要があります: {[str(m) for m in self.mu]}")

    @classmethod
    def uniform(cls, n: int) -> "DiscreteCone":
        """一様な確率重み 1/n"""
        return cls([Fraction(1, n)] * n)

    @property
    def n(self) -> int:
        return len(self.mu)

    @property
    def total(self) -> Fraction:
        return sum(self.mu, Fraction(0))

    @property
    def is_probability(self) -> bool:
        return self.total == 1

    def vec(self, values: Iterable[Any]) -> ConeVec:
        v = ConeVec(values)
        if len(v) != self.n:
            raise ValidationError(f"ベクトルの長さ {len(v)} が次元 {self.n} と一致しません")
        return v

    def zero(self) -> ConeVec:
        return ConeVec.zeros(self.n)

    def random_vec(self, rng: random.Random, inf_rate: float = 0.2,
                   max_num: int = 9, max_den: int = 4) -> ConeVec:
        """乱数ベクトル (確率 inf_rate で座標を +∞ にする)"""
        coords = []
        for _ in range(self.n):
            if rng.random() < inf_rate:
                coords.append(INF)
            else:
                coords.append(ExtNonneg(Fraction(rng.randint(0, max_num), rng.randint(1, max_den))))
        return ConeVec(coords)

    def pairing(self, f: ConeVec, g: ConeVec) -> ExtNonneg:
        """Σ f_i g_i μ_i (0·∞ = 0)"""
        total = ZERO
        for fi, gi, mi in zip(f, g, self.mu):
            total = total + fi * gi * mi
        return total

    def to_json(self, v: Optional[ConeVec] = None) -> Dict[str, Any]:
        obj: Dict[str, Any] = {"mu": [{"num": m.numerator, "den": m.denominator} for m in self.mu]}
        if v is not None:
            obj["v"] = v.to_json()
        return obj


class AffineChain:
    """
    座標ごとに x_k = a + b·k − c/k (k ≥ first) で与えられる単調増加列

    上限は b_i > 0 の座標で +∞、それ以外で a_i。
    """

    def __init__(self, a: Sequence[Any], b: Sequence[Any], c: Sequence[Any], first: int = 1):
        self.a = tuple(to_fraction(x) for x in a)
        self.b = tuple(to_fraction(x) for x in b)
        self.c = tuple(to_fraction(x) for x in c)
        self.first = first
        if first < 1:
            raise ValidationError("開始添字は 1 以上です")
        if not (len(self.a) == len(self.b) == len(self.c)):
            raise ValidationError("係数の長さが一致しません")
        if any(x < 0 for x in self.b + self.c):
            raise ValidationError("b, c は非負である必要があります")
        if any(ai + bi * first - ci / first < 0 for ai, bi, ci in zip(self.a, self.b, self.c)):
            raise ValidationError(f"k = {first} で負の座標があります")

    @classmethod
    def random(cls, n: int, rng: random.Random) -> "AffineChain":
        a, b, c = [], [], []
        for _ in range(n):
            ci = Fraction(rng.randint(0, 3), rng.randint(1, 3))
            a.append(ci + Fraction(rng.randint(0, 6), rng.randint(1, 3)))
            b.append(Fraction(rng.choice([0, 0, 1, 2])))
            c.append(ci)
        return cls(a, b, c)

    @property
    def n(self) -> int:
        return len(self.a)

    def term(self, k: int) -> ConeVec:
        if k < self.first:
            raise ValidationError(f"添字は {self.first} 以上です")
        return ConeVec(ai + bi * k - ci / k for ai, bi, ci in zip(self.a, self.b, self.c))

    def terms(self, count: int) -> List[ConeVec]:
        return [self.term(k) for k in range(self.first, self.first + count)]

    def strictly_increasing(self, i: int) -> bool:
        return self.b[i] > 0 or self.c[i] > 0

    @property
    def diverges(self) -> bool:
        return any(bi > 0 for bi in self.b)

    def sup(self) -> ConeVec:
        return ConeVec(INF if bi > 0 else ai for ai, bi in zip(self.a, self.b))

    def tail_gap(self, k: int) -> List[Optional[Fraction]]:
        """有限の上限をもつ座標での sup − x_k (= c/k)、無限座標は None"""
        return [ci / k if bi == 0 else None for bi, ci in zip(self.b, self.c)]

    def to_json(self) -> Dict[str, Any]:
        def enc(xs: Tuple[Fraction, ...]) -> List[Dict[str, int]]:
            return [{"num": x.numerator, "den": x.denominator} for x in xs]
        return {"a": enc(self.a), "b": enc(self.b), "c": enc(self.c), "first": self.first}

    def describe(self) -> str:
        """各座標の一般項を文字列で返す (例: "(n, 1 - 1/n)")"""
        def coord(a: Fraction, b: Fraction, c: Fraction) -> str:
            parts = []
            if b:
                parts.append("n" if b == 1 else f"{b}n")
            if a or not (b or c):
                parts.append(str(a))
            text = " + ".join(parts)
            if c:
                tail = "1/n" if c == 1 else f"{c}/n"
                text = f"{text} - {tail}" if text else f"-{tail}"
            return text
        body = ", ".join(coord(a, b, c) for a, b, c in zip(self.a, self.b, self.c))
        suffix = "" if self.first == 1 else f", n ≥ {self.first}"
        return f"({body}){suffix}"
