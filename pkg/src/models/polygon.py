import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Sequence, Tuple

from src.models.errors import ValidationError
from src.models.extreal import to_fraction

# ロガーの設定
logger = logging.getLogger(__name__)

Point = Tuple[Fraction, Fraction]


def to_point(value: Any) -> Point:
    if isinstance(value, dict):
        value = (value.get("x"), value.get("y"))
    if len(value) != 2:
        raise ValidationError(f"平面の点ではありません: {value}")
    return to_fraction(value[0]), to_fraction(value[1])


def cross(o: Point, a: Point, b: Point) -> Fraction:
    """(a − o) × (b − o)"""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Any]) -> List[Point]:
    """
    単調連鎖法で凸包を求める (厳密な有理数演算、共線の点は除く)

    Returns:
        List[Point]: 最も下 (同じなら最も左) の頂点から始まる反時計回りの頂点列
    """
    pts = sorted(set(to_point(p) for p in points))
    if len(pts) <= 1:
        return pts
    lower: List[Point] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return _rotate_to_bottom(hull)


def _rotate_to_bottom(vertices: List[Point]) -> List[Point]:
    if not vertices:
        return vertices
    start = min(range(len(vertices)), key=lambda i: (vertices[i][1], vertices[i][0]))
    return vertices[start:] + vertices[:start]


def shoelace(vertices: Sequence[Point]) -> Fraction:
    """多角形の面積 (頂点の向きによらず非負)"""
    n = len(vertices)
    if n < 3:
        return Fraction(0)
    twice = sum((vertices[i][0] * vertices[(i + 1) % n][1] - vertices[(i + 1) % n][0] * vertices[i][1]
                 for i in range(n)), Fraction(0))
    return abs(twice) / 2


@dataclass(frozen=True)
class ConvexPolygon:
    """
    ℚ² の凸多角形 (反時計回り、最も下で最も左の頂点から始まる)

    頂点が1個なら点、2個なら線分 (degenerate) を表す。
    """
    vertices: Tuple[Point, ...]

    def __post_init__(self) -> None:
        if not self.vertices:
            raise ValidationError("頂点がありません")
        if list(self.vertices) != convex_hull(self.vertices):
            raise ValidationError("頂点列が反時計回りの狭義凸な順序ではありません")

    @classmethod
    def hull_of(cls, points: Iterable[Any]) -> "ConvexPolygon":
        hull = convex_hull(points)
        if not hull:
            raise ValidationError("点がありません")
        return cls(tuple(hull))

    @classmethod
    def of(cls, vertices: Sequence[Any]) -> "ConvexPolygon":
        """
        与えられた頂点から作る (順序は問わないが凸な位置にあること)

        Raises:
            ValidationError: 凸包の頂点にならない点を含む場合
        """
        pts = [to_point(v) for v in vertices]
        hull = convex_hull(pts)
        if len(hull) != len(set(pts)):
            raise ValidationError("凸な位置にない点を含みます")
        return cls(tuple(hull))

    @property
    def degenerate(self) -> bool:
        return len(self.vertices) < 3

    @property
    def area(self) -> Fraction:
        return shoelace(self.vertices)

    def scale(self, lam: Any) -> "ConvexPolygon":
        lam = to_fraction(lam)
        if lam < 0:
            raise ValidationError("負の倍率は扱いません")
        return ConvexPolygon.hull_of((lam * x, lam * y) for x, y in self.vertices)

    def translate(self, t: Any) -> "ConvexPolygon":
        dx, dy = to_point(t)
        return ConvexPolygon(tuple((x + dx, y + dy) for x, y in self.vertices))

    def to_json(self) -> List[List[Any]]:
        def enc(q: Fraction) -> Any:
            return q.numerator if q.denominator == 1 else {"num": q.numerator, "den": q.denominator}
        return [[enc(x), enc(y)] for x, y in self.vertices]

    @classmethod
    def from_json(cls, obj: Any) -> "ConvexPolygon":
        if isinstance(obj, dict):
            if "vertices" not in obj:
                raise ValidationError("多角形の指定に 'vertices' がありません")
            obj = obj["vertices"]
        if not isinstance(obj, list) or not obj:
            raise ValidationError("多角形は頂点の配列で指定してください")
        return cls.of(obj)

    def to_dict(self) -> Dict[str, Any]:
        return {"vertices": self.to_json(), "area": str(self.area), "degenerate": self.degenerate}
