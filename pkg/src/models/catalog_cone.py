import logging
import random
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from src.config import CHAIN_LENGTH
from src.models.cone import AffineChain
from src.models.errors import UnknownCatalogId, ValidationError
from src.models.extreal import INF, ExtNonneg, to_fraction

# ロガーの設定
logger = logging.getLogger(__name__)

CATALOG_IDS = ("a", "b", "c", "d", "e", "f")

# [0,∞] 値の錐 (a〜d) と実数値の楔 (e, f)
EXTENDED_IDS = ("a", "b", "c", "d")

DESCRIPTIONS = {
    "a": "[0,∞]²",
    "b": "{0} ∪ (0,∞]²",
    "c": "[0,∞)² ∪ {+∞}",
    "d": "{0} ∪ (0,∞)² ∪ {+∞}",
    "e": "{0} ∪ ℝ×(0,∞)",
    "f": "({0}×[0,∞)) ∪ ((0,∞)×ℝ) (辞書式順序)",
}

Pair = Tuple[Any, Any]
INF_POINT: Tuple[ExtNonneg, ExtNonneg] = (INF, INF)


def _z_options(v: ExtNonneg, w: ExtNonneg) -> Optional[Tuple[bool, bool]]:
    """
    v + z = w を満たす z ∈ [0,∞] について (z = 0 が可能か, z > 0 が可能か) を返す

    解がなければ None。
    """
    if v.is_inf:
        return (True, True) if w.is_inf else None
    if w.is_inf:
        return False, True
    if w < v:
        return None
    return (True, False) if w == v else (False, True)


class CatalogCone:
    """
    2次元の錐・楔のカタログ (a〜f)

    a〜d の元は ExtNonneg の組 ((+∞) は c, d では単一の点 (∞,∞) に正規化)、
    e, f の元は有理数の組。
    """

    def __init__(self, cone_id: str):
        """
        Args:
            cone_id: カタログ ID (a〜f)

        Raises:
            UnknownCatalogId: 未知の ID の場合
        """
        if cone_id not in CATALOG_IDS:
            raise UnknownCatalogId(f"未知のカタログ錐です: {cone_id} (有効: {', '.join(CATALOG_IDS)})")
        self.cone_id = cone_id

    @property
    def description(self) -> str:
        return DESCRIPTIONS[self.cone_id]

    @property
    def extended(self) -> bool:
        return self.cone_id in EXTENDED_IDS

    # ------------------------------------------------------------------
    # 元と順序
    # ------------------------------------------------------------------
    def element(self, a: Any, b: Any) -> Pair:
        if self.extended:
            v = (a if isinstance(a, ExtNonneg) else ExtNonneg(a),
                 b if isinstance(b, ExtNonneg) else ExtNonneg(b))
            return self.normalize(v)
        return to_fraction(a), to_fraction(b)

    def normalize(self, v: Pair) -> Pair:
        if self.cone_id in ("c", "d") and (v[0].is_inf or v[1].is_inf):
            return INF_POINT
        return v

    def contains(self, v: Pair) -> bool:
        cid = self.cone_id
        if cid == "a":
            return True
        if cid == "b":
            return (v[0].is_zero and v[1].is_zero) or (not v[0].is_zero and not v[1].is_zero)
        if cid == "c":
            return v == INF_POINT or (not v[0].is_inf and not v[1].is_inf)
        if cid == "d":
            if v == INF_POINT or (v[0].is_zero and v[1].is_zero):
                return True
            return not (v[0].is_zero or v[1].is_zero or v[0].is_inf or v[1].is_inf)
        if cid == "e":
            return (v[0] == 0 and v[1] == 0) or v[1] > 0
        return (v[0] == 0 and v[1] >= 0) or v[0] > 0

    def leq(self, v: Pair, w: Pair) -> bool:
        """代数的順序 v ≤ w ⇔ v + z = w となる z が錐に存在する"""
        cid = self.cone_id
        if cid in ("a", "b"):
            options = [_z_options(vi, wi) for vi, wi in zip(v, w)]
            if any(o is None for o in options):
                return False
            if cid == "a":
                return True
            return all(o[0] for o in options) or all(o[1] for o in options)
        if cid in ("c", "d"):
            if w == INF_POINT:
                return True
            if v == INF_POINT:
                return False
            if cid == "c":
                return v[0] <= w[0] and v[1] <= w[1]
            if v == w or (v[0].is_zero and v[1].is_zero):
                return True
            return v[0] < w[0] and v[1] < w[1]
        if cid == "e":
            return v == w or v[1] < w[1]
        return v[0] < w[0] or (v[0] == w[0] and v[1] <= w[1])

    def add(self, v: Pair, w: Pair) -> Pair:
        return self.normalize((v[0] + w[0], v[1] + w[1])) if self.extended else (v[0] + w[0], v[1] + w[1])

    # ------------------------------------------------------------------
    # 鎖
    # ------------------------------------------------------------------
    def term(self, chain: AffineChain, k: int) -> Pair:
        x = chain.term(k)
        return self.normalize((x[0], x[1]))

    def is_chain(self, chain: AffineChain, length: int = CHAIN_LENGTH) -> bool:
        terms = [self.term(chain, k) for k in range(chain.first, chain.first + length)]
        return (all(self.contains(t) for t in terms)
                and all(self.leq(s, t) for s, t in zip(terms, terms[1:])))

    def chain_sup(self, chain: AffineChain) -> Optional[Pair]:
        """
        単調列 x_k = a + b·k − c/k のこの錐での上限 (存在しなければ None)

        b, d では有界で狭義増加の座標をもつ列は上界が比較不能になり上限をもたない。
        """
        if not self.extended:
            raise ValidationError(f"錐 {self.cone_id} の鎖上限は扱いません")
        s = chain.sup()
        constant = not any(chain.strictly_increasing(i) for i in range(2))
        if constant:
            return self.normalize((s[0], s[1]))
        if self.cone_id in ("a", "c"):
            return self.normalize((s[0], s[1]))
        if not chain.diverges:
            return None
        return self.normalize((s[0], s[1]))

    def random_chain(self, rng: random.Random) -> AffineChain:
        """この錐の鎖で上限をもつものを無作為に生成する"""
        if self.cone_id in ("a", "c"):
            return AffineChain.random(2, rng)
        if self.cone_id in ("b", "d"):
            slopes = [Fraction(rng.randint(1, 2)), Fraction(rng.choice([0, 1]))]
            rng.shuffle(slopes)
            c = [Fraction(rng.randint(1, 3), rng.randint(1, 2)) for _ in range(2)]
            a = [ci + Fraction(rng.randint(1, 5), rng.randint(1, 3)) for ci in c]
            return AffineChain(a, slopes, c)
        raise ValidationError(f"錐 {self.cone_id} の鎖は生成しません")

    def witness_chains(self) -> List[AffineChain]:
        """登録済みの反例候補 (n,0), (0,n), (n,1−1/n), (1−1/n,n) のうちこの錐の鎖であるもの"""
        candidates = [
            AffineChain([0, 0], [1, 0], [0, 0]),
            AffineChain([0, 0], [0, 1], [0, 0]),
            AffineChain([0, 1], [1, 0], [0, 1], first=2),
            AffineChain([1, 0], [0, 1], [1, 0], first=2),
        ]
        return [ch for ch in candidates if self.is_chain(ch) and self.chain_sup(ch) is not None]

    # ------------------------------------------------------------------
    # 汎関数 L_{λ,η}(a,b) = λa + ηb
    # ------------------------------------------------------------------
    def functional(self, lam: Any, eta: Any) -> Callable[[Pair], Any]:
        if self.extended:
            lam_e, eta_e = ExtNonneg(lam), ExtNonneg(eta)
            return lambda v: lam_e * v[0] + eta_e * v[1]
        lam_q, eta_q = to_fraction(lam), to_fraction(eta)
        return lambda v: lam_q * v[0] + eta_q * v[1]

    def positivity_witness(self, lam: Any, eta: Any) -> Optional[Pair]:
        """
        楔 e, f 上で L_{λ,η} が負になる元 (正値なら None)

        e の正値汎関数は λ = 0, η ≥ 0、f の正値汎関数は η = 0, λ ≥ 0 に限る。
        """
        lam, eta = to_fraction(lam), to_fraction(eta)
        if self.cone_id == "e":
            if lam != 0:
                return -(abs(eta) + 1) / lam, Fraction(1)
            return (Fraction(0), Fraction(1)) if eta < 0 else None
        if self.cone_id == "f":
            if eta != 0:
                sign = 1 if eta > 0 else -1
                return Fraction(1), -sign * (abs(lam) + 1) / abs(eta)
            return (Fraction(1), Fraction(0)) if lam < 0 else None
        return None

    def render(self, v: Pair) -> str:
        if self.extended and v == INF_POINT and self.cone_id in ("c", "d"):
            return "+∞"
        return "(" + ", ".join(str(x) for x in v) + ")"

    def to_json(self) -> Dict[str, Any]:
        return {"id": self.cone_id, "description": self.description}
