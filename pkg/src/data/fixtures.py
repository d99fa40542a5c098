import logging
from typing import Any, Dict, List, Tuple

from src.models.branch_poset import AttachRule, Branch, BranchPoset, Condition
from src.models.errors import ValidationError
from src.models.functional import BoundPair, SubwedgeSpec

# ロガーの設定
logger = logging.getLogger(__name__)


def _limit(src: str, dst: str) -> AttachRule:
    return AttachRule("limit", src, dst)


def _below(src: str, dst: str, *conds: Condition) -> AttachRule:
    return AttachRule("below", src, dst, tuple(conds))


def naturals() -> BranchPoset:
    """ℕ (上限なしの単一の鎖)"""
    return BranchPoset([Branch("n", arity=1)], name="naturals")


def doppiafreccia() -> BranchPoset:
    """
    ℕ² ∪ ℕ ∪ {⊤}: 各行 (n, ·) の上限が n、ℕ の上限が ⊤

    A = ℕ² から全体に達するのに ↑ が2回必要になる。
    """
    return BranchPoset(
        [Branch("P", arity=2), Branch("Q", arity=1), Branch("top", arity=0)],
        [_limit("P", "Q"), _limit("Q", "top")],
        name="doppiafreccia",
    )


def alphafreccia(alpha: int) -> BranchPoset:
    """
    L_alpha → … → L_0 と上限が連なる表示 (↑ が alpha 回必要)

    Args:
        alpha: 段数 (1 以上)

    Returns:
        BranchPoset: 分岐表示

    Raises:
        ValidationError: alpha < 1 の場合
    """
    if alpha < 1:
        raise ValidationError(f"alpha は 1 以上である必要があります: {alpha}")
    branches = [Branch(f"L{k}", arity=k) for k in range(alpha, -1, -1)]
    rules = [_limit(f"L{k}", f"L{k - 1}") for k in range(alpha, 0, -1)]
    return BranchPoset(branches, rules, name=f"alphafreccia{alpha}")


def example_no_tip() -> BranchPoset:
    """
    [0,1]×{0,1} の離散化: 行0 は上限 top をもつ鎖、行1 は反鎖

    (t,0) ≤ (s,1) ⇔ t ≤ s、行1 の各点は top の下。行1 全体は先端をもたないが
    hat は最大元 top をもつ。
    """
    return BranchPoset(
        [Branch("r0", arity=1), Branch("r1", arity=1, chain=False), Branch("top", arity=0)],
        [
            _limit("r0", "top"),
            _below("r0", "r1", Condition("<=", "s0", "d0")),
            _below("r1", "top"),
        ],
        name="example-no-tip",
    )


def two_open_chains() -> BranchPoset:
    """[0,1) の2つのコピー (互いに無関係、上限なし)"""
    return BranchPoset([Branch("c1", arity=1), Branch("c2", arity=1)], name="two-open-chains")


def two_chains_shared_top() -> BranchPoset:
    """2つの [0,1) の上限をともに one とした表示 (two_open_chains の完備化の誤った候補)"""
    return BranchPoset(
        [Branch("c1", arity=1), Branch("c2", arity=1), Branch("one", arity=0)],
        [_limit("c1", "one"), _limit("c2", "one")],
        name="two-chains-shared-top",
    )


def two_chains_own_tops() -> BranchPoset:
    """2つの [0,1] のコピー (two_open_chains の正しい完備化)"""
    return BranchPoset(
        [Branch("c1", arity=1), Branch("c2", arity=1),
         Branch("one1", arity=0), Branch("one2", arity=0)],
        [_limit("c1", "one1"), _limit("c2", "one2")],
        name="two-chains-own-tops",
    )


def linked_rows() -> BranchPoset:
    """
    ℕ×ℕ×(ℕ∪{∞}): (n,m,∞) を Q(n,m) として表す

    (n,m,l) ≤ (n',m',∞) ⇔ n < n' かつ m,l ≤ m'。Q の行 Q(n,·) の上限 s_n は
    n について増加し、完備化には2層が必要になる。
    """
    return BranchPoset(
        [Branch("P", arity=3), Branch("Q", arity=2)],
        [
            _limit("P", "Q"),
            _below("P", "Q",
                   Condition("<", "s0", "d0"),
                   Condition("<=", "s1", "d1"),
                   Condition("<=", "s2", "d1")),
            AttachRule("limit_chain", "Q"),
        ],
        name="linked-rows",
    )


def chain_only() -> BranchPoset:
    """[0,1) の鎖"""
    return BranchPoset([Branch("c", arity=1)], name="chain")


def chain_with_two_caps() -> BranchPoset:
    """[0,1) の上に互いに無関係な2つの上界 one, one' を置いた表示 (上限が存在しない)"""
    return BranchPoset(
        [Branch("c", arity=1), Branch("one", arity=0), Branch("one'", arity=0)],
        [_below("c", "one"), _below("c", "one'")],
        name="chain-with-two-caps",
    )


def glued_chains() -> BranchPoset:
    """0 と 1 を共有する [0,1] の2つのコピー (切り詰め性をもたない完備束)"""
    return BranchPoset(
        [Branch("a", arity=1), Branch("b", arity=1), Branch("one", arity=0)],
        [_limit("a", "one"), _limit("b", "one")],
        bottom=True,
        name="glued-chains",
    )


def four_rows() -> BranchPoset:
    """
    ℕ×{1,2,3,4}: (i,n) ≤ (j,m) ⇔ i ≤ j かつ (m = 4 または m = n または n = 1)

    二項上限をもつが、有向完備化は各行の上限を別々に加えるのに対し
    Dedekind–MacNeille 完備化ではそれらが全て ⊤ になる。
    """
    rows = [Branch(f"r{k}", arity=1) for k in range(1, 5)]
    le = Condition("<=", "s0", "d0")
    rules = [_below("r1", f"r{k}", le) for k in (2, 3, 4)]
    rules += [_below(f"r{k}", "r4", le) for k in (2, 3)]
    return BranchPoset(rows, rules, name="four-rows")


# ----------------------------------------------------------------------
# 拡張の問題例 (部分楔・値・上下界)
# ----------------------------------------------------------------------
# 可解な例は非負の双対ベクトル f から値 M(g) = Σ f_i g_i μ_i を作り、φ ≤ f ≤ ψ となる上下界を与える
EXTENSION_INSTANCES: List[Dict[str, Any]] = [
    {"name": "diagonal", "mu": [1, 1], "generators": [[1, 1]], "values": [3]},
    {"name": "two-faces", "mu": [1, 2, 1], "generators": [[1, 0, 1], [0, 1, 1]], "values": [3, 4],
     "phi": [[{"num": 1, "den": 2}, {"num": 1, "den": 2}, 1]], "psi": [[2, 2, 3]]},
    {"name": "max-of-two", "mu": [1, 1], "generators": [[2, 1]], "values": [5],
     "phi": [[1, 1]], "psi": [[2, 4], [1, 5]]},
    {"name": "triangle", "mu": [1, 1, 1], "generators": [[1, 1, 0], [0, 1, 1], [1, 0, 1]], "values": [3, 5, 4]},
    {"name": "line", "mu": [2], "generators": [[1]], "values": [3], "phi": [[1]], "psi": [[2]]},
]

# 仮定 a + b ≤ c + d ⇒ M(a) + φ(b) ≤ M(c) + ψ(d) が破れる例
INFEASIBLE_INSTANCES: List[Dict[str, Any]] = [
    {"name": "not-monotone", "mu": [1, 1], "generators": [[1, 0], [1, 1]], "values": [5, 1]},
    {"name": "below-lower-bound", "mu": [1, 1], "generators": [[1, 0]], "values": [1], "phi": [[2, 2]]},
    {"name": "above-upper-bound", "mu": [1, 1], "generators": [[1, 1]], "values": [4], "psi": [[1, 1]]},
]


def _instance(obj: Dict[str, Any]) -> Tuple[str, SubwedgeSpec, BoundPair]:
    spec = SubwedgeSpec.from_json(obj)
    return obj["name"], spec, BoundPair.from_json(spec.cone, {"phi": obj.get("phi"), "psi": obj.get("psi")})


def extension_instances() -> List[Tuple[str, SubwedgeSpec, BoundPair]]:
    return [_instance(obj) for obj in EXTENSION_INSTANCES]


def infeasible_instances() -> List[Tuple[str, SubwedgeSpec, BoundPair]]:
    return [_instance(obj) for obj in INFEASIBLE_INSTANCES]


# ----------------------------------------------------------------------
# Hahn–Banach の問題例 (p の形式、部分空間の基底、基底での T の値)
# ----------------------------------------------------------------------
HAHN_BANACH_INSTANCES: List[Dict[str, Any]] = [
    {"name": "l1-plane-axis", "forms": [[1, 1], [1, -1], [-1, 1], [-1, -1]],
     "basis": [[1, 0]], "values": [{"num": 1, "den": 2}]},
    {"name": "max-plane-diagonal", "forms": [[1, 0], [-1, 0], [0, 1], [0, -1]],
     "basis": [[1, 1]], "values": [1]},
    {"name": "simplex-plane-diagonal", "forms": [[1, 0], [0, 1], [-1, -1]],
     "basis": [[1, 1]], "values": [{"num": 1, "den": 2}]},
    {"name": "simplex-space-line", "forms": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]],
     "basis": [[1, -1, 0]], "values": [{"num": 1, "den": 2}]},
    {"name": "simplex-space-plane", "forms": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]],
     "basis": [[1, 0, 0], [0, 1, 0]], "values": [{"num": 1, "den": 3}, {"num": 1, "den": 3}]},
]


def hahn_banach_instances() -> List[Tuple[str, List[Any], List[Any], List[Any]]]:
    return [(obj["name"], obj["forms"], obj["basis"], obj["values"]) for obj in HAHN_BANACH_INSTANCES]
