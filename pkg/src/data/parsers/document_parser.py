import json
import logging
import os
from typing import Any, Callable, Dict, Optional, Tuple, Union

from src.data import validators
from src.models.branch_poset import BranchPoset
from src.models.cone import ConeVec, DiscreteCone
from src.models.errors import ValidationError
from src.models.functional import BoundPair, SubwedgeSpec
from src.models.lorentz import RaySequence
from src.models.matrix import SymMatrix
from src.models.polygon import ConvexPolygon
from src.models.poset import FinitePoset

# ロガーの設定
logger = logging.getLogger(__name__)


class DocumentParser:
    """JSON 入力 (ファイルまたはコマンドライン上の文字列) を解析するクラス"""

    def __init__(self, source: str):
        """
        パーサーを初期化する

        Args:
            source: JSON ファイルのパス、または JSON 文字列そのもの
        """
        self.source = source
        self.document: Any = None

    @property
    def is_inline(self) -> bool:
        text = self.source.lstrip()
        return text.startswith(("{", "[", "\"")) or not os.path.splitext(self.source)[1]

    def parse(self) -> Any:
        """
        JSON を読み込んで返す

        Returns:
            Any: 解析した JSON

        Raises:
            ValidationError: ファイルがない、または JSON として不正な場合
        """
        try:
            if self.is_inline:
                self.document = json.loads(self.source)
            else:
                path = validators.validate_file(self.source)
                with open(path, encoding="utf-8") as f:
                    self.document = json.load(f)
            return self.document
        except json.JSONDecodeError as e:
            logger.error(f"JSON 解析エラー: {str(e)}")
            raise ValidationError(f"JSON の解析に失敗しました: {str(e)}") from e


def load_document(source: Union[str, Any]) -> Any:
    """パス・JSON 文字列・解析済みの値のいずれかを受け取り値を返す"""
    if isinstance(source, str):
        return DocumentParser(source).parse()
    return source


def _checked(obj: Any, check: Callable[[Any], Optional[str]]) -> Any:
    error = check(obj)
    if error:
        raise ValidationError(error)
    return obj


def parse_poset(source: Any) -> Union[FinitePoset, BranchPoset]:
    obj = _checked(load_document(source), validators.validate_poset)
    if "branches" in obj:
        return BranchPoset.from_json(obj)
    return FinitePoset.from_json(obj)


def parse_cone_vec(source: Any) -> Tuple[DiscreteCone, ConeVec]:
    """{"mu": [...], "v": [...]} (v の代わりに f も可)"""
    obj = load_document(source)
    if isinstance(obj, dict) and "f" in obj and "v" not in obj:
        obj = dict(obj, v=obj["f"])
    _checked(obj, validators.validate_cone_vec)
    return DiscreteCone(obj["mu"]), ConeVec(obj["v"])


def parse_vector(source: Any, mu: Optional[Any] = None) -> Tuple[DiscreteCone, ConeVec]:
    """
    ベクトルだけが与えられた場合は一様な重み 1/n を使う

    Raises:
        ValidationError: ベクトルとして不正な場合
    """
    obj = load_document(source)
    if isinstance(obj, dict):
        return parse_cone_vec(obj)
    _checked(obj, validators.validate_vector)
    if mu is None:
        return DiscreteCone.uniform(len(obj)), ConeVec(obj)
    cone = DiscreteCone(load_document(mu))
    if cone.n != len(obj):
        raise ValidationError(f"重みの長さ {cone.n} がベクトルの長さ {len(obj)} と一致しません")
    return cone, ConeVec(obj)


def parse_matrix(source: Any) -> SymMatrix:
    obj = _checked(load_document(source), validators.validate_matrix)
    return SymMatrix.from_json(obj)


def parse_polygon(source: Any) -> ConvexPolygon:
    obj = _checked(load_document(source), validators.validate_polygon)
    return ConvexPolygon.from_json(obj)


def parse_ray(source: Any) -> RaySequence:
    obj = _checked(load_document(source), validators.validate_ray)
    return RaySequence.from_json(obj)


def parse_open_spec(source: Any) -> Any:
    """{"mu": [...], "p": "1/2", "v": [[...]], "w": [[...]]}"""
    from src.services.chrono_service import BasicOpenSpec, ChronInstance

    obj = _checked(load_document(source), validators.validate_open_spec)
    instance = ChronInstance.of(obj["mu"], obj["p"])
    return BasicOpenSpec(instance, [ConeVec(v) for v in obj.get("v", [])], [ConeVec(w) for w in obj.get("w", [])])


def parse_extension(source: Any) -> Tuple[SubwedgeSpec, BoundPair, Optional[list]]:
    """部分楔・上下界 (phi / psi)・基底の順序"""
    obj = _checked(load_document(source), validators.validate_subwedge)
    spec = SubwedgeSpec.from_json(obj)
    bounds = BoundPair.from_json(spec.cone, {"phi": obj.get("phi"), "psi": obj.get("psi")})
    return spec, bounds, obj.get("order")


def parse_map(source: Any) -> Any:
    """
    check-mcp の写像の指定を鎖で表示された写像にする

    Raises:
        ValidationError: 指定が不正な場合
    """
    from src.services import mcp_service

    obj = _checked(load_document(source), validators.validate_map)
    kind = obj["kind"]
    if kind == "catalog":
        return mcp_service.catalog_functional_map(str(obj["id"]), obj["lam"], obj["eta"])
    if kind == "finite":
        P, Q = parse_poset(obj["source"]), parse_poset(obj["target"])
        if not (isinstance(P, FinitePoset) and isinstance(Q, FinitePoset)):
            raise ValidationError("finite 写像の定義域と値域は有限半順序である必要があります")
        return mcp_service.finite_map(P, Q, [int(x) for x in obj["mapping"]], name=obj.get("name", "finite"))
    cone = DiscreteCone(obj["mu"])
    return mcp_service.sum_functional_map(cone, ConeVec(obj["f"]), name=obj.get("name", ""))


def parse_point(text: str) -> Tuple[str, str]:
    """"3,1" 形式の三角形の点"""
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 2 or not all(parts):
        raise ValidationError(f"点は 's,y' の形式で指定してください: {text}")
    return parts[0], parts[1]


def parse_json_object(source: Any, what: str) -> Dict[str, Any]:
    obj = load_document(source)
    if not isinstance(obj, dict):
        raise ValidationError(f"{what} は JSON オブジェクトである必要があります")
    return obj
