import logging
import os
from typing import Any, Dict, List, Optional, Sequence

from src.models.errors import ValidationError

# ロガーの設定
logger = logging.getLogger(__name__)

# サポートされるファイル形式
SUPPORTED_EXTENSIONS = ['.json']


def validate_file(path: str) -> str:
    """
    入力ファイルを検証する

    Args:
        path: 入力ファイルのパス

    Returns:
        str: 正規化したパス

    Raises:
        ValidationError: ファイルが存在しない、または形式が無効な場合
    """
    _, file_extension = os.path.splitext(path)
    if file_extension.lower() not in SUPPORTED_EXTENSIONS:
        supported_ext_str = ', '.join(SUPPORTED_EXTENSIONS)
        raise ValidationError(f"サポートされていないファイル形式です。サポート形式: {supported_ext_str}")
    if not os.path.isfile(path):
        raise ValidationError(f"ファイルが見つかりません: {path}")
    return os.path.abspath(path)


def _is_number(value: Any) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, (int, float)):
        return True
    if isinstance(value, dict):
        return "num" in value and "den" in value
    if isinstance(value, str):
        return bool(value.strip())
    return False


def validate_required(obj: Any, required: Sequence[str], what: str) -> Optional[str]:
    """
    辞書に必須フィールドがあるかを検証する

    Returns:
        Optional[str]: エラーメッセージ（問題がなければNone）
    """
    if not isinstance(obj, dict):
        return f"{what} は JSON オブジェクトである必要があります。"
    for name in required:
        if name not in obj:
            return f"{what} に必須フィールド '{name}' がありません。"
    return None


def validate_vector(values: Any, what: str = "ベクトル", allow_inf: bool = True) -> Optional[str]:
    """数値 (または "inf") の配列か"""
    if not isinstance(values, list) or not values:
        return f"{what} は空でない配列である必要があります。"
    for i, x in enumerate(values):
        if allow_inf and isinstance(x, str) and x.strip().lower() in ("inf", "+inf", "∞"):
            continue
        if not _is_number(x):
            return f"{what} の成分 #{i} が数値ではありません: {x!r}"
    return None


def validate_poset(obj: Dict[str, Any]) -> Optional[str]:
    """有限 ({"elements","leq"}) または分岐表示 ({"branches","attach"}) の半順序"""
    if isinstance(obj, dict) and "branches" in obj:
        if not isinstance(obj["branches"], list) or not obj["branches"]:
            return "'branches' は空でない配列である必要があります。"
        return None
    error = validate_required(obj, ["elements"], "半順序")
    if error:
        return error
    n = len(obj["elements"]) if isinstance(obj["elements"], list) else 0
    for pair in obj.get("leq", []):
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(i, int) and 0 <= i < n for i in pair)):
            return f"'leq' の組が不正です: {pair!r}"
    return None


def validate_cone_vec(obj: Dict[str, Any]) -> Optional[str]:
    error = validate_required(obj, ["mu", "v"], "錐ベクトル")
    if error:
        return error
    error = validate_vector(obj["mu"], "mu", allow_inf=False) or validate_vector(obj["v"], "v")
    if error:
        return error
    if len(obj["mu"]) != len(obj["v"]):
        return f"mu と v の長さが一致しません ({len(obj['mu'])} と {len(obj['v'])})。"
    return None


def validate_matrix(rows: Any) -> Optional[str]:
    if isinstance(rows, dict):
        rows = rows.get("a")
    if not isinstance(rows, list) or not rows:
        return "行列は行の配列である必要があります。"
    d = len(rows)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != d:
            return f"行列の第 {i} 行の長さが {d} ではありません。"
        error = validate_vector(row, f"第 {i} 行", allow_inf=False)
        if error:
            return error
    return None


def validate_polygon(obj: Any) -> Optional[str]:
    vertices = obj.get("vertices") if isinstance(obj, dict) else obj
    if not isinstance(vertices, list) or not vertices:
        return "多角形は頂点の配列である必要があります。"
    for i, v in enumerate(vertices):
        if isinstance(v, dict):
            v = [v.get("x"), v.get("y")]
        if not isinstance(v, list) or len(v) != 2 or not all(_is_number(x) for x in v):
            return f"頂点 #{i} が平面の点ではありません: {v!r}"
    return None


def validate_ray(obj: Dict[str, Any]) -> Optional[str]:
    error = validate_required(obj, ["kind"], "列")
    if error:
        return error
    if obj["kind"] == "explicit":
        points: List[Any] = obj.get("points") or []
        if not points:
            return "explicit 列には 'points' が必要です。"
        for i, p in enumerate(points):
            if not isinstance(p, dict) or "t" not in p or "v" not in p:
                return f"点 #{i} には 't' と 'v' が必要です。"
        return None
    if obj["kind"] != "constant" and "direction" not in obj:
        return f"{obj['kind']} 列には 'direction' が必要です。"
    return None


def validate_open_spec(obj: Dict[str, Any]) -> Optional[str]:
    error = validate_required(obj, ["mu", "p"], "基本開集合")
    if error:
        return error
    n = len(obj["mu"]) if isinstance(obj["mu"], list) else 0
    for key in ("v", "w"):
        for vec in obj.get(key, []):
            error = validate_vector(vec, key)
            if error:
                return error
            if len(vec) != n:
                return f"'{key}' のベクトルの長さが次元 {n} と一致しません。"
    return None


def validate_subwedge(obj: Dict[str, Any]) -> Optional[str]:
    error = validate_required(obj, ["mu", "generators", "values"], "部分楔")
    if error:
        return error
    if len(obj["generators"]) != len(obj["values"]):
        return "生成元と値の個数が一致しません。"
    return None


def validate_map(obj: Dict[str, Any]) -> Optional[str]:
    """check-mcp に渡す写像の指定 (catalog / finite / sum)"""
    error = validate_required(obj, ["kind"], "写像")
    if error:
        return error
    required = {"catalog": ["id", "lam", "eta"], "finite": ["source", "target", "mapping"], "sum": ["mu", "f"]}
    if obj["kind"] not in required:
        return f"未知の写像の種別です: {obj['kind']} (catalog / finite / sum)"
    return validate_required(obj, required[obj["kind"]], f"{obj['kind']} 写像")
