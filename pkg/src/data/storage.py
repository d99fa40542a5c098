import dataclasses
import json
import logging
import math
import os
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from src.config import REPORT_DIR, SCHEMA_VERSION
from src.models.errors import ValidationError

# ロガーの設定
logger = logging.getLogger(__name__)

# CSV の列 (この順で固定)
REPORT_COLUMNS = ["suite", "family", "anchor", "checked", "failed", "verdict"]

FORMATS = ("json", "csv", "human")


def jsonable(value: Any) -> Any:
    """
    レポートの値を JSON で表せる値に変換する

    有理数は {"num","den"}、+∞ は "inf"、モデルは to_json / to_dict を使う。
    """
    if value is None or isinstance(value, (bool, str, int)):
        return value
    if isinstance(value, Fraction):
        return {"num": value.numerator, "den": value.denominator}
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [jsonable(x) for x in value.tolist()]
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(x) for x in value]
    if isinstance(value, (set, frozenset)):
        return sorted((jsonable(x) for x in value), key=lambda x: json.dumps(x, sort_keys=True))
    for method in ("to_dict", "to_json"):
        if callable(getattr(value, method, None)):
            return jsonable(getattr(value, method)())
    if dataclasses.is_dataclass(value):
        return jsonable(dataclasses.asdict(value))
    return str(value)


def make_report(command: str, result: Any, seed: Optional[int] = None) -> Dict[str, Any]:
    """
    サービスの結果をレポートの封筒 {"schema","command","seed","verdict","rows"} に包む

    Args:
        command: サブコマンド名
        result: サービスが返した辞書 (または to_dict を持つ結果)
        seed: 乱数の種

    Returns:
        Dict[str, Any]: JSON 化済みのレポート
    """
    body = jsonable(result)
    if not isinstance(body, dict):
        body = {"value": body}
    rows = body.pop("rows", [])
    verdict = body.pop("verdict", None)
    if verdict is None:
        verdict = "fail" if any(r.get("verdict") == "fail" for r in rows if isinstance(r, dict)) else "pass"
    report = {"schema": SCHEMA_VERSION, "command": command, "seed": seed, "verdict": verdict, "rows": rows}
    if body:
        report["result"] = body
    return report


def dumps_json(report: Dict[str, Any]) -> str:
    """同じレポートに対して常に同じバイト列を返す"""
    return json.dumps(jsonable(report), sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def to_dataframe(report: Dict[str, Any]) -> pd.DataFrame:
    """行を固定列の DataFrame にする (行がなければレポート全体を1行で)"""
    rows: List[Dict[str, Any]] = report.get("rows") or [
        {"family": report.get("command"), "anchor": report.get("command"), "checked": 1,
         "failed": 0 if report.get("verdict") == "pass" else 1, "verdict": report.get("verdict")}]
    df = pd.DataFrame(rows)
    for column in REPORT_COLUMNS:
        if column not in df.columns:
            df[column] = None
    return df[REPORT_COLUMNS]


def dumps_csv(report: Dict[str, Any]) -> str:
    return to_dataframe(report).to_csv(index=False, lineterminator="\n")


def _human_value(value: Any) -> str:
    if isinstance(value, dict) and set(value) == {"num", "den"}:
        return str(value["num"]) if value["den"] == 1 else f"{value['num']}/{value['den']}"
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True, ensure_ascii=False)
    return str(value)


def render_human(report: Dict[str, Any]) -> str:
    """JSON レポートを端末向けの文字列にする"""
    lines = [f"{report['command']}: {report['verdict']} (seed={report.get('seed')})"]
    for key, value in sorted((report.get("result") or {}).items()):
        lines.append(f"  {key}: {_human_value(value)}")
    for row in report.get("rows", []):
        status = row.get("verdict") or ("pass" if not row.get("failed") else "fail")
        prefix = f"[{row['suite']}] " if "suite" in row else ""
        lines.append(f"  {prefix}{row.get('family')} ({row.get('anchor')}): "
                     f"{status}, checked={row.get('checked')}, failed={row.get('failed')}")
    return "\n".join(lines) + "\n"


def format_report(report: Dict[str, Any], fmt: str = "json") -> str:
    """
    レポートを指定形式の文字列にする

    Raises:
        ValidationError: 未知の形式の場合
    """
    if fmt == "json":
        return dumps_json(report)
    if fmt == "csv":
        return dumps_csv(report)
    if fmt == "human":
        return render_human(report)
    raise ValidationError(f"未知の出力形式です: {fmt} ({', '.join(FORMATS)})")


def write_report(report: Dict[str, Any], out: Optional[str] = None, fmt: str = "json") -> str:
    """
    レポートをファイルに書き出す (out が None なら文字列を返すだけ)

    相対パスは REPORT_DIR からの相対として扱う。

    Returns:
        str: 書き出した文字列
    """
    text = format_report(report, fmt)
    if out is None:
        return text
    path = out if os.path.isabs(out) else os.path.join(REPORT_DIR, out)
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        logger.error(f"レポートの書き込みエラー: {str(e)}")
        raise ValidationError(f"レポートを書き込めません: {path}") from e
    logger.info(f"レポートを保存しました: {path}")
    return text
