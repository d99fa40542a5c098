import json
import math
from fractions import Fraction

import numpy as np
import pytest

from src.data import storage
from src.models.cone import ConeVec
from src.models.errors import ValidationError
from src.models.extreal import INF


def _suite_report():
    result = {"rows": [{"suite": 1, "family": "modularity", "anchor": "cone.modularity", "checked": 10,
                        "failed": 0, "verdict": "pass"}],
              "quick": True}
    return storage.make_report("suite", result, seed=7)


def test_jsonable_encodings():
    assert storage.jsonable(Fraction(2, 6)) == {"num": 1, "den": 3}
    assert storage.jsonable(math.inf) == "inf"
    assert storage.jsonable(-math.inf) == "-inf"
    assert storage.jsonable(INF) == "inf"
    assert storage.jsonable(np.float64(0.5)) == 0.5
    assert storage.jsonable(np.array([1, 2])) == [1, 2]
    assert storage.jsonable(ConeVec([1, "inf"])) == [{"num": 1, "den": 1}, "inf"]
    assert storage.jsonable({3, 1, 2}) == [1, 2, 3]


def test_report_envelope():
    report = _suite_report()
    assert report["schema"] == 1
    assert report["command"] == "suite"
    assert report["seed"] == 7
    assert report["verdict"] == "pass"
    assert report["result"] == {"quick": True}


def test_verdict_is_taken_from_result_or_rows():
    assert storage.make_report("norm", {"norm": 1, "verdict": "fail"})["verdict"] == "fail"
    failing = {"rows": [{"family": "x", "verdict": "fail"}]}
    assert storage.make_report("suite", failing)["verdict"] == "fail"


def test_json_is_deterministic():
    a = storage.dumps_json(_suite_report())
    b = storage.dumps_json(_suite_report())
    assert a == b
    assert a.endswith("\n")
    assert json.loads(a)["rows"][0]["family"] == "modularity"


def test_csv_has_fixed_columns():
    text = storage.dumps_csv(_suite_report())
    lines = text.splitlines()
    assert lines[0] == ",".join(storage.REPORT_COLUMNS)
    assert lines[1] == "1,modularity,cone.modularity,10,0,pass"


def test_csv_without_rows_uses_single_line():
    report = storage.make_report("norm", {"norm": {"num": 1, "den": 1}, "verdict": "pass"})
    lines = storage.dumps_csv(report).splitlines()
    assert len(lines) == 2
    assert lines[1].endswith(",pass")


def test_human_rendering():
    report = storage.make_report("norm", {"norm": Fraction(8, 5), "verdict": "pass"}, seed=7)
    text = storage.render_human(report)
    assert text.startswith("norm: pass (seed=7)")
    assert "norm: 8/5" in text


def test_unknown_format():
    with pytest.raises(ValidationError):
        storage.format_report(_suite_report(), "xml")


def test_write_report(tmp_path):
    target = tmp_path / "out" / "report.json"
    text = storage.write_report(_suite_report(), str(target), "json")
    assert target.read_text(encoding="utf-8") == text
