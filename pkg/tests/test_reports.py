import csv
import hashlib
import json
import math

import numpy as np

from lpfio.reports import Report, canonical_json, config_hash, format_value, write_report


def test_config_hash_is_git_blob_hash():
    cfg = {"b": [1, 2.5], "a": {"z": math.inf}}
    body = canonical_json(cfg).encode()
    assert body == b'{"a":{"z":"inf"},"b":[1,2.5]}'
    assert config_hash(cfg) == hashlib.sha1(b"blob %d\0" % len(body) + body).hexdigest()
    assert config_hash({"a": {"z": math.inf}, "b": [1, 2.5]}) == config_hash(cfg)
    assert config_hash({"a": 1}) != config_hash({"a": 2})


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(np.float64(-math.inf)) == "-inf"
    assert format_value(True) == "true"
    assert format_value(np.bool_(False)) == "false"
    assert format_value(3) == "3"


def test_write_report(tmp_path):
    r = Report("demo", {"seed": 1}, ["j", "value"], [(1, 0.5), (2, 0.25)], {"ok": True}, {"max": 0.5},
               [("v", "values", "j", "value", "y")])
    paths = write_report(r, tmp_path)
    rows = list(csv.reader(paths["csv"].open()))
    assert rows[0] == ["j", "value", "config_hash"]
    assert all(row[-1] == r.config_hash for row in rows[1:])
    summary = json.loads(paths["json"].read_text())
    assert summary["config_hash"] == r.config_hash and summary["verdicts"] == {"ok": True}
    gp = paths["v"].read_text()
    assert "demo.csv" in gp and "using 1:2" in gp and "logscale y" in gp
    assert r.passed
    assert not Report("x", {}, [], verdicts={"a": True, "b": False}).passed
