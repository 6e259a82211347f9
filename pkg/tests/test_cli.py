import csv
import json
import math

import pytest

from lpfio.cli import main
from lpfio.grid import GridSpec, save_grid_function
from conftest import random_function


def test_selftest(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "PASS fio_identity" in out


def test_scaling_command(tmp_path):
    code = main(["scaling", "--n", "2", "--N", "256", "--L", repr(math.pi / 2), "--p", "2", "--m", "0",
                 "--phase", "wave", "--levels", "3", "5", "--out", str(tmp_path)])
    assert code == 0
    rows = list(csv.reader((tmp_path / "scaling.csv").open()))
    assert rows[0] == ["j", "R_j", "log2_R_j", "config_hash"]
    summary = json.loads((tmp_path / "scaling.json").read_text())
    assert set(summary) >= {"config_hash", "verdicts", "maxima"}
    assert rows[1][-1] == summary["config_hash"]
    assert (tmp_path / "scaling_log2R.gp").exists()


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "scaling", "operator": {"m": 1.0}, "corpus": {"size": 2}}))
    code = main(["scaling", "--config", str(cfg), "--N", "256", "--L", repr(math.pi / 2), "--levels", "3", "5",
                 "--m", "0", "--out", str(tmp_path)])
    summary = json.loads((tmp_path / "scaling.json").read_text())
    assert summary["config"]["operator"]["m"] == 0.0 and summary["config"]["corpus"]["size"] == 2
    assert code == 0


def test_failed_verdict_exit_code(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tolerances": {"slope": -1.0}, "corpus": {"size": 2}}))
    code = main(["scaling", "--config", str(cfg), "--N", "256", "--L", repr(math.pi / 2), "--levels", "3", "5",
                 "--out", str(tmp_path)])
    assert code == 2


def test_missing_config(tmp_path, capsys):
    path = tmp_path / "nope.json"
    assert main(["scaling", "--config", str(path)]) == 1
    assert str(path) in capsys.readouterr().err


def test_usage_errors(capsys):
    assert main(["scaling", "--bogus"]) == 1
    assert main([]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["fio-apply", "--n", "1", "--N", "32", "--window", "band"]) == 1
    assert main(["scaling", "--threads", "0"]) == 1
    assert "usage" in capsys.readouterr().err


def test_bad_config_contents(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("[1, 2]")
    assert main(["atoms", "--config", str(p)]) == 1
    p.write_text("{not json")
    assert main(["atoms", "--config", str(p)]) == 1


def test_grid_commands(tmp_path):
    f = random_function(GridSpec(1, 2 * math.pi, 64), 1)
    save_grid_function(f, tmp_path / "f")
    out = tmp_path / "out"
    assert main(["norm", "--input", str(tmp_path / "f.bin"), "--p", "0.8", "--q", "inf", "--s", "1",
                 "--out", str(out)]) == 0
    assert main(["decompose", "--n", "2", "--N", "32", "--out", str(out)]) == 0
    assert (out / "cutoffs.csv").exists()
    assert main(["fio-apply", "--input", str(tmp_path / "f.bin"), "--phase", "x1*xi1 + abs(xi1)",
                 "--method", "direct", "--out", str(out)]) == 0
    assert (out / "fio_output.csv").exists()
    assert main(["cones", "--j", "3", "--out", str(out)]) == 0
    assert len(list(csv.reader((out / "directions_j3.csv").open()))) == 1 + math.ceil(2 * math.pi * 2**1.5)
    assert main(["norm", "--input", str(tmp_path / "missing.csv"), "--out", str(out)]) == 1


def test_expression_error_is_usage_error():
    assert main(["fio-apply", "--n", "1", "--N", "32", "--phase", "open('x')"]) == 1
