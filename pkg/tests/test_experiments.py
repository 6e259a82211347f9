import math

import pytest
from hypothesis import given, strategies as st

from lpfio.experiments import (
    ExperimentConfig,
    critical_order,
    default_config,
    run_experiment,
    scaling_experiment,
    torus_tail_prediction,
)
from lpfio.reports import write_report

SMALL_SCALING = {"grid": {"N": 256, "L": math.pi / 2}, "levels": [3, 5], "corpus": {"size": 3}}


def test_critical_order():
    for n in (1, 2, 3):
        assert critical_order(2, n) == 0
    assert critical_order(math.inf, 2) == -0.5
    assert all(critical_order(p, 1) == 0 for p in (0.3, 1, 7))
    with pytest.raises(ValueError):
        critical_order(0, 2)
    with pytest.raises(ValueError):
        critical_order(-1, 2)


@given(p=st.floats(1.0001, 1e6), n=st.integers(1, 5))
def test_critical_order_duality(p, n):
    dual = p / (p - 1)
    assert critical_order(p, n) == pytest.approx(critical_order(dual, n), abs=1e-12)


def test_config_merge_and_hash():
    cfg = ExperimentConfig.build("scaling", {"grid": {"N": 512}, "p": 1})
    assert cfg["grid"] == {"n": 2, "L": 2 * math.pi, "N": 512}
    assert cfg["p"] == 1
    assert default_config("scaling")["grid"]["N"] == 1024
    assert cfg.hash != ExperimentConfig.build("scaling").hash
    with pytest.raises(ValueError):
        default_config("nope")


def test_scaling_small_identity_case():
    rep = scaling_experiment(ExperimentConfig.build("scaling", SMALL_SCALING))
    assert rep.levels == [3, 4, 5]
    assert all(r > 0 for r in rep.ratios)
    assert abs(rep.slope) <= 0.1 and rep.verdicts["upper_bound_ok"]
    report = rep.to_report()
    assert report.header == ["j", "R_j", "log2_R_j"] and len(report.rows) == 3


def test_scaling_errors():
    with pytest.raises(ValueError, match="resolution"):
        scaling_experiment(ExperimentConfig.build("scaling", {**SMALL_SCALING, "levels": [3, 9]}))
    with pytest.raises(ValueError, match="empty"):
        scaling_experiment(ExperimentConfig.build("scaling", {**SMALL_SCALING, "corpus": {"size": 0}}))
    with pytest.raises(ValueError):
        scaling_experiment(ExperimentConfig.build("scaling", {**SMALL_SCALING, "corpus": {"kind": "odd", "size": 1}}))
    bad_phase = {**SMALL_SCALING, "corpus": {"kind": "focusing", "size": 1}, "operator": {"phase": "anisotropic"}}
    with pytest.raises(ValueError, match="focusing"):
        scaling_experiment(ExperimentConfig.build("scaling", bad_phase))


def test_wave_sweep_one_dimensional_cells_bounded():
    grids = [{"label": "base", "n": 1, "L": 8.0, "N": 256}, {"label": "N-doubled", "n": 1, "L": 8.0, "N": 512}]
    cfg = ExperimentConfig.build("wave-sweep", {"grids": grids, "corpus": {"size": 4}})
    rep = run_experiment(cfg)
    assert rep.verdicts["all_finite"]
    assert rep.maxima["overall_max"] <= 4
    assert rep.header == ["grid", "X", "s", "p", "q", "t", "corpus_id", "ratio"]
    cells = {(r[1], r[3], r[4]) for r in rep.rows}
    assert ("F", math.inf, math.inf) not in cells and ("B", math.inf, math.inf) in cells


def test_wave_sweep_l2_cell_bounded():
    grids = [{"label": "base", "n": 2, "L": 8.0, "N": 128}]
    cfg = ExperimentConfig.build("wave-sweep", {"grids": grids, "corpus": {"size": 6}, "kinds": ["B"],
                                                "p": [2.0], "s": [0.0], "t": [1.0]})
    rep = run_experiment(cfg)
    assert len(rep.rows) == 6
    assert max(r[-1] for r in rep.rows) <= 2


def test_atoms_small():
    rep = run_experiment(ExperimentConfig.build("atoms", {"grid": {"N": 256}, "corpus": {"size": 6}}))
    assert rep.maxima["snd_margin"] == 1.0
    assert rep.maxima["p=0.75"]["m"] == pytest.approx(-5 / 6)
    assert len(rep.rows) == 12


def test_atoms_reject_degenerate_phase():
    cfg = ExperimentConfig.build("atoms", {"grid": {"N": 256}, "corpus": {"size": 2},
                                           "operator": {"phase": "x1*xi1 + norm(xi1, xi2)"}})
    with pytest.raises(ValueError, match="non-degeneracy"):
        run_experiment(cfg)


def test_torus_tail_prediction_tends_to_free_space_value():
    values = [torus_tail_prediction(L, (20.0, 60.0)) for L in (512.0, 4096.0, 32768.0)]
    assert abs(values[-1] + 2 / math.pi) < abs(values[0] + 2 / math.pi)
    assert values[-1] == pytest.approx(-2 / math.pi, rel=5e-3)


def test_sharpness_requires_large_box():
    with pytest.raises(ValueError):
        run_experiment(ExperimentConfig.build("sharpness-1d", {"tail": {"L": 128.0, "N": 4096}}))


def test_small_envelope_and_decay_run():
    env = run_experiment(ExperimentConfig.build("envelope", {"grid": {"N": 128}, "levels": [3, 4]}))
    assert len(env.rows) == 2 and all(r[4] > 0 for r in env.rows)
    dec = run_experiment(ExperimentConfig.build("kernel-decay", {"cases": [{"n": 1, "L": 256.0, "N": 1024}]}))
    assert all(dec.verdicts.values())


@pytest.mark.parametrize("name,overrides", [
    ("scaling", {**SMALL_SCALING, "corpus": {"kind": "knapp", "size": 3}, "p": 1.0}),
    ("wave-sweep", {"grids": [{"label": "base", "n": 2, "L": 8.0, "N": 64}], "corpus": {"size": 4}}),
    ("atoms", {"grid": {"N": 256}, "corpus": {"size": 4}}),
])
def test_reports_independent_of_worker_count(tmp_path, name, overrides):
    cfg = ExperimentConfig.build(name, overrides)
    one = write_report(run_experiment(cfg, 1), tmp_path / "one")
    two = write_report(run_experiment(cfg, 3), tmp_path / "two")
    assert one["csv"].read_bytes() == two["csv"].read_bytes()
    assert one["json"].read_bytes() == two["json"].read_bytes()
