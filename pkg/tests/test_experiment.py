import csv
import json
from dataclasses import replace

import numpy as np
import pytest

from eeibma import experiment as ex
from eeibma.config import RunConfig, SweepSpec
from eeibma.energy import ActivationLevels, RadioParams, ScenarioParams, full_report, tdma_cap
from eeibma.errors import StageError
from eeibma.predictor import TrainConfig
from eeibma.traffic import TrafficConfig

SMALL = RunConfig(traffic=TrafficConfig(n_nodes=20, n_frames=400, seed=3),
                  train=TrainConfig(epochs=25, hidden_units=16, seed=4))


def test_pipeline_deterministic():
    a, b = ex.run_pipeline(SMALL), ex.run_pipeline(SMALL)
    assert json.dumps(a.eval.to_dict()) == json.dumps(b.eval.to_dict())
    assert a.energy.to_record() == b.energy.to_record()


def test_pipeline_report_consistency():
    ev, rep = ex.run_pipeline(SMALL)
    assert rep.activation.n_t == pytest.approx(18 * ev.p_true_global)
    assert rep.activation.n_b <= rep.activation.n_w
    assert all(v > 0 for v in rep.energies().values())


def test_pipeline_plain_bernoulli_rate():
    cfg = replace(SMALL, traffic=TrafficConfig(n_frames=1000, p_base=0.2, burst_rate=0.0,
                                               flip_noise=0.0, seed=21))
    ev, _ = ex.run_pipeline(cfg)
    # test split has n_test samples of 20 independent nodes
    bound = 4 * np.sqrt(0.2 * 0.8 / (ev.n_test * 20))
    assert abs(ev.p_true_global - 0.2) <= bound


def test_pipeline_errors_carry_stage():
    bad = replace(SMALL, scenario=replace(SMALL.scenario, n_monitoring=19))
    with pytest.raises(StageError) as exc:
        ex.run_pipeline(bad)
    assert exc.value.stage == "config"


def test_apply_axis():
    assert ex.apply_axis(SMALL, "p_event", 0.3).traffic.p_base == 0.3
    assert ex.apply_axis(SMALL, "n_total", 40).scenario.n_total == 40
    assert ex.apply_axis(SMALL, "t_data", 0.125).radio.t_data == 0.125
    with pytest.raises(ValueError):
        ex.apply_axis(SMALL, "bogus", 1)


def test_p_event_sweep_retrains_each_point():
    res = ex.run_sweep(SweepSpec("p_event", (0.1, 0.2, 0.3, 0.4, 0.5)), base=SMALL)
    assert res.retrained
    assert len(res.rows) == 5 and not res.errors
    assert res.values == [0.1, 0.2, 0.3, 0.4, 0.5]
    for r in res.rows:
        assert all(v > 0 for v in r.energy.energies().values())
    n_t = [r.energy.activation.n_t for r in res.rows]
    assert all(b > a for a, b in zip(n_t, n_t[1:]))


def test_p_event_sweep_without_retraining_shifts_stats():
    res = ex.run_sweep(SweepSpec("p_event", (0.1, 0.3), retrain_per_point=False), base=SMALL)
    assert not res.retrained
    a, b = res.rows
    assert a.eval.p_true_global == 0.1 and b.eval.p_true_global == 0.3
    assert b.eval.p_pred_global - a.eval.p_pred_global == pytest.approx(0.2)
    assert b.energy.e_eei_true > a.energy.e_eei_true


def test_n_total_sweep_tdma_strictly_increasing():
    res = ex.run_sweep(SweepSpec("n_total", (20, 30, 40, 50)), base=SMALL)
    assert not res.retrained and len(res.rows) == 4
    tdma = [r.energy.e_tdma for r in res.rows]
    assert all(b > a for a, b in zip(tdma, tdma[1:]))


def test_n_monitoring_sweep_monotone():
    res = ex.run_sweep(SweepSpec("n_monitoring", (1, 3, 5, 7, 9)), base=SMALL)
    tdma = [r.energy.e_tdma for r in res.rows]
    assert all(b >= a for a, b in zip(tdma, tdma[1:]))


def test_t_data_doubling_doubles_tdma_cfp_part():
    res = ex.run_sweep(SweepSpec("t_data", (0.0625, 0.125)), base=SMALL)
    a, b = (r.energy for r in res.rows)
    cap = tdma_cap(a.radio, a.scenario)
    assert (b.e_tdma - cap) == pytest.approx(2 * (a.e_tdma - cap), rel=1e-13)
    assert b.e_tdma > a.e_tdma and b.e_bma > a.e_bma


def test_sweep_records_errors_and_continues():
    res = ex.run_sweep(SweepSpec("n_monitoring", (1, 5, 19, 25)), base=SMALL)
    assert len(res.rows) == 2 and len(res.errors) == 2
    assert [e.value for e in res.errors] == [19, 25]
    assert all(e.stage in ("config", "energy") for e in res.errors)
    assert len(res.rows) + len(res.errors) == 4


def test_sweep_error_in_retraining_mode():
    res = ex.run_sweep(SweepSpec("p_event", (0.2, 0.95)), base=SMALL)
    # p_base=0.95 exceeds burst_prob=0.6
    assert len(res.rows) == 1 and res.errors[0].value == 0.95


def test_sweep_parallel_matches_serial():
    spec = SweepSpec("p_event", (0.1, 0.3))
    a = ex.run_sweep(spec, base=SMALL, workers=1)
    b = ex.run_sweep(spec, base=SMALL, workers=2)
    assert [r.energy.to_record() for r in a.rows] == [r.energy.to_record() for r in b.rows]


def test_sweep_rejects_bad_spec():
    with pytest.raises(ValueError):
        ex.run_sweep(SweepSpec("p_event", (0.3, 0.2)), base=SMALL)


def _report():
    return full_report(RadioParams(), ScenarioParams(), ActivationLevels(1.8, 1.8, 1.44, 2.7))


def test_savings_arithmetic():
    assert ex.savings_percent(2.0, 1.0) == 50.0
    assert ex.savings_percent(3.7, 3.7) == 0.0
    rep = _report()
    s = ex.point_savings(rep)
    assert set(s) == set(ex.SAVINGS_FIELDS) and len(s) == 9
    assert s["save_true_vs_bma"] == 100 * (rep.e_bma - rep.e_eei_true) / rep.e_bma


def test_summary_recomputable():
    res = ex.run_sweep(SweepSpec("t_data", (0.03125, 0.0625, 0.125)), base=SMALL)
    table = ex.comparative_summary(res)
    for row, r in zip(table.rows, res.rows):
        e = r.energy
        for v in ex.VARIANTS:
            for b in ex.BASELINES:
                base, ours = getattr(e, f"e_{b}"), getattr(e, f"e_eei_{v}")
                assert row[f"save_{v}_vs_{b}"] == pytest.approx(100 * (base - ours) / base, rel=1e-12)
    col = [row["save_best_vs_tdma"] for row in table.rows]
    agg = table.aggregate["save_best_vs_tdma"]
    assert (agg["min"], agg["median"], agg["max"]) == (min(col), float(np.median(col)), max(col))


def test_summary_requires_rows():
    with pytest.raises(ValueError):
        ex.comparative_summary(ex.SweepResult("p_event"))


def test_format_number():
    assert ex.format_number(0.1) == "0.1"
    assert ex.format_number(20) == "20"
    assert ex.format_number(0.2259059375) == "0.2259059375"
    assert ex.format_number(1 / 3) == "0.3333333333"
    assert ex.format_number(12345.678901234) == "12345.6789"
    assert ex.format_number(1.5e-7) == "0.00000015"


def test_sweep_csv_schema(tmp_path):
    res = ex.run_sweep(SweepSpec("n_total", (20, 30)), base=SMALL)
    path = tmp_path / "sweep_n_total.csv"
    ex.write_sweep_csv(res, path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["n_total", "e_tdma", "e_eatdma", "e_bma", "e_eei_poor", "e_eei_true",
                       "e_eei_best", "eta_true",
                       "save_best_vs_tdma", "save_best_vs_eatdma", "save_best_vs_bma",
                       "save_true_vs_tdma", "save_true_vs_eatdma", "save_true_vs_bma",
                       "save_poor_vs_tdma", "save_poor_vs_eatdma", "save_poor_vs_bma"]
    assert [r[0] for r in rows[1:]] == ["20", "30"]
    assert float(rows[1][1]) == pytest.approx(res.rows[0].energy.e_tdma, rel=1e-9)


def test_summary_json_schema(tmp_path):
    res = ex.run_sweep(SweepSpec("n_monitoring", (1, 19)), base=SMALL)
    table = ex.comparative_summary(res)
    path = tmp_path / "summary.json"
    ex.write_summary_json(res, table, path)
    doc = json.loads(path.read_text())
    assert sorted(doc) == ["aggregate", "axis", "errors", "n_points", "points", "retrained"]
    assert doc["n_points"] == 1 and doc["errors"][0]["value"] == 19
    assert set(doc["points"][0]) == {"value", "energy", "savings", "predictor"}
    assert set(doc["aggregate"]["eta_true"]) == {"median", "min", "max"}
