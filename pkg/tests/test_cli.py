import csv
import json
import subprocess
import sys

import pytest

from eeibma.cli import main
from eeibma.config import RunConfig, dump_config, load_config, parse_config
from eeibma.errors import ConfigError

FAST = """
[traffic]
n_frames = 300
[train]
epochs = 15
hidden_units = 8
"""


def test_empty_config_gives_defaults():
    cfg = parse_config("")
    assert cfg == RunConfig()
    assert cfg.radio.p_tx == 0.0522 and cfg.radio.t_data == 0.0625
    assert cfg.scenario.n_frames == 20 and cfg.train.hidden_units == 64 and cfg.train.seq_len == 8


def test_milliwatt_keys_convert_to_si():
    cfg = parse_config("[radio]\np_tx_mw = 52.2\np_idle_mw = 1.42\nt_data_ms = 62.5\n")
    assert cfg.radio == RunConfig().radio
    assert parse_config("[radio]\nt_data_s = 0.125\n").radio.t_data == 0.125


def test_invalid_value_names_field():
    with pytest.raises(ConfigError) as exc:
        parse_config("[traffic]\np_base = 1.5\n")
    assert exc.value.field == "traffic.p_base"
    assert "traffic.p_base" in str(exc.value)


@pytest.mark.parametrize("text,field", [
    ("[traffic]\nbogus = 1\n", "traffic.bogus"),
    ("[radio]\np_tx = 1\n", "radio.p_tx"),
    ("[radio]\np_tx_mw = 1\np_tx_w = 0.001\n", "radio.p_tx_w"),
    ("[train]\nepochs = ten\n", "train.epochs"),
    ("[nonsense]\n", "nonsense"),
    ("[sweep]\naxis = voltage\n", "sweep.axis"),
    ("[sweep]\nvalues = 0.3, 0.2\n", "sweep.values"),
])
def test_bad_config_fields(text, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.field == field


def test_parse_error_reports_line():
    with pytest.raises(ConfigError) as exc:
        parse_config("[traffic]\nn_nodes = 20\nthis line is broken\n", source="x.ini")
    assert "line 3" in str(exc.value)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.ini")


def test_resolved_config_round_trip(tmp_path):
    cfg = parse_config("[run]\nseed = 11\n[radio]\np_rx_mw = 60\nt_ctrl_ms = 2\n"
                       "[scenario]\nbma_window = 4.5\n[sweep]\naxis = t_data\nvalues = 0.01, 0.02\n")
    path = tmp_path / "r.ini"
    path.write_text(dump_config(cfg))
    assert load_config(path) == cfg
    assert cfg.traffic.seed == cfg.train.seed == 11


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["frobnicate"]) == 2
    assert main([]) == 2


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[traffic]\np_base = 1.5\n")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "o")]) == 3
    assert "traffic.p_base" in capsys.readouterr().err


def test_run_writes_artifacts(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text(FAST)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--seed", "5"]) == 0
    for name in ("resolved_config.ini", "eval_report.json", "energy_report.json",
                 "energy_report.csv", "model.bin", "trace.csv"):
        assert (out / name).is_file(), name
    resolved = load_config(out / "resolved_config.ini")
    assert resolved.seed == 5 and resolved.traffic.n_frames == 300
    rec = json.loads((out / "energy_report.json").read_text())
    assert rec["e_tdma"] > 0
    assert "e_eei_best" in capsys.readouterr().out


def test_sweep_writes_csv(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text(FAST)
    out = tmp_path / "sw"
    assert main(["sweep", "--config", str(cfg), "--out", str(out), "--axis", "p_event"]) == 0
    rows = list(csv.reader((out / "sweep_p_event.csv").open()))
    assert len(rows) == 6
    assert [float(r[0]) for r in rows[1:]] == [0.1, 0.2, 0.3, 0.4, 0.5]
    doc = json.loads((out / "summary_p_event.json").read_text())
    assert doc["retrained"] is True and doc["n_points"] == 5
    assert (out / "resolved_config.ini").is_file()


def test_sweep_values_override_and_partial_failure(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text(FAST)
    out = tmp_path / "sw"
    code = main(["sweep", "--config", str(cfg), "--out", str(out), "--axis", "n_monitoring",
                 "--values", "1,3,19"])
    assert code == 0
    assert "1 point(s) failed" in capsys.readouterr().err
    assert len((out / "sweep_n_monitoring.csv").read_text().splitlines()) == 3


def test_sweep_all_points_fail(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text(FAST)
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "x"),
                 "--axis", "n_monitoring", "--values", "19,25"]) == 4


def test_validate_passes(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text(FAST)
    assert main(["validate", "--config", str(cfg), "--out", str(tmp_path / "v")]) == 0
    checks = json.loads((tmp_path / "v" / "validation.json").read_text())
    assert checks and all(c["passed"] for c in checks)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "eeibma", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "sweep" in proc.stdout
