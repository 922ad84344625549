"""End-to-end pipeline and parameter sweeps.

Seed derivation: a pipeline run seeds the trace with ``traffic.seed`` and
the predictor with ``train.seed`` (init, split and shuffle use independent
streams ``(train.seed, 2)``, ``(train.seed, 3)`` and ``(train.seed, 1)``).
Sweep point ``k`` of a retraining sweep XORs ``k`` into both seeds.
"""

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import energy as en
from .config import AXES, RunConfig, SweepSpec
from .errors import EEIBMAError, StageError
from .predictor import EvalReport, evaluate, init_model, train
from .traffic import build_dataset, generate_trace, split_dataset

log = logging.getLogger(__name__)

VARIANTS = ("best", "true", "poor")
BASELINES = ("tdma", "eatdma", "bma")
SAVINGS_FIELDS = tuple(f"save_{v}_vs_{b}" for v in VARIANTS for b in BASELINES)
CSV_ENERGY_FIELDS = en.EnergyReport.ENERGY_FIELDS + ("eta_true",)


class PipelineResult(NamedTuple):
    eval: EvalReport
    energy: en.EnergyReport


@dataclass
class PipelineArtifacts:
    trace: object
    model: object
    loss_history: list
    eval: EvalReport
    energy: en.EnergyReport


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except (EEIBMAError, ValueError, ArithmeticError) as exc:
        raise StageError(name, exc) from exc


def train_predictor(cfg):
    """Traffic + predictor stages.  Returns (trace, model, loss_history, eval_report)."""
    trace = _stage("traffic", generate_trace, cfg.traffic)
    tc = cfg.train

    def _fit():
        ds = build_dataset(trace, tc.seq_len)
        train_set, test_set = split_dataset(ds, tc.train_ratio, (tc.seed, 3))
        model = init_model(ds.inputs.shape[1], tc.hidden_units, ds.n_nodes, (tc.seed, 2))
        model, history = train(model, train_set, tc)
        return model, history, evaluate(model, test_set)

    model, history, report = _stage("predictor", _fit)
    log.info("predictor: rmse=%.4f p_true=%.4f p_pred=%.4f [%.4f, %.4f]", report.rmse,
             report.p_true_global, report.p_pred_global, report.p_pred_min, report.p_pred_max)
    return trace, model, history, report


def energy_from_eval(cfg, report):
    """Map predictor statistics to activation levels and evaluate all protocols."""

    def _energy():
        scenario = cfg.scenario
        act = en.activation_levels(scenario, report.p_true_global, report.p_pred_global,
                                   report.p_pred_min, report.p_pred_max)
        return en.full_report(cfg.radio, scenario, act)

    return _stage("energy", _energy)


def run_pipeline_artifacts(cfg):
    cfg = _stage("config", cfg.validate)
    trace, model, history, report = train_predictor(cfg)
    return PipelineArtifacts(trace, model, history, report, energy_from_eval(cfg, report))


def run_pipeline(cfg):
    """generate -> build/split -> train -> evaluate -> energy.  Returns (EvalReport, EnergyReport)."""
    art = run_pipeline_artifacts(cfg)
    return PipelineResult(art.eval, art.energy)


@dataclass
class SweepRow:
    value: float
    energy: en.EnergyReport
    eval: EvalReport


@dataclass
class SweepPointError:
    index: int
    value: float
    stage: str
    message: str

    def to_dict(self):
        return {"index": self.index, "value": self.value, "stage": self.stage,
                "message": self.message}


@dataclass
class SweepResult:
    axis: str
    rows: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    retrained: bool = True

    @property
    def values(self):
        return [r.value for r in self.rows]


def apply_axis(cfg, axis, value):
    """Return ``cfg`` with the sweep axis set to ``value``."""
    if axis == "p_event":
        return replace(cfg, traffic=replace(cfg.traffic, p_base=float(value)),
                       scenario=replace(cfg.scenario, p_event=float(value)))
    if axis == "n_total":
        return replace(cfg, scenario=replace(cfg.scenario, n_total=int(value)))
    if axis == "n_monitoring":
        return replace(cfg, scenario=replace(cfg.scenario, n_monitoring=int(value)))
    if axis == "t_data":
        return replace(cfg, radio=replace(cfg.radio, t_data=float(value)))
    raise ValueError(f"unknown sweep axis {axis!r}")


def _shifted_report(base, p_true):
    # reuse a trained predictor's offsets around a new analytic event rate
    delta = p_true - base.p_true_global
    clip = lambda v: float(min(1.0, max(0.0, v + delta)))  # noqa: E731
    rep = EvalReport(
        p_true_per_node=np.clip(base.p_true_per_node + delta, 0.0, 1.0),
        p_pred_per_node=np.clip(base.p_pred_per_node + delta, 0.0, 1.0),
        error_per_node=base.error_per_node.copy(),
        p_true_global=float(p_true),
        p_pred_global=clip(base.p_pred_global),
        rmse=base.rmse,
        p_pred_min=clip(base.p_pred_min),
        p_pred_max=clip(base.p_pred_max),
        n_test=base.n_test,
    )
    rep.error_per_node = rep.p_pred_per_node - rep.p_true_per_node
    return rep


def _run_point(task):
    index, axis, value, cfg = task
    try:
        point = apply_axis(cfg, axis, value)
        point = replace(point, traffic=replace(point.traffic, seed=point.traffic.seed ^ index),
                        train=replace(point.train, seed=point.train.seed ^ index))
        ev, rep = run_pipeline(point)
        return SweepRow(value, rep, ev)
    except StageError as exc:
        return SweepPointError(index, value, exc.stage, str(exc.cause))
    except (EEIBMAError, ValueError) as exc:
        return SweepPointError(index, value, "config", str(exc))


def run_sweep(spec, base=None, workers=1):
    """Run every point of ``spec``; failing points are recorded, not raised."""
    spec.validate()
    cfg = base if base is not None else (spec.base if spec.base is not None else RunConfig())
    result = SweepResult(axis=spec.axis, retrained=spec.retrain)

    if spec.retrain:
        tasks = [(k, spec.axis, v, cfg) for k, v in enumerate(spec.values)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(_run_point, tasks))
        else:
            outcomes = [_run_point(t) for t in tasks]
    else:
        _, _, _, base_report = train_predictor(cfg.validate())
        outcomes = []
        for k, v in enumerate(spec.values):
            try:
                point = apply_axis(cfg, spec.axis, v)
                point.scenario.validate()
                point.radio.validate()
                rep = _shifted_report(base_report, float(v)) if spec.axis == "p_event" else base_report
                outcomes.append(SweepRow(v, energy_from_eval(point, rep), rep))
            except StageError as exc:
                outcomes.append(SweepPointError(k, v, exc.stage, str(exc.cause)))
            except (EEIBMAError, ValueError) as exc:
                outcomes.append(SweepPointError(k, v, "config", str(exc)))

    for out in outcomes:
        if isinstance(out, SweepPointError):
            log.warning("sweep %s=%s failed in %s: %s", spec.axis, out.value, out.stage, out.message)
            result.errors.append(out)
        else:
            result.rows.append(out)
    return result


def savings_percent(e_base, e_variant):
    return 100.0 * (e_base - e_variant) / e_base


@dataclass
class SavingsTable:
    axis: str
    rows: list          # one dict per sweep point
    aggregate: dict     # column -> {"median", "min", "max"}


def point_savings(report):
    e = report.energies()
    out = {}
    for v in VARIANTS:
        for b in BASELINES:
            out[f"save_{v}_vs_{b}"] = savings_percent(e[f"e_{b}"], e[f"e_eei_{v}"])
    return out


def comparative_summary(sweep):
    if not sweep.rows:
        raise ValueError("comparative_summary needs at least one successful sweep point")
    rows = []
    for r in sweep.rows:
        row = {sweep.axis: r.value}
        row.update(point_savings(r.energy))
        row["eta_true"] = r.energy.eta_true
        rows.append(row)
    aggregate = {}
    for col in SAVINGS_FIELDS + ("eta_true",):
        vals = np.array([row[col] for row in rows])
        aggregate[col] = {"median": float(np.median(vals)), "min": float(vals.min()),
                          "max": float(vals.max())}
    return SavingsTable(sweep.axis, rows, aggregate)


def format_number(x):
    """Fixed notation, 10 significant digits (stable golden files)."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return np.format_float_positional(float(x), precision=10, unique=False,
                                      fractional=False, trim="-")


def sweep_csv_header(axis):
    return [axis] + list(CSV_ENERGY_FIELDS) + list(SAVINGS_FIELDS)


def write_sweep_csv(sweep, path):
    """``sweep_<axis>.csv``: axis value, six energies (J), eta_true, nine savings (%)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(sweep_csv_header(sweep.axis))
        for r in sweep.rows:
            e = r.energy
            s = point_savings(e)
            w.writerow([format_number(r.value)]
                       + [format_number(getattr(e, k)) for k in CSV_ENERGY_FIELDS]
                       + [format_number(s[k]) for k in SAVINGS_FIELDS])


def summary_dict(sweep, table):
    return {
        "axis": sweep.axis,
        "retrained": sweep.retrained,
        "n_points": len(sweep.rows),
        "aggregate": table.aggregate,
        "points": [
            {
                "value": r.value,
                "energy": {k: v for k, v in r.energy.to_record().items()
                           if k in CSV_ENERGY_FIELDS + ("n_p", "n_t", "n_b", "n_w")},
                "savings": point_savings(r.energy),
                "predictor": {k: v for k, v in r.eval.to_dict().items()
                              if not k.endswith("_per_node")},
            }
            for r in sweep.rows
        ],
        "errors": [e.to_dict() for e in sweep.errors],
    }


def write_summary_json(sweep, table, path):
    Path(path).write_text(json.dumps(summary_dict(sweep, table), indent=2, sort_keys=True) + "\n")


def default_sweep(axis, base=None):
    from .config import DEFAULT_SWEEP_VALUES

    if axis not in AXES:
        raise ValueError(f"unknown sweep axis {axis!r}")
    return SweepSpec(axis=axis, values=DEFAULT_SWEEP_VALUES[axis], base=base)
