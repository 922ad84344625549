"""Command-line driver: ``eeibma run|sweep|validate``.

Exit codes: 0 ok, 2 usage, 3 configuration error, 4 pipeline failure,
5 validation checks failed.  Log verbosity comes from ``EEIBMA_LOG_LEVEL``
(default WARNING).
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import experiment as ex
from .config import RunConfig, SweepSpec, load_config, parse_values, write_resolved
from .errors import ConfigError, StageError
from .predictor import save_model
from .traffic import write_trace_csv

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_PIPELINE, EXIT_VALIDATION = 0, 2, 3, 4, 5

log = logging.getLogger("eeibma")


def _build_parser():
    p = argparse.ArgumentParser(prog="eeibma", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", metavar="{run,sweep,validate}")
    sub.required = True

    def common(sp):
        sp.add_argument("--config", help="INI config file (defaults used when omitted)")
        sp.add_argument("--out", help="output directory (overrides run.output_dir)")
        sp.add_argument("--seed", type=int, help="master seed for every stochastic stage")

    common(sub.add_parser("run", help="generate, train, evaluate and report energies"))
    sp = sub.add_parser("sweep", help="sweep one axis and write sweep_<axis>.csv")
    common(sp)
    sp.add_argument("--axis", choices=("p_event", "n_total", "n_monitoring", "t_data"))
    sp.add_argument("--values", help="comma-separated axis values (t_data in seconds)")
    sp.add_argument("--retrain", choices=("auto", "yes", "no"), default="auto")
    sp.add_argument("--workers", type=int, default=1)
    common(sub.add_parser("validate", help="run the invariant self-checks"))
    return p


def _resolve(args):
    cfg = load_config(args.config) if args.config else RunConfig().validate()
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    if args.out:
        cfg = replace(cfg, output_dir=args.out)
    out = Path(cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError("run.output_dir", f"cannot create {out}: {exc}") from None
    if not os.access(out, os.W_OK):
        raise ConfigError("run.output_dir", f"{out} is not writable")
    return cfg, out


def cmd_run(cfg, out):
    write_resolved(cfg, out)
    art = ex.run_pipeline_artifacts(cfg)
    (out / "eval_report.json").write_text(json.dumps(art.eval.to_dict(), indent=2) + "\n")
    (out / "energy_report.json").write_text(
        json.dumps(art.energy.to_record(), indent=2) + "\n")
    rec = art.energy.to_record()
    with open(out / "energy_report.csv", "w") as fh:
        fh.write(",".join(rec) + "\n")
        fh.write(",".join("" if v is None else ex.format_number(v) for v in rec.values()) + "\n")
    save_model(art.model, out / "model.bin")
    write_trace_csv(art.trace, out / "trace.csv")
    e = art.energy
    print(f"predictor rmse={art.eval.rmse:.4f}  p_true={art.eval.p_true_global:.4f}  "
          f"p_pred={art.eval.p_pred_global:.4f}")
    for k, v in e.energies().items():
        print(f"{k:>12s} = {v:.6g} J")
    print(f"{'eta_true':>12s} = {e.eta_true:.4f}")
    return EXIT_OK


def cmd_sweep(cfg, out, axis=None, values=None, retrain=None, workers=1):
    spec = cfg.sweep or SweepSpec()
    if axis is not None and axis != spec.axis:
        spec = ex.default_sweep(axis)
    if values is not None:
        spec = replace(spec, values=parse_values(spec.axis, values))
    if retrain is not None:
        spec = replace(spec, retrain_per_point=retrain)
    spec = replace(spec, base=None).validate()
    cfg = replace(cfg, sweep=spec)
    write_resolved(cfg, out)
    result = ex.run_sweep(spec, base=cfg, workers=workers)
    if not result.rows:
        for err in result.errors:
            print(f"point {err.value}: [{err.stage}] {err.message}", file=sys.stderr)
        return EXIT_PIPELINE
    table = ex.comparative_summary(result)
    ex.write_sweep_csv(result, out / f"sweep_{spec.axis}.csv")
    ex.write_summary_json(result, table, out / f"summary_{spec.axis}.json")
    print(f"sweep {spec.axis}: {len(result.rows)} points, {len(result.errors)} errors")
    for col in ("save_best_vs_tdma", "save_best_vs_eatdma", "save_best_vs_bma", "eta_true"):
        agg = table.aggregate[col]
        print(f"  {col:<22s} median={agg['median']:9.3f}  min={agg['min']:9.3f}  "
              f"max={agg['max']:9.3f}")
    if result.errors:
        print(f"partial sweep: {len(result.errors)} point(s) failed, see summary JSON",
              file=sys.stderr)
    return EXIT_OK


def cmd_validate(cfg, out):
    from .validation import run_checks

    write_resolved(cfg, out)
    checks = run_checks(cfg)
    for c in checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
    (out / "validation.json").write_text(json.dumps(
        [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
        indent=2) + "\n")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION


def main(argv=None):
    logging.basicConfig(level=os.environ.get("EEIBMA_LOG_LEVEL", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg, out = _resolve(args)
        if args.command == "run":
            return cmd_run(cfg, out)
        if args.command == "sweep":
            retrain = {"auto": None, "yes": True, "no": False}[args.retrain]
            return cmd_sweep(cfg, out, args.axis, args.values, retrain, args.workers)
        return cmd_validate(cfg, out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageError as exc:
        print(f"pipeline failure: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
