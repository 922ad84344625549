"""INI-style run configuration.

Sections mirror the modules: ``[run]``, ``[traffic]``, ``[radio]``,
``[scenario]``, ``[train]`` and ``[sweep]``.  Every key is optional; missing
keys take the CC2420 defaults baked into the dataclasses.

Radio keys carry their unit in the name: ``p_tx_mw`` or ``p_tx_w`` for
powers, ``t_data_ms`` or ``t_data_s`` for durations.  Values are converted
to SI on load.  The resolved config is always written back in SI so that
reloading it reproduces the same ``RunConfig`` exactly.
"""

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .energy import RadioParams, ScenarioParams
from .errors import ConfigError
from .predictor import TrainConfig
from .traffic import TrafficConfig

RESOLVED_NAME = "resolved_config.ini"

AXES = ("p_event", "n_total", "n_monitoring", "t_data")

DEFAULT_SWEEP_VALUES = {
    "p_event": (0.1, 0.2, 0.3, 0.4, 0.5),
    "n_total": (20, 30, 40, 50),
    "n_monitoring": (1, 3, 5, 7, 9),
    "t_data": (0.015625, 0.03125, 0.0625, 0.125, 0.25),
}

_RADIO_UNITS = {
    "p_": {"w": 1.0, "mw": 1000.0},
    "t_": {"s": 1.0, "ms": 1000.0},
}


@dataclass(frozen=True)
class SweepSpec:
    axis: str = "p_event"
    values: tuple = DEFAULT_SWEEP_VALUES["p_event"]
    retrain_per_point: bool | None = None   # None -> axis default
    base: "RunConfig | None" = None

    def validate(self):
        if self.axis not in AXES:
            raise ConfigError("sweep.axis", f"{self.axis!r} not one of {', '.join(AXES)}")
        if len(self.values) == 0:
            raise ConfigError("sweep.values", "must not be empty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigError("sweep.values", "must be strictly increasing")
        return self

    @property
    def retrain(self):
        if self.retrain_per_point is not None:
            return self.retrain_per_point
        return self.axis == "p_event"


@dataclass(frozen=True)
class RunConfig:
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    radio: RadioParams = field(default_factory=RadioParams)
    scenario: ScenarioParams = field(default_factory=ScenarioParams)
    train: TrainConfig = field(default_factory=TrainConfig)
    sweep: SweepSpec | None = None
    output_dir: str = "results"
    seed: int | None = None

    def validate(self):
        self.traffic.validate()
        self.radio.validate()
        self.scenario.validate()
        self.train.validate()
        if self.train.seq_len >= self.traffic.n_frames:
            raise ConfigError("train.seq_len", "must be < traffic.n_frames")
        if self.sweep is not None:
            self.sweep.validate()
        return self

    def with_seed(self, seed):
        """Apply a master seed to every stochastic stage."""
        seed = int(seed)
        return replace(self, seed=seed,
                       traffic=replace(self.traffic, seed=seed),
                       train=replace(self.train, seed=seed))


def _convert(section, key, raw, typ):
    name = f"{section}.{key}"
    raw = raw.strip()
    try:
        if typ is bool:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if typ is int:
            return int(raw)
        return float(raw)
    except ValueError:
        raise ConfigError(name, f"cannot parse {raw!r} as {typ.__name__}") from None


def _type_of(f):
    t = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", str(f.type))
    if t.startswith("int"):
        return int
    if t.startswith("bool"):
        return bool
    return float


def _read_plain(parser, section, cls, skip=()):
    if not parser.has_section(section):
        return {}
    known = {f.name: f for f in fields(cls) if f.name not in skip}
    out = {}
    for key, raw in parser.items(section):
        if key not in known:
            raise ConfigError(f"{section}.{key}", "unknown setting")
        if section == "scenario" and key == "bma_window" and raw.strip().lower() in ("", "none"):
            out[key] = None
            continue
        out[key] = _convert(section, key, raw, _type_of(known[key]))
    return out


def _read_radio(parser):
    if not parser.has_section("radio"):
        return {}
    names = {f.name for f in fields(RadioParams)}
    out = {}
    for key, raw in parser.items("radio"):
        base, _, unit = key.rpartition("_")
        scale = _RADIO_UNITS.get(key[:2], {}).get(unit)
        if base not in names or scale is None:
            raise ConfigError(f"radio.{key}",
                              "unknown setting (use e.g. p_tx_mw / p_tx_w, t_data_ms / t_data_s)")
        if base in out:
            raise ConfigError(f"radio.{key}", f"{base} given twice")
        out[base] = _convert("radio", key, raw, float) / scale
    return out


def _read_sweep(parser):
    if not parser.has_section("sweep"):
        return None
    sec = dict(parser.items("sweep"))
    unknown = set(sec) - {"axis", "values", "retrain_per_point"}
    if unknown:
        raise ConfigError(f"sweep.{sorted(unknown)[0]}", "unknown setting")
    axis = sec.get("axis", "p_event").strip()
    if axis not in AXES:
        raise ConfigError("sweep.axis", f"{axis!r} not one of {', '.join(AXES)}")
    values = parse_values(axis, sec["values"]) if "values" in sec else DEFAULT_SWEEP_VALUES[axis]
    retrain = None
    if sec.get("retrain_per_point", "").strip():
        retrain = _convert("sweep", "retrain_per_point", sec["retrain_per_point"], bool)
    return SweepSpec(axis=axis, values=tuple(values), retrain_per_point=retrain)


def parse_values(axis, text):
    typ = int if axis in ("n_total", "n_monitoring") else float
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    return tuple(_convert("sweep", "values", p, typ) for p in parts)


def parse_config(text, source="<string>"):
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("config", f"{source} line {exc.lineno}: key outside any [section]") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]   # line is the repr() of the offending text
        raise ConfigError("config", f"{source} line {lineno}: cannot parse {line}") from None
    except configparser.Error as exc:
        where = f" line {exc.lineno}" if getattr(exc, "lineno", None) else ""
        msg = exc.message.splitlines()[0].split("]: ")[-1]
        raise ConfigError("config", f"{source}{where}: {msg}") from None
    for section in parser.sections():
        if section not in ("run", "traffic", "radio", "scenario", "train", "sweep"):
            raise ConfigError(section, "unknown section")

    run = {}
    if parser.has_section("run"):
        for key, raw in parser.items("run"):
            if key == "seed":
                run["seed"] = None if raw.strip().lower() in ("", "none") else \
                    _convert("run", key, raw, int)
            elif key == "output_dir":
                run["output_dir"] = raw.strip()
            else:
                raise ConfigError(f"run.{key}", "unknown setting")

    cfg = RunConfig(
        traffic=TrafficConfig(**_read_plain(parser, "traffic", TrafficConfig)),
        radio=RadioParams(**_read_radio(parser)),
        scenario=ScenarioParams(**_read_plain(parser, "scenario", ScenarioParams, skip=("n_event",))),
        train=TrainConfig(**_read_plain(parser, "train", TrainConfig)),
        sweep=_read_sweep(parser),
        **run,
    )
    if cfg.seed is not None:
        cfg = cfg.with_seed(cfg.seed)
    return cfg.validate()


def load_config(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"{path} does not exist")
    return parse_config(path.read_text(), source=str(path))


def _fmt(v):
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v)


def dump_config(cfg):
    """Serialise a RunConfig to INI text (radio in SI units)."""
    lines = ["[run]", f"seed = {_fmt(cfg.seed)}", f"output_dir = {cfg.output_dir}", ""]
    lines.append("[traffic]")
    lines += [f"{f.name} = {_fmt(getattr(cfg.traffic, f.name))}" for f in fields(TrafficConfig)]
    lines += ["", "[radio]"]
    for f in fields(RadioParams):
        unit = "w" if f.name.startswith("p_") else "s"
        lines.append(f"{f.name}_{unit} = {_fmt(getattr(cfg.radio, f.name))}")
    lines += ["", "[scenario]"]
    lines += [f"{f.name} = {_fmt(getattr(cfg.scenario, f.name))}"
              for f in fields(ScenarioParams) if f.name != "n_event"]
    lines += ["", "[train]"]
    lines += [f"{f.name} = {_fmt(getattr(cfg.train, f.name))}" for f in fields(TrainConfig)]
    if cfg.sweep is not None:
        lines += ["", "[sweep]", f"axis = {cfg.sweep.axis}",
                  "values = " + ", ".join(_fmt(v) for v in cfg.sweep.values)]
        if cfg.sweep.retrain_per_point is not None:
            lines.append(f"retrain_per_point = {_fmt(cfg.sweep.retrain_per_point)}")
    return "\n".join(lines) + "\n"


def write_resolved(cfg, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / RESOLVED_NAME
    path.write_text(dump_config(cfg))
    return path
