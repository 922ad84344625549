"""Closed-form expected energy of TDMA, EA-TDMA, BMA and EEI-BMA clusters.

All quantities are SI (watts, seconds, joules).  Activation counts are
expectations and stay real-valued; only the TDMA/EA-TDMA event count is
rounded (half up) because those protocols hand out whole slots.

Frame scaling follows the published models as written: TDMA and EA-TDMA
pay the CAP once and the CFP ``l`` times, BMA and EEI-BMA pay
``l * (CAP + CFP)``.
"""

import math
from dataclasses import asdict, dataclass, replace

from .errors import ConfigError


@dataclass(frozen=True)
class RadioParams:
    """CC2420-class transceiver constants in W and s.

    Defaults are written as mW/ms over 1000 so they equal a config file
    that states the same numbers in mW/ms.  ``t_echeck`` (buffer check
    time) has no published value and defaults to the control duration.
    """

    p_tx: float = 52.2 / 1000
    p_rx: float = 56.4 / 1000
    p_idle: float = 1.42 / 1000
    p_energycheck: float = 2.0 / 1000
    t_ctrl: float = 1.5625 / 1000
    t_data: float = 62.5 / 1000
    t_chead: float = 1.5625 / 1000
    t_echeck: float = 1.5625 / 1000

    def validate(self):
        for name, value in asdict(self).items():
            if not value > 0 or not math.isfinite(value):
                raise ConfigError(f"radio.{name}", f"must be finite and > 0, got {value}")
        return self


@dataclass(frozen=True)
class ScenarioParams:
    n_total: int = 20
    n_monitoring: int = 1
    n_event: float = 0
    n_frames: int = 20
    p_event: float = 0.1
    bma_window: float | None = None   # fixed BMA window count; None -> use n_w

    def validate(self):
        if self.n_monitoring < 0:
            raise ConfigError("scenario.n_monitoring", "must be >= 0")
        # at least one event-capable node must remain besides the monitors and the head
        if self.n_total < self.n_monitoring + 2:
            raise ConfigError("scenario.n_monitoring",
                              f"need n_monitoring < n_total - 1 ({self.n_monitoring} >= "
                              f"{self.n_total - 1})")
        if self.n_frames < 0:
            raise ConfigError("scenario.n_frames", "must be >= 0")
        if not 0.0 <= self.p_event <= 1.0:
            raise ConfigError("scenario.p_event", f"{self.p_event} outside [0, 1]")
        if self.n_event < 0:
            raise ConfigError("scenario.n_event", "must be >= 0")
        if self.bma_window is not None and not 0 <= self.bma_window <= self.capacity:
            raise ConfigError("scenario.bma_window",
                              f"{self.bma_window} outside [0, {self.capacity}]")
        return self

    @property
    def capacity(self):
        """Nodes that can be event-triggered: N - m - 1 (cluster head excluded)."""
        return self.n_total - self.n_monitoring - 1


@dataclass(frozen=True)
class ActivationLevels:
    n_p: float
    n_t: float
    n_b: float
    n_w: float


@dataclass(frozen=True)
class EnergyReport:
    e_tdma: float
    e_eatdma: float
    e_bma: float
    e_eei_poor: float
    e_eei_true: float
    e_eei_best: float
    eta_true: float
    activation: ActivationLevels
    scenario: ScenarioParams
    radio: RadioParams

    ENERGY_FIELDS = ("e_tdma", "e_eatdma", "e_bma", "e_eei_poor", "e_eei_true", "e_eei_best")

    def energies(self):
        return {k: getattr(self, k) for k in self.ENERGY_FIELDS}

    def to_record(self):
        """Flat mapping with fixed key names (see ``RECORD_FIELDS``)."""
        rec = self.energies()
        rec["eta_true"] = self.eta_true
        rec.update(asdict(self.activation))
        rec.update({f"scenario_{k}": v for k, v in asdict(self.scenario).items()})
        rec.update({f"radio_{k}": v for k, v in asdict(self.radio).items()})
        return rec


RECORD_FIELDS = (
    EnergyReport.ENERGY_FIELDS + ("eta_true", "n_p", "n_t", "n_b", "n_w")
    + tuple(f"scenario_{k}" for k in ScenarioParams.__dataclass_fields__)
    + tuple(f"radio_{k}" for k in RadioParams.__dataclass_fields__)
)


def round_half_up(x):
    return int(math.floor(x + 0.5))


def _check_active(name, value, scenario):
    cap = scenario.capacity
    if cap < 0:
        raise ValueError(f"n_total ({scenario.n_total}) < n_monitoring + 1")
    if not 0 <= value <= cap:
        raise ValueError(f"{name}={value} outside [0, N-m-1={cap}]")


def activation_levels(scenario, p_true, p_pred_mean, p_pred_min, p_pred_max):
    cap = scenario.capacity
    if cap < 0:
        raise ValueError(f"n_total ({scenario.n_total}) < n_monitoring + 1 ({scenario.n_monitoring + 1})")
    for name, p in (("p_true", p_true), ("p_pred_mean", p_pred_mean),
                    ("p_pred_min", p_pred_min), ("p_pred_max", p_pred_max)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name}={p} outside [0, 1]")
    return ActivationLevels(n_p=cap * p_pred_mean, n_t=cap * p_true,
                            n_b=cap * p_pred_min, n_w=cap * p_pred_max)


def _tdma_check(scenario):
    n, m, big_n = scenario.n_event, scenario.n_monitoring, scenario.n_total
    if n < 0 or m < 0 or big_n < m + n + 1:
        raise ValueError(f"TDMA needs N >= m + n + 1 (N={big_n}, m={m}, n={n})")


def tdma_cap(radio, scenario):
    return radio.p_tx * radio.t_ctrl + (scenario.n_total - 1) * radio.p_rx * radio.t_ctrl


def tdma_cfp(radio, scenario):
    n, m, big_n = scenario.n_event, scenario.n_monitoring, scenario.n_total
    return (n * radio.p_tx * radio.t_data + m * radio.p_tx * radio.t_data
            + (big_n - m - n - 1) * radio.p_idle * radio.t_data)


def tdma_energy(radio, scenario):
    _tdma_check(scenario)
    return tdma_cap(radio, scenario) + scenario.n_frames * tdma_cfp(radio, scenario)


def eatdma_cfp(radio, scenario):
    n, m, big_n = scenario.n_event, scenario.n_monitoring, scenario.n_total
    return (n * radio.p_tx * radio.t_data
            + (big_n - m - n - 1) * (radio.p_idle * radio.t_data
                                     + radio.p_energycheck * radio.t_echeck)
            + m * radio.p_tx * radio.t_data)


def eatdma_energy(radio, scenario):
    _tdma_check(scenario)
    # the CAP is the same control exchange as plain TDMA
    return tdma_cap(radio, scenario) + scenario.n_frames * eatdma_cfp(radio, scenario)


def bitmap_cap(radio, scenario, n_active):
    """CAP shared by BMA and EEI-BMA: active + monitoring nodes listen, the rest idle."""
    m, big_n = scenario.n_monitoring, scenario.n_total
    return ((m + n_active) * radio.p_rx * radio.t_ctrl
            + (big_n - m - n_active - 1) * radio.p_idle * radio.t_ctrl
            + radio.p_tx * radio.t_chead)


def bma_cfp(radio, scenario, n_w):
    return (n_w + scenario.n_monitoring) * radio.p_rx * radio.t_data + n_w * radio.p_tx * radio.t_data


def bma_energy(radio, scenario, n_w):
    _check_active("n_w", n_w, scenario)
    return (bitmap_cap(radio, scenario, n_w) + bma_cfp(radio, scenario, n_w)) * scenario.n_frames


def eei_cfp(radio, scenario, n_active):
    m = scenario.n_monitoring
    return (n_active * radio.p_rx * radio.t_data + m * radio.p_rx * radio.t_data
            + n_active * radio.p_tx * radio.t_data)


def eei_bma_energy(radio, scenario, n_active):
    _check_active("n_active", n_active, scenario)
    return scenario.n_frames * (bitmap_cap(radio, scenario, n_active)
                                + eei_cfp(radio, scenario, n_active))


def full_report(radio, scenario, activation):
    """Evaluate all six protocol energies for one scenario point.

    TDMA/EA-TDMA use n = round(n_t); BMA uses ``scenario.bma_window`` if set,
    else ``n_w``; EEI best/true/poor use n_b/n_t/n_w.
    """
    slot_scenario = replace(scenario, n_event=round_half_up(activation.n_t))
    bma_n = activation.n_w if scenario.bma_window is None else scenario.bma_window
    e_true = eei_bma_energy(radio, scenario, activation.n_t)
    e_bma = bma_energy(radio, scenario, bma_n)
    return EnergyReport(
        e_tdma=tdma_energy(radio, slot_scenario),
        e_eatdma=eatdma_energy(radio, slot_scenario),
        e_bma=e_bma,
        e_eei_poor=eei_bma_energy(radio, scenario, activation.n_w),
        e_eei_true=e_true,
        e_eei_best=eei_bma_energy(radio, scenario, activation.n_b),
        eta_true=e_bma / e_true if e_true > 0 else math.nan,
        activation=activation,
        scenario=slot_scenario,
        radio=radio,
    )
