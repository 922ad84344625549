"""Event-probability-aware bitmap MAC (EEI-BMA) simulator and energy evaluator."""

from .config import RunConfig, SweepSpec, load_config
from .energy import (ActivationLevels, EnergyReport, RadioParams, ScenarioParams,
                     activation_levels, bma_energy, eatdma_energy, eei_bma_energy,
                     full_report, tdma_energy)
from .errors import ConfigError, EEIBMAError, StageError
from .experiment import comparative_summary, run_pipeline, run_sweep
from .predictor import (EvalReport, PredictorModel, TrainConfig, bce_loss, evaluate,
                        forward, gradient, init_model, train)
from .traffic import (Dataset, EventTrace, TrafficConfig, build_dataset, generate_trace,
                      split_dataset)

__version__ = "0.1.0"
