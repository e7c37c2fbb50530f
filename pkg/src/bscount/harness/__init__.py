"""Experiment orchestration: configs, seeded trials, record streams and replayable fixtures."""

from .config import ConfigError, ExperimentConfig, from_dict
from .experiments import accumulation_sweep
from .runner import RunRecord, replay, run

__all__ = ["ConfigError", "ExperimentConfig", "RunRecord", "accumulation_sweep", "from_dict", "replay", "run"]
