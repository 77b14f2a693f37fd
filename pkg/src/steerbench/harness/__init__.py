"""Experiment harness: configuration, training, paired evaluation, and
deterministic reporting."""

from .config import (
    AGENTS,
    ConfigError,
    ExperimentConfig,
    config_digest,
    config_from_dict,
    config_to_dict,
    load_config,
)
from .training import TrainingCurve, TrainResult, moving_average, train_agent
from .evaluation import EvalReport, evaluate_policy, rl_robust, report_row, report_dict, scenario_label
from .workflows import (
    LoadedAgent,
    checkpoint_path,
    compare_agents,
    evaluate_agent,
    load_checkpoint,
    policy_for,
    save_checkpoint,
    train_multi_seed,
)
from .reporting import (
    write_blob,
    read_blob,
    write_curves_csv,
    write_report_csv,
    write_report_json,
    write_timing,
    write_trajectory_svg,
)

__all__ = [
    "AGENTS",
    "ConfigError",
    "ExperimentConfig",
    "config_digest",
    "config_from_dict",
    "config_to_dict",
    "load_config",
    "TrainingCurve",
    "TrainResult",
    "moving_average",
    "train_agent",
    "EvalReport",
    "evaluate_policy",
    "rl_robust",
    "report_row",
    "report_dict",
    "scenario_label",
    "LoadedAgent",
    "checkpoint_path",
    "compare_agents",
    "evaluate_agent",
    "load_checkpoint",
    "policy_for",
    "save_checkpoint",
    "train_multi_seed",
    "write_blob",
    "read_blob",
    "write_curves_csv",
    "write_report_csv",
    "write_report_json",
    "write_timing",
    "write_trajectory_svg",
]
