"""Desk-scale experiment lab: synthetic tasks, exact-gradient trainer, pipeline."""
from .data import (
    Split,
    SyntheticTaskSpec,
    TaskDataset,
    default_cluster_means,
    generate_dataset,
)
from .model import (
    GradCheckReport,
    Head,
    MultiHeadModel,
    forward,
    grad_check,
    init_model,
    loss_and_grads,
    loss_value,
    params_equal,
    predict,
    sgd_step,
)
from .pipeline import (
    ExperimentConfig,
    PipelineReport,
    config_from_dict,
    load_config,
    run_pipeline,
)
from .rng import derive_seed, stream
from .train import TrainResult, evaluate, second_stage, train

__all__ = [
    "Split",
    "SyntheticTaskSpec",
    "TaskDataset",
    "default_cluster_means",
    "generate_dataset",
    "GradCheckReport",
    "Head",
    "MultiHeadModel",
    "forward",
    "grad_check",
    "init_model",
    "loss_and_grads",
    "loss_value",
    "params_equal",
    "predict",
    "sgd_step",
    "ExperimentConfig",
    "PipelineReport",
    "config_from_dict",
    "load_config",
    "run_pipeline",
    "derive_seed",
    "stream",
    "TrainResult",
    "evaluate",
    "second_stage",
    "train",
]
