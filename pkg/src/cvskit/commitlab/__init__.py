"""Synthetic discrete-commitment laboratory."""

from .config import LabConfig, load_lab_config
from .data import SyntheticDataset, bayes_accuracy, make_dataset
from .experiment import (
    EpochResult,
    ExperimentResult,
    SweepRow,
    TrainingDiverged,
    plateau_accuracy,
    run_experiment,
    tau_sweep,
    train_epoch,
    write_sweep_table,
)
from .model import (
    ForwardResult,
    TernaryLayer,
    TernaryNet,
    forward,
    gumbel_softmax_select,
    loss_and_gradients,
    sample_gumbel,
)
from .optim import FractalBands, fractal_lr_bands

__all__ = [
    "LabConfig",
    "load_lab_config",
    "SyntheticDataset",
    "bayes_accuracy",
    "make_dataset",
    "EpochResult",
    "ExperimentResult",
    "SweepRow",
    "TrainingDiverged",
    "plateau_accuracy",
    "run_experiment",
    "tau_sweep",
    "train_epoch",
    "write_sweep_table",
    "ForwardResult",
    "TernaryLayer",
    "TernaryNet",
    "forward",
    "gumbel_softmax_select",
    "loss_and_gradients",
    "sample_gumbel",
    "FractalBands",
    "fractal_lr_bands",
]
