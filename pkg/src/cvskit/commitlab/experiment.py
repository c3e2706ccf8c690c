"""Training loop, per-epoch evaluation and temperature sweeps for the lab model."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..datamodel import (
    AnalysisConfig,
    EpochSummary,
    PredictionRecord,
    Trajectory,
    write_prediction_log,
    write_summary_table,
)
from ..quadrants import accumulate_matrix, derive_metrics
from .config import LabConfig
from .data import SyntheticDataset, make_dataset
from .model import TernaryNet, forward, loss_and_gradients, sample_gumbel
from .optim import FractalBands, fractal_lr_bands


class TrainingDiverged(FloatingPointError):
    pass


@dataclass
class EpochResult:
    model: TernaryNet
    train_acc: float
    mean_loss: float


def train_epoch(
    model: TernaryNet,
    dataset: SyntheticDataset,
    bands: FractalBands,
    tau: float,
    seed,
    batch_size: int = 32,
) -> EpochResult:
    """One pass of minibatch gradient descent on soft-mode cross-entropy.

    Each minibatch draws fresh Gumbel noise per connection. ``train_acc`` is the
    running hard-mode accuracy of each minibatch just before its update, and
    ``mean_loss`` the running soft-mode loss, as a training log would report
    them. The input model is left untouched.
    """
    rng = np.random.default_rng(seed)
    model = model.copy()
    n = len(dataset)
    order = rng.permutation(n)
    correct = 0
    loss_sum = 0.0
    for start in range(0, n, batch_size):
        idx = order[start:start + batch_size]
        xb, yb = dataset.x[idx], dataset.y[idx]
        correct += int((forward(model, xb, tau, "hard").predicted == yb).sum())
        noise = [sample_gumbel(rng, layer.logits.shape) for layer in model.layers]
        loss, grads, _ = loss_and_gradients(model, xb, yb, tau, noise)
        if not np.isfinite(loss) or not all(np.all(np.isfinite(g)) for g in grads):
            raise TrainingDiverged(
                f"non-finite loss {loss} at sample offset {start} (tau={tau}); lower the learning rate"
            )
        for layer, grad in zip(model.layers, grads):
            layer.logits -= bands.rate(layer.band) * grad
        loss_sum += loss * len(idx)
    return EpochResult(model, correct / n, loss_sum / n)


def predict_records(
    model: TernaryNet, dataset: SyntheticDataset, config: LabConfig, prefix: str = "test"
) -> list[PredictionRecord]:
    """Hard-mode predictions as log records; the explicit commitment flag is only
    written when a structural ``zero_cap`` is in use."""
    out = forward(model, dataset.x, config.tau, "hard", threshold=config.threshold, zero_cap=config.zero_cap)
    predicted = out.predicted
    records = []
    for i in range(len(dataset)):
        records.append(
            PredictionRecord(
                sample_id=f"{prefix}-{i}",
                predicted=int(predicted[i]),
                actual=int(dataset.y[i]),
                confidence=float(out.confidence[i]),
                committed=bool(out.committed[i]) if config.zero_cap is not None else None,
            )
        )
    return records


@dataclass
class ExperimentResult:
    config: LabConfig
    trajectory: Optional[Trajectory]  # None when epochs == 0
    logs: list[list[PredictionRecord]]
    model: TernaryNet

    @property
    def summaries(self) -> tuple[EpochSummary, ...]:
        return () if self.trajectory is None else self.trajectory.epochs


def label_for(config: LabConfig) -> str:
    return (
        f"lab rho={config.ambiguity_fraction:g} c={config.ambiguous_signal:g} "
        f"tau={config.tau:g} seed={config.seed}"
    )


def run_experiment(config: LabConfig, out_dir=None) -> ExperimentResult:
    """Train for ``config.epochs``; after each epoch evaluate hard mode on the test split.

    With ``out_dir`` set, writes ``predictions/epoch_NNN.jsonl`` per epoch and
    ``trajectory.csv`` (summary format) at the end.
    """
    train, test = make_dataset(config)
    model = TernaryNet.initialize(
        np.random.default_rng([config.seed, 1]),
        [config.n_features, config.hidden_width, 2],
        config.weight_magnitude,
        config.logit_init_std,
    )
    bands = fractal_lr_bands(config.base_lr, config.batch_size)
    analysis = AnalysisConfig(certainty_threshold=config.threshold)

    summaries, logs = [], []
    for epoch in range(1, config.epochs + 1):
        step = train_epoch(model, train, bands, config.tau, [config.seed, 2, epoch], config.batch_size)
        model = step.model
        records = predict_records(model, test, config)
        matrix = accumulate_matrix(records, analysis)
        metrics = derive_metrics(matrix)
        summaries.append(
            EpochSummary(epoch, step.train_acc, metrics.accuracy, step.mean_loss, matrix, metrics)
        )
        logs.append(records)

    trajectory = Trajectory(tuple(summaries), label_for(config)) if summaries else None
    if out_dir is not None:
        write_experiment(out_dir, trajectory, logs)
    return ExperimentResult(config, trajectory, logs, model)


def write_experiment(out_dir, trajectory: Optional[Trajectory], logs) -> None:
    out = Path(out_dir)
    (out / "predictions").mkdir(parents=True, exist_ok=True)
    for epoch, records in enumerate(logs, start=1):
        (out / "predictions" / f"epoch_{epoch:03d}.jsonl").write_text(write_prediction_log(records), encoding="utf-8")
    if trajectory is not None:
        text = write_summary_table(trajectory)
    else:
        text = ",".join(["epoch", "train_acc", "test_acc", "train_loss", "cc", "ci", "uc", "ui"]) + "\n"
    (out / "trajectory.csv").write_text(text, encoding="utf-8")


def plateau_accuracy(trajectory: Trajectory, window: int = 10) -> float:
    """Mean test accuracy over the last ``window`` epochs."""
    tail = trajectory.epochs[-window:]
    return sum(s.test_acc for s in tail) / len(tail)


@dataclass(frozen=True)
class SweepRow:
    tau: float
    accuracy: float  # best test accuracy over epochs
    accuracy_epoch: int
    cvs: Optional[float]  # best CVS over epochs
    cvs_epoch: Optional[int]

    def as_dict(self) -> dict:
        return {
            "tau": self.tau,
            "accuracy": self.accuracy,
            "accuracy_epoch": self.accuracy_epoch,
            "cvs": self.cvs,
            "cvs_epoch": self.cvs_epoch,
        }


def _sweep_one(config: LabConfig) -> SweepRow:
    traj = run_experiment(config).trajectory
    if traj is None:
        raise ValueError("tau sweep needs at least one epoch")
    best_acc = max(traj, key=lambda s: s.test_acc)
    with_cvs = [s for s in traj if s.cvs is not None]
    best_cvs = max(with_cvs, key=lambda s: s.cvs) if with_cvs else None
    return SweepRow(
        tau=config.tau,
        accuracy=best_acc.test_acc,
        accuracy_epoch=best_acc.epoch,
        cvs=None if best_cvs is None else best_cvs.cvs,
        cvs_epoch=None if best_cvs is None else best_cvs.epoch,
    )


def tau_sweep(config: LabConfig, taus: Sequence[float], jobs: int = 1) -> list[SweepRow]:
    """One run per temperature, all with the config's seed. ``max`` over epochs
    is used for both accuracy and CVS, as a checkpoint-selection view."""
    for tau in taus:
        if tau <= 0:
            raise ValueError(f"tau must be positive, got {tau}")
    configs = [replace(config, tau=float(t)) for t in taus]
    if jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(configs), os.cpu_count() or 1)) as pool:
            return list(pool.map(_sweep_one, configs))
    return [_sweep_one(c) for c in configs]


def write_sweep_table(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["tau", "accuracy", "accuracy_epoch", "cvs", "cvs_epoch"])
    for r in rows:
        writer.writerow([
            repr(r.tau),
            f"{r.accuracy:.6f}",
            r.accuracy_epoch,
            "" if r.cvs is None else f"{r.cvs:.6f}",
            "" if r.cvs_epoch is None else r.cvs_epoch,
        ])
    return buf.getvalue()
