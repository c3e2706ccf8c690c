"""Certainty-Validity cell assignment and the metrics derived from the 2x2 matrix."""

from __future__ import annotations

import enum
from functools import reduce
from typing import Iterable, Optional

from .datamodel import (
    AnalysisConfig,
    CertaintyValidityMatrix,
    EpochSummary,
    MetricSet,
    PredictionRecord,
    Trajectory,
)

ZERO = CertaintyValidityMatrix(0, 0, 0, 0)


class Quadrant(enum.Enum):
    CC = "CC"  # confident, correct
    CI = "CI"  # confident, incorrect
    UC = "UC"  # uncertain, correct
    UI = "UI"  # uncertain, incorrect


def is_certain(record: PredictionRecord, threshold: float) -> bool:
    if record.committed is not None:
        return record.committed
    return record.confidence >= threshold


def classify_record(record: PredictionRecord, config: AnalysisConfig = AnalysisConfig()) -> Quadrant:
    certain = is_certain(record, config.certainty_threshold)
    valid = record.predicted == record.actual
    if certain:
        return Quadrant.CC if valid else Quadrant.CI
    return Quadrant.UC if valid else Quadrant.UI


def accumulate_matrix(
    records: Iterable[PredictionRecord], config: AnalysisConfig = AnalysisConfig()
) -> CertaintyValidityMatrix:
    counts = dict.fromkeys(Quadrant, 0)
    for record in records:
        counts[classify_record(record, config)] += 1
    return CertaintyValidityMatrix(
        counts[Quadrant.CC], counts[Quadrant.CI], counts[Quadrant.UC], counts[Quadrant.UI]
    )


def merge_matrices(a: CertaintyValidityMatrix, b: CertaintyValidityMatrix) -> CertaintyValidityMatrix:
    return CertaintyValidityMatrix(a.cc + b.cc, a.ci + b.ci, a.uc + b.uc, a.ui + b.ui)


def merge_all(matrices: Iterable[CertaintyValidityMatrix]) -> CertaintyValidityMatrix:
    return reduce(merge_matrices, matrices, ZERO)


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


def derive_metrics(matrix: CertaintyValidityMatrix) -> MetricSet:
    """Accuracy, CommitAcc, AppropUncert, Coverage, CVS and the CI/(CI+UI) ratio.

    Zero-denominator conventions: with no errors at all AppropUncert is 1.0 and
    the miscommunication ratio 0.0; with no commitments CommitAcc and CVS are
    undefined (``None``), never 0. An empty matrix leaves everything undefined.
    """
    total = matrix.total
    if total == 0:
        return MetricSet()
    errors = matrix.ci + matrix.ui
    commit_acc = _ratio(matrix.cc, matrix.cc + matrix.ci)
    if errors:
        approp = matrix.ui / errors
        miscomm = matrix.ci / errors
    else:
        approp, miscomm = 1.0, 0.0
    return MetricSet(
        accuracy=(matrix.cc + matrix.uc) / total,
        commit_acc=commit_acc,
        approp_uncert=approp,
        coverage=(matrix.cc + matrix.ci) / total,
        cvs=None if commit_acc is None else commit_acc * approp,
        miscommunication_ratio=miscomm,
    )


def with_metrics(trajectory: Trajectory) -> Trajectory:
    """Fill in metrics for every epoch that has a matrix but no metrics yet."""
    epochs = []
    for s in trajectory:
        if s.metrics is None and s.matrix is not None:
            s = EpochSummary(s.epoch, s.train_acc, s.test_acc, s.train_loss, s.matrix, derive_metrics(s.matrix))
        epochs.append(s)
    return Trajectory(tuple(epochs), trajectory.dataset_label)
