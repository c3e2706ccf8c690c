"""Deployment routing: confident predictions are automated, uncertain ones go to review."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

from .datamodel import CertaintyValidityMatrix
from .quadrants import derive_metrics


@dataclass(frozen=True)
class RoutingReport:
    automated_count: int
    review_count: int
    automated_accuracy: Optional[float]
    review_fraction: float
    baseline_accuracy: float

    def as_dict(self) -> dict:
        return asdict(self)


def simulate_routing(matrix: CertaintyValidityMatrix) -> RoutingReport:
    # No post-review accuracy: what reviewers would get right is not modelled.
    if matrix.total == 0:
        raise ValueError("cannot route an empty matrix")
    metrics = derive_metrics(matrix)
    review = matrix.uc + matrix.ui
    return RoutingReport(
        automated_count=matrix.cc + matrix.ci,
        review_count=review,
        automated_accuracy=metrics.commit_acc,
        review_fraction=review / matrix.total,
        baseline_accuracy=metrics.accuracy,
    )
