"""Epoch-trajectory dynamics: generalization gap, UI->CI migration, collapses, checkpoint choice.

Accuracies are stored as fractions; everything named ``*_gap`` or ``*_delta``
in this module is in percentage points, matching how training logs are read.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

from .datamodel import AnalysisConfig, CertaintyValidityMatrix, EpochSummary, Trajectory
from .quadrants import derive_metrics

_EPS = 1e-9


def epoch_gap(summary: EpochSummary) -> float:
    """Test minus train accuracy, in percentage points (positive = test ahead)."""
    return (summary.test_acc - summary.train_acc) * 100.0


@dataclass(frozen=True)
class SpikeVerdict:
    present: bool
    gap: float

    def __str__(self):
        return f"{'present' if self.present else 'absent'}({self.gap:+.2f})"


def platonic_spike(trajectory: Trajectory, config: AnalysisConfig = AnalysisConfig()) -> SpikeVerdict:
    """Is epoch 1 test accuracy ahead of train accuracy by at least ``spike_delta`` points?"""
    first = trajectory[0]
    if first.epoch != 1:
        raise ValueError("platonic_spike needs epoch 1 in the trajectory")
    gap = epoch_gap(first)
    return SpikeVerdict(gap >= config.spike_delta - _EPS, gap)


@dataclass(frozen=True)
class MigrationReport:
    from_epoch: int
    to_epoch: int
    delta_cc: int
    delta_ci: int
    delta_uc: int
    delta_ui: int
    delta_approp_uncert: Optional[float]
    delta_cvs: Optional[float]
    delta_accuracy: Optional[float]
    migration_flag: bool

    def as_dict(self) -> dict:
        return asdict(self)


def _diff(a: Optional[float], b: Optional[float]) -> Optional[float]:
    return None if a is None or b is None else b - a


def detect_migration(prev: EpochSummary, nxt: EpochSummary) -> MigrationReport:
    """Cellwise change between two epochs; flags errors moving from UI into CI."""
    if prev.matrix is None or nxt.matrix is None:
        missing = prev.epoch if prev.matrix is None else nxt.epoch
        raise ValueError(f"epoch {missing} has no certainty-validity matrix")
    a, b = prev.matrix, nxt.matrix
    ma, mb = derive_metrics(a), derive_metrics(b)
    d_ci, d_ui = b.ci - a.ci, b.ui - a.ui
    return MigrationReport(
        from_epoch=prev.epoch,
        to_epoch=nxt.epoch,
        delta_cc=b.cc - a.cc,
        delta_ci=d_ci,
        delta_uc=b.uc - a.uc,
        delta_ui=d_ui,
        delta_approp_uncert=_diff(ma.approp_uncert, mb.approp_uncert),
        delta_cvs=_diff(ma.cvs, mb.cvs),
        delta_accuracy=_diff(ma.accuracy, mb.accuracy),
        migration_flag=d_ui < 0 and d_ci > 0,
    )


def migrations(trajectory: Trajectory) -> list[MigrationReport]:
    """Reports for every consecutive pair of epochs that both carry matrices."""
    return [
        detect_migration(a, b)
        for a, b in zip(trajectory, trajectory[1:])
        if a.matrix is not None and b.matrix is not None
    ]


def benign_onset(trajectory: Trajectory, config: AnalysisConfig = AnalysisConfig()) -> Optional[int]:
    """First epoch where CVS drops while test accuracy holds (within ``accuracy_tolerance``)."""
    tol = config.accuracy_tolerance / 100.0
    for prev, cur in zip(trajectory, trajectory[1:]):
        if prev.cvs is None or cur.cvs is None:
            continue
        if cur.cvs < prev.cvs and cur.test_acc >= prev.test_acc - tol - _EPS:
            return cur.epoch
    return None


@dataclass(frozen=True)
class CollapseEvent:
    onset_epoch: int
    pre_collapse_acc: float
    depth: float
    duration: int
    recovered: bool
    # complete / partial / none, judged against the pre-collapse accuracy
    recovery: str

    def as_dict(self) -> dict:
        return asdict(self)


def detect_collapses(trajectory: Trajectory, config: AnalysisConfig = AnalysisConfig()) -> list[CollapseEvent]:
    """Find test-accuracy collapses of at least ``collapse_delta`` points.

    An event starts at an epoch whose test accuracy is ``collapse_delta`` below the
    previous epoch, and lasts while accuracy stays under that pre-collapse level
    minus ``collapse_delta`` (inclusive). Recovery is complete when the best accuracy before the
    next event (or the end) comes back within ``recovery_delta`` of the pre-collapse level.
    """
    acc = [s.test_acc for s in trajectory]
    delta = config.collapse_delta / 100.0
    spans = []  # (start index, end index exclusive, pre-collapse accuracy)
    i = 1
    while i < len(acc):
        if acc[i] <= acc[i - 1] - delta + _EPS:
            pre = acc[i - 1]
            j = i
            while j < len(acc) and acc[j] <= pre - delta + _EPS:
                j += 1
            spans.append((i, j, pre))
            i = max(j, i + 1)
        else:
            i += 1

    events = []
    for k, (start, end, pre) in enumerate(spans):
        window_end = spans[k + 1][0] if k + 1 < len(spans) else len(acc)
        recovered = end < len(acc)
        if not recovered:
            recovery = "none"
        elif max(acc[end:window_end]) >= pre - config.recovery_delta / 100.0 - _EPS:
            recovery = "complete"
        else:
            recovery = "partial"
        events.append(
            CollapseEvent(
                onset_epoch=trajectory[start].epoch,
                pre_collapse_acc=pre,
                depth=min(acc[start:end]),
                duration=end - start,
                recovered=recovered,
                recovery=recovery,
            )
        )
    return events


_RECOVERY_RANK = {"none": 0, "partial": 1, "complete": 2}


@dataclass(frozen=True)
class StabilityReport:
    epoch1_gap: float
    peak_test_acc: float
    peak_epoch: int
    collapses: tuple[CollapseEvent, ...]
    recovery: Optional[str]

    @property
    def collapse_depth(self) -> Optional[float]:
        """Depth of the first collapse, the one a stability summary usually quotes."""
        return self.collapses[0].depth if self.collapses else None

    @property
    def collapse_duration(self) -> Optional[int]:
        return self.collapses[0].duration if self.collapses else None

    def as_dict(self) -> dict:
        return {
            "epoch1_gap": self.epoch1_gap,
            "peak_test_acc": self.peak_test_acc,
            "peak_epoch": self.peak_epoch,
            "collapse_depth": self.collapse_depth,
            "collapse_duration": self.collapse_duration,
            "recovery": self.recovery,
            "collapses": [e.as_dict() for e in self.collapses],
        }


def stability_report(trajectory: Trajectory, config: AnalysisConfig = AnalysisConfig()) -> StabilityReport:
    peak = trajectory[0]
    for s in trajectory:
        if s.test_acc > peak.test_acc:
            peak = s
    events = tuple(detect_collapses(trajectory, config))
    recovery = min((e.recovery for e in events), key=_RECOVERY_RANK.__getitem__) if events else None
    return StabilityReport(
        epoch1_gap=epoch_gap(trajectory[0]),
        peak_test_acc=peak.test_acc,
        peak_epoch=peak.epoch,
        collapses=events,
        recovery=recovery,
    )


@dataclass(frozen=True)
class CheckpointPolicy:
    """``max-acc``, ``max-cvs`` or ``joint``; joint scores w*accuracy + (1-w)*cvs."""

    kind: str
    weight: float = 0.5

    def __post_init__(self):
        if self.kind not in ("max-acc", "max-cvs", "joint"):
            raise ValueError(f"unknown checkpoint policy {self.kind!r}")
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError("joint weight must lie in [0, 1]")

    @classmethod
    def max_accuracy(cls):
        return cls("max-acc")

    @classmethod
    def max_cvs(cls):
        return cls("max-cvs")

    @classmethod
    def joint(cls, weight: float):
        return cls("joint", weight)

    def score(self, summary: EpochSummary) -> float:
        if self.kind == "max-acc":
            return summary.test_acc
        if summary.cvs is None:
            raise ValueError(f"epoch {summary.epoch} has no CVS; policy {self.kind} needs it")
        if self.kind == "max-cvs":
            return summary.cvs
        return self.weight * summary.test_acc + (1.0 - self.weight) * summary.cvs


def select_checkpoint(trajectory: Trajectory, policy: CheckpointPolicy) -> int:
    """Epoch with the highest policy score; ties go to the earliest epoch."""
    best_epoch, best_score = None, None
    for s in trajectory:
        score = policy.score(s)
        if best_score is None or score > best_score:
            best_epoch, best_score = s.epoch, score
    return best_epoch


@dataclass(frozen=True)
class Discriminant:
    ui_share: Optional[float]
    verdict: str  # "H2-leaning" (ambiguity), "H1-leaning" (capacity) or "undefined"

    def as_dict(self) -> dict:
        return asdict(self)


def hypothesis_discriminant(matrix: CertaintyValidityMatrix) -> Discriminant:
    """Share of errors flagged uncertain. Mostly-UI errors point at data ambiguity (H2)
    rather than a capacity limit (H1)."""
    errors = matrix.ci + matrix.ui
    if errors == 0:
        return Discriminant(None, "undefined")
    share = matrix.ui / errors
    return Discriminant(share, "H2-leaning" if share > 0.5 else "H1-leaning")
