"""Shared value types and the on-disk formats (JSONL prediction logs, CSV trajectories)."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional


class LogParseError(ValueError):
    """Malformed prediction log or trajectory table. Carries the 1-based line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"{message}, line {line}" if line is not None else message)


@dataclass(frozen=True)
class PredictionRecord:
    sample_id: str
    predicted: int
    actual: int
    confidence: float
    committed: Optional[bool] = None

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        if self.predicted < 0 or self.actual < 0:
            raise ValueError("class indices must be non-negative")

    def check_classes(self, n_classes: int) -> None:
        if self.predicted >= n_classes or self.actual >= n_classes:
            raise ValueError(
                f"record {self.sample_id!r}: class index outside 0..{n_classes - 1}"
            )


@dataclass(frozen=True)
class CertaintyValidityMatrix:
    """Counts of the four certainty x validity cells."""

    cc: int = 0
    ci: int = 0
    uc: int = 0
    ui: int = 0

    def __post_init__(self):
        for name in ("cc", "ci", "uc", "ui"):
            value = getattr(self, name)
            if value < 0:
                raise ValueError(f"negative count {name}={value}")

    @property
    def total(self) -> int:
        return self.cc + self.ci + self.uc + self.ui

    def as_dict(self) -> dict:
        return {"cc": self.cc, "ci": self.ci, "uc": self.uc, "ui": self.ui, "total": self.total}


@dataclass(frozen=True)
class MetricSet:
    """Derived scalar metrics. ``None`` marks a metric that is undefined for the matrix."""

    accuracy: Optional[float] = None
    commit_acc: Optional[float] = None
    approp_uncert: Optional[float] = None
    coverage: Optional[float] = None
    cvs: Optional[float] = None
    miscommunication_ratio: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "commit_acc": self.commit_acc,
            "approp_uncert": self.approp_uncert,
            "coverage": self.coverage,
            "cvs": self.cvs,
            "miscommunication_ratio": self.miscommunication_ratio,
        }


@dataclass(frozen=True)
class EpochSummary:
    epoch: int
    train_acc: float
    test_acc: float
    train_loss: Optional[float] = None
    matrix: Optional[CertaintyValidityMatrix] = None
    metrics: Optional[MetricSet] = None

    def __post_init__(self):
        if self.epoch < 1:
            raise ValueError(f"epoch must be positive, got {self.epoch}")
        for name in ("train_acc", "test_acc"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} outside [0, 1]")
        if self.train_loss is not None and self.train_loss < 0:
            raise ValueError("train_loss must be non-negative")

    @property
    def cvs(self) -> Optional[float]:
        return None if self.metrics is None else self.metrics.cvs


@dataclass(frozen=True)
class Trajectory:
    epochs: tuple[EpochSummary, ...]
    dataset_label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "epochs", tuple(self.epochs))
        if not self.epochs:
            raise ValueError("trajectory must contain at least one epoch")
        for prev, nxt in zip(self.epochs, self.epochs[1:]):
            if nxt.epoch <= prev.epoch:
                raise ValueError(
                    f"epoch indices must be strictly increasing ({prev.epoch} then {nxt.epoch})"
                )

    def __len__(self) -> int:
        return len(self.epochs)

    def __iter__(self):
        return iter(self.epochs)

    def __getitem__(self, i):
        return self.epochs[i]

    def by_epoch(self, epoch: int) -> EpochSummary:
        for summary in self.epochs:
            if summary.epoch == epoch:
                return summary
        raise KeyError(epoch)


@dataclass(frozen=True)
class AnalysisConfig:
    """Thresholds for the analyses. Deltas and tolerances are in percentage points."""

    certainty_threshold: float = 0.7
    spike_delta: float = 2.0
    collapse_delta: float = 10.0
    accuracy_tolerance: float = 0.5
    # how close post-collapse accuracy must come back to the pre-collapse level to count as complete
    recovery_delta: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.certainty_threshold < 1.0:
            raise ValueError("certainty_threshold must lie in (0, 1)")
        for name in ("spike_delta", "collapse_delta", "accuracy_tolerance", "recovery_delta"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


# ---------------------------------------------------------------------------
# Prediction logs (JSONL)

_LOG_KEYS = {"id", "pred", "true", "conf"}
_LOG_OPTIONAL = {"committed"}


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def parse_prediction_log(lines: Iterable[str]) -> list[PredictionRecord]:
    """Parse line-delimited JSON prediction records; blank lines are skipped."""
    records = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LogParseError(f"malformed JSON ({exc.msg})", lineno) from None
        if not isinstance(obj, dict):
            raise LogParseError("expected a JSON object", lineno)
        missing = _LOG_KEYS - obj.keys()
        if missing:
            raise LogParseError(f"missing key {sorted(missing)[0]!r}", lineno)
        unknown = obj.keys() - _LOG_KEYS - _LOG_OPTIONAL
        if unknown:
            raise LogParseError(f"unknown key {sorted(unknown)[0]!r}", lineno)

        sample_id, pred, true, conf = obj["id"], obj["pred"], obj["true"], obj["conf"]
        committed = obj.get("committed")
        if not isinstance(sample_id, str):
            raise LogParseError("id must be a string", lineno)
        if not (_is_int(pred) and _is_int(true)) or pred < 0 or true < 0:
            raise LogParseError("pred/true must be non-negative integers", lineno)
        if isinstance(conf, bool) or not isinstance(conf, (int, float)):
            raise LogParseError("conf must be a number", lineno)
        if not 0.0 <= conf <= 1.0:
            raise LogParseError("conf out of range", lineno)
        if committed is not None and not isinstance(committed, bool):
            raise LogParseError("committed must be a boolean", lineno)
        records.append(PredictionRecord(sample_id, pred, true, float(conf), committed))
    return records


def write_prediction_log(records: Iterable[PredictionRecord]) -> str:
    out = []
    for r in records:
        obj = {"id": r.sample_id, "pred": r.predicted, "true": r.actual, "conf": r.confidence}
        if r.committed is not None:
            obj["committed"] = r.committed
        out.append(json.dumps(obj, separators=(",", ":")))
    return "".join(line + "\n" for line in out)


# ---------------------------------------------------------------------------
# Trajectory tables (CSV)

TRAJECTORY_HEADER = ["epoch", "train_acc", "test_acc", "train_loss", "cc", "ci", "uc", "ui"]
DERIVED_HEADER = ["accuracy", "commit_acc", "approp_uncert", "coverage", "cvs"]
SUMMARY_HEADER = TRAJECTORY_HEADER + DERIVED_HEADER


def _fraction(text: str) -> float:
    value = float(text)
    # training logs often use percents; anything above 1 is read as one
    return value / 100.0 if value > 1.0 else value


def _optional_float(text: str) -> Optional[float]:
    text = text.strip()
    return None if text == "" else float(text)


def parse_trajectory_table(stream, dataset_label: str = "") -> Trajectory:
    """Read a trajectory CSV (``TRAJECTORY_HEADER``, optionally followed by derived columns).

    When a row has matrix counts, metrics are recomputed from them; a row without
    counts may instead carry derived columns (e.g. only ``cvs``), which are taken as given.
    """
    from .quadrants import derive_metrics

    text = stream if isinstance(stream, str) else stream.read()
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise LogParseError("empty trajectory table") from None
    if header[: len(TRAJECTORY_HEADER)] != TRAJECTORY_HEADER:
        raise LogParseError(f"bad header, expected {','.join(TRAJECTORY_HEADER)}", 1)
    extra = header[len(TRAJECTORY_HEADER):]
    if any(col not in DERIVED_HEADER for col in extra):
        raise LogParseError(f"unexpected columns {extra}", 1)

    summaries: list[EpochSummary] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise LogParseError(f"expected {len(header)} fields, got {len(row)}", lineno)
        cells = dict(zip(header, (c.strip() for c in row)))
        try:
            epoch = int(cells["epoch"])
            train_acc = _fraction(cells["train_acc"])
            test_acc = _fraction(cells["test_acc"])
            loss = _optional_float(cells["train_loss"])
            counts = [cells[k] for k in ("cc", "ci", "uc", "ui")]
        except ValueError as exc:
            raise LogParseError(f"bad value ({exc})", lineno) from None

        if summaries and epoch <= summaries[-1].epoch:
            kind = "duplicate" if epoch == summaries[-1].epoch else "decreasing"
            raise LogParseError(f"{kind} epoch index {epoch}", lineno)

        matrix = None
        if any(counts):
            if not all(counts):
                raise LogParseError("matrix columns must be all present or all blank", lineno)
            try:
                values = [int(c) for c in counts]
            except ValueError:
                raise LogParseError("matrix counts must be integers", lineno) from None
            if min(values) < 0:
                raise LogParseError("negative count", lineno)
            matrix = CertaintyValidityMatrix(*values)

        if matrix is not None:
            metrics = derive_metrics(matrix)
        elif any(cells.get(k) for k in extra):
            metrics = MetricSet(**{k: _optional_float(cells[k]) for k in extra})
        else:
            metrics = None

        try:
            summaries.append(EpochSummary(epoch, train_acc, test_acc, loss, matrix, metrics))
        except ValueError as exc:
            raise LogParseError(str(exc), lineno) from None

    if not summaries:
        raise LogParseError("trajectory table has no data rows")
    return Trajectory(tuple(summaries), dataset_label)


def _fmt(value: Optional[float], digits: Optional[int] = None) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    if digits is None:
        return repr(float(value))
    return f"{value:.{digits}f}"


def write_summary_table(trajectory: Trajectory, digits: int = 6) -> str:
    """Write a trajectory with derived metric columns appended.

    Accuracies and losses are written at full precision so the table round-trips;
    derived columns are rounded to ``digits`` decimals.
    """
    from .quadrants import derive_metrics

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_HEADER)
    for s in trajectory:
        metrics = s.metrics
        if metrics is None and s.matrix is not None:
            metrics = derive_metrics(s.matrix)
        m = s.matrix
        row = [
            str(s.epoch),
            _fmt(s.train_acc),
            _fmt(s.test_acc),
            _fmt(s.train_loss),
            *(["", "", "", ""] if m is None else [str(m.cc), str(m.ci), str(m.uc), str(m.ui)]),
        ]
        if metrics is None:
            row += [""] * len(DERIVED_HEADER)
        else:
            row += [_fmt(getattr(metrics, k), digits) for k in DERIVED_HEADER]
        writer.writerow(row)
    return buf.getvalue()


def read_text(path) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def load_trajectory(path, dataset_label: Optional[str] = None) -> Trajectory:
    from pathlib import Path

    p = Path(path)
    return parse_trajectory_table(read_text(p), dataset_label if dataset_label is not None else p.stem)


def load_prediction_log(path) -> list[PredictionRecord]:
    with open(path, encoding="utf-8") as fh:
        return parse_prediction_log(fh)

