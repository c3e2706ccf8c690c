"""Certainty-Validity diagnostics for classifier predictions and training trajectories."""

from .ceiling import CeilingModel, fit_clean_fraction, predicted_plateau
from .datamodel import (
    AnalysisConfig,
    CertaintyValidityMatrix,
    EpochSummary,
    LogParseError,
    MetricSet,
    PredictionRecord,
    Trajectory,
    parse_prediction_log,
    parse_trajectory_table,
    write_prediction_log,
    write_summary_table,
)
from .phase import (
    PhaseDiagram,
    PhasePoint,
    PlotStyle,
    Region,
    build_phase_diagram,
    build_phase_points,
    classify_region,
    excitability_threshold,
    export_phase_csv,
    render_phase_svg,
)
from .quadrants import Quadrant, accumulate_matrix, classify_record, derive_metrics, merge_matrices
from .routing import RoutingReport, simulate_routing
from .trajectory import (
    CheckpointPolicy,
    CollapseEvent,
    MigrationReport,
    StabilityReport,
    benign_onset,
    detect_collapses,
    detect_migration,
    epoch_gap,
    hypothesis_discriminant,
    platonic_spike,
    select_checkpoint,
    stability_report,
)

__all__ = [
    "CeilingModel",
    "fit_clean_fraction",
    "predicted_plateau",
    "AnalysisConfig",
    "CertaintyValidityMatrix",
    "EpochSummary",
    "LogParseError",
    "MetricSet",
    "PredictionRecord",
    "Trajectory",
    "parse_prediction_log",
    "parse_trajectory_table",
    "write_prediction_log",
    "write_summary_table",
    "PhaseDiagram",
    "PhasePoint",
    "PlotStyle",
    "Region",
    "build_phase_diagram",
    "build_phase_points",
    "classify_region",
    "excitability_threshold",
    "export_phase_csv",
    "render_phase_svg",
    "Quadrant",
    "accumulate_matrix",
    "classify_record",
    "derive_metrics",
    "merge_matrices",
    "RoutingReport",
    "simulate_routing",
    "CheckpointPolicy",
    "CollapseEvent",
    "MigrationReport",
    "StabilityReport",
    "benign_onset",
    "detect_collapses",
    "detect_migration",
    "epoch_gap",
    "hypothesis_discriminant",
    "platonic_spike",
    "select_checkpoint",
    "stability_report",
]

__version__ = "0.1.0"
