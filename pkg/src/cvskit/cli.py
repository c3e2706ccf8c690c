"""Command-line entry point: ``cvskit <subcommand> ...``.

Machine-readable results go to stdout, human-readable summaries to stderr.
Trajectory arguments accept a path or ``fixture:<name>`` for a bundled table.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import ceiling, fixtures
from .datamodel import (
    AnalysisConfig,
    LogParseError,
    load_prediction_log,
    parse_trajectory_table,
    read_text,
)
from .phase import PlotStyle, build_phase_diagram, export_phase_csv, render_phase_svg
from .quadrants import accumulate_matrix, derive_metrics
from .routing import simulate_routing
from .trajectory import (
    CheckpointPolicy,
    benign_onset,
    hypothesis_discriminant,
    migrations,
    platonic_spike,
    select_checkpoint,
    stability_report,
)


class CommandError(Exception):
    pass


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _load_trajectory(ref: str):
    if ref.startswith("fixture:"):
        name = ref.split(":", 1)[1]
        try:
            return fixtures.load_fixture(name)
        except KeyError as exc:
            raise CommandError(str(exc.args[0])) from None
    try:
        text = read_text(ref)
    except OSError as exc:
        raise CommandError(f"cannot read {ref}: {exc.strerror}") from None
    try:
        return parse_trajectory_table(text, Path(ref).stem)
    except LogParseError as exc:
        raise CommandError(f"{ref}: {exc}") from None


def _load_log(path: str):
    try:
        return load_prediction_log(path)
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc.strerror}") from None
    except LogParseError as exc:
        raise CommandError(f"{path}: {exc}") from None


def _write(path: str, text: str) -> None:
    try:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CommandError(f"cannot write {path}: {exc.strerror}") from None


def _analysis_config(args) -> AnalysisConfig:
    kwargs = {}
    for name in ("certainty_threshold", "spike_delta", "collapse_delta", "accuracy_tolerance", "recovery_delta"):
        value = getattr(args, name, None)
        if value is not None:
            kwargs[name] = value
    try:
        return AnalysisConfig(**kwargs)
    except ValueError as exc:
        raise CommandError(str(exc)) from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_matrix(args) -> None:
    records = _load_log(args.log)
    matrix = accumulate_matrix(records, _analysis_config(args))
    metrics = derive_metrics(matrix)
    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        row = {**matrix.as_dict(), **metrics.as_dict()}
        writer.writerow(row.keys())
        writer.writerow("" if v is None else v for v in row.values())
        sys.stdout.write(buf.getvalue())
    else:
        _emit_json({"matrix": matrix.as_dict(), "metrics": metrics.as_dict()})
    cvs = "undefined" if metrics.cvs is None else f"{metrics.cvs:.4f}"
    _note(f"{matrix.total} records: CC={matrix.cc} CI={matrix.ci} UC={matrix.uc} UI={matrix.ui}, CVS {cvs}")


def cmd_trajectory(args) -> None:
    traj = _load_trajectory(args.csv)
    config = _analysis_config(args)
    report = stability_report(traj, config)
    try:
        spike = platonic_spike(traj, config)
        spike_obj = {"present": spike.present, "gap": spike.gap}
    except ValueError:
        spike_obj = None
    result = {
        "dataset": traj.dataset_label,
        "stability": report.as_dict(),
        "platonic_spike": spike_obj,
        "migrations": [m.as_dict() for m in migrations(traj)],
        "benign_onset": benign_onset(traj, config),
        "discriminant": [
            {"epoch": s.epoch, **hypothesis_discriminant(s.matrix).as_dict()}
            for s in traj
            if s.matrix is not None
        ],
    }
    _emit_json(result)
    _note(
        f"{traj.dataset_label}: peak {report.peak_test_acc * 100:.2f}% at epoch {report.peak_epoch}, "
        f"{len(report.collapses)} collapse(s), benign onset {result['benign_onset']}"
    )


def cmd_select(args) -> None:
    traj = _load_trajectory(args.csv)
    try:
        policy = CheckpointPolicy(args.policy, args.weight)
        epoch = select_checkpoint(traj, policy)
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    print(epoch)


def cmd_route(args) -> None:
    records = _load_log(args.log)
    matrix = accumulate_matrix(records, _analysis_config(args))
    try:
        report = simulate_routing(matrix)
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    _emit_json(report.as_dict())
    _note(f"{report.review_count} of {matrix.total} predictions routed to review")


def cmd_ceiling(args) -> None:
    try:
        if args.fit:
            if args.plateau is None:
                raise CommandError("--fit needs --plateau")
            value = ceiling.fit_clean_fraction(args.plateau, args.clean_acc, args.chance)
        else:
            if args.p_clean is None:
                raise CommandError("need --p-clean (or --fit --plateau)")
            value = ceiling.predicted_plateau(ceiling.CeilingModel(args.p_clean, args.chance, args.clean_acc))
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    print(f"{value:.4f}")


def cmd_phase(args) -> None:
    traj = _load_trajectory(args.csv)
    try:
        diagram = build_phase_diagram(traj, _analysis_config(args))
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    style = PlotStyle(
        x_range=tuple(args.x_range) if args.x_range else None,
        y_range=tuple(args.y_range) if args.y_range else None,
    )
    _write(args.svg, render_phase_svg(diagram, style))
    if args.points:
        _write(args.points, export_phase_csv(diagram))
    counts = ", ".join(f"{r.value}={n}" for r, n in diagram.region_counts().items())
    _note(f"{len(diagram.points)} points, threshold {diagram.excitability_threshold:.4f}; {counts}")


def _lab_config(path: str):
    from .commitlab import load_lab_config

    try:
        return load_lab_config(path)
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc.strerror}") from None
    except (ValueError, TypeError) as exc:
        raise CommandError(f"{path}: {exc}") from None


def cmd_lab_run(args) -> None:
    from .commitlab import TrainingDiverged, run_experiment

    config = _lab_config(args.config)
    try:
        result = run_experiment(config, out_dir=args.out)
    except TrainingDiverged as exc:
        raise CommandError(str(exc)) from None
    except OSError as exc:
        raise CommandError(f"cannot write to {args.out}: {exc.strerror}") from None
    if result.trajectory is not None:
        last = result.trajectory[-1]
        _note(f"{len(result.trajectory)} epochs; final test accuracy {last.test_acc:.4f}, CVS {last.cvs}")
    print(str(Path(args.out) / "trajectory.csv"))


def cmd_lab_sweep(args) -> None:
    from .commitlab import TrainingDiverged, tau_sweep, write_sweep_table

    config = _lab_config(args.config)
    try:
        taus = [float(t) for t in args.taus.split(",") if t.strip()]
    except ValueError:
        raise CommandError(f"bad --taus list {args.taus!r}") from None
    try:
        rows = tau_sweep(config, taus, jobs=args.jobs)
    except (TrainingDiverged, ValueError) as exc:
        raise CommandError(str(exc)) from None
    out = Path(args.out) / "sweep.csv"
    _write(str(out), write_sweep_table(rows))
    print(str(out))


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvskit", description="Certainty-Validity diagnostics")
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    p = sub.add_parser("matrix", help="certainty-validity matrix and metrics of a prediction log")
    p.add_argument("--log", required=True)
    p.add_argument("--threshold", dest="certainty_threshold", type=float, default=0.7)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output (default)")
    fmt.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("trajectory", help="stability, migration and onset analysis of a trajectory CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--spike-delta", type=float, default=2.0)
    p.add_argument("--collapse-delta", type=float, default=10.0)
    p.add_argument("--accuracy-tolerance", type=float, default=0.5)
    p.add_argument("--recovery-delta", type=float, default=2.0)
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("select", help="choose a checkpoint epoch")
    p.add_argument("--csv", required=True)
    p.add_argument("--policy", choices=["max-acc", "max-cvs", "joint"], default="max-cvs")
    p.add_argument("--weight", type=float, default=0.5, help="accuracy weight for --policy joint")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("route", help="human-review routing report for a prediction log")
    p.add_argument("--log", required=True)
    p.add_argument("--threshold", dest="certainty_threshold", type=float, default=0.7)
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("ceiling", help="ambiguity-ceiling plateau, or the clean fraction behind one")
    p.add_argument("--p-clean", type=float)
    p.add_argument("--chance", type=float, required=True)
    p.add_argument("--clean-acc", type=float, default=1.0)
    p.add_argument("--fit", action="store_true")
    p.add_argument("--plateau", type=float)
    p.set_defaults(func=cmd_ceiling)

    p = sub.add_parser("phase", help="excitability phase diagram as SVG (+ CSV)")
    p.add_argument("--csv", required=True)
    p.add_argument("--svg", required=True)
    p.add_argument("--points")
    p.add_argument("--spike-delta", type=float, default=2.0)
    p.add_argument("--x-range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--y-range", type=float, nargs=2, metavar=("LO", "HI"))
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("lab-run", help="run a synthetic commitment experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lab_run)

    p = sub.add_parser("lab-sweep", help="Gumbel temperature sweep of a lab experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--taus", required=True, help="comma-separated temperatures")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_lab_sweep)
    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CommandError as exc:
        print(f"cvskit {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    try:
        return dispatch(argv)
    except SystemExit as exc:  # argparse usage errors
        return exc.code if isinstance(exc.code, int) else 2


if __name__ == "__main__":
    sys.exit(main())
