"""Bundled reference trajectories (see NOTES.md)."""

from importlib import resources

from ..datamodel import Trajectory, parse_trajectory_table

NAMES = ("imdb_filtered", "imdb_full", "fashion_clean", "emnist_digits", "mnist_phase")


def fixture_text(name: str) -> str:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(NAMES)}")
    return resources.files(__name__).joinpath(f"{name}.csv").read_text(encoding="utf-8")


def load_fixture(name: str) -> Trajectory:
    return parse_trajectory_table(fixture_text(name), name)
