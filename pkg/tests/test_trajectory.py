import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvskit.datamodel import AnalysisConfig, CertaintyValidityMatrix, EpochSummary, MetricSet, Trajectory
from cvskit.fixtures import load_fixture
from cvskit.quadrants import derive_metrics
from cvskit.trajectory import (
    CheckpointPolicy,
    benign_onset,
    detect_collapses,
    detect_migration,
    epoch_gap,
    hypothesis_discriminant,
    platonic_spike,
    select_checkpoint,
    stability_report,
)

from conftest import IMDB_METRICS, imdb_matrix


def flat(accs, cvs=None):
    cvs = cvs or [None] * len(accs)
    return Trajectory(tuple(
        EpochSummary(i + 1, a, a, metrics=None if c is None else MetricSet(cvs=c))
        for i, (a, c) in enumerate(zip(accs, cvs))
    ))


def with_test(accs):
    return Trajectory(tuple(EpochSummary(i + 1, 0.9, a) for i, a in enumerate(accs)))


class TestGapAndSpike:
    @pytest.mark.parametrize("train, test, gap", [(74.86, 82.11, 7.24), (78.22, 92.91, 14.69), (50.0, 50.0, 0.0)])
    def test_epoch_gap(self, train, test, gap):
        s = EpochSummary(1, train / 100, test / 100)
        assert epoch_gap(s) == pytest.approx(gap, abs=0.02)

    def test_spikes_on_fixtures(self):
        assert platonic_spike(load_fixture("imdb_filtered")).present
        verdict = platonic_spike(load_fixture("imdb_full"))
        assert not verdict.present
        assert verdict.gap == pytest.approx(-0.08, abs=1e-6)
        assert platonic_spike(load_fixture("fashion_clean")).gap == pytest.approx(14.69, abs=1e-6)
        assert platonic_spike(load_fixture("emnist_digits")).gap == pytest.approx(3.94, abs=1e-6)

    def test_flat(self):
        v = platonic_spike(flat([0.8, 0.85, 0.9]))
        assert not v.present and v.gap == 0

    def test_needs_epoch_one(self):
        traj = Trajectory((EpochSummary(2, 0.5, 0.6),))
        with pytest.raises(ValueError):
            platonic_spike(traj)


def summary(epoch, matrix):
    return EpochSummary(epoch, 0.5, 0.5, matrix=matrix, metrics=derive_metrics(matrix))


class TestMigration:
    def test_epoch1_to_2(self):
        r = detect_migration(summary(1, imdb_matrix(1)), summary(2, imdb_matrix(2)))
        assert (r.delta_cc, r.delta_ci, r.delta_uc, r.delta_ui) == (1286, 522, -1167, -641)
        assert r.delta_approp_uncert == pytest.approx(-0.1648, abs=5e-4)
        assert r.delta_cvs == pytest.approx(-0.1566, abs=5e-4)
        assert r.migration_flag

    def test_identical(self):
        s = summary(1, imdb_matrix(1))
        r = detect_migration(s, summary(2, imdb_matrix(1)))
        assert (r.delta_cc, r.delta_ci, r.delta_uc, r.delta_ui) == (0, 0, 0, 0)
        assert r.delta_cvs == 0 and not r.migration_flag

    def test_epoch4_to_5(self):
        r = detect_migration(summary(4, imdb_matrix(4)), summary(5, imdb_matrix(5)))
        # 1932 - 2077, 669 - 854
        assert (r.delta_ci, r.delta_ui) == (-145, -185)
        assert not r.migration_flag

    def test_missing_matrix(self):
        with pytest.raises(ValueError, match="epoch 2"):
            detect_migration(summary(1, imdb_matrix(1)), EpochSummary(2, 0.5, 0.5))

    @given(st.lists(st.integers(0, 1000), min_size=8, max_size=8))
    def test_antisymmetric(self, c):
        a, b = CertaintyValidityMatrix(*c[:4]), CertaintyValidityMatrix(*c[4:])
        fwd = detect_migration(summary(1, a), summary(2, b))
        bwd = detect_migration(summary(1, b), summary(2, a))
        for name in ("delta_cc", "delta_ci", "delta_uc", "delta_ui", "delta_approp_uncert", "delta_cvs", "delta_accuracy"):
            f, g = getattr(fwd, name), getattr(bwd, name)
            if f is None:
                assert g is None
            else:
                assert f == -g


class TestBenignOnset:
    def test_imdb(self, imdb_filtered):
        assert benign_onset(imdb_filtered) == 2

    def test_increasing_cvs(self):
        assert benign_onset(flat([0.8, 0.8, 0.8], [0.1, 0.2, 0.3])) is None

    def test_mnist(self, mnist_phase):
        assert benign_onset(mnist_phase) == 5

    def test_accuracy_drop_beyond_tolerance_is_not_benign(self):
        traj = Trajectory((
            EpochSummary(1, 0.8, 0.90, metrics=MetricSet(cvs=0.5)),
            EpochSummary(2, 0.8, 0.85, metrics=MetricSet(cvs=0.4)),
            EpochSummary(3, 0.8, 0.848, metrics=MetricSet(cvs=0.3)),
        ))
        assert benign_onset(traj) == 3

    @given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=2, max_size=10))
    def test_onset_is_a_cvs_drop(self, rows):
        traj = Trajectory(tuple(
            EpochSummary(i + 1, 0.5, a, metrics=MetricSet(cvs=c)) for i, (a, c) in enumerate(rows)
        ))
        onset = benign_onset(traj)
        if onset is not None:
            assert traj[onset - 1].cvs < traj[onset - 2].cvs


class TestCollapses:
    def test_filtered(self, imdb_filtered):
        events = detect_collapses(imdb_filtered)
        assert [e.onset_epoch for e in events] == [3, 7]
        assert [e.depth for e in events] == pytest.approx([0.6829, 0.6346])
        assert [e.duration for e in events] == [1, 1]
        assert all(e.recovered and e.recovery == "complete" for e in events)

    def test_drop_of_exactly_delta(self):
        (e,) = detect_collapses(with_test([0.1, 0.0]))
        assert (e.onset_epoch, e.depth, e.duration, e.recovery) == (2, 0.0, 1, "none")

    def test_full(self, imdb_full):
        (e,) = detect_collapses(imdb_full)
        assert (e.onset_epoch, e.duration) == (3, 2)
        assert e.depth == pytest.approx(0.5259)
        assert e.recovered and e.recovery == "partial"

    def test_monotone(self):
        assert detect_collapses(with_test([0.5, 0.6, 0.7, 0.8])) == []

    def test_unrecovered(self):
        (e,) = detect_collapses(with_test([0.8, 0.5, 0.55]))
        assert not e.recovered and e.recovery == "none" and e.duration == 2

    @given(st.lists(st.floats(0, 1), min_size=2, max_size=15))
    def test_events_ordered_and_disjoint(self, accs):
        traj = with_test(accs)
        cfg = AnalysisConfig()
        events = detect_collapses(traj, cfg)
        ends = []
        for e in events:
            assert e.duration >= 1
            assert e.depth <= e.pre_collapse_acc - cfg.collapse_delta / 100 + 1e-9
            ends.append((e.onset_epoch, e.onset_epoch + e.duration))
        for (s1, e1), (s2, _) in zip(ends, ends[1:]):
            assert e1 <= s2


class TestStability:
    def test_filtered(self, imdb_filtered):
        r = stability_report(imdb_filtered)
        assert r.epoch1_gap == pytest.approx(7.24, abs=0.02)
        assert (r.peak_test_acc, r.peak_epoch) == (pytest.approx(0.8703), 5)
        assert r.collapse_depth == pytest.approx(0.6829)
        assert r.collapse_duration == 1
        assert r.recovery == "complete"

    def test_full(self, imdb_full):
        r = stability_report(imdb_full)
        assert r.epoch1_gap == pytest.approx(-0.08, abs=0.02)
        assert (r.peak_test_acc, r.peak_epoch) == (pytest.approx(0.8497), 2)
        assert r.collapse_depth == pytest.approx(0.5259)
        assert r.collapse_duration == 2
        assert r.recovery == "partial"

    def test_single_epoch(self):
        r = stability_report(Trajectory((EpochSummary(1, 0.6, 0.7),)))
        assert r.epoch1_gap == pytest.approx(10.0)
        assert r.collapses == () and r.recovery is None


class TestSelect:
    def test_paradox(self, imdb_filtered):
        assert select_checkpoint(imdb_filtered, CheckpointPolicy.max_accuracy()) == 5
        assert select_checkpoint(imdb_filtered, CheckpointPolicy.max_cvs()) == 1
        assert select_checkpoint(imdb_filtered, CheckpointPolicy.joint(1.0)) == 5
        assert select_checkpoint(imdb_filtered, CheckpointPolicy.joint(0.0)) == 1

    def test_tie_goes_to_earliest(self):
        assert select_checkpoint(flat([0.8, 0.9, 0.9]), CheckpointPolicy.max_accuracy()) == 2

    def test_missing_cvs(self, imdb_full):
        with pytest.raises(ValueError, match="CVS"):
            select_checkpoint(imdb_full, CheckpointPolicy.max_cvs())

    def test_bad_policy(self):
        with pytest.raises(ValueError):
            CheckpointPolicy("best")
        with pytest.raises(ValueError):
            CheckpointPolicy.joint(1.5)

    @given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=10))
    def test_argmax(self, rows):
        traj = Trajectory(tuple(
            EpochSummary(i + 1, 0.5, a, metrics=MetricSet(cvs=c)) for i, (a, c) in enumerate(rows)
        ))
        e_acc = select_checkpoint(traj, CheckpointPolicy.max_accuracy())
        e_cvs = select_checkpoint(traj, CheckpointPolicy.max_cvs())
        assert all(traj.by_epoch(e_acc).test_acc >= s.test_acc for s in traj)
        assert all(traj.by_epoch(e_cvs).cvs >= s.cvs for s in traj)


class TestDiscriminant:
    def test_epochs(self):
        d1 = hypothesis_discriminant(imdb_matrix(1))
        assert d1.ui_share == pytest.approx(0.5801, abs=5e-5) and d1.verdict == "H2-leaning"
        d9 = hypothesis_discriminant(imdb_matrix(9))
        assert d9.ui_share == pytest.approx(0.1721, abs=5e-5) and d9.verdict == "H1-leaning"

    def test_boundary(self):
        d = hypothesis_discriminant(CertaintyValidityMatrix(1, 4, 1, 4))
        assert d.ui_share == 0.5 and d.verdict == "H1-leaning"

    def test_undefined(self):
        d = hypothesis_discriminant(CertaintyValidityMatrix(3, 0, 2, 0))
        assert d.ui_share is None and d.verdict == "undefined"


def test_full_pipeline_on_fixture(imdb_filtered):
    for s, (epoch, commit, approp, coverage, cvs) in zip(imdb_filtered, IMDB_METRICS):
        assert s.epoch == epoch
        assert s.metrics.cvs == pytest.approx(cvs, abs=5e-4)
        assert s.metrics.commit_acc == pytest.approx(commit, abs=5e-4)
    assert {e.onset_epoch for e in detect_collapses(imdb_filtered)} == {3, 7}
