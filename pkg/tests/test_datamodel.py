import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvskit.datamodel import (
    CertaintyValidityMatrix,
    EpochSummary,
    LogParseError,
    PredictionRecord,
    Trajectory,
    parse_prediction_log,
    parse_trajectory_table,
    write_prediction_log,
    write_summary_table,
)
from cvskit.fixtures import fixture_text

from conftest import IMDB_COUNTS


class TestPredictionLog:
    def test_single_record(self):
        (rec,) = parse_prediction_log(['{"id":"a","pred":1,"true":1,"conf":0.9}'])
        assert rec == PredictionRecord("a", 1, 1, 0.9, None)

    def test_conf_out_of_range_names_line(self):
        with pytest.raises(LogParseError, match="conf out of range, line 1"):
            parse_prediction_log(['{"id":"b","pred":0,"true":1,"conf":1.5}'])

    def test_empty_stream(self):
        assert parse_prediction_log([]) == []
        assert parse_prediction_log(io.StringIO("")) == []

    def test_committed_flag_and_blank_lines(self):
        text = '\n{"id":"a","pred":0,"true":0,"conf":0.1,"committed":true}\n\n{"id":"b","pred":1,"true":0,"conf":1}\n'
        recs = parse_prediction_log(io.StringIO(text))
        assert [r.sample_id for r in recs] == ["a", "b"]
        assert recs[0].committed is True
        assert recs[1].confidence == 1.0

    @pytest.mark.parametrize(
        "line, message",
        [
            ("{not json", "malformed JSON"),
            ('{"id":"a","pred":1,"conf":0.5}', "missing key 'true'"),
            ('{"id":"a","pred":1,"true":0,"conf":0.5,"extra":1}', "unknown key"),
            ('{"id":1,"pred":1,"true":0,"conf":0.5}', "id must be a string"),
            ('{"id":"a","pred":-1,"true":0,"conf":0.5}', "non-negative"),
            ('{"id":"a","pred":1.5,"true":0,"conf":0.5}', "non-negative integers"),
            ('{"id":"a","pred":1,"true":0,"conf":"high"}', "conf must be a number"),
            ('{"id":"a","pred":1,"true":0,"conf":0.5,"committed":"yes"}', "boolean"),
            ("[1,2]", "JSON object"),
        ],
    )
    def test_errors(self, line, message):
        with pytest.raises(LogParseError, match=message):
            parse_prediction_log(['{"id":"ok","pred":0,"true":0,"conf":0.5}', line])
        try:
            parse_prediction_log(['{"id":"ok","pred":0,"true":0,"conf":0.5}', line])
        except LogParseError as exc:
            assert exc.line == 2

    @given(
        st.lists(
            st.tuples(
                st.text(max_size=8),
                st.integers(0, 9),
                st.integers(0, 9),
                st.floats(0, 1),
                st.sampled_from([None, True, False]),
            ),
            max_size=30,
        )
    )
    def test_write_parse_round_trip(self, rows):
        records = [PredictionRecord(*r) for r in rows]
        assert parse_prediction_log(io.StringIO(write_prediction_log(records))) == records

    def test_class_count_check(self):
        PredictionRecord("a", 1, 0, 0.5).check_classes(2)
        with pytest.raises(ValueError):
            PredictionRecord("a", 2, 0, 0.5).check_classes(2)


class TestTrajectoryTable:
    HEADER = "epoch,train_acc,test_acc,train_loss,cc,ci,uc,ui\n"

    def test_percent_row(self):
        traj = parse_trajectory_table(self.HEADER + "1,74.86,82.11,,13462,1507,3007,2082\n")
        (s,) = traj.epochs
        assert s.epoch == 1
        assert s.train_acc == pytest.approx(0.7486)
        assert s.test_acc == pytest.approx(0.8211)
        assert s.train_loss is None
        assert s.matrix == CertaintyValidityMatrix(13462, 1507, 3007, 2082)
        assert s.metrics is not None

    def test_duplicate_epoch(self):
        with pytest.raises(LogParseError, match="duplicate epoch"):
            parse_trajectory_table(self.HEADER + "1,0.5,0.5,,0,0,0,0\n1,0.6,0.6,,0,0,0,0\n")

    def test_decreasing_epoch(self):
        with pytest.raises(LogParseError, match="decreasing epoch.*line 3"):
            parse_trajectory_table(self.HEADER + "2,0.5,0.5,,,,,\n1,0.6,0.6,,,,,\n")

    def test_negative_count(self):
        with pytest.raises(LogParseError, match="negative"):
            parse_trajectory_table(self.HEADER + "1,0.5,0.5,,1,-1,0,0\n")

    def test_partial_matrix(self):
        with pytest.raises(LogParseError, match="all present or all blank"):
            parse_trajectory_table(self.HEADER + "1,0.5,0.5,,1,,0,0\n")

    def test_bad_header(self):
        with pytest.raises(LogParseError, match="header"):
            parse_trajectory_table("epoch,train,test\n1,0.5,0.5\n")

    def test_no_rows(self):
        with pytest.raises(LogParseError):
            parse_trajectory_table(self.HEADER)

    def test_full_table_length(self):
        traj = parse_trajectory_table(fixture_text("imdb_filtered"))
        assert len(traj) == 10
        assert [s.epoch for s in traj] == list(range(1, 11))
        for s, row in zip(traj, IMDB_COUNTS):
            assert (s.matrix.cc, s.matrix.ci, s.matrix.uc, s.matrix.ui) == row[3:]
            assert s.matrix.total == 20058

    def test_cvs_only_rows(self):
        traj = parse_trajectory_table(fixture_text("mnist_phase"))
        assert traj[0].matrix is None
        assert traj[0].cvs == 0.511
        assert traj[0].metrics.commit_acc is None


class TestSummaryTable:
    def test_epoch1_row(self, epoch1_matrix):
        traj = Trajectory((EpochSummary(1, 0.7486, 0.8211, None, epoch1_matrix),))
        lines = write_summary_table(traj).splitlines()
        header = lines[0].split(",")
        assert header == "epoch,train_acc,test_acc,train_loss,cc,ci,uc,ui,accuracy,commit_acc,approp_uncert,coverage,cvs".split(",")
        row = dict(zip(header, lines[1].split(",")))
        assert row["commit_acc"].startswith("0.8993")
        assert row["cvs"].startswith("0.5217")

    def test_blank_derived_columns(self):
        traj = Trajectory((EpochSummary(3, 0.5, 0.4),))
        row = write_summary_table(traj).splitlines()[1].split(",")
        assert row[3:] == [""] * 10

    def test_round_trip_fixture(self, imdb_filtered):
        again = parse_trajectory_table(write_summary_table(imdb_filtered))
        assert len(again) == len(imdb_filtered)
        for a, b in zip(imdb_filtered, again):
            assert (a.epoch, a.train_acc, a.test_acc, a.train_loss, a.matrix) == (
                b.epoch, b.train_acc, b.test_acc, b.train_loss, b.matrix
            )

    @settings(max_examples=60)
    @given(
        st.lists(
            st.tuples(
                st.floats(0, 1),
                st.floats(0, 1),
                st.one_of(st.none(), st.floats(0, 50)),
                st.one_of(st.none(), st.tuples(*[st.integers(0, 10**6)] * 4)),
            ),
            min_size=1,
            max_size=12,
        )
    )
    def test_round_trip_property(self, rows):
        epochs = tuple(
            EpochSummary(
                i + 1, tr, te, loss, None if m is None else CertaintyValidityMatrix(*m)
            )
            for i, (tr, te, loss, m) in enumerate(rows)
        )
        traj = Trajectory(epochs)
        again = parse_trajectory_table(write_summary_table(traj))
        for a, b in zip(traj, again):
            assert (a.epoch, a.train_acc, a.test_acc, a.train_loss, a.matrix) == (
                b.epoch, b.train_acc, b.test_acc, b.train_loss, b.matrix
            )
            if b.matrix is not None:
                assert b.matrix.cc + b.matrix.ci + b.matrix.uc + b.matrix.ui == b.matrix.total


class TestTypes:
    def test_matrix_rejects_negative(self):
        with pytest.raises(ValueError):
            CertaintyValidityMatrix(1, -1, 0, 0)

    def test_trajectory_invariants(self):
        with pytest.raises(ValueError):
            Trajectory(())
        s = EpochSummary(2, 0.5, 0.5)
        with pytest.raises(ValueError):
            Trajectory((s, s))

    def test_record_confidence_bounds(self):
        with pytest.raises(ValueError):
            PredictionRecord("x", 0, 0, 1.01)
