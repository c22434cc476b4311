import numpy as np
import pytest

from sparsevib import (
    SignalParseError,
    iterate_run_to_failure,
    read_ims_file,
    write_ims_file,
)


def make_snapshot(path, rows=16, cols=4, seed=0):
    rng = np.random.default_rng(seed)
    matrix = rng.standard_normal((rows, cols))
    write_ims_file(path, matrix)
    return matrix


class TestReadImsFile:
    def test_full_size_file(self, tmp_path):
        path = tmp_path / "2004.02.12.10.32.39"
        matrix = make_snapshot(path, rows=20480, cols=4)
        snapshot = read_ims_file(path, 20000.0)
        assert snapshot.channels.shape == (20480, 4)
        assert snapshot.n_channels == 4
        assert np.array_equal(snapshot.channels, matrix)
        assert snapshot.timestamp.year == 2004
        assert snapshot.sample_rate_hz == 20000.0

    def test_round_trip_lossless(self, tmp_path):
        first = tmp_path / "2004.02.12.10.32.39"
        matrix = make_snapshot(first, rows=64, cols=4, seed=5)
        parsed = read_ims_file(first, 20000.0, expected_rows=None)
        second = tmp_path / "2004.02.12.10.52.39"
        write_ims_file(second, parsed.channels)
        again = read_ims_file(second, 20000.0, expected_rows=None)
        assert np.array_equal(again.channels, matrix)

    def test_short_file_warns(self, tmp_path):
        path = tmp_path / "2004.02.12.10.32.39"
        with open(path, "w") as fh:
            fh.write("1\n2\n3\n")
        with pytest.warns(UserWarning, match="expected 20480"):
            snapshot = read_ims_file(path, 20000.0)
        assert snapshot.channels.shape == (3, 1)
        assert snapshot.channel_signal(0).samples.tolist() == [1.0, 2.0, 3.0]

    def test_parse_error_cites_line(self, tmp_path):
        path = tmp_path / "2004.02.12.10.32.39"
        rows = ["0.1\t0.2"] * 10
        rows[6] = "0.1\tnot_a_number"
        path.write_text("\n".join(rows) + "\n")
        with pytest.raises(SignalParseError) as excinfo:
            read_ims_file(path, 20000.0, expected_rows=None)
        assert excinfo.value.line == 7
        assert "line 7" in str(excinfo.value)

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "2004.02.12.10.32.39"
        path.write_text("1\t2\n3\n")
        with pytest.raises(SignalParseError):
            read_ims_file(path, 20000.0, expected_rows=None)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            read_ims_file(tmp_path / "2004.01.01.00.00.00", 20000.0)

    def test_channel_selection_bounds(self, tmp_path):
        path = tmp_path / "2004.02.12.10.32.39"
        make_snapshot(path, rows=16, cols=2)
        snapshot = read_ims_file(path, 20000.0, expected_rows=None)
        with pytest.raises(ValueError):
            snapshot.channel_signal(2)


class TestIterateRunToFailure:
    def test_chronological_order_beats_lexical(self, tmp_path):
        # lexically "2003.11..." < "2003.2..." but chronologically later
        late = tmp_path / "2003.11.25.10.00.00"
        early = tmp_path / "2003.2.01.09.00.00"
        make_snapshot(late, seed=1)
        make_snapshot(early, seed=2)
        sequence = iterate_run_to_failure(tmp_path, 0, 20000.0, expected_rows=None)
        names = [p.name for p in sequence.paths]
        assert names == ["2003.2.01.09.00.00", "2003.11.25.10.00.00"]

    def test_full_dataset_count_and_order(self, tmp_path):
        # 984 snapshot files, written shuffled, must come back in time order
        stamps = []
        for i in range(984):
            minute = i % 60
            hour = (i // 60) % 24
            day = 1 + i // 1440
            stamps.append(f"2004.02.{day:02d}.{hour:02d}.{minute:02d}.00")
        rng = np.random.default_rng(0)
        for i in rng.permutation(984):
            (tmp_path / stamps[i]).write_text("0.1\t0.2\n0.3\t0.4\n")
        sequence = iterate_run_to_failure(tmp_path, 1, 20000.0, expected_rows=None)
        assert len(sequence) == 984
        assert [p.name for p in sequence.paths] == stamps
        assert sequence.signals[0].samples.tolist() == [0.2, 0.4]

    def test_bad_files_reported_not_fatal(self, tmp_path):
        good = tmp_path / "2004.02.12.10.32.39"
        make_snapshot(good, seed=3)
        bad = tmp_path / "2004.02.12.10.52.39"
        bad.write_text("not numbers at all\n")
        unstamped = tmp_path / "readme.txt"
        unstamped.write_text("hello\n")
        sequence = iterate_run_to_failure(tmp_path, 0, 20000.0, expected_rows=None)
        assert len(sequence) == 1
        assert len(sequence.errors) == 2

    def test_channel_out_of_range_reported(self, tmp_path):
        make_snapshot(tmp_path / "2004.02.12.10.32.39", cols=2, seed=4)
        make_snapshot(tmp_path / "2004.02.12.10.52.39", cols=4, seed=5)
        sequence = iterate_run_to_failure(tmp_path, 3, 20000.0, expected_rows=None)
        assert len(sequence) == 1
        assert len(sequence.errors) == 1

    def test_empty_directory(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            iterate_run_to_failure(tmp_path, 0, 20000.0)
