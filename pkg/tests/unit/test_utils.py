from pathlib import Path

import numpy as np
import pytest

import blowuplab.utils
from blowuplab.utils import (
    TEMP_FILE_PREFIX,
    atomic_write,
    get_version,
    map_parallel,
    relative_error,
    write_csv,
)


class TestRelativeError:
    def test_relative(self):
        assert relative_error(1.01, 1.0) == pytest.approx(0.01)

    def test_negative_reference(self):
        assert relative_error(-2.2, -2.0) == pytest.approx(0.1)

    def test_zero_reference_is_absolute(self):
        assert relative_error(1e-12, 0.0) == 1e-12


class TestMapParallel:
    def test_preserves_order(self):
        assert map_parallel(lambda x: x * x, range(10)) == [x * x for x in range(10)]

    def test_single_thread(self, monkeypatch: pytest.MonkeyPatch):
        monkeypatch.setattr(blowuplab.utils.settings, "threads", 1)
        assert map_parallel(lambda x: x + 1, [1, 2, 3]) == [2, 3, 4]

    def test_empty(self):
        assert map_parallel(lambda x: x, []) == []


class TestAtomicWrite:
    def test_temp_file_has_prefix_and_suffix(self, tmp_path: Path):
        target = tmp_path / "report.json"
        with atomic_write(target) as temp:
            assert temp.name.startswith(TEMP_FILE_PREFIX)
            assert temp.suffix == ".json"
            temp.write_text("{}")
        assert target.read_text() == "{}"
        assert not temp.exists(), "Temp file should be replaced by target"

    def test_temp_file_cleaned_on_error(self, tmp_path: Path):
        target = tmp_path / "table.csv"
        with pytest.raises(RuntimeError):
            with atomic_write(target) as temp:
                temp.write_text("partial")
                raise RuntimeError("boom")
        assert not temp.exists(), "Temp file should be removed on error"
        assert not target.exists(), "Target should not be created on error"

    def test_overwrites_existing(self, tmp_path: Path):
        target = tmp_path / "table.csv"
        target.write_text("old")
        with atomic_write(str(target)) as temp:
            temp.write_text("new")
        assert target.read_text() == "new"


class TestWriteCsv:
    def test_header_and_precision(self, tmp_path: Path):
        target = tmp_path / "scan.csv"
        write_csv(target, ["D", "C_n"], [(1.5, 1 / 3), (2.0, -2.5e-20)])
        lines = target.read_text().splitlines()
        assert lines[0] == "D,C_n"
        assert lines[1] == "1.5,0.33333333333333331"
        assert float(lines[2].split(",")[1]) == -2.5e-20

    def test_round_trips_exactly(self, tmp_path: Path):
        target = tmp_path / "values.csv"
        rows = np.random.default_rng(0).normal(size=(5, 3))
        write_csv(target, ["a", "b", "c"], rows.tolist())
        loaded = np.loadtxt(target, delimiter=",", skiprows=1)
        np.testing.assert_array_equal(loaded, rows)

    def test_deterministic(self, tmp_path: Path):
        rows = [(0.1, 0.2), (0.3, 0.4)]
        write_csv(tmp_path / "a.csv", ["x", "y"], rows)
        write_csv(tmp_path / "b.csv", ["x", "y"], rows)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_get_version_is_a_string():
    assert isinstance(get_version(), str)
