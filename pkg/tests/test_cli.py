import csv
import io
import json
import subprocess
import sys

import pytest

from vlcnm.cli import EXIT_ALL_FAILED, EXIT_CONFIG, EXIT_OK, main
from vlcnm.harness import CSV_COLUMNS


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def scenario_file(tmp_path):
    def write(doc):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(doc))
        return str(path)

    return write


class TestRun:
    def test_default_scenario_to_file(self, tmp_path):
        out = tmp_path / "r.csv"
        assert main(["run", "--frames", "50", "--acq-samples", "500", "--out", str(out)]) == EXIT_OK
        rows = read_csv(out.read_text())
        assert [r["filtering"] for r in rows] == ["off", "on"]
        assert list(rows[0]) == list(CSV_COLUMNS)

    def test_flags_override_scenario(self, tmp_path):
        out = tmp_path / "r.json"
        code = main(
            ["run", "--frames", "20", "--modulation", "8ppm", "--order", "3", "--filtering", "on",
             "--seed", "9", "--format", "json", "--out", str(out)]
        )
        assert code == EXIT_OK
        (row,) = json.loads(out.read_text())["rows"]
        assert row["order_M"] == 8 and row["n_frames"] == 20 and row["predictor_order"] == 3 and row["seed"] == 9

    def test_stdout(self, capsysbinary):
        assert main(["run", "--frames", "10", "--filtering", "off"]) == EXIT_OK
        assert capsysbinary.readouterr().out.decode().startswith("axis_name,")

    def test_sweep_block_in_file(self, tmp_path, scenario_file):
        path = scenario_file(
            {"n_frames": 10, "sweep": {"axis": "channel_gain", "values": [1.0, 0.5], "repetitions": 2}}
        )
        out = tmp_path / "r.csv"
        assert main(["run", "--scenario", path, "--out", str(out)]) == EXIT_OK
        assert len(read_csv(out.read_text())) == 8

    def test_same_seed_same_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            main(["run", "--frames", "30", "--seed", "5", "--out", str(p)])
        assert a.read_bytes() == b.read_bytes()


class TestExitCodes:
    @pytest.mark.parametrize(
        "doc", [{"bogus": 1}, {"predictor_order": 0}, {"sweep": {"axis": "channel_gain", "values": [-1]}}]
    )
    def test_invalid_scenario(self, scenario_file, doc, capsys):
        assert main(["run", "--scenario", scenario_file(doc)]) == EXIT_CONFIG
        assert "invalid configuration" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["run", "--scenario", str(tmp_path / "nope.json")]) == EXIT_CONFIG

    def test_invalid_flag_value(self):
        assert main(["run", "--frames", "0"]) == EXIT_CONFIG

    def test_all_points_failed(self, scenario_file, tmp_path):
        doc = {
            "n_frames": 5,
            "interference": {"type": "hum", "fundamental_hz": 4e5, "harmonic_amplitudes": [1, 1]},
            "sweep": {"axis": "channel_gain", "values": [1.0]},
        }
        assert main(["run", "--scenario", scenario_file(doc), "--out", str(tmp_path / "o.csv")]) == EXIT_ALL_FAILED

    def test_argparse_rejects_unknown_modulation(self):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--modulation", "16ppm"])
        assert exc.value.code == 2


class TestSweepCommands:
    def test_table4_shape(self, tmp_path):
        out = tmp_path / "t4.csv"
        code = main(["table4", "--frames", "20", "--values", "10", "100", "--repetitions", "2", "--out", str(out)])
        assert code == EXIT_OK
        rows = read_csv(out.read_text())
        assert len(rows) == 2 * 2 * 2
        assert {r["axis_name"] for r in rows} == {"acquisition_samples"}
        assert {r["axis_value"] for r in rows} == {"10", "100"}

    def test_figure34_grid(self, tmp_path):
        out = tmp_path / "f.csv"
        code = main(
            ["figure34", "--frames", "10", "--acq-samples", "2000", "--lumens", "50", "250",
             "--distances", "2", "8", "--out", str(out)]
        )
        assert code == EXIT_OK
        rows = read_csv(out.read_text())
        assert len(rows) == 2 * 2 * 2 * 2
        assert {r["axis_name"] for r in rows} == {
            "interference_lumen@distance_m=2",
            "interference_lumen@distance_m=8",
        }
        assert {r["order_M"] for r in rows} == {"4", "8"}


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "vlcnm", "run", "--frames", "5", "--filtering", "off"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert len(proc.stdout.splitlines()) == 2
