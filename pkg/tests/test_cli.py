"""Tests for the command-line front end."""

import json

import pytest

from fraccusum import cli
from fraccusum.cli import main, read_path_file
from fraccusum.errors import PathFileError
from fraccusum.harness.validation import PropertyResult

CONFIG = """\
[experiment]
hurst = 0.5
threshold = 1.0
replicates = 8
master_seed = 5

[grid]
step = 0.015625
count = 256
"""


def _generate(tmp_path, *extra, name="path.csv"):
    destination = tmp_path / name
    code = main(["generate", "--hurst", "0.7", "--steps", "1000", "--dt", "0.001",
                 "--seed", "3", "--output", str(destination), *extra])
    assert code == 0
    return destination


# ---- generate ----


def test_generate_writes_path_file(tmp_path):
    lines = _generate(tmp_path).read_text(encoding="utf-8").splitlines()

    assert lines[0] == "time,value"
    assert len(lines) == 1002
    assert lines[1] == "0,0"


def test_generate_is_deterministic(tmp_path):
    first = _generate(tmp_path, name="a.csv").read_bytes()
    second = _generate(tmp_path, name="b.csv").read_bytes()
    assert first == second


def test_generate_to_stdout(capsys):
    assert main(["generate", "--hurst", "0.5", "--steps", "4", "--dt", "0.25"]) == 0

    out = capsys.readouterr().out.splitlines()
    assert out[0] == "time,value"
    assert out[-1].startswith("1,")


def test_generate_requires_hurst():
    with pytest.raises(SystemExit) as excinfo:
        main(["generate", "--steps", "10", "--dt", "0.1"])
    assert excinfo.value.code == 2


def test_generated_path_reads_back(tmp_path):
    path = read_path_file(_generate(tmp_path))

    assert path.grid.count == 1000
    assert path.grid.step == pytest.approx(0.001)


# ---- calibrate ----


def test_calibrate_prints_threshold(capsys):
    assert main(["calibrate", "--gamma", "0.7182818284590451"]) == 0

    payload = json.loads(capsys.readouterr().out)
    assert payload["c"] == pytest.approx(1.0, rel=1e-12)
    assert payload["h"] == pytest.approx(0.7182818284590451)


def test_calibrate_rejects_zero_budget():
    with pytest.raises(SystemExit) as excinfo:
        main(["calibrate", "--gamma", "0"])
    assert excinfo.value.code == 2


def test_calibrate_prints_17_significant_digits(capsys):
    assert main(["calibrate", "--gamma", "0.1"]) == 0

    out = capsys.readouterr().out
    assert '"gamma": 0.10000000000000001' in out
    payload = json.loads(out)
    assert payload["gamma"] == 0.1


def test_unknown_log_level_is_a_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main(["--log-level", "loud", "calibrate", "--gamma", "1"])
    assert excinfo.value.code == 2


def test_log_level_is_case_insensitive():
    assert main(["--log-level", "debug", "calibrate", "--gamma", "1"]) == 0


def test_unknown_configured_log_level(monkeypatch, capsys):
    monkeypatch.setattr(cli.settings, "log_level", "loud")

    assert main(["calibrate", "--gamma", "1"]) == 2
    assert "unknown log level" in capsys.readouterr().err


# ---- detect ----


def test_detect_raises_alarm(tmp_path, capsys):
    source = _generate(tmp_path, "--regime", "post_change_at_zero", "--theta", "5")

    code = main(["detect", str(source), "--hurst", "0.7", "--theta", "5", "--threshold", "1"])

    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["stopped"] is True
    assert summary["stop_index"] > 0


def test_detect_without_alarm(tmp_path, capsys):
    source = _generate(tmp_path)

    code = main(["detect", str(source), "--hurst", "0.7", "--threshold", "1e6"])

    assert code == 3
    assert json.loads(capsys.readouterr().out)["stopped"] is False


def test_detect_needs_one_threshold_source(tmp_path):
    source = _generate(tmp_path)
    assert main(["detect", str(source), "--hurst", "0.7"]) == 2


def test_detect_reports_malformed_row(tmp_path, capsys):
    source = tmp_path / "bad.csv"
    source.write_text("time,value\n0,0\n0.1\n0.2,0.3\n", encoding="utf-8")

    assert main(["detect", str(source), "--hurst", "0.5", "--threshold", "1"]) == 2
    assert "line 3" in capsys.readouterr().err


@pytest.mark.parametrize("text", [
    "t,x\n0,0\n0.1,1\n0.2,2\n",
    "time,value\n0,0\n0.1,1\n",
    "time,value\n0.1,0\n0.2,1\n0.3,2\n",
    "time,value\n0,0\n0.1,1\n0.25,2\n",
    "time,value\n0,0\n0.1,abc\n0.2,2\n",
])
def test_read_path_file_rejects(tmp_path, text):
    source = tmp_path / "bad.csv"
    source.write_text(text, encoding="utf-8")
    with pytest.raises(PathFileError):
        read_path_file(source)


def test_read_path_file_skips_blank_lines(tmp_path):
    source = tmp_path / "gaps.csv"
    source.write_text("time,value\n0,0\n\n0.5,1\n1,2\n\n", encoding="utf-8")

    path = read_path_file(source)

    assert path.grid.count == 2
    assert path.values.tolist() == [0.0, 1.0, 2.0]


def test_read_path_file_line_numbers_count_blank_lines(tmp_path):
    source = tmp_path / "gaps.csv"
    source.write_text("time,value\n0,0\n\n0.5,1\n0.75,2\n", encoding="utf-8")

    with pytest.raises(PathFileError) as excinfo:
        read_path_file(source)
    assert excinfo.value.line == 5


# ---- experiment ----


def test_experiment_writes_reports(tmp_path, write_config, capsys):
    output = tmp_path / "out"

    assert main(["experiment", str(write_config(CONFIG)), "--output", str(output)]) == 0

    assert (output / "report.json").is_file()
    assert (output / "report.csv").read_text(encoding="utf-8").startswith("name,estimate")
    assert "half_qv_at_stop" in capsys.readouterr().out


def test_experiment_flags_override_file(tmp_path, write_config):
    output = tmp_path / "out"
    argv = ["experiment", str(write_config(CONFIG)), "--output", str(output),
            "--replicates", "3", "--gamma", "1.0"]

    assert main(argv) == 0

    report = json.loads((output / "report.json").read_text(encoding="utf-8"))
    assert report["n_replicates"] == 3
    assert report["config"]["threshold"] is None
    assert report["config"]["gamma"] == 1.0


def test_experiment_same_report_for_any_worker_count(tmp_path, write_config):
    config = str(write_config(CONFIG))
    for workers in ("1", "2"):
        assert main(["experiment", config, "--workers", workers,
                     "--output", str(tmp_path / workers)]) == 0

    assert ((tmp_path / "1" / "report.json").read_bytes()
            == (tmp_path / "2" / "report.json").read_bytes())


def test_experiment_missing_config(tmp_path):
    assert main(["experiment", str(tmp_path / "nope.toml")]) == 2


def test_experiment_invalid_config(write_config):
    assert main(["experiment", str(write_config("[experiment]\nhurst = 2.0\n"))]) == 2


def test_experiment_strict_bound(tmp_path, write_config, capsys):
    argv = ["experiment", str(write_config(CONFIG)), "--output", str(tmp_path / "out"),
            "--strict", "1e-9"]

    assert main(argv) == 4
    assert "breached" in capsys.readouterr().err


# ---- validate ----


def _fake_suite(passed, calls):
    def suite(hurst_list, replicates, master_seed):
        calls.append((tuple(hurst_list), replicates, master_seed))
        return [
            PropertyResult(name="calibration_round_trip", passed=True, detail="ok"),
            PropertyResult(name="variance_ratio", hurst=0.5, passed=passed, detail="ratio"),
        ]
    return suite


def test_validate_success(monkeypatch, capsys):
    calls = []
    monkeypatch.setattr(cli, "run_validation_suite", _fake_suite(True, calls))

    assert main(["validate", "--fast", "--hurst-list", "0.4,0.6", "--seed", "9"]) == 0

    assert calls == [((0.4, 0.6), 1000, 9)]
    assert "PASS  variance_ratio" in capsys.readouterr().out


def test_validate_failure_exit_code(monkeypatch):
    calls = []
    monkeypatch.setattr(cli, "run_validation_suite", _fake_suite(False, calls))

    assert main(["validate", "--replicates", "50"]) == 5
    assert calls[0][1] == 50
