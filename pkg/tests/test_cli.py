import csv
import json
import math
from pathlib import Path

import pytest

from cat_teleport.analysis import success_prob_closed_form
from cat_teleport.cli import build_config, build_parser, main
from cat_teleport.model import ChannelSign, Engine, Experiment, ReportFormat


def _run(tmp_path: Path, *argv: str, name: str = "report.json") -> tuple[int, Path]:
    path = tmp_path / name
    return main([*argv, "--output", str(path)]), path


def test_teleport_reports_one_half(tmp_path: Path) -> None:
    # When
    status, path = _run(tmp_path, "teleport", "--alpha", "1,0", "--eps-plus", "1,0", "--eps-minus", "1,0",
                        "--channel-sign", "minus")

    # Then
    assert status == 0
    report = json.loads(path.read_text(encoding="utf-8"))
    assert report["success_probability"] == pytest.approx(0.5, abs=1e-9)
    assert report["engine"] == "analytic"


def test_success_scan_csv(tmp_path: Path) -> None:
    # When
    status, path = _run(tmp_path, "scan-success", "--channel-sign", "plus", "--alpha-grid", "0:3:0.1",
                        "--format", "csv", name="scan.csv")

    # Then
    assert status == 0
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 32
    rows = list(csv.DictReader(lines))
    for row in rows:
        expected = success_prob_closed_form(ChannelSign.PLUS, float(row["alpha"]))
        assert float(row["value"]) == pytest.approx(expected, abs=1e-8)


def test_reports_are_byte_identical_across_runs(tmp_path: Path) -> None:
    argv = ["scan-concurrence", "--channel-sign", "plus", "--partition", "4(35)", "--alpha-grid", "0.5:1.5:0.5"]

    _, first = _run(tmp_path, *argv, name="first.json")
    _, second = _run(tmp_path, *argv, name="second.json")

    assert first.read_bytes() == second.read_bytes()


def test_engines_are_cross_checked(tmp_path: Path) -> None:
    status, path = _run(tmp_path, "teleport", "--alpha", "0.5", "--engine", "both")

    assert status == 0
    assert json.loads(path.read_text(encoding="utf-8"))["engine"] == "both"


def test_tripartite_teleport(tmp_path: Path) -> None:
    status, path = _run(tmp_path, "teleport-tripartite", "--alpha", "0.8", "--eps-minus=-1,0")

    assert status == 0
    report = json.loads(path.read_text(encoding="utf-8"))
    assert report["params"]["input"]["parties"] == 3
    assert report["params"]["channel"]["parties"] == 4
    assert report["success_probability"] == pytest.approx(0.5, abs=1e-9)


def test_sampling_is_attached_when_shots_are_given(tmp_path: Path) -> None:
    status, path = _run(tmp_path, "teleport", "--alpha", "1", "--shots", "500", "--seed", "3")

    assert status == 0
    sampling = json.loads(path.read_text(encoding="utf-8"))["sampling"]
    assert sampling["shots"] == 500
    assert sampling["seed"] == 3
    assert sum(count["count"] for count in sampling["counts"]) == 500


def test_channel_preparation(tmp_path: Path) -> None:
    status, path = _run(tmp_path, "channel-prepare", "--alpha", "1", "--parties", "2", "--engine", "both")

    assert status == 0
    report = json.loads(path.read_text(encoding="utf-8"))
    assert report["fidelity"] == pytest.approx(1.0, abs=1e-10)
    assert report["head_concurrence"] == pytest.approx(1.0, abs=1e-7)


def test_limit_check(tmp_path: Path) -> None:
    status, path = _run(tmp_path, "limit-check", "--a", "0.6", "--b", "0,0.8")

    assert status == 0
    report = json.loads(path.read_text(encoding="utf-8"))
    assert report["alpha"] == 1e-3
    assert report["channel_limit_fidelity"] >= 0.999999
    assert report["bipartite_limit_fidelity"] >= 0.999999
    assert report["small_alpha"]["success_probability"] == pytest.approx(0.5, abs=1e-12)


def test_parity_demo_to_stdout(capsys: pytest.CaptureFixture[str]) -> None:
    # When
    status = main(["parity-demo", "--n", "3", "--engine", "both"])

    # Then
    assert status == 0
    assert json.loads(capsys.readouterr().out) == {"parity": "odd", "atom": "excited"}


def test_cross_validation(tmp_path: Path) -> None:
    status, path = _run(tmp_path, "cross-validate", "--alpha", "0.5")

    assert status == 0
    report = json.loads(path.read_text(encoding="utf-8"))
    assert report["max_probability_gap"] <= 1e-6
    assert report["analytic_success"] == pytest.approx(0.5, abs=1e-9)
    assert math.isclose(report["channel_fidelity_analytic"], 1.0, abs_tol=1e-10)


def test_invalid_request_exits_with_two(tmp_path: Path) -> None:
    assert _run(tmp_path, "teleport", "--eps-plus", "0", "--eps-minus", "0")[0] == 2
    assert _run(tmp_path, "scan-success", "--alpha-grid", "3:0:0.1")[0] == 2
    assert _run(tmp_path, "parity-demo", "--format", "csv")[0] == 2


def test_numerical_failure_exits_with_three(tmp_path: Path) -> None:
    # the minus channel vanishes at alpha = 0
    assert _run(tmp_path, "teleport", "--alpha", "0", "--channel-sign", "minus")[0] == 3


def test_write_failure_exits_with_four(tmp_path: Path) -> None:
    status = main(["teleport", "--alpha", "0.5", "--output", str(tmp_path / "missing" / "report.json")])

    assert status == 4


def test_flags_override_the_config_file(tmp_path: Path) -> None:
    # Given
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"alpha": [0.5, 0.0], "channel_sign": "plus", "engine": "fock"}),
                           encoding="utf-8")
    args = build_parser().parse_args(["teleport", "--config", str(config_path), "--channel-sign", "minus",
                                      "--format", "csv"])

    # When
    config = build_config(args)

    # Then
    assert config.experiment is Experiment.TELEPORT
    assert config.alpha == 0.5
    assert config.channel_sign is ChannelSign.MINUS
    assert config.engine is Engine.FOCK
    assert config.format is ReportFormat.CSV
    assert config.output_path is None


def test_malformed_config_exits_with_two(tmp_path: Path) -> None:
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"engine": "quantum"}), encoding="utf-8")

    assert main(["teleport", "--config", str(config_path)]) == 2
    assert main(["teleport", "--config", str(tmp_path / "absent.json")]) == 2
