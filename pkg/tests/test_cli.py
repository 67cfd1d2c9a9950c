"""Tests for the command-line client."""

import json
import re

import pytest
from click.testing import CliRunner

from ionqft.cli import main

FLOAT_CELL = re.compile(r"-?\d\.\d{11}e[+-]\d{2,3}$")


@pytest.fixture()
def runner():
    return CliRunner()


class TestCsvOutput:
    def test_chain_csv_structure(self, runner) -> None:
        result = runner.invoke(main, ["chain", "--set", "trap.n_ions=3"])
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0].startswith("# tool: ionqft ")
        assert re.fullmatch(r"# config_sha256: [0-9a-f]{64}", lines[1])
        assert lines[2].startswith("# units: ")
        assert lines[3].startswith("# notes: ")
        assert lines[4] == "index,position_m"
        data = lines[5:]
        assert len(data) == 3
        for line in data:
            idx, pos = line.split(",")
            assert idx.isdigit()
            assert FLOAT_CELL.fullmatch(pos)

    def test_runs_are_byte_identical(self, runner) -> None:
        args = ["modes", "--set", "trap.n_ions=5"]
        first = runner.invoke(main, args)
        second = runner.invoke(main, args)
        assert first.exit_code == second.exit_code == 0
        assert first.stdout_bytes == second.stdout_bytes

    def test_missing_values_render_as_nan(self, runner) -> None:
        result = runner.invoke(main, ["drive"])
        assert result.exit_code == 0
        # inverted-band grid points have no dressed stiffness
        row = next(
            line for line in result.stdout.splitlines() if line.startswith("3.50000000000")
        )
        assert ",nan," in row


class TestJsonOutput:
    def test_json_format_parses(self, runner) -> None:
        result = runner.invoke(main, ["modes", "--format", "json", "--set", "trap.n_ions=4"])
        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert payload["metadata"]["tool"] == "ionqft"
        assert len(payload["rows"]) == 4

    def test_json_output_reingests_as_config(self, runner, tmp_path) -> None:
        first = tmp_path / "first.json"
        second = tmp_path / "second.json"
        args = ["modes", "--set", "trap.n_ions=6", "--format", "json"]
        assert runner.invoke(main, args + ["--out", str(first)]).exit_code == 0
        rerun = runner.invoke(
            main, ["modes", "--config", str(first), "--format", "json", "--out", str(second)]
        )
        assert rerun.exit_code == 0
        assert first.read_bytes() == second.read_bytes()

    def test_output_format_from_config(self, runner, tmp_path) -> None:
        result = runner.invoke(main, ["chain", "--set", "output.format=json"])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["summary"]["n_ions"] == 50


class TestConfigResolution:
    def test_environment_overrides_defaults(self, runner) -> None:
        result = runner.invoke(main, ["chain"], env={"IONQFT_TRAP__N_IONS": "4"})
        assert result.exit_code == 0
        assert len(result.stdout.splitlines()) == 5 + 4

    def test_set_overrides_environment(self, runner) -> None:
        result = runner.invoke(
            main,
            ["chain", "--set", "trap.n_ions=2"],
            env={"IONQFT_TRAP__N_IONS": "7"},
        )
        assert result.exit_code == 0
        assert len(result.stdout.splitlines()) == 5 + 2

    def test_config_file_used_verbatim(self, runner, tmp_path) -> None:
        cfg = tmp_path / "run.json"
        body = {
            "species": {},
            "trap": {"n_ions": 3},
            "source": {},
            "drive": {},
            "rg": {},
            "dynamics": {},
            "output": {},
        }
        cfg.write_text(json.dumps(body))
        result = runner.invoke(main, ["chain", "--config", str(cfg)])
        assert result.exit_code == 0
        assert len(result.stdout.splitlines()) == 5 + 3


class TestFailureModes:
    def test_empty_config_file_rejected(self, runner, tmp_path) -> None:
        cfg = tmp_path / "empty.json"
        cfg.write_text("{}")
        result = runner.invoke(main, ["chain", "--config", str(cfg)])
        assert result.exit_code == 2
        assert "species" in result.stderr

    def test_malformed_config_file_rejected(self, runner, tmp_path) -> None:
        cfg = tmp_path / "broken.json"
        cfg.write_text("{not json")
        result = runner.invoke(main, ["chain", "--config", str(cfg)])
        assert result.exit_code == 2
        assert "not valid JSON" in result.stderr

    def test_set_requires_assignment(self, runner) -> None:
        result = runner.invoke(main, ["chain", "--set", "trap.n_ions"])
        assert result.exit_code == 2
        assert "--set expects" in result.stderr

    def test_unknown_leaf_rejected(self, runner) -> None:
        result = runner.invoke(main, ["chain", "--set", "trap.bogus=1"])
        assert result.exit_code == 2
        assert "trap.bogus" in result.stderr

    def test_unstable_chain_exits_three(self, runner) -> None:
        result = runner.invoke(main, ["modes", "--set", "trap.omega_x_hz=1e6"])
        assert result.exit_code == 3
        assert "instability" in result.stderr

    def test_fock_truncation_failure_exits_four(self, runner) -> None:
        result = runner.invoke(
            main,
            [
                "sense-harmonic",
                "--set", "trap.omega_x_hz=2e6",
                "--set", "trap.omega_z_hz=2.3e6",
                "--set", "trap.n_ions=2",
                "--set", "source.rabi_hz=500e3",
                "--set", "source.detuning_from_zigzag_hz=50e3",
                "--set", "dynamics.t_max_s=1e-5",
                "--set", "dynamics.samples=3",
                "--set", "dynamics.fock_cutoff=1",
            ],
        )
        assert result.exit_code == 4
        assert "Fock truncation" in result.stderr


class TestProtocolCommands:
    def test_sense_impulsive_reports_exact_reconstruction(self, runner) -> None:
        result = runner.invoke(
            main,
            [
                "sense-impulsive",
                "--format", "json",
                "--set", "dynamics.t_max_s=2e-6",
                "--set", "dynamics.samples=3",
            ],
        )
        assert result.exit_code == 0
        summary = json.loads(result.stdout)["summary"]
        assert summary["max_reconstruction_error"] < 1e-10

    def test_sense_harmonic_short_window_converges(self, runner) -> None:
        result = runner.invoke(
            main,
            [
                "sense-harmonic",
                "--format", "json",
                "--set", "dynamics.t_max_s=5e-6",
                "--set", "dynamics.samples=3",
                "--set", "dynamics.fock_cutoff=3",
            ],
        )
        assert result.exit_code == 0
        summary = json.loads(result.stdout)["summary"]
        assert summary["converged"] is True


def test_version_flag(runner) -> None:
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
    assert "ionqft" in result.stdout
