import json
from dataclasses import replace

import numpy as np
import pytest

from nussbaum_pid import cli, verify
from nussbaum_pid.config import (
    ConfigParseError,
    ConfigValidationError,
    config_from_document,
    load_document,
    parse_config,
    preset,
    scale_kappa,
    to_document,
)
from nussbaum_pid.csvio import HEADER, log_columns, read_csv, write_csv
from nussbaum_pid.dynamics import coriolis_matrix
from nussbaum_pid.simulation import SimConfig, run_scenario


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def short_config(tmp_path, duration=0.5, **sim):
    return write_json(tmp_path / "short.json", {"sim": {"duration": duration, **sim}})


class TestConfig:
    def test_empty_document_is_preset(self):
        assert parse_config("{}") == SimConfig()

    def test_presets(self):
        np.testing.assert_array_equal(preset("flip").robot.kappa, -np.eye(2))
        np.testing.assert_array_equal(preset("skew").robot.kappa, np.diag([0.5, -2.0]))
        with pytest.raises(ConfigValidationError):
            preset("nope")

    def test_overrides(self):
        cfg = parse_config('{"robot": {"m2": 3}, "controller": {"gamma": 0.25, "network": {"nodes": 5}},'
                           ' "sim": {"dt": 0.001, "hold": true}}')
        assert cfg.robot.m2 == 3.0 and cfg.controller.gamma == 0.25
        assert cfg.controller.layout.nodes == 5 and cfg.dt == 1e-3 and cfg.hold

    @pytest.mark.parametrize(
        "text",
        [
            '{"sim": {"dt": -0.001}}',
            '{"sim": {"decimation": 0}}',
            '{"robot": {"m1": "heavy"}}',
            '{"robot": {"kappa": [[1, 0]]}}',
            '{"controller": {"kind": "pd"}}',
            '{"controller": {"network": {"nodes": 2.5}}}',
            '{"controller": {"adapt_gain": [[1, 0], [0, 1]]}}',
            '{"output": {"csv_path": 3}}',
        ],
    )
    def test_validation_errors(self, text):
        with pytest.raises(ConfigValidationError):
            parse_config(text)

    @pytest.mark.parametrize("text", ['{"robot": {"mass": 1}}', '{"extra": 1}', '{"controller": {"network": {"x": 1}}}'])
    def test_unknown_keys_rejected(self, text):
        with pytest.raises(ConfigValidationError, match="unknown"):
            parse_config(text)

    @pytest.mark.parametrize("text", ["{not json", "[1, 2]"])
    def test_parse_errors(self, text, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(text)
        with pytest.raises(ConfigParseError):
            load_document(path)

    @pytest.mark.parametrize("name", ["paper", "flip", "skew"])
    def test_document_round_trip(self, name):
        cfg = replace(preset(name), dt=2e-4, decimation=3)
        assert config_from_document(json.loads(json.dumps(to_document(cfg)))) == cfg

    def test_matrix_gain_round_trip(self):
        doc = to_document(SimConfig())
        doc["controller"]["adapt_gain"] = (5.0 * np.eye(20)).tolist()
        cfg = config_from_document(doc)
        np.testing.assert_array_equal(cfg.controller.adapt_matrix(), 5.0 * np.eye(20))

    def test_scale_kappa(self):
        np.testing.assert_array_equal(scale_kappa(preset("skew"), -2.0).robot.kappa, np.diag([-1.0, 4.0]))


class TestCsv:
    def test_round_trip_bit_exact(self, tmp_path):
        log, _ = run_scenario(SimConfig(duration=0.3))
        write_csv(tmp_path / "a.csv", log)
        data = read_csv(tmp_path / "a.csv")
        cols = log_columns(log)
        for i, name in enumerate(HEADER):
            np.testing.assert_array_equal(data[name], cols[:, i])

    def test_header_checked(self, tmp_path):
        (tmp_path / "x.csv").write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            read_csv(tmp_path / "x.csv")


class TestRunCommand:
    def test_default_preset(self, tmp_path, capsys):
        out = tmp_path / "run.csv"
        assert cli.main(["run", "--preset", "paper", "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "diverged           false" in text
        assert len(read_csv(out)["t"]) == 20001

    def test_flip_fixed_pid_loses_track(self, tmp_path, capsys):
        out = tmp_path / "flip.csv"
        assert cli.main(["run", "--preset", "flip", "--controller", "fixed-pid", "--out", str(out)]) == 0
        text = capsys.readouterr().out
        max_err = float(next(line for line in text.splitlines() if line.startswith("max_abs_error ")).split()[1])
        assert "diverged           true" in text or max_err > 10.0

    def test_repeat_runs_byte_identical(self, tmp_path):
        cfg = short_config(tmp_path)
        for name in ("a.csv", "b.csv"):
            assert cli.main(["run", "--config", cfg, "--out", str(tmp_path / name)]) == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_csv_path_from_config(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        cfg = write_json(tmp_path / "c.json", {"sim": {"duration": 0.1}, "output": {"csv_path": "sub/out.csv"}})
        assert cli.main(["run", "--config", cfg]) == 0
        assert (tmp_path / "sub" / "out.csv").exists()

    def test_flags_override(self, tmp_path):
        out = tmp_path / "o.csv"
        assert cli.main(["run", "--duration", "0.2", "--dt", "1e-3", "--decimation", "2", "--out", str(out)]) == 0
        np.testing.assert_allclose(read_csv(out)["t"][-1], 0.2)
        assert len(read_csv(out)["t"]) == 101

    def test_bad_config_no_csv(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        bad = tmp_path / "bad.json"
        bad.write_text('{"sim": {"dt": -1}}')
        assert cli.main(["run", "--config", str(bad)]) == 1
        malformed = tmp_path / "malformed.json"
        malformed.write_text("{oops")
        assert cli.main(["run", "--config", str(malformed)]) == 1
        assert not list(tmp_path.glob("*.csv"))

    def test_missing_config_is_io_error(self, tmp_path):
        assert cli.main(["run", "--config", str(tmp_path / "none.json")]) == 2

    def test_unwritable_output_is_io_error(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert cli.main(["run", "--duration", "0.01", "--out", str(blocker / "x.csv")]) == 2

    def test_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["run", "--preset", "upside-down"])
        assert exc.value.code == 1


class TestSweepCommand:
    def test_kappa_scale(self, tmp_path, capsys):
        out = tmp_path / "sw"
        args = ["sweep", "--config", short_config(tmp_path), "--param", "kappa-scale", "--values", "1,-1,0.5",
                "--out", str(out), "--jobs", "1"]
        assert cli.main(args) == 0
        rows = (out / "metrics.csv").read_text().strip().splitlines()
        assert len(rows) == 4
        assert len(list(out.glob("kappa-scale=*.csv"))) == 3
        assert len(capsys.readouterr().out.strip().splitlines()) == 4

    def test_single_value_matches_run(self, tmp_path):
        cfg = short_config(tmp_path)
        assert cli.main(["sweep", "--config", cfg, "--param", "k_delta", "--values", "0.1",
                         "--out", str(tmp_path / "sw")]) == 0
        assert cli.main(["run", "--config", cfg, "--out", str(tmp_path / "run.csv")]) == 0
        assert (tmp_path / "sw" / "k_delta=0.1.csv").read_bytes() == (tmp_path / "run.csv").read_bytes()

    def test_parallel_matches_serial(self, tmp_path):
        cfg = short_config(tmp_path, duration=0.2)
        for jobs, d in (("1", "a"), ("2", "b")):
            assert cli.main(["sweep", "--config", cfg, "--param", "gamma", "--values", "0.5,1.0",
                             "--out", str(tmp_path / d), "--jobs", jobs]) == 0
        for name in ("gamma=0.5.csv", "gamma=1.0.csv", "metrics.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    @pytest.mark.parametrize("param,values", [("k_delta", ""), ("k_delta", " , "), ("mass", "1"), ("nodes", "x")])
    def test_usage_errors(self, tmp_path, param, values):
        assert cli.main(["sweep", "--param", param, "--values", values, "--out", str(tmp_path / "o")]) == 1
        assert not (tmp_path / "o").exists()

    def test_invalid_swept_value(self, tmp_path):
        assert cli.main(["sweep", "--param", "dt", "--values", "-1", "--out", str(tmp_path / "o")]) == 1


class TestVerifyCommand:
    def test_stock_build_passes(self, capsys):
        assert cli.main(["verify"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out and out.count("PASS") == 7

    def test_mutated_coriolis_fails(self, monkeypatch, capsys):
        flipped = lambda p, q, dq: -coriolis_matrix(p, q, dq)  # noqa: E731
        original = verify.check_skew_symmetry
        monkeypatch.setattr(verify, "check_skew_symmetry", lambda robot: original(robot, coriolis=flipped))
        assert cli.main(["verify"]) == 3
        assert "FAIL  P2 skew symmetry" in capsys.readouterr().out

    def test_mutated_antiderivative_fails(self, monkeypatch, capsys):
        shifted = lambda v: verify.nussbaum_antiderivative(v) + 1e-3  # noqa: E731
        original = verify.check_nussbaum
        monkeypatch.setattr(verify, "check_nussbaum", lambda: original(shifted))
        assert cli.main(["verify"]) == 3
        assert "FAIL  Nussbaum mean" in capsys.readouterr().out
