"""Batch front-end: schema validation, artifacts, determinism."""

import json

import pytest

from blowup_paths.runner import run

SWEEP_CFG = {
    "family": "start-in-W2",
    "s_values": [0.0],
    "lam0_re": 0.25,
    "lambda_values": [[0.8, -0.8], [0.8, 0.45]],
    "horizon_factor": 100,
}


def write_cfg(tmp_path, payload, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


class TestConfig:
    def test_malformed_json_exits_2(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        rc = run(["simulate", "--config", str(p), "--out", str(tmp_path / "o")])
        assert rc == 2
        err = capsys.readouterr().err
        assert json.loads(err)["error"] == "config"

    def test_schema_violation_exits_2(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, {"family": "no-such-family"})
        rc = run(["simulate", "--config", cfg, "--out", str(tmp_path / "o")])
        assert rc == 2
        assert json.loads(capsys.readouterr().err)["error"] == "config"

    def test_overflow_guard(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, dict(SWEEP_CFG, horizon_factor=100000))
        rc = run(["simulate", "--config", cfg, "--out", str(tmp_path / "o")])
        assert rc == 2


class TestSimulate:
    def test_artifacts_and_sod(self, tmp_path):
        cfg = write_cfg(tmp_path, SWEEP_CFG)
        out = tmp_path / "sim"
        rc = run(["simulate", "--config", cfg, "--out", str(out)])
        assert rc == 0
        report = json.loads((out / "qc_report.json").read_text())
        assert report["sod"] == "<O_C(-1), D^b(Y)>"
        assert "config" in report
        csv = (out / "trajectories.csv").read_text()
        assert csv.startswith("# config=")
        assert "t,object,ReZ,ImZ,arg_unwrapped,absZ,phi,logm" in csv
        assumptions = json.loads((out / "assumptions.json").read_text())
        assert assumptions["monotone_arg"] is True


class TestSweep:
    def test_dichotomy_and_determinism(self, tmp_path):
        cfg = write_cfg(tmp_path, SWEEP_CFG)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run(["sweep", "--config", cfg, "--out", str(out1)]) == 0
        assert run(["sweep", "--config", cfg, "--out", str(out2)]) == 0
        csv1 = (out1 / "sweep.csv").read_bytes()
        assert csv1 == (out2 / "sweep.csv").read_bytes()
        assert (out1 / "sweep.json").read_bytes() == (out2 / "sweep.json").read_bytes()
        body = csv1.decode()
        assert "<O_C(-1), D^b(Y)>" in body and "<D^b(Y), O_C>" in body

    def test_parallel_jobs_match_serial(self, tmp_path):
        cfg = write_cfg(tmp_path, SWEEP_CFG)
        out1, out2 = tmp_path / "serial", tmp_path / "par"
        assert run(["sweep", "--config", cfg, "--out", str(out1)]) == 0
        assert run(["sweep", "--config", cfg, "--out", str(out2),
                    "--jobs", "2"]) == 0
        assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()


class TestOtherCommands:
    def test_walls(self, tmp_path):
        cfg = write_cfg(tmp_path, SWEEP_CFG)
        out = tmp_path / "w"
        assert run(["walls", "--config", cfg, "--out", str(out)]) == 0
        payload = json.loads((out / "walls.json").read_text())
        assert payload["wall"]["t_star"] > 0
        assert abs(payload["wall"]["im_at_root"]) < 1e-10 * payload["wall"]["abs_at_root"]

    def test_mutate(self, tmp_path):
        out = tmp_path / "m"
        assert run(["mutate", "--out", str(out)]) == 0
        payload = json.loads((out / "mutate.json").read_text())
        assert payload["orbit_size"] == 21
        assert payload["left_right_closure"] is True

    def test_qde_check(self, tmp_path):
        out = tmp_path / "q"
        assert run(["qde-check", "--out", str(out), "--seed", "1"]) == 0
        payload = json.loads((out / "qde_check.json").read_text())
        assert payload["pass"] is True

    def test_specfun_validate_seeded(self, tmp_path):
        cfg = write_cfg(tmp_path, {"n_points": 60})
        out = tmp_path / "s"
        assert run(["specfun-validate", "--config", cfg, "--out", str(out),
                    "--seed", "2"]) == 0
        payload = json.loads((out / "specfun_validate.json").read_text())
        assert payload["pass"] is True and payload["n"] == 60
