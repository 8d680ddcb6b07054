import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import quantum_ep.integrators as integrators
from quantum_ep import cli
from quantum_ep.config import (
    DEFAULT_TOLERANCES,
    OUTPUT_ENV,
    PICTURES,
    ConfigError,
    load_config,
    serialize,
    validate,
)

DEMO_CONFIGS = Path(__file__).resolve().parents[1] / "demos" / "configs"

SPIN = {
    "picture": "schrodinger",
    "hamiltonian": {"type": "spin_in_field", "omega": 1.0, "axis": [0, 0, 1]},
    "initial_state": {"type": "vector", "vector": [1.0, 1.0]},
    "time": {"t1": 6.283185307179586, "steps": 400},
    "observables": ["sigma_x", "sigma_y"],
}

RANDOM_GAUGE = {
    "picture": "schrodinger",
    "hamiltonian": {"type": "matrix", "matrix": {"re": [[1, 0.5, 0], [0.5, -0.3, 0.2], [0, 0.2, 0.8]],
                                                 "im": [[0, 0.1, 0], [-0.1, 0, 0.4], [0, -0.4, 0]]}},
    "initial_state": {"type": "basis", "index": 0},
    "gauge": {"type": "random", "scale": 0.5, "pieces": 3},
    "time": {"t1": 2.0, "steps": 200},
    "seed": 3,
}


def write_config(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return p


def read_csv(path):
    header, data = cli.read_columns(path)
    return {name: data[:, j] for j, name in enumerate(header)}


class TestLoadConfig:
    def test_minimal_defaults(self, tmp_path):
        cfg = load_config(write_config(tmp_path, {
            "picture": "schrodinger",
            "hamiltonian": {"type": "pauli", "coefficients": {"z": 1.0}},
            "initial_state": {"type": "basis", "index": 0},
            "time": {"t1": 1.0, "steps": 10},
        }))
        assert cfg.hbar == 1.0 and cfg.gauge == {"type": "zero"} and cfg.time["t0"] == 0.0

    def test_parse_error_has_position(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"picture": "schrodinger",\n  "time": }')
        with pytest.raises(ConfigError, match="line 2, column"):
            load_config(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "absent.json")

    def test_unknown_picture_lists_valid_set(self):
        with pytest.raises(ConfigError) as exc:
            validate({"picture": "interaction", "time": {"t1": 1, "steps": 1}})
        assert all(p in str(exc.value) for p in PICTURES)

    def test_dimension_mismatch_names_both_fields(self):
        raw = dict(SPIN, initial_state={"type": "vector", "vector": [1, 0, 0]})
        with pytest.raises(ConfigError) as exc:
            validate(raw)
        msg = str(exc.value)
        assert "hamiltonian" in msg and "initial_state" in msg and "dimension" in msg

    def test_all_errors_reported(self):
        raw = dict(SPIN, hbar=-1.0, seed="x", colour="red", time={"t1": 1.0, "steps": 0})
        with pytest.raises(ConfigError) as exc:
            validate(raw)
        errs = exc.value.errors
        assert len(errs) >= 4
        assert any("hbar" in e for e in errs) and any("seed" in e for e in errs)
        assert any("colour" in e for e in errs) and any("steps" in e for e in errs)

    def test_non_skew_kappa_rejected(self):
        raw = dict(SPIN, gauge={"type": "matrix", "matrix": [[1.0, 0.0], [0.0, 0.0]]})
        with pytest.raises(ConfigError, match="skew-Hermitian"):
            validate(raw)

    def test_non_hermitian_hamiltonian_rejected(self):
        raw = dict(SPIN, hamiltonian={"type": "matrix", "matrix": {"re": [[0, 1], [0, 0]]}})
        with pytest.raises(ConfigError, match="not Hermitian"):
            validate(raw)

    def test_gauge_rejected_for_gauge_free_picture(self):
        raw = dict(SPIN, picture="von_neumann", gauge={"type": "zero"})
        with pytest.raises(ConfigError, match="no gauge freedom"):
            validate(raw)

    def test_unknown_tolerance_name(self):
        with pytest.raises(ConfigError, match="not an invariant"):
            validate(dict(SPIN, tolerances={"purity": 1e-3}))

    @pytest.mark.parametrize("path", sorted(DEMO_CONFIGS.glob("*.json")), ids=lambda p: p.stem)
    def test_round_trip(self, path):
        cfg = load_config(path)
        again = validate(json.loads(json.dumps(serialize(cfg))))
        assert again == cfg

    def test_tolerance_table(self):
        cfg = validate(dict(SPIN, tolerances={"energy": 1e-6}))
        table = cfg.tolerance_table(10.0)
        assert table["energy"] == ("conserved", pytest.approx(1e-5))
        assert table["norm"][1] == pytest.approx(10 * DEFAULT_TOLERANCES["schrodinger"]["norm"][1])


class TestSimulate:
    def test_spin_precession(self, tmp_path):
        out = tmp_path / "spin"
        assert cli.main(["--output", str(out), "simulate", str(write_config(tmp_path, SPIN))]) == 0
        obs = read_csv(out / "observables.csv")
        assert np.abs(obs["sigma_x"] - np.cos(obs["time"])).max() <= 1e-4
        assert np.abs(obs["sigma_y"] - np.sin(obs["time"])).max() <= 1e-4
        inv = read_csv(out / "invariants.csv")
        assert inv["unitarity_defect"].max() <= 1e-10
        assert (out / "trajectory.csv").exists()

    def test_wigner_normalization(self, tmp_path):
        out = tmp_path / "w"
        code = cli.main(["--output", str(out), "simulate", str(DEMO_CONFIGS / "wigner_harmonic.json")])
        assert code == 0
        inv = read_csv(out / "invariants.csv")
        assert np.abs(inv["normalization"] - 1.0).max() <= 1e-8
        assert sorted(p.name for p in out.glob("wigner_*.pgm"))[0] == "wigner_00000.pgm"

    @pytest.mark.parametrize("path", sorted(DEMO_CONFIGS.glob("*.json")), ids=lambda p: p.stem)
    def test_demo_configs_pass(self, path, tmp_path):
        assert cli.simulate(load_config(path), tmp_path, stream=sys.stderr) == 0

    def test_deterministic_outputs(self, tmp_path):
        cfg = write_config(tmp_path, RANDOM_GAUGE)
        for d in ("a", "b"):
            assert cli.main(["--output", str(tmp_path / d), "simulate", str(cfg)]) == 0
        for name in ("trajectory.csv", "invariants.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_seed_flag_changes_gauge(self, tmp_path):
        cfg = write_config(tmp_path, RANDOM_GAUGE)
        cli.main(["--output", str(tmp_path / "a"), "simulate", str(cfg)])
        cli.main(["--output", str(tmp_path / "b"), "--seed", "11", "simulate", str(cfg)])
        a = (tmp_path / "a" / "trajectory.csv").read_bytes()
        b = (tmp_path / "b" / "trajectory.csv").read_bytes()
        assert a != b

    def test_csv_format(self, tmp_path):
        out = tmp_path / "spin"
        cli.main(["--output", str(out), "simulate", str(write_config(tmp_path, SPIN))])
        raw = (out / "observables.csv").read_bytes()
        assert raw.startswith(b"time,sigma_x,sigma_y\r\n")
        first = raw.split(b"\r\n")[1].decode().split(",")
        assert float(first[0]) == 0.0 and float(first[1]) == pytest.approx(1.0, abs=1e-12)
        assert first[1] == "%.17g" % float(first[1])

    def test_corrupted_generator_exits_with_violation(self, tmp_path, monkeypatch, capsys):
        real = integrators.expm_skew
        monkeypatch.setattr(integrators, "expm_skew", lambda xi, t=1.0: 1.01 * real(xi, t))
        code = cli.main(["--output", str(tmp_path / "bad"), "simulate", str(write_config(tmp_path, SPIN))])
        assert code == cli.EXIT_VIOLATION
        assert "not unitary" in capsys.readouterr().err

    def test_tight_tolerance_reports_first_violation(self, tmp_path, capsys):
        out = tmp_path / "tight"
        code = cli.main(["--output", str(out), "--tolerance-scale", "1e-9", "simulate",
                         str(write_config(tmp_path, RANDOM_GAUGE))])
        assert code == cli.EXIT_VIOLATION
        err = capsys.readouterr().err
        assert "invariant" in err and "violated at t=" in err and "row " in err

    def test_invalid_config_exit_code(self, tmp_path):
        bad = write_config(tmp_path, dict(SPIN, picture="nope"))
        assert cli.main(["simulate", str(bad)]) == cli.EXIT_INPUT

    def test_rejects_nonpositive_scale(self, tmp_path):
        assert cli.main(["--tolerance-scale", "0", "simulate", str(write_config(tmp_path, SPIN))]) == cli.EXIT_INPUT


class TestOutputResolution:
    def test_env_overrides_config(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
        cfg = write_config(tmp_path, dict(SPIN, output=str(tmp_path / "cfg")))
        assert cli.main(["simulate", str(cfg)]) == 0
        assert (tmp_path / "env" / "invariants.csv").exists()
        assert not (tmp_path / "cfg").exists()

    def test_flag_overrides_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
        cfg = write_config(tmp_path, SPIN)
        assert cli.main(["--output", str(tmp_path / "flag"), "simulate", str(cfg)]) == 0
        assert (tmp_path / "flag" / "invariants.csv").exists()
        assert not (tmp_path / "env").exists()

    def test_config_output_used_last(self, tmp_path, monkeypatch):
        monkeypatch.delenv(OUTPUT_ENV, raising=False)
        cfg = validate(dict(SPIN, output=str(tmp_path / "cfg")))
        assert cli.resolve_output(None, cfg) == tmp_path / "cfg"


class TestReport:
    def test_summary(self, tmp_path, capsys):
        times = np.array([0.0, 0.5, 1.0])
        cli.write_columns(tmp_path / "invariants.csv", times,
                          {"const": np.array([2.0, 2.0, 2.0]), "drift": np.array([0.1, -0.3, 0.4])})
        assert cli.main(["report", str(tmp_path)]) == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["columns"]["const"]["drift"] == 0.0
        d = summary["columns"]["drift"]
        assert d["drift"] == pytest.approx(d["max"] - d["min"], rel=1e-15)
        assert d["drift"] == pytest.approx(0.7, rel=1e-15)
        assert "drift" in capsys.readouterr().out

    def test_zero_rows_is_error(self, tmp_path):
        (tmp_path / "invariants.csv").write_text("time,energy\r\n")
        assert cli.main(["report", str(tmp_path)]) == cli.EXIT_INPUT
        assert not (tmp_path / "summary.json").exists()

    def test_malformed_is_error(self, tmp_path):
        (tmp_path / "invariants.csv").write_text("time,energy\r\n0.0,1.0\r\n0.5\r\n")
        assert cli.main(["report", str(tmp_path)]) == cli.EXIT_INPUT

    def test_missing_directory(self, tmp_path):
        assert cli.main(["report", str(tmp_path / "absent")]) == cli.EXIT_INPUT

    def test_report_after_simulate(self, tmp_path):
        out = tmp_path / "run"
        cli.main(["--output", str(out), "simulate", str(write_config(tmp_path, SPIN))])
        assert cli.main(["report", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        inv = read_csv(out / "invariants.csv")
        assert summary["columns"]["energy"]["drift"] == pytest.approx(np.ptp(inv["energy"]), abs=0)


class TestBatch:
    def test_per_config_directories(self, tmp_path, capsys):
        a = write_config(tmp_path, SPIN, "spin.json")
        b = write_config(tmp_path, RANDOM_GAUGE, "gauge.json")
        out = tmp_path / "batch"
        assert cli.main(["--output", str(out), "batch", str(a), str(b), "--jobs", "2"]) == 0
        assert (out / "spin" / "invariants.csv").exists()
        assert (out / "gauge" / "invariants.csv").exists()

    def test_invalid_member_fails_before_running(self, tmp_path):
        a = write_config(tmp_path, SPIN, "spin.json")
        b = write_config(tmp_path, dict(SPIN, hbar=0), "bad.json")
        out = tmp_path / "batch"
        assert cli.main(["--output", str(out), "batch", str(a), str(b)]) == cli.EXIT_INPUT
        assert not out.exists()


def test_module_entry_point(tmp_path):
    cfg = write_config(tmp_path, SPIN)
    env = dict(os.environ, **{OUTPUT_ENV: str(tmp_path / "sub")})
    r = subprocess.run([sys.executable, "-m", "quantum_ep", "simulate", str(cfg)],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "sub" / "observables.csv").exists()
