import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stickslip import (
    ConfigError,
    EventKind,
    ForcingProfile,
    RunConfig,
    SimParams,
    parse_config,
    read_trajectory_csv,
    simulate,
    write_trajectory_csv,
)
from stickslip.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main
from stickslip.periodic import default_workers

BASE = {"sigma": 0.3, "forcing": {"sin": [[0.5, 0.0]]}}


class TestParseConfig:
    def test_minimal(self):
        cfg = parse_config(json.dumps(BASE))
        assert cfg.sigma == 0.3 and cfg.k is None
        assert cfg.sin_coeffs == ((0.5, 0.0),) and cfg.cos_coeffs == ()
        assert cfg.u0 == (0.0, 0.0) and cfg.t_span == (0.0, 1.0)
        assert cfg.tolerances.fp_tol == 1e-10 and cfg.seed is None
        assert cfg.profile() == ForcingProfile(sin_coeffs=[[0.5, 0.0]])
        assert cfg.sim_params() == SimParams(0.3)

    def test_missing_sigma(self):
        with pytest.raises(ConfigError, match="missing field sigma"):
            parse_config('{"forcing":{"sin":[[0.5,0]]}}')

    def test_negative_sigma(self):
        with pytest.raises(ConfigError, match="sigma must be > 0"):
            parse_config('{"sigma":-1,"forcing":{"sin":[[0.5,0]]}}')

    def test_parse_error_has_position(self):
        with pytest.raises(ConfigError, match="line 2 column 13"):
            parse_config('{"sigma": 0.3,\n "forcing": }')

    @pytest.mark.parametrize("doc, message", [
        ({**BASE, "sigmaa": 1}, "unknown field"),
        ({**BASE, "forcing": {"sin": [[0.5, 0]], "tan": []}}, "unknown field"),
        ({**BASE, "tolerances": {"rtol": 1e-3}}, "unknown field"),
        ({**BASE, "forcing": {"sin": [[0.5, 0]], "sin_coeffs": [[0.5, 0]]}}, "same field"),
        ({**BASE, "forcing": {"sin": [[0.5]]}}, "2-vector"),
        ({**BASE, "u0": [1, "a"]}, "must be a number"),
        ({**BASE, "t_span": [1, 0]}, "increasing"),
        ({**BASE, "k": 0}, "k must be > 0"),
        ({**BASE, "sigma": True}, "must be a number"),
        ({**BASE, "seed": 1.5}, "seed"),
        ({**BASE, "tolerances": {"event_tol": 1.0}}, "event_tol"),
        ({"sigma": 0.3}, "missing field forcing"),
        ([1, 2], "must be an object"),
    ])
    def test_rejects(self, doc, message):
        with pytest.raises(ConfigError, match=message):
            parse_config(json.dumps(doc))

    def test_long_names_accepted(self):
        cfg = parse_config(json.dumps({"sigma": 1, "forcing": {"cos_coeffs": [[0, 1]], "mean": [3, -1]}}))
        assert cfg.cos_coeffs == ((0.0, 1.0),) and cfg.mean == (3.0, -1.0)


finite = st.floats(-1e3, 1e3, allow_nan=False)
pair = st.tuples(finite, finite)
configs = st.builds(
    RunConfig,
    sigma=st.floats(1e-3, 1e3),
    mean=pair,
    cos_coeffs=st.lists(pair, max_size=3).map(tuple),
    sin_coeffs=st.lists(pair, max_size=3).map(tuple),
    k=st.one_of(st.none(), st.floats(1e-2, 1e6)),
    u0=pair,
    t_span=st.tuples(st.floats(-10, 10), st.floats(0.1, 10)).map(lambda p: (p[0], p[0] + p[1])),
    seed=st.one_of(st.none(), st.integers(0, 2**31)),
)


@settings(max_examples=100)
@given(configs)
def test_round_trip(cfg):
    assert parse_config(cfg.to_json()) == cfg


class TestTrajectoryCsv:
    def test_round_trip_with_events(self, tmp_path, two_d):
        params = SimParams(2.5)
        traj = simulate([0.3, 0.1], 0.0, 2.0, params, two_d)
        path = tmp_path / "traj.csv"
        write_trajectory_csv(traj, path)
        back = read_trajectory_csv(path, params, two_d)
        np.testing.assert_array_equal(back.t, traj.t)
        np.testing.assert_array_equal(back.u, traj.u)
        np.testing.assert_array_equal(back.stick, traj.stick)
        assert back.event_rows == traj.event_rows
        assert [(e.kind, e.t) for e in back.events] == [(e.kind, e.t) for e in traj.events]
        np.testing.assert_allclose(back.udot, traj.udot, atol=1e-12)

    def test_crossings_survive(self, tmp_path, orbit_k100):
        traj = orbit_k100.trajectory
        path = tmp_path / "orbit.csv"
        write_trajectory_csv(traj, path)
        back = read_trajectory_csv(path, traj.params, traj.profile)
        assert back.crossings == traj.crossings
        np.testing.assert_allclose(back.udot, traj.udot, atol=1e-12)

    def test_format(self, tmp_path, single):
        traj = simulate([0.0, 0.0], 0.24, 0.3, SimParams(0.3), single)
        path = tmp_path / "t.csv"
        write_trajectory_csv(traj, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,u_x,u_y,mode,event"
        marked = [ln for ln in lines if ln.endswith(EventKind.STICK_RELEASE.value)]
        assert len(marked) == 1 and marked[0].split(",")[3] == "slip"

    def test_bad_header(self, tmp_path, single):
        path = tmp_path / "bad.csv"
        path.write_text("time,x,y\n0,0,0\n")
        with pytest.raises(ValueError, match="header"):
            read_trajectory_csv(path, SimParams(0.3), single)


def _write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


class TestCli:
    def test_simulate_writes_both_outputs(self, tmp_path, capsys):
        cfg = _write_config(tmp_path, {**BASE, "u0": [1, 0], "t_span": [0, 2]})
        assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_OK
        report = json.loads((tmp_path / "o" / "simulate.json").read_text())
        assert report["config"]["sigma"] == 0.3
        assert report["trajectory"]["final_u"][0] == pytest.approx(0.4, abs=1e-12)
        assert (tmp_path / "o" / "trajectory.csv").exists()
        assert "samples" in capsys.readouterr().out

    def test_periodic_json_only(self, tmp_path):
        cfg = _write_config(tmp_path, {**BASE, "k": 100})
        assert main(["periodic", "--config", str(cfg), "--out", str(tmp_path), "--json"]) == EXIT_OK
        report = json.loads((tmp_path / "periodic.json").read_text())
        assert report["converged"] is True
        assert report["residual"] <= 1e-10
        assert report["bound_report"]["all_ok"] is True
        assert {"sup_u", "L2_udot", "L1_u", "eq9_margin", "eq10_margin"} <= set(report["bound_report"])
        assert not (tmp_path / "orbit.csv").exists()

    def test_verify_reads_csv(self, tmp_path):
        cfg = _write_config(tmp_path, {**BASE, "k": 100})
        assert main(["periodic", "--config", str(cfg), "--out", str(tmp_path), "--csv"]) == EXIT_OK
        code = main(["verify", "--config", str(cfg), "--out", str(tmp_path),
                     "--trajectory", str(tmp_path / "orbit.csv")])
        assert code == EXIT_OK
        assert json.loads((tmp_path / "verify.json").read_text())["all_ok"] is True

    def test_converge(self, tmp_path, monkeypatch):
        monkeypatch.setenv("STICKSLIP_THREADS", "2")
        cfg = _write_config(tmp_path, {"sigma": 7, "forcing": {"sin": [[0.5, 0.0]]}})
        assert main(["converge", "--config", str(cfg), "--out", str(tmp_path), "--k-list", "10,100"]) == EXIT_OK
        report = json.loads((tmp_path / "converge.json").read_text())
        assert [row["k"] for row in report["rows"]] == [10.0, 100.0]

    def test_config_errors_exit_2(self, tmp_path, capsys):
        bad = _write_config(tmp_path, {"forcing": {"sin": [[0.5, 0]]}})
        assert main(["simulate", "--config", str(bad)]) == EXIT_CONFIG
        assert "missing field sigma" in capsys.readouterr().err
        assert main(["simulate", "--config", str(tmp_path / "absent.json")]) == EXIT_CONFIG

    def test_non_periodic_trajectory_exit_2(self, tmp_path):
        cfg = _write_config(tmp_path, {**BASE, "u0": [1, 0]})
        assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path), "--csv"]) == EXIT_OK
        code = main(["verify", "--config", str(cfg), "--trajectory", str(tmp_path / "trajectory.csv")])
        assert code == EXIT_CONFIG

    def test_non_convergence_exit_3(self, tmp_path, capsys):
        cfg = _write_config(tmp_path, {**BASE, "k": 100})
        assert main(["periodic", "--config", str(cfg), "--out", str(tmp_path), "--max-iter", "2"]) == EXIT_NUMERICAL
        assert "did not converge" in capsys.readouterr().err

    def test_bad_k_list_is_usage_error(self, tmp_path):
        cfg = _write_config(tmp_path, BASE)
        with pytest.raises(SystemExit) as exc:
            main(["converge", "--config", str(cfg), "--k-list", "10"])
        assert exc.value.code == 2

    def test_module_entry_point(self, tmp_path):
        cfg = _write_config(tmp_path, {"sigma": 7, "forcing": {"sin": [[0.5, 0.0]]}})
        proc = subprocess.run([sys.executable, "-m", "stickslip", "periodic", "--config", str(cfg),
                               "--out", str(tmp_path)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert "fixed point [0.0, 0.0]" in proc.stdout


@pytest.mark.parametrize("value, expected", [("3", 3), ("0", 1), ("x", 1)])
def test_thread_cap(monkeypatch, value, expected):
    monkeypatch.setenv("STICKSLIP_THREADS", value)
    assert default_workers() == expected
