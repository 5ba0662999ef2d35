import subprocess
import sys

import pytest

from reinject import cli
from reinject.errors import SimulationError
from reinject.export import read_csv

SHORT = "sim.duration_s = 0.2\nanalysis.start_cycle = 5\nanalysis.cycles = 4\n"


@pytest.fixture
def cfg(tmp_path):
    def make(extra=""):
        path = tmp_path / "sc.cfg"
        path.write_text(SHORT + extra)
        return str(path)

    return make


def test_levels_default(capsys):
    assert cli.main(["levels"]) == 0
    rows = capsys.readouterr().out.splitlines()[1:]
    got = [tuple(r.split()) for r in rows]
    assert [g[0] for g in got] == ["000", "001", "010", "011", "100", "101", "110", "111"]
    assert [int(g[1]) for g in got] == [-7, -5, -3, -1, 1, 3, 5, 7]
    assert [float(g[2]) for g in got] == [-7.0, -5.0, -3.0, -1.0, 1.0, 3.0, 5.0, 7.0]


def test_levels_options(capsys):
    assert cli.main(["levels", "-p", "2", "--v-dc", "100"]) == 0
    out = capsys.readouterr().out
    assert "-150" in out and "150" in out and len(out.splitlines()) == 5
    assert cli.main(["levels", "-p", "0"]) == 2


def test_simulate_writes_csv_and_summary(cfg, tmp_path, capsys):
    out = tmp_path / "run.csv"
    assert cli.main(["simulate", "--config", cfg("sim.output = v_load_*, p\n"), "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "load THD" in text and "mean p" in text
    b = read_csv(out)
    assert list(b.signals) == ["v_load_a", "v_load_b", "v_load_c", "p"]
    assert b.n_samples == 20001


def test_simulate_quiet(cfg, tmp_path, capsys):
    out = tmp_path / "run.csv"
    assert cli.main(["--quiet", "simulate", "--config", cfg(), "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert out.exists()


def test_simulate_reports_recovery(cfg, tmp_path, capsys):
    doc = "converter.v_dc_volt = 2800\nevents[0].kind = sag\nevents[0].start_s = 0.1\nevents[0].magnitude = 0.7\n"
    assert cli.main(["simulate", "--config", cfg(doc), "--out", str(tmp_path / "r.csv")]) == 0
    assert "sag at 0.1 s: load rms recovery" in capsys.readouterr().out


def test_config_error_exit(cfg, tmp_path, capsys):
    assert cli.main(["simulate", "--config", cfg("converter.stages = 0\n"), "--out", str(tmp_path / "x.csv")]) == 2
    err = capsys.readouterr().err
    assert "converter.stages" in err and "line 4" in err
    assert cli.main(["simulate", "--config", str(tmp_path / "absent.cfg")]) == 2


def test_unwritable_output_exit(cfg, tmp_path):
    assert cli.main(["simulate", "--config", cfg(), "--out", str(tmp_path / "no" / "x.csv")]) == 2


def test_simulation_error_exit(cfg, monkeypatch, capsys):
    def boom(sc):
        raise SimulationError("non-finite state at t=0.01 s, phase a")

    monkeypatch.setattr(cli, "run_simulation", boom)
    assert cli.main(["simulate", "--config", cfg()]) == 3
    assert "non-finite" in capsys.readouterr().err


def test_thd_command(cfg, tmp_path, capsys):
    out = tmp_path / "run.csv"
    cli.main(["--quiet", "simulate", "--config", cfg(), "--out", str(out)])
    assert cli.main(["thd", str(out), "v_load_a_V", "--cycles", "4", "--start-cycle", "5"]) == 0
    assert "THD" in capsys.readouterr().out
    # the default 75..125 window does not fit a 10-cycle record
    assert cli.main(["thd", str(out), "v_load_a_V"]) == 4
    assert cli.main(["thd", str(out), "v_nothing_V", "--cycles", "4"]) == 4


def test_compare_stages_sweep(cfg, capsys):
    assert cli.main(["compare-stages", "--config", cfg(), "--sweep"]) == 0
    out = capsys.readouterr().out
    assert "p=1:" in out and "p=2:" in out and "p=3:" in out
    assert "non-increasing with stage count: yes" in out


def test_stage_thds_monotone():
    from reinject.scenario import Scenario

    res = cli.stage_thds(Scenario(duration=0.2, start_cycle=5, cycles=4), [1, 2, 3])
    assert res[1] > res[2] > res[3]


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "reinject.cli", "levels", "-p", "1"], capture_output=True, text=True)
    assert r.returncode == 0
    assert len(r.stdout.splitlines()) == 3
