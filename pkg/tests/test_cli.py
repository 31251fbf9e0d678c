import json
import math
from xml.dom import minidom

import numpy as np
import pytest

from wavetrain.cli import main


def _report(tmp_path):
    with open(tmp_path / "report.json") as fh:
        return json.load(fh)


def test_analyze_saturating_prey(tmp_path, capsys):
    rc = main(["analyze", "--preset", "B", "--v", "2",
               "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "hopf.v_minus" in out
    assert "hopf.omega" in out
    rep = _report(tmp_path)
    assert rep["fixed_point"]["N0"] == pytest.approx(1.0, abs=1e-10)
    assert rep["fixed_point"]["P0"] == pytest.approx(1.25, abs=1e-10)
    b = rep["char_coeffs"]
    assert [b["b1"], b["b2"], b["b3"], b["b4"]] == pytest.approx(
        [3.0, 3.5, 1.5, 1.5], abs=1e-9)
    hopf = rep["hopf"]
    assert hopf["A"] == pytest.approx(9 / 16, rel=1e-9)
    assert hopf["B"] == pytest.approx(-9 / 4, rel=1e-9)
    assert hopf["v_minus"] == pytest.approx(-2.0, rel=1e-9)
    assert hopf["v_plus"] == pytest.approx(2.0, rel=1e-9)
    assert hopf["omega"] == pytest.approx(math.sqrt(0.5), rel=1e-9)
    assert hopf["regime"] == "a"
    assert hopf["degenerate"] is False
    assert hopf["transversality_sign"] == -1


def test_analyze_degenerate_onset(tmp_path):
    rc = main(["analyze", "--preset", "A", "--v", "0.1",
               "--out", str(tmp_path)])
    assert rc == 0
    rep = _report(tmp_path)
    assert rep["hopf"]["degenerate"] is True
    assert rep["hopf"]["v_minus"] == 0.0
    assert rep["hopf"]["v_plus"] == 0.0
    assert rep["char_coeffs"]["b4"] == pytest.approx(-4 / 7, abs=1e-9)
    assert rep["hopf"]["omega"] == pytest.approx(0.7559289460184544,
                                                 abs=1e-6)


def test_analyze_rational_response(tmp_path):
    rc = main(["analyze", "--preset", "E", "--v", "1.8",
               "--out", str(tmp_path)])
    assert rc == 0
    rep = _report(tmp_path)
    hopf = rep["hopf"]
    assert hopf["A"] == pytest.approx(0.3956812328911992, rel=1e-9)
    assert hopf["B"] == pytest.approx(-1.2786814881597592, rel=1e-9)
    assert hopf["v_plus"] == pytest.approx(1.7976637576957402, rel=1e-9)
    assert hopf["omega"] is None
    assert hopf["notes"]  # explains why no onset frequency exists


def test_no_physical_root_exit_code(tmp_path, capsys):
    cfg = tmp_path / "flipped.cfg"
    cfg.write_text("system = A\nbeta = 2.75\n")
    rc = main(["analyze", "--config", str(cfg), "--v", "1.0",
               "--out", str(tmp_path)])
    assert rc == 2
    err = capsys.readouterr().err
    assert "root 0" in err
    assert "--root-index" in err
    rc = main(["analyze", "--config", str(cfg), "--v", "1.0",
               "--root-index", "0", "--out", str(tmp_path)])
    assert rc == 0
    assert _report(tmp_path)["fixed_point"]["physical"] is False


@pytest.mark.parametrize("argv", [
    ["analyze", "--preset", "B"],                      # no wave speed
    ["analyze", "--v", "2"],                           # no model source
    ["analyze", "--preset", "A", "--v", "1", "--format", "bogus"],
    ["simulate", "--preset", "A", "--v", "1", "--span", "5:5"],
    ["sweep", "--preset", "B"],                        # no --v-range
])
def test_config_errors_exit_one(argv, tmp_path, capsys):
    rc = main(argv + ["--out", str(tmp_path)])
    capsys.readouterr()
    assert rc == 1


def test_config_file_errors(tmp_path, capsys):
    rc = main(["analyze", "--config", str(tmp_path / "nope.cfg"),
               "--v", "1"])
    assert rc == 1
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("system = B\nwibble = 3\n")
    rc = main(["analyze", "--config", str(cfg), "--v", "1"])
    assert rc == 1
    both = main(["analyze", "--preset", "B", "--config", str(cfg),
                 "--v", "1"])
    assert both == 1
    capsys.readouterr()


def test_config_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment line\nsystem = B\nv = 1.9\n")
    rc = main(["analyze", "--config", str(cfg), "--out", str(tmp_path)])
    assert rc == 0
    assert _report(tmp_path)["v"] == 1.9
    rc = main(["analyze", "--config", str(cfg), "--v", "2.2",
               "--out", str(tmp_path)])
    assert rc == 0
    assert _report(tmp_path)["v"] == 2.2


def test_simulate_limit_cycle(tmp_path, capsys):
    rc = main(["simulate", "--preset", "B", "--v", "1.9",
               "--ic", "1.05,0,1.3,0", "--span", "0:300",
               "--out", str(tmp_path)])
    assert rc == 0
    assert "limit_cycle" in capsys.readouterr().out
    rep = _report(tmp_path)
    assert rep["summary"]["classification"] == "limit_cycle"
    assert rep["summary"]["peak_spread"] < 0.01
    lines = (tmp_path / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "zeta,N,M,P,Q"
    assert len(lines) > 5000
    meta = json.loads((tmp_path / "trajectory_meta.json").read_text())
    assert meta["termination"] == "completed"
    assert meta["initial_state"] == [1.05, 0.0, 1.3, 0.0]


def test_simulate_blowup(tmp_path, capsys):
    rc = main(["simulate", "--preset", "D", "--v", "-0.2",
               "--out", str(tmp_path)])
    assert rc == 0
    assert "blowup" in capsys.readouterr().out
    rep = _report(tmp_path)
    assert rep["summary"]["classification"] == "blowup"
    assert 50.0 < rep["summary"]["zeta_star"] < 70.0


def test_simulate_decaying_ring(tmp_path, capsys):
    rc = main(["simulate", "--preset", "A", "--v", "0.1",
               "--out", str(tmp_path)])
    assert rc == 0
    capsys.readouterr()
    rep = _report(tmp_path)
    assert rep["summary"]["classification"] == "aperiodic_bounded"
    assert max(abs(x) for x in rep["summary"]["final_state"]) < 1e-3


def test_diagnose_limit_cycle(tmp_path, capsys):
    rc = main(["diagnose", "--preset", "B", "--v", "1.9",
               "--ic", "1.1,0,1.35,0", "--out", str(tmp_path)])
    assert rc == 0
    assert "flatness" in capsys.readouterr().out
    rep = _report(tmp_path)
    assert rep["classification"] == "limit_cycle"
    assert rep["spectral_flatness"] < 0.01
    assert rep["cluster_dimension"] == pytest.approx(1.0, abs=0.2)
    assert abs(rep["dominant_frequency"] - 1 / 8.862) < 0.02
    assert rep["embed_dim"] == 3
    for name, header in [("spectrum.csv", "frequency,power"),
                         ("scaling.csv", "log_n,log_R,local_slope"),
                         ("acf.csv", "lag,acf")]:
        lines = (tmp_path / name).read_text().splitlines()
        assert lines[0] == header
        assert len(lines) > 10


def test_diagnose_blowup_exit_four(tmp_path, capsys):
    rc = main(["diagnose", "--preset", "D", "--v", "-0.2",
               "--out", str(tmp_path)])
    assert rc == 4
    assert "blows up" in capsys.readouterr().err


def test_diagnose_short_run_exit_four(tmp_path, capsys):
    rc = main(["diagnose", "--preset", "B", "--v", "2.2",
               "--ic", "1.05,0,1.3,0", "--span", "0:60",
               "--out", str(tmp_path)])
    assert rc == 4
    assert "post-transient samples" in capsys.readouterr().err


def test_sweep_brackets_onset(tmp_path, capsys):
    rc = main(["sweep", "--preset", "B", "--v-range", "1.5:2.5:11",
               "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "bracketed between v = 1.9 and v = 2" in out
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert len(lines) == 12
    cols = lines[0].split(",")
    rows = [dict(zip(cols, ln.split(","))) for ln in lines[1:]]
    flagged = [float(r["v"]) for r in rows if r["c4_sign_change"] == "true"]
    assert flagged == pytest.approx([1.9])
    data = json.loads((tmp_path / "sweep.json").read_text())
    assert len(data["rows"]) == 11
    stable = {round(r["v"], 3): r["stable"] for r in data["rows"]}
    # oscillatory instability inside the critical window, decay outside
    assert stable[1.9] is False and stable[2.1] is True


def test_sweep_all_stable_with_classification(tmp_path, capsys):
    rc = main(["sweep", "--preset", "B", "--v-range", "2.1:2.5:5",
               "--simulate", "--ic", "1.05,0,1.3,0", "--workers", "2",
               "--out", str(tmp_path)])
    assert rc == 0
    assert "bracketed" not in capsys.readouterr().out
    data = json.loads((tmp_path / "sweep.json").read_text())
    for row in data["rows"]:
        assert row["stable"] is True
        assert row["c4_sign_change"] is False
    # right at v = 2.1 the decay is slow enough that 300 units of the
    # transient still look periodic; from 2.2 on the settling is clear
    assert data["rows"][0]["classification"] in ("limit_cycle",
                                                 "decay_to_fixed_point")
    for row in data["rows"][1:]:
        assert row["classification"] == "decay_to_fixed_point"


def test_sweep_linear_growth_transition(tmp_path, capsys):
    rc = main(["sweep", "--preset", "D", "--v-range", "-6:-4.5:7",
               "--out", str(tmp_path)])
    assert rc == 0
    capsys.readouterr()
    data = json.loads((tmp_path / "sweep.json").read_text())
    flagged = [r["v"] for r in data["rows"] if r["c4_sign_change"]]
    assert len(flagged) == 1
    assert -5.25 - 1e-12 <= flagged[0] <= -5.0  # true onset near -5.033


def test_presets_listing(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    for sysid in "ABCDE":
        assert f"{sysid}: " in out


def test_report_json_roundtrip(tmp_path):
    rc = main(["analyze", "--preset", "D", "--v", "-5.03",
               "--out", str(tmp_path)])
    assert rc == 0
    raw = (tmp_path / "report.json").read_text()
    obj = json.loads(raw)
    assert json.dumps(obj, indent=2, sort_keys=True) + "\n" == raw


def test_svg_deterministic_and_valid(tmp_path, capsys):
    d1 = tmp_path / "one"
    d2 = tmp_path / "two"
    for d in (d1, d2):
        rc = main(["simulate", "--preset", "B", "--v", "1.9",
                   "--ic", "1.05,0,1.3,0", "--span", "0:300",
                   "--format", "svg", "--out", str(d)])
        assert rc == 0
    capsys.readouterr()
    b1 = (d1 / "wave_profile.svg").read_bytes()
    b2 = (d2 / "wave_profile.svg").read_bytes()
    assert b1 == b2
    doc = minidom.parseString(b1)
    assert doc.documentElement.tagName == "svg"


def test_diagnose_svg_outputs(tmp_path, capsys):
    rc = main(["diagnose", "--preset", "B", "--v", "1.9",
               "--ic", "1.1,0,1.35,0", "--format", "structured,svg",
               "--out", str(tmp_path)])
    assert rc == 0
    capsys.readouterr()
    for name in ("spectrum.svg", "scaling.svg"):
        doc = minidom.parseString((tmp_path / name).read_bytes())
        assert doc.documentElement.tagName == "svg"
    assert not (tmp_path / "spectrum.csv").exists()


def test_embed_dim_flag(tmp_path, capsys):
    rc = main(["diagnose", "--preset", "B", "--v", "1.9",
               "--ic", "1.1,0,1.35,0", "--embed-dim", "2",
               "--format", "structured", "--out", str(tmp_path)])
    assert rc == 0
    capsys.readouterr()
    rep = _report(tmp_path)
    assert rep["embed_dim"] == 2
    assert rep["cluster_dimension"] == pytest.approx(1.0, abs=0.2)


def test_peak_count_error_exit_one(tmp_path, capsys):
    rc = main(["simulate", "--preset", "B", "--v", "1.9",
               "--ic", "1.05,0,1.3,0", "--span", "0:30",
               "--out", str(tmp_path)])
    assert rc == 1
    assert "widen --span" in capsys.readouterr().err


def test_run_keys_from_config(tmp_path):
    cfg = tmp_path / "sim.cfg"
    cfg.write_text("system = B\nv = 1.9\nic = 1.05,0,1.3,0\n"
                   "span = 0:300\nsample_interval = 0.1\n")
    rc = main(["simulate", "--config", str(cfg), "--out", str(tmp_path)])
    assert rc == 0
    rep = _report(tmp_path)
    assert rep["summary"]["classification"] == "limit_cycle"
    assert rep["run"]["sample_interval"] == 0.1
    assert rep["run"]["initial_state"] == [1.05, 0.0, 1.3, 0.0]


def test_parameter_override_flags(tmp_path):
    cfg = tmp_path / "weak.cfg"
    cfg.write_text("system = B\nalpha = -1.0\n")
    rc = main(["analyze", "--config", str(cfg), "--v", "2",
               "--out", str(tmp_path)])
    assert rc == 0
    rep = _report(tmp_path)
    assert rep["params"]["alpha"] == -1.0
    assert rep["fixed_point"]["P0"] == pytest.approx(1.5, abs=1e-12)
