import csv
import math

import numpy as np
import pytest

from sgthermal.assembly import REFERENCE_GEOMETRY, Face
from sgthermal.cli import main
from sgthermal.scenario import (
    Scenario,
    ScenarioError,
    bundled_path,
    dump_scenario,
    load_scenario,
    parse_profile,
    parse_scenario,
)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=object)


def write_scenario(tmp_path, text, name="s.scenario"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# --- scenario files ---------------------------------------------------------------

@pytest.mark.parametrize("name", ["case1", "case2", "adiabatic"])
def test_bundled_scenarios_round_trip(name):
    sc = load_scenario(name)
    again = parse_scenario(dump_scenario(sc))
    assert again == sc


def test_defaults_for_missing_sections():
    sc = parse_scenario("[solver]\nn_r = 3\n")
    assert sc.n_r == 3
    assert sc.geometry == Scenario().geometry


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("[bogus]\nx = 1\n", "bogus"),
        ("[props]\nk_r_W_mK = abc\n", "k_r_W_mK"),
        ("[props]\nk_r_W_mK = 0\n", "k_r"),
        ("[geometry]\nr_in_m = 0.04\n", "r_in"),
        ("[face.radial_outer]\nh_W_m2K = -3\n", "h"),
        ("[solver]\nfd_grid = 141by71\n", "grid"),
        ("[validate]\noutputs = T9\n", "T9"),
    ],
)
def test_schema_errors(text, fragment):
    with pytest.raises(ScenarioError, match=fragment):
        parse_scenario(text)


def test_profile_power_column_is_converted():
    prof = parse_profile("t_s,P_W\n0,1.0\n10,0\n", REFERENCE_GEOMETRY)
    assert prof.value_at(5.0) == pytest.approx(1.0 / REFERENCE_GEOMETRY.volume)
    assert prof.duration == 10.0


@pytest.mark.parametrize(
    "text",
    ["", "time,q\n0,1\n5,0\n", "t_s,q_W_per_m3\n0,1\n", "t_s,q_W_per_m3\n0,x\n5,0\n",
     "t_s,q_W_per_m3\n0,1,2\n5,0\n", "t_s,q_W_per_m3\n5,1\n0,0\n"],
)
def test_profile_errors(text):
    with pytest.raises(ScenarioError):
        parse_profile(text, REFERENCE_GEOMETRY)


def test_bundled_pulse_profile():
    prof = parse_profile(bundled_path("pulse.profile").read_text(), REFERENCE_GEOMETRY)
    assert prof.duration == 1200.0
    assert prof.value_at(10.0) == 2e5 and prof.value_at(60.0) == 0.0


# --- CLI ---------------------------------------------------------------------------

def test_simulate_case1(tmp_path):
    rc = main(["simulate", "--scenario", "case1", "--out", str(tmp_path), "--field-times", "30"])
    assert rc == 0
    header, rows = read_csv(tmp_path / "outputs.csv")
    assert header == ["t_s", "T1_degC", "T2_degC", "T3_degC", "T4_degC", "Tmean_degC"]
    data = rows.astype(float)
    assert data.shape == (1201, 6)
    k = int(np.searchsorted(data[:, 0], 30.0))
    assert data[k, 1] > data[k, 3]  # core hotter than the surface while heating
    assert (tmp_path / "outputs.svg").exists()
    assert (tmp_path / "field_t30.csv").exists() and (tmp_path / "field_t30.svg").exists()


def test_simulate_case2_cooled_end_is_colder(tmp_path):
    assert main(["simulate", "--scenario", "case2", "--out", str(tmp_path), "--no-plots"]) == 0
    data = read_csv(tmp_path / "outputs.csv")[1].astype(float)
    assert np.all(data[1:, 2] < data[1:, 4])
    assert not list(tmp_path.glob("*.svg"))


def test_simulate_adiabatic_energy_slope(tmp_path):
    assert main(["simulate", "--scenario", "adiabatic", "--out", str(tmp_path), "--no-plots"]) == 0
    data = read_csv(tmp_path / "outputs.csv")[1].astype(float)
    rate = 1e5 / (2118 * 765)
    # the CSV carries 9 significant digits, i.e. ~1e-7 K at these temperatures
    np.testing.assert_allclose(data[:, 5] - 18.0, rate * data[:, 0], atol=2e-7)
    assert data[-1, 5] - data[0, 5] == pytest.approx(rate * 100.0, rel=1e-7)


def test_simulate_with_explicit_profile(tmp_path):
    prof = tmp_path / "p.csv"
    prof.write_text("t_s,P_W\n0,5\n20,0\n")
    assert main(["simulate", "--scenario", "case1", "--profile", str(prof),
                 "--out", str(tmp_path), "--no-plots", "--dt", "2"]) == 0
    data = read_csv(tmp_path / "outputs.csv")[1].astype(float)
    assert data[-1, 0] == 20.0 and len(data) == 11


def test_schema_error_exit_code(tmp_path, capsys):
    bad = write_scenario(tmp_path, "[props]\nk_r_W_mK = 0\n")
    assert main(["simulate", "--scenario", bad, "--out", str(tmp_path)]) == 2
    assert "k_r" in capsys.readouterr().err
    assert not (tmp_path / "outputs.csv").exists()
    assert main(["simulate", "--scenario", str(tmp_path / "missing.scenario"),
                 "--out", str(tmp_path)]) == 2


def test_numeric_error_exit_code(tmp_path):
    # steady start without any convective face has no solution
    text = bundled_path("adiabatic.scenario").read_text().replace("initial = 18", "initial = equilibrium")
    sc = write_scenario(tmp_path, text)
    assert main(["simulate", "--scenario", sc, "--out", str(tmp_path), "--no-plots"]) == 3


def test_freqsweep_is_deterministic(tmp_path):
    args = ["freqsweep", "--scenario", "case1", "--orders", "1,4", "--baseline", "49",
            "--no-plots", "--points-per-decade", "3"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    raw = (a / "freqresp.csv").read_bytes()
    assert raw == (b / "freqresp.csv").read_bytes()
    assert b"\r" not in raw
    header, rows = read_csv(a / "freqresp.csv")
    assert header == ["f_hz", "order", "mag_K_per_Wm3", "relerr"]
    assert len(rows) == 2 * 13


def test_freqsweep_h_values(tmp_path):
    assert main(["freqsweep", "--scenario", "case1", "--orders", "1,4", "--baseline", "49",
                 "--h-values", "10,100", "--points-per-decade", "2", "--no-plots",
                 "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "freqresp.csv")
    assert header[:2] == ["h_W_m2K", "Bi"]
    bi = {float(r[0]): float(r[1]) for r in rows}
    assert bi[100.0] / bi[10.0] == pytest.approx(10.0)


def test_freqsweep_rejects_non_square_order(tmp_path):
    assert main(["freqsweep", "--scenario", "case1", "--orders", "3", "--out", str(tmp_path)]) == 2


@pytest.mark.parametrize("name", ["case1", "case2"])
def test_validate_bundled_cases(tmp_path, name, capsys):
    rc = main(["validate", "--scenario", name, "--out", str(tmp_path), "--no-plots", "--grid", "61x31"])
    assert rc == 0
    assert capsys.readouterr().out.strip().endswith("PASS")
    header, rows = read_csv(tmp_path / "validate.csv")
    assert header == ["order", "output", "max_abs_degC", "rms_degC", "threshold_degC", "status"]
    assert set(rows[:, 5]) <= {"PASS", "info"}
    assert rows[-1, 1] == "order_improves"


def test_validate_failure_exit_code(tmp_path):
    text = bundled_path("case1.scenario").read_text().replace("max_abs_degC = 0.5", "max_abs_degC = 0.001")
    sc = write_scenario(tmp_path, text)
    prof = tmp_path / "short.profile"
    prof.write_text("t_s,q_W_per_m3\n0,2e5\n60,0\n")
    assert main(["validate", "--scenario", sc, "--profile", str(prof), "--out", str(tmp_path),
                 "--no-plots", "--grid", "31x17"]) == 4
    status = read_csv(tmp_path / "validate.csv")[1][:, 5]
    assert "FAIL" in status


def test_export_model(tmp_path):
    assert main(["export-model", "--scenario", "case1", "--n-r", "3", "--n-z", "2",
                 "--out", str(tmp_path)]) == 0
    E = np.loadtxt(tmp_path / "E.csv", delimiter=",")
    A = np.loadtxt(tmp_path / "A.csv", delimiter=",")
    B = np.loadtxt(tmp_path / "B.csv", delimiter=",")
    C = np.loadtxt(tmp_path / "C.csv", delimiter=",")
    assert E.shape == A.shape == (6, 6)
    assert B.shape == (6, 2) and C.shape == (5, 6)
    assert np.loadtxt(tmp_path / "Te_out.csv", delimiter=",").shape == (5,)
    np.testing.assert_allclose(E, E.T, rtol=1e-8)
    assert np.all(np.linalg.eigvalsh(E) > 0)


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "sgthermal", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("simulate", "freqsweep", "validate", "export-model"):
        assert cmd in proc.stdout
