import io
import json

import numpy as np
import pytest

from pidmodel.binned import load_binned
from pidmodel.cli import dispatch

from conftest import CONFIGS, DATA

GDP = str(DATA / "gdp.csv")


def run(*argv):
    out = io.StringIO()
    code = dispatch([str(a) for a in argv], out)
    return code, out.getvalue()


def test_gini_equality(tmp_path):
    pid = tmp_path / "eq.csv"
    pid.write_text("lower,upper,count,mean_income\n10,20,500,\n")
    code, out = run("gini", "--pid", pid, "--out", tmp_path)
    assert code == 0
    rec = json.loads(out)
    assert rec["gini"] == 0 and rec["open_bin_mode"] == "drop" and rec["k"] is None
    assert (tmp_path / "lorenz.csv").read_text() == "x,y\n0.0,0.0\n1.0,1.0\n"


def test_gini_zero_count_and_open(tmp_path):
    code, out = run("gini", "--pid", DATA / "irs_2004.csv", "--open-bin", "pareto:1.3", "--bin-income", "offset",
                    "--zero-count", "1000", "--out", tmp_path)
    rec = json.loads(out)
    assert code == 0 and rec["open_bin_mode"] == "pareto" and rec["k"] == 1.3 and rec["x_m"] == 1e7
    assert 0.4 < rec["gini"] < 0.8


def test_pareto_fit_irs(tmp_path):
    code, out = run("pareto-fit", "--pid", DATA / "irs_2004.csv", "--threshold", 200000, "--method", "regression")
    rec = json.loads(out)
    assert code == 0 and rec["convention"] == "paper" and rec["bins_used"] == 6
    assert np.isfinite(rec["k"]) and rec["k"] > 0
    code, out = run("pareto-fit", "--pid", DATA / "irs_2004.csv", "--threshold", 200000,
                    "--convention", "standard")
    assert json.loads(out)["k"] == pytest.approx(rec["k"] + 1)


def test_normalize(tmp_path):
    code, out = run("normalize", "--pid", DATA / "irs_1990.csv", "--per-person", "--gpi", 3.41e12, "--density",
                    "--out", tmp_path)
    assert code == 0
    assert json.loads(out)["normalization"] == "per-person-per-dimensionless-income"
    lines = (tmp_path / "density.csv").read_text().splitlines()
    assert lines[0] == "income,density,width" and len(lines) == 18
    code, _ = run("normalize", "--pid", DATA / "irs_1990.csv", "--rescale", 1000, "--out", tmp_path / "r")
    assert code == 0
    assert load_binned(tmp_path / "r" / "pid.csv").upper[1] == 5.0


def test_simulate(tmp_path):
    code, out = run("simulate", "--config", CONFIGS / "baseline_1960.cfg", "--gdp", GDP, "--pyramid", "uniform:1000",
                    "--years", "2001..2002", "--out", tmp_path)
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert [r["year"] for r in recs] == [2001, 2002]
    assert set(recs[0]) == {"year", "gini", "tail_share", "extra_income_ratio", "tcr", "mp", "scale"}
    assert recs[1]["tcr"] == pytest.approx(39, abs=1)
    assert (tmp_path / "2002" / "bands.csv").read_text().startswith("band_lo,band_hi,mean,median,norm_mean,norm_median\n")
    pid = load_binned(tmp_path / "2002" / "pid.csv", units="dimensionless")
    assert pid.total == pytest.approx(60000, rel=1e-12)


def test_simulate_project_and_set(tmp_path):
    code, out = run("simulate", "--gdp", GDP, "--pyramid", "linear:2000:-20", "--years", "2004..2004",
                    "--project", "0.016:2005", "--set", "k=1.5", "--set", "tail_convention=standard",
                    "--anchor", "2000:120000", "--out", tmp_path)
    assert code == 0
    assert json.loads(out)["year"] == 2004


def test_simulate_pyramid_file(tmp_path):
    pyr = tmp_path / "p.csv"
    pyr.write_text("year,age,population\n" + "".join(f"{y},{a},100\n" for y in range(1960, 1971) for a in range(16, 76)))
    code, _ = run("simulate", "--gdp", GDP, "--pyramid", pyr, "--years", "1965..1970", "--out", tmp_path / "o")
    assert code == 0
    assert sorted(p.name for p in (tmp_path / "o").iterdir()) == [str(y) for y in range(1965, 1971)]


def test_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert run("simulate", "--gdp", GDP, "--pyramid", "uniform:7", "--years", "1999..2000",
                   "--out", tmp_path / d)[0] == 0
    for name in ("pid.csv", "bands.csv", "summary.json"):
        for year in ("1999", "2000"):
            assert (tmp_path / "a" / year / name).read_bytes() == (tmp_path / "b" / year / name).read_bytes()


def test_calibrate(tmp_path, series):
    from pidmodel.demography import stationary_pyramids, synthetic_pyramid
    from pidmodel.binned import save_binned
    from pidmodel.synthesis import simulate_year, to_binned
    from pidmodel.trajectory import PRESETS, build_context

    params = PRESETS[1960]
    ctx = build_context(params, series, 2000)
    pyr = stationary_pyramids(synthetic_pyramid(1960, "uniform", level=50), range(1960, 2001))
    obs = tmp_path / "obs"
    obs.mkdir()
    for y in (1990, 2000):
        save_binned(to_binned(simulate_year(params, ctx, pyr, y), 0.01), obs / f"{y}.csv")
    code, out = run("calibrate", "--obs", obs, "--gdp", GDP, "--pyramid", "uniform:50", "--alpha", "0.086:0.088:0.001",
                    "--tcr", "26:27:0.5", "--out", tmp_path / "fit")
    assert code == 0
    best = json.loads(out)
    assert (best["alpha0"], best["tcr0"]) == (0.087, 26.5)
    assert len((tmp_path / "fit" / "misfit.csv").read_text().splitlines()) == 10


def test_usage_errors(capsys):
    assert run()[0] == 1
    assert run("bogus")[0] == 1
    assert run("gini", "--pid", "x", "--wat")[0] == 1
    assert run("gini")[0] == 1
    assert run("simulate", "--gdp", GDP, "--pyramid", "uniform:1", "--years", "2000-2001")[0] == 1
    assert run("simulate", "--gdp", GDP, "--pyramid", "uniform:1", "--years", "2001..2000")[0] == 1
    assert run("gini", "--pid", "x", "--open-bin", "pareto:x")[0] == 1
    assert "usage" in capsys.readouterr().err


def test_data_errors(tmp_path, capsys):
    assert run("gini", "--pid", tmp_path / "missing.csv")[0] == 2
    assert "missing.csv" in capsys.readouterr().err
    bad = tmp_path / "bad.csv"
    bad.write_text("lower,upper,count,mean_income\n0,10,5,\n10,20,-3,\n")
    assert run("gini", "--pid", bad, "--out", tmp_path)[0] == 2
    assert f"{bad}:3:" in capsys.readouterr().err
    assert run("simulate", "--gdp", GDP, "--pyramid", "uniform:1", "--years", "2000..2010", "--out", tmp_path)[0] == 2
    assert run("calibrate", "--obs", tmp_path / "none", "--gdp", GDP, "--pyramid", "uniform:1",
               "--alpha", "0.08:0.09:0.01", "--tcr", "26:27:1")[0] == 2
