import json
import subprocess
import sys

import pytest

from harmzeros.cli import parse_complex, parse_grid
from harmzeros.errors import InputError

CLI = [sys.executable, "-m", "harmzeros.cli"]


def run(*args, **kw):
    return subprocess.run(CLI + list(args), capture_output=True, text=True, **kw)


def test_parse_complex_forms():
    assert parse_complex("1+2i") == 1 + 2j
    assert parse_complex("-0.5i") == -0.5j
    assert parse_complex("i") == 1j
    assert parse_complex("-i") == -1j
    assert parse_complex("2") == 2 + 0j
    assert parse_complex("1e-3-2.5e2i") == 1e-3 - 250j
    assert parse_complex("-1.5-0.25i") == -1.5 - 0.25j


def test_parse_complex_rejects_garbage():
    for bad in ("", "1 + 2i", "abc", "1+2j", "2i+1", "inf", "nan+1i"):
        with pytest.raises(InputError):
            parse_complex(bad)


def test_parse_grid():
    lo, hi, n = parse_grid("-1:1:9")
    assert (lo, hi, n) == (-1.0, 1.0, 9)
    for bad in ("1:2", "2:1:5", "0:1:1", "0:1:5000", "a:b:c"):
        with pytest.raises(InputError):
            parse_grid(bad)


def test_zeros_json_output(tmp_path):
    out = tmp_path / "census.json"
    res = run("zeros", "--lens", "power", "--k", "2", "--eta", "0+0i",
              "--json", str(out))
    assert res.returncode == 0
    data = json.loads(out.read_text())
    assert data["counts"]["N"] == 4
    assert data["counts"]["N_plus"] == 3
    assert data["counts"]["N_minus"] == 1
    assert len(data["zeros"]) == 4


def test_zeros_stdout_contains_counts():
    res = run("zeros", "--lens", "power", "--k", "2", "--eta", "0.1+0.05i")
    assert res.returncode == 0
    assert "N" in res.stdout


def test_malformed_eta_exits_one():
    res = run("zeros", "--lens", "power", "--eta", "banana")
    assert res.returncode == 1


def test_lens_and_input_both_given_exits_one(tmp_path):
    lens = tmp_path / "lens.json"
    lens.write_text(json.dumps({
        "type": "rational", "p": [[0, 0], [0, 0], [1, 0]], "q": [[1, 0]],
    }))
    res = run("zeros", "--lens", "power", "--input", str(lens), "--eta", "0+0i")
    assert res.returncode == 1
    res = run("zeros", "--eta", "0+0i")
    assert res.returncode == 1


def test_input_file_lens(tmp_path):
    lens = tmp_path / "lens.json"
    lens.write_text(json.dumps({
        "type": "rational", "p": [[0, 0], [0, 0], [1, 0]], "q": [[1, 0]],
    }))
    res = run("zeros", "--input", str(lens), "--eta", "0+0i")
    assert res.returncode == 0

    missing = run("zeros", "--input", str(tmp_path / "nope.json"), "--eta", "0+0i")
    assert missing.returncode == 1


def test_critical_and_caustics_csv(tmp_path):
    crit = tmp_path / "crit.csv"
    res = run("critical", "--lens", "power", "--k", "2", "--csv", str(crit))
    assert res.returncode == 0
    lines = crit.read_text().strip().split("\n")
    assert lines[0] == "curve_id,idx,theta,re,im,is_cusp,cusp_value"
    assert "np.float64" not in lines[1]

    caus = tmp_path / "caus.csv"
    res = run("caustics", "--lens", "power", "--k", "2", "--csv", str(caus))
    assert res.returncode == 0
    lines = caus.read_text().strip().split("\n")
    assert lines[0] == "caustic_id,idx,re,im,is_cusp"
    assert "np.float64" not in lines[1]


def test_sweep_grid_too_large_exits_one():
    res = run("sweep", "--lens", "power", "--k", "2",
              "--re=-1:1:5000", "--im=-1:1:3")
    assert res.returncode == 1


def test_sweep_csv(tmp_path):
    out = tmp_path / "map.csv"
    res = run("sweep", "--lens", "power", "--k", "2",
              "--re=-0.4:0.4:3", "--im=-0.4:0.4:3", "--csv", str(out))
    assert res.returncode == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "re,im,N,N_plus,N_minus,flags"
    assert len(lines) == 10


def test_crossing_pass_exit_zero():
    res = run("crossing", "--lens", "power", "--k", "2", "--path", "0+0i,1.2+0.2i")
    assert res.returncode == 0
    assert "pass" in res.stdout


def test_crossing_bad_path_exits_one():
    res = run("crossing", "--lens", "power", "--k", "2", "--path", "0+0i")
    assert res.returncode == 1
    res = run("crossing", "--lens", "power", "--k", "2", "--path", "0+0i,zzz")
    assert res.returncode == 1


def test_verify_fold_suite_power():
    res = run("verify", "--suite", "fold", "--lens", "power", "--k", "2")
    assert res.returncode == 0
    lines = [l for l in res.stdout.strip().split("\n") if l.startswith("[")]
    assert len(lines) == 8
    assert all("pass" in l for l in lines)


def test_plot_deterministic_and_marker_counts(tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for target in (a, b):
        res = run("plot", "--lens", "power", "--k", "2", "--eta", "0+0i",
                  "--svg", str(target))
        assert res.returncode == 0
    sa, sb = a.read_text(), b.read_text()
    assert sa == sb
    # marker counts match the census at eta = 0
    assert sa.count('class="zero-preserving"') == 3
    assert sa.count('class="zero-reversing"') == 1
    assert sa.count('class="zero-singular"') == 0
    assert sa.count('class="critical-curve"') == 1
    assert sa.count('class="caustic"') == 1


def test_unknown_subcommand_exits_one():
    res = run("frobnicate")
    assert res.returncode == 1
