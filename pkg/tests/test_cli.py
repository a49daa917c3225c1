import json
import subprocess
import sys

import pytest

from class_sieve.cli import Config, cache_path, main


@pytest.fixture(autouse=True)
def cache(tmp_path, monkeypatch):
    monkeypatch.setenv("CLASS_SIEVE_CACHE", str(tmp_path / "cache"))
    return tmp_path / "cache"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_config_reads_environment(cache):
    assert Config().cache_dir == cache


def test_enumerate_writes_cache(capsys, cache):
    code, out, _ = run(capsys, "enumerate", "2", "--x", "1000")
    assert code == 0
    assert out.startswith("N=")
    assert cache_path(Config(), 2, 1000, "both").exists()
    code, out, _ = run(capsys, "enumerate", "3", "--x", "500")
    assert code == 0 and "N=70 " in out


@pytest.mark.parametrize("degree,word", [("4", "quartic"), ("5", "quintic")])
def test_enumerate_out_of_scope(capsys, degree, word):
    code, _, err = run(capsys, "enumerate", degree, "--x", "100")
    assert code == 2
    assert f"{word} enumeration out of scope" in err


def test_count_quadratic(capsys):
    code, out, _ = run(capsys, "count", "2", "--x", "20000", "--split", "3", "--inert", "5")
    assert code == 0
    res = json.loads(out)
    assert res["agree"] and res["direct"] == res["inclusion_exclusion"]
    assert res["delta"] == "5/32"


def test_count_cubic_csv(capsys):
    code, out, _ = run(capsys, "count", "3", "--x", "3000", "--split", "2", "--format", "csv")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header.startswith("X,split,count")


def test_count_cubic_rejects_inert(capsys):
    code, _, err = run(capsys, "count", "3", "--x", "3000", "--inert", "2")
    assert code == 2 and "split" in err


def test_sieve_commands(capsys):
    code, out, _ = run(capsys, "sieve", "synthetic", "--instances", "5", "--seed", "7")
    assert code == 0 and json.loads(out)["all_hold"]
    code, out, _ = run(capsys, "sieve", "quadratic", "--x", "20000", "--delta", "1/6")
    res = json.loads(out)
    assert code == 0 and res["holds"] and res["delta"] == "1/6"
    assert 0 < res["c0"] <= res["c1"]


def test_torsion_even_ell_real_fails(capsys):
    code, _, err = run(capsys, "torsion", "--x", "100", "--ell", "2", "--sign", "real")
    assert code == 2 and "even ell" in err


def test_torsion_and_report(capsys, tmp_path):
    out_json = tmp_path / "t.json"
    code, out, _ = run(capsys, "torsion", "--x", "10000", "--ell", "3", "--out", str(out_json))
    assert code == 0
    rep = json.loads(out_json.read_text())
    assert rep["per_scale"][-1]["sum_torsion"] == 5167
    code, out, _ = run(capsys, "report", str(out_json))
    assert code == 0
    assert out.splitlines()[0] == "key,value"
    assert "per_scale[1].sum_torsion,5167" in out


def test_densities(capsys):
    code, out, _ = run(capsys, "densities", "--degree", "2", "--primes", "2,3")
    assert code == 0
    assert "2,2,11,1/3," in out


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "class_sieve.cli", "densities", "--degree", "3",
                          "--primes", "5"], capture_output=True, text=True)
    assert res.returncode == 0 and "25/186" in res.stdout
