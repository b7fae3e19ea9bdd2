import json
import math

import pytest

from main import main
from src.config.settings import VERSION
from src.experiments import thm6_variance
from src.sieve import PrimeCache

THM6_CONFIG = """
[run]
workers = 1

[experiment]
kind = "thm6_variance"
X1 = 200
X2 = 150
Y = 100
R = 20
P_max = 10000
"""


def _json_lines(out):
    return [json.loads(line) for line in out.strip().splitlines()]


def _write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_no_command_prints_usage(capsys):
    assert main([]) == 1
    assert "usage" in capsys.readouterr().out.lower()


def test_version(capsys):
    with pytest.raises(SystemExit) as exit_info:
        main(["--version"])
    assert exit_info.value.code == 0
    assert VERSION in capsys.readouterr().out


def test_rejects_zero_workers():
    assert main(["--workers", "0", "arith", "factor", "--n", "12"]) == 1


@pytest.mark.parametrize("argv", [
    ["find"],
    ["series", "--kind", "bogus"],
    ["--workers", "many", "arith", "factor", "--n", "12"],
    ["bogus"],
])
def test_usage_errors_exit_with_one(argv, capsys):
    with pytest.raises(SystemExit) as exit_info:
        main(argv)
    assert exit_info.value.code == 1
    assert "usage" in capsys.readouterr().err.lower()


def test_series_binary(capsys):
    assert main(["series", "--kind", "binary", "--r", "2", "--p-max", "100000"]) == 0
    (row,) = _json_lines(capsys.readouterr().out)
    assert row["form"] == "product"
    assert row["value"] == pytest.approx(1.3203236, abs=1e-5)
    assert row["prime_cutoff"] == 100000


def test_series_output_file(tmp_path):
    target = tmp_path / "out" / "series.json"
    assert main(["--output", str(target), "series", "--r", "4", "--p-max", "1000"]) == 0
    (row,) = _json_lines(target.read_text())
    assert row["kind"] == "binary"


@pytest.mark.parametrize("argv", [
    ["series", "--r", "0"],
    ["series", "--kind", "binary"],
    ["series", "--kind", "ternary_two_ap", "--n", "101", "--q1", "3"],
])
def test_series_precondition_failures(argv, capsys):
    assert main(argv) == 1
    assert "Error" in capsys.readouterr().err


def test_omega(capsys):
    assert main(["omega", "--n", "7"]) == 1
    capsys.readouterr()
    assert main(["omega", "--n", "7", "--d", "15", "--ell", "5"]) == 0
    rows = _json_lines(capsys.readouterr().out)
    assert rows[0]["d"] == 15
    assert rows[1]["printed_case_one"] == "37/12"


def test_sieveparams_rhs(capsys):
    assert main(["sieveparams", "rhs"]) == 0
    (row,) = _json_lines(capsys.readouterr().out)
    assert 8.99 < row["rhs"] < 9.0
    assert row["r"] == 9
    assert row["satisfied"] is True


def test_sieveparams_minr_scan(capsys):
    assert main(["sieveparams", "minr", "--scan", "4.5:4.7:0.1"]) == 0
    rows = _json_lines(capsys.readouterr().out)
    assert [row["mu"] for row in rows] == [4.5, 4.6, 4.7]


def test_sieveparams_cor2_and_cor4(capsys):
    assert main(["sieveparams", "cor2", "--s", "3"]) == 0
    (row,) = _json_lines(capsys.readouterr().out)
    assert 0.8605 < row["theta_threshold"] < 0.8610
    assert main(["sieveparams", "cor4", "--eta", "0.5", "--theta1", "0.861"]) == 0
    (row,) = _json_lines(capsys.readouterr().out)
    assert row["binding"] == "case1"


def test_find_all(capsys):
    argv = ["find", "--n", "23", "--window1", "4:6", "--window2", "4:6", "--ps1", "2", "--mode", "all"]
    assert main(argv) == 0
    rows = _json_lines(capsys.readouterr().out)
    assert [(r["p1"], r["p2"], r["p3"]) for r in rows] == [(5, 5, 13), (5, 7, 11), (7, 5, 11)]


def test_find_rejects_even_target(capsys):
    assert main(["find", "--n", "24", "--window1", "4:6", "--window2", "4:6"]) == 1
    assert "odd" in capsys.readouterr().err


def test_chen_count_csv(capsys):
    assert main(["--format", "csv", "chen-count", "--window", "2:18"]) == 0
    assert capsys.readouterr().out.strip() == "X,Y,count\n2,18,7"


def test_exceptions_and_golden(tmp_path, capsys):
    argv = ["exceptions", "--x1", "100", "--x2", "24", "--y", "4", "--golden-dir", str(tmp_path)]
    assert main(argv) == 0
    (row,) = _json_lines(capsys.readouterr().out)
    assert row["exceptional_count"] == 3
    assert (tmp_path / "cor2_X1100_X224_Y4_s3.json").exists()
    assert main(argv) == 0


def test_arith(capsys):
    assert main(["arith", "factor", "--n", "360"]) == 0
    (row,) = _json_lines(capsys.readouterr().out)
    assert row["factors"] == [[2, 3], [3, 2], [5, 1]]
    assert row["big_omega"] == 6
    assert main(["arith", "mertens", "--v", "5", "--w", "5"]) == 0
    (row,) = _json_lines(capsys.readouterr().out)
    assert row["sum"] == pytest.approx(math.log(5) / 3)
    assert main(["arith", "divisor-sum"]) == 1


def test_cache_build_verify_purge(tmp_path, capsys):
    base = ["--cache-dir", str(tmp_path), "--workers", "1", "cache"]
    assert main(base + ["build", "--X", "0", "--Y", "1000000"]) == 0
    (row,) = _json_lines(capsys.readouterr().out)
    assert row["primes"] == 78498

    assert main(base + ["verify", "--X", "0", "--Y", "1000000"]) == 0
    (row,) = _json_lines(capsys.readouterr().out)
    assert row["identical"] is True

    path = tmp_path / "pwin_0_1000000.bin"
    data = bytearray(path.read_bytes())
    data[-1] ^= 0x80
    path.write_bytes(bytes(data))
    assert main(base + ["verify", "--X", "0", "--Y", "1000000"]) == 1

    capsys.readouterr()
    assert main(base + ["purge"]) == 0
    (row,) = _json_lines(capsys.readouterr().out)
    assert row["removed"] == 1
    assert main(base + ["verify", "--X", "0", "--Y", "1000000"]) == 1


def test_experiment_run(tmp_path, capsys):
    config = _write(tmp_path, THM6_CONFIG)
    assert main(["experiment", "run", config]) == 0
    (summary,) = _json_lines(capsys.readouterr().out)
    assert summary["kind"] == "thm6_variance"
    assert summary["lhs"] == pytest.approx(thm6_variance(200, 20, 150, 100, P_max=10000).lhs)
    assert summary["config"]["run"]["workers"] == 1


def test_experiment_saves_report(tmp_path, capsys):
    config = _write(tmp_path, THM6_CONFIG)
    base = tmp_path / "reports" / "thm6"
    assert main(["--output", str(base), "experiment", "run", config]) == 0
    assert "EXPERIMENT SUMMARY: thm6_variance" in capsys.readouterr().out
    summary = json.loads(base.with_suffix(".json").read_text())
    assert summary["config"]["experiment"]["X1"] == 200
    assert base.with_suffix(".csv").read_text().startswith("k,partial")


def test_experiment_decay(tmp_path, capsys):
    config = _write(tmp_path, THM6_CONFIG)
    assert main(["experiment", "decay", config, "--ladder", "100", "200"]) == 0
    rows = _json_lines(capsys.readouterr().out)
    assert [row["Y"] for row in rows] == [100, 200]
    assert rows[0]["ratio"] is None


def test_experiment_decay_needs_ladder(tmp_path):
    assert main(["experiment", "decay", _write(tmp_path, THM6_CONFIG)]) == 1


def test_experiment_lemma_golden(tmp_path, capsys):
    golden = tmp_path / "golden"
    config = _write(tmp_path, f"""
[run]
workers = 1
golden_dir = "{golden.as_posix()}"

[experiment]
kind = "lemma2"
M = 100
N = 50
Q = 3
trials = 2
""")
    argv = ["--seed", "5", "experiment", "run", config, "--golden"]
    assert main(argv) == 0
    (summary,) = _json_lines(capsys.readouterr().out)
    assert summary["params"]["seed"] == 5
    assert (golden / "lemma2_M100_N50_Q3_seed5.json").exists()
    assert main(argv) == 0


@pytest.mark.parametrize("text", [
    THM6_CONFIG + "bogus = 1\n",
    "[experiment]\nkind = \n",
    "[run]\nworkers = 1\n",
    "[experiment]\nkind = \"thm6_variance\"\n[extra]\nx = 1\n",
    "[run]\nworkers = 0\n[experiment]\nkind = \"thm6_variance\"\n",
    "[experiment]\nkind = \"thm6_variance\"\nY = 0\nR = 5\n",
    "[experiment]\nkind = \"thm6_variance\"\nY = 100\nR = 5\nP_max = 2\n",
    "[experiment]\nkind = \"thm3_bv\"\nX1 = 100\nY = 100\nQ = 0\n",
    "[experiment]\nkind = \"thm3_bv\"\nX1 = 100\nY = \"100\"\n",
    "[experiment]\nkind = \"lemma2\"\nM = 100\nN = 1\n",
    "[experiment]\nkind = \"lemma1\"\nM = 100\nN = 10\ntheta = 1.5\n",
])
def test_experiment_config_errors(tmp_path, text, capsys):
    assert main(["experiment", "run", _write(tmp_path, text)]) == 1
    assert "Error" in capsys.readouterr().err


def test_experiment_missing_config(tmp_path):
    assert main(["experiment", "run", str(tmp_path / "missing.toml")]) == 1


def test_prime_cache_dir_applies_to_window_commands(tmp_path, monkeypatch, capsys):
    cache_dir = tmp_path / "cache"
    monkeypatch.setattr("main.USE_PRIME_CACHE", True)
    monkeypatch.setattr("main.prime_cache", PrimeCache(str(cache_dir)))

    assert main(["chen-count", "--window", "2:18"]) == 0
    assert (cache_dir / "pwin_2_18.bin").exists()

    assert main(["experiment", "run", _write(tmp_path, THM6_CONFIG)]) == 0
    assert len(list(cache_dir.glob("pwin_*.bin"))) > 1
    capsys.readouterr()

    assert main(["--workers", "1", "cache", "purge"]) == 0
    (row,) = _json_lines(capsys.readouterr().out)
    assert row["removed"] > 1
    assert not list(cache_dir.glob("pwin_*.bin"))


def test_windows_stay_in_memory_without_cache_dir(tmp_path, monkeypatch):
    monkeypatch.setattr("main.USE_PRIME_CACHE", False)
    monkeypatch.chdir(tmp_path)
    assert main(["chen-count", "--window", "2:18"]) == 0
    assert not list(tmp_path.rglob("pwin_*.bin"))
