import csv
import io
import math
from contextlib import redirect_stdout

import pytest

from cardguess.cli import main


def run(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_approx_worst_table_value():
    code, out = run(["approx", "--mode", "worst", "--m", "3", "--n", "10000"])
    assert code == 0
    (row,) = rows(out)
    assert round(float(row["approx"]), 5) == 0.04657


def test_approx_best_single_type_is_harmonic():
    code, out = run(["approx", "--mode", "best", "--m", "1", "--n", "10"])
    assert code == 0
    assert float(rows(out)[0]["approx"]) == pytest.approx(2.9289683, abs=1e-7)


def test_approx_worst_uneven_exits_2(capsys):
    assert main(["approx", "--mode", "worst", "--mults", "1,2"]) == 2
    assert "even deck" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["approx", "--m", "2", "--n", "3", "--mults", "1,2"],
        ["approx", "--m", "2"],
        ["approx", "--mults", "0,2"],
        ["birthday", "--m", "2", "--n", "5", "--j", "2"],
        ["oracle", "score", "--m", "10", "--n", "100"],
    ],
)
def test_invalid_configs_exit_2(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err.startswith("cardguess: error")


def test_zero_trials_rejected():
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--m", "2", "--n", "5", "--trials", "0"])
    assert exc.value.code == 2


def test_simulate_columns_and_accuracy():
    code, out = run(["simulate", "--mode", "best", "--m", "2", "--n", "100", "--trials", "10000", "--seed", "42"])
    assert code == 0
    assert out.splitlines()[0] == "n,m,mode,trials,seed,mean,stderr,approx,relative_error"
    (row,) = rows(out)
    assert abs(float(row["relative_error"])) < 0.02


def test_simulate_single_type_mean_matches_harmonic():
    code, out = run(["simulate", "--mode", "best", "--m", "1", "--n", "50", "--trials", "100000"])
    row = rows(out)[0]
    h50 = math.fsum(1 / k for k in range(1, 51))
    assert abs(float(row["mean"]) - h50) <= 4 * float(row["stderr"])


def test_simulate_uneven_worst_leaves_approx_blank():
    code, out = run(["simulate", "--mode", "worst", "--mults", "2,3", "--trials", "50"])
    assert code == 0
    row = rows(out)[0]
    assert row["approx"] == "" and row["relative_error"] == ""


def test_output_is_byte_identical(tmp_path):
    argv = ["simulate", "--mode", "worst", "--m", "3", "--n", "40", "--trials", "300"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_table1_shape():
    code, out = run(["table1", "--trials", "20", "--n-values", "10000"])
    assert code == 0
    got = rows(out)
    assert [(r["m"], r["n"]) for r in got] == [("3", "10000"), ("4", "10000")]
    assert round(float(got[0]["approximation"]), 5) == 0.04657
    assert round(float(got[1]["approximation"]), 5) == 0.11675


def test_birthday_fair_odds_and_origin():
    code, out = run(["birthday", "--m", "2", "--n", "365", "--times", "0,32", "--trials", "500"])
    got = rows(out)
    assert float(got[0]["empirical_survival"]) == 1 and float(got[0]["lambda"]) == 0
    assert float(got[1]["exp_minus_lambda"]) == pytest.approx(0.5, abs=0.01)


def test_birthday_exact_column_agrees():
    code, out = run(["birthday", "--m", "2", "--n", "3", "--exact", "--trials", "20000"])
    for r in rows(out):
        se = float(r["stderr"])
        assert abs(float(r["empirical_survival"]) - float(r["exact_survival"])) <= 4 * se + 1e-12


def test_birthday_lambda_grid():
    code, out = run(["birthday", "--m", "2", "--n", "100", "--lambdas", "0.25,1", "--trials", "100"])
    assert [r["t"] for r in rows(out)] == ["10", "20"]


def test_oracle_score():
    code, out = run(["oracle", "score", "--m", "2", "--n", "2"])
    assert [r["fraction"] for r in rows(out)] == ["17/6", "7/6"]


def test_oracle_coupling_check_all_zero():
    code, out = run(["oracle", "coupling-check", "--mults", "3,2,1", "--size", "2"])
    got = rows(out)
    assert len(got) == 15
    assert all(float(r["tv_distance"]) == 0 for r in got)


def test_oracle_tv_and_wpmf():
    code, out = run(["oracle", "tv", "--m", "2", "--n", "32", "--t", "11"])
    assert float(rows(out)[0]["tv_distance"]) < 0.15
    code, out = run(["oracle", "wpmf", "--m", "2", "--n", "3", "--t", "3"])
    assert [(r["w"], float(r["probability"])) for r in rows(out)] == [("0", 0.4), ("1", 0.6)]


def test_joint():
    code, out = run(["joint", "--m", "3", "--n", "1000", "--times", "55,300", "--trials", "1000"])
    row = rows(out)[0]
    assert abs(float(row["joint_survival"]) - math.exp(-2)) < 0.05


@pytest.mark.parametrize("fig,extra", [(1, []), (2, ["approx_beta_form", "approx_leading"]), (3, []),
                                       (4, []), (5, ["approx_all_terms", "relative_error_all_terms"])])
def test_figure_headers(fig, extra):
    argv = ["figure", "--id", str(fig), "--trials", "20"]
    argv += ["--n-values", "10,20"]
    if fig != 3:
        argv += ["--m-values", "4"]
    code, out = run(argv)
    assert code == 0
    header = out.splitlines()[0].split(",")
    assert header[:11] == ["figure", "deck", "m", "n", "mode", "trials", "seed", "mean", "stderr", "approx",
                           "relative_error"]
    assert header[11:] == extra
    got = rows(out)
    assert len(got) == (12 if fig == 3 else 2)


def test_figure_3_decks_are_half_and_half():
    code, out = run(["figure", "--id", "3", "--trials", "5", "--n-values", "4", "--m-values", "6,8"])
    (row,) = rows(out)
    assert row["deck"] == "6;6;8;8"
    assert row["m"] == "8"
