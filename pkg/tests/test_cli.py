import pytest

from semiact.cli import run_cli
from semiact.experiments import OUT_DIR_ENV
from semiact.instances import build_flat_semilattice, build_min_chain
from semiact.report import read_csv


def test_solve_example(capsys):
    assert run_cli(["solve", "--system", "cyclic-exp:p=59,n=29,g=4", "--x", "4", "--y", "5",
                    "--attack", "bsgs", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    s = int(out.split()[0].split("=")[1])
    assert pow(4, s, 59) == 5 and "verified=true" in out


def _solved(capsys):
    return int(capsys.readouterr().out.split()[0].split("=")[1])


@pytest.mark.parametrize("attack", ["exhaustive", "ph", "recursive-nonunit"])
def test_solve_other_attacks(attack, capsys):
    argv = ["solve", "--system", "cyclic-exp:p=29,n=28,g=2", "--x", "2", "--y", "5", "--attack", attack]
    if attack == "recursive-nonunit":
        argv += ["--chain", "7,2"]
    assert run_cli(argv) == 0
    assert pow(2, _solved(capsys), 29) == 5


def test_solve_rho_unit_witness(capsys):
    # rho walks over units only; 8 = 2^3 has a unit exponent
    assert run_cli(["solve", "--system", "cyclic-exp:p=29,n=28,g=2", "--x", "2", "--y", "8",
                    "--attack", "rho"]) == 0
    assert pow(2, _solved(capsys), 29) == 8


def test_solve_collision_probe_flat(capsys):
    flat = build_flat_semilattice(6, seed=0)
    assert run_cli(["solve", "--system", "flat-semilattice:m=6,seed=0", "--x", str(flat.e),
                    "--y", str(flat.phi(4)), "--attack", "collision-probe"]) == 0
    assert _solved(capsys) == 4


def test_solve_symmetric_and_min_chain(capsys):
    assert run_cli(["solve", "--system", "symmetric:n=16", "--x", "3", "--y", "9",
                    "--attack", "symmetric-fixedpoint"]) == 0
    capsys.readouterr()
    chain = build_min_chain(64, seed=0)
    x = chain.chain_point(64)
    assert run_cli(["solve", "--system", "min-chain:n=64,seed=0", "--x", str(x), "--y", str(chain.act(10, x)),
                    "--attack", "binary-search-min"]) == 0
    assert _solved(capsys) == 10


def test_solve_unsolvable_exits_1(capsys):
    # 2 is a non-residue mod 59, so no power of 4 reaches it
    assert all(pow(4, s, 59) != 2 for s in range(29))
    assert run_cli(["solve", "--system", "cyclic-exp:p=59,n=29,g=4", "--x", "4", "--y", "2",
                    "--attack", "exhaustive"]) == 1


@pytest.mark.parametrize("argv", [
    ["solve", "--system", "cyclic-exp:p=59,n=29,g=4", "--x", "4", "--y", "5", "--attack", "nope"],
    ["solve", "--system", "nope:n=3", "--x", "4", "--y", "5", "--attack", "bsgs"],
    ["solve", "--system", "cyclic-exp:p=59,n=29,g=1", "--x", "4", "--y", "5", "--attack", "bsgs"],
    ["experiment", "nope"],
    ["experiment", "lemma-intersect", "--n", "100"],
    ["frobnicate"],
])
def test_config_errors_exit_2(argv, capsys):
    assert run_cli(argv) == 2
    assert capsys.readouterr().err


def test_experiment_to_stdout(capsys, monkeypatch):
    monkeypatch.delenv(OUT_DIR_ENV, raising=False)
    assert run_cli(["experiment", "lemma-intersect", "--n", "100", "--k", "10", "--l", "10",
                    "--trials", "10000", "--seed", "7"]) == 0
    rows, aggs = read_csv(capsys.readouterr().out)
    assert len(rows) == 10000
    assert float(aggs["lower_bound"]) <= float(aggs["disjoint_rate"]) <= float(aggs["upper_bound"])


def test_experiment_env_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path))
    assert run_cli(["experiment", "flat-hardness", "--m", "20", "--trials", "10"]) == 0
    assert (tmp_path / "flat-hardness.csv").read_text().startswith("trial,")


def test_experiment_from_config(tmp_path, capsys):
    cfg = tmp_path / "exp.ini"
    out = tmp_path / "out.csv"
    cfg.write_text(f"[experiment]\nname = theorem-bound\nseed = 1\ntrials = 50\noutput = {out}\n"
                   "[attack]\nname = collision\n[grid]\nn = 64\nm = 2,4\n")
    assert run_cli(["experiment", "--config", str(cfg)]) == 0
    _, aggs = read_csv(out.read_text())
    assert "m=4.bound" in aggs


def test_list(capsys):
    assert run_cli(["list"]) == 0
    out = capsys.readouterr().out
    assert "cyclic-exp" in out and "bsgs" in out and "lemma-intersect" in out


def test_check(capsys):
    assert run_cli(["check", "--samples", "200"]) == 0
    assert "FAIL" not in capsys.readouterr().out
