import shutil

import pytest

from rpnet import example_path
from rpnet.cli import main


@pytest.fixture
def fig1b_file(tmp_path):
    dest = tmp_path / "fig1b.rpn"
    shutil.copy(example_path(), dest)
    return dest


def test_validate_ok(fig1b_file, capsys):
    assert main(["validate", str(fig1b_file)]) == 0
    assert "ok" in capsys.readouterr().out


def test_validate_invalid_net(tmp_path, capsys):
    bad = tmp_path / "clone.rpn"
    bad.write_text(
        "TYPES\n  u: unit\nTOKENS\n  a: u\nPLACES\n  x, y\nMARKING\n  a @ x\n"
        "TRANSITIONS\n  transition t\n    in x: {a}\n    out x: {a}\n    out y: {a}\n"
    )
    assert main(["validate", str(bad)]) == 1
    assert "V2" in capsys.readouterr().err


def test_parse_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.rpn"
    bad.write_text("TYPES\n  u: unit\nPLACES\n")
    assert main(["validate", str(bad)]) == 2
    assert main(["validate", str(tmp_path / "missing.rpn")]) == 2


def test_bad_policy_exits_3(fig1b_file):
    assert main(["simulate", str(fig1b_file), "--policy", "sometimes"]) == 3
    assert main(["simulate", str(fig1b_file), "--policy", "fixed:nope:fwd"]) == 3


def test_simulate_fixed_step(fig1b_file, capsys):
    assert main(["simulate", str(fig1b_file), "--policy", "fixed:t_ij:fwd", "--max-steps", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["A_i: a_i", "A_j: p", "M_k: m_k,a_j;(a_j,m_k)", "history: t_ij: {1}"]


def test_zero_steps_gives_header_only_trace(fig1b_file, tmp_path):
    trace = tmp_path / "t.csv"
    assert main(["simulate", str(fig1b_file), "--seed", "7", "--max-steps", "0", "--trace", str(trace)]) == 0
    assert trace.read_text() == "step_index,transition_id,direction,occurrence_key\n"


def test_simulate_trace_rows(fig1b_file, tmp_path):
    trace = tmp_path / "t.csv"
    main(["simulate", str(fig1b_file), "--policy", "fixed:t_ij:fwd", "--trace", str(trace)])
    assert trace.read_text().splitlines()[1] == "0,t_ij,forward,1"


def test_simulate_is_byte_identical(tmp_path):
    from rpnet.corpus import random_net
    from rpnet.netfile import save

    for seed in range(5):
        src = tmp_path / f"n{seed}.rpn"
        save(random_net(seed), src)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", str(src), "--seed", "3", "--max-steps", "40"]
        assert main(args + ["--trace", str(a)]) == 0
        assert main(args + ["--trace", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


def test_antenna_experiment_outputs(tmp_path, capsys):
    out, fig, traces = tmp_path / "exp.csv", tmp_path / "exp.png", tmp_path / "traces"
    args = ["antenna-experiment", "--nt", "8", "--nr", "2", "--nts", "2,4", "--realizations", "2",
            "--runs", "2", "--out", str(out), "--figure", str(fig), "--trace-dir", str(traces)]
    assert main(args) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ("realization,nts,run_index,run_capacity,best_capacity,greedy_capacity,"
                        "exhaustive_capacity_or_blank,steps,converged")
    assert len(lines) == 1 + 2 * 2 * 2
    assert fig.stat().st_size > 0
    assert len(list(traces.glob("trace_*.csv"))) == 8
    assert "nts=2" in capsys.readouterr().out


def test_antenna_experiment_rejects_bad_sizes(tmp_path):
    assert main(["antenna-experiment", "--nt", "4", "--nr", "2", "--nts", "5",
                 "--out", str(tmp_path / "x.csv")]) == 3
