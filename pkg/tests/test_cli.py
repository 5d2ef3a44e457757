import json
import subprocess
import sys

import numpy as np
import pytest

from corpus import inv2
from pinvupdate import read_matrix, write_matrix
from pinvupdate.cli import BENCH_HEADER, BENCH_KEYS, main, run_bench
from pinvupdate.densecore import DEFAULT_TOL
from pinvupdate.errors import PreconditionError


@pytest.fixture
def mats(tmp_path):
    def put(name, m):
        path = tmp_path / f"{name}.txt"
        write_matrix(np.atleast_2d(np.asarray(m, dtype=float)), path)
        return str(path)

    return put


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_update_rank_augmenting(mats, tmp_path, capsys):
    out_path = str(tmp_path / "omega_pinv.txt")
    argv = ["update", mats("a", np.diag([1.0, 0.0])), mats("x", [[0.0], [1.0]]), mats("g", [[1.0]]), "--out", out_path]
    code, out, _ = run(argv, capsys)
    assert code == 0
    assert "path: rank-augmenting" in out
    np.testing.assert_allclose(read_matrix(out_path), np.eye(2), atol=1e-15)


def test_update_woodbury_to_stdout(mats, capsys):
    code, out, err = run(["update", mats("a", np.eye(2)), mats("x", [[0.0], [0.0]]), mats("g", [[1.0]])], capsys)
    assert code == 0
    assert "path: woodbury" in err
    np.testing.assert_array_equal(np.loadtxt(out.splitlines()[1:]), np.eye(2))


def test_update_two_by_two_fixture(mats, tmp_path, capsys):
    out_path = str(tmp_path / "r.txt")
    e1 = [[1.0], [1.0]]
    code, _, _ = run(["update", mats("a", np.diag([2.0, 0.0])), mats("x", e1), mats("g", [[1.0]]), "--out", out_path], capsys)
    assert code == 0
    np.testing.assert_allclose(read_matrix(out_path), inv2([[3.0, 1.0], [1.0, 1.0]]), atol=1e-15)


def test_update_hypothesis_violation(mats, capsys):
    code, _, err = run(["update", mats("a", np.diag([1.0, 0.0])), mats("x", [[1.0], [0.0]]), mats("g", [[1.0]])], capsys)
    assert code == 3
    assert "B1 singular" in err


def test_update_shape_mismatch(mats, capsys):
    code, _, err = run(["update", mats("a", np.eye(2)), mats("x", [[1.0], [0.0], [0.0]]), mats("g", [[1.0]])], capsys)
    assert code == 3 and "shape" in err


def test_update_parse_error_reports_position(mats, tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("2 2\n1 0\n0 x\n")
    code, _, err = run(["update", str(bad), mats("x", [[0.0], [1.0]]), mats("g", [[1.0]])], capsys)
    assert code == 2
    assert "line 3, column 3" in err


def test_missing_file_is_rejected_at_parse_time(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", str(tmp_path / "nope.txt"), str(tmp_path / "nope.txt")])
    assert info.value.code == 2
    assert "no such file" in capsys.readouterr().err


def test_bad_tolerance_flag_is_rejected(mats, capsys):
    with pytest.raises(SystemExit):
        main(["verify", mats("o", np.eye(2)), mats("c", np.eye(2)), "--penrose-tol", "2"])
    capsys.readouterr()


def test_verify_examples(mats, capsys):
    code, out, _ = run(["verify", mats("o", np.eye(3)), mats("c", np.eye(3)), "--format", "jsonl"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["passed"]
    assert [rec[k] for k in ("res_a", "res_b", "res_c", "res_d")] == [0.0] * 4

    code, _, _ = run(["verify", mats("o", np.diag([2.0, 0.0])), mats("c", np.diag([0.5, 0.0]))], capsys)
    assert code == 0

    code, out, _ = run(["verify", mats("o", np.diag([2.0, 0.0])), mats("c", np.diag([0.5, 0.1])), "--format", "jsonl"], capsys)
    rec = json.loads(out)
    assert code == 1 and not rec["passed"]
    assert rec["res_b"] > 0


def test_update_success_implies_verify_passes(tmp_path, mats, capsys):
    rng = np.random.default_rng(8)
    for trial in range(10):
        ell, rank, k = 6, 3, int(rng.integers(1, 4))
        a = rng.standard_normal((ell, rank)) @ rng.standard_normal((rank, ell))
        x1, x2 = rng.standard_normal((2, ell, k))
        g = rng.standard_normal((k, k)) + 2 * np.eye(k)
        out_path = str(tmp_path / f"c{trial}.txt")
        code, _, _ = run(["update", mats("a", a), mats("x1", x1), mats("g", g), mats("x2", x2), "--out", out_path], capsys)
        assert code == 0
        # Omega as the CLI sees it: assembled from the re-parsed inputs.
        omega = read_matrix(mats("a", a)) + x1 @ g @ x2.T
        code, _, _ = run(["verify", mats("omega", omega), out_path], capsys)
        assert code == 0


def test_written_matrix_round_trips_bit_exactly(mats, tmp_path, capsys):
    out_path = str(tmp_path / "r.txt")
    a = np.diag([3.0, 0.0, 0.0])
    x = [[0.1], [1 / 3], [0.0]]
    run(["update", mats("a", a), mats("x", x), mats("g", [[np.pi]]), "--out", out_path], capsys)
    first = read_matrix(out_path)
    again = str(tmp_path / "again.txt")
    write_matrix(first, again)
    assert read_matrix(again).tobytes() == first.tobytes()


def test_regress_examples(tmp_path, capsys):
    csv_path = tmp_path / "d.csv"
    csv_path.write_text("x1,x2,y\n1,1,1\n3,1,3\n")
    out_path = tmp_path / "ssp.txt"
    code, out, _ = run(["regress", str(csv_path), "--format", "jsonl", "--out", str(out_path)], capsys)
    rec = json.loads(out)
    assert code == 0
    assert rec["branch"] == "rank-augmenting"
    np.testing.assert_allclose(rec["beta_hat"], [1.0, 0.0], atol=1e-14)
    assert rec["cov_rank"] == 1 and rec["n"] == 2
    np.testing.assert_allclose(read_matrix(out_path), [[0.5, -1.0], [-1.0, 2.5]], atol=1e-14)

    csv_path.write_text("x,y\n4,1\n4,2\n4,6\n")
    code, out, _ = run(["regress", str(csv_path)], capsys)
    assert code == 0
    assert "cov_rank: 0" in out and "branch: rank-augmenting" in out


def test_regress_errors(tmp_path, capsys):
    csv_path = tmp_path / "d.csv"
    csv_path.write_text("a,y\n1,2\n1,zz\n")
    code, _, err = run(["regress", str(csv_path)], capsys)
    assert code == 2 and "line 3" in err
    csv_path.write_text("a,b\n1,2\n")
    code, _, _ = run(["regress", str(csv_path)], capsys)
    assert code == 3


def test_bench_jsonl_row_has_exact_keys(capsys):
    code, out, err = run(["bench", "--size", "4", "--k", "1", "--trials", "1", "--format", "jsonl"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 1
    assert tuple(json.loads(lines[0])) == BENCH_KEYS
    assert err.strip() == BENCH_HEADER


def test_bench_text_report(capsys):
    code, out, _ = run(["bench", "--size", "8", "--rank", "4", "--k", "2", "--trials", "2"], capsys)
    assert code == 0
    assert out.startswith(BENCH_HEADER)
    assert "speedup:" in out


def test_bench_rejects_infeasible_rank_budget(capsys):
    code, _, err = run(["bench", "--size", "8", "--rank", "6", "--k", "3"], capsys)
    assert code == 3 and "k" in err
    with pytest.raises(PreconditionError):
        run_bench(4000, 10, 2, 1, DEFAULT_TOL)


def test_bench_64_is_accurate_and_faster():
    row = run_bench(64, 32, 2, 5, DEFAULT_TOL)
    assert row["max_err"] < 1e-7
    assert row["t_update_ns"] < row["t_full_ns"]


def test_module_entry_point(mats):
    proc = subprocess.run(
        [sys.executable, "-m", "pinvupdate", "verify", mats("o", np.eye(2)), mats("c", np.eye(2))],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "passed: passed" in proc.stdout
