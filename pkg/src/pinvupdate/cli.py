"""Command-line front end.

Exit codes: 0 success, 1 verification failed, 2 parse error, 3 violated
hypothesis or bad parameters, 4 SVD did not converge.
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import regress as rg
from .densecore import ToleranceConfig, as_matrix, frob_norm, oracle_pinv, svd
from .errors import (
    ConvergenceError,
    HypothesisError,
    MatrixParseError,
    PreconditionError,
    ShapeError,
    SingularUpdateError,
)
from .matrixio import format_matrix, read_matrix, write_matrix
from .subspace import build_problem
from .synth import update_instance
from .update import penrose_check, rank_augmenting_pinv, woodbury_inverse

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE = 2
EXIT_HYPOTHESIS = 3
EXIT_CONVERGENCE = 4

PATH_WOODBURY = "woodbury"
PATH_RANK_AUGMENTING = "rank-augmenting"

BENCH_KEYS = ("l", "k", "t_update_ns", "t_full_ns", "max_err")
BENCH_HEADER = (
    "# update timing assumes A^+ is already held: the one-time SVD of A is "
    "excluded; full timing is a fresh SVD pseudoinverse of Omega"
)


def _existing_file(path: str) -> str:
    if not os.path.isfile(path):
        raise argparse.ArgumentTypeError(f"no such file: {path}")
    return path


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    d = ToleranceConfig()
    p.add_argument("--rank-tol", type=float, default=d.rank_rel_tol, help="relative rank threshold")
    p.add_argument("--penrose-tol", type=float, default=d.penrose_tol)
    p.add_argument("--subspace-tol", type=float, default=d.subspace_tol)
    p.add_argument("--out", metavar="PATH", help="write the resulting matrix here")
    p.add_argument("--format", choices=("text", "jsonl"), default="text", help="report format")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="pinvupdate",
        description="Pseudoinverses of rank-augmenting low-rank updates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("update", parents=[common], help="pseudo-invert A + X1 G X2^T")
    p.add_argument("a", type=_existing_file)
    p.add_argument("x1", type=_existing_file)
    p.add_argument("g", type=_existing_file)
    p.add_argument("x2", type=_existing_file, nargs="?", help="defaults to X1")

    p = sub.add_parser("verify", parents=[common], help="check the four Penrose conditions")
    p.add_argument("omega", type=_existing_file)
    p.add_argument("candidate", type=_existing_file)

    p = sub.add_parser("regress", parents=[common], help="least squares via the centred SSP matrix")
    p.add_argument("csv", type=_existing_file)

    p = sub.add_parser("bench", parents=[common], help="time the update against full recomputation")
    p.add_argument("--size", type=int, default=64, help="matrix dimension l")
    p.add_argument("--rank", type=int, default=None, help="rank of A (default l/2)")
    p.add_argument("--k", type=int, default=2, help="update rank")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _tol(args) -> ToleranceConfig:
    return ToleranceConfig(args.rank_tol, args.penrose_tol, args.subspace_tol)


class _Reporter:
    def __init__(self, fmt: str, stream):
        self.fmt = fmt
        self.stream = stream

    def emit(self, record: dict) -> None:
        if self.fmt == "jsonl":
            self.stream.write(json.dumps(record) + "\n")
            return
        for key, val in record.items():
            if isinstance(val, float):
                val = f"{val:.6e}"
            elif isinstance(val, (list, tuple)):
                val = " ".join(f"{x:.10g}" for x in val)
            elif isinstance(val, bool):
                val = "passed" if val else "FAILED"
            self.stream.write(f"{key}: {val}\n")


def _matrix_sink(args, matrix) -> None:
    if args.out:
        write_matrix(matrix, args.out)
    else:
        sys.stdout.write(format_matrix(matrix))


def cmd_update(args) -> int:
    tol = _tol(args)
    a = read_matrix(args.a)
    x1 = read_matrix(args.x1)
    g = read_matrix(args.g)
    x2 = read_matrix(args.x2) if args.x2 else x1
    out = sys.stdout if args.out else sys.stderr
    rep = _Reporter(args.format, out)
    ell, k = a.shape[0], g.shape[0]
    if a.shape != (ell, ell) or g.shape != (k, k) or x1.shape != (ell, k) or x2.shape != (ell, k):
        raise ShapeError(f"incompatible shapes A{a.shape} X1{x1.shape} G{g.shape} X2{x2.shape}")
    fa = svd(a, tol)
    if fa.numerical_rank == a.shape[0]:
        path = PATH_WOODBURY
        result = woodbury_inverse(a, x1, g, x2, tol)
    else:
        path = PATH_RANK_AUGMENTING
        problem = build_problem(a, x1, g, x2, tol, fa)
        result = rank_augmenting_pinv(problem, tol)
    omega = as_matrix(a + x1 @ g @ x2.T)
    report = penrose_check(omega, result, tol)
    _matrix_sink(args, result)
    rep.emit({"command": "update", "path": path, **report.as_dict()})
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_verify(args) -> int:
    tol = _tol(args)
    omega = read_matrix(args.omega)
    cand = read_matrix(args.candidate)
    report = penrose_check(omega, cand, tol)
    _Reporter(args.format, sys.stdout).emit({"command": "verify", **report.as_dict()})
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_regress(args) -> int:
    tol = _tol(args)
    data = rg.read_csv(args.csv)
    out = sys.stdout
    fit = rg.fit_ols(data, tol)
    c = rg.center(data, tol)
    record = {
        "command": "regress",
        "n": data.n,
        "x_bar": [float(x) for x in c.x_bar],
        "cov_rank": c.cov_rank,
        "branch": fit.branch,
        "beta_hat": [float(b) for b in fit.beta_hat],
        "residual_norm": fit.residual_norm,
    }
    _Reporter(args.format, out).emit(record)
    if args.out:
        write_matrix(fit.ssp_pinv, args.out)
    return EXIT_OK


def run_bench(size: int, rank: int, k: int, trials: int, tol: ToleranceConfig, seed: int = 0) -> dict:
    """Median timings of the cached-``A^+`` update vs a fresh SVD pseudoinverse."""
    if not (0 <= rank < size):
        raise PreconditionError(f"need 0 <= rank < size, got rank={rank}, size={size}")
    if not (1 <= k <= size - rank):
        raise PreconditionError(f"need 1 <= k <= size - rank = {size - rank}, got k={k}")
    if size > 2048:
        raise PreconditionError("size must not exceed 2048")
    if trials < 1:
        raise PreconditionError("trials must be positive")
    rng = np.random.default_rng(seed)
    t_upd, t_full, errs = [], [], []
    for _ in range(trials):
        a, x1, g, x2 = update_instance(rng, size, rank, k)
        fa = svd(a, tol)  # one-time cost, not timed
        a_pinv = fa.pinv()
        omega = a + x1 @ g @ x2.T
        t0 = time.perf_counter_ns()
        upd = rank_augmenting_pinv(build_problem(a, x1, g, x2, tol, fa, a_pinv), tol)
        t1 = time.perf_counter_ns()
        full = oracle_pinv(omega, tol)
        t2 = time.perf_counter_ns()
        t_upd.append(t1 - t0)
        t_full.append(t2 - t1)
        errs.append(frob_norm(upd - full) / frob_norm(full))
    return {
        "l": size,
        "k": k,
        "t_update_ns": int(statistics.median(t_upd)),
        "t_full_ns": int(statistics.median(t_full)),
        "max_err": float(max(errs)),
    }


def cmd_bench(args) -> int:
    rank = args.size // 2 if args.rank is None else args.rank
    row = run_bench(args.size, rank, args.k, args.trials, _tol(args), args.seed)
    if args.format == "jsonl":
        sys.stderr.write(BENCH_HEADER + "\n")
        sys.stdout.write(json.dumps(row) + "\n")
    else:
        sys.stdout.write(BENCH_HEADER + "\n")
        _Reporter("text", sys.stdout).emit(
            {**row, "rank": rank, "trials": args.trials, "speedup": row["t_full_ns"] / max(row["t_update_ns"], 1)}
        )
    return EXIT_OK


_COMMANDS = {"update": cmd_update, "verify": cmd_verify, "regress": cmd_regress, "bench": cmd_bench}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _tol(args)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        return _COMMANDS[args.command](args)
    except MatrixParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except HypothesisError as exc:
        sys.stderr.write(f"hypothesis violated ({exc.hypothesis}): {exc}\n")
        return EXIT_HYPOTHESIS
    except (PreconditionError, SingularUpdateError, ShapeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_HYPOTHESIS
    except ConvergenceError as exc:
        sys.stderr.write(f"convergence failure: {exc}\n")
        return EXIT_CONVERGENCE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
