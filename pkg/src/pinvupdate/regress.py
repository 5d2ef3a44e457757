"""Least squares through the centred sum-of-squares-and-products matrix.

With observations ``x_i = xbar + xt_i`` the uncentred SSP matrix is

    X^T X = Xt^T Xt + n xbar xbar^T = Xt^T Xt + (v + w)(v + w)^T,

where ``sqrt(n) xbar = v + w`` is split against the column space of the
centred covariance ``Xt^T Xt``.  When some covariates were never varied the
covariance is singular and ``w`` is nonzero, so the rank-one singular update
gives ``(X^T X)^+`` directly from the covariance pseudoinverse.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from typing import IO, Optional, Union

import numpy as np

from .densecore import DEFAULT_TOL, SvdFactors, ToleranceConfig, as_matrix, as_vector, svd
from .errors import MatrixParseError, PreconditionError, ShapeError
from .subspace import DecomposedPerturbation, decompose
from .update import bartlett_inverse, rank_one_pinv

__all__ = [
    "Dataset",
    "CenteredData",
    "SspPinv",
    "RegressionFit",
    "center",
    "assemble_ssp",
    "ssp_pinv_via_update",
    "fit_ols",
    "read_csv",
    "BRANCH_RANK_AUGMENTING",
    "BRANCH_WOODBURY",
    "BRANCH_RANGE_RESTRICTED",
]

BRANCH_RANK_AUGMENTING = "rank-augmenting"
BRANCH_WOODBURY = "woodbury"
BRANCH_RANGE_RESTRICTED = "range-restricted"


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    x: np.ndarray
    y: Optional[np.ndarray] = None
    names: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "x", as_matrix(self.x, "x"))
        if self.y is not None:
            y = as_vector(self.y, "y")
            if y.size != self.x.shape[0]:
                raise ShapeError(f"y has {y.size} entries for {self.x.shape[0]} observations")
            object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def ell(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class CenteredData:
    x_bar: np.ndarray
    x_tilde: np.ndarray
    cov: np.ndarray
    cov_rank: int


@dataclass(frozen=True)
class SspPinv:
    """``(X^T X)^+`` together with how it was obtained."""

    pinv: np.ndarray
    branch: str
    split: DecomposedPerturbation


@dataclass(frozen=True)
class RegressionFit:
    beta_hat: np.ndarray
    ssp_pinv: np.ndarray
    used_rank_augmenting: bool
    residual_norm: float
    branch: str


def _cov_factors(cov: np.ndarray, x_bar: np.ndarray, n: int, tol: ToleranceConfig) -> SvdFactors:
    # Rank of the covariance is judged against the SSP matrix it feeds:
    # centring residue that is negligible next to n xbar xbar^T is noise.
    f = svd(cov, tol)
    ssp = cov + n * np.outer(x_bar, x_bar)
    ref = svd(ssp, tol)
    scale = float(ref.sigma[0]) if ref.numerical_rank else 0.0
    threshold = max(f.rank_threshold, tol.rank_rel_tol * cov.shape[0] * scale)
    r = int(np.count_nonzero(f.sigma > threshold))
    if r == f.numerical_rank:
        return f
    return SvdFactors(
        u=_freeze(np.ascontiguousarray(f.u[:, :r])),
        sigma=_freeze(np.array(f.sigma[:r])),
        v=_freeze(np.ascontiguousarray(f.v[:, :r])),
        numerical_rank=r,
        rank_threshold=threshold,
    )


def center(d: Dataset, tol: ToleranceConfig = DEFAULT_TOL) -> CenteredData:
    x = d.x
    x_bar = x.mean(axis=0)
    # The rounded mean of identical values can miss them by an ulp.
    const = (x == x[0]).all(axis=0)
    x_bar[const] = x[0, const]
    x_tilde = x - x_bar
    cov = x_tilde.T @ x_tilde
    cov = 0.5 * (cov + cov.T)
    return CenteredData(
        x_bar=_freeze(x_bar),
        x_tilde=_freeze(x_tilde),
        cov=_freeze(cov),
        cov_rank=_cov_factors(cov, x_bar, d.n, tol).numerical_rank,
    )


def assemble_ssp(c: CenteredData, n: int) -> np.ndarray:
    """``cov + n xbar xbar^T``, i.e. ``X^T X``."""
    return _freeze(c.cov + n * np.outer(c.x_bar, c.x_bar))


def ssp_pinv_via_update(c: CenteredData, n: int, tol: ToleranceConfig = DEFAULT_TOL) -> SspPinv:
    """Pseudo-invert ``X^T X`` from the covariance pseudoinverse.

    Branches:

    ``rank-augmenting``
        ``sqrt(n) xbar`` has a component ``w`` outside ``M(cov)``; rank-one
        singular update with ``v1 = v2 = v``, ``w1 = w2 = w``.
    ``woodbury``
        ``w`` is negligible and ``cov`` is nonsingular; ordinary rank-one
        inverse update.
    ``range-restricted``
        ``w`` is negligible and ``cov`` is singular.  The mean lies in
        ``M(cov)`` so the column space is unchanged and the rank-one formula
        holds with ``A^+`` in place of ``A^{-1}``.
    """
    fa = _cov_factors(c.cov, np.asarray(c.x_bar), n, tol)
    u = math.sqrt(n) * np.asarray(c.x_bar)
    split = decompose(u, c.cov, "column", tol, fa)
    v = split.v[:, 0]
    w = split.w[:, 0]
    threshold = tol.subspace_tol * (1.0 + np.linalg.norm(u))
    ell = c.cov.shape[0]
    if np.linalg.norm(w) > threshold:
        out = rank_one_pinv(c.cov, v, w, v, w, tol, a_pinv=fa.pinv())
        return SspPinv(out, BRANCH_RANK_AUGMENTING, split)
    if fa.numerical_rank == ell:
        return SspPinv(bartlett_inverse(c.cov, u, u, tol), BRANCH_WOODBURY, split)
    ap = fa.pinv()
    y = ap @ u
    out = ap - np.outer(y, y) / (1.0 + float(u @ y))
    return SspPinv(_freeze(out), BRANCH_RANGE_RESTRICTED, split)


def fit_ols(d: Dataset, tol: ToleranceConfig = DEFAULT_TOL) -> RegressionFit:
    """Minimum-norm least squares ``beta = (X^T X)^+ X^T y``."""
    if d.y is None:
        raise PreconditionError("dataset has no response column y")
    c = center(d, tol)
    sp = ssp_pinv_via_update(c, d.n, tol)
    beta = sp.pinv @ (d.x.T @ d.y)
    resid = d.y - d.x @ beta
    return RegressionFit(
        beta_hat=_freeze(beta),
        ssp_pinv=sp.pinv,
        used_rank_augmenting=sp.branch == BRANCH_RANK_AUGMENTING,
        residual_norm=float(np.linalg.norm(resid)),
        branch=sp.branch,
    )


def read_csv(source: Union[str, os.PathLike, IO[str]]) -> Dataset:
    """Read a dataset: header row, optional response column named ``y``.

    Blank lines are skipped.  Raises :class:`MatrixParseError` with the
    1-based line (and column index) of the first bad field.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8", newline="") as fh:
            text = fh.read()
    reader = csv.reader(io.StringIO(text))
    header = None
    rows = []
    for row in reader:
        lineno = reader.line_num
        if not row or all(not f.strip() for f in row):
            continue
        if header is None:
            header = [f.strip() for f in row]
            if len(set(header)) != len(header) or any(not h for h in header):
                raise MatrixParseError("header has empty or duplicate column names", line=lineno)
            continue
        if len(row) != len(header):
            raise MatrixParseError(f"expected {len(header)} fields, found {len(row)}", line=lineno)
        vals = []
        for j, f in enumerate(row, start=1):
            try:
                x = float(f)
            except ValueError:
                raise MatrixParseError(f"bad number {f.strip()!r}", line=lineno, column=j) from None
            if not math.isfinite(x):
                raise MatrixParseError(f"non-finite value {f.strip()!r}", line=lineno, column=j)
            vals.append(x)
        rows.append(vals)
    if header is None:
        raise MatrixParseError("empty file: no header", line=1)
    if not rows:
        raise MatrixParseError("no observations after the header", line=reader.line_num or 1)
    data = np.array(rows, dtype=np.float64)
    covariates = [j for j, h in enumerate(header) if h != "y"]
    if not covariates:
        raise MatrixParseError("no covariate columns", line=1)
    y = data[:, header.index("y")] if "y" in header else None
    return Dataset(x=data[:, covariates], y=y, names=tuple(header[j] for j in covariates))
