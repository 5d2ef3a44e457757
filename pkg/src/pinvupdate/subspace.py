"""Column-space projectors and the split ``X = V + W`` against ``M(A)``.

``V`` is the orthogonal projection of ``X`` onto the column space of ``A``
(or of ``A^T`` for the row-space side) and ``W = X - V`` is the rejection.
The rank-augmenting identities need ``B = W^T W`` nonsingular and use
``C = W B^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
import scipy.linalg as sla

from .densecore import DEFAULT_TOL, SvdFactors, ToleranceConfig, as_matrix, frob_norm, svd
from .errors import HypothesisError, ShapeError
from .problem import UpdateProblem

Side = Literal["column", "row"]

__all__ = [
    "DecomposedPerturbation",
    "column_space_projector",
    "decompose",
    "split_from_parts",
    "validate_hypotheses",
    "build_problem",
]


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DecomposedPerturbation:
    """``x = v + w`` with ``v`` in the reference space and ``w`` orthogonal to it.

    ``c`` is ``None`` when ``b`` is (numerically) singular.
    """

    x: np.ndarray
    v: np.ndarray
    w: np.ndarray
    b: np.ndarray
    c: Optional[np.ndarray]
    b_rank_full: bool
    side: Side

    @property
    def k(self) -> int:
        return self.x.shape[1]


def _basis(a: np.ndarray, side: Side, tol: ToleranceConfig, factors: Optional[SvdFactors]):
    if factors is None:
        factors = svd(a, tol)
    return factors.u if side == "column" else factors.v


def column_space_projector(a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector ``U U^T`` onto ``M(a)``."""
    u = svd(a, tol).u
    p = u @ u.T
    # u @ u.T is symmetric in exact arithmetic; make it so in floating point.
    return _freeze(0.5 * (p + p.T))


def _b_is_full_rank(b: np.ndarray, x_norm: float, tol: ToleranceConfig) -> bool:
    k = b.shape[0]
    eig = np.linalg.eigvalsh(b)
    lo, hi = float(eig[0]), float(eig[-1])
    if hi <= 0.0:
        return False
    if lo <= tol.rank_rel_tol * k * hi:
        return False
    # sigma_min(W) must not be rounding residue of projecting X.
    return np.sqrt(lo) > tol.subspace_tol * x_norm


def _finish(x, v, w, side, tol) -> DecomposedPerturbation:
    b = w.T @ w
    b = 0.5 * (b + b.T)
    full = _b_is_full_rank(b, frob_norm(x), tol)
    c = None
    if full:
        c = _freeze(sla.solve(b, w.T, assume_a="pos").T)
    return DecomposedPerturbation(
        x=x, v=_freeze(v), w=_freeze(w), b=_freeze(b), c=c, b_rank_full=full, side=side
    )


def _check_side(side: str) -> None:
    if side not in ("column", "row"):
        raise ValueError(f"side must be 'column' or 'row', got {side!r}")


def decompose(
    x,
    a,
    side: Side = "column",
    tol: ToleranceConfig = DEFAULT_TOL,
    factors: Optional[SvdFactors] = None,
) -> DecomposedPerturbation:
    """Split ``x`` into its projection onto ``M(a)`` (or ``M(a^T)``) and the rest.

    ``factors`` may carry a precomputed ``svd(a)`` to skip the factorization.
    """
    _check_side(side)
    x = as_matrix(x, "x")
    a = as_matrix(a, "a")
    dim = a.shape[0] if side == "column" else a.shape[1]
    if x.shape[0] != dim:
        raise ShapeError(f"x has {x.shape[0]} rows but the {side} space of a {a.shape} lives in R^{dim}")
    q = _basis(a, side, tol, factors)
    v = q @ (q.T @ x)
    w = x - v
    return _finish(x, v, w, side, tol)


def split_from_parts(
    v,
    w,
    a,
    side: Side = "column",
    tol: ToleranceConfig = DEFAULT_TOL,
    factors: Optional[SvdFactors] = None,
) -> DecomposedPerturbation:
    """Validate a caller-supplied split: ``v`` in the space, ``w`` orthogonal to it.

    Raises :class:`HypothesisError` if either membership fails beyond
    ``subspace_tol``.
    """
    _check_side(side)
    v = as_matrix(v, "v")
    w = as_matrix(w, "w")
    a = as_matrix(a, "a")
    if v.shape != w.shape:
        raise ShapeError(f"v {v.shape} and w {w.shape} differ in shape")
    dim = a.shape[0] if side == "column" else a.shape[1]
    if v.shape[0] != dim:
        raise ShapeError(f"v has {v.shape[0]} rows, expected {dim}")
    q = _basis(a, side, tol, factors)
    space = "M(A)" if side == "column" else "M(A^T)"
    v_out = v - q @ (q.T @ v)
    if frob_norm(v_out) > tol.subspace_tol * (1.0 + frob_norm(v)):
        raise HypothesisError(f"columns of v are not in {space}", hypothesis=f"v in {space}")
    w_in = q @ (q.T @ w)
    if frob_norm(w_in) > tol.subspace_tol * (1.0 + frob_norm(w)):
        raise HypothesisError(f"columns of w are not orthogonal to {space}", hypothesis=f"w orthogonal to {space}")
    return _finish(_freeze(v + w), np.array(v), np.array(w), side, tol)


def validate_hypotheses(
    p1: DecomposedPerturbation,
    p2: DecomposedPerturbation,
    g,
    a,
    tol: ToleranceConfig = DEFAULT_TOL,
    a_pinv=None,
    a_rank: Optional[int] = None,
) -> UpdateProblem:
    """Check the rank-augmenting hypotheses and bundle an :class:`UpdateProblem`.

    ``p1`` must be split against ``M(a)`` and ``p2`` against ``M(a^T)``.
    ``a_pinv`` may be supplied when already known; otherwise it is computed
    once here.
    """
    a = as_matrix(a, "a")
    g = as_matrix(g, "g")
    ell = a.shape[0]
    if a.shape[1] != ell:
        raise ShapeError(f"a must be square, got {a.shape}")
    if p1.side != "column" or p2.side != "row":
        raise ValueError("p1 must be split against M(A) ('column') and p2 against M(A^T) ('row')")
    k = p1.k
    if p2.k != k or p1.x.shape[0] != ell or p2.x.shape[0] != ell:
        raise ShapeError(f"perturbations {p1.x.shape} and {p2.x.shape} do not fit a {a.shape}")
    if k > ell:
        raise ShapeError(f"update rank k={k} exceeds dimension {ell}")
    if g.shape != (k, k):
        raise ShapeError(f"g must be {k}x{k}, got {g.shape}")
    for i, p in ((1, p1), (2, p2)):
        if not p.b_rank_full:
            raise HypothesisError(
                f"B{i} = W{i}^T W{i} is singular: W{i} does not have rank {k} "
                f"(perturbation {i} has too little component outside "
                f"{'M(A)' if i == 1 else 'M(A^T)'})",
                hypothesis=f"B{i} singular",
            )
    if svd(g, tol).numerical_rank != k:
        raise HypothesisError(f"G is singular (numerical rank < {k})", hypothesis="G singular")
    if a_pinv is None:
        fa = svd(a, tol)
        a_pinv = fa.pinv()
        a_rank = fa.numerical_rank
    else:
        a_pinv = as_matrix(a_pinv, "a_pinv")
        if a_pinv.shape != (ell, ell):
            raise ShapeError(f"a_pinv must be {ell}x{ell}, got {a_pinv.shape}")
    return UpdateProblem(
        a=a, v1=p1.v, w1=p1.w, v2=p2.v, w2=p2.w, g=g,
        c1=p1.c, c2=p2.c, a_pinv=a_pinv, k=k, ell=ell, a_rank=a_rank,
    )


def build_problem(
    a,
    x1,
    g,
    x2=None,
    tol: ToleranceConfig = DEFAULT_TOL,
    factors: Optional[SvdFactors] = None,
    a_pinv=None,
) -> UpdateProblem:
    """Decompose raw ``x1``/``x2`` against ``a`` and validate in one call.

    ``x2`` defaults to ``x1``.  With ``factors = svd(a)`` and ``a_pinv``
    supplied no factorization happens; the remaining work is ``O(ell^2 k)``.
    """
    a = as_matrix(a, "a")
    if factors is None:
        factors = svd(a, tol)
    x2 = x1 if x2 is None else x2
    p1 = decompose(x1, a, "column", tol, factors)
    p2 = decompose(x2, a, "row", tol, factors)
    if a_pinv is None:
        a_pinv = factors.pinv()
    return validate_hypotheses(p1, p2, g, a, tol, a_pinv=a_pinv, a_rank=factors.numerical_rank)
