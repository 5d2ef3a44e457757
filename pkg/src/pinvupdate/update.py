"""Inverse and pseudoinverse identities for low-rank updates.

For nonsingular ``A`` the classical Woodbury and Bartlett (rank-one)
formulas apply.  For singular ``A`` the update

    Omega = A + (V1 + W1) G (V2 + W2)^T

with ``V1`` in ``M(A)``, ``W1`` orthogonal to ``M(A)``, ``V2`` in ``M(A^T)``,
``W2`` orthogonal to ``M(A^T)`` and ``W_i^T W_i``, ``G`` of full rank ``k``
has the closed-form pseudoinverse

    Omega^+ = A^+ - C2 V2^T A^+ - A^+ V1 C1^T + C2 (G^+ + V2^T A^+ V1) C1^T,

``C_i = W_i (W_i^T W_i)^{-1}``.  Given ``A^+`` this costs ``O(ell^2 k)``.
The special cases (``V = 0``, symmetric, rank one) are exposed separately
together with the projector identities and a Penrose-condition checker.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .densecore import DEFAULT_TOL, ToleranceConfig, as_matrix, as_vector, frob_norm, oracle_pinv, svd
from .errors import HypothesisError, PreconditionError, ShapeError, SingularUpdateError
from .problem import UpdateProblem
from .subspace import split_from_parts

__all__ = [
    "UpdateProblem",
    "PenroseReport",
    "RemarkReport",
    "NonParallelWarning",
    "woodbury_inverse",
    "rank_augmenting_pinv",
    "orthogonal_only_pinv",
    "symmetric_pinv",
    "bartlett_inverse",
    "rank_one_pinv",
    "left_projector",
    "right_projector",
    "row_space_projector",
    "penrose_check",
    "remark_conditions_check",
]


class NonParallelWarning(UserWarning):
    """Rank-one update with ``w2`` not parallel to ``w1``."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _inverse_of_nonsingular(g: np.ndarray) -> np.ndarray:
    # G is hypothesised nonsingular, so G^+ = G^{-1}.
    return sla.solve(g, np.eye(g.shape[0]))


def _lu_of_nonsingular(a: np.ndarray, tol: ToleranceConfig, what: str):
    ell = a.shape[0]
    if a.shape[1] != ell:
        raise ShapeError(f"{what} must be square, got {a.shape}")
    if svd(a, tol).numerical_rank != ell:
        raise PreconditionError(
            f"{what} is singular; use rank_augmenting_pinv (or rank_one_pinv) for singular matrices"
        )
    return sla.lu_factor(a)


# ---------------------------------------------------------------------------
# nonsingular A


def woodbury_inverse(a, x1, g, x2, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``(A + X1 G X2^T)^{-1}`` from ``A^{-1}`` via the k x k capacitance matrix."""
    a = as_matrix(a, "a")
    x1 = as_matrix(x1, "x1")
    x2 = as_matrix(x2, "x2")
    g = as_matrix(g, "g")
    ell = a.shape[0]
    k = g.shape[0]
    if g.shape != (k, k) or x1.shape != (ell, k) or x2.shape != (ell, k):
        raise ShapeError(f"incompatible shapes a{a.shape} x1{x1.shape} g{g.shape} x2{x2.shape}")
    lu = _lu_of_nonsingular(a, tol, "a")
    if svd(g, tol).numerical_rank != k:
        raise PreconditionError("g is singular")
    a_inv = sla.lu_solve(lu, np.eye(ell))
    ainv_x1 = a_inv @ x1
    x2t_ainv = x2.T @ a_inv
    g_inv = _inverse_of_nonsingular(g)
    inner = x2.T @ ainv_x1
    cap = g_inv + inner
    s = np.linalg.svd(cap, compute_uv=False)
    if s[-1] <= tol.rank_rel_tol * (1.0 + frob_norm(g_inv) + frob_norm(inner)):
        raise SingularUpdateError("capacitance matrix G^-1 + X2^T A^-1 X1 is singular: A + X1 G X2^T is singular")
    return _freeze(a_inv - ainv_x1 @ sla.solve(cap, x2t_ainv))


def bartlett_inverse(a, v1, v2, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``(A + v1 v2^T)^{-1}`` for nonsingular ``A``."""
    a = as_matrix(a, "a")
    v1 = as_vector(v1, "v1")
    v2 = as_vector(v2, "v2")
    ell = a.shape[0]
    if v1.size != ell or v2.size != ell:
        raise ShapeError(f"vectors of length {v1.size}, {v2.size} do not fit a{a.shape}")
    lu = _lu_of_nonsingular(a, tol, "a")
    a_inv = sla.lu_solve(lu, np.eye(ell))
    y = a_inv @ v1
    z = v2 @ a_inv
    q = float(v2 @ y)
    den = 1.0 + q
    if abs(den) <= tol.rank_rel_tol * (1.0 + abs(q)):
        raise SingularUpdateError("1 + v2^T A^-1 v1 vanishes: A + v1 v2^T is singular")
    return _freeze(a_inv - np.outer(y, z) / den)


# ---------------------------------------------------------------------------
# singular A


def rank_augmenting_pinv(p: UpdateProblem, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Pseudoinverse of ``p.omega`` from the cached ``A^+``."""
    ap = p.a_pinv
    g_inv = _inverse_of_nonsingular(p.g)
    ap_v1 = ap @ p.v1
    v2t_ap = p.v2.T @ ap
    middle = g_inv + v2t_ap @ p.v1
    # -C2 (V2^T A^+) + (C2 M - A^+ V1) C1^T as one ell x 2k by 2k x ell product.
    left = np.hstack([p.c2, p.c2 @ middle - ap_v1])
    right = np.vstack([-v2t_ap, p.c1.T])
    return _freeze(ap + left @ right)


def orthogonal_only_pinv(a_pinv, c1, c2, g) -> np.ndarray:
    """``A^+ + C2 G^{-1} C1^T``: the update when ``V1 = V2 = 0``."""
    a_pinv = as_matrix(a_pinv, "a_pinv")
    c1 = as_matrix(c1, "c1")
    c2 = as_matrix(c2, "c2")
    g = as_matrix(g, "g")
    ell = a_pinv.shape[0]
    k = g.shape[0]
    if a_pinv.shape != (ell, ell) or c1.shape != (ell, k) or c2.shape != (ell, k) or g.shape != (k, k):
        raise ShapeError(
            f"incompatible shapes a_pinv{a_pinv.shape} c1{c1.shape} c2{c2.shape} g{g.shape}"
        )
    return _freeze(a_pinv + (c2 @ _inverse_of_nonsingular(g)) @ c1.T)


def symmetric_pinv(a, v, w, g, tol: ToleranceConfig = DEFAULT_TOL, a_pinv=None) -> np.ndarray:
    """Pseudoinverse of ``A + (V + W) G (V + W)^T`` for symmetric ``A``."""
    a = as_matrix(a, "a")
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"a must be square, got {a.shape}")
    if frob_norm(a - a.T) > 1e-12 * frob_norm(a):
        raise PreconditionError("a is not symmetric")
    fa = svd(a, tol)
    p = split_from_parts(v, w, a, "column", tol, fa)
    if not p.b_rank_full:
        raise HypothesisError("B = W^T W is singular", hypothesis="B singular")
    g = as_matrix(g, "g")
    k = p.k
    if g.shape != (k, k):
        raise ShapeError(f"g must be {k}x{k}, got {g.shape}")
    if svd(g, tol).numerical_rank != k:
        raise HypothesisError("G is singular", hypothesis="G singular")
    ap = fa.pinv() if a_pinv is None else as_matrix(a_pinv, "a_pinv")
    c = p.c
    # A^+ is symmetric, so C V^T A^+ is the transpose of A^+ V C^T.
    t = (ap @ p.v) @ c.T
    middle = _inverse_of_nonsingular(g) + p.v.T @ ap @ p.v
    out = ap - t.T - t + (c @ middle) @ c.T
    return _freeze(out)


def _rank_one_checks(a, v1, w1, v2, w2, tol, fa):
    for i, (v, w, side) in enumerate(((v1, w1, "column"), (v2, w2, "row")), start=1):
        split_from_parts(v, w, a, side, tol, fa)
        scale = np.linalg.norm(v + w)
        if np.linalg.norm(w) <= max(tol.subspace_tol * scale, fa.rank_threshold):
            raise HypothesisError(
                f"w{i} vanishes: the pseudoinverse grows without bound as w{i} -> 0",
                hypothesis=f"w{i} zero",
            )
    cos = abs(float(w1 @ w2)) / (np.linalg.norm(w1) * np.linalg.norm(w2))
    if 1.0 - cos > tol.subspace_tol:
        warnings.warn(
            "w2 is not parallel to w1; the result still matches the general "
            "rank-augmenting formula at k=1",
            NonParallelWarning,
            stacklevel=3,
        )


def rank_one_pinv(
    a, v1, w1, v2, w2, tol: ToleranceConfig = DEFAULT_TOL, a_pinv=None
) -> np.ndarray:
    """Pseudoinverse of ``A + (v1 + w1)(v2 + w2)^T`` for singular ``A``.

    ``v1`` must lie in ``M(A)``, ``w1`` be orthogonal to it, and likewise
    ``v2``, ``w2`` for ``M(A^T)``; both ``w_i`` nonzero.  A non-parallel
    ``w1``, ``w2`` only triggers :class:`NonParallelWarning`.
    """
    a = as_matrix(a, "a")
    v1, w1, v2, w2 = (as_vector(z, n) for z, n in ((v1, "v1"), (w1, "w1"), (v2, "v2"), (w2, "w2")))
    ell = a.shape[0]
    if a.shape[1] != ell or any(z.size != ell for z in (v1, w1, v2, w2)):
        raise ShapeError(f"vectors must have length {ell} to match square a")
    fa = svd(a, tol)
    _rank_one_checks(a, v1, w1, v2, w2, tol, fa)
    ap = fa.pinv() if a_pinv is None else as_matrix(a_pinv, "a_pinv")
    n1 = float(w1 @ w1)
    n2 = float(w2 @ w2)
    ap_v1 = ap @ v1
    v2t_ap = v2 @ ap
    out = (
        ap
        - np.outer(w2, v2t_ap) / n2
        - np.outer(ap_v1, w1) / n1
        + (1.0 + float(v2t_ap @ v1)) * np.outer(w2, w1) / (n1 * n2)
    )
    return _freeze(out)


# ---------------------------------------------------------------------------
# projectors


def left_projector(p: UpdateProblem) -> np.ndarray:
    """``A A^+ + W1 C1^T``, the projector onto ``M(Omega)``."""
    return _freeze(p.a @ p.a_pinv + p.w1 @ p.c1.T)


def right_projector(p: UpdateProblem) -> np.ndarray:
    """``A^+ A + C2 W2^T``, the projector onto ``M(Omega^T)``."""
    return _freeze(p.a_pinv @ p.a + p.c2 @ p.w2.T)


def row_space_projector(a, w, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``A^+ A + w w^T / |w|^2`` for ``w`` nonzero and orthogonal to ``M(A^T)``."""
    a = as_matrix(a, "a")
    w = as_vector(w, "w")
    if w.size != a.shape[1]:
        raise ShapeError(f"w has length {w.size}, expected {a.shape[1]}")
    fa = svd(a, tol)
    nw = float(np.linalg.norm(w))
    if nw <= max(fa.rank_threshold, np.finfo(np.float64).tiny):
        raise HypothesisError("w vanishes", hypothesis="w zero")
    if np.linalg.norm(fa.v.T @ w) > tol.subspace_tol * (1.0 + nw):
        raise HypothesisError("w is not orthogonal to M(A^T)", hypothesis="w orthogonal to M(A^T)")
    return _freeze(fa.pinv() @ a + np.outer(w, w) / (nw * nw))


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class PenroseReport:
    """Frobenius residuals of the four Moore-Penrose conditions.

    ``passed`` iff every residual is at most
    ``tol_used * (1 + |Omega|_F) * (1 + |candidate|_F)``.
    """

    res_a: float
    res_b: float
    res_c: float
    res_d: float
    passed: bool
    tol_used: float
    bound: float

    @property
    def residuals(self) -> tuple[float, float, float, float]:
        return (self.res_a, self.res_b, self.res_c, self.res_d)

    def as_dict(self) -> dict:
        return {
            "res_a": self.res_a,
            "res_b": self.res_b,
            "res_c": self.res_c,
            "res_d": self.res_d,
            "passed": self.passed,
            "tol_used": self.tol_used,
        }


def penrose_check(omega, candidate, tol: ToleranceConfig = DEFAULT_TOL) -> PenroseReport:
    omega = as_matrix(omega, "omega")
    x = as_matrix(candidate, "candidate")
    if x.shape != omega.shape[::-1]:
        raise ShapeError(f"candidate {x.shape} is not conformable with omega {omega.shape}")
    ox = omega @ x
    xo = x @ omega
    res = (
        frob_norm(ox @ omega - omega),
        frob_norm(xo @ x - x),
        frob_norm(ox - ox.T),
        frob_norm(xo - xo.T),
    )
    bound = tol.penrose_tol * (1.0 + frob_norm(omega)) * (1.0 + frob_norm(x))
    return PenroseReport(*res, passed=all(r <= bound for r in res), tol_used=tol.penrose_tol, bound=bound)


@dataclass(frozen=True)
class RemarkReport:
    """Residuals of the four weaker identities that can replace the rank conditions."""

    residuals: tuple[float, float, float, float]
    passed: bool

    def __bool__(self) -> bool:
        return self.passed


def remark_conditions_check(p: UpdateProblem, tol: ToleranceConfig = DEFAULT_TOL) -> RemarkReport:
    """Evaluate

    * ``G W2^T C2 G^+ C1^T = C1^T``
    * ``G W2^T C2 V2^T = G V2^T``
    * ``C2 G^+ C1^T W1 G = C2``
    * ``V1 C1^T W1 G = V1 G``

    ``G^+`` comes from the SVD oracle so that singular ``G`` can be probed.
    """
    g_pinv = oracle_pinv(p.g, tol)
    g, c1, c2, v1, v2, w1, w2 = p.g, p.c1, p.c2, p.v1, p.v2, p.w1, p.w2
    pairs = (
        (g @ w2.T @ c2 @ g_pinv @ c1.T, c1.T),
        (g @ w2.T @ c2 @ v2.T, g @ v2.T),
        (c2 @ g_pinv @ c1.T @ w1 @ g, c2),
        (v1 @ c1.T @ w1 @ g, v1 @ g),
    )
    res = tuple(frob_norm(lhs - rhs) for lhs, rhs in pairs)
    ok = all(
        r <= tol.penrose_tol * (1.0 + frob_norm(lhs) + frob_norm(rhs))
        for r, (lhs, rhs) in zip(res, pairs)
    )
    return RemarkReport(residuals=res, passed=ok)
