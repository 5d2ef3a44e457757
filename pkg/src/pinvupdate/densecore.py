"""Dense real matrices, a one-sided Jacobi SVD and the SVD pseudoinverse oracle.

Matrices are plain ``float64`` numpy arrays.  Every public function returns a
fresh array with ``writeable=False`` so results can be shared freely; inputs
are validated by :func:`as_matrix` (two-dimensional, finite entries).

The SVD is a cyclic one-sided (Hestenes) Jacobi iteration using a
round-robin pairing so that each round rotates ``n/2`` disjoint column pairs
at once.  It is accurate but quadratic in Python-level rounds, so matrices
whose smaller dimension exceeds :data:`JACOBI_MAX_DIM` are handed to LAPACK
when ``method="auto"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, ShapeError

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "SvdFactors",
    "JACOBI_MAX_DIM",
    "as_matrix",
    "as_vector",
    "matmul",
    "transpose",
    "svd",
    "numerical_rank",
    "oracle_pinv",
    "frob_norm",
]

JACOBI_MAX_DIM = 128
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 30


@dataclass(frozen=True)
class ToleranceConfig:
    """Tolerances used across the package.

    rank_rel_tol
        Singular values at or below ``rank_rel_tol * max(rows, cols) * sigma_max``
        count as zero.
    penrose_tol
        Relative tolerance for the four Moore-Penrose conditions.
    subspace_tol
        Relative tolerance for "lies in" / "is orthogonal to" a subspace.
    """

    rank_rel_tol: float = 1e-10
    penrose_tol: float = 1e-8
    subspace_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_rel_tol", "penrose_tol", "subspace_tol"):
            value = getattr(self, name)
            if not (0.0 < value < 1.0):
                raise ValueError(f"{name} must lie in (0, 1), got {value!r}")


DEFAULT_TOL = ToleranceConfig()


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return a read-only float64 copy of ``a`` as a 2-D array.

    Scalars become 1x1 and 1-D input becomes a column.  Raises
    :class:`ShapeError` for higher-rank or empty input and
    :class:`ValueError` for non-finite entries.
    """
    if (
        isinstance(a, np.ndarray)
        and a.dtype == np.float64
        and a.ndim == 2
        and a.size
        and not a.flags.writeable
        and np.isfinite(a).all()
    ):
        # Read-only input cannot change under us, so sharing it is safe.
        return a
    arr = np.array(a, dtype=np.float64, copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ShapeError(f"{name} must be nonempty, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} has non-finite entries")
    return _freeze(arr)


def as_vector(x, name: str = "vector") -> np.ndarray:
    """Return a read-only 1-D float64 copy; accepts n-vectors, n x 1 and 1 x n."""
    arr = np.array(x, dtype=np.float64, copy=True)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.reshape(-1)
    if arr.ndim != 1 or arr.size == 0:
        raise ShapeError(f"{name} must be a nonempty vector, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} has non-finite entries")
    return _freeze(arr)


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, "left operand")
    b = as_matrix(b, "right operand")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return _freeze(a @ b)


def transpose(a) -> np.ndarray:
    """Transpose; for real matrices this is also the conjugate transpose."""
    return _freeze(np.ascontiguousarray(as_matrix(a).T))


def frob_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64)))


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD truncated at the numerical rank: ``a ~= u @ diag(sigma) @ v.T``."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    numerical_rank: int
    rank_threshold: float

    @property
    def shape(self) -> tuple[int, int]:
        return (self.u.shape[0], self.v.shape[0])

    def reconstruct(self) -> np.ndarray:
        return _freeze((self.u * self.sigma) @ self.v.T)

    def pinv(self) -> np.ndarray:
        return _freeze((self.v / self.sigma) @ self.u.T)


@lru_cache(maxsize=64)
def _round_robin(m: int) -> tuple[np.ndarray, ...]:
    # Column orderings for a round-robin tournament on m (even) players: in
    # each ordering, position j < m/2 is paired with position j + m/2.
    idx = list(range(m))
    orders = []
    for _ in range(m - 1):
        orders.append(np.array(idx[: m // 2] + idx[m // 2 :][::-1]))
        idx = [idx[0], idx[-1]] + idx[1:-1]
    return tuple(orders)


def _jacobi_tall(a: np.ndarray, tol: float, max_sweeps: int):
    """One-sided Jacobi on a tall matrix.

    Returns ``(w, v)`` with ``a @ v = w``, ``v`` orthogonal and the columns of
    ``w`` mutually orthogonal to relative accuracy ``tol``.
    """
    rows, n = a.shape
    m = n + n % 2
    h = m // 2
    w = np.zeros((rows, m))
    w[:, :n] = a
    v = np.eye(m)
    # Columns this small are rounding noise; rotating them cannot converge
    # in the relative sense and they fall below any rank threshold anyway.
    floor2 = (np.finfo(np.float64).eps * np.linalg.norm(a)) ** 2
    orders = _round_robin(m)
    label = np.arange(m)  # label[j] = original column now stored at j
    off = 0.0
    for _ in range(max_sweeps):
        off = 0.0
        rotated = False
        for order in orders:
            where = np.empty(m, dtype=np.intp)
            where[label] = np.arange(m)
            perm = where[order]
            w = w[:, perm]
            v = v[:, perm]
            label = order
            wp, wq = w[:, :h], w[:, h:]
            alpha = np.einsum("ij,ij->j", wp, wp)
            beta = np.einsum("ij,ij->j", wq, wq)
            gamma = np.einsum("ij,ij->j", wp, wq)
            live = np.minimum(alpha, beta) > floor2
            rel = np.zeros(h)
            rel[live] = np.abs(gamma[live]) / (np.sqrt(alpha[live]) * np.sqrt(beta[live]))
            sel = rel > tol
            if not sel.any():
                continue
            off = max(off, float(rel.max()))
            rotated = True
            zeta = (beta[sel] - alpha[sel]) / (2.0 * gamma[sel])
            t_sel = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(1.0, zeta))
            t = np.zeros(h)
            t[sel] = t_sel
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            wp, wq = wp.copy(), wq.copy()
            w[:, :h] = c * wp - s * wq
            w[:, h:] = s * wp + c * wq
            vp, vq = v[:, :h].copy(), v[:, h:].copy()
            v[:, :h] = c * vp - s * vq
            v[:, h:] = s * vp + c * vq
        if not rotated:
            where = np.empty(m, dtype=np.intp)
            where[label] = np.arange(m)
            return w[:, where][:, :n], v[:, where][:n, :n]
    raise ConvergenceError(
        f"Jacobi SVD did not converge in {max_sweeps} sweeps "
        f"(off-diagonal residual {off:.3e})",
        residual=off,
    )


def _svd_jacobi(a: np.ndarray):
    flip = a.shape[0] < a.shape[1]
    work = a.T if flip else a
    # Unit max-entry scaling keeps the squared column norms representable.
    scale = float(np.abs(a).max())
    if scale > 0.0:
        work = work / scale
    w, v = _jacobi_tall(work, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    sigma = np.linalg.norm(w, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    w = w[:, order]
    v = v[:, order]
    nz = sigma > 0
    u = np.zeros_like(w)
    u[:, nz] = w[:, nz] / sigma[nz]
    if scale > 0.0:
        sigma = sigma * scale
    if flip:
        return v, sigma, u
    return u, sigma, v


def _svd_lapack(a: np.ndarray):
    try:
        u, sigma, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"LAPACK SVD did not converge: {exc}") from exc
    return u, sigma, vt.T


def svd(a, tol: ToleranceConfig = DEFAULT_TOL, method: str = "auto") -> SvdFactors:
    """Thin SVD of ``a`` truncated at its numerical rank.

    ``method`` is ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi when
    ``min(a.shape) <= JACOBI_MAX_DIM``).
    """
    a = as_matrix(a)
    rows, cols = a.shape
    if method == "auto":
        method = "jacobi" if min(rows, cols) <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        u, sigma, v = _svd_jacobi(a)
    elif method == "lapack":
        u, sigma, v = _svd_lapack(a)
    else:
        raise ValueError(f"unknown SVD method {method!r}")
    sigma_max = float(sigma[0]) if sigma.size else 0.0
    threshold = tol.rank_rel_tol * max(rows, cols) * sigma_max
    floor = np.finfo(np.float64).eps * frob_norm(a)
    r = int(np.count_nonzero(sigma > max(threshold, floor)))
    return SvdFactors(
        u=_freeze(np.ascontiguousarray(u[:, :r])),
        sigma=_freeze(np.array(sigma[:r])),
        v=_freeze(np.ascontiguousarray(v[:, :r])),
        numerical_rank=r,
        rank_threshold=threshold,
    )


def numerical_rank(a, tol: ToleranceConfig = DEFAULT_TOL, method: str = "auto") -> int:
    return svd(a, tol, method).numerical_rank


def oracle_pinv(a, tol: ToleranceConfig = DEFAULT_TOL, method: str = "auto") -> np.ndarray:
    """Moore-Penrose pseudoinverse ``v @ diag(1/sigma) @ u.T`` from :func:`svd`."""
    return svd(a, tol, method).pinv()
