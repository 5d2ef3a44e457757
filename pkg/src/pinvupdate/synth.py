"""Random structured test instances (used by the benchmark and the test suite)."""

from __future__ import annotations

import numpy as np


def orthonormal(rng: np.random.Generator, n: int, r: int) -> np.ndarray:
    if r == 0:
        return np.zeros((n, 0))
    q, _ = np.linalg.qr(rng.standard_normal((n, r)))
    return q


def low_rank(
    rng: np.random.Generator, ell: int, rank: int, symmetric: bool = False, m: int | None = None
) -> np.ndarray:
    """``U diag(s) V^T`` with exact rank ``rank``; ``s`` in ``[0.5, 2.5)``."""
    m = ell if m is None else m
    s = np.sort(rng.uniform(0.5, 2.5, rank))[::-1]
    u = orthonormal(rng, ell, rank)
    if symmetric:
        signs = rng.choice([-1.0, 1.0], rank)
        a = (u * (s * signs)) @ u.T
        return 0.5 * (a + a.T)
    v = orthonormal(rng, m, rank)
    return (u * s) @ v.T


def update_instance(rng: np.random.Generator, ell: int, rank: int, k: int):
    """Return ``(a, x1, g, x2)`` with unit-normal ``x1``, ``x2``, ``g``."""
    a = low_rank(rng, ell, rank)
    x1 = rng.standard_normal((ell, k))
    x2 = rng.standard_normal((ell, k))
    g = rng.standard_normal((k, k))
    return a, x1, g, x2
