from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class UpdateProblem:
    """A validated rank-augmenting update ``A + (V1 + W1) G (V2 + W2)^T``.

    Instances are normally produced by
    :func:`pinvupdate.subspace.validate_hypotheses`, which checks that the
    ``V`` parts lie in the column/row space of ``A``, the ``W`` parts are
    orthogonal to it, ``W_i^T W_i`` and ``G`` have full rank ``k``, and
    fills ``a_pinv`` and ``c1``/``c2``.
    """

    a: np.ndarray
    v1: np.ndarray
    w1: np.ndarray
    v2: np.ndarray
    w2: np.ndarray
    g: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    a_pinv: np.ndarray
    k: int
    ell: int
    a_rank: Optional[int] = None

    @property
    def x1(self) -> np.ndarray:
        return self.v1 + self.w1

    @property
    def x2(self) -> np.ndarray:
        return self.v2 + self.w2

    @property
    def omega(self) -> np.ndarray:
        out = self.a + (self.x1 @ self.g) @ self.x2.T
        out.setflags(write=False)
        return out
