"""Moore-Penrose pseudoinverses of rank-augmenting low-rank updates.

Quick start::

    import numpy as np
    from pinvupdate import build_problem, rank_augmenting_pinv

    a = np.diag([2.0, 0.0])
    x = np.array([[1.0], [1.0]])
    p = build_problem(a, x, np.eye(1))
    rank_augmenting_pinv(p)   # [[0.5, -0.5], [-0.5, 1.5]]
"""

from .densecore import (
    DEFAULT_TOL,
    SvdFactors,
    ToleranceConfig,
    as_matrix,
    frob_norm,
    matmul,
    numerical_rank,
    oracle_pinv,
    svd,
    transpose,
)
from .errors import (
    ConvergenceError,
    HypothesisError,
    MatrixParseError,
    PinvUpdateError,
    PreconditionError,
    ShapeError,
    SingularUpdateError,
)
from .matrixio import format_matrix, parse_matrix, read_matrix, write_matrix
from .problem import UpdateProblem
from .regress import (
    CenteredData,
    Dataset,
    RegressionFit,
    assemble_ssp,
    center,
    fit_ols,
    read_csv,
    ssp_pinv_via_update,
)
from .subspace import (
    DecomposedPerturbation,
    build_problem,
    column_space_projector,
    decompose,
    split_from_parts,
    validate_hypotheses,
)
from .update import (
    NonParallelWarning,
    PenroseReport,
    bartlett_inverse,
    left_projector,
    orthogonal_only_pinv,
    penrose_check,
    rank_augmenting_pinv,
    rank_one_pinv,
    remark_conditions_check,
    right_projector,
    row_space_projector,
    symmetric_pinv,
    woodbury_inverse,
)

__version__ = "0.1.0"
