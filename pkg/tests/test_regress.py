import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corpus import dataset_corpus, inv2
from pinvupdate import (
    DEFAULT_TOL,
    Dataset,
    MatrixParseError,
    PreconditionError,
    ShapeError,
    assemble_ssp,
    center,
    fit_ols,
    frob_norm,
    numerical_rank,
    oracle_pinv,
    penrose_check,
    read_csv,
    ssp_pinv_via_update,
)
from pinvupdate.regress import BRANCH_RANGE_RESTRICTED, BRANCH_RANK_AUGMENTING, BRANCH_WOODBURY

FIXTURE = Dataset(x=[[1.0, 1.0], [3.0, 1.0]], y=[1.0, 3.0])


def test_center_examples():
    c = center(FIXTURE)
    np.testing.assert_array_equal(c.x_bar, [2.0, 1.0])
    np.testing.assert_array_equal(c.x_tilde, [[-1.0, 0.0], [1.0, 0.0]])
    np.testing.assert_array_equal(c.cov, np.diag([2.0, 0.0]))
    assert c.cov_rank == 1

    c = center(Dataset(x=[[5.0, 7.0]]))
    np.testing.assert_array_equal(c.x_tilde, np.zeros((1, 2)))
    np.testing.assert_array_equal(c.cov, np.zeros((2, 2)))
    assert c.cov_rank == 0

    c = center(Dataset(x=[[1.0, 0.0], [0.0, 1.0]]))
    np.testing.assert_array_equal(c.x_bar, [0.5, 0.5])
    np.testing.assert_allclose(c.cov, [[0.5, -0.5], [-0.5, 0.5]])


def test_dataset_validation():
    with pytest.raises(ShapeError):
        Dataset(x=[[1.0, 2.0]], y=[1.0, 2.0])
    with pytest.raises(ValueError):
        Dataset(x=[[np.nan]])
    d = Dataset(x=np.ones((4, 3)))
    assert (d.n, d.ell) == (4, 3)


def test_assemble_ssp_examples():
    ssp = assemble_ssp(center(FIXTURE), 2)
    np.testing.assert_array_equal(ssp, [[10.0, 4.0], [4.0, 2.0]])
    np.testing.assert_array_equal(ssp, FIXTURE.x.T @ FIXTURE.x)

    zero_mean = Dataset(x=[[1.0, 2.0], [-1.0, -2.0], [0.5, -3.0], [-0.5, 3.0]])
    c = center(zero_mean)
    np.testing.assert_array_equal(assemble_ssp(c, 4), c.cov)

    np.testing.assert_array_equal(assemble_ssp(center(Dataset(x=[[5.0, 7.0]])), 1), [[25.0, 35.0], [35.0, 49.0]])


def test_ssp_pinv_fixture():
    sp = ssp_pinv_via_update(center(FIXTURE), 2)
    r2 = math.sqrt(2.0)
    assert sp.branch == BRANCH_RANK_AUGMENTING
    np.testing.assert_allclose(sp.split.v[:, 0], [2 * r2, 0.0], atol=1e-15)
    np.testing.assert_allclose(sp.split.w[:, 0], [0.0, r2], atol=1e-15)
    expected = inv2([[10.0, 4.0], [4.0, 2.0]])
    np.testing.assert_allclose(expected, [[0.5, -1.0], [-1.0, 2.5]])
    np.testing.assert_allclose(sp.pinv, expected, atol=1e-14)


def test_ssp_pinv_zero_mean_nonsingular():
    d = Dataset(x=[[1.0, 2.0], [-1.0, -2.0], [0.5, -3.0], [-0.5, 3.0]])
    c = center(d)
    sp = ssp_pinv_via_update(c, d.n)
    assert sp.branch == BRANCH_WOODBURY
    np.testing.assert_allclose(sp.pinv, oracle_pinv(c.cov), atol=1e-14)


def test_ssp_pinv_single_row():
    xb = np.array([5.0, 7.0])
    sp = ssp_pinv_via_update(center(Dataset(x=[xb])), 1)
    assert sp.branch == BRANCH_RANK_AUGMENTING
    np.testing.assert_allclose(sp.pinv, np.outer(xb, xb) / (xb @ xb) ** 2, atol=1e-15)


def test_ssp_pinv_mean_inside_singular_cov():
    # Third covariate is identically zero, so the mean lies in M(cov) while cov is singular.
    rng = np.random.default_rng(4)
    x = np.column_stack([rng.standard_normal((10, 2)) + 1.0, np.zeros(10)])
    d = Dataset(x=x)
    c = center(d)
    sp = ssp_pinv_via_update(c, d.n)
    assert sp.branch == BRANCH_RANGE_RESTRICTED
    ssp = assemble_ssp(c, d.n)
    np.testing.assert_allclose(sp.pinv, oracle_pinv(ssp), atol=1e-12)
    assert penrose_check(ssp, sp.pinv).passed


def test_fit_examples():
    fit = fit_ols(FIXTURE)
    np.testing.assert_allclose(fit.beta_hat, [1.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(FIXTURE.x @ fit.beta_hat, FIXTURE.y, atol=1e-14)
    assert fit.used_rank_augmenting and fit.residual_norm < 1e-14

    fit = fit_ols(Dataset(x=FIXTURE.x, y=[0.0, 0.0]))
    np.testing.assert_array_equal(fit.beta_hat, [0.0, 0.0])

    fit = fit_ols(Dataset(x=np.eye(2), y=[2.0, 5.0]))
    np.testing.assert_allclose(fit.beta_hat, [2.0, 5.0], atol=1e-14)


def test_fit_requires_response():
    with pytest.raises(PreconditionError):
        fit_ols(Dataset(x=np.eye(2)))


def test_regression_corpus_properties():
    tol = DEFAULT_TOL
    for x, y, _ in dataset_corpus(60, seed=21):
        d = Dataset(x=x, y=y)
        c = center(d)
        n = d.n
        # centred columns sum to zero, rows reconstruct
        assert np.all(np.abs(c.x_tilde.sum(axis=0)) <= 1e-10 * n * (1 + np.linalg.norm(c.x_bar)))
        assert frob_norm(c.x_tilde + c.x_bar - x) <= 1e-14 * (1 + frob_norm(x))
        direct = sum(np.outer(r, r) for r in x)
        ssp = assemble_ssp(c, n)
        assert frob_norm(ssp - direct) <= 1e-10 * frob_norm(direct)

        sp = ssp_pinv_via_update(c, n)
        added = 1 if sp.branch == BRANCH_RANK_AUGMENTING else 0
        assert numerical_rank(ssp) == c.cov_rank + added
        assert penrose_check(ssp, sp.pinv).passed

        fit = fit_ols(d)
        r = y - x @ fit.beta_hat
        scale = frob_norm(ssp) * frob_norm(sp.pinv) * np.linalg.norm(x.T @ y) + 1.0
        assert np.linalg.norm(ssp @ sp.pinv @ (x.T @ r)) <= tol.penrose_tol * scale


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_ssp_pinv_matches_oracle(seed):
    (x, y, _), = dataset_corpus(1, seed=seed)
    d = Dataset(x=x, y=y)
    ref = oracle_pinv(x.T @ x)
    sp = ssp_pinv_via_update(center(d), d.n)
    assert frob_norm(sp.pinv - ref) <= 1e-7 * frob_norm(ref)
    beta_ref = ref @ (x.T @ y)
    assert np.linalg.norm(fit_ols(d).beta_hat - beta_ref) <= 1e-7 * (np.linalg.norm(beta_ref) + 1e-300)


def test_read_csv_basic():
    d = read_csv(io.StringIO("a,y,b\n1,1,1\n\n3,3,1\n"))
    np.testing.assert_array_equal(d.x, FIXTURE.x)
    np.testing.assert_array_equal(d.y, FIXTURE.y)
    assert d.names == ("a", "b")


def test_read_csv_without_response(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("Y,z\n1.5,2e3\n")
    d = read_csv(path)
    assert d.y is None
    np.testing.assert_array_equal(d.x, [[1.5, 2000.0]])


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("", 1, 0),
        ("a,y\n", 1, 0),
        ("a,a\n1,2\n", 1, 0),
        ("a,y\n1,2\n3\n", 3, 0),
        ("a,y\n1,2\n3,x\n", 3, 2),
        ("a,y\n1,nan\n", 2, 2),
        ("y\n1\n", 1, 0),
    ],
)
def test_read_csv_errors(text, line, column):
    with pytest.raises(MatrixParseError) as info:
        read_csv(io.StringIO(text))
    assert info.value.line == line
    assert info.value.column == column
