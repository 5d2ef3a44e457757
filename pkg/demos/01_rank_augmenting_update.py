"""Pseudo-invert a singular matrix after a low-rank update that raises its rank.

A has rank 3 in R^{6x6}.  Adding X1 G X2^T with two columns that reach outside
the column space of A gives a rank-5 matrix Omega.  Given A^+ once, the update
formula produces Omega^+ without a new factorization.
"""

# %%
import numpy as np

from pinvupdate import build_problem, oracle_pinv, penrose_check, rank_augmenting_pinv
from pinvupdate.synth import low_rank

rng = np.random.default_rng(0)
a = low_rank(rng, 6, 3)
x1 = rng.standard_normal((6, 2))
x2 = rng.standard_normal((6, 2))
g = np.array([[2.0, 0.5], [0.0, 1.0]])

# %% Split each X into a part inside the range of A and a part orthogonal to it.
p = build_problem(a, x1, g, x2)
print("|V1| =", round(float(np.linalg.norm(p.v1)), 4), " |W1| =", round(float(np.linalg.norm(p.w1)), 4))
print("A^T W1 ~ 0:", np.allclose(a.T @ p.w1, 0, atol=1e-12))

# %% Apply the update and compare with a fresh SVD pseudoinverse.
omega_pinv = rank_augmenting_pinv(p)
ref = oracle_pinv(p.omega)
print("rank A =", p.a_rank, " rank Omega =", np.linalg.matrix_rank(p.omega))
print("relative difference from SVD:", np.linalg.norm(omega_pinv - ref) / np.linalg.norm(ref))

# %% The four Moore-Penrose conditions.
report = penrose_check(p.omega, omega_pinv)
for name, r in zip("abcd", report.residuals):
    print(f"  condition {name}: {r:.2e}")
print("passed:", report.passed)
