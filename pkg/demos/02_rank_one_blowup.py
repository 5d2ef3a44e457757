"""Rank-one updates and what happens as the new direction shrinks.

With Omega = A + (v1 + w1)(v2 + w2)^T, the pseudoinverse grows like
1 / (|w1| |w2|) as the orthogonal parts vanish.  Scaling both by t should
therefore give a log-log slope of -2.
"""

# %%
import warnings

import numpy as np

from pinvupdate import NonParallelWarning, decompose, frob_norm, rank_one_pinv, row_space_projector
from pinvupdate.synth import low_rank

rng = np.random.default_rng(1)
a = low_rank(rng, 5, 2, symmetric=True)
s = decompose(rng.standard_normal(5), a)
v, w = s.v[:, 0], s.w[:, 0]

# %% Symmetric update: w1 = w2, so the parallel hypothesis holds exactly.
ts = np.logspace(-1, -4, 4)
norms = [frob_norm(rank_one_pinv(a, v, t * w, v, t * w)) for t in ts]
for t, n in zip(ts, norms):
    print(f"t = {t:.0e}   |Omega^+|_F = {n:.3e}")
print("slope:", np.polyfit(np.log(ts), np.log(norms), 1)[0])

# %% The row space of Omega gains exactly the direction w.
proj = row_space_projector(a, w)
print("rank of row-space projector:", np.linalg.matrix_rank(proj))

# %% If w1 and w2 point in different directions the formula is still exact,
# but a warning notes that the usual hypothesis is not met.
s2 = decompose(rng.standard_normal(5), a, "row")
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always", NonParallelWarning)
    rank_one_pinv(a, v, w, s2.v[:, 0], s2.w[:, 0])
print("warnings:", [type(c.message).__name__ for c in caught])
