"""The nonsingular case, and the same computation from the command line.

When A is invertible the classical identity applies.  The command-line tool
picks between the two paths from the numerical rank of A.
"""

# %%
import tempfile
from pathlib import Path

import numpy as np

from pinvupdate import bartlett_inverse, read_matrix, woodbury_inverse, write_matrix
from pinvupdate.cli import main

a = np.diag([2.0, 4.0])
u = np.array([1.0, 1.0])
print("rank-one inverse:\n", bartlett_inverse(a, u, u))
print("k = 1 through the general identity:\n", woodbury_inverse(a, u[:, None], [[1.0]], u[:, None]))

# %% Write matrix files and run `pinvupdate update` on a singular A.
with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    write_matrix(np.diag([2.0, 0.0]), tmp / "a.txt")
    write_matrix([[1.0], [1.0]], tmp / "x.txt")
    write_matrix([[1.0]], tmp / "g.txt")
    code = main(["update", str(tmp / "a.txt"), str(tmp / "x.txt"), str(tmp / "g.txt"), "--out", str(tmp / "r.txt")])
    print("exit code:", code)
    print(read_matrix(tmp / "r.txt"))
