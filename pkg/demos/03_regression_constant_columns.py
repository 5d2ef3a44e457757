"""Least squares when some covariates never vary.

A column that is constant across observations gives a singular centred
covariance.  The uncentred SSP matrix is the covariance plus n xbar xbar^T,
and the mean vector sticks out of the covariance's column space, so the
rank-one singular update applies.
"""

# %%
import io

import numpy as np

from pinvupdate import assemble_ssp, center, fit_ols, oracle_pinv, read_csv, ssp_pinv_via_update

text = """temp,pressure,batch,y
20.1,1.0,3,5.2
22.4,1.0,3,5.9
19.8,1.0,3,5.0
25.0,1.0,3,6.7
21.3,1.0,3,5.6
"""
data = read_csv(io.StringIO(text))
print("covariates:", data.names, " n =", data.n)

# %% Pressure and batch never change, so the covariance has rank 1.
c = center(data)
print("mean:", c.x_bar)
print("covariance rank:", c.cov_rank)

# %% Pseudo-invert the SSP matrix through the update.
sp = ssp_pinv_via_update(c, data.n)
ssp = assemble_ssp(c, data.n)
print("branch:", sp.branch)
print("difference from SVD of X^T X:", np.linalg.norm(sp.pinv - oracle_pinv(ssp)))

# %% Minimum-norm coefficients.  The two constant columns share the intercept
# in proportion to their values.
fit = fit_ols(data)
print("beta:", np.round(fit.beta_hat, 5))
print("residual norm:", round(fit.residual_norm, 5))
