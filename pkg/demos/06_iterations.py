"""Fixed-point iterations and the worst case for Douglas-Rachford."""
# %%
import numpy as np

from srgtools import analyzer as an
from srgtools import fixedpoint as fp

# %% gradient descent on a quadratic contracts by max |1 - alpha lambda|
op = fp.quadratic(np.diag([1.0, 2.0]))
traj = fp.run(fp.IterationSpec("GD", [op], np.ones(2), alpha=0.5))
print(traj.per_step_factors[:3], fp.rate_verify(traj, 0.5))

# %% DRS on the worst-case pair attains 1/2 + 1/2 R every step
alpha, mu, beta = 1.0, 0.5, 1.0
A, B = fp.worst_case_drs(alpha, mu, beta)
traj = fp.run(fp.IterationSpec("DRS", [A, B], np.array([1.0, 1.0]), alpha=alpha, theta=0.5, max_iters=30))
R = an.closed_form_rate(an.MethodSpec("DRS_overall", alpha=alpha, mu=mu, beta=beta, theta=0.5))
print(traj.per_step_factors[:3], R)
print("rate verified at R:", fp.rate_verify(traj, R), " at R - 1e-3:", fp.rate_verify(traj, R - 1e-3))

# %% trajectories export as CSV
print(traj.to_csv().splitlines()[:4])
