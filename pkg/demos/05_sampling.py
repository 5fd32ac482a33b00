"""Sampling the SRG of concrete operators; eigenvalues of matrices."""
# %%
import numpy as np

from srgtools import classes as cl
from srgtools import fixedpoint as fp
from srgtools import sampler as sp

# %% multiplication by a complex number has SRG {z, conj z}
print(np.unique(np.round(sp.srg_points(sp.a_z(1 + 1j), 20).points, 12)))

# %% the prox of the l1 norm is firmly nonexpansive
st = fp.soft_threshold(0.5, dim=3)
prox = sp.BlackBox(lambda x: st.resolvent(x, 1.0), 3)
cloud = sp.srg_points(prox, 2000, seed=0, spread=2.0)
print("violations of Disk(1/2, 1/2):", len(sp.cloud_in_region(cloud, cl.averaged(0.5).srg)))

# %% gradient of (x^4 + y^4)/4 sampled with one endpoint at the origin
op = sp.BlackBox(lambda x: x ** 3, 2)
z = sp.srg_points(op, 10_000, strategy="sphere").points
print("max |Im z| / Re z:", (np.abs(z.imag) / z.real).max())   # about 0.3536

# %% eigenvalues of a 3x3 matrix lie in its SRG
m = np.array([[0.5, 2.0, 0.0], [-0.5, 0.5, 0.0], [0.0, 0.0, 2.0]])
rep = sp.eigen_containment(m, samples=20_000)
print(rep.eigenvalues, rep.distances, rep.passed)
