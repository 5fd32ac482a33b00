"""Regions of the extended complex plane: membership, inversion, affine maps."""
# %%
import numpy as np

from srgtools import region as rg

# %% primitives and membership
d = rg.Disk(2.0, 0.5)
print(rg.contains(d, 2.4), rg.contains(d, 1.4))   # True False
print(rg.HalfPlaneGE(0.0).has_infinity)           # half-planes reach infinity

# %% inversion z -> 1/conj(z) maps generalized circles to generalized circles
print(rg.invert(d))                    # Disk(8/15, 2/15)
print(rg.invert(rg.Disk(0.5, 0.5)))    # a disk through 0 becomes the half-plane Re z >= 1
print(rg.invert(rg.Disk(0.0, 1.0)))    # the unit disk becomes its exterior (plus infinity)

# %% affine maps act on parameters
print(rg.affine(rg.Disk(1.0, 2.0), -0.5, 1.0))
print(rg.affine(rg.Cardioid(), 2.0, 1.0))

# %% text form round trip
r = rg.from_text("INTERSECT / DISK 0.0 1.0 / HALFPLANE_GE 0.0")
print(rg.to_text(r))
z = np.array([0.5, -0.5, 0.5j])
print(r.mask(z))

# %% moduli
print(rg.sup_modulus(rg.Cardioid()), rg.inf_modulus(rg.Disk(2.0, 0.5)))
