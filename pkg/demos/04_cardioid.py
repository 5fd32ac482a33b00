"""Composing two firmly nonexpansive operators: the cardioid."""
# %%
from srgtools import analyzer as an
from srgtools import region as rg

# %% sampled product of Disk(1/2, 1/2) with itself against the exact cardioid
rep = an.cardioid_check(resolution=1e-3)
print(f"grid distance {rep.hausdorff:.1e}, inside Disk(1/3, 2/3): {rep.inside_disk}")
print("-1/3 is in Disk(1/3, 2/3) but not in the cardioid:", rep.witness_outside)

# %% so the composition is 2/3-averaged and no better
print(an.averagedness_factor(rg.Cardioid()))
