"""Operator classes, their h-functions and derived classes."""
# %%
import numpy as np

from srgtools import classes as cl

# %% catalog
for c in (cl.monotone(), cl.strongly_monotone(1.0), cl.lipschitz(2.0), cl.cocoercive(1.0),
          cl.averaged(0.5), cl.inverse_lipschitz(2.0)):
    print(f"{str(c):18s} {c.srg}  chord={c.chord} arcs={c.left_arc},{c.right_arc}")

# %% an h-function decides SRG membership of a point z through h(|z|^2, 1, Re z) <= 0
h = cl.cocoercive(1.0).h
print(h.on_point(np.array([0.5, 1.0, 1.5])))   # <= 0 inside Disk(1/2, 1/2)

# %% derived classes from the mini-language
for spec in ("M mu=1 |resolvent 1", "M |reflect 2", "C beta=1 |sum C beta=2",
             "M mu=0.5 |intersect C beta=1 |reflect 1"):
    d = cl.derive_spec(spec)
    print(f"{spec:42s} -> {d.region}  [{d.certificate.name}]")

# %% composition without an exact rule falls back to a sampled region
d = cl.derive_spec("N theta=0.5 |compose N theta=0.5", resolution=5e-3)
print(type(d.region).__name__, d.certificate.name)
