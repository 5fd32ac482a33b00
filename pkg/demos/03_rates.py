"""Closed-form contraction factors and their numeric tightness."""
# %%
from srgtools import analyzer as an

# %% one parameter point per method
points = [
    an.MethodSpec("GD_grad", alpha=0.5, mu=1, L=2),
    an.MethodSpec("FS_mono_lip", alpha=0.4, mu=1, L=2),
    an.MethodSpec("FS_mono_coco", alpha=0.5, mu=0.5, beta=1),
    an.MethodSpec("PP_strong", alpha=1, mu=1),
    an.MethodSpec("DRS_refl_sm_coco", alpha=1, mu=0.5, beta=1),
    an.MethodSpec("DRS_refl_cvx", alpha=1, mu=0.5, L=2),
    an.MethodSpec("DRS_overall", alpha=1, mu=0.5, beta=1, theta=0.5),
    an.MethodSpec("MS_DRS", alpha=1, L=0.25, gamma=2, theta=0.5),
]
print(an.reports_to_csv(an.tightness_check(s) for s in points))

# %% random sweep: the numeric supremum of each method's region matches the formula
reports = an.sweep(an.Method.DRS_refl_cvx, 200, seed=0)
print(max(r.abs_gap for r in reports), all(r.tight for r in reports))

# %% the forward step with a Lipschitz operator contracts only for small steps
print(an.fs_lip_contraction_range(1.0, 2.0))
