"""Invariant suite behind ``srgtools verify``.

Each check returns a :class:`CheckResult`; :func:`run_all` runs them in a
fixed order with fixed seeds, so the suite is deterministic.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import analyzer as an
from . import classes as cl
from . import fixedpoint as fp
from . import region as rg
from . import sampler as sp


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} ({self.seconds:.2f}s) {self.detail}".rstrip()


def canonical_regions() -> list:
    return [
        rg.Disk(0.0, 1.0), rg.Disk(2.0, 0.5), rg.Disk(0.5, 0.5), rg.Disk(-1.0, 0.25),
        rg.DiskExterior(0.0, 1.0), rg.DiskExterior(1.0, 0.5),
        rg.HalfPlaneGE(0.0), rg.HalfPlaneGE(1.0), rg.HalfPlaneLE(-1.0),
        rg.intersect(rg.HalfPlaneGE(0.0), rg.Disk(0.0, 1.0)),
        rg.intersect(rg.HalfPlaneGE(0.5), rg.Disk(0.5, 1.0)),
        rg.intersect(rg.HalfPlaneGE(0.0), rg.DiskExterior(0.0, 0.5)),
        rg.Cardioid(), rg.Cardioid(0.5, 2.0, -1),
        rg.Points([0.0, 1j, -1j, 2.0]),
    ]


def catalog() -> list:
    return [cl.monotone(), cl.strongly_monotone(0.7), cl.lipschitz(1.5), cl.cocoercive(0.8),
            cl.averaged(0.3), cl.averaged(1.0), cl.inverse_lipschitz(2.0)]


def derived_full_classes() -> list:
    """SRG-full classes built by transformations, with their h-functions."""
    out = []
    for base, steps in [
        (cl.strongly_monotone(1.0), cl.resolvent(1.0)),
        (cl.monotone(), [cl.Intersect(cl.lipschitz(1.0))]),
        (cl.strongly_monotone(0.5), [cl.Intersect(cl.cocoercive(1.0))] + cl.reflected_resolvent(1.0)),
        (cl.lipschitz(2.0), [cl.Scale(-0.5), cl.Shift(1.0)]),
        (cl.cocoercive(1.0), [cl.PreScale(2.0)]),
        (cl.monotone(), [cl.Intersect(cl.inverse_lipschitz(2.0))] + cl.reflected_resolvent(1.5)),
    ]:
        d = cl.derive(base, steps)
        out.append((f"{base}{''.join('|' + type(s).__name__ for s in steps)}", d))
    return out


def _grid(n=64, lo=-3.0, hi=3.0):
    xs = np.linspace(lo, hi, n)
    return (xs[:, None] + 1j * xs[None, :]).ravel()


def _ambiguous(region, z, band=1e-9):
    return region.mask(z, band) & ~region.mask(z, -band)


def check_involution():
    z = _grid(64)
    bad = []
    for g in canonical_regions():
        gg = rg.invert(rg.invert(g))
        ok = (gg.mask(z) == g.mask(z)) | _ambiguous(g, z)
        if not ok.all() or gg.has_infinity != g.has_infinity:
            bad.append(rg.to_text(g).replace("\n", " / "))
    return not bad, f"{len(canonical_regions())} regions, 4096 points" + (f"; failed: {bad}" if bad else "")


def check_affine_group():
    z = _grid(64)
    bad = 0
    for g in canonical_regions():
        for a in (2.0, -0.5, 3.0):
            for b in (1.0, -0.25):
                back = rg.affine(rg.affine(g, a, b), 1 / a, -b / a)
                ok = (back.mask(z) == g.mask(z)) | _ambiguous(g, z, 1e-8)
                bad += int(not ok.all())
    return bad == 0, f"{bad} failures"


def check_conjugate_symmetry():
    z = _grid(48)
    regions = list(canonical_regions())
    regions += [rg.invert(g) for g in canonical_regions()]
    regions += [rg.affine(g, -1.5, 0.3) for g in canonical_regions()]
    lens = rg.intersect(rg.Disk(0.5, 0.5), rg.HalfPlaneGE(0.2))
    regions.append(rg.minkowski_product(lens, rg.Disk(0.5, 0.5), resolution=1e-2).region)
    regions.append(rg.minkowski_sum(lens, rg.Cardioid(), resolution=1e-2).region)
    bad = sum(int(not np.array_equal(r.mask(z), r.mask(np.conj(z)))) for r in regions)
    return bad == 0, f"{len(regions)} regions, {bad} asymmetric"


def check_h_homogeneity():
    rng = np.random.default_rng(3)
    hs = [c.h for c in catalog()] + [d.h for _, d in derived_full_classes()]
    a = rng.uniform(0, 4, 200)
    b = rng.uniform(0, 4, 200)
    c = rng.uniform(-1, 1, 200) * np.sqrt(a * b)
    worst = 0.0
    for h in hs:
        base = h(a, b, c)
        for t in (0.0, 0.5, 2.0, 10.0):
            err = np.abs(h(t * a, t * b, t * c) - t * base)
            worst = max(worst, float((err / np.maximum(1.0, np.abs(t * base))).max()))
    return worst <= 1e-9, f"max relative error {worst:.2e}"


def check_h_membership():
    z = _grid(80)
    bad = []
    items = [(str(c), c.h, c.srg) for c in catalog()] + [(n, d.h, d.region) for n, d in derived_full_classes()]
    for name, h, region in items:
        hv = h.on_point(z)
        inside = region.mask(z, 1e-12)
        decided = np.abs(hv) > 1e-9
        if np.any((hv[decided] <= 0) != inside[decided]):
            bad.append(name)
        if cl.infinity_from_h(h) != region.has_infinity:
            bad.append(name + " (infinity)")
    return not bad, f"{len(items)} classes" + (f"; failed: {bad}" if bad else "")


def check_chord_arc_flags():
    bad = []
    for c in catalog():
        got = cl.class_flags_from_region(c.srg, 32)
        if got != (c.chord, c.left_arc, c.right_arc):
            bad.append(f"{c}: declared {(c.chord, c.left_arc, c.right_arc)} measured {got}")
    if cl.verify_chord(rg.Points([1j, -1j]), 16):
        bad.append("rotation points pass the chord test")
    return not bad, "; ".join(bad) or f"{len(catalog())} classes"


def check_spherical_triangle():
    rng = np.random.default_rng(5)
    worst = 0.0
    for dim in (2, 3, 5):
        v = rng.normal(size=(3, 3334, dim))
        for a, b, c in zip(*v):
            ab, bc, ac = sp.angle(a, b), sp.angle(b, c), sp.angle(a, c)
            worst = max(worst, abs(ab - bc) - ac, ac - ab - bc)
    return worst <= 1e-9, f"10002 triples, worst excess {worst:.2e}"


def check_composition_commutes():
    a = an.method_region(an.MethodSpec("drs_refl_sm_coco", alpha=1.0, mu=0.5, beta=1.0))[0]
    b = rg.Disk(0.5, 0.5)
    ab = rg.minkowski_product(a, b, resolution=5e-3).region
    ba = rg.minkowski_product(b, a, resolution=5e-3).region
    z = _grid(60, -1.2, 1.2)
    same = np.array_equal(ab.mask(z), ba.mask(z))
    return same, "60x60 grid"


def check_drs_fixed_point():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(5):
        n = 4
        q = rng.normal(size=(n, n))
        Q = q @ q.T + 0.1 * np.eye(n)
        s = rng.normal(size=(n, n))
        M = (s - s.T) + 0.2 * np.eye(n)
        bvec = rng.normal(size=n)
        A = fp.quadratic(Q, bvec)
        B = fp.linear_monotone(M)
        spec = fp.IterationSpec("DRS", [A, B], rng.normal(size=n), alpha=0.7, theta=0.5,
                                max_iters=5000, stop_tol=1e-12)
        traj = fp.run(spec)
        x = fp.drs_zero(spec, traj.fixed_point)
        residual = np.linalg.norm(Q @ x + bvec + M @ x)
        worst = max(worst, residual)
    return worst <= 10 * 1e-12 * 100, f"max residual of A+B at J_B(z*) {worst:.2e}"


def check_circle_number():
    classes = catalog() + [
        cl.derive(cl.monotone(), [cl.Intersect(cl.lipschitz(1.0))]).as_class("M∩L1"),
        cl.derive(cl.strongly_monotone(0.5), [cl.Intersect(cl.cocoercive(1.0))]).as_class("Mmu∩C"),
        cl.derive(cl.monotone(), [cl.Intersect(cl.inverse_lipschitz(2.0))]).as_class("M∩Linv"),
    ]
    bad = [str(c) for c in classes if not an.circle_number_invariance(c)]
    return not bad, f"{len(classes)} classes" + (f"; failed: {bad}" if bad else "")


def check_unit_circle_and_moduli():
    t = 2 * np.pi * np.arange(256) / 256
    pts = np.exp(1j * t)
    img = 1 / np.conj(pts)
    ok = np.abs(np.abs(img) - 1).max() <= 1e-12
    worst = 0.0
    for d in (rg.Disk(2.0, 0.5), rg.Disk(-3.0, 1.0), rg.Disk(0.5, 0.25), rg.Disk(1.0, 0.9)):
        worst = max(worst, abs(rg.sup_modulus(rg.invert(d)) - 1 / rg.inf_modulus(d)))
    return ok and worst <= 1e-9, f"max sup/inf mismatch {worst:.2e}"


def check_exact_vs_sampled():
    res = 1e-2
    z = _grid(200, -3, 3)
    pairs = [
        ("sum disks", rg.Disk(0.5, 0.5), rg.Disk(-0.25, 1.0), "sum"),
        ("sum half-plane", rg.HalfPlaneGE(0.5), rg.Disk(0.2, 0.7), "sum"),
        ("product centred disk", rg.Disk(0.0, 0.8), rg.Disk(1.0, 0.5), "product"),
    ]
    bad = []
    for name, a, b, kind in pairs:
        if kind == "sum":
            exact = rg.minkowski_sum(a, b).region
            approx = rg._sampled_sum(a, b, res, 10.0, rg.Certificate.EQUAL)
        else:
            exact = rg.minkowski_product(a, b).region
            approx = rg._sampled_product(a, b, res, rg.Certificate.EQUAL)
        ex, ap = exact.mask(z), approx.mask(z)
        # disagreement is allowed only within the resolution of the exact boundary
        if np.any(ap & ~exact.mask(z, 2 * res)) or np.any(ex & ~ap):
            bad.append(name)
    return not bad, "200x200 grid" + (f"; failed: {bad}" if bad else "")


def check_multiplication_operators():
    rng = np.random.default_rng(13)
    bad = []
    for c in catalog():
        region = c.srg
        zs = rng.uniform(-3, 3, 400) + 1j * rng.uniform(-3, 3, 400)
        hv = c.h.on_point(zs)
        inside = zs[hv < -1e-6][:64]
        outside = zs[hv > 1e-6][:64]
        for z in inside:
            op = sp.a_z(z)
            pairs = [(x, op(x), y, op(y)) for x, y in rng.normal(size=(8, 2, 2))]
            if cl.membership_test(c.h, pairs) or sp.cloud_in_region(sp.srg_points(op, 8, seed=1), region, 1e-9):
                bad.append(f"{c} in {z}")
                break
        for z in outside:
            op = sp.a_z(z)
            pairs = [(x, op(x), y, op(y)) for x, y in rng.normal(size=(8, 2, 2))]
            if not cl.membership_test(c.h, pairs):
                bad.append(f"{c} out {z}")
                break
    return not bad, "; ".join(bad) or "64 points inside and outside per class"


CHECKS: list = [
    ("region involution", check_involution),
    ("affine group law", check_affine_group),
    ("conjugate symmetry", check_conjugate_symmetry),
    ("h homogeneity", check_h_homogeneity),
    ("h membership equivalence", check_h_membership),
    ("chord and arc flags", check_chord_arc_flags),
    ("spherical triangle inequality", check_spherical_triangle),
    ("composition commutes", check_composition_commutes),
    ("DRS fixed-point correspondence", check_drs_fixed_point),
    ("circle number invariance", check_circle_number),
    ("unit circle and moduli under inversion", check_unit_circle_and_moduli),
    ("exact vs sampled Minkowski", check_exact_vs_sampled),
    ("complex multiplication operators", check_multiplication_operators),
]


def run_all(report: Callable[[CheckResult], None] | None = None) -> list:
    results = []
    for name, fn in CHECKS:
        t = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        res = CheckResult(name, bool(ok), detail, time.perf_counter() - t)
        results.append(res)
        if report:
            report(res)
    return results
