"""The seven acceptance criteria, each at its stated tolerance and time budget.

Every test records one PASS/FAIL line; the lines are printed in the
terminal summary (and immediately when run with ``-s``).
"""
import math
import time

import numpy as np
import pytest

from srgtools import analyzer as an
from srgtools import classes as cl
from srgtools import cli
from srgtools import fixedpoint as fp
from srgtools import region as rg
from srgtools import sampler as sp
from srgtools.analyzer import Method, MethodSpec

from conftest import ACCEPTANCE_LINES


def report(number, title, ok, seconds, budget, detail=""):
    passed = ok and seconds < budget
    line = (f"{'PASS' if passed else 'FAIL'} criterion {number}: {title} "
            f"({seconds:.2f}s, budget {budget:g}s) {detail}").rstrip()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert seconds < budget, line


def test_1_closed_form_rates():
    cases = [
        (["--method", "gd", "--alpha", "0.5", "--mu", "1", "--L", "2"], 0.5),
        (["--method", "pp", "--alpha", "1", "--mu", "1"], 0.5),
        (["--method", "fs_mono_lip", "--alpha", "0.4", "--mu", "1", "--L", "2"], math.sqrt(0.84)),
        (["--method", "fs_mono_coco", "--alpha", "0.5", "--mu", "0.5", "--beta", "1"], math.sqrt(0.625)),
        (["--method", "drs_refl_sm_coco", "--alpha", "1", "--mu", "0.5", "--beta", "1"], math.sqrt(0.2)),
        (["--method", "drs_refl_cvx", "--alpha", "1", "--mu", "0.5", "--L", "2"], 1 / 3),
        (["--method", "drs", "--alpha", "1", "--mu", "0.5", "--beta", "1", "--theta", "0.5"],
         0.5 + 0.5 * math.sqrt(0.2)),
        (["--method", "ms", "--alpha", "1", "--L", "0.25", "--gamma", "2", "--theta", "0.5"],
         math.sqrt(1 - 0.25 / 5.3125)),
    ]
    t = time.perf_counter()
    worst = 0.0
    ms_value = None
    for args, expected in cases:
        spec = cli._method_spec(cli._merge_config(cli._parser().parse_args(["rate"] + args)))
        value = an.closed_form_rate(spec)
        if spec.method is Method.MS_DRS:
            ms_value = value
        worst = max(worst, abs(value - expected))
    dt = time.perf_counter() - t
    ok = worst <= 1e-9 and abs(ms_value - 0.976187) < 5e-7
    report(1, "closed-form rate reproduction", ok, dt, 1.0, f"max error {worst:.1e}, MS_DRS {ms_value:.9f}")


FACTS = [Method.GD_grad, Method.FS_mono_lip, Method.FS_mono_coco, Method.PP_strong,
         Method.DRS_refl_sm_coco, Method.DRS_refl_cvx, Method.DRS_overall]


def test_2_tightness_sweeps():
    t = time.perf_counter()
    worst, failures = 0.0, []
    for k, method in enumerate(FACTS):
        for rep in an.sweep(method, 500, seed=100 + k, tol=2e-3):
            worst = max(worst, rep.abs_gap)
            if not rep.tight:
                failures.append(rep.row())
    dt = time.perf_counter() - t
    report(2, "tightness sweeps (7 x 500 draws)", not failures, dt, 60.0,
           f"max gap {worst:.2e}" + (f"; failures {failures[:3]}" if failures else ""))


def test_3_cardioid():
    t = time.perf_counter()
    rep = an.cardioid_check(resolution=1e-3)
    dt = time.perf_counter() - t
    report(3, "cardioid product", rep.passed and rep.hausdorff <= 2e-3, dt, 10.0,
           f"hausdorff {rep.hausdorff:.2e}, inside disk {rep.inside_disk}, -1/3 outside {rep.witness_outside}")


def test_4_cocoercive_sum():
    rng = np.random.default_rng(4)
    t = time.perf_counter()
    bad = 0
    for _ in range(100):
        b1, b2 = rng.uniform(0.05, 5.0, 2)
        out = rg.minkowski_sum(cl.srg_of(cl.cocoercive(b1)), cl.srg_of(cl.cocoercive(b2)))
        target = cl.srg_of(cl.cocoercive(1 / (1 / b1 + 1 / b2)))
        same = (isinstance(out.region, rg.Disk) and out.certificate is rg.Certificate.EQUAL
                and math.isclose(out.region.center, target.center, rel_tol=1e-12)
                and math.isclose(out.region.radius, target.radius, rel_tol=1e-12))
        bad += not same
    dt = time.perf_counter() - t
    report(4, "cocoercive sum identity", bad == 0, dt, 1.0, f"{100 - bad}/100 exact")


def test_5_eigenvalue_containment():
    rng = np.random.default_rng(5)
    mats = [np.array([[0.5, 2.0, 0.0], [-0.5, 0.5, 0.0], [0.0, 0.0, 2.0]])]
    for n in (3, 4, 5, 6):
        mats += [rng.normal(size=(n, n)) for _ in range(50)]
    t = time.perf_counter()
    worst, failed = 0.0, 0
    for k, m in enumerate(mats):
        rep = sp.eigen_containment(m, samples=100_000, tol=1e-2, seed=k)
        worst = max(worst, float(rep.distances.max()))
        failed += not rep.passed
    dt = time.perf_counter() - t
    report(5, "eigenvalue containment (201 matrices)", failed == 0, dt, 120.0,
           f"max distance {worst:.2e}, {failed} failures")


def test_6_worst_case_drs():
    rng = np.random.default_rng(6)
    t = time.perf_counter()
    worst, bad_verify = 0.0, 0
    for _ in range(50):
        beta = rng.uniform(0.1, 3.0)
        mu = rng.uniform(0.02, 0.98) / beta
        alpha = rng.uniform(0.05, 5.0)
        A, B = fp.worst_case_drs(alpha, mu, beta)
        spec = fp.IterationSpec("DRS", [A, B], rng.normal(size=2), alpha=alpha, theta=0.5,
                                max_iters=60, stop_tol=1e-12)
        traj = fp.run(spec)
        r = an.closed_form_rate(MethodSpec(Method.DRS_refl_sm_coco, alpha=alpha, mu=mu, beta=beta))
        predicted = 0.5 + 0.5 * r
        worst = max(worst, max(abs(f - predicted) for f in traj.per_step_factors))
        bad_verify += fp.rate_verify(traj, predicted - 1e-3)
    dt = time.perf_counter() - t
    report(6, "worst-case DRS", worst <= 1e-6 and bad_verify == 0, dt, 30.0,
           f"max factor error {worst:.1e}, shrunk-rate verifications passing {bad_verify}")


def test_7_invariant_suite(capsys):
    t = time.perf_counter()
    code = cli.main(["verify"])
    dt = time.perf_counter() - t
    out = capsys.readouterr().out
    failed = [l for l in out.splitlines() if l.startswith("FAIL")]
    report(7, "invariant suite (verify)", code == 0, dt, 120.0,
           f"exit {code}" + (f"; {failed}" if failed else ""))
