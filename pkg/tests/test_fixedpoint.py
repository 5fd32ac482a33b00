import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from srgtools import analyzer as an
from srgtools import classes as cl
from srgtools import fixedpoint as fp
from srgtools import sampler as sp


def test_gd_on_diagonal_quadratic():
    # gradient of x'diag(0.5, 1.5)x/2 with step 1: components shrink by 0.5 and 0.5
    op = fp.quadratic(np.diag([0.5, 1.5]))
    traj = fp.run(fp.IterationSpec("GD", [op], np.array([1.0, 1.0]), alpha=1.0, max_iters=40))
    assert np.allclose(traj.per_step_factors, 0.5)
    assert fp.rate_verify(traj, 0.5)
    assert not fp.rate_verify(traj, 0.49)


def test_proximal_point_factor():
    op = fp.quadratic(np.eye(3))
    traj = fp.run(fp.IterationSpec("PP", [op], np.ones(3), alpha=1.0, max_iters=30))
    assert np.allclose(traj.per_step_factors, 0.5)


def test_km_distances_decrease():
    rot = sp.a_z(np.exp(0.7j))  # nonexpansive, fixed point 0
    traj = fp.run(fp.IterationSpec("KM", [rot], np.array([1.0, 0.0]), theta=0.5, max_iters=200))
    assert all(b <= a + 1e-15 for a, b in zip(traj.distances, traj.distances[1:]))


def test_forward_step_matches_closed_form():
    m = np.array([[1.0, -1.0], [1.0, 1.0]])  # a_z(1+1j): mu = 1, L = sqrt 2
    traj = fp.run(fp.IterationSpec("FS", [sp.DenseMatrix(m)], np.array([1.0, 0.0]), alpha=0.4))
    rate = an.closed_form_rate(an.MethodSpec("FS_mono_lip", alpha=0.4, mu=1.0, L=2 ** 0.5))
    assert np.allclose(traj.per_step_factors, rate)


def test_drs_with_zero_operator_is_proximal_point():
    A = fp.quadratic(np.diag([1.0, 2.0]))
    x0 = np.array([1.0, -1.0])
    drs = fp.run(fp.IterationSpec("DRS", [A, fp.zero(2)], x0, alpha=0.5, theta=1.0, max_iters=10))
    # with B = 0 and theta = 1 the DRS map is the reflected resolvent of A
    pp = fp.run(fp.IterationSpec("PP", [A], x0, alpha=0.5, max_iters=10))
    refl = [2 * p - x for p, x in zip(pp.iterates[1:], drs.iterates[:-1])]
    assert np.allclose(drs.iterates[1], refl[0], atol=1e-14)


def test_drs_zero_of_sum():
    rng = np.random.default_rng(2)
    q = rng.normal(size=(3, 3))
    Q = q @ q.T + np.eye(3)
    b = rng.normal(size=3)
    M = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.5]])
    spec = fp.IterationSpec("DRS", [fp.quadratic(Q, b), fp.linear_monotone(M)], np.zeros(3),
                            alpha=1.0, max_iters=2000)
    traj = fp.run(spec)
    x = fp.drs_zero(spec, traj.fixed_point)
    assert np.allclose(Q @ x + b + M @ x, 0, atol=1e-10)


def test_soft_threshold_prox():
    st_op = fp.soft_threshold(1.0, 2)
    assert np.array_equal(st_op.resolvent(np.array([2.0, 0.5]), 1.0), [1.0, 0.0])


def test_quadratic_requires_psd():
    with pytest.raises(ValueError):
        fp.quadratic(np.diag([1.0, -1.0]))


def test_linear_monotone_requires_monotone():
    with pytest.raises(ValueError):
        fp.linear_monotone(-np.eye(2))


def test_drs_requires_resolvents():
    with pytest.raises(sp.MissingOracle):
        fp.IterationSpec("DRS", [sp.BlackBox(lambda x: x, 2), fp.zero(2)], np.zeros(2))


def test_rate_verify_argument_checks():
    traj = fp.Trajectory([np.zeros(1)], np.zeros(1), [1.0], [], 1e-12)
    with pytest.raises(ValueError):
        fp.rate_verify(traj, 1.5)
    with pytest.raises(ValueError):
        fp.rate_verify(traj, 0.5, slack=-1)


def test_trajectory_csv():
    op = fp.quadratic(np.eye(1))
    text = fp.run(fp.IterationSpec("PP", [op], np.ones(1), max_iters=3)).to_csv()
    lines = text.splitlines()
    assert lines[0] == "k,distance,per_step_factor"
    assert lines[1] == "0,1.0,0.5" and lines[-1].endswith(",")


def test_parse_config():
    cfg = fp.parse_config("alpha = 0.5\n# comment\nmethod=pp  # trailing\n\n")
    assert cfg == {"alpha": "0.5", "method": "pp"}
    with pytest.raises(ValueError):
        fp.parse_config("novalue")


# --- worst-case DRS --------------------------------------------------------------

def test_worst_case_point_modulus_is_the_rate():
    z = fp.worst_case_point(1.0, 0.5, 1.0)
    assert abs(z) == pytest.approx(5 ** -0.5)


def test_worst_case_operators_belong_to_their_classes():
    A, B = fp.worst_case_drs(0.8, 0.4, 1.5)
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(30, 2, 2))
    pa = [(x, A(x), y, A(y)) for x, y in pts]
    pb = [(x, B(x), y, B(y)) for x, y in pts]
    h_a = cl.h_strongly_monotone(0.4).intersect(cl.h_cocoercive(1.5))
    assert not cl.membership_test(h_a, pa)
    assert not cl.membership_test(cl.h_monotone(), pb)


@settings(max_examples=25, deadline=None)
@given(alpha=st.floats(0.1, 5), s=st.floats(0.05, 0.95), beta=st.floats(0.2, 3))
def test_worst_case_factor_property(alpha, s, beta):
    mu = s / beta
    A, B = fp.worst_case_drs(alpha, mu, beta)
    spec = fp.IterationSpec("DRS", [A, B], np.array([1.0, 0.3]), alpha=alpha, theta=0.5,
                            max_iters=15, stop_tol=1e-300)
    traj = fp.run(spec)
    r = an.closed_form_rate(an.MethodSpec("DRS_refl_sm_coco", alpha=alpha, mu=mu, beta=beta))
    assert np.allclose(traj.per_step_factors, 0.5 + 0.5 * r, atol=1e-9)


def test_worst_case_domain():
    with pytest.raises(ValueError):
        fp.worst_case_drs(1.0, 2.0, 1.0)
