import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from srgtools import classes as cl
from srgtools import fixedpoint as fp
from srgtools import region as rg
from srgtools import sampler as sp
from srgtools.linalg import QRNonConvergence, eigvals


def quartic_grad(x):
    return x ** 3


# --- complex multiplication operators -----------------------------------------------------------

def test_a_z_cloud_is_z_and_conjugate():
    cloud = sp.srg_points(sp.a_z(1 + 1j), 100, seed=3)
    assert np.allclose(np.abs(cloud.points.imag), 1) and np.allclose(cloud.points.real, 1)
    assert set(np.round(cloud.points, 12)) == {1 + 1j, 1 - 1j}


def test_a_z_real_is_scaled_identity():
    m = sp.a_z(2).matrix
    assert np.array_equal(m, 2 * np.eye(2))
    assert np.allclose(sp.srg_points(sp.a_z(2), 20).points, 2)


def test_rotation_cloud():
    cloud = sp.srg_points(sp.a_z(1j), 50)
    assert np.allclose(np.sort_complex(np.unique(np.round(cloud.points, 12))), [-1j, 1j])


def test_a_inf_cloud_is_infinity_only():
    cloud = sp.srg_points(sp.a_inf(), 100)
    assert cloud.has_infinity and cloud.points.size == 0


def test_identity_cloud():
    cloud = sp.srg_points(sp.DenseMatrix(np.eye(3)), 200, seed=1)
    assert np.allclose(cloud.points, 1)


def test_determinism():
    op = sp.DenseMatrix(np.random.default_rng(0).normal(size=(4, 4)))
    a = sp.srg_points(op, 300, seed=7)
    b = sp.srg_points(op, 300, seed=7)
    assert np.array_equal(a.points, b.points)
    assert a.to_csv() == b.to_csv()


def test_csv_round_trip():
    cloud = sp.SrgCloud(np.array([1 + 2j, 1 - 2j]), True, "t", 1, 0)
    back = sp.SrgCloud.from_csv(cloud.to_csv())
    assert np.array_equal(back.points, cloud.points) and back.has_infinity


def test_zero_pairs_rejected():
    with pytest.raises(ValueError):
        sp.srg_points(sp.a_z(1), 0)


def test_repeated_x_gives_infinity():
    xs = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
    us = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    assert sp.srg_points(sp.GraphSamples(xs, us)).has_infinity


# --- concrete operators against the class catalog ------------------------------

def test_quartic_gradient_cone_on_sphere_pairs():
    op = sp.BlackBox(quartic_grad, 2)
    cloud = sp.srg_points(op, 10_000, strategy="sphere", seed=0)
    z = cloud.points
    assert np.all(z.real > 0)
    assert np.all(np.abs(z.imag) <= 0.354 * z.real + 1e-9)


def test_quartic_gradient_cone_fails_for_general_pairs():
    # away from y = 0 the cone bound does not hold: this pair has |Im z| / Re z near 0.95
    x, y = np.array([0.01, 1.0]), np.array([-0.01, 1.001])
    z = sp.srg_values((x - y)[None, :], (quartic_grad(x) - quartic_grad(y))[None, :])[0]
    assert abs(z.imag) > 0.354 * z.real


def test_projection_onto_line_is_half_averaged():
    d = np.array([1.0, 2.0, -1.0]) / np.sqrt(6)
    proj = sp.DenseMatrix(np.outer(d, d))
    cloud = sp.srg_points(proj, 2000, seed=2)
    assert sp.cloud_in_region(cloud, cl.averaged(0.5).srg, 1e-9) == []


def test_a_z_three_violates_unit_disk():
    bad = sp.cloud_in_region(sp.srg_points(sp.a_z(3), 10), rg.Disk(0, 1))
    assert bad and np.allclose([complex(b) for b in bad], 3)


def test_soft_threshold_prox_is_firmly_nonexpansive():
    st_op = fp.soft_threshold(0.7, dim=3)
    prox = sp.BlackBox(lambda x: st_op.resolvent(x, 1.0), 3)
    cloud = sp.srg_points(prox, 3000, seed=4, spread=2.0)
    assert sp.cloud_in_region(cloud, rg.Disk(0.5, 0.5), 1e-9) == []


def test_soft_threshold_subdifferential_is_monotone():
    cloud = sp.srg_points(fp.soft_threshold(1.0, dim=2), 1000, seed=5)
    assert sp.cloud_in_region(cloud, cl.monotone().srg, 1e-9) == []


def test_black_box_domain_sampler():
    # sqrt on the positive reals is monotone; the domain sampler keeps inputs admissible
    op = sp.BlackBox(np.sqrt, 1, domain=lambda rng, n: rng.uniform(0.1, 4.0, size=(n, 1)))
    cloud = sp.srg_points(op, 500, seed=1)
    assert np.all(np.isfinite(cloud.points)) and np.all(cloud.points.real > 0)


def test_missing_resolvent():
    with pytest.raises(sp.MissingOracle):
        sp.BlackBox(lambda x: x, 1).resolvent(np.zeros(1), 1.0)


@settings(max_examples=40, deadline=None)
@given(re=st.floats(-3, 3), im=st.floats(-3, 3), seed=st.integers(0, 1000))
def test_a_z_cloud_property(re, im, seed):
    z = complex(re, im)
    cloud = sp.srg_points(sp.a_z(z), 20, seed=seed)
    d = np.minimum(np.abs(cloud.points - z), np.abs(cloud.points - np.conj(z)))
    assert d.max() <= 1e-9 * max(1, abs(z))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=9, max_size=9))
def test_spherical_triangle_inequality(v):
    a, b, c = (np.array(v[i:i + 3]) for i in (0, 3, 6))
    if min(np.linalg.norm(a), np.linalg.norm(b), np.linalg.norm(c)) < 1e-6:
        return
    ab, bc, ac = sp.angle(a, b), sp.angle(b, c), sp.angle(a, c)
    assert ac <= ab + bc + 1e-9
    assert abs(ab - bc) <= ac + 1e-9


# --- eigenvalues ---------------------------------------------------------------

REFERENCE_MATRIX = np.array([[0.5, 2.0, 0.0], [-0.5, 0.5, 0.0], [0.0, 0.0, 2.0]])


def test_reference_matrix_eigenvalues():
    lam = np.sort_complex(eigvals(REFERENCE_MATRIX))
    assert np.allclose(lam, [0.5 - 1j, 0.5 + 1j, 2.0], atol=1e-12)


def test_reference_matrix_containment():
    rep = sp.eigen_containment(REFERENCE_MATRIX, samples=20_000)
    assert rep.passed


def test_identity_containment():
    rep = sp.eigen_containment(np.eye(3), samples=100)
    assert rep.passed and np.allclose(rep.distances, 0)


def test_two_by_two_rejected():
    with pytest.raises(sp.DomainError):
        sp.eigen_containment(np.eye(2))


def test_two_by_two_counterexample():
    # the rotation-dilation matrix of 1+i has eigenvalues 1 +- i and SRG {1 +- i}; a
    # non-normal 2x2 block shows why 2x2 is excluded: eigenvalue 0 is not a cloud point
    m = np.array([[0.0, 1.0], [0.0, 0.0]])
    cloud = sp.srg_values(np.array([[np.cos(t), np.sin(t)] for t in np.linspace(0.01, 3.1, 400)]),
                          np.array([m @ [np.cos(t), np.sin(t)] for t in np.linspace(0.01, 3.1, 400)]))
    assert np.abs(cloud).min() > 1e-3


@pytest.mark.parametrize("n", [1, 3, 5, 8, 12])
def test_eigvals_agree_with_numpy(n):
    rng = np.random.default_rng(n)
    a = rng.normal(size=(n, n))
    ours = eigvals(a)
    ref = np.linalg.eigvals(a)
    # match each eigenvalue to its nearest reference value
    assert np.abs(ours[:, None] - ref[None, :]).min(axis=1).max() <= 1e-9
    assert np.abs(ours[:, None] - ref[None, :]).min(axis=0).max() <= 1e-9


def test_eigvals_symmetric_and_defective():
    rng = np.random.default_rng(1)
    s = rng.normal(size=(6, 6))
    s = s + s.T
    assert np.allclose(np.sort(eigvals(s).real), np.linalg.eigvalsh(s), atol=1e-9)
    j = np.array([[2.0, 1.0, 0.0], [0.0, 2.0, 1.0], [0.0, 0.0, 2.0]])
    assert np.allclose(eigvals(j), 2.0, atol=1e-4)


def test_eigvals_non_convergence_reported():
    rng = np.random.default_rng(0)
    with pytest.raises(QRNonConvergence):
        eigvals(rng.normal(size=(6, 6)), max_sweeps=1)
