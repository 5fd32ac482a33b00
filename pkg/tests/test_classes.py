import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from srgtools import classes as cl
from srgtools import region as rg
from srgtools.region import Certificate, Disk, DiskExterior, HalfPlaneGE, HypothesisViolation


def grid(n=61, lo=-3.0, hi=3.0):
    xs = np.linspace(lo, hi, n)
    return (xs[:, None] + 1j * xs[None, :]).ravel()


CATALOG = [cl.monotone(), cl.strongly_monotone(0.7), cl.lipschitz(1.5), cl.cocoercive(0.8),
           cl.averaged(0.3), cl.averaged(1.0), cl.inverse_lipschitz(2.0)]


# --- catalog regions ---------------------------------------------------------

def test_catalog_regions():
    assert cl.monotone().srg == HalfPlaneGE(0.0) and cl.monotone().srg.has_infinity
    assert cl.strongly_monotone(2).srg == HalfPlaneGE(2.0)
    assert cl.lipschitz(2).srg == Disk(0.0, 2.0)
    assert cl.cocoercive(2).srg == Disk(0.25, 0.25)
    assert cl.averaged(0.5).srg == Disk(0.5, 0.5)
    assert cl.inverse_lipschitz(2).srg == DiskExterior(0.0, 0.5)
    assert cl.subdifferential(1, 3).srg == Disk(2.0, 1.0)
    assert cl.subdifferential(1).srg == HalfPlaneGE(1.0)


def test_subdifferential_is_not_srg_full():
    assert not cl.subdifferential(0, 1).srg_full
    assert all(c.srg_full for c in CATALOG)


@pytest.mark.parametrize("bad", [lambda: cl.lipschitz(0), lambda: cl.cocoercive(-1),
                                 lambda: cl.averaged(0), lambda: cl.averaged(1.5),
                                 lambda: cl.subdifferential(2, 1)])
def test_invalid_parameters(bad):
    with pytest.raises(ValueError):
        bad()


# --- h-functions ---------------------------------------------------------------

def _defs():
    return [
        (cl.h_monotone(), lambda du, dx: du @ dx >= 0),
        (cl.h_strongly_monotone(0.5), lambda du, dx: du @ dx >= 0.5 * dx @ dx),
        (cl.h_lipschitz(1.5), lambda du, dx: np.linalg.norm(du) <= 1.5 * np.linalg.norm(dx)),
        (cl.h_cocoercive(0.8), lambda du, dx: du @ dx >= 0.8 * du @ du),
        (cl.h_inverse_lipschitz(2.0), lambda du, dx: np.linalg.norm(dx) <= 2.0 * np.linalg.norm(du)),
    ]


@pytest.mark.parametrize("h,definition", _defs(), ids=lambda v: getattr(v, "description", ""))
def test_h_matches_definition(h, definition):
    assert cl.validate_h(h, definition, dim=3, trials=3000)


def test_unsquared_lipschitz_h_fails_validation():
    def lip(du, dx):
        return np.linalg.norm(du) <= 2.0 * np.linalg.norm(dx)
    assert cl.validate_h(cl.h_lipschitz(2.0), lip)
    assert not cl.validate_h(cl.h_lipschitz_unsquared(2.0), lip)


@settings(max_examples=80, deadline=None)
@given(a=st.floats(0, 10), b=st.floats(0, 10), s=st.floats(-1, 1), t=st.floats(0, 50))
def test_h_homogeneity(a, b, s, t):
    c = s * math.sqrt(a * b)
    for cls in CATALOG:
        h = cls.h
        assert float(h(t * a, t * b, t * c)) == pytest.approx(t * float(h(a, b, c)), rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("cls", CATALOG, ids=str)
def test_h_on_point_matches_region(cls):
    z = grid()
    hv = cls.h.on_point(z)
    decided = np.abs(hv) > 1e-9
    assert np.array_equal((hv <= 0)[decided], cls.srg.mask(z)[decided])
    assert cl.infinity_from_h(cls.h) == cls.srg.has_infinity


def test_membership_test_flags_violations():
    h = cl.h_lipschitz(1.0)
    ok = (np.array([0.0]), np.array([0.0]), np.array([1.0]), np.array([0.5]))
    bad = (np.array([0.0]), np.array([0.0]), np.array([1.0]), np.array([2.0]))
    assert cl.membership_test(h, [ok, bad]) == [bad]


# --- derived classes -----------------------------------------------------------

def test_resolvent_of_strongly_monotone():
    d = cl.derive(cl.strongly_monotone(1.0), cl.resolvent(1.0))
    assert d.region == Disk(0.25, 0.25)
    assert d.certificate is Certificate.EQUAL and d.srg_full


def test_reflected_resolvent_of_monotone_is_unit_disk():
    d = cl.derive(cl.monotone(), cl.reflected_resolvent(2.0))
    assert d.region == Disk(0.0, 1.0)


def test_derived_h_agrees_with_region():
    d = cl.derive(cl.strongly_monotone(0.5), [cl.Intersect(cl.cocoercive(1.0))] + cl.reflected_resolvent(1.0))
    z = grid(81, -1.5, 1.5)
    hv = d.h.on_point(z)
    decided = np.abs(hv) > 1e-9
    assert np.array_equal((hv <= 0)[decided], d.region.mask(z)[decided])


def test_cocoercive_sum_rule():
    d = cl.derive(cl.cocoercive(1.0), [cl.Sum(cl.cocoercive(2.0))])
    assert d.region == cl.cocoercive(2 / 3).srg and d.certificate is Certificate.EQUAL


def test_sum_with_infinity_rejected():
    with pytest.raises(HypothesisViolation):
        cl.derive(cl.monotone(), [cl.Sum(cl.lipschitz(1.0))])


def test_intersection_with_non_full_class_is_superset():
    d = cl.derive(cl.monotone(), [cl.Intersect(cl.subdifferential(0, 1))])
    assert d.certificate is Certificate.SUPERSET


# --- chord and arc -------------------------------------------------------------

@pytest.mark.parametrize("cls", CATALOG, ids=str)
def test_declared_flags_match_grid(cls):
    assert cl.class_flags_from_region(cls.srg) == (cls.chord, cls.left_arc, cls.right_arc)


def test_rotation_pair_has_no_chord():
    assert not cl.verify_chord(rg.Points([1j, -1j]), 16)


# --- mini-language -------------------------------------------------------------

def test_parse_class_spec():
    base, steps = cl.parse_class_spec("M mu=1 |resolvent 1")
    assert base.name == "M" and base.params == {"mu": 1.0}
    assert cl.derive(base, steps).region == Disk(0.25, 0.25)


@pytest.mark.parametrize("text,region", [
    ("N theta=0.5", Disk(0.5, 0.5)),
    ("L L=1 |scale -1", Disk(0.0, 1.0)),
    ("C beta=1 |sum C beta=1", Disk(1.0, 1.0)),
    ("Linv gamma=2 |inverse", Disk(0.0, 2.0)),
    ("dF mu=1 L=3", Disk(2.0, 1.0)),
])
def test_derive_spec_regions(text, region):
    assert cl.derive_spec(text).region == region


@pytest.mark.parametrize("text,column", [("Q x=1", 1), ("M mu=abc", 3), ("M mu=1 |twist 2", 9),
                                         ("L L=1 |scale", 8)])
def test_spec_errors_report_column(text, column):
    with pytest.raises(cl.ClassSpecError) as exc:
        cl.parse_class_spec(text)
    assert exc.value.column == column


def test_single_operator_class():
    xs = np.array([[0.0, 0.0], [1.0, 0.0]])
    us = np.array([[0.0, 0.0], [0.0, 1.0]])
    c = cl.single_operator(xs, us)
    assert rg.contains(c.srg, 1j) and rg.contains(c.srg, -1j)
