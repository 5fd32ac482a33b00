"""Operator classes, their inequality representations, and derived classes.

A class is described by the region its SRG occupies and, when the class
is defined by a homogeneous inequality ``h(a, b, c) <= 0`` in

    a = ||u - v||^2,   b = ||x - y||^2,   c = <u - v, x - y>,

by that function ``h``.  Classes with such an ``h`` are SRG-full, so
membership of an operator is decided by containment of its SRG.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from . import region as rg
from .region import Certificate, HypothesisViolation, Region

VIOLATION_TOL = 1e-9


# ---------------------------------------------------------------------------
# h-functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HFunc:
    """Nonnegative homogeneous function of ``(a, b, c)``; vectorised over numpy arrays."""

    evaluate: Callable
    description: str

    def __call__(self, a, b, c):
        return self.evaluate(np.asarray(a, float), np.asarray(b, float), np.asarray(c, float))

    def on_point(self, z):
        """``h(|z|^2, 1, Re z)``: nonpositive exactly when z is in the class SRG."""
        z = np.asarray(z, dtype=complex)
        return self(np.abs(z) ** 2, np.ones(z.shape), z.real)

    def intersect(self, other: "HFunc") -> "HFunc":
        f, g = self.evaluate, other.evaluate
        return HFunc(lambda a, b, c: np.maximum(f(a, b, c), g(a, b, c)),
                     f"max({self.description}, {other.description})")

    def union(self, other: "HFunc") -> "HFunc":
        f, g = self.evaluate, other.evaluate
        return HFunc(lambda a, b, c: np.minimum(f(a, b, c), g(a, b, c)),
                     f"min({self.description}, {other.description})")

    # Transforms of the operator act on the triple (a, b, c).  Each method
    # returns the h-function of the transformed class.
    def scaled(self, alpha: float) -> "HFunc":
        """Class ``alpha * A``: u' = alpha u."""
        f = self.evaluate
        return HFunc(lambda a, b, c: f(a / alpha ** 2, b, c / alpha),
                     f"scale({alpha:g})[{self.description}]")

    def prescaled(self, alpha: float) -> "HFunc":
        """Class ``A(alpha *)``: x' = x / alpha."""
        f = self.evaluate
        return HFunc(lambda a, b, c: f(a, alpha ** 2 * b, alpha * c),
                     f"prescale({alpha:g})[{self.description}]")

    def shifted(self, beta: float) -> "HFunc":
        """Class ``A + beta I``: u' = u + beta x."""
        f = self.evaluate
        return HFunc(lambda a, b, c: f(a - 2 * beta * c + beta ** 2 * b, b, c - beta * b),
                     f"shift({beta:g})[{self.description}]")

    def inverted(self) -> "HFunc":
        """Class ``A^{-1}``: roles of x and u swap."""
        f = self.evaluate
        return HFunc(lambda a, b, c: f(b, a, c), f"inverse[{self.description}]")


def _h(fn, text):
    return HFunc(fn, text)


def h_monotone():
    return _h(lambda a, b, c: -c, "-c")


def h_strongly_monotone(mu):
    return _h(lambda a, b, c: mu * b - c, f"{mu:g}*b - c")


def h_lipschitz(L):
    return _h(lambda a, b, c: a - L * L * b, f"a - {L:g}^2*b")


def h_lipschitz_unsquared(L):
    """The form ``a - L b``; kept only to show it fails the defining inequality."""
    return _h(lambda a, b, c: a - L * b, f"a - {L:g}*b")


def h_cocoercive(beta):
    return _h(lambda a, b, c: beta * a - c, f"{beta:g}*a - c")


def h_averaged(theta):
    return _h(lambda a, b, c: a + (1 - 2 * theta) * b - 2 * (1 - theta) * c,
              f"a + (1-2*{theta:g})*b - 2*(1-{theta:g})*c")


def h_inverse_lipschitz(gamma):
    return _h(lambda a, b, c: b - gamma * gamma * a, f"b - {gamma:g}^2*a")


def infinity_from_h(h: HFunc) -> bool:
    """A class contains a multi-valued operator iff ``h(a, 0, 0) <= 0`` for some a > 0."""
    # homogeneity reduces "some a > 0" to a = 1
    return bool(h(1.0, 0.0, 0.0) <= VIOLATION_TOL)


# ---------------------------------------------------------------------------
# classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorClass:
    """A named operator class with its SRG builder and property flags."""

    name: str
    params: Mapping[str, float]
    builder: Callable[[], Region] = field(repr=False, compare=False)
    h: HFunc | None = field(default=None, repr=False, compare=False)
    srg_full: bool = False
    chord: bool = False
    left_arc: bool = False
    right_arc: bool = False

    def __post_init__(self):
        if self.srg_full and self.h is None:
            raise ValueError("an SRG-full class needs an h-function")

    @property
    def srg(self) -> Region:
        return self.builder()

    @property
    def has_infinity(self) -> bool:
        return self.srg.has_infinity

    def __str__(self):
        if not self.params:
            return self.name
        return self.name + "(" + ", ".join(f"{k}={v:g}" for k, v in self.params.items()) + ")"


def _positive(name, value):
    value = float(value)
    if not value > 0 or not math.isfinite(value):
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def monotone() -> OperatorClass:
    return OperatorClass("M", {}, lambda: rg.HalfPlaneGE(0.0), h_monotone(), True,
                         chord=True, right_arc=True)


def strongly_monotone(mu: float) -> OperatorClass:
    mu = _positive("mu", mu)
    return OperatorClass("M", {"mu": mu}, lambda: rg.HalfPlaneGE(mu), h_strongly_monotone(mu), True,
                         chord=True, right_arc=True)


def lipschitz(L: float) -> OperatorClass:
    L = _positive("L", L)
    return OperatorClass("L", {"L": L}, lambda: rg.Disk(0.0, L), h_lipschitz(L), True,
                         chord=True, left_arc=True, right_arc=True)


def cocoercive(beta: float) -> OperatorClass:
    beta = _positive("beta", beta)
    r = 1 / (2 * beta)
    return OperatorClass("C", {"beta": beta}, lambda: rg.Disk(r, r), h_cocoercive(beta), True,
                         chord=True, right_arc=True)


def averaged(theta: float) -> OperatorClass:
    theta = float(theta)
    if not 0 < theta <= 1:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    return OperatorClass("N", {"theta": theta}, lambda: rg.Disk(1 - theta, theta), h_averaged(theta), True,
                         chord=True, right_arc=True, left_arc=theta == 1)


def inverse_lipschitz(gamma: float) -> OperatorClass:
    gamma = _positive("gamma", gamma)
    return OperatorClass("Linv", {"gamma": gamma}, lambda: rg.DiskExterior(0.0, 1 / gamma),
                         h_inverse_lipschitz(gamma), True,
                         chord=False, left_arc=True, right_arc=True)


def subdifferential(mu: float = 0.0, L: float = math.inf) -> OperatorClass:
    """Subdifferentials of closed convex functions, mu-strongly convex and L-smooth.

    These classes are not SRG-full: their SRG is the region below, yet an
    operator whose SRG lies there need not be a subdifferential.
    """
    mu = float(mu)
    L = float(L)
    if mu < 0 or (math.isfinite(L) and not mu < L) or L <= 0:
        raise ValueError("subdifferential class needs 0 <= mu < L")
    params = {}
    if mu > 0:
        params["mu"] = mu
    if math.isfinite(L):
        params["L"] = L
        builder = lambda: rg.Disk((mu + L) / 2, (L - mu) / 2)
    else:
        builder = lambda: rg.HalfPlaneGE(mu)
    return OperatorClass("dF", params, builder, None, False)


def single_operator(xs, us, name: str = "single") -> OperatorClass:
    """The class consisting of one operator given by explicit graph samples."""
    from .sampler import GraphSamples, srg_points
    op = GraphSamples(np.asarray(xs, float), np.asarray(us, float))
    cloud = srg_points(op, pairs=10 ** 9)
    points = rg.Points(list(cloud.points), cloud.has_infinity)
    return OperatorClass(name, {}, lambda: points, None, False)


def srg_of(cls: OperatorClass) -> Region:
    """Region occupied by the SRG of the class."""
    return cls.srg


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------

def pair_stats(x, u, y, v):
    """``(a, b, c)`` for one evaluation pair."""
    x, u, y, v = (np.asarray(t, float) for t in (x, u, y, v))
    if not (x.shape == u.shape == y.shape == v.shape):
        raise ValueError("all vectors in a pair must share a dimension")
    du, dx = u - v, x - y
    return float(du @ du), float(dx @ dx), float(du @ dx)


def membership_test(h: HFunc, pairs: Sequence) -> list:
    """Pairs ``(x, u, y, v)`` whose h-value exceeds the violation tolerance."""
    bad = []
    dim = None
    for p in pairs:
        x = np.asarray(p[0], float)
        if dim is None:
            dim = x.shape
        elif x.shape != dim:
            raise ValueError("pairs have mismatched dimensions")
        a, b, c = pair_stats(*p)
        if float(h(a, b, c)) > VIOLATION_TOL:
            bad.append(p)
    return bad


def graph_pairs(xs, us):
    """All unordered pairs of graph samples as ``(x, u, y, v)`` tuples."""
    xs = np.asarray(xs, float)
    us = np.asarray(us, float)
    return [(xs[i], us[i], xs[j], us[j]) for i in range(len(xs)) for j in range(i + 1, len(xs))]


def validate_h(cls_h: HFunc, definition: Callable, dim: int = 3, trials: int = 2000, seed: int = 0) -> bool:
    """Check ``h(a, b, c) <= 0`` against a defining predicate on random pairs.

    ``definition(du, dx)`` returns True when the pair difference satisfies
    the class inequality.  Random triples are drawn around the boundary so
    both sides are exercised.
    """
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        dx = rng.normal(size=dim)
        du = rng.normal(size=dim) * rng.uniform(0.1, 4.0)
        a, b, c = du @ du, dx @ dx, du @ dx
        if (float(cls_h(a, b, c)) <= 0) != bool(definition(du, dx)):
            return False
    return True


# ---------------------------------------------------------------------------
# derived classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scale:
    alpha: float


@dataclass(frozen=True)
class PreScale:
    alpha: float


@dataclass(frozen=True)
class Shift:
    """Add ``beta`` times the identity."""

    beta: float = 1.0


def AddIdentity() -> Shift:
    return Shift(1.0)


@dataclass(frozen=True)
class Inverse:
    pass


@dataclass(frozen=True)
class Intersect:
    other: OperatorClass


@dataclass(frozen=True)
class Sum:
    other: OperatorClass


@dataclass(frozen=True)
class Compose:
    other: OperatorClass


def resolvent(alpha: float) -> list:
    """Steps turning A into ``(I + alpha A)^{-1}``."""
    return [Scale(alpha), AddIdentity(), Inverse()]


def reflected_resolvent(alpha: float) -> list:
    """Steps turning A into ``2 (I + alpha A)^{-1} - I``."""
    return resolvent(alpha) + [Scale(2.0), Shift(-1.0)]


@dataclass(frozen=True)
class DerivedClass:
    base: OperatorClass
    pipeline: tuple
    region: Region
    certificate: Certificate
    h: HFunc | None
    srg_full: bool

    def as_class(self, name: str | None = None) -> OperatorClass:
        reg = self.region
        flags = class_flags_from_region(reg)
        return OperatorClass(name or f"derived({self.base})", {}, lambda: reg, self.h,
                             self.srg_full and self.certificate is Certificate.EQUAL and self.h is not None,
                             *flags)


def class_flags_from_region(region: Region, grid_size: int = 32) -> tuple:
    return (verify_chord(region, grid_size), verify_arc(region, "left", grid_size),
            verify_arc(region, "right", grid_size))


def _has_chord(cls_or_region) -> bool:
    if isinstance(cls_or_region, OperatorClass):
        return cls_or_region.chord
    return verify_chord(cls_or_region, 32)


def _has_arc(cls_or_region) -> bool:
    if isinstance(cls_or_region, OperatorClass):
        return cls_or_region.left_arc or cls_or_region.right_arc
    return verify_arc(cls_or_region, "left", 32) or verify_arc(cls_or_region, "right", 32)


def derive(base: OperatorClass, steps: Sequence, resolution: float = rg.DEFAULT_RESOLUTION) -> DerivedClass:
    """Apply a pipeline of class transformations, tracking the exactness certificate.

    Scaling, pre-scaling, shifting by a multiple of the identity and
    inversion preserve SRG equality for any class.  Intersections are exact
    when both sides are SRG-full; sums need the chord property on one side
    and no infinity; compositions need an arc property on one side, and
    both sides nonempty and free of infinity.
    """
    region = base.srg
    h = base.h
    full = base.srg_full
    cert = Certificate.EQUAL
    current = base  # an OperatorClass while untransformed, else a Region
    for step in steps:
        if isinstance(step, Scale):
            if step.alpha == 0:
                raise ValueError("Scale needs a nonzero factor")
            region = rg.affine(region, step.alpha, 0.0)
            h = h.scaled(step.alpha) if h else None
        elif isinstance(step, PreScale):
            if step.alpha == 0:
                raise ValueError("PreScale needs a nonzero factor")
            # G(A(alpha .)) = alpha G(A) for real alpha
            region = rg.affine(region, step.alpha, 0.0)
            h = h.prescaled(step.alpha) if h else None
        elif isinstance(step, Shift):
            region = rg.affine(region, 1.0, step.beta)
            h = h.shifted(step.beta) if h else None
        elif isinstance(step, Inverse):
            region = rg.invert(region)
            h = h.inverted() if h else None
        elif isinstance(step, Intersect):
            other = step.other
            region = rg.intersect(region, other.srg)
            if not (full and other.srg_full):
                cert = Certificate.SUPERSET
            h = h.intersect(other.h) if (h and other.h) else None
            full = full and other.srg_full
        elif isinstance(step, Sum):
            other = step.other
            if region.has_infinity or other.srg.has_infinity:
                raise HypothesisViolation("class sum needs SRGs without infinity")
            chord = _has_chord(current) or other.chord
            out = rg.minkowski_sum(region, other.srg, chord_ok=chord and full and other.srg_full,
                                   resolution=resolution)
            region, cert = out.region, cert & out.certificate
            h, full = None, False
        elif isinstance(step, Compose):
            other = step.other
            if region.has_infinity or other.srg.has_infinity:
                raise HypothesisViolation("class composition needs SRGs without infinity")
            arc = _has_arc(current) or other.left_arc or other.right_arc
            out = rg.minkowski_product(region, other.srg, arc_ok=arc and full and other.srg_full,
                                       resolution=resolution)
            region, cert = out.region, cert & out.certificate
            h, full = None, False
        else:
            raise TypeError(f"unknown pipeline step {step!r}")
        current = region
    return DerivedClass(base, tuple(steps), region, cert, h, full)


# ---------------------------------------------------------------------------
# chord and arc properties
# ---------------------------------------------------------------------------

def _test_points(region: Region, grid_size: int) -> np.ndarray:
    """Finite grid points of the region plus its boundary net."""
    lo = 0.0
    hi = rg.sup_modulus(region) if not region.has_infinity else 3.0
    if isinstance(region, rg.SampledRegion):
        hi = region.rmax if math.isfinite(region.rmax) else 3.0
    hi = hi if math.isfinite(hi) and hi > 0 else 3.0
    hi *= 1.05
    xs = np.linspace(-hi, hi, grid_size)
    ys = np.linspace(0, hi, max(grid_size // 2, 2))
    grid = (xs[:, None] + 1j * ys[None, :]).ravel()
    net = region.boundary_net(2 * hi / grid_size, hi)
    pts = np.concatenate([grid, net[net.imag >= 0]])
    return pts[region.mask(pts, 1e-9)]


def verify_chord(region: Region, grid_size: int = 32) -> bool:
    """Check that the vertical segment from z to conj(z) stays in the region."""
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    pts = _test_points(region, grid_size)
    if pts.size == 0:
        return True
    t = np.linspace(-1.0, 1.0, grid_size)
    seg = pts.real[:, None] + 1j * pts.imag[:, None] * t[None, :]
    return bool(region.mask(seg, 1e-9).all())


def verify_arc(region: Region, side: str = "right", grid_size: int = 32) -> bool:
    """Check that the constant-modulus arc from z to conj(z) stays in the region.

    The right arc passes through the positive real axis, the left arc
    through the negative real axis.
    """
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    pts = _test_points(region, grid_size)
    if pts.size == 0:
        return True
    r = np.abs(pts)
    phi = np.angle(pts)  # in [0, pi] since imag >= 0
    t = np.linspace(0.0, 1.0, grid_size)
    if side == "right":
        ang = phi[:, None] * (1 - 2 * t[None, :])
    else:
        # through pi: angles from phi up to 2 pi - phi
        ang = phi[:, None] + (2 * math.pi - 2 * phi[:, None]) * t[None, :]
    arc = r[:, None] * np.exp(1j * ang)
    return bool(region.mask(arc, 1e-9).all())


# ---------------------------------------------------------------------------
# mini-language
# ---------------------------------------------------------------------------

class ClassSpecError(ValueError):
    def __init__(self, column: int, msg: str):
        super().__init__(f"column {column}: {msg}")
        self.column = column


_BASE_NAMES = {"M", "L", "C", "N", "DF", "LINV"}


def parse_base_class(text: str, offset: int = 0) -> OperatorClass:
    """Parse ``M mu=1``, ``L L=2``, ``C beta=1``, ``N theta=0.5``, ``dF mu=1 L=2`` or ``Linv gamma=2``."""
    toks = text.split()
    if not toks:
        raise ClassSpecError(offset + 1, "empty class specification")
    name = toks[0]
    kw = {}
    col = offset + text.find(name) + 1
    for tok in toks[1:]:
        col = offset + text.find(tok) + 1
        if "=" not in tok:
            raise ClassSpecError(col, f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        try:
            kw[k.lower()] = float(v)
        except ValueError:
            raise ClassSpecError(col, f"not a number: {v!r}") from None
    key = name.upper()
    try:
        if key == "M":
            _only(kw, {"mu"}, col)
            return strongly_monotone(kw["mu"]) if kw.get("mu", 0) > 0 else monotone()
        if key == "L":
            _only(kw, {"l"}, col)
            return lipschitz(kw["l"])
        if key == "C":
            _only(kw, {"beta"}, col)
            return cocoercive(kw["beta"])
        if key == "N":
            _only(kw, {"theta"}, col)
            return averaged(kw["theta"])
        if key == "DF":
            _only(kw, {"mu", "l"}, col)
            return subdifferential(kw.get("mu", 0.0), kw.get("l", math.inf))
        if key == "LINV":
            _only(kw, {"gamma"}, col)
            return inverse_lipschitz(kw["gamma"])
    except KeyError as exc:
        raise ClassSpecError(offset + 1, f"missing parameter {exc.args[0]}") from None
    except ClassSpecError:
        raise
    except ValueError as exc:
        raise ClassSpecError(offset + 1, str(exc)) from None
    raise ClassSpecError(offset + 1, f"unknown class {name!r}; expected one of M, L, C, N, dF, Linv")


def _only(kw, allowed, col):
    extra = set(kw) - allowed
    if extra:
        raise ClassSpecError(col, f"unexpected parameter(s) {sorted(extra)}")


def parse_class_spec(text: str):
    """Parse a class with an optional ``|step arg`` pipeline.

    Returns ``(base_class, steps)`` ready for :func:`derive`.
    """
    segments = text.split("|")
    offsets = []
    pos = 0
    for seg in segments:
        offsets.append(pos)
        pos += len(seg) + 1
    base = parse_base_class(segments[0], 0)
    steps = []
    for seg, off in zip(segments[1:], offsets[1:]):
        toks = seg.split()
        if not toks:
            raise ClassSpecError(off + 1, "empty pipeline step")
        verb, rest = toks[0].lower(), seg.split(None, 1)[1] if len(toks) > 1 else ""
        col = off + seg.find(toks[0]) + 1
        if verb in ("scale", "prescale", "resolvent", "reflect", "shift"):
            if len(toks) != 2:
                raise ClassSpecError(col, f"{verb} takes one number")
            try:
                val = float(toks[1])
            except ValueError:
                raise ClassSpecError(col, f"not a number: {toks[1]!r}") from None
            if verb != "shift" and val == 0:
                raise ClassSpecError(col, f"{verb} needs a nonzero factor")
            steps += {"scale": lambda a: [Scale(a)], "prescale": lambda a: [PreScale(a)],
                      "resolvent": resolvent, "reflect": reflected_resolvent,
                      "shift": lambda a: [Shift(a)]}[verb](val)
        elif verb in ("inverse", "addid"):
            steps.append(Inverse() if verb == "inverse" else AddIdentity())
        elif verb in ("sum", "compose", "intersect"):
            other = parse_base_class(rest, off + seg.find(rest))
            steps.append({"sum": Sum, "compose": Compose, "intersect": Intersect}[verb](other))
        else:
            raise ClassSpecError(col, f"unknown pipeline step {verb!r}")
    return base, steps


def derive_spec(text: str, resolution: float = rg.DEFAULT_RESOLUTION) -> DerivedClass:
    base, steps = parse_class_spec(text)
    return derive(base, steps, resolution)
