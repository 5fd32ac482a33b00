"""Regions of the extended complex plane.

Two tiers live here.  Symbolic regions are trees of primitives (disks,
disk exteriors, half-planes, cardioids, finite point sets) combined with
``Union`` and ``Intersection`` and closed under real affine maps and the
inversion ``z -> 1/conj(z)``.  Sampled regions carry a membership oracle
at a fixed resolution and are what Minkowski sums and products fall back
to when no exact rule applies.

Every region is symmetric about the real axis and closed.  The point at
infinity is tracked by an explicit flag, never by a large float.
"""
from __future__ import annotations

import enum
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np

ABS_TOL = 1e-12
DEFAULT_RESOLUTION = 1e-3
DEFAULT_WINDOW = 10.0


class HypothesisViolation(ValueError):
    """An operation was asked to act outside the hypotheses that make it valid."""


class Certificate(enum.Enum):
    EQUAL = "EQUAL"
    SUPERSET = "SUPERSET"

    def __and__(self, other: "Certificate") -> "Certificate":
        if self is Certificate.EQUAL and other is Certificate.EQUAL:
            return Certificate.EQUAL
        return Certificate.SUPERSET


# ---------------------------------------------------------------------------
# extended complex numbers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class XComplex:
    """A point of the extended complex plane.

    ``kind`` is ``"finite"`` or ``"infinity"``; for the latter ``re`` and
    ``im`` are ignored and normalised to zero.
    """

    kind: str = "finite"
    re: float = 0.0
    im: float = 0.0

    def __post_init__(self):
        if self.kind not in ("finite", "infinity"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "infinity":
            object.__setattr__(self, "re", 0.0)
            object.__setattr__(self, "im", 0.0)
            return
        re, im = float(self.re), float(self.im)
        if math.isnan(re) or math.isnan(im):
            raise ValueError("XComplex cannot hold NaN")
        if math.isinf(re) or math.isinf(im):
            raise ValueError("use XComplex.infinity() for the point at infinity")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @classmethod
    def finite(cls, z) -> "XComplex":
        z = complex(z)
        return cls("finite", z.real, z.imag)

    @classmethod
    def infinity(cls) -> "XComplex":
        return cls("infinity")

    @property
    def is_infinite(self) -> bool:
        return self.kind == "infinity"

    def conj(self) -> "XComplex":
        if self.is_infinite:
            return self
        return XComplex("finite", self.re, -self.im)

    def __complex__(self) -> complex:
        if self.is_infinite:
            raise ValueError("the point at infinity has no complex value")
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return math.inf if self.is_infinite else math.hypot(self.re, self.im)

    def __str__(self) -> str:
        return "inf" if self.is_infinite else f"{complex(self.re, self.im)}"


INF = XComplex.infinity()


def as_xcomplex(z) -> XComplex:
    """Coerce numbers, ``None`` or the strings ``"inf"``/``"∞"`` to XComplex."""
    if isinstance(z, XComplex):
        return z
    if z is None or (isinstance(z, str) and z.strip().lower() in ("inf", "∞", "infinity")):
        return INF
    z = complex(z)
    if math.isinf(z.real) or math.isinf(z.imag):
        return INF
    return XComplex.finite(z)


# ---------------------------------------------------------------------------
# region base class
# ---------------------------------------------------------------------------

class Region(ABC):
    """A closed, conjugate-symmetric subset of the extended complex plane."""

    symbolic: bool = True

    @abstractmethod
    def mask(self, z: np.ndarray, tol=ABS_TOL) -> np.ndarray:
        """Vectorised membership of finite points ``z`` within distance ``tol``.

        ``tol`` may be a scalar or an array broadcastable against ``z``.
        """

    @property
    @abstractmethod
    def has_infinity(self) -> bool:
        ...

    @abstractmethod
    def iter_net(self, step: float, window: float = DEFAULT_WINDOW) -> Iterator[np.ndarray]:
        """Yield chunks of finite member points covering the boundary.

        Every boundary point inside ``|z| <= window`` is within ``step`` of a
        yielded point, and every yielded point lies in the region (up to
        rounding).
        """

    def boundary_net(self, step: float, window: float = DEFAULT_WINDOW) -> np.ndarray:
        chunks = [np.asarray(c, dtype=complex).ravel() for c in self.iter_net(step, window)]
        if not chunks:
            return np.zeros(0, dtype=complex)
        return np.concatenate(chunks)

    def contains(self, z) -> bool:
        return contains(self, z)

    def __and__(self, other: "Region") -> "Region":
        return intersect(self, other)

    def __or__(self, other: "Region") -> "Region":
        return union(self, other)


def _circle_points(center: float, radius: float, step: float) -> np.ndarray:
    n = max(16, int(math.ceil(2 * math.pi * radius / step)))
    n += n % 2  # keep both real-axis points exactly
    t = 2 * math.pi * np.arange(n) / n
    pts = center + radius * np.exp(1j * t)
    pts[0] = center + radius
    pts[n // 2] = center - radius
    return pts


def _line_points(a: float, step: float, window: float) -> np.ndarray:
    if abs(a) > window:
        return np.zeros(0, dtype=complex)
    h = math.sqrt(window * window - a * a)
    n = max(2, int(math.ceil(2 * h / step)) + 1)
    return a + 1j * np.linspace(-h, h, n)


# ---------------------------------------------------------------------------
# primitives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Disk(Region):
    center: float
    radius: float

    def __post_init__(self):
        _check_real(self.center, "center")
        if not self.radius > 0 or math.isinf(self.radius):
            raise ValueError("disk radius must be positive and finite")

    def mask(self, z, tol=ABS_TOL):
        return np.abs(np.asarray(z) - self.center) <= self.radius + tol

    @property
    def has_infinity(self):
        return False

    def iter_net(self, step, window=DEFAULT_WINDOW):
        yield _circle_points(self.center, self.radius, step)


@dataclass(frozen=True)
class DiskExterior(Region):
    """Closed exterior ``|z - center| >= radius`` together with infinity."""

    center: float
    radius: float

    def __post_init__(self):
        _check_real(self.center, "center")
        if not self.radius > 0 or math.isinf(self.radius):
            raise ValueError("disk radius must be positive and finite")

    def mask(self, z, tol=ABS_TOL):
        return np.abs(np.asarray(z) - self.center) >= self.radius - tol

    @property
    def has_infinity(self):
        return True

    def iter_net(self, step, window=DEFAULT_WINDOW):
        yield _circle_points(self.center, self.radius, step)


@dataclass(frozen=True)
class HalfPlaneGE(Region):
    """``Re z >= a`` together with infinity."""

    a: float

    def __post_init__(self):
        _check_real(self.a, "a")

    def mask(self, z, tol=ABS_TOL):
        return np.real(np.asarray(z)) >= self.a - tol

    @property
    def has_infinity(self):
        return True

    def iter_net(self, step, window=DEFAULT_WINDOW):
        yield _line_points(self.a, step, window)


@dataclass(frozen=True)
class HalfPlaneLE(Region):
    """``Re z <= a`` together with infinity."""

    a: float

    def __post_init__(self):
        _check_real(self.a, "a")

    def mask(self, z, tol=ABS_TOL):
        return np.real(np.asarray(z)) <= self.a + tol

    @property
    def has_infinity(self):
        return True

    def iter_net(self, step, window=DEFAULT_WINDOW):
        yield _line_points(self.a, step, window)


def cardioid_radius(phi):
    """Boundary radius ``cos(phi/2)**2`` of the canonical cardioid."""
    return np.cos(np.asarray(phi) / 2.0) ** 2


@dataclass(frozen=True)
class Cardioid(Region):
    """``origin + orientation * scale * w`` for ``w`` in the canonical cardioid.

    The canonical cardioid is ``{r e^{i phi} : 0 <= r <= cos^2(phi/2)}``,
    with its cusp at 0 and its rightmost point at 1.
    """

    origin: float = 0.0
    scale: float = 1.0
    orientation: int = 1

    def __post_init__(self):
        _check_real(self.origin, "origin")
        if not self.scale > 0 or math.isinf(self.scale):
            raise ValueError("cardioid scale must be positive and finite")
        if self.orientation not in (1, -1):
            raise ValueError("cardioid orientation must be +1 or -1")

    def _to_canonical(self, z):
        return self.orientation * (np.asarray(z) - self.origin) / self.scale

    def mask(self, z, tol=ABS_TOL):
        w = self._to_canonical(z)
        r = np.abs(w)
        # radial test; the radial gap is within a bounded factor of the distance
        return r <= cardioid_radius(np.angle(w)) + np.asarray(tol) / self.scale

    @property
    def has_infinity(self):
        return False

    def canonical_boundary(self, step):
        # perimeter of the canonical curve is 4
        n = max(64, int(math.ceil(4.0 * self.scale / step)) * 2)
        phi = np.linspace(-math.pi, math.pi, n + 1)
        return cardioid_radius(phi) * np.exp(1j * phi)

    def iter_net(self, step, window=DEFAULT_WINDOW):
        yield self.origin + self.orientation * self.scale * self.canonical_boundary(step)


@dataclass(frozen=True)
class Points(Region):
    """A finite conjugate-closed set of points, optionally with infinity."""

    values: tuple = ()
    with_infinity: bool = False

    def __init__(self, values: Sequence = (), with_infinity: bool = False):
        finite = []
        inf = bool(with_infinity)
        for v in values:
            x = as_xcomplex(v)
            if x.is_infinite:
                inf = True
            else:
                finite.append(complex(x))
        arr = np.array(finite, dtype=complex)
        if arr.size:
            # conjugate closure, within tolerance
            d = np.abs(arr[:, None] - np.conj(arr)[None, :]).min(axis=1)
            if np.any(d > 1e-9 * np.maximum(1.0, np.abs(arr))):
                raise ValueError("point set is not symmetric about the real axis")
        object.__setattr__(self, "values", tuple(finite))
        object.__setattr__(self, "with_infinity", inf)

    @classmethod
    def symmetric(cls, values: Sequence, with_infinity: bool = False) -> "Points":
        """Build a point set after adding the conjugate of every point."""
        out = []
        inf = with_infinity
        for v in values:
            x = as_xcomplex(v)
            if x.is_infinite:
                inf = True
                continue
            out.append(complex(x))
            if x.im != 0:
                out.append(complex(x).conjugate())
        return cls(out, inf)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=complex)

    def mask(self, z, tol=ABS_TOL):
        z = np.asarray(z, dtype=complex)
        if not self.values:
            return np.zeros(z.shape, dtype=bool)
        d = np.abs(z[..., None] - self.array)
        return (d <= np.asarray(tol)[..., None] if np.ndim(tol) else d <= tol).any(axis=-1)

    @property
    def has_infinity(self):
        return self.with_infinity

    def iter_net(self, step, window=DEFAULT_WINDOW):
        yield self.array


@dataclass(frozen=True)
class EmptyRegion(Region):
    def mask(self, z, tol=ABS_TOL):
        return np.zeros(np.shape(z), dtype=bool)

    @property
    def has_infinity(self):
        return False

    def iter_net(self, step, window=DEFAULT_WINDOW):
        return iter(())


@dataclass(frozen=True)
class FullRegion(Region):
    def mask(self, z, tol=ABS_TOL):
        return np.ones(np.shape(z), dtype=bool)

    @property
    def has_infinity(self):
        return True

    def iter_net(self, step, window=DEFAULT_WINDOW):
        return iter(())


Empty = EmptyRegion()
Full = FullRegion()

GENERALIZED_CIRCLES = (Disk, DiskExterior, HalfPlaneGE, HalfPlaneLE)


def _check_real(x, name):
    if not isinstance(x, (int, float, np.floating, np.integer)) or not math.isfinite(x):
        raise ValueError(f"{name} must be a finite real number, got {x!r}")


# ---------------------------------------------------------------------------
# combinators and wrappers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Union(Region):
    parts: tuple

    def mask(self, z, tol=ABS_TOL):
        out = np.zeros(np.shape(z), dtype=bool)
        for p in self.parts:
            out |= p.mask(z, tol)
        return out

    @property
    def has_infinity(self):
        return any(p.has_infinity for p in self.parts)

    def iter_net(self, step, window=DEFAULT_WINDOW):
        for p in self.parts:
            yield from p.iter_net(step, window)


@dataclass(frozen=True)
class Intersection(Region):
    parts: tuple

    def mask(self, z, tol=ABS_TOL):
        out = np.ones(np.shape(z), dtype=bool)
        for p in self.parts:
            out &= p.mask(z, tol)
        return out

    @property
    def has_infinity(self):
        return all(p.has_infinity for p in self.parts)

    def iter_net(self, step, window=DEFAULT_WINDOW):
        for p in self.parts:
            for chunk in p.iter_net(step, window):
                yield chunk[self.mask(chunk, 1e-9)]
        corners = _pairwise_intersections(_leaves(self))
        if corners.size:
            yield corners[self.mask(corners, 1e-9)]


@dataclass(frozen=True)
class AffineReal(Region):
    """``{alpha * z + beta : z in child}`` kept unresolved (cardioid-derived children)."""

    child: Region
    alpha: float
    beta: float

    def mask(self, z, tol=ABS_TOL):
        return self.child.mask((np.asarray(z) - self.beta) / self.alpha, np.asarray(tol) / abs(self.alpha))

    @property
    def has_infinity(self):
        return self.child.has_infinity

    def iter_net(self, step, window=DEFAULT_WINDOW):
        inner_window = (window + abs(self.beta)) / abs(self.alpha)
        for chunk in self.child.iter_net(step / abs(self.alpha), inner_window):
            yield self.alpha * chunk + self.beta


@dataclass(frozen=True)
class Invert(Region):
    """``{1/conj(z) : z in child}`` with 0 and infinity exchanged."""

    child: Region

    def mask(self, z, tol=ABS_TOL):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=bool)
        nz = z != 0
        zz = z[nz]
        t = np.broadcast_to(np.asarray(tol, dtype=float), z.shape)[nz]
        out[nz] = self.child.mask(1.0 / np.conj(zz), t / np.abs(zz) ** 2)
        if (~nz).any():
            out[~nz] = self.child.has_infinity
        return out

    @property
    def has_infinity(self):
        return bool(self.child.mask(np.zeros(1, dtype=complex))[0])

    def iter_net(self, step, window=DEFAULT_WINDOW):
        # near the kept image points the inversion stretches by at most window**2
        inner = max(window, 1.0)
        for chunk in self.child.iter_net(step / inner ** 2, DEFAULT_WINDOW * 10):
            chunk = chunk[chunk != 0]
            img = 1.0 / np.conj(chunk)
            yield img[np.abs(img) <= window]


# ---------------------------------------------------------------------------
# sampled regions
# ---------------------------------------------------------------------------

NetFactory = Callable[[float, float], Iterator[np.ndarray]]


@dataclass(frozen=True, eq=False)
class SampledRegion(Region):
    """A region known through a membership oracle at a fixed resolution.

    Parameters
    ----------
    oracle : callable
        ``oracle(z, tol) -> bool array`` for finite points.  The oracle
        already accounts for ``resolution``; ``tol`` is extra slack.
    rmin, rmax : float
        Bounding annulus of the finite part.
    contains_infinity : bool
    resolution : float
    net : callable
        ``net(step, window)`` yielding member points that cover the
        boundary to within ``step``.
    certificate : Certificate
        EQUAL when the oracle describes the intended set, SUPERSET when it
        only contains it.
    """

    oracle: Callable
    rmin: float
    rmax: float
    contains_infinity: bool
    resolution: float
    net: NetFactory
    certificate: Certificate = Certificate.EQUAL
    description: str = "sampled"

    symbolic = False

    def mask(self, z, tol=ABS_TOL):
        z = np.asarray(z, dtype=complex)
        return np.asarray(self.oracle(z, np.broadcast_to(np.asarray(tol, dtype=float), z.shape)), dtype=bool)

    @property
    def has_infinity(self):
        return self.contains_infinity

    def iter_net(self, step, window=DEFAULT_WINDOW):
        return self.net(step, window)


def sampled(region: Region, resolution: float = DEFAULT_RESOLUTION) -> SampledRegion:
    """View any region as a sampled one (used to cross-check exact paths)."""
    if isinstance(region, SampledRegion):
        return region
    lo, hi = inf_modulus(region), sup_modulus(region)

    def oracle(z, tol):
        return region.mask(z, tol + resolution)

    return SampledRegion(oracle, lo, hi, region.has_infinity, resolution,
                         region.iter_net, Certificate.EQUAL, f"sampled({to_text(region)})")


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------

def contains(region: Region, z, tol: float = ABS_TOL) -> bool:
    """True iff ``z`` (number or XComplex) lies in the closed region."""
    x = as_xcomplex(z)
    if x.is_infinite:
        return region.has_infinity
    return bool(region.mask(np.array([complex(x)]), tol)[0])


# ---------------------------------------------------------------------------
# simplification
# ---------------------------------------------------------------------------

_SUB_TOL = 1e-12


def _subset(p: Region, q: Region) -> bool:
    """Conservative test ``p ⊆ q`` for generalized-circle primitives."""
    t = _SUB_TOL
    if isinstance(q, FullRegion) or isinstance(p, EmptyRegion):
        return True
    if p == q:
        return True
    if isinstance(p, Disk):
        if isinstance(q, Disk):
            return abs(p.center - q.center) + p.radius <= q.radius + t
        if isinstance(q, DiskExterior):
            return abs(p.center - q.center) >= p.radius + q.radius - t
        if isinstance(q, HalfPlaneGE):
            return p.center - p.radius >= q.a - t
        if isinstance(q, HalfPlaneLE):
            return p.center + p.radius <= q.a + t
    if isinstance(p, DiskExterior) and isinstance(q, DiskExterior):
        return abs(p.center - q.center) + q.radius <= p.radius + t
    if isinstance(p, HalfPlaneGE):
        if isinstance(q, HalfPlaneGE):
            return p.a >= q.a - t
        if isinstance(q, DiskExterior):
            return q.center + q.radius <= p.a + t
    if isinstance(p, HalfPlaneLE):
        if isinstance(q, HalfPlaneLE):
            return p.a <= q.a + t
        if isinstance(q, DiskExterior):
            return q.center - q.radius >= p.a - t
    if isinstance(p, Points) and not p.with_infinity and isinstance(q, GENERALIZED_CIRCLES):
        return bool(np.all(q.mask(p.array, t))) if p.values else True
    return False


def _disjoint(p: Region, q: Region) -> bool:
    t = _SUB_TOL
    if isinstance(p, Disk) and isinstance(q, Disk):
        return abs(p.center - q.center) > p.radius + q.radius + t
    pairs = ((p, q), (q, p))
    for x, y in pairs:
        if isinstance(x, Disk):
            if isinstance(y, HalfPlaneGE) and x.center + x.radius < y.a - t:
                return True
            if isinstance(y, HalfPlaneLE) and x.center - x.radius > y.a + t:
                return True
            if isinstance(y, DiskExterior) and abs(x.center - y.center) + x.radius < y.radius - t:
                return True
    return False


def simplify(region: Region) -> Region:
    """Flatten combinators and drop redundant or identity parts."""
    if isinstance(region, Intersection):
        parts = []
        for p in region.parts:
            p = simplify(p)
            if isinstance(p, EmptyRegion):
                return Empty
            if isinstance(p, FullRegion):
                continue
            parts.extend(p.parts if isinstance(p, Intersection) else [p])
        parts = _drop_redundant(parts, lambda keep, other: _subset(other, keep))
        for i, p in enumerate(parts):
            for q in parts[i + 1:]:
                if _disjoint(p, q):
                    return Empty
        if not parts:
            return Full
        return parts[0] if len(parts) == 1 else Intersection(tuple(parts))
    if isinstance(region, Union):
        parts = []
        for p in region.parts:
            p = simplify(p)
            if isinstance(p, FullRegion):
                return Full
            if isinstance(p, EmptyRegion):
                continue
            parts.extend(p.parts if isinstance(p, Union) else [p])
        parts = _merge_points(parts)
        parts = _drop_redundant(parts, lambda keep, other: _subset(keep, other))
        if not parts:
            return Empty
        return parts[0] if len(parts) == 1 else Union(tuple(parts))
    return region


def _merge_points(parts):
    pts = [p for p in parts if isinstance(p, Points)]
    if len(pts) <= 1:
        return parts
    merged = Points([v for p in pts for v in p.values], any(p.with_infinity for p in pts))
    return [p for p in parts if not isinstance(p, Points)] + [merged]


def _drop_redundant(parts, redundant):
    """Remove ``parts[i]`` when ``redundant(parts[i], parts[j])`` for some kept j."""
    kept = list(parts)
    i = 0
    while i < len(kept):
        p = kept[i]
        if any(j != i and redundant(p, kept[j]) for j in range(len(kept))):
            # keep one of two mutually redundant (equal) parts
            del kept[i]
            continue
        i += 1
    return kept


# ---------------------------------------------------------------------------
# set operations
# ---------------------------------------------------------------------------

def intersect(a: Region, b: Region) -> Region:
    """Set intersection; symbolic when both operands are symbolic."""
    if a.symbolic and b.symbolic:
        return simplify(Intersection((a, b)))
    return _combine_sampled(a, b, all_of=True)


def union(a: Region, b: Region) -> Region:
    """Set union; symbolic when both operands are symbolic."""
    if a.symbolic and b.symbolic:
        return simplify(Union((a, b)))
    return _combine_sampled(a, b, all_of=False)


def _combine_sampled(a: Region, b: Region, all_of: bool) -> SampledRegion:
    res = min(getattr(r, "resolution", math.inf) for r in (a, b))
    cert = getattr(a, "certificate", Certificate.EQUAL) & getattr(b, "certificate", Certificate.EQUAL)
    if all_of:
        def oracle(z, tol):
            return a.mask(z, tol) & b.mask(z, tol)

        def net(step, window):
            for src in (a, b):
                for chunk in src.iter_net(step, window):
                    yield chunk[oracle(chunk, np.full(chunk.shape, 1e-9))]
        lo = max(_bounds(a)[0], _bounds(b)[0])
        hi = min(_bounds(a)[1], _bounds(b)[1])
        inf = a.has_infinity and b.has_infinity
    else:
        def oracle(z, tol):
            return a.mask(z, tol) | b.mask(z, tol)

        def net(step, window):
            yield from a.iter_net(step, window)
            yield from b.iter_net(step, window)
        lo = min(_bounds(a)[0], _bounds(b)[0])
        hi = max(_bounds(a)[1], _bounds(b)[1])
        inf = a.has_infinity or b.has_infinity
    return SampledRegion(oracle, lo, hi, inf, res, net, cert, "intersection" if all_of else "union")


def _bounds(r: Region):
    if isinstance(r, SampledRegion):
        return r.rmin, r.rmax
    return inf_modulus(r), sup_modulus(r)


# ---------------------------------------------------------------------------
# affine maps
# ---------------------------------------------------------------------------

def affine(region: Region, alpha: float, beta: float = 0.0) -> Region:
    """Image ``{alpha*z + beta}`` for real ``alpha != 0``; infinity is fixed."""
    alpha = float(alpha)
    beta = float(beta)
    if alpha == 0 or not math.isfinite(alpha):
        raise ValueError("affine scale must be a nonzero finite real")
    if not math.isfinite(beta):
        raise ValueError("affine shift must be finite")
    if alpha == 1.0 and beta == 0.0:
        return region
    r = region
    if isinstance(r, Disk):
        return Disk(alpha * r.center + beta, abs(alpha) * r.radius)
    if isinstance(r, DiskExterior):
        return DiskExterior(alpha * r.center + beta, abs(alpha) * r.radius)
    if isinstance(r, HalfPlaneGE):
        a = alpha * r.a + beta
        return HalfPlaneGE(a) if alpha > 0 else HalfPlaneLE(a)
    if isinstance(r, HalfPlaneLE):
        a = alpha * r.a + beta
        return HalfPlaneLE(a) if alpha > 0 else HalfPlaneGE(a)
    if isinstance(r, Cardioid):
        return Cardioid(alpha * r.origin + beta, abs(alpha) * r.scale,
                        r.orientation * (1 if alpha > 0 else -1))
    if isinstance(r, Points):
        return Points([alpha * v + beta for v in r.values], r.with_infinity)
    if isinstance(r, (EmptyRegion, FullRegion)):
        return r
    if isinstance(r, Union):
        return simplify(Union(tuple(affine(p, alpha, beta) for p in r.parts)))
    if isinstance(r, Intersection):
        return simplify(Intersection(tuple(affine(p, alpha, beta) for p in r.parts)))
    if isinstance(r, AffineReal):
        a2, b2 = alpha * r.alpha, alpha * r.beta + beta
        if a2 == 1.0 and b2 == 0.0:
            return r.child
        return AffineReal(r.child, a2, b2)
    if isinstance(r, Invert):
        return AffineReal(r, alpha, beta)
    if isinstance(r, SampledRegion):
        return _affine_sampled(r, alpha, beta)
    raise TypeError(f"affine: unsupported region {type(r).__name__}")


def _affine_sampled(r: SampledRegion, alpha, beta) -> SampledRegion:
    def oracle(z, tol):
        return r.mask((z - beta) / alpha, tol / abs(alpha))

    def net(step, window):
        inner = (window + abs(beta)) / abs(alpha)
        for chunk in r.iter_net(step / abs(alpha), inner):
            yield alpha * chunk + beta

    # a shift can move the origin anywhere inside the annulus
    lo = max(0.0, abs(alpha) * r.rmin - abs(beta)) if beta else abs(alpha) * r.rmin
    hi = abs(alpha) * r.rmax + abs(beta)
    return SampledRegion(oracle, lo, hi, r.contains_infinity, abs(alpha) * r.resolution, net,
                         r.certificate, f"affine({r.description}, {alpha}, {beta})")


# ---------------------------------------------------------------------------
# inversion
# ---------------------------------------------------------------------------

def _real_crossings(p: Region):
    """Signed real-axis crossings of a primitive boundary (None means infinity)."""
    if isinstance(p, (Disk, DiskExterior)):
        return p.center - p.radius, p.center + p.radius
    if isinstance(p, (HalfPlaneGE, HalfPlaneLE)):
        return p.a, None
    raise TypeError(type(p).__name__)


def _interior_witness(p: Region) -> float:
    """A nonzero real point strictly inside the primitive."""
    if isinstance(p, Disk):
        w = p.center if p.center != 0 else p.radius / 2
        return w
    if isinstance(p, DiskExterior):
        w = p.center + 2 * p.radius
        return w if w != 0 else p.center - 2 * p.radius
    if isinstance(p, HalfPlaneGE):
        w = p.a + max(1.0, abs(p.a))
        return w if w != 0 else p.a + 2 * max(1.0, abs(p.a))
    if isinstance(p, HalfPlaneLE):
        w = p.a - max(1.0, abs(p.a))
        return w if w != 0 else p.a - 2 * max(1.0, abs(p.a))
    raise TypeError(type(p).__name__)


def _invert_generalized_circle(p: Region) -> Region:
    x, y = _real_crossings(p)
    scale = max(abs(v) for v in (x, y) if v is not None) or 1.0

    def inv(t):
        if t is None:
            return 0.0
        if abs(t) <= ABS_TOL * max(scale, 1.0):
            return None
        return 1.0 / t

    ix, iy = inv(y), inv(x)
    w = 1.0 / _interior_witness(p)
    if ix is None or iy is None:
        line = iy if ix is None else ix
        return HalfPlaneGE(line) if w >= line else HalfPlaneLE(line)
    c = (ix + iy) / 2
    r = abs(ix - iy) / 2
    return Disk(c, r) if abs(w - c) < r else DiskExterior(c, r)


def invert(region: Region) -> Region:
    """Image under ``z -> 1/conj(z)``, exchanging 0 and infinity."""
    r = region
    if isinstance(r, GENERALIZED_CIRCLES):
        return _invert_generalized_circle(r)
    if isinstance(r, Points):
        vals = []
        inf = False
        for v in r.values:
            if v == 0:
                inf = True
            else:
                vals.append(1.0 / np.conj(v))
        if r.with_infinity:
            vals.append(0.0)
        return Points(vals, inf)
    if isinstance(r, EmptyRegion):
        return Empty
    if isinstance(r, FullRegion):
        return Full
    if isinstance(r, Union):
        return simplify(Union(tuple(invert(p) for p in r.parts)))
    if isinstance(r, Intersection):
        return simplify(Intersection(tuple(invert(p) for p in r.parts)))
    if isinstance(r, Invert):
        return r.child
    if isinstance(r, (Cardioid, AffineReal)):
        return Invert(r)
    if isinstance(r, SampledRegion):
        return _invert_sampled(r)
    raise TypeError(f"invert: unsupported region {type(r).__name__}")


def _invert_sampled(r: SampledRegion) -> SampledRegion:
    zero_in = bool(r.mask(np.zeros(1, dtype=complex), 0.0)[0])

    def oracle(z, tol):
        out = np.zeros(z.shape, dtype=bool)
        nz = z != 0
        zz = z[nz]
        out[nz] = r.mask(1.0 / np.conj(zz), tol[nz] / np.abs(zz) ** 2)
        out[~nz] = r.contains_infinity
        return out

    def net(step, window):
        inner = max(window, 1.0)
        for chunk in r.iter_net(step / inner ** 2, DEFAULT_WINDOW * 10):
            chunk = chunk[chunk != 0]
            img = 1.0 / np.conj(chunk)
            yield img[np.abs(img) <= window]

    lo = 0.0 if r.contains_infinity else (1.0 / r.rmax if r.rmax > 0 else math.inf)
    hi = math.inf if r.rmin == 0 else 1.0 / r.rmin
    return SampledRegion(oracle, lo, hi, zero_in, r.resolution, net, r.certificate,
                         f"invert({r.description})")


# ---------------------------------------------------------------------------
# moduli
# ---------------------------------------------------------------------------

def _leaves(region: Region) -> list:
    if isinstance(region, (Union, Intersection)):
        out = []
        for p in region.parts:
            out.extend(_leaves(p))
        return out
    return [region]


def _gcircle(p):
    if isinstance(p, (Disk, DiskExterior)):
        return ("c", p.center, p.radius)
    if isinstance(p, (HalfPlaneGE, HalfPlaneLE)):
        return ("l", p.a, None)
    return None


def _pairwise_intersections(leaves) -> np.ndarray:
    gcs = [g for g in (_gcircle(p) for p in leaves) if g is not None]
    pts = []
    for i in range(len(gcs)):
        for j in range(i + 1, len(gcs)):
            pts.extend(_gc_intersect(gcs[i], gcs[j]))
    return np.array(pts, dtype=complex)


def _gc_intersect(g1, g2):
    if g1[0] == "l" and g2[0] == "l":
        return []
    if g1[0] == "l":
        g1, g2 = g2, g1
    _, c1, r1 = g1
    if g2[0] == "l":
        x = g2[1]
        y2 = r1 * r1 - (x - c1) ** 2
    else:
        _, c2, r2 = g2
        if c1 == c2:
            return []
        x = (r1 * r1 - r2 * r2 + c2 * c2 - c1 * c1) / (2 * (c2 - c1))
        y2 = r1 * r1 - (x - c1) ** 2
    if y2 < -1e-12 * max(1.0, r1 * r1):
        return []
    y = math.sqrt(max(y2, 0.0))
    return [complex(x, y), complex(x, -y)]


def _candidates(region: Region, fine_step: float) -> np.ndarray:
    """Finite points where the extreme moduli over a symbolic region can occur."""
    out = []
    for leaf in _leaves(region):
        if isinstance(leaf, (Disk, DiskExterior)):
            out += [leaf.center - leaf.radius, leaf.center + leaf.radius]
        elif isinstance(leaf, (HalfPlaneGE, HalfPlaneLE)):
            out.append(leaf.a)
        elif isinstance(leaf, Points):
            out.extend(leaf.values)
        elif isinstance(leaf, (Cardioid, AffineReal, Invert, SampledRegion)):
            out.extend(leaf.boundary_net(fine_step))
            curve = _curve(leaf)
            if curve is not None:
                out.extend(_curve_extremes(curve))
    arr = np.array(out, dtype=complex)
    corners = _pairwise_intersections(_leaves(region))
    return np.concatenate([arr, corners]) if corners.size else arr


def _curve(leaf):
    """Boundary parametrisation ``phi -> z`` (phi in [-pi, pi]) of cardioid-derived leaves."""
    if isinstance(leaf, Cardioid):
        return lambda phi: leaf.origin + leaf.orientation * leaf.scale * cardioid_radius(phi) * np.exp(1j * phi)
    if isinstance(leaf, AffineReal):
        inner = _curve(leaf.child)
        return None if inner is None else (lambda phi: leaf.alpha * inner(phi) + leaf.beta)
    if isinstance(leaf, Invert):
        inner = _curve(leaf.child)

        def inv(phi):
            w = np.asarray(inner(phi), dtype=complex)
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(w != 0, 1.0 / np.conj(w), np.inf)
        return None if inner is None else inv
    return None


def _curve_extremes(curve, samples: int = 4001) -> list:
    """Local maximisers and minimisers of ``|curve(phi)|``, refined to high accuracy."""
    from scipy.optimize import minimize_scalar

    phi = np.linspace(-math.pi, math.pi, samples)
    with np.errstate(invalid="ignore"):
        mod = np.abs(curve(phi))
    out = []
    for sign in (1.0, -1.0):
        f = sign * mod
        idx = np.flatnonzero((f[1:-1] >= f[:-2]) & (f[1:-1] >= f[2:])) + 1
        for i in idx:
            if not np.isfinite(f[i]):
                continue
            res = minimize_scalar(lambda t: -sign * abs(complex(curve(np.array([t]))[0])),
                                  bounds=(phi[i - 1], phi[i + 1]), method="bounded",
                                  options={"xatol": 1e-12})
            out.append(complex(curve(np.array([res.x]))[0]))
    return [z for z in out if np.isfinite(z)]


def _filter_members(region: Region, pts: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    if pts.size == 0:
        return pts
    return pts[region.mask(pts, tol)]


def _fine_step(tol):
    # curve maxima are smooth, so the sampling error is quadratic in the step
    return min(max(tol, 2e-5), 1e-3)


def sup_modulus(region: Region, tol: float = DEFAULT_RESOLUTION) -> float:
    """Supremum of ``|z|`` over the region (``inf`` if it contains infinity).

    Exact for trees of disks and half-planes.  Cardioid-derived pieces use a
    dense boundary net; sampled regions refine their boundary net until two
    successive estimates differ by less than ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if region.has_infinity:
        return math.inf
    if isinstance(region, SampledRegion):
        return _refine_extreme(region, tol, np.max)
    pts = _filter_members(region, _candidates(region, _fine_step(tol)))
    return float(np.abs(pts).max()) if pts.size else 0.0


def inf_modulus(region: Region, tol: float = DEFAULT_RESOLUTION) -> float:
    """Infimum of ``|z|`` over the finite part of the region."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if contains(region, 0.0):
        return 0.0
    if isinstance(region, SampledRegion):
        return _refine_extreme(region, tol, np.min)
    pts = _filter_members(region, _candidates(region, _fine_step(tol)))
    if pts.size == 0:
        return math.inf
    return float(np.abs(pts).min())


def _refine_extreme(region: SampledRegion, tol: float, pick) -> float:
    step = max(16 * tol, 2e-2)
    window = region.rmax * 1.01 + 1.0 if math.isfinite(region.rmax) else DEFAULT_WINDOW
    prev = None
    floor = min(tol, region.resolution) / 4
    while True:
        vals = [pick(np.abs(c)) for c in region.iter_net(step, window) if c.size]
        cur = float(pick(vals)) if vals else (0.0 if pick is np.max else math.inf)
        if prev is not None and abs(cur - prev) < tol:
            return cur
        if step <= floor:
            return cur
        prev = cur
        step /= 2


def subset_of_disk(region: Region, center: float, radius: float, tol: float = DEFAULT_RESOLUTION) -> bool:
    """True iff the region lies in ``Disk(center, radius + tol)`` and excludes infinity."""
    if not radius > 0 or not tol > 0:
        raise ValueError("radius and tol must be positive")
    if region.has_infinity:
        return False
    if isinstance(region, EmptyRegion):
        return True
    if isinstance(region, Disk):
        return abs(region.center - center) + region.radius <= radius + tol
    moved = affine(region, 1.0, -center)
    return sup_modulus(moved, min(tol, 1e-3) / 4) <= radius + tol


# ---------------------------------------------------------------------------
# Minkowski operations
# ---------------------------------------------------------------------------

class MinkowskiResult(NamedTuple):
    region: Region
    certificate: Certificate


def _is_bounded(r: Region) -> bool:
    return not r.has_infinity


def _isolated_infinity(r: Region) -> bool:
    """True when infinity is in the region but the finite part is bounded."""
    if not r.has_infinity:
        return False
    if isinstance(r, Points):
        return True
    if isinstance(r, Union):
        return any(_isolated_infinity(p) for p in r.parts) and not any(
            p.has_infinity and not _isolated_infinity(p) for p in r.parts)
    if isinstance(r, SampledRegion):
        return math.isfinite(r.rmax)
    return False


def minkowski_sum(a: Region, b: Region, chord_ok: bool = True,
                  resolution: float = DEFAULT_RESOLUTION,
                  window: float = DEFAULT_WINDOW) -> MinkowskiResult:
    """Pointwise sum ``{x + y : x in a, y in b}``.

    Unbounded operands (half-planes) follow the closure convention
    ``z + inf = inf``.  An operand whose only unbounded point is an
    isolated infinity breaks the sum rule and is rejected.
    """
    cert = Certificate.EQUAL if chord_ok else Certificate.SUPERSET
    for r in (a, b):
        if _isolated_infinity(r):
            raise HypothesisViolation("Minkowski sum needs operands without an isolated infinity")
    if isinstance(a, EmptyRegion) or isinstance(b, EmptyRegion):
        return MinkowskiResult(Empty, cert)
    exact = _exact_sum(a, b)
    if exact is None:
        exact = _exact_sum(b, a)
    if exact is not None:
        return MinkowskiResult(exact, cert)
    if a.has_infinity and b.has_infinity:
        raise HypothesisViolation("sampled Minkowski sum needs one bounded operand")
    return MinkowskiResult(_sampled_sum(a, b, resolution, window, cert), cert)


def _exact_sum(a: Region, b: Region):
    if isinstance(b, Points) and not b.with_infinity and len(b.values) == 1 and b.values[0].imag == 0:
        return affine(a, 1.0, b.values[0].real)
    if isinstance(a, FullRegion):
        return Full
    if isinstance(a, Disk) and isinstance(b, Disk):
        return Disk(a.center + b.center, a.radius + b.radius)
    if isinstance(a, HalfPlaneGE):
        if isinstance(b, Disk):
            return HalfPlaneGE(a.a + b.center - b.radius)
        if isinstance(b, HalfPlaneGE):
            return HalfPlaneGE(a.a + b.a)
        if isinstance(b, HalfPlaneLE):
            return Full
    if isinstance(a, HalfPlaneLE):
        if isinstance(b, Disk):
            return HalfPlaneLE(a.a + b.center + b.radius)
        if isinstance(b, HalfPlaneLE):
            return HalfPlaneLE(a.a + b.a)
    return None


def _sampled_sum(a: Region, b: Region, resolution, window, cert) -> SampledRegion:
    net_a = a.boundary_net(resolution / 2, window)
    net_b = b.boundary_net(resolution / 2, window)
    sa, sb = _bounds(a), _bounds(b)

    def oracle(z, tol):
        z = np.asarray(z, dtype=complex).ravel()
        tol = np.asarray(tol, dtype=float).ravel()
        hit = np.zeros(z.shape, dtype=bool)
        for net, other in ((net_b, a), (net_a, b)):
            for start in range(0, net.size, 256):
                todo = ~hit
                if not todo.any():
                    return hit
                blk = net[start:start + 256]
                zz = z[todo][:, None] - blk[None, :]
                t = (tol[todo] + resolution)[:, None]
                ok = other.mask(zz, np.broadcast_to(t, zz.shape)).any(axis=1)
                hit[np.flatnonzero(todo)[ok]] = True
        return hit

    def net(step, win):
        na = a.boundary_net(step / 2, win)
        nb = b.boundary_net(step / 2, win)
        for start in range(0, na.size, 512):
            s = (na[start:start + 512, None] + nb[None, :]).ravel()
            yield s[np.abs(s) <= win]

    def wrapped(z, tol):
        return oracle(z, tol).reshape(np.shape(z))

    lo = max(0.0, sa[0] - sb[1], sb[0] - sa[1])
    return SampledRegion(wrapped, lo, sa[1] + sb[1], a.has_infinity or b.has_infinity,
                         resolution, net, cert, "minkowski_sum")


def minkowski_product(a: Region, b: Region, arc_ok: bool = True,
                      resolution: float = DEFAULT_RESOLUTION) -> MinkowskiResult:
    """Pointwise product ``{x * y : x in a, y in b}`` of bounded nonempty regions."""
    cert = Certificate.EQUAL if arc_ok else Certificate.SUPERSET
    for r in (a, b):
        if isinstance(r, EmptyRegion):
            raise HypothesisViolation("Minkowski product of an empty region")
        if r.has_infinity:
            raise HypothesisViolation("Minkowski product needs operands without infinity")
    exact = _exact_product(a, b)
    if exact is None:
        exact = _exact_product(b, a)
    if exact is not None:
        return MinkowskiResult(exact, cert)
    return MinkowskiResult(_sampled_product(a, b, resolution, cert), cert)


def _exact_product(a: Region, b: Region):
    if isinstance(b, Points) and len(b.values) == 1 and b.values[0].imag == 0:
        p = b.values[0].real
        return Points([0.0]) if p == 0 else affine(a, p, 0.0)
    if isinstance(a, Disk) and a.center == 0 and b.symbolic:
        s = sup_modulus(b, 1e-6)
        return Points([0.0]) if s == 0 else Disk(0.0, a.radius * s)
    return None


def _sampled_product(a: Region, b: Region, resolution, cert) -> SampledRegion:
    sup_a = max(_bounds(a)[1], 1e-12)
    sup_b = max(_bounds(b)[1], 1e-12)
    # the error of a net point enters the product scaled by the other modulus
    # a net point off by delta moves the product by at most delta * sup of the other factor
    net_a = a.boundary_net(resolution / sup_b)
    net_b = b.boundary_net(resolution / sup_a)
    net_a = net_a[net_a != 0]
    net_b = net_b[net_b != 0]
    # for a == b one pass suffices: the product is symmetric in its factors
    passes = ((net_b, a),) if a == b else ((net_b, a), (net_a, b))
    zero_in = bool(a.mask(np.zeros(1, dtype=complex))[0] or b.mask(np.zeros(1, dtype=complex))[0])

    def oracle(z, tol):
        shape = np.shape(z)
        z = np.asarray(z, dtype=complex).ravel()
        tol = np.asarray(tol, dtype=float).ravel()
        hit = np.zeros(z.shape, dtype=bool)
        if zero_in:
            hit |= np.abs(z) <= tol + resolution
        for net, other in passes:
            for start in range(0, net.size, 256):
                todo = ~hit
                if not todo.any():
                    return hit.reshape(shape)
                blk = net[start:start + 256]
                q = z[todo][:, None] / blk[None, :]
                t = (tol[todo] + resolution)[:, None] / np.abs(blk)[None, :]
                ok = other.mask(q, t).any(axis=1)
                hit[np.flatnonzero(todo)[ok]] = True
        return hit.reshape(shape)

    def net(step, window):
        na = a.boundary_net(step / (2 * sup_b))
        nb = b.boundary_net(step / (2 * sup_a))
        for start in range(0, na.size, 256):
            yield (na[start:start + 256, None] * nb[None, :]).ravel()

    lo = 0.0 if zero_in else _bounds(a)[0] * _bounds(b)[0]
    return SampledRegion(oracle, lo, sup_a * sup_b, False, resolution, net, cert, "minkowski_product")


# ---------------------------------------------------------------------------
# text serialization
# ---------------------------------------------------------------------------

def to_text(region: Region) -> str:
    """Line-oriented prefix form, one primitive or combinator per line."""
    return "\n".join(_emit(region))


def _f(x: float) -> str:
    return repr(float(x))


def _emit(r: Region) -> list:
    if isinstance(r, Disk):
        return [f"DISK {_f(r.center)} {_f(r.radius)}"]
    if isinstance(r, DiskExterior):
        return [f"DISK_EXTERIOR {_f(r.center)} {_f(r.radius)}"]
    if isinstance(r, HalfPlaneGE):
        return [f"HALFPLANE_GE {_f(r.a)}"]
    if isinstance(r, HalfPlaneLE):
        return [f"HALFPLANE_LE {_f(r.a)}"]
    if isinstance(r, Cardioid):
        return [f"CARDIOID {_f(r.origin)} {_f(r.scale)} {r.orientation}"]
    if isinstance(r, Points):
        toks = []
        for v in r.values:
            toks += [_f(v.real), _f(v.imag)]
        if r.with_infinity:
            toks.append("inf")
        return [" ".join(["POINTS"] + toks)]
    if isinstance(r, EmptyRegion):
        return ["EMPTY"]
    if isinstance(r, FullRegion):
        return ["FULL"]
    if isinstance(r, (Union, Intersection)):
        head = "UNION" if isinstance(r, Union) else "INTERSECT"
        if len(r.parts) != 2:
            head += f" {len(r.parts)}"
        out = [head]
        for p in r.parts:
            out += _emit(p)
        return out
    if isinstance(r, AffineReal):
        return [f"AFFINE {_f(r.alpha)} {_f(r.beta)}"] + _emit(r.child)
    if isinstance(r, Invert):
        return ["INVERT"] + _emit(r.child)
    raise TypeError(f"cannot serialize {type(r).__name__}")


class RegionParseError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def from_text(text: str) -> Region:
    """Parse the prefix form; ``" / "`` is accepted as a line separator."""
    lines = [ln.strip() for ln in text.replace(" / ", "\n").splitlines()]
    lines = [(i + 1, ln) for i, ln in enumerate(lines) if ln and not ln.startswith("#")]
    pos = 0

    def nums(lineno, toks, n):
        if len(toks) != n:
            raise RegionParseError(lineno, f"expected {n} numbers, got {len(toks)}")
        try:
            return [float(t) for t in toks]
        except ValueError as exc:
            raise RegionParseError(lineno, str(exc)) from None

    def parse():
        nonlocal pos
        if pos >= len(lines):
            raise RegionParseError(lines[-1][0] if lines else 1, "unexpected end of input")
        lineno, line = lines[pos]
        pos += 1
        head, *toks = line.split()
        head = head.upper()
        try:
            if head == "DISK":
                return Disk(*nums(lineno, toks, 2))
            if head == "DISK_EXTERIOR":
                return DiskExterior(*nums(lineno, toks, 2))
            if head == "HALFPLANE_GE":
                return HalfPlaneGE(*nums(lineno, toks, 1))
            if head == "HALFPLANE_LE":
                return HalfPlaneLE(*nums(lineno, toks, 1))
            if head == "CARDIOID":
                o, s, k = nums(lineno, toks, 3)
                return Cardioid(o, s, int(k))
            if head == "POINTS":
                inf = "inf" in [t.lower() for t in toks]
                vals = nums(lineno, [t for t in toks if t.lower() != "inf"],
                            len([t for t in toks if t.lower() != "inf"]))
                if len(vals) % 2:
                    raise RegionParseError(lineno, "POINTS needs re/im pairs")
                return Points([complex(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)], inf)
            if head == "EMPTY":
                return Empty
            if head == "FULL":
                return Full
            if head in ("UNION", "INTERSECT"):
                n = int(nums(lineno, toks, 1)[0]) if toks else 2
                parts = tuple(parse() for _ in range(n))
                return Union(parts) if head == "UNION" else Intersection(parts)
            if head == "AFFINE":
                al, be = nums(lineno, toks, 2)
                return AffineReal(parse(), al, be)
            if head == "INVERT":
                return Invert(parse())
        except RegionParseError:
            raise
        except ValueError as exc:
            raise RegionParseError(lineno, str(exc)) from None
        raise RegionParseError(lineno, f"unknown keyword {head!r}")

    region = parse()
    if pos != len(lines):
        raise RegionParseError(lines[pos][0], "trailing input")
    return region
