"""Contraction factors of fixed-point methods and their numeric tightness.

Each method's closed-form factor is compared against the supremum modulus
of the region obtained by pushing the class SRGs through the method's
transformations.  When the two agree the factor is tight: the region
touches the bounding circle.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import asdict, dataclass, fields

import numpy as np
from scipy.spatial import cKDTree

from . import classes as cl
from . import region as rg
from .region import Certificate, Region


class Method(str, enum.Enum):
    GD_grad = "GD_grad"
    FS_mono_lip = "FS_mono_lip"
    FS_mono_coco = "FS_mono_coco"
    PP_strong = "PP_strong"
    DRS_refl_sm_coco = "DRS_refl_sm_coco"
    DRS_refl_cvx = "DRS_refl_cvx"
    DRS_overall = "DRS_overall"
    MS_DRS = "MS_DRS"

    @classmethod
    def parse(cls, name: str) -> "Method":
        key = name.strip().lower().replace("-", "_")
        aliases = {"gd": cls.GD_grad, "pp": cls.PP_strong, "drs": cls.DRS_overall, "ms": cls.MS_DRS}
        if key in aliases:
            return aliases[key]
        for m in cls:
            if m.value.lower() == key:
                return m
        raise ValueError(f"unknown method {name!r}; choose from {[m.value for m in cls]}")


class ParameterDomainError(ValueError):
    pass


@dataclass(frozen=True)
class MethodSpec:
    """A method and its parameters; unused parameters stay ``None``.

    For ``DRS_overall`` the component factors ``R1`` and ``R2`` may be given
    directly.  Otherwise ``R1`` is the reflected-resolvent factor of a
    strongly monotone, cocoercive operator (needs alpha, mu, beta) and
    ``R2 = 1`` for a monotone one.
    """

    method: Method
    alpha: float | None = None
    mu: float | None = None
    L: float | None = None
    beta: float | None = None
    gamma: float | None = None
    theta: float | None = None
    R1: float | None = None
    R2: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "method", Method.parse(self.method) if isinstance(self.method, str)
                           and not isinstance(self.method, Method) else self.method)
        _validate(self)


def _need(spec, *names):
    for n in names:
        v = getattr(spec, n)
        if v is None:
            raise ParameterDomainError(f"{spec.method.value} needs {n}")
        if not (v > 0 and math.isfinite(v)):
            raise ParameterDomainError(f"{n} must be positive and finite, got {v}")


def _validate(s: MethodSpec):
    m = s.method
    if m is Method.GD_grad:
        _need(s, "alpha", "mu", "L")
        if not s.mu < s.L:
            raise ParameterDomainError("GD_grad needs mu < L")
    elif m is Method.FS_mono_lip:
        _need(s, "alpha", "mu", "L")
        if s.mu > s.L:
            raise ParameterDomainError("FS_mono_lip needs mu <= L (otherwise the class is empty)")
    elif m is Method.FS_mono_coco:
        _need(s, "alpha", "mu", "beta")
        if not s.mu < 1 / s.beta:
            raise ParameterDomainError("FS_mono_coco needs mu < 1/beta")
        if not s.alpha < 2 * s.beta:
            raise ParameterDomainError("FS_mono_coco needs alpha < 2*beta")
    elif m is Method.PP_strong:
        _need(s, "alpha", "mu")
    elif m is Method.DRS_refl_sm_coco:
        _need(s, "alpha", "mu", "beta")
        if not s.mu < 1 / s.beta:
            raise ParameterDomainError("DRS_refl_sm_coco needs mu < 1/beta")
    elif m is Method.DRS_refl_cvx:
        _need(s, "alpha", "mu", "L")
        if not s.mu < s.L:
            raise ParameterDomainError("DRS_refl_cvx needs mu < L")
    elif m is Method.DRS_overall:
        if s.theta is None or not 0 < s.theta <= 1:
            raise ParameterDomainError("DRS_overall needs theta in (0, 1]")
        if s.R1 is None:
            _need(s, "alpha", "mu", "beta")
            if not s.mu < 1 / s.beta:
                raise ParameterDomainError("DRS_overall needs mu < 1/beta")
        else:
            for n in ("R1", "R2"):
                v = getattr(s, n)
                if v is None or not 0 <= v <= 1:
                    raise ParameterDomainError(f"{n} must lie in [0, 1]")
    elif m is Method.MS_DRS:
        _need(s, "alpha", "L", "gamma")
        if s.theta is None or not 0 < s.theta < 1:
            raise ParameterDomainError("MS_DRS needs theta in (0, 1)")


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def ms_drs_rate(gamma: float, L: float, alpha: float, theta: float) -> float:
    """DRS factor for A monotone and inverse Lipschitz, B monotone and Lipschitz.

    Equals 1 (no contraction) when ``1/gamma <= L``.
    """
    for n, v in (("gamma", gamma), ("L", L), ("alpha", alpha)):
        if not v > 0:
            raise ParameterDomainError(f"{n} must be positive")
    if not 0 < theta < 1:
        raise ParameterDomainError("theta must lie in (0, 1)")
    if 1 / gamma <= L:
        return 1.0
    num = 4 * theta * (1 - theta) * (1 - gamma * L) ** 2
    den = (1 + gamma ** 2 / alpha ** 2) * (1 + alpha ** 2 * L ** 2)
    return math.sqrt(1 - num / den)


def _refl_sm_coco(alpha, mu, beta):
    return math.sqrt(1 - 4 * alpha * mu / (1 + 2 * alpha * mu + alpha ** 2 * mu / beta))


def closed_form_rate(spec: MethodSpec) -> float:
    a, mu, L, beta = spec.alpha, spec.mu, spec.L, spec.beta
    m = spec.method
    if m is Method.GD_grad:
        return max(abs(1 - a * mu), abs(1 - a * L))
    if m is Method.FS_mono_lip:
        return math.sqrt(1 - 2 * a * mu + a * a * L * L)
    if m is Method.FS_mono_coco:
        return math.sqrt(1 - 2 * a * mu + a * a * mu / beta)
    if m is Method.PP_strong:
        return 1 / (1 + a * mu)
    if m is Method.DRS_refl_sm_coco:
        return _refl_sm_coco(a, mu, beta)
    if m is Method.DRS_refl_cvx:
        return max(abs(1 - a * mu) / (1 + a * mu), abs(1 - a * L) / (1 + a * L))
    if m is Method.DRS_overall:
        r1, r2 = _drs_components(spec)
        return (1 - spec.theta) + spec.theta * r1 * r2
    if m is Method.MS_DRS:
        return ms_drs_rate(spec.gamma, L, a, spec.theta)
    raise ValueError(m)


def _drs_components(spec):
    if spec.R1 is not None:
        return spec.R1, spec.R2
    return _refl_sm_coco(spec.alpha, spec.mu, spec.beta), 1.0


def fs_lip_contraction_range(mu: float, L: float) -> tuple:
    """Step sizes for which the forward step on M_mu ∩ L_L contracts: (0, 2 mu / L^2)."""
    return 0.0, 2 * mu / L ** 2


def gd_averagedness(alpha: float, L: float) -> float:
    """Averagedness of ``I - alpha grad f`` for L-smooth convex f: theta = alpha L / 2."""
    return alpha * L / 2


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------

def method_region(spec: MethodSpec, resolution: float = rg.DEFAULT_RESOLUTION):
    """Region of the method's fixed-point map and its certificate."""
    m = spec.method
    a = spec.alpha
    forward = [cl.Scale(-a), cl.Shift(1.0)] if a is not None else []
    if m is Method.GD_grad:
        d = cl.derive(cl.subdifferential(spec.mu, spec.L), forward)
    elif m is Method.FS_mono_lip:
        d = cl.derive(cl.strongly_monotone(spec.mu), [cl.Intersect(cl.lipschitz(spec.L))] + forward)
    elif m is Method.FS_mono_coco:
        d = cl.derive(cl.strongly_monotone(spec.mu), [cl.Intersect(cl.cocoercive(spec.beta))] + forward)
    elif m is Method.PP_strong:
        d = cl.derive(cl.strongly_monotone(spec.mu), cl.resolvent(a))
    elif m is Method.DRS_refl_sm_coco:
        d = cl.derive(cl.strongly_monotone(spec.mu),
                      [cl.Intersect(cl.cocoercive(spec.beta))] + cl.reflected_resolvent(a))
    elif m is Method.DRS_refl_cvx:
        d = cl.derive(cl.subdifferential(spec.mu, spec.L), cl.reflected_resolvent(a))
    elif m is Method.DRS_overall:
        if spec.R1 is not None:
            first, second = rg.Disk(0.0, spec.R1), rg.Disk(0.0, spec.R2)
            cert = Certificate.EQUAL
        else:
            first = method_region(MethodSpec(Method.DRS_refl_sm_coco, alpha=a, mu=spec.mu, beta=spec.beta))[0]
            d2 = cl.derive(cl.monotone(), cl.reflected_resolvent(a))
            second, cert = d2.region, d2.certificate
        prod = rg.minkowski_product(first, second, arc_ok=True, resolution=resolution)
        return rg.affine(prod.region, spec.theta, 1 - spec.theta), cert & prod.certificate
    elif m is Method.MS_DRS:
        return ms_region(spec.gamma, spec.L, a, spec.theta, resolution)
    else:
        raise ValueError(m)
    return d.region, d.certificate


def ms_region(gamma, L, alpha, theta, resolution=rg.DEFAULT_RESOLUTION):
    """Region of the DRS map for A in M ∩ L_gamma^{-1} and B in M ∩ L_L."""
    ra = cl.derive(cl.monotone(), [cl.Intersect(cl.inverse_lipschitz(gamma))] + cl.reflected_resolvent(alpha))
    rb = cl.derive(cl.monotone(), [cl.Intersect(cl.lipschitz(L))] + cl.reflected_resolvent(alpha))
    arc = any(cl.verify_arc(r.region, side, 32) for r in (ra, rb) for side in ("left", "right"))
    prod = rg.minkowski_product(ra.region, rb.region, arc_ok=arc, resolution=resolution)
    cert = ra.certificate & rb.certificate & prod.certificate
    return rg.affine(prod.region, theta, 1 - theta), cert


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

REPORT_COLUMNS = ["method", "alpha", "mu", "L", "beta", "gamma", "theta",
                  "closed_form", "numeric", "gap", "tight"]


@dataclass(frozen=True)
class RateReport:
    spec: MethodSpec
    closed_form: float
    numeric: float
    abs_gap: float
    tolerance: float
    certificate: Certificate = Certificate.EQUAL

    @property
    def tight(self) -> bool:
        return self.abs_gap <= self.tolerance

    @property
    def contractive(self) -> bool:
        return self.closed_form < 1

    def row(self) -> list:
        s = self.spec
        def f(v):
            return "" if v is None else repr(float(v))
        return [s.method.value, f(s.alpha), f(s.mu), f(s.L), f(s.beta), f(s.gamma), f(s.theta),
                f(self.closed_form), f(self.numeric), f(self.abs_gap), str(self.tight).lower()]


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def tightness_check(spec: MethodSpec, tol: float = rg.DEFAULT_RESOLUTION,
                    resolution: float = rg.DEFAULT_RESOLUTION) -> RateReport:
    """Compare the closed-form factor with the numeric supremum modulus of the method's region."""
    if spec.method is Method.MS_DRS:
        return ms_region_check(spec.gamma, spec.L, spec.alpha, spec.theta, tol, resolution)
    if not tol > 0:
        raise ValueError("tol must be positive")
    region, cert = method_region(spec, resolution)
    numeric = rg.sup_modulus(region, tol / 4)
    closed = closed_form_rate(spec)
    return RateReport(spec, closed, numeric, abs(numeric - closed), tol, cert)


def ms_region_check(gamma, L, alpha, theta, tol=rg.DEFAULT_RESOLUTION,
                    resolution=rg.DEFAULT_RESOLUTION) -> RateReport:
    """Numeric check of the metric-subregularity DRS factor.

    When ``1/gamma <= L`` the region must reach the unit circle; the
    numeric value is then the largest modulus found.
    """
    spec = MethodSpec(Method.MS_DRS, alpha=alpha, L=L, gamma=gamma, theta=theta)
    region, cert = ms_region(gamma, L, alpha, theta, resolution)
    numeric = rg.sup_modulus(region, tol / 4)
    closed = ms_drs_rate(gamma, L, alpha, theta)
    return RateReport(spec, closed, numeric, abs(numeric - closed), tol, cert)


# ---------------------------------------------------------------------------
# averagedness and the cardioid
# ---------------------------------------------------------------------------

def averagedness_factor(region: Region, tol: float = 1e-6):
    """Smallest theta in (0, 1] with the region inside Disk(1 - theta, theta), or None."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    # containment near a tangency fails only to second order, so the slack must be tiny
    inner = 1e-14

    def fits(theta):
        return rg.subset_of_disk(region, 1 - theta, theta, inner)

    if not fits(1.0):
        return None
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if mid > 0 and fits(mid):
            hi = mid
        else:
            lo = mid
    return hi


def cardioid_region() -> rg.Cardioid:
    """``{r e^{i phi} : r <= cos^2(phi/2)}``: the SRG of compositions of two firmly nonexpansive maps."""
    return rg.Cardioid(0.0, 1.0, 1)


@dataclass(frozen=True)
class CardioidReport:
    hausdorff: float
    inside_disk: bool
    witness_outside: bool
    strict_grid_points: int
    resolution: float

    @property
    def passed(self) -> bool:
        return self.hausdorff <= 2 * self.resolution and self.inside_disk and self.witness_outside


def _sampled_distance(region: Region, pts: np.ndarray, cap: float, steps: int = 12) -> np.ndarray:
    """Smallest extra slack t in [0, cap] for which the oracle accepts each point."""
    out = np.zeros(pts.shape)
    todo = ~region.mask(pts, 0.0)
    q = pts[todo]
    if q.size:
        lo = np.zeros(q.shape)
        hi = np.full(q.shape, cap)
        for _ in range(steps):
            mid = (lo + hi) / 2
            ok = region.mask(q, mid)
            hi = np.where(ok, mid, hi)
            lo = np.where(ok, lo, mid)
        hi[~region.mask(q, cap)] = np.inf
        out[todo] = hi
    return out


def cardioid_check(resolution: float = rg.DEFAULT_RESOLUTION, grid: int = 160) -> CardioidReport:
    """Compare the sampled product of two firmly nonexpansive SRGs with the cardioid."""
    card = cardioid_region()
    fne = rg.Disk(0.5, 0.5)
    prod = rg.minkowski_product(fne, fne, arc_ok=True, resolution=resolution).region
    # product -> cardioid: net points of the product outside the cardioid
    curve = card.boundary_net(resolution / 4)
    tree = cKDTree(np.column_stack([curve.real, curve.imag]))
    net = prod.boundary_net(4 * resolution)
    outside = net[~card.mask(net, 0.0)]
    d1 = float(tree.query(np.column_stack([outside.real, outside.imag]))[0].max()) if outside.size else 0.0
    # cardioid -> product: boundary points of the cardioid accepted by the oracle
    probe = card.boundary_net(resolution)
    d2 = float((resolution + _sampled_distance(prod, probe, 4 * resolution)).max())
    # grid disagreements must hug the cardioid boundary
    xs = np.linspace(-0.4, 1.05, grid)
    ys = np.linspace(-0.75, 0.75, grid)
    g = (xs[:, None] + 1j * ys[None, :]).ravel()
    diff = g[prod.mask(g, 0.0) != card.mask(g, 0.0)]
    d3 = float(tree.query(np.column_stack([diff.real, diff.imag]))[0].max()) if diff.size else 0.0
    inside = rg.subset_of_disk(card, 1 / 3, 2 / 3, 1e-9)
    witness = rg.contains(rg.Disk(1 / 3, 2 / 3), -1 / 3) and not rg.contains(card, -1 / 3)
    disk_pts = g[rg.Disk(1 / 3, 2 / 3).mask(g, 0.0) & ~card.mask(g, 1e-9)]
    return CardioidReport(max(d1, d2, d3), inside, witness, int(disk_pts.size), resolution)


# ---------------------------------------------------------------------------
# circle number
# ---------------------------------------------------------------------------

class UnsupportedForm(ValueError):
    pass


def circle_number_upper(region: Region) -> int:
    """Number of disks, disk exteriors and half-planes in the simplified intersection form."""
    r = rg.simplify(region)
    if isinstance(r, rg.FullRegion):
        return 0
    if isinstance(r, rg.GENERALIZED_CIRCLES):
        return 1
    if isinstance(r, rg.Intersection) and all(isinstance(p, rg.GENERALIZED_CIRCLES) for p in r.parts):
        return len(r.parts)
    raise UnsupportedForm(f"not a finite intersection of disks and half-planes: {type(r).__name__}")


def default_transforms():
    return [cl.Scale(2.5), cl.Scale(-0.5), cl.PreScale(3.0), cl.PreScale(-1.5), cl.AddIdentity(), cl.Inverse()]


def circle_number_invariance(cls, transforms=None) -> bool:
    """Check that each single transform leaves the circle-number bound unchanged."""
    region = cls.srg if isinstance(cls, cl.OperatorClass) else cls
    base = circle_number_upper(region)
    for t in transforms or default_transforms():
        if isinstance(cls, cl.OperatorClass):
            img = cl.derive(cls, [t]).region
        else:
            img = _apply_region_step(region, t)
        if circle_number_upper(img) != base:
            return False
    return True


def _apply_region_step(region, t):
    if isinstance(t, (cl.Scale, cl.PreScale)):
        return rg.affine(region, t.alpha, 0.0)
    if isinstance(t, cl.Shift):
        return rg.affine(region, 1.0, t.beta)
    if isinstance(t, cl.Inverse):
        return rg.invert(region)
    raise TypeError(t)


# ---------------------------------------------------------------------------
# parameter sweeps
# ---------------------------------------------------------------------------

def random_spec(method: Method, rng: np.random.Generator) -> MethodSpec:
    """Draw one parameter point from the method's valid domain."""
    u = rng.uniform
    m = Method.parse(method) if isinstance(method, str) else method
    if m is Method.GD_grad:
        mu = u(0.05, 2.0)
        return MethodSpec(m, alpha=u(0.01, 2.0) / mu, mu=mu, L=mu * u(1.05, 10.0))
    if m is Method.FS_mono_lip:
        mu = u(0.05, 2.0)
        L = mu * u(1.0, 5.0)
        return MethodSpec(m, alpha=u(0.01, 2.5) * mu / L ** 2, mu=mu, L=L)
    if m is Method.FS_mono_coco:
        beta = u(0.1, 3.0)
        return MethodSpec(m, alpha=u(0.02, 1.98) * beta, mu=u(0.02, 0.98) / beta, beta=beta)
    if m is Method.PP_strong:
        return MethodSpec(m, alpha=u(0.05, 5.0), mu=u(0.05, 5.0))
    if m is Method.DRS_refl_sm_coco:
        beta = u(0.1, 3.0)
        return MethodSpec(m, alpha=u(0.05, 5.0), mu=u(0.02, 0.98) / beta, beta=beta)
    if m is Method.DRS_refl_cvx:
        mu = u(0.05, 2.0)
        return MethodSpec(m, alpha=u(0.05, 5.0), mu=mu, L=mu * u(1.05, 10.0))
    if m is Method.DRS_overall:
        beta = u(0.1, 3.0)
        return MethodSpec(m, alpha=u(0.05, 5.0), mu=u(0.02, 0.98) / beta, beta=beta, theta=u(0.05, 1.0))
    if m is Method.MS_DRS:
        gamma = u(0.2, 3.0)
        return MethodSpec(m, alpha=u(0.2, 5.0), L=u(0.05, 1.0) / gamma, gamma=gamma, theta=u(0.05, 0.95))
    raise ValueError(m)


def sweep(method, draws: int, seed: int = 0, tol: float = 2e-3) -> list:
    rng = np.random.default_rng(seed)
    return [tightness_check(random_spec(method, rng), tol) for _ in range(draws)]
