"""Empirical SRGs of concrete operators.

For an evaluation pair ``(x, u)``, ``(y, v)`` the SRG point is

    z = (||u - v|| / ||x - y||) * exp(±i angle(u - v, x - y)),

which has ``Re z = <u - v, x - y> / ||x - y||^2`` and
``|Im z| = ||P(u - v)|| / ||x - y||`` with ``P`` the projection onto the
orthogonal complement of ``x - y``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .linalg import eigvals
from .region import INF, Region, XComplex

MIN_SEPARATION = 1e-9


class MissingOracle(RuntimeError):
    """The operator does not provide the evaluation a method needs."""


class DomainError(ValueError):
    pass


# ---------------------------------------------------------------------------
# concrete operators
# ---------------------------------------------------------------------------

class ConcreteOperator:
    """An operator on R^n that can be evaluated, inverted-plus-identity, or both."""

    dim: int
    name: str = "operator"

    def __call__(self, x: np.ndarray) -> np.ndarray:
        raise MissingOracle(f"{self.name} has no evaluation oracle")

    def resolvent(self, x: np.ndarray, alpha: float) -> np.ndarray:
        """``(I + alpha A)^{-1} x``."""
        raise MissingOracle(f"{self.name} has no resolvent oracle")

    @property
    def has_evaluation(self) -> bool:
        return type(self).__call__ is not ConcreteOperator.__call__

    @property
    def has_resolvent(self) -> bool:
        return type(self).resolvent is not ConcreteOperator.resolvent


class DenseMatrix(ConcreteOperator):
    def __init__(self, matrix, name: str = "matrix"):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("DenseMatrix must be square")
        self.matrix = m
        self.dim = m.shape[0]
        self.name = name

    def __call__(self, x):
        return self.matrix @ np.asarray(x, float)

    def resolvent(self, x, alpha):
        sys_ = np.eye(self.dim) + alpha * self.matrix
        try:
            return np.linalg.solve(sys_, np.asarray(x, float))
        except np.linalg.LinAlgError:
            raise np.linalg.LinAlgError(f"I + {alpha} A is singular for {self.name}") from None

    def __repr__(self):
        return f"DenseMatrix({self.matrix.tolist()})"


class BlackBox(ConcreteOperator):
    """A single-valued map ``R^n -> R^n`` with an optional domain sampler.

    ``domain(rng, n)`` returns an ``(n, dim)`` array of admissible inputs; by
    default inputs are standard normal.
    """

    def __init__(self, fn: Callable, dim: int, domain: Callable | None = None,
                 name: str = "blackbox", resolvent_fn: Callable | None = None):
        self.fn = fn
        self.dim = int(dim)
        self.domain = domain
        self.name = name
        self._resolvent = resolvent_fn

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x, float)), float)

    def resolvent(self, x, alpha):
        if self._resolvent is None:
            raise MissingOracle(f"{self.name} has no resolvent oracle")
        return np.asarray(self._resolvent(np.asarray(x, float), alpha), float)

    @property
    def has_resolvent(self) -> bool:
        return self._resolvent is not None


class ProxFriendly(ConcreteOperator):
    """Subdifferential of a function known through its proximal map.

    ``prox(x, alpha)`` returns the resolvent ``(I + alpha ∂f)^{-1} x``.  The
    graph of ∂f is sampled through the identity ``(w - p)/alpha ∈ ∂f(p)``
    with ``p = prox(w, alpha)``.
    """

    def __init__(self, prox: Callable, dim: int, name: str = "prox", grad: Callable | None = None):
        self.prox = prox
        self.dim = int(dim)
        self.name = name
        self._grad = grad

    def __call__(self, x):
        if self._grad is None:
            raise MissingOracle(f"{self.name} has no evaluation oracle")
        return np.asarray(self._grad(np.asarray(x, float)), float)

    def resolvent(self, x, alpha):
        return np.asarray(self.prox(np.asarray(x, float), alpha), float)

    def graph_point(self, w, alpha=1.0):
        p = self.resolvent(w, alpha)
        return p, (np.asarray(w, float) - p) / alpha


class GraphSamples(ConcreteOperator):
    """An operator given only by samples ``(x_i, u_i)``; repeated x means multi-valued."""

    def __init__(self, xs, us, name: str = "graph"):
        xs = np.atleast_2d(np.asarray(xs, float))
        us = np.atleast_2d(np.asarray(us, float))
        if xs.shape != us.shape:
            raise ValueError("graph samples must share a dimension")
        self.xs, self.us = xs, us
        self.dim = xs.shape[1]
        self.name = name


# ---------------------------------------------------------------------------
# complex multiplication operators
# ---------------------------------------------------------------------------

def a_z(z) -> DenseMatrix:
    """2x2 real matrix acting as multiplication by the complex number z."""
    if isinstance(z, XComplex) and z.is_infinite:
        raise ValueError("a_z needs a finite z; use a_inf for infinity")
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("a_z needs a finite z; use a_inf for infinity")
    return DenseMatrix([[z.real, -z.imag], [z.imag, z.real]], name=f"a_z({z})")


def a_inf(samples: int = 8, seed: int = 0) -> GraphSamples:
    """Operator sending 0 to a set of vectors and undefined elsewhere."""
    rng = np.random.default_rng(seed)
    us = rng.normal(size=(samples, 2))
    return GraphSamples(np.zeros((samples, 2)), us, name="a_inf")


# ---------------------------------------------------------------------------
# angles and SRG points
# ---------------------------------------------------------------------------

def angle(a, b) -> float:
    """Angle between two vectors in [0, pi]; zero if either vector vanishes."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    # half-angle form; arccos of the cosine loses half the digits near 0 and pi
    ua, ub = a / na, b / nb
    return float(2.0 * np.arctan2(np.linalg.norm(ua - ub), np.linalg.norm(ua + ub)))


def srg_values(dx: np.ndarray, du: np.ndarray) -> np.ndarray:
    """Upper-half-plane SRG points for rows of input and output differences."""
    dx = np.atleast_2d(dx)
    du = np.atleast_2d(du)
    b = np.einsum("ij,ij->i", dx, dx)
    c = np.einsum("ij,ij->i", du, dx)
    re = c / b
    perp = du - (c / b)[:, None] * dx
    im = np.sqrt(np.einsum("ij,ij->i", perp, perp) / b)
    return re + 1j * im


@dataclass(frozen=True)
class SrgCloud:
    """Sampled SRG points of one operator (closed under conjugation)."""

    points: np.ndarray
    has_infinity: bool
    source: str
    pair_count: int
    seed: int

    def xcomplex(self) -> list:
        out = [XComplex.finite(z) for z in self.points]
        if self.has_infinity:
            out.append(INF)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re", "im", "is_infinity"])
        for z in self.points:
            w.writerow([repr(float(z.real)), repr(float(z.imag)), 0])
        if self.has_infinity:
            w.writerow(["", "", 1])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, source: str = "csv") -> "SrgCloud":
        rows = list(csv.DictReader(io.StringIO(text)))
        pts, inf = [], False
        for row in rows:
            if int(row["is_infinity"]):
                inf = True
            else:
                pts.append(complex(float(row["re"]), float(row["im"])))
        return cls(np.array(pts, dtype=complex), inf, source, len(pts) // 2, 0)


def _both_signs(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z, np.conj(z)])


def srg_points(op: ConcreteOperator, pairs: int = 1000, strategy: str = "gaussian", seed: int = 0,
               spread: float = 1.0, custom: Callable | None = None, alpha: float = 1.0) -> SrgCloud:
    """Sample the SRG of a concrete operator.

    Parameters
    ----------
    op : ConcreteOperator
    pairs : int
        Number of evaluation pairs.  For GraphSamples this caps the number
        of sample pairs used (all pairs when there are fewer).
    strategy : {"gaussian", "sphere", "custom"}
        ``gaussian`` draws both inputs from N(0, spread^2); ``sphere`` fixes
        y = 0 and draws x on the unit sphere (enough for linear maps);
        ``custom`` calls ``custom(rng, n)`` returning ``(X, Y)``.
    seed : int
    alpha : float
        Step used to turn prox evaluations into graph points for
        ProxFriendly operators.
    """
    if pairs < 1:
        raise ValueError("pairs must be at least 1")
    rng = np.random.default_rng(seed)
    if isinstance(op, GraphSamples):
        return _graph_cloud(op, pairs, rng, seed)

    xs, ys = _draw_inputs(op, pairs, strategy, rng, spread, custom)
    if isinstance(op, ProxFriendly):
        px = np.array([op.graph_point(w, alpha) for w in xs])
        py = np.array([op.graph_point(w, alpha) for w in ys])
        xs, us = px[:, 0], px[:, 1]
        ys, vs = py[:, 0], py[:, 1]
    else:
        us = np.array([op(x) for x in xs])
        vs = np.array([op(y) for y in ys])
    dx = xs - ys
    keep = np.linalg.norm(dx, axis=1) >= MIN_SEPARATION
    if not keep.any():
        raise ValueError("no usable pairs (all inputs coincide)")
    z = srg_values(dx[keep], (us - vs)[keep])
    return SrgCloud(_both_signs(z), False, getattr(op, "name", "operator"), int(keep.sum()), seed)


def _draw_inputs(op, pairs, strategy, rng, spread, custom):
    dim = op.dim
    if strategy == "custom":
        if custom is None:
            raise ValueError("custom strategy needs a sampler")
        xs, ys = custom(rng, pairs)
        return np.asarray(xs, float), np.asarray(ys, float)
    if strategy == "sphere":
        xs = rng.normal(size=(pairs, dim))
        xs /= np.linalg.norm(xs, axis=1, keepdims=True)
        return xs, np.zeros_like(xs)
    if strategy != "gaussian":
        raise ValueError(f"unknown strategy {strategy!r}")
    domain = getattr(op, "domain", None)
    if domain is not None:
        xs = np.asarray(domain(rng, pairs), float)
        ys = np.asarray(domain(rng, pairs), float)
    else:
        xs = spread * rng.normal(size=(pairs, dim))
        ys = spread * rng.normal(size=(pairs, dim))
    # resample the rare nearly coincident pairs
    for _ in range(10):
        close = np.linalg.norm(xs - ys, axis=1) < MIN_SEPARATION
        if not close.any():
            break
        ys[close] = spread * rng.normal(size=(int(close.sum()), dim))
    return xs, ys


def _graph_cloud(op: GraphSamples, pairs, rng, seed) -> SrgCloud:
    n = len(op.xs)
    ii, jj = np.triu_indices(n, 1)
    if ii.size > pairs:
        pick = np.sort(rng.choice(ii.size, size=pairs, replace=False))
        ii, jj = ii[pick], jj[pick]
    dx = op.xs[ii] - op.xs[jj]
    du = op.us[ii] - op.us[jj]
    sep = np.linalg.norm(dx, axis=1)
    same_x = sep < MIN_SEPARATION
    multi = bool(np.any(same_x & (np.linalg.norm(du, axis=1) > MIN_SEPARATION)))
    keep = ~same_x
    z = srg_values(dx[keep], du[keep]) if keep.any() else np.zeros(0, dtype=complex)
    if not keep.any() and not multi:
        raise ValueError("no usable pairs (all inputs coincide)")
    return SrgCloud(_both_signs(z), multi, op.name, int(ii.size), seed)


def cloud_in_region(cloud: SrgCloud, region: Region, tol: float = 1e-9) -> list:
    """Cloud points lying farther than ``tol`` outside the region."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    bad = []
    if cloud.points.size:
        out = ~region.mask(cloud.points, tol)
        bad = [XComplex.finite(z) for z in cloud.points[out]]
    if cloud.has_infinity and not region.has_infinity:
        bad.append(INF)
    return bad


# ---------------------------------------------------------------------------
# eigenvalues versus the SRG of a matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenReport:
    eigenvalues: np.ndarray
    distances: np.ndarray
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.all(self.distances <= self.tol))


def linear_srg_point(m: np.ndarray, w: np.ndarray) -> complex:
    """Upper SRG point ``||Mw|| exp(i angle(Mw, w))`` of a linear map for w != 0."""
    w = np.asarray(w, float)
    return complex(srg_values(w[None, :], (m @ w)[None, :])[0])


def eigen_containment(m, samples: int = 100_000, tol: float = 1e-2, seed: int = 0,
                      refine_starts: int = 5) -> EigenReport:
    """Check that every eigenvalue of ``m`` lies in its sampled SRG.

    Eigenvalues come from the in-repo QR iteration.  The SRG is sampled on
    ``samples`` random unit vectors; then, for each eigenvalue, a local
    descent over the sphere starting from the closest samples minimises the
    distance to the eigenvalue.
    """
    m = np.asarray(m.matrix if isinstance(m, DenseMatrix) else m, float)
    n = m.shape[0]
    if m.ndim != 2 or m.shape[1] != n:
        raise ValueError("eigen_containment needs a square matrix")
    if n == 2:
        raise DomainError("eigenvalue containment does not hold for 2x2 matrices")
    lams = eigvals(m)
    rng = np.random.default_rng(seed)
    ws = rng.normal(size=(samples, n))
    ws /= np.linalg.norm(ws, axis=1, keepdims=True)
    cloud = srg_values(ws, ws @ m.T)
    dists = []
    for lam in lams:
        target = complex(lam.real, abs(lam.imag))
        d = np.abs(cloud - target)
        best = float(d.min())
        # refine only when sampling alone is not comfortably within tol
        for idx in np.argsort(d)[:refine_starts] if n > 1 else []:
            if best <= tol / 10:
                break
            res = minimize(lambda w: _dist(m, w, target), ws[idx], method="Nelder-Mead",
                           options={"xatol": 1e-9, "fatol": 1e-10, "maxiter": 2000})
            best = min(best, float(res.fun))
        dists.append(best)
    return EigenReport(lams, np.array(dists), tol)


def _dist(m, w, target):
    nw = np.linalg.norm(w)
    if nw < 1e-12:
        return math.inf
    return abs(linear_srg_point(m, w / nw) - target)
