"""Fixed-point iterations, proximal oracles and worst-case instances.

The runners cover gradient descent, the forward step, the proximal point
method, Krasnosel'skii-Mann averaging and Douglas-Rachford splitting

    z+ = (1 - theta) z + theta (2 J_{aA} - I)(2 J_{aB} - I) z,

and record the distance to a fixed point at every step so that observed
per-step factors can be compared with predicted contraction factors.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .sampler import ConcreteOperator, DenseMatrix, MissingOracle, ProxFriendly, a_z


class IterMethod(str, enum.Enum):
    GD = "GD"
    FS = "FS"
    PP = "PP"
    KM = "KM"
    DRS = "DRS"


@dataclass
class IterationSpec:
    """What to iterate and for how long.

    ``operators`` holds one operator (two for DRS, ordered ``(A, B)``).  For
    GD and FS the operator is evaluated (a gradient or a monotone map); for
    PP and DRS its resolvent is used; for KM it is the nonexpansive map
    itself.
    """

    method: IterMethod
    operators: Sequence[ConcreteOperator]
    x0: np.ndarray
    alpha: float = 1.0
    theta: float = 0.5
    max_iters: int = 200
    stop_tol: float = 1e-12
    fixed_point: np.ndarray | None = None

    def __post_init__(self):
        self.method = IterMethod(self.method.upper() if isinstance(self.method, str) else self.method)
        self.x0 = np.asarray(self.x0, float)
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.method in (IterMethod.KM, IterMethod.DRS) and not 0 < self.theta <= 1:
            raise ValueError("theta must lie in (0, 1]")
        n_ops = 2 if self.method is IterMethod.DRS else 1
        if len(self.operators) != n_ops:
            raise ValueError(f"{self.method.value} needs {n_ops} operator(s)")
        if self.method is IterMethod.DRS:
            for op in self.operators:
                if not op.has_resolvent:
                    raise MissingOracle(f"DRS needs resolvents; {op.name} has none")


@dataclass
class Trajectory:
    iterates: list
    fixed_point: np.ndarray
    distances: list
    per_step_factors: list
    stop_tol: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "distance", "per_step_factor"])
        for k, d in enumerate(self.distances):
            f = self.per_step_factors[k] if k < len(self.per_step_factors) else None
            w.writerow([k, repr(float(d)), "" if f is None else repr(float(f))])
        return buf.getvalue()


def step_map(spec: IterationSpec):
    """The fixed-point map ``x -> T(x)`` of the spec."""
    a, th = spec.alpha, spec.theta
    ops = spec.operators
    m = spec.method
    if m in (IterMethod.GD, IterMethod.FS):
        op = ops[0]
        return lambda x: x - a * op(x)
    if m is IterMethod.PP:
        op = ops[0]
        return lambda x: op.resolvent(x, a)
    if m is IterMethod.KM:
        op = ops[0]
        return lambda x: (1 - th) * x + th * op(x)
    A, B = ops

    def drs(z):
        rb = 2 * B.resolvent(z, a) - z
        ra = 2 * A.resolvent(rb, a) - rb
        return (1 - th) * z + th * ra
    return drs


def _affine_fixed_point(T, dim: int, rng_seed: int = 0):
    """Fixed point of T when T is affine with I - T invertible, else None."""
    c = T(np.zeros(dim))
    cols = np.column_stack([T(e) - c for e in np.eye(dim)])
    x = np.random.default_rng(rng_seed).normal(size=dim)
    if not np.allclose(T(x), cols @ x + c, rtol=1e-10, atol=1e-10):
        return None
    try:
        return np.linalg.solve(np.eye(dim) - cols, c)
    except np.linalg.LinAlgError:
        return None


def run(spec: IterationSpec) -> Trajectory:
    """Iterate and record distances to the fixed point.

    The fixed point is the supplied one, the exact solution when the map is
    affine, or otherwise the end of a run ten times longer at a ten times
    tighter tolerance.
    """
    T = step_map(spec)
    xstar = spec.fixed_point
    if xstar is None:
        xstar = _affine_fixed_point(T, spec.x0.size)
    if xstar is None:
        x = spec.x0.copy()
        for _ in range(10 * spec.max_iters):
            nx = T(x)
            if np.linalg.norm(nx - x) < spec.stop_tol / 10:
                x = nx
                break
            x = nx
        xstar = x
    xstar = np.asarray(xstar, float)
    x = spec.x0.copy()
    iterates = [x]
    dists = [float(np.linalg.norm(x - xstar))]
    for _ in range(spec.max_iters):
        if dists[-1] <= spec.stop_tol:
            break
        x = T(x)
        iterates.append(x)
        dists.append(float(np.linalg.norm(x - xstar)))
    factors = [dists[k + 1] / dists[k] for k in range(len(dists) - 1) if dists[k] > spec.stop_tol]
    return Trajectory(iterates, xstar, dists, factors, spec.stop_tol)


def rate_verify(traj: Trajectory, predicted_R: float, slack: float = 1e-9) -> bool:
    """True iff ``d_k <= R^k d_0 (1 + slack)`` until the stopping tolerance is reached."""
    if not 0 < predicted_R <= 1:
        raise ValueError("predicted_R must lie in (0, 1]")
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    d0 = traj.distances[0]
    for k, d in enumerate(traj.distances):
        if d <= traj.stop_tol:
            break
        if d > predicted_R ** k * d0 * (1 + slack):
            return False
    return True


def drs_zero(spec: IterationSpec, z: np.ndarray) -> np.ndarray:
    """``J_{aB}(z)``: a zero of A + B when z is a DRS fixed point."""
    return spec.operators[1].resolvent(z, spec.alpha)


# ---------------------------------------------------------------------------
# worst case
# ---------------------------------------------------------------------------

def worst_case_point(alpha: float, mu: float, beta: float) -> complex:
    """Extreme point of the reflected-resolvent region of M_mu ∩ C_beta."""
    if not (alpha > 0 and mu > 0 and beta > 0 and mu < 1 / beta):
        raise ValueError("worst case needs alpha > 0 and 0 < mu < 1/beta")
    d = 1 + 2 * alpha * mu + alpha ** 2 * mu / beta
    return complex((1 - alpha ** 2 * mu / beta) / d, 2 * alpha * math.sqrt((1 - mu * beta) * mu / beta) / d)


def _from_reflection(m: np.ndarray, alpha: float) -> np.ndarray:
    """Operator whose reflected resolvent with step alpha is the matrix m."""
    half = 0.5 * (np.eye(m.shape[0]) + m)
    if abs(np.linalg.det(half)) < 1e-14:
        raise np.linalg.LinAlgError("I + M is singular")
    return (np.linalg.inv(half) - np.eye(m.shape[0])) / alpha


def worst_case_drs(alpha: float, mu: float, beta: float):
    """Operators A in M_mu ∩ C_beta and B monotone on which DRS attains its bound.

    A is built so that ``2 J_{aA} - I`` is multiplication by the extreme
    point z.  B is the skew operator whose reflected resolvent rotates by
    ``-arg z``, so the reflections compose to the real scalar ``|z|`` and
    the averaged map contracts by exactly ``(1 + |z|)/2`` each step.
    """
    z = worst_case_point(alpha, mu, beta)
    A = DenseMatrix(_from_reflection(a_z(z).matrix, alpha), name="worst_case_A")
    rot = a_z(np.exp(-1j * np.angle(z))).matrix
    B = DenseMatrix(_from_reflection(rot, alpha), name="worst_case_B")
    return A, B


# ---------------------------------------------------------------------------
# prox oracles
# ---------------------------------------------------------------------------

def quadratic(Q, b=None) -> ProxFriendly:
    """Gradient of ``f(x) = x'Qx/2 + b'x`` for symmetric positive semidefinite Q."""
    Q = np.atleast_2d(np.asarray(Q, float))
    n = Q.shape[0]
    b = np.zeros(n) if b is None else np.asarray(b, float)
    if Q.shape != (n, n) or not np.allclose(Q, Q.T):
        raise ValueError("Q must be square and symmetric")
    if np.linalg.eigvalsh(Q).min() < -1e-12:
        raise ValueError("Q must be positive semidefinite for a convex quadratic")

    def prox(x, alpha):
        return np.linalg.solve(np.eye(n) + alpha * Q, x - alpha * b)

    return ProxFriendly(prox, n, name="quadratic", grad=lambda x: Q @ x + b)


def soft_threshold(lam: float, dim: int = 1) -> ProxFriendly:
    """Subdifferential of ``lam * ||x||_1``; the prox shrinks each entry by ``alpha * lam``."""
    if lam < 0:
        raise ValueError("lam must be nonnegative")

    def prox(x, alpha):
        return np.sign(x) * np.maximum(np.abs(x) - alpha * lam, 0.0)

    return ProxFriendly(prox, dim, name=f"soft_threshold({lam:g})")


def linear_monotone(matrix) -> DenseMatrix:
    m = np.asarray(matrix, float)
    if np.linalg.eigvalsh((m + m.T) / 2).min() < -1e-12:
        raise ValueError("matrix is not monotone (its symmetric part is indefinite)")
    return DenseMatrix(m, name="linear_monotone")


def zero(dim: int = 1) -> ProxFriendly:
    return ProxFriendly(lambda x, alpha: np.array(x, float), dim, name="zero",
                        grad=lambda x: np.zeros_like(x))


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

def parse_config(text: str) -> dict:
    """Read ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out
