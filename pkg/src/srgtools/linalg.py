"""Eigenvalues of small dense matrices by Hessenberg reduction and shifted QR."""
from __future__ import annotations

import numpy as np


class QRNonConvergence(RuntimeError):
    pass


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Upper Hessenberg matrix similar to ``a`` (Householder reflections)."""
    h = np.array(a, dtype=complex)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
        h[k + 2:, k] = 0.0
    return h


def _givens(a: complex, b: complex):
    """Rotation ``G`` with ``G @ [a, b] = [r, 0]``."""
    r = np.hypot(abs(a), abs(b))
    if r == 0:
        return np.eye(2, dtype=complex)
    c = a / r
    s = b / r
    return np.array([[c.conjugate(), s.conjugate()], [-s, c]])


def _wilkinson(h: np.ndarray) -> complex:
    a, b, c, d = h[0, 0], h[0, 1], h[1, 0], h[1, 1]
    tr = a + d
    det = a * d - b * c
    disc = np.sqrt(tr * tr / 4 - det)
    l1, l2 = tr / 2 + disc, tr / 2 - disc
    return l1 if abs(l1 - d) < abs(l2 - d) else l2


def eigvals(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 10_000) -> np.ndarray:
    """All eigenvalues of a square matrix.

    Parameters
    ----------
    a : (n, n) array
    tol : float
        Deflation threshold on subdiagonal entries, relative to the
        neighbouring diagonal.
    max_sweeps : int
        Maximum number of QR steps before giving up.

    Returns
    -------
    (n,) complex array, in deflation order.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("eigvals needs a square matrix")
    n = a.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex)
    h = hessenberg(a)
    scale = max(np.abs(h).max(), np.finfo(float).tiny)
    out = []
    hi = n - 1
    sweeps = 0
    since_deflation = 0
    while hi >= 0:
        if hi == 0:
            out.append(h[0, 0])
            break
        lo = hi
        while lo > 0:
            sub = abs(h[lo, lo - 1])
            if sub <= tol * (abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])) or sub <= tol * 1e-3 * scale:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            out.append(h[hi, hi])
            hi -= 1
            since_deflation = 0
            continue
        sweeps += 1
        if sweeps > max_sweeps:
            raise QRNonConvergence(f"QR iteration did not converge in {max_sweeps} sweeps")
        since_deflation += 1
        blk = h[lo:hi + 1, lo:hi + 1]
        if since_deflation % 11 == 0:
            # exceptional shift to break cycles
            mu = blk[-1, -1] + abs(blk[-1, -2]) * (0.75 + 0.5j)
        else:
            mu = _wilkinson(blk[-2:, -2:])
        m = blk.shape[0]
        blk -= mu * np.eye(m)
        rots = []
        for k in range(m - 1):
            g = _givens(blk[k, k], blk[k + 1, k])
            blk[k:k + 2, k:] = g @ blk[k:k + 2, k:]
            rots.append(g)
        for k, g in enumerate(rots):
            blk[:min(k + 3, m), k:k + 2] = blk[:min(k + 3, m), k:k + 2] @ g.conj().T
        blk += mu * np.eye(m)
        h[lo:hi + 1, lo:hi + 1] = blk
    return np.array(out[::-1], dtype=complex)
