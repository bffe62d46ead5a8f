"""Small numerical helpers: finite-difference steps and predicate bisection."""

from __future__ import annotations

import numpy as np

EPS = np.finfo(float).eps
FD_SCALE = EPS ** (1.0 / 3.0)


def fd_step(x):
    """Central-difference step ``eps**(1/3) * max(1, |x|)`` per row of ``x``."""
    x = np.asarray(x, dtype=float)
    return FD_SCALE * np.maximum(1.0, np.linalg.norm(x, axis=-1))


def central_gradient(f, x):
    """Central finite-difference gradient of a row-vectorized scalar map.

    ``f`` maps an array of shape (..., N) to shape (...); the result has the
    shape of ``x``.
    """
    x = np.asarray(x, dtype=float)
    h = fd_step(x)[..., None]
    out = np.empty_like(x)
    for j in range(x.shape[-1]):
        e = np.zeros(x.shape[-1])
        e[j] = 1.0
        out[..., j] = (f(x + h * e) - f(x - h * e)) / (2.0 * h[..., 0])
    return out


def bisect_predicate(pred, lo, hi, rel_width=1e-12, max_iter=200):
    """Shrink ``[lo, hi]`` around the switch point of a monotone predicate.

    ``pred(lo)`` is False and ``pred(hi)`` is True on entry. Returns the
    final ``(lo, hi, iterations)``; ``hi`` always satisfies the predicate.
    """
    it = 0
    while hi - lo > rel_width * hi and it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pred(mid):
            hi = mid
        else:
            lo = mid
        it += 1
    return lo, hi, it
