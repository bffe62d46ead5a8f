"""Orlicz-Sobolev norms of piecewise-linear grid functions and the
Poincaré, Sobolev-mean and L-infinity inequalities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .funcspace import (CellFunction, GridFunction, Interval, l1_embedding_constant,
                        luxemburg_norm, norm_from_modular, random_grid_function)
from .gfunc import GFunction
from .report import CheckReport, scaled_violation

__all__ = [
    "SobolevFunction", "w1_norm", "w1_alt_norm", "poincare_check",
    "sobolev_mean_check", "linf_bound_check", "estimate_linf_constant",
    "equivalence_check", "reconstruct", "random_sobolev_function",
    "linf_constant_bound",
]

BOUNDARY_KINDS = ("free", "zero_trace")


@dataclass(frozen=True, eq=False)
class SobolevFunction:
    """Nodal values plus the per-cell forward difference quotient."""

    base: GridFunction
    boundary: str = "free"

    def __post_init__(self):
        if self.boundary not in BOUNDARY_KINDS:
            raise ValueError(f"boundary must be one of {BOUNDARY_KINDS}, got {self.boundary!r}")
        if self.boundary == "zero_trace":
            v = self.base.values
            if np.any(v[0] != 0.0) or np.any(v[-1] != 0.0):
                raise ValueError("zero_trace function must vanish at both endpoints")
        du = np.diff(self.base.values, axis=0) / self.base.h
        object.__setattr__(self, "derivative", CellFunction(self.base.interval, du))

    @classmethod
    def from_values(cls, interval: Interval, values, boundary: str = "free"):
        return cls(GridFunction(interval, values), boundary)

    @property
    def interval(self) -> Interval:
        return self.base.interval

    @property
    def values(self) -> np.ndarray:
        return self.base.values

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def h(self) -> float:
        return self.base.h

    @property
    def dimension(self) -> int:
        return self.base.dimension

    def with_values(self, values, boundary: str | None = None) -> "SobolevFunction":
        return SobolevFunction(self.base.with_values(values), boundary or self.boundary)


def reconstruct(u: SobolevFunction) -> np.ndarray:
    """u(a) plus cumulative sums of h * derivative."""
    steps = u.h * u.derivative.values
    return np.vstack([u.values[:1], u.values[:1] + np.cumsum(steps, axis=0)])


def w1_norm(G: GFunction, u: SobolevFunction) -> float:
    """||u||_G + ||u'||_G."""
    return luxemburg_norm(G, u.base).norm + luxemburg_norm(G, u.derivative).norm


def w1_alt_norm(G: GFunction, u: SobolevFunction) -> float:
    """inf{alpha > 0 : R_G(u/alpha) + R_G(u'/alpha) <= 1}."""
    x, v = u.values, u.derivative.values

    def rho(alpha):
        return (u.base.integrate(G.evaluate(x / alpha))
                + u.derivative.integrate(G.evaluate(v / alpha)))

    scale = max(float(np.max(np.abs(x))), float(np.max(np.abs(v))))
    return norm_from_modular(rho, not np.any(x), start=scale).norm


def _mu_times_derivative_norm(G, u):
    return u.interval.measure * luxemburg_norm(G, u.derivative).norm


def poincare_check(G: GFunction, u: SobolevFunction) -> CheckReport:
    """||u||_G <= mu(I) ||u'||_G for a zero-trace ``u``."""
    if u.boundary != "zero_trace":
        raise ValueError("poincare_check requires a zero_trace function")
    lhs = luxemburg_norm(G, u.base).norm
    rhs = _mu_times_derivative_norm(G, u)
    return CheckReport("poincare", {"poincare": float(scaled_violation(lhs, rhs))}, 1,
                       details={"lhs": lhs, "rhs": rhs, "slack": rhs - lhs})


def sobolev_mean_check(G: GFunction, u: SobolevFunction) -> CheckReport:
    """||u - u_I||_G <= mu(I) ||u'||_G, with u_I the trapezoid mean."""
    mean = u.base.integrate(u.values) / u.interval.measure
    lhs = luxemburg_norm(G, u.base.with_values(u.values - mean)).norm
    rhs = _mu_times_derivative_norm(G, u)
    return CheckReport("sobolev_mean", {"sobolev_mean": float(scaled_violation(lhs, rhs))}, 1,
                       details={"lhs": lhs, "rhs": rhs, "slack": rhs - lhs,
                                "mean": np.atleast_1d(mean).tolist()})


def equivalence_check(G: GFunction, u: SobolevFunction) -> CheckReport:
    """||u|| <= 2 |||u||| <= 4 ||u||."""
    w = w1_norm(G, u)
    alt = w1_alt_norm(G, u)
    viol = {"w1_le_2alt": float(scaled_violation(w, 2 * alt)),
            "2alt_le_4w1": float(scaled_violation(2 * alt, 4 * w))}
    return CheckReport("norm_equivalence", viol, 1, details={"w1": w, "w1_alt": alt})


def linf_bound_check(G: GFunction, u: SobolevFunction, C: float | None = None) -> CheckReport:
    """max nodal |u| <= C ||u||; ``C`` defaults to the cached estimate."""
    if C is None:
        C = estimate_linf_constant(G, u.interval)
    if not C > 0:
        raise ValueError("C must be positive")
    sup = float(np.max(np.linalg.norm(u.values, axis=1)))
    w = w1_norm(G, u)
    ratio = sup / w if w > 0 else 0.0
    return CheckReport("linf_bound", {"linf_bound": float(scaled_violation(sup, C * w))}, 1,
                       details={"sup_norm": sup, "w1": w, "C": C, "ratio": ratio})


_LINF_CACHE: dict = {}


def estimate_linf_constant(G: GFunction, interval: Interval, samples: int = 200,
                           seed: int = 0, margin: float = 1.5) -> float:
    """Empirical C in ||u||_inf <= C ||u||_{W1}: the largest observed ratio
    over a seeded suite of random and sinusoidal functions, times ``margin``.

    Cached per (G, interval, samples, seed, margin).
    """
    key = (id(G), interval, samples, seed, margin)
    hit = _LINF_CACHE.get(key)
    if hit is not None and hit[0] is G:
        return hit[1]
    rng = np.random.default_rng(seed)
    best = 0.0
    for i in range(samples):
        u = random_sobolev_function(rng, G.dimension, interval, smooth=bool(i % 2))
        w = w1_norm(G, u)
        if w > 0:
            best = max(best, float(np.max(np.linalg.norm(u.values, axis=1))) / w)
    C = margin * best
    _LINF_CACHE[key] = (G, C)
    return C


def linf_constant_bound(G: GFunction, interval: Interval) -> float:
    """A constant that provably works: C1 max(1, 1/mu(I)).

    For piecewise-linear u, |u(t)| <= (1/mu) int |u| + int |u'|, and both
    integrals are bounded by C1 times the Luxemburg norms (the trapezoid
    rule overestimates int |u|, the midpoint rule is exact for |u'|).
    """
    return l1_embedding_constant(G, interval) * max(1.0, 1.0 / interval.measure)


def random_sobolev_function(rng, dimension: int, interval: Interval | None = None,
                            max_cells: int = 16, zero_trace: bool = False,
                            smooth: bool = False, scale: float = 3.0,
                            n: int | None = None) -> SobolevFunction:
    base = random_grid_function(rng, dimension, interval, max_cells=max_cells,
                                zero_trace=zero_trace, smooth=smooth, scale=scale, n=n)
    return SobolevFunction(base, "zero_trace" if zero_trace else "free")
