"""Grid functions on an interval: modular, Luxemburg norm, duality pairing
and the Hölder / Jensen / modular-vs-norm checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._numerics import bisect_predicate
from .gfunc import GFunction, conjugate_function
from .report import CheckReport, scaled_violation

__all__ = [
    "Interval", "GridFunction", "CellFunction", "LuxemburgResult",
    "modular", "luxemburg_norm", "norm_from_modular", "duality_pairing",
    "holder_check", "jensen_check", "convergence_diagnostic",
    "modular_norm_bounds_check", "l1_embedding_constant", "sample_family",
    "random_grid_function", "FAMILIES",
]

BRACKET_CAP = 2100  # doublings/halvings of alpha; spans the float range


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError(f"invalid interval [{self.a}, {self.b}]")

    @property
    def measure(self) -> float:
        return self.b - self.a


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError("values must be a (samples, N) array")
    if not np.all(np.isfinite(arr)):
        raise ValueError("values must be finite")
    arr.setflags(write=False)
    return arr


def _scalar_or_array(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nodal samples u(t_i), i = 0..n, on a uniform grid; integrals use the
    composite trapezoid rule."""

    interval: Interval
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values.shape[0] < 2:
            raise ValueError("a grid function needs at least one cell (two nodes)")

    @property
    def n(self) -> int:
        return self.values.shape[0] - 1

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    @property
    def h(self) -> float:
        return self.interval.measure / self.n

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.interval.a, self.interval.b, self.n + 1)

    def integrate(self, f: np.ndarray) -> float:
        return _scalar_or_array(np.trapezoid(f, dx=self.h, axis=0))

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.interval, values)

    def __add__(self, other):
        _same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, lam: float):
        return self.with_values(lam * self.values)

    __rmul__ = __mul__

    def to_csv_rows(self) -> list[list[float]]:
        return [[float(t)] + [float(v) for v in row] for t, row in zip(self.t, self.values)]

    @classmethod
    def from_callable(cls, interval: Interval, n: int, f: Callable) -> "GridFunction":
        t = np.linspace(interval.a, interval.b, n + 1)
        return cls(interval, np.asarray(f(t), dtype=float))


@dataclass(frozen=True, eq=False)
class CellFunction:
    """One value per cell (e.g. difference quotients); integrals use the
    midpoint rule, exact for piecewise-constant data."""

    interval: Interval
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    @property
    def h(self) -> float:
        return self.interval.measure / self.n

    @property
    def t(self) -> np.ndarray:
        return self.interval.a + (np.arange(self.n) + 0.5) * self.h

    def integrate(self, f: np.ndarray) -> float:
        return _scalar_or_array(self.h * np.sum(f, axis=0))

    def with_values(self, values) -> "CellFunction":
        return CellFunction(self.interval, values)


def _same_grid(u, v):
    if (u.interval != v.interval or u.values.shape != v.values.shape
            or type(u) is not type(v)):
        raise ValueError("grid functions live on different grids")


def _check_dim(G: GFunction, u):
    if G.dimension != u.dimension:
        raise ValueError(f"G acts on R^{G.dimension} but u takes values in R^{u.dimension}")


def modular(G: GFunction, u) -> float:
    """R_G(u) = integral of G(u(t)) over the interval."""
    _check_dim(G, u)
    return u.integrate(G.evaluate(u.values))


@dataclass(frozen=True)
class LuxemburgResult:
    norm: float
    modular_at_norm: float
    bisection_iterations: int

    def to_dict(self):
        return {"norm": self.norm, "modular_at_norm": self.modular_at_norm,
                "bisection_iterations": self.bisection_iterations}


def norm_from_modular(rho: Callable[[float], float], is_zero: bool,
                      rel_width: float = 1e-12, start: float = 1.0) -> LuxemburgResult:
    """inf{alpha > 0 : rho(alpha) <= 1} for a nonincreasing ``rho``.

    Brackets by doubling/halving from ``start`` (pass the data scale, e.g.
    the largest entry), then bisects the predicate ``rho(alpha) <= 1``; the
    returned alpha always satisfies it.
    """
    if is_zero:
        return LuxemburgResult(0.0, 0.0, 0)

    def ok(alpha):
        return rho(alpha) <= 1.0

    lo = hi = float(start) if start > 0 and math.isfinite(start) else 1.0
    if ok(hi):
        for _ in range(BRACKET_CAP):
            lo = 0.5 * hi
            if not ok(lo):
                break
            hi = lo
        else:
            raise ArithmeticError("Luxemburg bracket collapsed (modular never exceeds 1)")
    else:
        for _ in range(BRACKET_CAP):
            lo, hi = hi, 2.0 * hi
            if ok(hi):
                break
        else:
            raise ArithmeticError("Luxemburg bracket diverged (non-finite data?)")
    lo, hi, it = bisect_predicate(ok, lo, hi, rel_width=rel_width)
    return LuxemburgResult(hi, rho(hi), it)


def luxemburg_norm(G: GFunction, u) -> LuxemburgResult:
    """Luxemburg norm inf{alpha > 0 : R_G(u/alpha) <= 1}.

    Solved in predicate form, so plateaus of G need no special care. For
    a GridFunction the modular is the trapezoid rule, for a CellFunction
    the midpoint rule.
    """
    _check_dim(G, u)
    vals = u.values
    return norm_from_modular(lambda a: u.integrate(G.evaluate(vals / a)),
                             not np.any(vals), start=float(np.max(np.abs(vals))))


def duality_pairing(u, v) -> float:
    """Integral of <u(t), v(t)> (same quadrature as u)."""
    _same_grid(u, v)
    return u.integrate(np.einsum("ij,ij->i", u.values, v.values))


def holder_check(G: GFunction, u, v, G_star: GFunction | None = None) -> CheckReport:
    """integral <u,v> <= 2 ||u||_G ||v||_{G*}."""
    G_star = conjugate_function(G) if G_star is None else G_star
    pairing = duality_pairing(u, v)
    nu = luxemburg_norm(G, u).norm
    nv = luxemburg_norm(G_star, v).norm
    bound = 2.0 * nu * nv
    return CheckReport("holder", {"holder": float(scaled_violation(pairing, bound))}, 1,
                       details={"pairing": pairing, "norm_u": nu, "norm_v_conjugate": nv,
                                "bound": bound, "slack": bound - pairing})


def jensen_check(G: GFunction, u) -> CheckReport:
    """G(mean of u) <= R_G(u) / mu(I)."""
    mu = u.interval.measure
    mean = np.atleast_1d(np.asarray(u.integrate(u.values), dtype=float) / mu)
    lhs = float(G.evaluate(mean[None])[0])
    rhs = modular(G, u) / mu
    return CheckReport("jensen", {"jensen": float(scaled_violation(lhs, rhs))}, 1,
                       details={"lhs": lhs, "rhs": rhs, "slack": rhs - lhs})


def modular_norm_bounds_check(G: GFunction, u) -> CheckReport:
    """||u|| <= max(R_G(u), 1); ||u|| <= 1 implies R_G(u) <= ||u||;
    ||u|| > 1 implies R_G(u) >= ||u||."""
    R = modular(G, u)
    nu = luxemburg_norm(G, u).norm
    viol = {"norm_le_max_modular_1": float(scaled_violation(nu, max(R, 1.0)))}
    # the computed norm overshoots by at most a relative 1e-12; compare against
    # the lower end of its bracket where the implication runs the other way
    if nu <= 1.0:
        viol["modular_le_norm"] = float(scaled_violation(R, nu))
        viol["modular_ge_norm"] = 0.0
    else:
        viol["modular_le_norm"] = 0.0
        viol["modular_ge_norm"] = float(scaled_violation(nu * (1 - 2e-12), R))
    return CheckReport("modular_norm_bounds", viol, 1, details={"modular": R, "norm": nu})


@dataclass
class ConvergenceReport:
    norms: list
    modular_differences: list
    modulars: list
    modular_limit: float
    co_convergent: bool
    modular_tracks_norm: bool
    modulars_converge: bool

    def to_dict(self):
        return dict(self.__dict__)


def _nonincreasing(xs, tol=1e-12):
    return all(b <= a + tol * max(1.0, abs(a)) for a, b in zip(xs, xs[1:]))


def convergence_diagnostic(G: GFunction, sequence: Sequence, u,
                           tail_tol: float = 1e-6) -> ConvergenceReport:
    """Paired series ||u_n - u||, R_G(u_n - u) and R_G(u_n).

    ``co_convergent``: both difference series are nonincreasing and both
    end below ``tail_tol``. ``modular_tracks_norm``: R_G(u_n - u) <=
    ||u_n - u|| whenever the norm is at most 1. ``modulars_converge``:
    |R_G(u_n) - R_G(u)| is nonincreasing and ends below ``tail_tol``.
    """
    diffs = [un - u for un in sequence]
    norms = [luxemburg_norm(G, d).norm for d in diffs]
    mods = [modular(G, d) for d in diffs]
    vals = [modular(G, un) for un in sequence]
    limit = modular(G, u)
    gaps = [abs(v - limit) for v in vals]
    co = (_nonincreasing(norms) and _nonincreasing(mods)
          and norms[-1] <= tail_tol and mods[-1] <= tail_tol) if diffs else True
    tracks = all(m <= nv * (1 + 1e-9) + 1e-15 for nv, m in zip(norms, mods) if nv <= 1.0)
    conv = _nonincreasing(gaps) and (not gaps or gaps[-1] <= tail_tol)
    return ConvergenceReport(norms, mods, vals, limit, bool(co), bool(tracks), bool(conv))


def l1_embedding_constant(G: GFunction, interval: Interval, M: float = 1.0,
                          directions: int = 64, seed: int = 0) -> float:
    """C1 with ||u||_{L^1} <= C1 ||u||_G, from |x| <= G(Kx) for |x| >= M.

    G(Kx)/|x| is nondecreasing along rays, so K is fixed at |x| = M: the
    smallest K with min over sampled unit directions d of G(K M d) >= M.
    Then C1 = K (M mu(I) + 1).
    """
    rng = np.random.default_rng(seed)
    D = rng.standard_normal((directions, G.dimension))
    D /= np.linalg.norm(D, axis=1)[:, None]
    D = np.vstack([D, np.eye(G.dimension), -np.eye(G.dimension)])

    def ok(K):
        return bool(np.min(G.evaluate(K * M * D)) >= M)

    hi = 1.0
    while not ok(hi):
        hi *= 2.0
    lo = hi / 2.0
    if ok(lo):
        lo = 0.0
    _, K, _ = bisect_predicate(ok, lo, hi, rel_width=1e-9)
    return K * (M * interval.measure + 1.0)


# ---------------------------------------------------------------------------
# named test families

def _const(t, value):
    return np.broadcast_to(np.asarray(value, dtype=float), (t.size, len(value))).copy()


def _linear(t, start, end):
    s = (t - t[0]) / (t[-1] - t[0])
    return np.outer(1 - s, start) + np.outer(s, end)


def _sine(t, amplitude, frequency=1.0, phase=0.0):
    a = np.asarray(amplitude, dtype=float)
    s = np.sin(math.pi * frequency * (t - t[0]) / (t[-1] - t[0]) + phase)
    if phase == 0.0 and float(frequency).is_integer():
        s[0] = s[-1] = 0.0  # exact zero trace instead of sin(k pi) ~ 1e-16
    return np.outer(s, np.atleast_1d(a))


def _example_b(t, scale=1.1):
    return scale * np.stack([np.cos(t), np.sqrt(np.clip(np.sin(t), 0.0, None))], axis=1)


def _truncated_power(t, height):
    # (0, t^(-1/4)) cut to 0 where its norm exceeds ``height``
    with np.errstate(divide="ignore"):
        y = np.where(t > 0, t ** -0.25, np.inf)
    y = np.where(y <= height, y, 0.0)
    return np.stack([np.zeros_like(t), y], axis=1)


FAMILIES: dict[str, Callable] = {
    "constant": _const,
    "linear": _linear,
    "sine": _sine,
    "cos_sqrt_sin": _example_b,
    "truncated_power": _truncated_power,
}


def sample_family(name: str, interval: Interval, n: int, **params) -> GridFunction:
    """Sample a named test family on ``n`` cells.

    ``constant(value)``, ``linear(start, end)``, ``sine(amplitude,
    frequency=1, phase=0)`` = amplitude * sin(pi f (t-a)/(b-a) + phase),
    ``cos_sqrt_sin(scale=1.1)`` = scale (cos t, sqrt(sin t)),
    ``truncated_power(height)`` = (0, t^(-1/4)) where that is <= height,
    else 0.
    """
    if name not in FAMILIES:
        raise KeyError(name)
    t = np.linspace(interval.a, interval.b, n + 1)
    return GridFunction(interval, FAMILIES[name](t, **params))


def random_grid_function(rng, dimension: int, interval: Interval | None = None,
                         max_cells: int = 16, zero_trace: bool = False,
                         smooth: bool = False, scale: float = 3.0,
                         n: int | None = None) -> GridFunction:
    """Random nodal values uniform in [-scale, scale], or a random sinusoid.

    The cell count is drawn from [1, max_cells] ([2, max_cells] for zero
    trace) unless ``n`` is given.
    """
    interval = interval or Interval(0.0, 1.0)
    if n is None:
        n = int(rng.integers(1 if not zero_trace else 2, max_cells + 1))
    if smooth:
        t = np.linspace(0.0, 1.0, n + 1)
        amp = rng.uniform(-scale, scale, dimension)
        k = rng.integers(1, 4, dimension)
        phase = 0.0 if zero_trace else rng.uniform(0, math.pi, dimension)
        vals = amp * np.sin(math.pi * np.outer(t, k) + phase)
    else:
        vals = rng.uniform(-scale, scale, (n + 1, dimension))
    if zero_trace:
        vals[0] = 0.0
        vals[-1] = 0.0
    return GridFunction(interval, vals)
