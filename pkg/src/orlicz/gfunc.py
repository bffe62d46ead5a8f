"""G-functions on R^N: built-in families, gradients, Fenchel conjugates,
growth constants and pointwise identity checks.

A G-function is even, convex, supercoercive, vanishes at the origin and
satisfies the doubling (Delta_2) and reverse-doubling (nabla_2) growth
conditions. Every callable here is row-vectorized: points are arrays whose
last axis has length ``dimension``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from ._numerics import EPS, bisect_predicate, central_gradient, fd_step
from .report import CheckReport, max_or_zero, scaled_violation

__all__ = [
    "GFunction", "GrowthReport", "ConjugateResult", "DominanceEvidence",
    "DescriptorError", "ConjugateNotConverged", "GrowthEstimationError",
    "make_builtin", "gradient_value", "conjugate_value", "conjugate_solve",
    "conjugate_function", "numeric_conjugate", "estimate_growth",
    "check_gfunction_axioms", "check_pointwise_identities",
    "brezis_lieb_check", "compare_growth",
]


class DescriptorError(ValueError):
    """Invalid G-function descriptor; ``field`` names the offending key."""

    def __init__(self, message: str, field: str = "kind"):
        super().__init__(message)
        self.field = field


class ConjugateNotConverged(RuntimeError):
    pass


class GrowthEstimationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class GFunction:
    """A G-function together with optional analytic derivative data.

    ``evaluate`` maps (..., N) arrays to (...) arrays. When ``gradient`` is
    None, :func:`gradient_value` falls back to central differences.
    ``conjugate_closed_form`` is the analytic Fenchel conjugate, if known.
    """

    dimension: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    conjugate_closed_form: Optional[Callable[[np.ndarray], np.ndarray]] = None
    descriptor: dict = field(default_factory=dict)
    # memo for derived data (growth report used as conjugate trust region)
    _memo: dict = field(default_factory=dict, repr=False)

    def __call__(self, x):
        x = self._check(x)
        out = self.evaluate(x)
        return float(out) if x.ndim == 1 else np.asarray(out, dtype=float)

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self.dimension:
            raise ValueError(
                f"expected points with last axis {self.dimension}, got shape {x.shape}")
        return x

    @property
    def kind(self) -> str:
        return self.descriptor.get("kind", "custom")


def _rownorm(x):
    return np.linalg.norm(x, axis=-1)


# ---------------------------------------------------------------------------
# built-in families

def _power(p: float, dim: int) -> GFunction:
    q = p / (p - 1.0)

    def ev(x):
        return _rownorm(x) ** p / p

    def grad(x):
        r = _rownorm(x)[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.where(r > 0, r ** (p - 2.0) * x, 0.0)
        return g

    def conj(y):
        return _rownorm(y) ** q / q

    return GFunction(dim, ev, grad, conj, {"kind": "power", "p": p, "dimension": dim})


def _sum_powers(ps: list[float], normalized: bool) -> GFunction:
    pa = np.asarray(ps, dtype=float)
    coef = 1.0 / pa if normalized else np.ones_like(pa)

    def ev(x):
        return np.sum(coef * np.abs(x) ** pa, axis=-1)

    def grad(x):
        return coef * pa * np.abs(x) ** (pa - 1.0) * np.sign(x)

    def conj(y):
        # conjugate of c|s|^p is (1 - 1/p) |y| (|y| / (c p))^(1/(p-1))
        ay = np.abs(y)
        return np.sum((1.0 - 1.0 / pa) * ay * (ay / (coef * pa)) ** (1.0 / (pa - 1.0)), axis=-1)

    desc = {"kind": "sum_powers", "p": [float(v) for v in ps], "normalized": normalized,
            "dimension": len(ps)}
    return GFunction(len(ps), ev, grad, conj, desc)


def _quad_quartic() -> GFunction:
    def ev(x):
        d = x[..., 0] - x[..., 1]
        return d * d + x[..., 1] ** 4

    def grad(x):
        d = 2.0 * (x[..., 0] - x[..., 1])
        return np.stack([d, -d + 4.0 * x[..., 1] ** 3], axis=-1)

    def conj(y):
        # closed form for a+b >= 0, extended evenly through |a+b|
        a = y[..., 0]
        s = np.abs(y[..., 0] + y[..., 1])
        return 0.25 * a * a + 0.75 * s * np.cbrt(s / 4.0)

    return GFunction(2, ev, grad, conj, {"kind": "quad_quartic", "dimension": 2})


def _plateau(radius: float, p: float, dim: int) -> GFunction:
    rp = radius ** p
    knee = p * radius ** (p - 1.0)

    def ev(x):
        return np.maximum(_rownorm(x) ** p - rp, 0.0)

    def grad(x):
        r = _rownorm(x)[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(r > radius, p * r ** (p - 2.0) * x, 0.0)

    def conj(y):
        ny = _rownorm(y)
        s = (ny / p) ** (1.0 / (p - 1.0))
        return np.where(ny <= knee, radius * ny, (1.0 - 1.0 / p) * ny * s + rp)

    desc = {"kind": "plateau", "radius": radius, "p": p, "dimension": dim}
    return GFunction(dim, ev, grad, conj, desc)


def _nonconvex_double(amplitude: float, frequency: float, dim: int) -> GFunction:
    # even, nonnegative, zero at 0, but not convex: negative-control fixture
    def ev(x):
        r = _rownorm(x)
        return 0.5 * r * r + amplitude * np.sin(frequency * r) ** 2

    def grad(x):
        r = _rownorm(x)[..., None]
        dr = r + amplitude * frequency * np.sin(2.0 * frequency * r)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(r > 0, dr / r * x, 0.0)

    desc = {"kind": "nonconvex_test_double", "amplitude": amplitude,
            "frequency": frequency, "dimension": dim}
    return GFunction(dim, ev, grad, None, desc)


def _num(desc, key, default=None):
    if key not in desc:
        if default is None:
            raise DescriptorError(f"missing field '{key}'", key)
        return default
    val = desc[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise DescriptorError(f"field '{key}' must be a finite number", key)
    return float(val)


def _dim(desc, default):
    if "dimension" not in desc:
        return default
    d = desc["dimension"]
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise DescriptorError("field 'dimension' must be a positive integer", "dimension")
    return d


def _exponent(desc, key="p"):
    p = _num(desc, key)
    if p <= 1.0:
        raise DescriptorError(f"exponent '{key}'={p} must exceed 1", key)
    return p


def make_builtin(descriptor: dict[str, Any]) -> GFunction:
    """Build a G-function from a JSON-style descriptor.

    Supported kinds::

        {"kind": "power", "p": 2.0, "dimension": 2}        |x|^p / p
        {"kind": "sum_powers", "p": [2.0, 4.0]}           sum |x_i|^p_i / p_i
        {"kind": "sum_powers", "p": [...], "normalized": false}   sum |x_i|^p_i
        {"kind": "quad_quartic"}                           (x1 - x2)^2 + x2^4
        {"kind": "plateau", "radius": 1.0, "p": 2.0}       max(|x|^p - r^p, 0)
        {"kind": "nonconvex_test_double", "amplitude": 0.5}  negative control

    ``dimension`` defaults to 2 where the family does not fix it.
    """
    if not isinstance(descriptor, dict):
        raise DescriptorError("G-function descriptor must be a JSON object", "g")
    kind = descriptor.get("kind")
    if kind == "power":
        return _power(_exponent(descriptor), _dim(descriptor, 2))
    if kind == "sum_powers":
        ps = descriptor.get("p")
        if not isinstance(ps, list) or not ps:
            raise DescriptorError("field 'p' must be a non-empty list of exponents", "p")
        exps = [_exponent({"p": v}) for v in ps]
        if _dim(descriptor, len(exps)) != len(exps):
            raise DescriptorError(
                f"dimension {descriptor['dimension']} does not match {len(exps)} exponents",
                "dimension")
        normalized = descriptor.get("normalized", True)
        if not isinstance(normalized, bool):
            raise DescriptorError("field 'normalized' must be a boolean", "normalized")
        return _sum_powers(exps, normalized)
    if kind == "quad_quartic":
        if _dim(descriptor, 2) != 2:
            raise DescriptorError("quad_quartic is defined on R^2 only", "dimension")
        return _quad_quartic()
    if kind == "plateau":
        r = _num(descriptor, "radius", 1.0)
        if r <= 0:
            raise DescriptorError("field 'radius' must be positive", "radius")
        p = _exponent({"p": descriptor.get("p", 2.0)})
        return _plateau(r, p, _dim(descriptor, 2))
    if kind == "nonconvex_test_double":
        return _nonconvex_double(_num(descriptor, "amplitude", 0.5),
                                 _num(descriptor, "frequency", 3.0), _dim(descriptor, 2))
    raise DescriptorError(f"unknown G-function kind {kind!r}", "kind")


# ---------------------------------------------------------------------------
# gradient

def gradient_value(G: GFunction, x) -> np.ndarray:
    """Gradient of ``G`` at ``x``: analytic when supplied, else central
    differences with step ``eps**(1/3) * max(1, |x|)``."""
    x = G._check(x)
    if G.gradient is not None:
        return np.asarray(G.gradient(x), dtype=float)
    return central_gradient(G.evaluate, x)


def _fd_hessian(G: GFunction, X: np.ndarray) -> np.ndarray:
    # central differences of the gradient, rows independent, symmetrized
    M, N = X.shape
    h = fd_step(X) if G.gradient is not None else EPS ** 0.25 * np.maximum(1.0, _rownorm(X))
    H = np.empty((M, N, N))
    for j in range(N):
        E = np.zeros(N)
        E[j] = 1.0
        d = h[:, None] * E
        H[:, :, j] = (gradient_value(G, X + d) - gradient_value(G, X - d)) / (2.0 * h[:, None])
    return 0.5 * (H + np.transpose(H, (0, 2, 1)))


# ---------------------------------------------------------------------------
# Fenchel conjugate

@dataclass
class ConjugateResult:
    """Batch conjugate values with the maximizing points.

    ``values[i] = <maximizers[i], y[i]> - G(maximizers[i])`` is the best probe
    value found, hence a lower bound for the true supremum. ``converged``
    marks rows whose optimality was certified.
    """

    values: np.ndarray
    maximizers: np.ndarray
    converged: np.ndarray
    iterations: int
    fallback_rows: int = 0


def _trust_radius(G: GFunction, ynorm: np.ndarray) -> np.ndarray:
    """Radius containing every maximizer of <x,y> - G(x).

    If G(x) >= c|x|^p for |x| >= M then the maximizer has |x| <= max(M,
    (|y|/c)^(1/(p-1))); c and p come from a cached coarse growth report. A
    factor 2 guards against the sampled minimum overestimating c.
    """
    rep = G._memo.get("trust_growth")
    if rep is None:
        try:
            rep = estimate_growth(G, radius_max=1e3, directions=max(16, 2 * G.dimension),
                                  radii=16, bisection_rel=1e-6)
            if not (rep.lower_coefficient > 0 and rep.p > 1.0 and math.isfinite(rep.p)):
                rep = False
        except GrowthEstimationError:
            rep = False
        G._memo["trust_growth"] = rep
    if rep:
        c, p = rep.lower_coefficient, rep.p
        return 2.0 * np.maximum(max(rep.M2, 1.0), (ynorm / c) ** (1.0 / (p - 1.0)))
    # radial doubling on axis directions when no growth report is available
    dirs = np.vstack([np.eye(G.dimension), -np.eye(G.dimension)])
    out = np.empty_like(ynorm)
    for i, yn in enumerate(ynorm):
        R = 1.0
        while R < 1e12 and np.min(G.evaluate(R * dirs)) <= yn * R:
            R *= 2.0
        out[i] = 2.0 * R
    return out


def _clip_ball(X, R):
    n = _rownorm(X)
    f = np.where(n > R, R / np.maximum(n, 1e-300), 1.0)
    return X * f[:, None]


def _objective(G, X, Y):
    return np.einsum("ij,ij->i", X, Y) - G.evaluate(X)


def _newton(G, Y, X, R, tol, max_iter, c1=1e-4):
    """Batched damped Newton for grad G(x) = y, maximizing <x,y> - G(x).

    Returns ``(X, phi, converged, stalled, iterations)``. A row is certified
    when |grad G(x) - y| * (|x| + R) <= tol * max(1, |phi|): by concavity
    this bounds the gap to the supremum over the trust ball.
    """
    M, N = X.shape
    phi = _objective(G, X, Y)
    converged = np.zeros(M, dtype=bool)
    stalled = np.zeros(M, dtype=bool)
    stagnant = np.zeros(M, dtype=int)
    eye = np.eye(N)
    it = 0
    for it in range(1, max_iter + 1):
        act = np.flatnonzero(~(converged | stalled))
        if act.size == 0:
            it -= 1
            break
        Xa, Ya, Ra, pa = X[act], Y[act], R[act], phi[act]
        r = gradient_value(G, Xa) - Ya
        rn = _rownorm(r)
        cert = rn * (_rownorm(Xa) + Ra) <= tol * np.maximum(1.0, np.abs(pa))
        converged[act[cert]] = True
        keep = ~cert
        if not keep.any():
            continue
        act, Xa, Ya, Ra, pa, r, rn = act[keep], Xa[keep], Ya[keep], Ra[keep], pa[keep], r[keep], rn[keep]
        H = _fd_hessian(G, Xa)
        lam = 1e-12 * (1.0 + np.abs(np.trace(H, axis1=1, axis2=2)))
        H = H + lam[:, None, None] * eye
        with np.errstate(all="ignore"):
            try:
                step = -np.linalg.solve(H, r[:, :, None])[:, :, 0]
            except np.linalg.LinAlgError:
                step = np.full_like(r, np.nan)
        slope = -np.einsum("ij,ij->i", step, r)
        bad = ~np.isfinite(step).all(axis=1) | (slope <= 0)
        step[bad] = -r[bad]
        slope[bad] = rn[bad] ** 2
        t = np.ones(act.size)
        done = np.zeros(act.size, dtype=bool)
        for _ in range(40):
            pend = np.flatnonzero(~done)
            if pend.size == 0:
                break
            Xt = _clip_ball(Xa[pend] + t[pend, None] * step[pend], Ra[pend])
            pt = _objective(G, Xt, Ya[pend])
            ok = pt >= pa[pend] + c1 * t[pend] * slope[pend]
            # near the optimum phi is flat to rounding: accept a step that
            # keeps phi within rounding and halves the stationarity residual
            flat = ~ok & (pt >= pa[pend] - 8 * EPS * np.maximum(1.0, np.abs(pa[pend])))
            if flat.any():
                idx = np.flatnonzero(flat)
                rt = _rownorm(gradient_value(G, Xt[idx]) - Ya[pend][idx])
                ok[idx] = rt <= 0.5 * rn[pend][idx]
            ok &= np.isfinite(pt)
            acc = pend[ok]
            gain = pt[ok] - pa[pend][ok]
            tiny = gain <= 1e-14 * np.maximum(1.0, np.abs(pa[pend][ok]))
            stagnant[act[acc]] = np.where(tiny, stagnant[act[acc]] + 1, 0)
            X[act[acc]] = Xt[ok]
            phi[act[acc]] = pt[ok]
            done[acc] = True
            t[pend[~ok]] *= 0.5
        stalled[act[~done]] = True
        # kinks: steps keep being accepted without changing phi
        stalled |= stagnant >= 8
    return X, phi, converged, stalled, it


def _grid_start(G, y, R, start):
    """Best point of a 33^min(N,3) grid over the trust box (plus ``start``)."""
    N = G.dimension
    k = min(N, 3)
    axis = np.linspace(-R, R, 33)
    if N <= 3:
        P = np.stack(np.meshgrid(*([axis] * k), indexing="ij"), axis=-1).reshape(-1, k)
    else:
        rng = np.random.default_rng(0)
        P = rng.uniform(-R, R, size=(33 ** 3, N))
    P = np.vstack([P, start[None]])
    vals = _objective(G, P, np.broadcast_to(y, P.shape))
    return P[np.argmax(vals)].copy()


def _ellipsoid(G, Y, C, radius, tol, max_iter=5000):
    """Batched ellipsoid method for max_x <x,y> - G(x) from balls B(C, radius).

    Uses grad G(x) - y as a subgradient, so kinks are harmless. Every
    ellipsoid contains the maximizer, which gives the certificate
    sup - phi(c) <= sqrt(g' P g). Returns best probes and certified mask.
    """
    M, N = Y.shape
    Xb = C.copy()
    pb = _objective(G, Xb, Y)
    conv = np.zeros(M, dtype=bool)
    if N == 1:
        lo, hi = C[:, 0] - radius, C[:, 0] + radius
        for _ in range(max_iter):
            act = np.flatnonzero(~conv)
            if act.size == 0:
                break
            c = 0.5 * (lo[act] + hi[act])[:, None]
            g = (gradient_value(G, c) - Y[act])[:, 0]
            ph = _objective(G, c, Y[act])
            better = ph > pb[act]
            Xb[act[better]], pb[act[better]] = c[better], ph[better]
            gap = np.abs(g) * (hi[act] - lo[act])
            conv[act[gap <= tol * np.maximum(1.0, np.abs(pb[act]))]] = True
            # the maximizer sits where the subgradient of G(x) - xy changes sign
            hi[act] = np.where(g > 0, c[:, 0], hi[act])
            lo[act] = np.where(g < 0, c[:, 0], lo[act])
            conv[act[g == 0]] = True
        return Xb, pb, conv
    c = C.copy()
    P = (radius ** 2)[:, None, None] * np.eye(N)[None]
    scale = N * N / (N * N - 1.0)
    for _ in range(max_iter):
        act = np.flatnonzero(~conv)
        if act.size == 0:
            break
        ca, Pa = c[act], P[act]
        g = gradient_value(G, ca) - Y[act]
        ph = _objective(G, ca, Y[act])
        better = ph > pb[act]
        Xb[act[better]], pb[act[better]] = ca[better], ph[better]
        Pg = np.einsum("mij,mj->mi", Pa, g)
        w = np.sqrt(np.maximum(np.einsum("mi,mi->m", g, Pg), 0.0))
        done = w <= tol * np.maximum(1.0, np.abs(pb[act]))
        conv[act[done]] = True
        live = ~done
        if not live.any():
            break
        a, Pg, w = act[live], Pg[live], w[live]
        u = Pg / w[:, None]
        c[a] = ca[live] - u / (N + 1.0)
        P[a] = scale * (Pa[live] - (2.0 / (N + 1.0)) * np.einsum("mi,mj->mij", u, u))
    return Xb, pb, conv


def conjugate_solve(G: GFunction, y, *, tol: float = 1e-11, max_iter: int = 200,
                    strict: bool = True) -> ConjugateResult:
    """Fenchel conjugate sup_x <x,y> - G(x) for a batch of points ``y``.

    Solves grad G(x) = y by damped Newton with a finite-difference Hessian,
    from 2N+1 seeds (y itself and +-R/2 along each axis) tried in turn until
    one is certified; rows whose line search stalls (kinks) skip the
    remaining seeds. Iterates stay inside the trust ball of radius R
    derived from the growth exponents. Rows that no seed certifies go
    through a 33^min(N,3) grid search refined by the ellipsoid method. With ``strict``
    a row that still fails raises :class:`ConjugateNotConverged`.
    """
    Y = np.atleast_2d(G._check(y)).astype(float)
    M, N = Y.shape
    R = _trust_radius(G, _rownorm(Y))
    X_best = np.zeros_like(Y)
    phi_best = np.zeros(M)  # x = 0 is always a probe: phi(0) = -G(0) = 0
    phi_best = np.maximum(phi_best, -G.evaluate(X_best))
    conv = np.zeros(M, dtype=bool)
    kinked = np.zeros(M, dtype=bool)
    seeds = [lambda: _clip_ball(Y.copy(), R)]
    for j in range(N):
        for s in (1.0, -1.0):
            seeds.append(lambda j=j, s=s: np.outer(0.5 * s * R, np.eye(N)[j]))
    iters = 0
    for make_seed in seeds:
        todo = np.flatnonzero(~(conv | kinked))
        if todo.size == 0:
            break
        X0 = make_seed()[todo]
        X, phi, c, st, it = _newton(G, Y[todo], X0, R[todo], tol, max_iter)
        # a stall means the line search cannot improve: another seed would
        # end at the same point of a concave objective
        kinked[todo[st & ~c]] = True
        iters += it
        better = phi > phi_best[todo]
        X_best[todo[better]] = X[better]
        phi_best[todo[better]] = phi[better]
        conv[todo[c]] = True
    fallback = np.flatnonzero(~conv)
    if fallback.size:
        starts = np.array([_grid_start(G, Y[i], R[i], X_best[i]) for i in fallback])
        radius = _rownorm(starts) + R[fallback]
        Xe, pe, ce = _ellipsoid(G, Y[fallback], starts, radius, tol)
        better = pe > phi_best[fallback]
        X_best[fallback[better]] = Xe[better]
        phi_best[fallback[better]] = pe[better]
        conv[fallback] = ce
        if strict and not ce.all():
            bad = fallback[~ce][0]
            raise ConjugateNotConverged(
                f"no certified maximizer for y={Y[bad].tolist()} ({G.kind})")
    return ConjugateResult(phi_best, X_best, conv, iters, int(fallback.size))


def conjugate_value(G: GFunction, y, **kwargs):
    """Numerical Fenchel conjugate G*(y); scalar for one point, array for a batch."""
    y = G._check(y)
    res = conjugate_solve(G, y, **kwargs)
    return float(res.values[0]) if y.ndim == 1 else res.values


def numeric_conjugate(G: GFunction, **kwargs) -> GFunction:
    """G* as a GFunction evaluated by :func:`conjugate_solve`.

    The gradient is the maximizer (envelope theorem), so conjugating this
    object again gives the biconjugate.
    """
    def ev(y):
        shape = y.shape[:-1]
        flat = y.reshape(-1, G.dimension)
        return conjugate_solve(G, flat, **kwargs).values.reshape(shape)

    def grad(y):
        flat = y.reshape(-1, G.dimension)
        return conjugate_solve(G, flat, **kwargs).maximizers.reshape(y.shape)

    return GFunction(G.dimension, ev, grad, G.evaluate,
                     {"kind": "numeric_conjugate", "of": dict(G.descriptor),
                      "dimension": G.dimension})


def conjugate_function(G: GFunction) -> GFunction:
    """G* as a GFunction, closed form when available, numeric otherwise."""
    if G.conjugate_closed_form is None:
        return numeric_conjugate(G)
    cf = G.conjugate_closed_form

    def grad(y):
        # gradient of G* is the maximizer; solve only when asked
        flat = y.reshape(-1, G.dimension)
        return conjugate_solve(G, flat).maximizers.reshape(y.shape)

    return GFunction(G.dimension, cf, grad, G.evaluate,
                     {"kind": "conjugate", "of": dict(G.descriptor), "dimension": G.dimension})


# ---------------------------------------------------------------------------
# growth constants

@dataclass(frozen=True)
class GrowthReport:
    """Sampled Delta_2 / nabla_2 constants and the derived power exponents.

    ``p = 1 + 1/log2(K2)`` and ``q = log2(K1)`` give |x|^p < G < |x|^q.
    ``lower_coefficient`` is the sampled min of G(x)/|x|^p over |x| >= M2.
    """

    K1: float
    M1: float
    K2: float
    M2: float
    p: float
    q: float
    lower_coefficient: float
    sample_stats: dict

    @property
    def consistent(self) -> bool:
        return 1.0 < self.p <= self.q * (1.0 + 1e-6)

    def to_dict(self) -> dict[str, Any]:
        return {"K1": self.K1, "M1": self.M1, "K2": self.K2, "M2": self.M2,
                "p": self.p, "q": self.q, "lower_coefficient": self.lower_coefficient,
                "consistent": self.consistent, "sample_stats": dict(self.sample_stats)}


def _directions(N: int, count: int, rng) -> np.ndarray:
    Z = rng.standard_normal((count, N))
    Z /= _rownorm(Z)[:, None]
    return np.vstack([Z, np.eye(N), -np.eye(N)])


def estimate_growth(G: GFunction, radius_max: float = 1e3, directions: int = 64,
                    radii: int = 64, *, M1: float = 1.0, M2: Optional[float] = None,
                    K2_max: float = 64.0, seed: int = 0,
                    bisection_rel: float = 1e-10) -> GrowthReport:
    """Estimate K1, K2 from samples on rays through the origin.

    Samples are ``directions`` random unit vectors plus all +-axes, at
    ``radii`` log-spaced radii in [M1, radius_max]. K1 is the largest
    G(2x)/G(x) (zero denominators skipped, at least 2). K2 is the smallest
    value with G(x) <= G(K2 x)/(2 K2) on all samples, located on a log grid
    in [1+1e-6, K2_max] and refined by bisection (the predicate is monotone
    because G(Kx)/K increases with K).
    """
    N = G.dimension
    if directions < 2 * N:
        raise ValueError(f"need at least 2N={2 * N} directions")
    if not radius_max > M1:
        raise ValueError("radius_max must exceed M1")
    M2 = M1 if M2 is None else M2
    rng = np.random.default_rng(seed)
    D = _directions(N, directions, rng)
    rs = np.geomspace(M1, radius_max, radii)
    X = (rs[:, None, None] * D[None]).reshape(-1, N)
    g = G.evaluate(X)
    g2 = G.evaluate(2.0 * X)
    pos = g > 0
    if not pos.any():
        raise GrowthEstimationError("G vanishes on every sample")
    K1 = max(2.0, float(np.max(g2[pos] / g[pos])))

    sel = _rownorm(X) >= M2 * (1 - 1e-12)
    Xs, gs = X[sel], g[sel]

    def feasible(K):
        return bool(np.all(gs <= G.evaluate(K * Xs) / (2.0 * K)))

    grid = np.geomspace(1.0 + 1e-6, K2_max, 64)
    idx = next((i for i, K in enumerate(grid) if feasible(K)), None)
    if idx is None:
        raise GrowthEstimationError(
            f"no K2 <= {K2_max} satisfies the nabla_2 inequality on the samples")
    if idx == 0:
        K2, bis = float(grid[0]), 0
    else:
        _, K2, bis = bisect_predicate(feasible, float(grid[idx - 1]), float(grid[idx]),
                                      rel_width=bisection_rel)
    p = 1.0 + 1.0 / math.log2(K2)
    q = math.log2(K1)
    with np.errstate(divide="ignore"):
        ratios = gs / _rownorm(Xs) ** p
    c = float(np.min(ratios)) if ratios.size else 0.0
    stats = {"directions": int(D.shape[0]), "radii": int(radii), "samples": int(X.shape[0]),
             "skipped_zero": int((~pos).sum()), "radius_min": float(M1),
             "radius_max": float(radius_max), "k2_bisection_steps": int(bis)}
    return GrowthReport(K1, float(M1), float(K2), float(M2), p, q, c, stats)


# ---------------------------------------------------------------------------
# checks

def _pairs(G, samples, seed, scale):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-scale, scale, size=(samples, G.dimension))
    y = rng.uniform(-scale, scale, size=(samples, G.dimension))
    return x, y


def check_gfunction_axioms(G: GFunction, samples: int = 1000, seed: int = 0,
                           scale: float = 3.0) -> CheckReport:
    """Sampled (G1)-(G3) axioms: zero at origin, nonnegative, even, midpoint
    convex, nondecreasing along rays."""
    x, y = _pairs(G, samples, seed, scale)
    rng = np.random.default_rng(seed + 1)
    a = rng.uniform(0.0, 1.0, samples)
    b = a + rng.uniform(0.0, 1.0, samples)
    gx, gy = G.evaluate(x), G.evaluate(y)
    zero = abs(float(G.evaluate(np.zeros((1, G.dimension)))[0]))
    viol = {
        "zero_at_origin": zero,
        "nonnegative": max_or_zero(scaled_violation(0.0, np.concatenate([gx, gy]))),
        "even": max_or_zero(np.maximum(scaled_violation(gx, G.evaluate(-x)),
                                       scaled_violation(G.evaluate(-x), gx))),
        "midpoint_convex": max_or_zero(scaled_violation(G.evaluate(0.5 * (x + y)),
                                                        0.5 * (gx + gy))),
        "monotone_rays": max_or_zero(scaled_violation(G.evaluate(a[:, None] * x),
                                                      G.evaluate(b[:, None] * x))),
    }
    return CheckReport("gfunction_axioms", viol, samples, details={"g": G.descriptor})


def check_pointwise_identities(G: GFunction, samples: int = 1000, seed: int = 0,
                               scale: float = 3.0) -> CheckReport:
    """Subgradient sandwich, Young equality, G*(grad G(x)) <= G(2x) and the
    Fenchel inequality on random pairs; conjugates are numerical."""
    x, y = _pairs(G, samples, seed, scale)
    gx = G.evaluate(x)
    dg = gradient_value(G, x)
    lin = np.einsum("ij,ij->i", dg, y)
    star_grad = conjugate_solve(G, dg).values
    star_y = conjugate_solve(G, y).values
    xdg = np.einsum("ij,ij->i", x, dg)
    young_rhs = gx + star_grad
    viol = {
        "subgradient_lower": max_or_zero(scaled_violation(gx - G.evaluate(x - y), lin)),
        "subgradient_upper": max_or_zero(scaled_violation(lin, G.evaluate(x + y) - gx)),
        "young_equality": max_or_zero(np.maximum(scaled_violation(xdg, young_rhs),
                                                 scaled_violation(young_rhs, xdg))),
        "conjugate_gradient_bound": max_or_zero(scaled_violation(star_grad,
                                                                 G.evaluate(2.0 * x))),
        "fenchel": max_or_zero(scaled_violation(np.einsum("ij,ij->i", x, y), gx + star_y)),
    }
    return CheckReport("pointwise_identities", viol, samples, details={"g": G.descriptor})


def brezis_lieb_check(G: GFunction, k: float = 2.0, eps: float = 0.25,
                      samples: int = 1000, seed: int = 0, scale: float = 3.0) -> CheckReport:
    """|G(x+y) - G(x)| <= eps |G(kx) - k G(x)| + 2 G(C y), C = 1/(eps (k-1))."""
    if not k > 1:
        raise ValueError("k must exceed 1")
    if not 0 < eps < 1.0 / k:
        raise ValueError("eps must lie in (0, 1/k)")
    C = 1.0 / (eps * (k - 1.0))
    x, y = _pairs(G, samples, seed, scale)
    gx = G.evaluate(x)
    lhs = np.abs(G.evaluate(x + y) - gx)
    rhs = eps * np.abs(G.evaluate(k * x) - k * gx) + 2.0 * G.evaluate(C * y)
    viol = {"brezis_lieb": max_or_zero(scaled_violation(lhs, rhs))}
    slack = rhs - lhs
    return CheckReport("brezis_lieb", viol, samples,
                       details={"k": k, "eps": eps, "C_eps": C,
                                "min_slack": float(slack.min()) if slack.size else 0.0})


@dataclass
class DominanceEvidence:
    """Sampled evidence for F < G (fraction of F(x) <= G(Kx)) and for
    F << G (min over directions of G(alpha x)/F(x) per radius)."""

    K: float
    radii: list
    fraction_dominated: float
    ratio_minima: dict
    ratio_growing: dict

    def to_dict(self) -> dict[str, Any]:
        return {"K": self.K, "radii": list(self.radii),
                "fraction_dominated": self.fraction_dominated,
                "ratio_minima": {str(a): v for a, v in self.ratio_minima.items()},
                "ratio_growing": {str(a): v for a, v in self.ratio_growing.items()}}


def compare_growth(F: GFunction, G: GFunction, radii, K: float = 1.0,
                   directions: int = 64, seed: int = 0,
                   alphas=(0.5, 1.0, 2.0)) -> DominanceEvidence:
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size == 0 or np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be a non-empty increasing list")
    if F.dimension != G.dimension:
        raise ValueError("F and G must share the dimension")
    D = _directions(F.dimension, directions, np.random.default_rng(seed))
    X = radii[:, None, None] * D[None]          # (R, D, N)
    fx = F.evaluate(X)
    frac = float(np.mean(fx <= G.evaluate(K * X)))
    minima, growing = {}, {}
    for a in alphas:
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(fx > 0, G.evaluate(a * X) / fx, np.inf)
        m = ratio.min(axis=1)
        minima[a] = [float(v) for v in m]
        growing[a] = bool(np.all(np.diff(m) >= 0) and m[-1] > m[0])
    return DominanceEvidence(float(K), [float(r) for r in radii], frac, minima, growing)
