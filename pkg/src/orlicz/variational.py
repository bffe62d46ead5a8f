"""Discrete action functionals I(u) = integral of F(t, u, u'), their exact
gradients, growth-condition checks and a Dirichlet minimizer."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_banded

from ._numerics import fd_step
from .funcspace import Interval
from .gfunc import GFunction, conjugate_value, gradient_value, make_builtin
from .report import CheckReport, max_or_zero, scaled_violation
from .sobolev import SobolevFunction

__all__ = [
    "Envelope", "Lagrangian", "LagrangianProblem", "MinimizeResult",
    "action", "gradient", "euler_lagrange_residual", "check_growth_conditions",
    "envelope_alpha", "minimize", "linear_initial", "named_lagrangian",
    "g_action", "g_plus_potential", "POTENTIALS", "NAMED_LAGRANGIANS",
    "fd_action_gradient", "gradient_oracle_check", "random_problem",
]

Scalar = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
Vector = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def _grid_sample(spec, interval: Optional[Interval]):
    """Turn a constant, callable or uniform grid sample into a map of t."""
    if callable(spec):
        return spec
    arr = np.atleast_1d(np.asarray(spec, dtype=float))
    if arr.size == 1:
        c = float(arr[0])
        return lambda t: np.full(np.shape(t), c)
    if interval is None:
        raise ValueError("grid-sampled envelope data needs an interval")
    nodes = np.linspace(interval.a, interval.b, arr.size)
    return lambda t: np.interp(t, nodes, arr)


@dataclass(frozen=True)
class Envelope:
    """Data (a, b, c) of the growth bounds

        |F|         <= a(|x|) (b(t) + G(v))
        |F_x|       <= a(|x|) (b(t) + G(v))
        G*(F_v)     <= a(|x|) (c(t) + G*(grad G(v)))

    ``a`` is a scalar map; ``b`` and ``c`` are constants, callables of t, or
    samples on a uniform grid over ``interval``.
    """

    a: Callable[[np.ndarray], np.ndarray]
    b: object = 0.0
    c: object = 0.0
    interval: Optional[Interval] = None

    def b_of(self, t):
        return np.asarray(_grid_sample(self.b, self.interval)(t), dtype=float)

    def c_of(self, t):
        return np.asarray(_grid_sample(self.c, self.interval)(t), dtype=float)


@dataclass(frozen=True, eq=False)
class Lagrangian:
    """F(t, x, v) with optional analytic partials; all maps are row-vectorized
    (t: (m,), x and v: (m, N))."""

    F: Scalar
    F_x: Optional[Vector] = None
    F_v: Optional[Vector] = None
    envelope: Optional[Envelope] = None
    reference_G: Optional[GFunction] = None
    name: str = "custom"

    def value(self, t, x, v) -> np.ndarray:
        return np.asarray(self.F(t, x, v), dtype=float)

    def dx(self, t, x, v) -> np.ndarray:
        if self.F_x is not None:
            return np.asarray(self.F_x(t, x, v), dtype=float)
        return _fd_partial(lambda z: self.F(t, z, v), x)

    def dv(self, t, x, v) -> np.ndarray:
        if self.F_v is not None:
            return np.asarray(self.F_v(t, x, v), dtype=float)
        return _fd_partial(lambda z: self.F(t, x, z), v)


def _fd_partial(f, z):
    h = fd_step(z)
    out = np.empty_like(z)
    for j in range(z.shape[1]):
        e = np.zeros(z.shape[1])
        e[j] = 1.0
        out[:, j] = (f(z + h[:, None] * e) - f(z - h[:, None] * e)) / (2.0 * h)
    return out


@dataclass(frozen=True, eq=False)
class LagrangianProblem:
    lagrangian: Lagrangian
    interval: Interval
    cells: int
    dimension: int
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        if int(self.cells) != self.cells or self.cells < 2:
            raise ValueError("cells must be an integer >= 2")
        for name in ("left", "right"):
            val = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if val.shape != (self.dimension,):
                raise ValueError(f"boundary {name} must have dimension {self.dimension}")
            object.__setattr__(self, name, val)

    @property
    def h(self) -> float:
        return self.interval.measure / self.cells

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.interval.a, self.interval.b, self.cells + 1)

    @property
    def t_mid(self) -> np.ndarray:
        return self.interval.a + (np.arange(self.cells) + 0.5) * self.h


def linear_initial(problem: LagrangianProblem) -> SobolevFunction:
    s = np.linspace(0.0, 1.0, problem.cells + 1)[:, None]
    vals = (1 - s) * problem.left + s * problem.right
    vals[0], vals[-1] = problem.left, problem.right
    return SobolevFunction.from_values(problem.interval, vals)


def _validate(problem: LagrangianProblem, u: SobolevFunction):
    if (u.interval != problem.interval or u.n != problem.cells
            or u.dimension != problem.dimension):
        raise ValueError("function does not live on the problem grid")
    if not (np.allclose(u.values[0], problem.left, rtol=0, atol=1e-12)
            and np.allclose(u.values[-1], problem.right, rtol=0, atol=1e-12)):
        raise ValueError("function does not match the boundary values")


def _cells(problem, values):
    x = 0.5 * (values[1:] + values[:-1])
    v = np.diff(values, axis=0) / problem.h
    return problem.t_mid, x, v


def _action_values(problem, values) -> float:
    t, x, v = _cells(problem, values)
    return float(problem.h * np.sum(problem.lagrangian.value(t, x, v)))


def action(problem: LagrangianProblem, u: SobolevFunction) -> float:
    """Midpoint discretization: sum over cells of h F(t_mid, u_mid, u'_cell)."""
    _validate(problem, u)
    return _action_values(problem, u.values)


def _gradient_values(problem, values) -> np.ndarray:
    t, x, v = _cells(problem, values)
    L = problem.lagrangian
    fx = L.dx(t, x, v)
    fv = L.dv(t, x, v)
    return problem.h * 0.5 * (fx[:-1] + fx[1:]) + (fv[:-1] - fv[1:])


def gradient(problem: LagrangianProblem, u: SobolevFunction) -> np.ndarray:
    """Exact differential of the discrete action with respect to the
    interior nodal values, shape (n-1, N)."""
    _validate(problem, u)
    return _gradient_values(problem, u.values)


def euler_lagrange_residual(problem: LagrangianProblem, u: SobolevFunction) -> np.ndarray:
    """(F_v(cell j) - F_v(cell j-1))/h - (F_x(cell j-1) + F_x(cell j))/2
    at interior nodes; equals -gradient/h."""
    return -gradient(problem, u) / problem.h


# ---------------------------------------------------------------------------
# growth conditions

def envelope_alpha(a, s_max: float, points: int = 2049):
    """Grid realization of alpha(s) = sup over [0, s] of a.

    Returns ``(grid, alpha_on_grid)``; alpha is the running maximum of ``a``
    on the grid, so it is nondecreasing by construction.
    """
    grid = np.linspace(0.0, s_max, points)
    return grid, np.maximum.accumulate(np.asarray(a(grid), dtype=float))


def check_growth_conditions(lagrangian: Lagrangian, samples: int = 1000,
                            box: dict | None = None, seed: int = 0) -> CheckReport:
    """Sample (t, x, v) and test the three growth bounds of the envelope.

    ``box`` holds ``t`` (pair), ``x`` and ``v`` (radii); defaults are the
    envelope interval or [0, 1], and radius 5 for both. Also checks that
    b and c are finite and nonnegative on the sampled t, and that
    a(|x|) <= alpha(|x|) with alpha the running supremum of a on a grid.
    """
    env = lagrangian.envelope
    if env is None:
        raise ValueError("lagrangian has no envelope")
    G = lagrangian.reference_G
    if G is None:
        raise ValueError("lagrangian has no reference_G")
    box = dict(box or {})
    iv = env.interval or Interval(0.0, 1.0)
    t_lo, t_hi = box.get("t", (iv.a, iv.b))
    rx, rv = float(box.get("x", 5.0)), float(box.get("v", 5.0))
    N = G.dimension
    rng = np.random.default_rng(seed)
    t = rng.uniform(t_lo, t_hi, samples)
    x = _ball(rng, samples, N, rx)
    v = _ball(rng, samples, N, rv)

    ax = np.asarray(env.a(np.linalg.norm(x, axis=1)), dtype=float)
    b = env.b_of(t)
    c = env.c_of(t)
    Gv = G.evaluate(v)
    F = lagrangian.value(t, x, v)
    Fx = np.linalg.norm(lagrangian.dx(t, x, v), axis=1)
    Fv = lagrangian.dv(t, x, v)
    conj_Fv = conjugate_value(G, Fv)
    conj_grad = conjugate_value(G, gradient_value(G, v))

    viol = {
        "F2": max_or_zero(scaled_violation(np.abs(F), ax * (b + Gv))),
        "F3": max_or_zero(scaled_violation(Fx, ax * (b + Gv))),
        "F4": max_or_zero(scaled_violation(conj_Fv, ax * (c + conj_grad))),
        "b_nonnegative": max_or_zero(np.where(np.isfinite(b), np.maximum(-b, 0.0), np.inf)),
        "c_nonnegative": max_or_zero(np.where(np.isfinite(c), np.maximum(-c, 0.0), np.inf)),
    }
    r = np.linalg.norm(x, axis=1)
    grid, alpha = envelope_alpha(env.a, max(rx, float(r.max(initial=0.0))))
    # alpha is nondecreasing, so alpha(|x|) <= alpha at the next grid node
    idx = np.minimum(np.searchsorted(grid, r), grid.size - 1)
    viol["alpha_envelope"] = max_or_zero(scaled_violation(ax, alpha[idx]))
    return CheckReport("growth_conditions", viol, samples,
                       details={"lagrangian": lagrangian.name,
                                "alpha_max": float(alpha[-1])})


def _ball(rng, m, N, radius):
    d = rng.standard_normal((m, N))
    d /= np.linalg.norm(d, axis=1)[:, None]
    return d * radius * rng.uniform(0.0, 1.0, (m, 1)) ** (1.0 / N)


# ---------------------------------------------------------------------------
# minimization

@dataclass
class MinimizeResult:
    minimizer: SobolevFunction
    action: float
    grad_inf_norm: float
    iterations: int
    termination: str
    history: list = field(default_factory=list)

    def to_dict(self):
        return {"action": self.action, "grad_inf_norm": self.grad_inf_norm,
                "iterations": self.iterations, "termination": self.termination}


ROUNDOFF = 1e3 * np.finfo(float).eps


def _preconditioner(problem):
    # discrete H^1 inner product on interior nodes: (1/h) stiffness + h mass
    m = problem.cells - 1
    h = problem.h
    ab = np.zeros((3, m))
    ab[0, 1:] = -1.0 / h
    ab[1, :] = 2.0 / h + h
    ab[2, :-1] = -1.0 / h
    return ab


def minimize(problem: LagrangianProblem, initial: SobolevFunction | None = None,
             tolerance: float = 1e-8, max_iters: int = 50_000,
             c1: float = 1e-4, shrink: float = 0.5, step0: float = 1.0,
             step_min: float = 1e-16) -> MinimizeResult:
    """Armijo descent on the interior nodal values.

    The search direction is the gradient mapped through the discrete H^1
    inner product (a tridiagonal solve), which keeps the iteration count
    independent of the grid size. Stops when the max-norm of the gradient
    is at most ``tolerance``.
    """
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    u0 = linear_initial(problem) if initial is None else initial
    _validate(problem, u0)
    vals = np.array(u0.values, dtype=float)
    vals[0], vals[-1] = problem.left, problem.right
    ab = _preconditioner(problem)

    I = _action_values(problem, vals)
    g = _gradient_values(problem, vals)
    gnorm = float(np.max(np.abs(g)))
    history = [(I, gnorm)]
    termination = "max_iters"
    it = 0
    while it < max_iters:
        if gnorm <= tolerance:
            termination = "converged"
            break
        d = -solve_banded((1, 1), ab, g)
        slope = float(np.sum(g * d))
        noise = ROUNDOFF * max(1.0, abs(I))
        step = step0
        g_new = None
        while step >= step_min:
            trial = vals.copy()
            trial[1:-1] += step * d
            I_new = _action_values(problem, trial)
            if c1 * step * abs(slope) >= noise:
                if I_new <= I + c1 * step * slope:
                    break
            elif I_new <= I:
                # predicted decrease is below the rounding level of the
                # action: require a nonpositive directional derivative instead
                g_new = _gradient_values(problem, trial)
                if float(np.sum(g_new * d)) <= 0.0:
                    break
                g_new = None
            step *= shrink
        else:
            termination = "line_search_failed"
            break
        vals, I = trial, I_new
        g = _gradient_values(problem, vals) if g_new is None else g_new
        gnorm = float(np.max(np.abs(g)))
        it += 1
        history.append((I, gnorm))
    else:
        if gnorm <= tolerance:
            termination = "converged"
    return MinimizeResult(u0.with_values(vals), I, gnorm, it, termination, history)


# ---------------------------------------------------------------------------
# named Lagrangians

def _zeros(t, x, v):
    return np.zeros_like(x)


def g_action(G: GFunction, interval: Interval | None = None) -> Lagrangian:
    """F = G(v); bounded by its own envelope a = 1, b = c = 0."""
    return Lagrangian(
        F=lambda t, x, v: G.evaluate(v),
        F_x=_zeros,
        F_v=lambda t, x, v: gradient_value(G, v),
        envelope=Envelope(lambda s: np.ones_like(s), 0.0, 0.0, interval),
        reference_G=G, name=f"g_action[{G.kind}]")


def _e1(x):
    e = np.zeros_like(x)
    e[:, 0] = 1.0
    return e


# name -> (V, grad V, a, b) with |V| and |grad V| below a(|x|) * b
POTENTIALS = {
    "linear": (lambda x: x[:, 0], _e1,
               lambda s: 1.0 + s, 1.0),
    "sine": (lambda x: np.sin(x[:, 0]), lambda x: np.cos(x[:, 0])[:, None] * _e1(x),
             lambda s: 2.0 + 0.0 * s, 1.0),
    "harmonic": (lambda x: 0.5 * np.sum(x * x, axis=1), lambda x: x,
                 lambda s: 1.0 + s + 0.5 * s * s, 1.0),
}


def g_plus_potential(G: GFunction, potential: str,
                     interval: Interval | None = None) -> Lagrangian:
    """F = G(v) + V(x) with a named potential V (linear: x_1, sine:
    sin x_1, harmonic: |x|^2/2)."""
    if potential not in POTENTIALS:
        raise KeyError(potential)
    V, dV, a, b = POTENTIALS[potential]
    return Lagrangian(
        F=lambda t, x, v: G.evaluate(v) + V(x),
        F_x=lambda t, x, v: dV(x),
        F_v=lambda t, x, v: gradient_value(G, v),
        envelope=Envelope(a, b, 0.0, interval),
        reference_G=G, name=f"g_plus_potential[{G.kind},{potential}]")


def _kinetic(dim, interval=None):
    L = g_action(make_builtin({"kind": "power", "p": 2.0, "dimension": dim}), interval)
    return Lagrangian(L.F, L.F_x, L.F_v, L.envelope, L.reference_G, "kinetic")


def _kinetic_plus(potential, name):
    def build(dim, interval=None):
        G = make_builtin({"kind": "power", "p": 2.0, "dimension": dim})
        L = g_plus_potential(G, potential, interval)
        env = L.envelope
        if potential == "sine":
            env = Envelope(lambda s: s + 2.0, 1.0, 1.0, interval)
        return Lagrangian(L.F, L.F_x, L.F_v, env, G, name)
    return build


def _cubic(dim, interval=None):
    """|v|^3 against the quadratic reference G = |v|^2/2 (fails the bounds)."""
    G = make_builtin({"kind": "power", "p": 2.0, "dimension": dim})

    def Fv(t, x, v):
        return 3.0 * np.linalg.norm(v, axis=1)[:, None] * v

    return Lagrangian(
        F=lambda t, x, v: np.linalg.norm(v, axis=1) ** 3,
        F_x=_zeros, F_v=Fv,
        envelope=Envelope(lambda s: np.ones_like(s), 1.0, 1.0, interval),
        reference_G=G, name="cubic")


NAMED_LAGRANGIANS = {
    "kinetic": _kinetic,
    "kinetic_plus_linear": _kinetic_plus("linear", "kinetic_plus_linear"),
    "kinetic_plus_sine": _kinetic_plus("sine", "kinetic_plus_sine"),
    "cubic": _cubic,
}


def named_lagrangian(name: str, dimension: int = 1,
                     interval: Interval | None = None) -> Lagrangian:
    if name not in NAMED_LAGRANGIANS:
        raise KeyError(name)
    return NAMED_LAGRANGIANS[name](dimension, interval)


# ---------------------------------------------------------------------------
# finite-difference oracle

def fd_action_gradient(problem: LagrangianProblem, u: SobolevFunction) -> np.ndarray:
    """Central differences of the discrete action in each interior nodal
    coordinate (step ``eps**(1/3) * max(1, |u_j|)``)."""
    _validate(problem, u)
    vals = np.array(u.values, dtype=float)
    out = np.empty((problem.cells - 1, problem.dimension))
    for j in range(1, problem.cells):
        for k in range(problem.dimension):
            h = float(fd_step(vals[j, k:k + 1]))
            plus, minus = vals.copy(), vals.copy()
            plus[j, k] += h
            minus[j, k] -= h
            out[j - 1, k] = (_action_values(problem, plus)
                             - _action_values(problem, minus)) / (2.0 * h)
    return out


def gradient_oracle_check(problem: LagrangianProblem, u: SobolevFunction,
                          tolerance: float = 1e-5) -> CheckReport:
    """Relative max-norm error between :func:`gradient` and the
    finite-difference oracle."""
    g = gradient(problem, u)
    g_fd = fd_action_gradient(problem, u)
    scale = max(float(np.max(np.abs(g))), float(np.max(np.abs(g_fd))), np.finfo(float).tiny)
    err = float(np.max(np.abs(g - g_fd))) / scale
    return CheckReport("gradient_oracle", {"gradient_oracle": err}, 1, tolerance,
                       details={"grad_inf_norm": float(np.max(np.abs(g)))})


def random_problem(rng, builtins=None):
    """A random (problem, u) pair over the named and G-based Lagrangians."""
    from .gfunc import make_builtin as _mb

    builtins = builtins or [
        {"kind": "power", "p": 2.0}, {"kind": "power", "p": 1.5}, {"kind": "power", "p": 3.0},
        {"kind": "quad_quartic"}, {"kind": "sum_powers", "p": [2.0, 4.0]},
        {"kind": "sum_powers", "p": [1.5, 3.0], "normalized": False},
    ]
    a = float(rng.uniform(-1.0, 1.0))
    interval = Interval(a, a + float(rng.uniform(0.5, 3.0)))
    n = int(rng.integers(2, 17))
    choice = int(rng.integers(0, 3))
    if choice == 0:
        name = sorted(NAMED_LAGRANGIANS)[int(rng.integers(0, len(NAMED_LAGRANGIANS)))]
        dim = int(rng.integers(1, 4))
        lag = named_lagrangian(name, dim, interval)
    else:
        desc = dict(builtins[int(rng.integers(0, len(builtins)))])
        G = _mb(desc)
        dim = G.dimension
        if choice == 1:
            lag = g_action(G, interval)
        else:
            pot = sorted(POTENTIALS)[int(rng.integers(0, len(POTENTIALS)))]
            lag = g_plus_potential(G, pot, interval)
    vals = rng.uniform(-2.0, 2.0, (n + 1, dim))
    problem = LagrangianProblem(lag, interval, n, dim, vals[0], vals[-1])
    return problem, SobolevFunction.from_values(interval, vals)
