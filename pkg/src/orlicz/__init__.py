"""Anisotropic Orlicz and Orlicz-Sobolev spaces on an interval: G-functions,
Luxemburg norms of grid functions, the standard inequality suite and
minimization of discrete action functionals."""

from .funcspace import GridFunction, Interval, luxemburg_norm, modular
from .gfunc import GFunction, conjugate_value, estimate_growth, gradient_value, make_builtin
from .sobolev import SobolevFunction, w1_alt_norm, w1_norm
from .variational import Lagrangian, LagrangianProblem, action, gradient, minimize

__version__ = "0.1.0"

__all__ = [
    "GFunction", "make_builtin", "gradient_value", "conjugate_value", "estimate_growth",
    "Interval", "GridFunction", "modular", "luxemburg_norm",
    "SobolevFunction", "w1_norm", "w1_alt_norm",
    "Lagrangian", "LagrangianProblem", "action", "gradient", "minimize",
]
