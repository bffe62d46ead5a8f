"""Command-line entry point: ``orlicz <command> --input IN --output OUT``.

Exit status: 0 success, 1 a check reported violations (or a solve did not
converge), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import io
from .funcspace import (holder_check, jensen_check, luxemburg_norm, modular,
                        modular_norm_bounds_check)
from .gfunc import (ConjugateNotConverged, GrowthEstimationError, brezis_lieb_check,
                    check_gfunction_axioms, check_pointwise_identities,
                    conjugate_function, conjugate_solve, estimate_growth)
from .io import InputError
from .sobolev import (equivalence_check, estimate_linf_constant, linf_bound_check,
                      poincare_check, sobolev_mean_check, w1_alt_norm, w1_norm)
from .suite import DEFAULT_SIZES, SUITE_HELP, run_suite
from .variational import check_growth_conditions, euler_lagrange_residual, minimize

GROWTH_KEYS = ("radius_max", "directions", "radii", "M1", "M2", "K2_max")
OVERRIDE_KEYS = ("tolerance", "n", "samples", "max_iters") + GROWTH_KEYS + tuple(DEFAULT_SIZES)

COMMANDS = ("norm", "conjugate", "growth", "identities", "inequalities", "minimize", "suite")

SCHEMAS = """\
Input schemas (JSON):
  G descriptor   {"kind": "power", "p": 2.0, "dimension": 2}
                 {"kind": "sum_powers", "p": [2.0, 4.0], "normalized": true}
                 {"kind": "quad_quartic"}
                 {"kind": "plateau", "radius": 1.0, "p": 2.0, "dimension": 2}
                 {"kind": "nonconvex_test_double"}   (negative control)
  grid function  {"interval": [a, b], "n": cells, "dimension": N, "values": [[...], ...]}
                 {"interval": [a, b], "n": cells,
                  "sampled_expression": {"family": F, "params": {...}}}
                 families: constant(value), linear(start, end),
                 sine(amplitude, frequency=1, phase=0), cos_sqrt_sin(scale=1.1),
                 truncated_power(height); add "boundary": "free"|"zero_trace"
                 for Sobolev quantities

  norm          {"g": G, "u": grid}
  conjugate     {"g": G, "y": [y] or [[y1], [y2], ...]}
  growth        {"g": G, "radius_max": 1e3, "directions": 64, "radii": 64}
                or {"lagrangian": L, "dimension": N, "box": {"x": 5, "v": 5}}
  identities    {"g": G}
  inequalities  {"g": G, "u": grid, "v": grid (optional), "linf_C": C (optional)}
  minimize      {"lagrangian": L, "interval": [a, b], "n": 64, "dimension": N,
                 "boundary": {"left": [...], "right": [...]}, "tolerance": 1e-8}
                 L = {"kind": "g_action", "g": G}
                   | {"kind": "g_plus_potential", "g": G, "potential": linear|sine|harmonic}
                   | {"kind": "named", "name": kinetic|kinetic_plus_linear|
                                               kinetic_plus_sine|cubic}
  suite         optional {"g": [G, ...], "sizes": {...}}

Overrides (--set key=value): tolerance, n, samples, max_iters, the growth
keys (radius_max, directions, radii, M1, M2, K2_max), plus any suite size
(cases, pointwise, gradient_problems, growth_samples, max_cells).
A CSV sidecar (same path, .csv suffix) is written for grid-valued results.
"""


@dataclass
class RunConfig:
    command: str
    input_path: str | None = None
    output_path: str | None = None
    seed: int = 0
    overrides: dict = field(default_factory=dict)


def _parse_override(text: str):
    if "=" not in text:
        raise InputError("--set", f"expected key=value, got {text!r}")
    key, raw = text.split("=", 1)
    key = key.strip()
    if key not in OVERRIDE_KEYS:
        raise InputError("--set", f"unknown key {key!r}; known: {list(OVERRIDE_KEYS)}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="orlicz",
        description="Anisotropic Orlicz space computations.",
        epilog=SCHEMAS + "\n" + SUITE_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", dest="input_path")
    p.add_argument("--output", dest="output_path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE")
    return p


# ---------------------------------------------------------------------------
# commands; each returns (payload, status, csv) with csv = (header, rows) or None

def _samples(cfg, default=1000):
    return io._number(cfg.overrides.get("samples", default), "samples",
                      positive=True, integer=True)


def _tolerance(cfg, default=1e-9):
    return io._number(cfg.overrides.get("tolerance", default), "tolerance", positive=True)


def _reports_payload(reports, tol):
    out = {}
    for rep in reports:
        rep.tolerance = tol
        out[rep.name] = rep.to_dict()
    passed = all(r.passed for r in reports)
    return {"passed": passed, "reports": out}, (0 if passed else 1)


def cmd_norm(data, cfg):
    G = io.parse_g(io._require(data, "g", ""))
    u_obj = io._require(data, "u", "")
    n = cfg.overrides.get("n")
    u = io.parse_sobolev(u_obj, "u", n)
    if G.dimension != u.dimension:
        raise InputError("u.dimension", f"G acts on R^{G.dimension}, u has dimension {u.dimension}")
    res = luxemburg_norm(G, u.base)
    out = {"norm": res.norm, "modular": modular(G, u.base),
           "modular_at_norm": res.modular_at_norm,
           "bisection_iterations": res.bisection_iterations,
           "g": G.descriptor, "n": u.n, "dimension": u.dimension}
    if "boundary" in u_obj:
        out["w1_norm"] = w1_norm(G, u)
        out["w1_alt_norm"] = w1_alt_norm(G, u)
        out["derivative_norm"] = luxemburg_norm(G, u.derivative).norm
    return out, 0, (["t"] + [f"u{i + 1}" for i in range(u.dimension)],
                    io.grid_csv_rows(u.base))


def cmd_conjugate(data, cfg):
    G = io.parse_g(io._require(data, "g", ""))
    y = io._require(data, "y", "")
    if not isinstance(y, list) or not y:
        raise InputError("y", "expected a point or a list of points")
    rows = y if isinstance(y[0], list) else [y]
    Y = np.array([io._vector(r, f"y[{i}]", G.dimension) for i, r in enumerate(rows)])
    try:
        res = conjugate_solve(G, Y, strict=False)
    except ConjugateNotConverged as exc:  # pragma: no cover - strict=False
        raise InputError("y", str(exc)) from None
    out = {"g": G.descriptor, "y": Y, "values": res.values, "maximizers": res.maximizers,
           "converged": res.converged, "fallback_rows": res.fallback_rows}
    if G.conjugate_closed_form is not None:
        out["closed_form"] = np.asarray(G.conjugate_closed_form(Y), dtype=float)
    status = 0 if bool(np.all(res.converged)) else 1
    return out, status, None


def cmd_growth(data, cfg):
    if "lagrangian" in data:
        dim = io._number(io._require(data, "dimension", ""), "dimension",
                         positive=True, integer=True)
        interval = io.parse_interval(data["interval"]) if "interval" in data else None
        lag = io.parse_lagrangian(data["lagrangian"], dim, interval)
        box = data.get("box")
        if box is not None and not isinstance(box, dict):
            raise InputError("box", "expected an object")
        rep = check_growth_conditions(lag, samples=_samples(cfg), box=box, seed=cfg.seed)
        payload, status = _reports_payload([rep], _tolerance(cfg))
        payload["lagrangian"] = lag.name
        return payload, status, None
    G = io.parse_g(io._require(data, "g", ""))
    kw = {}
    for key in GROWTH_KEYS:
        integer = key in ("directions", "radii")
        if key in data or key in cfg.overrides:
            kw[key] = io._number(cfg.overrides.get(key, data.get(key)), key,
                                 positive=True, integer=integer)
    try:
        rep = estimate_growth(G, seed=cfg.seed, **kw)
    except GrowthEstimationError as exc:
        return {"g": G.descriptor, "error": str(exc), "consistent": False}, 1, None
    out = rep.to_dict()
    out["g"] = G.descriptor
    return out, (0 if rep.consistent else 1), None


def cmd_identities(data, cfg):
    G = io.parse_g(io._require(data, "g", ""))
    n = _samples(cfg)
    reports = [check_gfunction_axioms(G, samples=n, seed=cfg.seed)]
    if reports[0].passed:
        reports.append(check_pointwise_identities(G, samples=n, seed=cfg.seed))
        reports.append(brezis_lieb_check(G, samples=n, seed=cfg.seed))
    payload, status = _reports_payload(reports, _tolerance(cfg))
    payload["g"] = G.descriptor
    return payload, status, None


def cmd_inequalities(data, cfg):
    G = io.parse_g(io._require(data, "g", ""))
    u_obj = io._require(data, "u", "")
    n = cfg.overrides.get("n")
    u = io.parse_sobolev(u_obj, "u", n)
    if G.dimension != u.dimension:
        raise InputError("u.dimension", f"G acts on R^{G.dimension}, u has dimension {u.dimension}")
    reports = [jensen_check(G, u.base), modular_norm_bounds_check(G, u.base)]
    if "v" in data:
        v = io.parse_grid(data["v"], "v", n)
        if v.values.shape != u.values.shape or v.interval != u.interval:
            raise InputError("v", "v must live on the same grid as u")
        reports.append(holder_check(G, u.base, v, conjugate_function(G)))
    reports.append(sobolev_mean_check(G, u))
    reports.append(equivalence_check(G, u))
    if u.boundary == "zero_trace":
        reports.append(poincare_check(G, u))
    if "linf_C" in data:
        C = io._number(data["linf_C"], "linf_C", positive=True)
    else:
        C = estimate_linf_constant(G, u.interval, seed=cfg.seed)
    reports.append(linf_bound_check(G, u, C))
    payload, status = _reports_payload(reports, _tolerance(cfg))
    payload["g"] = G.descriptor
    return payload, status, None


def cmd_minimize(data, cfg):
    problem, tol, max_iters, initial = io.parse_problem(data, cfg.overrides)
    res = minimize(problem, initial, tolerance=tol, max_iters=max_iters)
    u = res.minimizer
    resid = np.full((u.n + 1, u.dimension), np.nan)
    resid[1:-1] = euler_lagrange_residual(problem, u)
    out = res.to_dict()
    out.update(lagrangian=problem.lagrangian.name, n=problem.cells,
               dimension=problem.dimension, tolerance=tol,
               action_history_nonincreasing=bool(all(
                   b[0] <= a[0] for a, b in zip(res.history, res.history[1:]))),
               initial_action=res.history[0][0])
    header = (["t"] + [f"u{i + 1}" for i in range(u.dimension)]
              + [f"residual{i + 1}" for i in range(u.dimension)])
    status = 0 if res.termination == "converged" else 1
    return out, status, (header, io.grid_csv_rows(u.base, resid))


def cmd_suite(data, cfg):
    data = data or {}
    sizes = dict(data.get("sizes", {}))
    for key in DEFAULT_SIZES:
        if key in cfg.overrides:
            sizes[key] = cfg.overrides[key]
    if "samples" in cfg.overrides:
        sizes.setdefault("cases", cfg.overrides["samples"])
        sizes.setdefault("pointwise", cfg.overrides["samples"])
    for key, val in sizes.items():
        if key not in DEFAULT_SIZES:
            raise InputError(f"sizes.{key}", f"unknown size; known: {sorted(DEFAULT_SIZES)}")
        sizes[key] = io._number(val, f"sizes.{key}", positive=True, integer=True)
    descs = None
    if "g" in data:
        if not isinstance(data["g"], list) or not data["g"]:
            raise InputError("g", "expected a non-empty list of G descriptors")
        for i, d in enumerate(data["g"]):
            io.parse_g(d, f"g[{i}]")
        descs = data["g"]
    report = run_suite(cfg.seed, sizes, descs)
    return report, (0 if report["passed"] else 1), None


DISPATCH = {
    "norm": cmd_norm, "conjugate": cmd_conjugate, "growth": cmd_growth,
    "identities": cmd_identities, "inequalities": cmd_inequalities,
    "minimize": cmd_minimize, "suite": cmd_suite,
}


def run(cfg: RunConfig) -> int:
    """Execute one command; writes the JSON summary (and CSV sidecar)."""
    if cfg.command not in DISPATCH:
        raise InputError("command", f"unknown command {cfg.command!r}")
    if cfg.input_path is None:
        if cfg.command != "suite":
            raise InputError("--input", "required for this command")
        data = None
    else:
        data = io.load_json(cfg.input_path)
        if not isinstance(data, dict):
            raise InputError("<root>", "expected a JSON object")
    payload, status, table = DISPATCH[cfg.command](data, cfg)
    payload = {"command": cfg.command, "seed": cfg.seed, "status": status, **payload}
    text = io.dumps(payload)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        if table is not None:
            io.write_csv(os.path.splitext(cfg.output_path)[0] + ".csv", *table)
    else:
        sys.stdout.write(text)
    return status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = dict(_parse_override(s) for s in args.overrides)
        cfg = RunConfig(args.command, args.input_path, args.output_path, args.seed, overrides)
        return run(cfg)
    except InputError as exc:
        print(f"orlicz: input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
