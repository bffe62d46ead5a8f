"""JSON/CSV ingestion and emission.

Floats are written with 17 significant digits so every value round-trips;
non-finite floats become ``null``.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from typing import Any

import numpy as np

from .funcspace import FAMILIES, GridFunction, Interval, sample_family
from .gfunc import DescriptorError, GFunction, make_builtin
from .sobolev import BOUNDARY_KINDS, SobolevFunction
from .variational import (NAMED_LAGRANGIANS, POTENTIALS, LagrangianProblem,
                          g_action, g_plus_potential, named_lagrangian)


class InputError(ValueError):
    """Malformed input; ``field`` is a dotted path to the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# ---------------------------------------------------------------------------
# emission

def format_float(x: float) -> str:
    return "%.17g" % (x + 0.0)  # folds -0.0 into 0


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj) if math.isfinite(obj) else "null"
    if obj is None:
        return "null"
    return json.dumps(obj)


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON text with 17-significant-digit floats."""
    return _encode(_plain(obj), indent, 0) + "\n"


def write_json(path: str, obj: Any) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def csv_text(header: list[str], rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (format_float(v) if isinstance(v, float) else v)
                    for v in row])
    return buf.getvalue()


def write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(header, rows))


def grid_csv_rows(u: GridFunction, extra=None):
    """Rows ``t, u_1..u_N[, extra_1..]`` with ``extra`` an (n+1, k) array
    whose NaN entries become empty cells."""
    rows = []
    for i, t in enumerate(u.t):
        row = [float(t)] + [float(x) for x in u.values[i]]
        if extra is not None:
            row += [None if not math.isfinite(e) else float(e) for e in extra[i]]
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# ingestion

def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise InputError(where or "<root>", "expected a JSON object")
    if key not in obj:
        raise InputError(_join(where, key), "missing required field")
    return obj[key]


def _join(where, key):
    return f"{where}.{key}" if where else str(key)


def _number(x, where, positive=False, integer=False):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputError(where, f"expected a number, got {json.dumps(x)}")
    if not math.isfinite(x):
        raise InputError(where, "must be finite")
    if integer and int(x) != x:
        raise InputError(where, "expected an integer")
    if positive and x <= 0:
        raise InputError(where, "must be positive")
    return int(x) if integer else float(x)


def _vector(x, where, dim=None):
    if not isinstance(x, list):
        raise InputError(where, "expected a list of numbers")
    vals = [_number(v, f"{where}[{i}]") for i, v in enumerate(x)]
    if dim is not None and len(vals) != dim:
        raise InputError(where, f"expected {dim} entries, got {len(vals)}")
    return vals


def parse_interval(x, where="interval") -> Interval:
    a, b = _vector(x, where, 2)
    if not a < b:
        raise InputError(where, "need a < b")
    return Interval(a, b)


def parse_g(desc, where="g") -> GFunction:
    if not isinstance(desc, dict):
        raise InputError(where, "expected a G-function descriptor object")
    try:
        return make_builtin(desc)
    except DescriptorError as exc:
        raise InputError(_join(where, exc.field), str(exc)) from None


def parse_grid(obj, where="u", n_override=None) -> GridFunction:
    """GridFunction from explicit values or a sampled named family."""
    interval = parse_interval(_require(obj, "interval", where), _join(where, "interval"))
    if "sampled_expression" in obj:
        se = obj["sampled_expression"]
        w = _join(where, "sampled_expression")
        fam = _require(se, "family", w)
        if fam not in FAMILIES:
            raise InputError(_join(w, "family"),
                             f"unknown family {fam!r}; known: {sorted(FAMILIES)}")
        n = n_override if n_override is not None else _require(obj, "n", where)
        n = _number(n, _join(where, "n"), positive=True, integer=True)
        params = se.get("params", {})
        if not isinstance(params, dict):
            raise InputError(_join(w, "params"), "expected an object")
        try:
            u = sample_family(fam, interval, n, **params)
        except (TypeError, ValueError) as exc:
            raise InputError(_join(w, "params"), str(exc)) from None
    else:
        values = _require(obj, "values", where)
        if not isinstance(values, list) or len(values) < 2:
            raise InputError(_join(where, "values"), "expected a list of at least two rows")
        dim = obj.get("dimension")
        if dim is not None:
            dim = _number(dim, _join(where, "dimension"), positive=True, integer=True)
        rows = []
        for i, row in enumerate(values):
            wi = f"{_join(where, 'values')}[{i}]"
            if isinstance(row, (int, float)) and not isinstance(row, bool):
                row = [row]
            rows.append(_vector(row, wi, dim if dim is not None else
                                (len(rows[0]) if rows else None)))
        if "n" in obj:
            n = _number(obj["n"], _join(where, "n"), positive=True, integer=True)
            if n + 1 != len(rows):
                raise InputError(_join(where, "values"),
                                 f"expected n+1={n + 1} rows, got {len(rows)}")
        u = GridFunction(interval, np.array(rows, dtype=float))
    if "dimension" in obj:
        dim = _number(obj["dimension"], _join(where, "dimension"), positive=True, integer=True)
        if dim != u.dimension:
            raise InputError(_join(where, "dimension"),
                             f"declared {dim} but values have dimension {u.dimension}")
    return u


def parse_sobolev(obj, where="u", n_override=None) -> SobolevFunction:
    base = parse_grid(obj, where, n_override)
    boundary = obj.get("boundary", "free")
    if boundary not in BOUNDARY_KINDS:
        raise InputError(_join(where, "boundary"), f"must be one of {list(BOUNDARY_KINDS)}")
    try:
        return SobolevFunction(base, boundary)
    except ValueError as exc:
        raise InputError(_join(where, "boundary"), str(exc)) from None


def parse_lagrangian(obj, dimension: int, interval: Interval | None, where="lagrangian"):
    kind = _require(obj, "kind", where)
    if kind == "g_action":
        G = parse_g(_require(obj, "g", where), _join(where, "g"))
        _check_dim(G, dimension, _join(where, "g"))
        return g_action(G, interval)
    if kind == "g_plus_potential":
        G = parse_g(_require(obj, "g", where), _join(where, "g"))
        _check_dim(G, dimension, _join(where, "g"))
        pot = _require(obj, "potential", where)
        if pot not in POTENTIALS:
            raise InputError(_join(where, "potential"),
                             f"unknown potential {pot!r}; known: {sorted(POTENTIALS)}")
        return g_plus_potential(G, pot, interval)
    if kind == "named":
        name = _require(obj, "name", where)
        if name not in NAMED_LAGRANGIANS:
            raise InputError(_join(where, "name"),
                             f"unknown Lagrangian {name!r}; known: {sorted(NAMED_LAGRANGIANS)}")
        return named_lagrangian(name, dimension, interval)
    raise InputError(_join(where, "kind"),
                     f"unknown Lagrangian kind {kind!r}; known: g_action, g_plus_potential, named")


def _check_dim(G, dimension, where):
    if G.dimension != dimension:
        raise InputError(where, f"G has dimension {G.dimension}, problem has {dimension}")


def parse_problem(obj, overrides: dict | None = None):
    """Returns ``(problem, tolerance, max_iters, initial_or_None)``."""
    overrides = overrides or {}
    interval = parse_interval(_require(obj, "interval", ""), "interval")
    n = _number(overrides.get("n", _require(obj, "n", "")), "n", positive=True, integer=True)
    if n < 2:
        raise InputError("n", "need at least 2 cells")
    dim = _number(_require(obj, "dimension", ""), "dimension", positive=True, integer=True)
    lag = parse_lagrangian(_require(obj, "lagrangian", ""), dim, interval)
    bnd = _require(obj, "boundary", "")
    left = _vector(_require(bnd, "left", "boundary"), "boundary.left", dim)
    right = _vector(_require(bnd, "right", "boundary"), "boundary.right", dim)
    tol = _number(overrides.get("tolerance", obj.get("tolerance", 1e-8)), "tolerance",
                  positive=True)
    max_iters = _number(overrides.get("max_iters", obj.get("max_iters", 50_000)),
                        "max_iters", positive=True, integer=True)
    problem = LagrangianProblem(lag, interval, n, dim, left, right)
    initial = None
    if "initial" in obj:
        initial = parse_sobolev(obj["initial"], "initial")
    return problem, tol, max_iters, initial


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError("--input", f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError("--input", f"malformed JSON at line {exc.lineno} column {exc.colno}: "
                         f"{exc.msg}") from None
