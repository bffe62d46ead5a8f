import math

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from orlicz.funcspace import (CellFunction, GridFunction, Interval, convergence_diagnostic,
                              duality_pairing, holder_check, jensen_check,
                              l1_embedding_constant, luxemburg_norm, modular,
                              modular_norm_bounds_check, random_grid_function,
                              sample_family)
from orlicz.gfunc import conjugate_function, make_builtin

from oracles import NORM_A, NORM_A_PRIME, NORM_B, NORM_B_COMPANION

QQ = make_builtin({"kind": "quad_quartic"})
P2 = make_builtin({"kind": "power", "p": 2})
XY4 = make_builtin({"kind": "sum_powers", "p": [2, 4], "normalized": False})
UNIT = Interval(0.0, 1.0)


def const(value, interval=UNIT, n=1):
    return GridFunction(interval, np.tile(np.asarray(value, float), (n + 1, 1)))


# ---------------------------------------------------------------- types

def test_interval_rejects_empty():
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)


def test_grid_function_is_immutable_and_exact_spacing():
    u = GridFunction(Interval(0.0, 3.0), np.zeros((7, 2)))
    assert u.n == 6 and u.h == 0.5 and u.dimension == 2
    with pytest.raises(ValueError):
        u.values[0, 0] = 1.0


def test_grid_function_rejects_nonfinite():
    with pytest.raises(ValueError):
        GridFunction(UNIT, [[0.0], [np.nan]])


def test_grid_function_needs_two_nodes():
    with pytest.raises(ValueError):
        GridFunction(UNIT, [[1.0, 2.0]])


# ---------------------------------------------------------------- modular

def test_modular_examples():
    assert modular(P2, const([2.0, 0.0])) == pytest.approx(2.0)
    assert modular(QQ, const([2.0, 1.5])) == pytest.approx(5.3125)
    assert modular(QQ, const([0.0, 0.0])) == 0.0


def test_modular_dimension_mismatch():
    with pytest.raises(ValueError):
        modular(QQ, const([1.0, 2.0, 3.0]))


# ---------------------------------------------------------------- norm

def test_norm_example_a():
    assert luxemburg_norm(QQ, const([2.0, 0.0])).norm == pytest.approx(NORM_A, abs=1e-10)


def test_norm_example_a_prime():
    res = luxemburg_norm(QQ, const([2.0, 1.5]))
    assert res.norm == pytest.approx(NORM_A_PRIME, abs=1e-8)
    assert abs(res.modular_at_norm - 1.0) <= 1e-10


def test_norm_example_b():
    u = const([1.0, 0.0], Interval(0.0, math.pi))
    assert luxemburg_norm(XY4, u).norm == pytest.approx(NORM_B, abs=1e-8)


def test_norm_example_b_companion_is_quadrature_limited():
    v = sample_family("cos_sqrt_sin", Interval(0.0, math.pi), 4096)
    assert luxemburg_norm(XY4, v).norm == pytest.approx(NORM_B_COMPANION, abs=2e-3)


def test_norm_zero_iff_zero():
    res = luxemburg_norm(QQ, const([0.0, 0.0]))
    assert res.norm == 0.0 and res.bisection_iterations == 0


def test_norm_bisection_brackets_the_root():
    u = random_grid_function(np.random.default_rng(0), 2)
    a = luxemburg_norm(QQ, u).norm
    assert modular(QQ, u.with_values(u.values / a)) <= 1.0
    assert modular(QQ, u.with_values(u.values / (a * (1 - 1e-10)))) > 1.0


def test_norm_handles_plateau():
    G = make_builtin({"kind": "plateau", "radius": 1.0, "p": 2.0})
    # R(c/alpha) = (c/alpha)^2 - 1 on [0, 1], root alpha = c / sqrt(2)
    assert luxemburg_norm(G, const([3.0, 0.0])).norm == pytest.approx(3.0 / math.sqrt(2.0))


def test_norm_cell_function_uses_midpoint_rule():
    v = CellFunction(UNIT, [[1.0], [3.0]])
    # (1 + 9) / 2 / 2 / alpha^2 = 1
    assert luxemburg_norm(make_builtin({"kind": "power", "p": 2, "dimension": 1}), v).norm \
        == pytest.approx(math.sqrt(2.5))


def test_norm_axioms_random_suite():
    rng = np.random.default_rng(42)
    for G in (P2, QQ, make_builtin({"kind": "sum_powers", "p": [2, 4]})):
        for _ in range(350):
            u = random_grid_function(rng, 2, smooth=bool(rng.integers(2)))
            v = random_grid_function(rng, 2, n=u.n)
            lam = rng.uniform(-4, 4)
            nu, nv = luxemburg_norm(G, u).norm, luxemburg_norm(G, v).norm
            assert luxemburg_norm(G, lam * u).norm == pytest.approx(abs(lam) * nu, rel=1e-9)
            assert luxemburg_norm(G, u + v).norm <= nu + nv + 1e-9
            assert nu > 0


def test_anisotropy_witness():
    u, v = const([2.0, 0.0]), const([2.0, 1.5])
    assert np.all(np.linalg.norm(u.values, axis=1) < np.linalg.norm(v.values, axis=1))
    assert np.all(QQ.evaluate(u.values) < QQ.evaluate(v.values))
    assert modular(QQ, u) <= modular(QQ, v)
    assert luxemburg_norm(QQ, u).norm > luxemburg_norm(QQ, v).norm


def test_refinement_is_second_order():
    errs = []
    for n in (32, 64, 128):
        v = GridFunction.from_callable(UNIT, n, lambda t: np.stack([t * t, np.exp(t)], 1))
        errs.append(luxemburg_norm(QQ, v).norm)
    d1, d2 = abs(errs[1] - errs[0]), abs(errs[2] - errs[1])
    assert 3.5 < d1 / d2 < 4.5


# ---------------------------------------------------------------- pairing / Hoelder

def test_pairing_examples():
    assert duality_pairing(const([1.0, 0.0]), const([0.0, 1.0])) == 0.0
    I2 = Interval(0.0, 2.0)
    assert duality_pairing(const([2.0, 0.0], I2), const([3.0, 4.0], I2)) == pytest.approx(12.0)
    s = sample_family("sine", UNIT, 256, amplitude=[1.0, 0.0])
    assert duality_pairing(s, s) == pytest.approx(0.5, abs=1e-4)


def test_pairing_grid_mismatch():
    with pytest.raises(ValueError):
        duality_pairing(const([1.0, 0.0], n=2), const([1.0, 0.0], n=3))


def test_holder_equality_case():
    rep = holder_check(P2, const([1.0, 0.0]), const([1.0, 0.0]))
    assert rep.passed
    assert rep.details["bound"] == pytest.approx(1.0)
    assert rep.details["pairing"] == pytest.approx(1.0)


def test_holder_zero():
    rep = holder_check(QQ, const([0.0, 0.0]), const([1.0, 3.0]))
    assert rep.details["pairing"] == 0.0 and rep.details["bound"] == 0.0


def test_holder_random_suite():
    rng = np.random.default_rng(7)
    Gs = [P2, QQ, make_builtin({"kind": "power", "p": 1.5})]
    conj = [conjugate_function(G) for G in Gs]
    for i in range(1000):
        G, Gs_ = Gs[i % 3], conj[i % 3]
        u = random_grid_function(rng, 2)
        v = random_grid_function(rng, 2, n=u.n)
        assert holder_check(G, u, v, Gs_).passed


# ---------------------------------------------------------------- Jensen

def test_jensen_constant_is_equality():
    rep = jensen_check(QQ, const([1.0, -2.0]))
    assert rep.details["lhs"] == pytest.approx(rep.details["rhs"])


def test_jensen_linear_example():
    G1 = make_builtin({"kind": "power", "p": 2, "dimension": 1})
    u = GridFunction.from_callable(UNIT, 2000, lambda t: t[:, None])
    rep = jensen_check(G1, u)
    assert rep.details["lhs"] == pytest.approx(1 / 8)
    assert rep.details["rhs"] == pytest.approx(1 / 6, abs=1e-6)


def test_jensen_random_suite():
    rng = np.random.default_rng(3)
    for i in range(1000):
        u = random_grid_function(rng, 2, smooth=bool(i % 2))
        assert jensen_check(QQ, u).passed


# ---------------------------------------------------------------- modular vs norm

def test_modular_norm_example():
    rep = modular_norm_bounds_check(P2, const([2.0, 0.0]))
    assert rep.details["modular"] == pytest.approx(2.0)
    assert rep.details["norm"] == pytest.approx(math.sqrt(2.0))
    assert rep.passed


def test_modular_one_gives_norm_one():
    # |u|^2/2 = 1 on [0, 1]
    u = const([math.sqrt(2.0), 0.0])
    assert luxemburg_norm(P2, u).norm <= 1.0 + 1e-12


def test_modular_norm_random_suite():
    rng = np.random.default_rng(5)
    for i in range(1000):
        u = random_grid_function(rng, 2, scale=float(rng.choice([0.1, 1.0, 3.0])))
        assert modular_norm_bounds_check(QQ, u).passed


# ---------------------------------------------------------------- convergence

def test_convergence_identical_sequence():
    u = const([1.0, 2.0])
    rep = convergence_diagnostic(QQ, [u, u, u], u)
    assert rep.norms == [0.0, 0.0, 0.0] and rep.modular_differences == [0.0, 0.0, 0.0]
    assert rep.co_convergent and rep.modulars_converge


def test_convergence_constant_shift():
    u = const([0.5, -1.0])
    seq = [u + const([1.0 / n, 0.0]) for n in range(1, 200)]
    rep = convergence_diagnostic(P2, seq, u, tail_tol=1e-2)
    for n, (nrm, mod) in enumerate(zip(rep.norms, rep.modular_differences), start=1):
        assert nrm == pytest.approx(1 / n / math.sqrt(2.0))
        assert mod == pytest.approx(1 / (2 * n * n))
    assert rep.co_convergent and rep.modular_tracks_norm and rep.modulars_converge
    assert not convergence_diagnostic(P2, seq[:5], u, tail_tol=1e-2).co_convergent


def test_truncated_power_modular_grows_under_refinement():
    mods = []
    for n in (2**6, 2**9, 2**12, 2**15):
        u = sample_family("truncated_power", UNIT, n, height=float(n) ** 0.25)
        mods.append(modular(XY4, u))
    # G(u(t)) = 1/t is not integrable: the discrete modular keeps growing
    assert all(b > a + 1.0 for a, b in zip(mods, mods[1:]))


# ---------------------------------------------------------------- embedding

def test_l1_embedding_random_suite():
    rng = np.random.default_rng(9)
    for G in (P2, QQ, make_builtin({"kind": "plateau", "radius": 1.0, "p": 2.0})):
        I = Interval(0.0, 2.0)
        C1 = l1_embedding_constant(G, I)
        for _ in range(300):
            u = random_grid_function(rng, 2, I)
            l1 = u.integrate(np.linalg.norm(u.values, axis=1))
            assert l1 <= C1 * luxemburg_norm(G, u).norm * (1 + 1e-12)


def test_norm_at_extreme_scales():
    for scale in (1e-300, 1.1754943508222875e-38, 1e-20, 1e150):
        u = const([0.0, scale], n=1)
        res = luxemburg_norm(QQ, u)
        assert res.norm > 0
        assert modular(QQ, u.with_values(u.values / res.norm)) <= 1.0


@settings(max_examples=100, deadline=None)
@example(vals=[0.0, 0.0, 0.0, 1.1754943508222875e-38], lam=1.0)
@given(st.lists(st.floats(-5, 5, allow_nan=False, allow_subnormal=False), min_size=4, max_size=20),
       st.floats(-3, 3, allow_nan=False).filter(lambda x: abs(x) > 1e-3))
def test_homogeneity_property(vals, lam):
    u = GridFunction(UNIT, np.reshape(vals[: len(vals) // 2 * 2], (-1, 2)))
    if not np.any(u.values):
        return
    a = luxemburg_norm(QQ, u).norm
    assert luxemburg_norm(QQ, lam * u).norm == pytest.approx(abs(lam) * a, rel=1e-9)
