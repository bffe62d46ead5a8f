import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orlicz.gfunc import (DescriptorError, brezis_lieb_check, check_gfunction_axioms,
                          check_pointwise_identities, compare_growth, conjugate_solve,
                          conjugate_value, estimate_growth, gradient_value, make_builtin,
                          numeric_conjugate)
from orlicz._numerics import central_gradient

from oracles import QQ_CONJ_11, qq_conjugate

BUILTINS = [
    {"kind": "power", "p": 2.0},
    {"kind": "power", "p": 1.5},
    {"kind": "power", "p": 4.0, "dimension": 3},
    {"kind": "power", "p": 3.0, "dimension": 1},
    {"kind": "quad_quartic"},
    {"kind": "sum_powers", "p": [2.0, 4.0]},
    {"kind": "sum_powers", "p": [1.5, 3.0], "normalized": False},
    {"kind": "plateau", "radius": 1.0, "p": 2.0},
]
IDS = [str(sorted(d.items())) for d in BUILTINS]


@pytest.fixture(params=BUILTINS, ids=IDS)
def G(request):
    return make_builtin(request.param)


# ---------------------------------------------------------------- make_builtin

def test_power_value():
    assert make_builtin({"kind": "power", "p": 2})([3.0, 4.0]) == pytest.approx(12.5)


def test_quad_quartic_value():
    assert make_builtin({"kind": "quad_quartic"})([2.0, 0.0]) == pytest.approx(4.0)


def test_sum_powers_normalized_value():
    G = make_builtin({"kind": "sum_powers", "p": [2, 4]})
    assert G([1.0, 1.0]) == pytest.approx(0.75)
    assert G.descriptor["normalized"] is True


def test_sum_powers_unnormalized_value():
    G = make_builtin({"kind": "sum_powers", "p": [2, 4], "normalized": False})
    assert G([1.0, 1.0]) == pytest.approx(2.0)


def test_plateau_is_zero_inside():
    G = make_builtin({"kind": "plateau", "radius": 1.0, "p": 2.0})
    assert G([0.6, 0.0]) == 0.0
    assert G([2.0, 0.0]) == pytest.approx(3.0)


@pytest.mark.parametrize("desc, field", [
    ({"kind": "power", "p": 1.0}, "p"),
    ({"kind": "power", "p": 0.5}, "p"),
    ({"kind": "sum_powers", "p": [2.0, 1.0]}, "p"),
    ({"kind": "sum_powers", "p": [2.0, 4.0], "dimension": 3}, "dimension"),
    ({"kind": "quad_quartic", "dimension": 3}, "dimension"),
    ({"kind": "nope"}, "kind"),
    ({"p": 2.0}, "kind"),
])
def test_descriptor_errors_name_the_field(desc, field):
    with pytest.raises(DescriptorError) as info:
        make_builtin(desc)
    assert info.value.field == field


def test_evaluate_rejects_wrong_dimension():
    with pytest.raises(ValueError):
        make_builtin({"kind": "quad_quartic"})([1.0, 2.0, 3.0])


# ---------------------------------------------------------------- gradients

def test_gradient_examples():
    P2 = make_builtin({"kind": "power", "p": 2})
    np.testing.assert_allclose(gradient_value(P2, [3.0, 4.0]), [3.0, 4.0])
    QQ = make_builtin({"kind": "quad_quartic"})
    np.testing.assert_allclose(gradient_value(QQ, [2.0, 1.0]), [2.0, 2.0])


def test_gradient_at_origin_vanishes(G):
    np.testing.assert_array_equal(gradient_value(G, np.zeros(G.dimension)),
                                  np.zeros(G.dimension))


def test_gradient_matches_finite_differences(G):
    rng = np.random.default_rng(3)
    X = rng.uniform(-4, 4, (300, G.dimension))
    if G.kind == "plateau":
        # keep away from the kink on the unit sphere
        r = np.linalg.norm(X, axis=1)
        X = X[np.abs(r - 1.0) > 1e-3]
    an = gradient_value(G, X)
    fd = central_gradient(G.evaluate, X)
    scale = np.maximum(1.0, np.abs(an))
    assert np.max(np.abs(an - fd) / scale) < 1e-5


def test_gradient_fallback_uses_finite_differences():
    from orlicz.gfunc import GFunction
    G = GFunction(2, lambda x: np.sum(x ** 4, axis=-1) / 4)
    np.testing.assert_allclose(gradient_value(G, [1.0, -2.0]), [1.0, -8.0], rtol=1e-8)


# ---------------------------------------------------------------- conjugates

def test_conjugate_examples():
    P2 = make_builtin({"kind": "power", "p": 2})
    assert conjugate_value(P2, [0.6, 0.8]) == pytest.approx(0.5, abs=1e-12)
    QQ = make_builtin({"kind": "quad_quartic"})
    assert conjugate_value(QQ, [1.0, 1.0]) == pytest.approx(QQ_CONJ_11, abs=1e-10)


def test_conjugate_at_zero_is_zero(G):
    assert conjugate_value(G, np.zeros(G.dimension)) == pytest.approx(0.0, abs=1e-12)


def test_conjugate_matches_closed_form(G):
    rng = np.random.default_rng(11)
    d = rng.standard_normal((1000, G.dimension))
    d /= np.linalg.norm(d, axis=1)[:, None]
    Y = d * rng.uniform(0, 10, (1000, 1))
    res = conjugate_solve(G, Y)
    exact = G.conjugate_closed_form(Y)
    err = np.abs(res.values - exact) / np.maximum(1.0, np.abs(exact))
    assert res.converged.all()
    assert err.max() < 1e-6


def test_quad_quartic_closed_form_is_the_even_extension():
    QQ = make_builtin({"kind": "quad_quartic"})
    rng = np.random.default_rng(5)
    Y = rng.uniform(-5, 5, (200, 2))
    ref = np.array([qq_conjugate(a, b) for a, b in Y])
    np.testing.assert_allclose(QQ.conjugate_closed_form(Y), ref, rtol=1e-13)


def test_conjugate_dominates_every_probe():
    QQ = make_builtin({"kind": "quad_quartic"})
    rng = np.random.default_rng(2)
    y = np.array([0.7, -1.3])
    val = conjugate_value(QQ, y)
    X = rng.uniform(-3, 3, (5000, 2))
    assert np.all(X @ y - QQ.evaluate(X) <= val + 1e-12)


@pytest.mark.parametrize("desc", [
    {"kind": "power", "p": 2.0},
    {"kind": "power", "p": 3.0},
    {"kind": "quad_quartic"},
    {"kind": "sum_powers", "p": [2.0, 4.0]},
])
def test_biconjugate_recovers_g(desc):
    G = make_builtin(desc)
    rng = np.random.default_rng(8)
    d = rng.standard_normal((15, G.dimension))
    d /= np.linalg.norm(d, axis=1)[:, None]
    X = d * rng.uniform(0, 5, (15, 1))
    GG = numeric_conjugate(numeric_conjugate(G))
    np.testing.assert_allclose(GG.evaluate(X), G.evaluate(X), atol=1e-4, rtol=1e-4)


def test_biconjugate_plateau_inside_and_outside():
    # one point inside the plateau is enough; it is the expensive case
    G = make_builtin({"kind": "plateau", "radius": 1.0, "p": 2.0})
    X = np.array([[0.3, 0.2], [2.0, -1.5], [-3.0, 4.0]])
    GG = numeric_conjugate(numeric_conjugate(G))
    np.testing.assert_allclose(GG.evaluate(X), G.evaluate(X), atol=1e-4)


# ---------------------------------------------------------------- growth

def test_growth_power_three():
    rep = estimate_growth(make_builtin({"kind": "power", "p": 3}))
    assert rep.K1 == pytest.approx(8.0, rel=1e-9)
    assert rep.K2 == pytest.approx(math.sqrt(2.0), rel=1e-8)
    assert rep.p == pytest.approx(3.0, abs=1e-3)
    assert rep.q == pytest.approx(3.0, abs=1e-3)
    assert rep.consistent


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
def test_growth_power_exponents(p):
    rep = estimate_growth(make_builtin({"kind": "power", "p": p}))
    assert abs(rep.p - p) < 1e-3 and abs(rep.q - p) < 1e-3


def test_growth_sum_powers_uses_extreme_axes():
    rep = estimate_growth(make_builtin({"kind": "sum_powers", "p": [2, 4]}))
    assert rep.p == pytest.approx(2.0, abs=1e-3)
    assert rep.q == pytest.approx(4.0, abs=1e-3)


def test_growth_report_invariants(G):
    rep = estimate_growth(G)
    assert rep.K1 >= 2 and rep.K2 >= 1 and rep.consistent
    rng = np.random.default_rng(9)
    X = rng.standard_normal((500, G.dimension))
    X *= (rng.uniform(1, 100, 500) / np.linalg.norm(X, axis=1))[:, None]
    g = G.evaluate(X)
    assert np.all(G.evaluate(2 * X) <= rep.K1 * g * (1 + 1e-9) + 1e-12)
    assert np.all(g <= G.evaluate(rep.K2 * X) / (2 * rep.K2) * (1 + 1e-9) + 1e-12)


def test_growth_rejects_too_few_directions():
    with pytest.raises(ValueError):
        estimate_growth(make_builtin({"kind": "power", "p": 2, "dimension": 3}), directions=4)


# ---------------------------------------------------------------- checks

def test_axioms_hold_for_builtins(G):
    rep = check_gfunction_axioms(G, samples=1000, seed=1)
    assert rep.passed, rep.violations


def test_pointwise_identities_hold_for_builtins(G):
    rep = check_pointwise_identities(G, samples=1000, seed=1)
    assert rep.passed, rep.violations


def test_brezis_lieb_holds_for_builtins(G):
    rep = brezis_lieb_check(G, samples=1000, seed=1)
    assert rep.passed and rep.details["C_eps"] == 4.0


def test_pointwise_sandwich_example():
    QQ = make_builtin({"kind": "quad_quartic"})
    x, y = np.array([1.0, 0.0]), np.array([1.0, 0.0])
    lower = QQ(x) - QQ(x - y)
    mid = gradient_value(QQ, x) @ y
    upper = QQ(x + y) - QQ(x)
    assert (lower, mid, upper) == pytest.approx((1.0, 2.0, 3.0))


def test_young_equality_for_power_two():
    P2 = make_builtin({"kind": "power", "p": 2})
    x = np.array([1.2, -0.7])
    lhs = x @ gradient_value(P2, x)
    assert lhs == pytest.approx(P2(x) + conjugate_value(P2, gradient_value(P2, x)))
    assert lhs == pytest.approx(x @ x)


def test_brezis_lieb_example():
    P2 = make_builtin({"kind": "power", "p": 2})
    x = y = np.array([1.0, 0.0])
    lhs = abs(P2(x + y) - P2(x))
    rhs = 0.25 * abs(P2(2 * x) - 2 * P2(x)) + 2 * P2(4 * y)
    assert (lhs, rhs) == pytest.approx((1.5, 16.25))


@pytest.mark.parametrize("k, eps", [(1.0, 0.25), (2.0, 0.5), (2.0, 0.0), (3.0, 0.4)])
def test_brezis_lieb_rejects_bad_parameters(k, eps):
    with pytest.raises(ValueError):
        brezis_lieb_check(make_builtin({"kind": "power", "p": 2}), k=k, eps=eps)


def test_nonconvex_double_fails_convexity():
    rep = check_gfunction_axioms(make_builtin({"kind": "nonconvex_test_double"}))
    assert not rep.passed
    assert "midpoint_convex" in rep.failing


QQ = make_builtin({"kind": "quad_quartic"})
finite = st.floats(-20, 20, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(finite, finite, finite, finite)
def test_fenchel_inequality_property(x1, x2, y1, y2):
    x, y = np.array([x1, x2]), np.array([y1, y2])
    conj = QQ.conjugate_closed_form(y[None])[0]
    assert x @ y <= QQ(x) + conj + 1e-9 * max(1.0, abs(x @ y))


@settings(max_examples=100, deadline=None)
@given(finite, finite, st.floats(0.01, 1.0), st.floats(1.0, 5.0))
def test_monotone_along_rays_property(x1, x2, a, b):
    x = np.array([x1, x2])
    assert QQ(a * x) <= QQ(b * x) * (1 + 1e-12) + 1e-300


# ---------------------------------------------------------------- dominance

def test_compare_growth_power_two_vs_four():
    F = make_builtin({"kind": "power", "p": 2})
    G = make_builtin({"kind": "power", "p": 4})
    # threshold is |x| = sqrt(2), where both sides are equal
    ev = compare_growth(F, G, [1.001 * math.sqrt(2.0), 2.0, 4.0, 8.0])
    assert ev.fraction_dominated == 1.0
    assert all(ev.ratio_growing.values())
    below = compare_growth(F, G, [0.5, 1.0])
    assert below.fraction_dominated == 0.0


def test_compare_growth_reflexive():
    F = make_builtin({"kind": "quad_quartic"})
    assert compare_growth(F, F, [0.5, 1.0, 10.0]).fraction_dominated == 1.0


def test_compare_growth_reverse_has_decreasing_minima():
    F = make_builtin({"kind": "power", "p": 4})
    G = make_builtin({"kind": "power", "p": 2})
    ev = compare_growth(F, G, [1.0, 2.0, 4.0, 8.0])
    for mins in ev.ratio_minima.values():
        assert np.all(np.diff(mins) < 0)
    assert not any(ev.ratio_growing.values())
