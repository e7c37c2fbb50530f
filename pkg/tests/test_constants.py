import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bscount.constants import (
    AdmissiblePair,
    best_lt_constant,
    clr_constant,
    constants_table,
    cwikel_Kq,
    gamma_function,
    gamma_prime_range,
    kss_integral_check,
    layer_cake_check,
    lt_constant_tilde,
    semiclassical_bracket,
    semiclassical_constant,
    t_optimum,
    unit_ball_volume,
    weak_norm_maximizer,
    weak_norm_profile,
    weak_norm_u,
)
from bscount.linalg import EigenItem
from bscount.oracles import beta_quadrature, kss_quadrature, t_grid_minimum, weak_norm_sup


def _items(*lams):
    return [EigenItem(complex(z), 1, 1) for z in lams]


def test_unit_ball_volume():
    assert unit_ball_volume(1) == pytest.approx(2.0, rel=1e-14)
    assert unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-14)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3, rel=1e-14)
    with pytest.raises(ValueError):
        unit_ball_volume(0)


def test_admissible_pairs():
    assert AdmissiblePair(1, 0.5).p == 1.0
    assert AdmissiblePair(3, 0.0).p == 1.5
    for d, g in [(1, 0.4), (2, 0.0), (3, -0.1)]:
        with pytest.raises(ValueError, match="inadmissible"):
            AdmissiblePair(d, g)


def test_clr_constant_cases():
    assert clr_constant(1, 1) == 0.5
    assert clr_constant(3, 1.5) == pytest.approx(13.5 / math.pi**2, rel=1e-13)
    # the middle case by hand: d=1, p=2, gamma=3/2
    g, p = 1.5, 2.0
    hand = 2 ** (p + g - 4) * math.pi ** (-2 * p) * 2 * 1 * g**g * p ** (p + 1) * (p - 1) ** (1 - 2 * p)
    assert clr_constant(1, 2) == pytest.approx(hand, rel=1e-13)
    for d, p in [(2, 1.0), (1, 0.75), (2, 0.9)]:
        with pytest.raises(ValueError, match="no CLR constant"):
            clr_constant(d, p)


def test_cwikel_constant():
    assert cwikel_Kq(4) == pytest.approx(2 * 2 * 2**0.25, rel=1e-14)
    # diverges as q -> 2+
    assert cwikel_Kq(2.01) < cwikel_Kq(2.001) < cwikel_Kq(2.0001)
    with pytest.raises(ValueError, match="q > 2"):
        cwikel_Kq(2)


def test_weak_norm_critical_case():
    assert weak_norm_u(3, 3, 1.0) == pytest.approx((4 * math.pi / 3) ** (1 / 3) / (2 * math.pi), rel=1e-14)
    assert weak_norm_u(3, 3, 1.0) == pytest.approx(0.256556, abs=1e-6)
    with pytest.raises(ValueError, match="q >= d"):
        weak_norm_u(3, 2, 1.0)


@pytest.mark.parametrize("d,q", [(1, 3), (2, 4), (3, 3), (3, 6)])
@pytest.mark.parametrize("eps", [0.1, 1.0, 10.0])
def test_weak_norm_matches_numerical_sup(d, q, eps):
    sup, arg = weak_norm_sup(d, q, eps)
    assert weak_norm_u(d, q, eps) == pytest.approx(sup, rel=1e-8)
    if q > d:
        assert weak_norm_maximizer(d, q, eps) == pytest.approx(arg, rel=1e-6)


def test_weak_norm_profile_peaks_at_maximizer():
    t = weak_norm_maximizer(2, 4, 1.0)
    f = weak_norm_profile(2, 4, 1.0, [0.9 * t, t, 1.1 * t])
    assert f[1] > f[0] and f[1] > f[2]
    assert f[1] ** 0.25 == pytest.approx(weak_norm_u(2, 4, 1.0), rel=1e-12)


def test_kss_examples():
    assert kss_integral_check(1.0) == pytest.approx(math.pi)
    assert kss_integral_check(4.0) == pytest.approx(math.pi / 2)
    with pytest.raises(ValueError):
        kss_integral_check(0.0)


@pytest.mark.parametrize("eps", [0.1, 1.0, 10.0])
def test_kss_matches_quadrature(eps):
    assert kss_integral_check(eps) == pytest.approx(kss_quadrature(eps), rel=1e-8)


def test_t_optimum_examples():
    opt = t_optimum(1.0, 0.5)
    assert (opt.t_star, opt.inf_value, opt.boundary) == (pytest.approx(1.0), pytest.approx(2.0), False)
    edge = t_optimum(2.0, 0.0)
    assert edge.inf_value == 1.0 and edge.boundary
    with pytest.raises(ValueError):
        t_optimum(1.0, 1.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 3.0), st.floats(0.02, 0.98), st.integers(0, 2**32 - 1))
def test_t_optimum_is_global_minimum(gamma, frac, seed):
    gp = gamma * frac
    opt = t_optimum(gamma, gp)
    ts = np.random.default_rng(seed).uniform(1e-3, 1e3, 100)
    assert np.all(ts ** (-gp) * (1 + ts) ** gamma >= opt.inf_value - 1e-12)
    value, arg = t_grid_minimum(gamma, gp)
    assert opt.inf_value == pytest.approx(value, rel=1e-6)
    assert opt.t_star == pytest.approx(arg, rel=1e-3)


@pytest.mark.parametrize("d,gamma", [(3, 0.5), (3, 1.0), (4, 2.0), (5, 0.3)])
def test_lt_constant_reduced_form_at_zero(d, gamma):
    reduced = (
        clr_constant(d, d / 2)
        * gamma_function(d / 2 + 1)
        * gamma_function(gamma + 1)
        / gamma_function(d / 2 + gamma + 1)
    )
    assert lt_constant_tilde(d, gamma, 0.0) == pytest.approx(reduced, rel=1e-12)


def test_lt_constant_example():
    assert lt_constant_tilde(3, 1.0, 0.0) == pytest.approx(clr_constant(3, 1.5) * 0.4, rel=1e-12)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_lt_constant_small_gamma_limit(d):
    assert lt_constant_tilde(d, 1e-4, 0.0) == pytest.approx(clr_constant(d, d / 2), rel=1e-3)


def test_lt_constant_admissibility():
    with pytest.raises(ValueError, match="not admissible"):
        lt_constant_tilde(1, 1.0, 0.3)
    with pytest.raises(ValueError, match="not admissible"):
        lt_constant_tilde(2, 1.0, 0.0)
    with pytest.raises(ValueError, match="not admissible"):
        lt_constant_tilde(3, 1.0, 1.0 - 1e-4)


def test_gamma_prime_guard():
    assert gamma_prime_range(3, 1.0)[1] == pytest.approx(1.0 - 1e-3)
    # small gamma keeps a non-empty interval
    lo, hi, _ = gamma_prime_range(3, 1e-4)
    assert lo < hi


def test_best_lt_constant_beats_endpoint():
    value, gp = best_lt_constant(3, 1.0)
    assert value <= lt_constant_tilde(3, 1.0, 0.0) + 1e-15
    lo, hi, _ = gamma_prime_range(3, 1.0)
    assert lo <= gp <= hi
    with pytest.raises(ValueError, match="empty"):
        best_lt_constant(1, 0.5)


@pytest.mark.parametrize("d,gamma,gp", [(1, 1.0, 0.5), (1, 2.0, 1.2), (2, 1.0, 0.3), (3, 0.5, 0.0), (3, 2.0, 1.5)])
def test_gamma_ratio_matches_beta_quadrature(d, gamma, gp):
    ratio = gamma_function(d / 2 + gp + 1) * gamma_function(gamma - gp) / gamma_function(d / 2 + gamma + 1)
    assert ratio == pytest.approx(beta_quadrature(gamma - gp, d / 2 + gp + 1), rel=1e-8)


def test_semiclassical_examples():
    assert semiclassical_constant(1.0, 1) == pytest.approx(2 / (3 * math.pi), rel=1e-13)
    assert semiclassical_constant(0.0, 2) == pytest.approx(1 / (4 * math.pi), rel=1e-13)


@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
def test_semiclassical_bracket(gamma):
    lcl, ct, upper = semiclassical_bracket(gamma, 3)
    assert lcl <= ct <= upper * (1 + 1e-12)


def test_layer_cake_examples():
    r = layer_cake_check(_items(-1, -4), 0.5, 0.0)
    assert r.direct == pytest.approx(3.0) and r.quadrature == pytest.approx(3.0)
    assert layer_cake_check([], 1.0, 0.0).rel_err == 0.0
    g = 0.7
    r = layer_cake_check(_items(-1 + 1j, -2 - 1j), g, 1.0)
    assert r.direct == pytest.approx(3**g) and r.quadrature == pytest.approx(3**g)
    with pytest.raises(ValueError):
        layer_cake_check([], 0.0, 0.0)


def test_layer_cake_random_spectra():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        n = rng.integers(1, 30)
        lam = rng.normal(-1, 2, n) + 1j * rng.normal(0, 2, n)
        items = [EigenItem(complex(z), int(m), 1) for z, m in zip(lam, rng.integers(1, 4, n))]
        r = layer_cake_check(items, float(rng.uniform(0.1, 3)), float(rng.choice([-1, 0, 1])))
        worst = max(worst, r.rel_err)
    assert worst <= 1e-12


def test_gamma_function_values():
    assert gamma_function(1) == pytest.approx(1.0, rel=1e-14)
    assert gamma_function(2) == pytest.approx(1.0, rel=1e-14)
    assert gamma_function(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma_function(2.5) == pytest.approx(3 * math.sqrt(math.pi) / 4, rel=1e-14)
    for bad in (0.0, -1.0, math.inf):
        with pytest.raises(ValueError):
            gamma_function(bad)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-2, 49.0))
def test_gamma_recurrence(x):
    assert abs(gamma_function(x + 1) - x * gamma_function(x)) <= 1e-12 * gamma_function(x + 1)


def test_constants_table_rows():
    rows = constants_table([1, 2, 3], [0, 0.5, 1])
    first = rows[0]
    assert (first["d"], first["gamma"], first["C_clr"]) == (1, 0.5, 0.5)
    assert first["label"] == "proven, not sharp"
    assert not any(r["d"] == 2 and r["gamma"] == 0 for r in rows)
    assert all(r["C_lt"] is None or r["C_lt"] > 0 for r in rows)
