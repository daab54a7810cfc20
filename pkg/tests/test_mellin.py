import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import bump
from rankone import oracles
from rankone.grid import GridVector, LogGrid, pair_bilinear
from rankone.mellin import (
    MellinSymbol,
    apply_symbol,
    cauchy_symbol,
    dilation_apply,
    dilation_symbol,
    identity_symbol,
    moller_infinity_symbol,
    profile_from_symbol,
    symbol_from_profile,
    transpose_symbol,
)
from rankone.suites import cauchy_lock

G = LogGrid(-32.0, 32.0, 1024)


def l2(a, b):
    """L^2(0, inf) distance; pointwise values carry roundoff times x^-1/2 near x = 0."""
    return (a - b).norm()


def smooth_symbol(xi):
    return (1 + 0.3j * np.tanh(xi)) / (1 + 0.2 * xi**2) + 0.5 * np.sin(xi)


def test_identity_symbol():
    v = bump(G, 0.3, 0.8, 1 + 2j)
    assert l2(apply_symbol(identity_symbol(), v), v) < 1e-15 * v.norm()


def test_dilation_symbol_is_exact_shift():
    v = bump(G, 0.0, 1.0)
    tau = 3 * G.dt
    by_symbol = apply_symbol(dilation_symbol(tau), v)
    expected = np.exp(tau / 2) * np.exp(-((G.t + tau) ** 2) / 2)
    assert l2(by_symbol, GridVector(G, expected)) < 1e-13
    assert np.max(np.abs(dilation_apply(tau, v).values - expected)) < 1e-15


def test_dilation_apply_examples():
    v = bump(G, 0.0, 1.0)
    assert np.array_equal(dilation_apply(0.0, v).values, v.values)
    one = dilation_apply(G.dt, v).values
    assert np.allclose(one[:-1], np.exp(G.dt / 2) * v.values[1:], rtol=1e-15)
    for tau in (1.0, -2.5):
        assert abs(dilation_apply(tau, v).norm() - v.norm()) < 1e-12 * v.norm()
    with pytest.raises(ValueError):
        dilation_apply(0.01, v)


def test_cauchy_symbol_matches_regularised_kernel():
    raw, ext = cauchy_lock(1.0, 0.5, 1)
    assert raw < 1e-3 and ext < 1e-5
    raw, ext = cauchy_lock(0.5, 1.0, -1)
    assert raw < 1e-3 and ext < 1e-5


def test_cauchy_lock_error_is_first_order():
    errs = [cauchy_lock(2.0, 0.5, 1, eps_ladder=(e,))[0] for e in (4e-3, 2e-3, 1e-3)]
    assert errs[0] > errs[1] > errs[2]
    assert 1.6 < errs[0] / errs[1] < 2.4


def test_narrow_gaussian_profile_gives_unit_symbol():
    g = LogGrid(-8.0, 8.0, 4096)
    s = 0.01
    S = symbol_from_profile(lambda t: np.exp(-(t**2) / (2 * s**2)) / (s * math.sqrt(2 * math.pi)), g)
    xi = np.array([-1.0, 0.0, 0.5])
    assert np.max(np.abs(S(xi) - 1)) < 1e-3


def test_sech_profile_against_quadrature():
    S = symbol_from_profile(lambda t: 1 / (2 * np.cosh(t / 2)), LogGrid(-80.0, 80.0, 4096))
    for xi in (-0.7, 0.0, 0.4):
        quad = oracles.quad_line(lambda t: cmath.exp(-1j * xi * t) / (2 * math.cosh(t / 2)))
        assert abs(S(xi)[0] - quad) < 1e-12
        # analytic continuation of pi/cos(pi a) to a = -i xi
        assert abs(quad - math.pi / math.cosh(math.pi * xi)) < 1e-10


def test_regularised_profile_tends_to_cauchy_symbol():
    g = LogGrid(-80.0, 80.0, 2**20)
    xi = np.array([-0.7, 0.0, 0.3, 0.9])
    exact = cauchy_symbol(1)(xi)
    eps = [0.04, 0.02, 0.01]
    vals = [symbol_from_profile(lambda t, e=e: 1 / (np.exp(t / 2) - np.exp(-t / 2) - 1j * e), g)(xi) for e in eps]
    errs = [np.max(np.abs(v - exact)) for v in vals]
    assert errs[0] > errs[1] > errs[2]
    assert np.max(np.abs(oracles._richardson(vals, eps) - exact)) < 1e-3


def test_profile_round_trip():
    phi = np.exp(-(G.t**2))
    S = symbol_from_profile(lambda t: np.exp(-(t**2)), G)
    assert np.max(np.abs(profile_from_symbol(S, G) - phi)) < 1e-12


def test_transpose_symbol_examples():
    even = MellinSymbol(lambda xi: 1 / (1 + xi**2))
    xi = np.linspace(-3, 3, 7)
    assert np.array_equal(transpose_symbol(even)(xi), even(xi))
    assert np.allclose(transpose_symbol(dilation_symbol(0.7))(xi), dilation_symbol(-0.7)(xi), rtol=1e-15)
    S = MellinSymbol(smooth_symbol)
    v, w = bump(G, 0.5, 0.7), bump(G, -0.4, 1.1, 1j)
    lhs = pair_bilinear(w, apply_symbol(S, v))
    rhs = pair_bilinear(apply_symbol(transpose_symbol(S), w), v)
    assert abs(lhs - rhs) < 1e-10 * abs(lhs)


def test_moller_infinity_symbol_limits():
    assert np.allclose(moller_infinity_symbol(1e-300, 1)(np.array([-2.0, 0.0, 3.0])), 1, atol=1e-15)
    for m in (0.3, -0.6 + 0.2j):
        for sign in (1, -1):
            S = moller_infinity_symbol(m, sign)
            lo, hi = S(np.array([-30.0]))[0], S(np.array([30.0]))[0]
            lims = {1: (1, cmath.exp(-2j * math.pi * m)), -1: (cmath.exp(2j * math.pi * m), 1)}[sign]
            assert abs(lo - lims[0]) < 1e-12 and abs(hi - lims[1]) < 1e-12
    big = moller_infinity_symbol(0.4, 1)(np.array([-500.0, 500.0]))
    assert np.all(np.isfinite(big))
    with pytest.raises(ValueError):
        moller_infinity_symbol(1.2, 1)


@given(st.floats(-0.99, 0.99), st.sampled_from([1, -1]))
def test_moller_infinity_unimodular_for_real_m(m, sign):
    xi = np.linspace(-10, 10, 101)
    assert np.allclose(np.abs(moller_infinity_symbol(m, sign)(xi)), 1, atol=1e-13)


@given(st.floats(-1, 1), st.floats(-1, 1), st.integers(-40, 40))
def test_linear_and_commutes_with_dilation(a, b, steps):
    S = MellinSymbol(smooth_symbol)
    v, w = bump(G, 0.0, 0.6), bump(G, 1.0, 0.9, 1j)
    lhs = apply_symbol(S, v * a + w * b)
    rhs = apply_symbol(S, v) * a + apply_symbol(S, w) * b
    assert l2(lhs, rhs) < 1e-13
    tau = steps * G.dt
    one = apply_symbol(S, dilation_apply(tau, v))
    two = dilation_apply(tau, apply_symbol(S, v))
    # both sides agree away from the edge where the index shift zero-fills
    inner = G.interior_mask(0.2)
    d = (one - two).values * np.sqrt(G.w)
    assert np.linalg.norm(d[inner]) < 1e-12


def test_composition():
    S1, S2 = MellinSymbol(smooth_symbol), cauchy_symbol(-1)
    v = bump(G, 0.2, 0.8)
    two_step = apply_symbol(S1, apply_symbol(S2, v))
    one_step = apply_symbol(S1 * S2, v)
    assert l2(two_step, one_step) < 1e-12 * one_step.norm()
