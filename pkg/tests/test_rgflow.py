import cmath
import math

import numpy as np
import pytest
from scipy.integrate import quad

from rankone.grid import KernelMatrix, LogGrid, default_grid
from rankone.greens import INF, PerturbationParams, resolvent_kernel
from rankone.rgflow import (
    CutoffProfile,
    Regime,
    _resolvent_dense,
    convergence_report,
    flow_coupling,
    regime_of,
    scaled_resolvent,
    scaling_covariance_residual,
    target_params,
    truncated_operator,
)

SMALL = LogGrid(-24.0, 24.0, 512)


def test_regimes():
    assert regime_of(-0.5) is Regime.NEGATIVE
    assert regime_of(0) is Regime.ZERO
    assert regime_of(0.5) is Regime.POSITIVE
    assert regime_of(0.2j) is Regime.POSITIVE
    with pytest.raises(ValueError):
        regime_of(1.0)
    with pytest.raises(ValueError):
        CutoffProfile(0.2, kind="gaussian")


def test_flow_coupling_examples():
    assert abs(flow_coupling(CutoffProfile(-0.5), 1.0, -2.0).coupling - math.exp(-1)) < 1e-15
    assert flow_coupling(CutoffProfile(0), None, -10.0).coupling == -0.1
    c = flow_coupling(CutoffProfile(0.5), 0.1, -2.0).coupling
    assert abs(c - 0.1 / (math.exp(-1) - 0.2)) < 1e-14
    with pytest.raises(ValueError):
        flow_coupling(CutoffProfile(-0.5), 1.0, 1.0)
    with pytest.raises(ZeroDivisionError):
        flow_coupling(CutoffProfile(0), None, 0.0)
    # e^{m tau} = alpha lam at tau = 2 ln(0.5) for m = 1/2, alpha = 2, lam = 1/4
    with pytest.raises(ZeroDivisionError):
        flow_coupling(CutoffProfile(0.5), 0.25, 2 * math.log(0.5))


def test_alpha_and_nu():
    assert CutoffProfile(0.5).alpha == 2
    assert CutoffProfile(-0.5).alpha is None
    assert CutoffProfile(0).nu == 0.0
    assert CutoffProfile(0.3).nu is None
    sm = CutoffProfile(0.5, "smooth", 0.5)
    direct = quad(lambda x: float((sm.h(x) ** 2 / x).real), 0, 1.5, points=[1.0], epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    assert abs(sm.alpha - direct) < 1e-8
    s0 = CutoffProfile(0, "smooth", 0.5)
    # integrate by parts: int ln y (h^2)' dy = -int_1^{1.5} h^2 / y dy
    ibp = -quad(lambda y: float((s0.h(y) ** 2 / y).real), 1, 1.5, epsabs=1e-14, epsrel=1e-13)[0]
    assert abs(s0.nu - ibp) < 1e-10


def test_sharp_profile_samples():
    g = LogGrid(-4.0, 4.0, 64)  # x = 1 is a node
    h = CutoffProfile(0.4).h(g.x)
    j = int(np.argmin(np.abs(g.t)))
    assert h[j] == pytest.approx(math.sqrt(0.5))
    assert np.all(h[g.x > 1.0 + 1e-9] == 0)
    assert np.allclose(h[g.x < 1 - 1e-9], g.x[g.x < 1 - 1e-9] ** 0.2)


def test_truncated_operator():
    op = truncated_operator(CutoffProfile(-0.3), 0.0, SMALL)
    assert np.array_equal(op.entries, np.diag(SMALL.x / SMALL.w))
    op = truncated_operator(CutoffProfile(-0.3, "smooth"), 0.7 - 0.2j, SMALL)
    assert np.array_equal(op.entries, op.entries.T)


class _Uncut:
    """h = x^{m/2} on the whole half-line, to compare with the closed form."""

    def __init__(self, m):
        self.m = m

    def h(self, x):
        return np.exp(0.5 * self.m * np.log(x))


def test_dense_resolvent_matches_closed_form():
    m, lam, z = -0.4 + 0.1j, 0.7, -1.0 + 0.5j
    grid = default_grid()
    op = truncated_operator(_Uncut(m), lam, grid)
    dense = KernelMatrix(grid, _resolvent_dense(op, z))
    closed = resolvent_kernel(PerturbationParams.m_lambda(m, lam), z, grid)
    d = (dense - closed).weighted()
    assert np.linalg.norm(d) < 1e-8 * np.linalg.norm(closed.weighted())


def test_scaled_resolvent_trivial_cases():
    prof = CutoffProfile(-0.4)
    r0 = scaled_resolvent(prof, 0.0, -3.0, 1j, SMALL)
    free = resolvent_kernel(PerturbationParams.m_lambda(-0.4, 0), 1j, SMALL)
    assert np.allclose(r0.weighted(), free.weighted(), rtol=1e-12, atol=1e-14)
    at0 = scaled_resolvent(prof, 0.7, 0.0, -1.0, SMALL)
    direct = _resolvent_dense(truncated_operator(prof, 0.7, SMALL), -1.0)
    assert np.allclose(at0.entries, direct, rtol=1e-14, atol=0)


def test_target_params():
    assert target_params(CutoffProfile(0), None) == PerturbationParams.rho(0.0)
    assert target_params(CutoffProfile(0.3), 0.5) == PerturbationParams.m_lambda(0.3, 0.5)


def _mostly_decreasing(r):
    return all(b < 1.1 * a for a, b in zip(r[:-1], r[1:])) and r[-1] < r[0]


def test_case1_convergence():
    r = convergence_report(CutoffProfile(-0.8), 0.7, -1.0, [-1.0, -2.0, -3.0, -4.0, -5.0, -6.0])
    assert all(b < a for a, b in zip(r[:-1], r[1:]))
    assert r[-1] < 1e-2


def test_case2_convergence_toward_rho_zero():
    r = convergence_report(CutoffProfile(0), None, 1j, [-1.0, -2.0, -4.0, -6.0])
    assert _mostly_decreasing(r)
    # intrinsic rate e^{tau/2}
    assert 0.3 < math.log(r[-2] / r[-1]) / 2 < 0.7


def test_case3_convergence():
    r = convergence_report(CutoffProfile(0.1), -0.1, -1.0, [-1.0, -2.0, -4.0, -6.0])
    assert _mostly_decreasing(r)
    assert r[-1] < 1e-2


@pytest.mark.parametrize(
    "p",
    [PerturbationParams.m_lambda(0.3 + 0.2j, 0.7), PerturbationParams.m_lambda(-0.5, INF), PerturbationParams.rho(0.4 - 0.2j)],
    ids=lambda p: p.label(),
)
def test_scaling_covariance(p):
    for tau in (1.0, -2.5):
        assert scaling_covariance_residual(p, tau, -1.0 + 0.5j, SMALL) < 1e-8
