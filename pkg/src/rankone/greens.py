"""g-functions, closed-form resolvents and parameter maps of the family.

Two branches:

* ``H_{m,lam} = X + lam |h_m><h_m|`` with ``h_m = x**(m/2)``, ``-1 < Re m < 1``, ``m != 0``,
  ``g(z) = -1/lam + (-z)**m * pi/sin(pi m)``;
* ``H_0^rho`` with ``g(z) = rho + ln(-z)``.

In both cases ``(z - H)^-1 = (z - X)^-1 - g(z)^-1 (z - X)^-1 |h><h| (z - X)^-1``.
Couplings may be infinite; they are stored through their reciprocals.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma

from .branchcut import Side, boundary_log_neg_array, check_sheet, log_neg, neg_power
from .grid import GridVector, KernelMatrix, LogGrid, pair_bilinear


class _Infinity:
    """Tag for an infinite coupling constant."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(c) -> bool:
    return c is INF


def _recip(c) -> complex:
    """1/c with 1/INF = 0; division by zero propagates."""
    return 0j if c is INF else 1.0 / complex(c)


class PoleError(ArithmeticError):
    """z is (numerically) an eigenvalue: g(z) vanishes."""


@dataclass(frozen=True)
class PerturbationParams:
    """Either ``(m, lam)`` with m != 0, or ``(m=0, rho)``.

    Use :meth:`m_lambda` / :meth:`rho` to build.  ``coupling`` is lam or rho and may be ``INF``.
    """

    kind: str
    m: complex
    coupling: object

    def __post_init__(self):
        if self.kind not in ("mlambda", "rho"):
            raise ValueError(f"unknown kind {self.kind!r}")
        object.__setattr__(self, "m", complex(self.m))
        if self.coupling is not INF:
            object.__setattr__(self, "coupling", complex(self.coupling))
        if self.kind == "mlambda":
            if not -1 < self.m.real < 1:
                raise ValueError(f"need -1 < Re m < 1, got m = {self.m}")
            if self.m == 0:
                raise ValueError("m = 0 belongs to the rho branch")
        elif self.m != 0:
            raise ValueError("rho branch requires m = 0")

    @classmethod
    def m_lambda(cls, m, lam) -> "PerturbationParams":
        return cls("mlambda", m, lam)

    @classmethod
    def rho(cls, rho) -> "PerturbationParams":
        return cls("rho", 0, rho)

    @property
    def is_rho(self) -> bool:
        return self.kind == "rho"

    @property
    def is_free(self) -> bool:
        """H = X (lam = 0 or rho = inf)."""
        if self.is_rho:
            return self.coupling is INF
        return self.coupling is not INF and self.coupling == 0

    @property
    def inv_coupling(self) -> complex:
        return _recip(self.coupling)

    def h(self, x):
        return np.exp(0.5 * self.m * np.log(x)) if not self.is_rho else np.ones_like(np.asarray(x, dtype=float))

    def label(self) -> str:
        c = "inf" if self.coupling is INF else repr(self.coupling)
        return f"rho={c}" if self.is_rho else f"m={self.m!r}, lambda={c}"


@dataclass(frozen=True)
class Varsigma:
    """varsigma = lam * pi / sin(pi m), stored through its reciprocal."""

    inv: complex

    @property
    def is_infinite(self) -> bool:
        return self.inv == 0

    @property
    def value(self):
        return INF if self.inv == 0 else 1.0 / self.inv


def _pi_over_sin(m: complex) -> complex:
    return cmath.pi / cmath.sin(cmath.pi * m)


def varsigma(m, lam) -> Varsigma:
    m = complex(m)
    if m == 0:
        raise ValueError("varsigma is undefined at m = 0")
    if lam is INF:
        return Varsigma(0j)
    lam = complex(lam)
    if lam == 0:
        return Varsigma(complex("inf"))
    return Varsigma(1.0 / (lam * _pi_over_sin(m)))


def _g_infinite_part(p: PerturbationParams, z):
    """The z-dependent part of g: (-z)^m pi/sin(pi m) or ln(-z)."""
    if p.is_rho:
        return log_neg(z)
    return neg_power(z, p.m) * _pi_over_sin(p.m)


def g_value(p: PerturbationParams, z):
    check_sheet(z)
    if p.is_rho:
        if p.coupling is INF:
            return complex("inf")
        return p.coupling + log_neg(z)
    if p.is_free:
        return complex("inf")
    return -p.inv_coupling + _g_infinite_part(p, z)


def g_derivative(p: PerturbationParams, z):
    """Closed form of dg/dz = -<h|(z - X)^-2|h>."""
    if p.is_rho:
        return 1.0 / np.asarray(z, dtype=complex)
    return -neg_power(z, p.m - 1) * cmath.pi * p.m / cmath.sin(cmath.pi * p.m)


def _pole_tol(p: PerturbationParams, z) -> float:
    return 1e-12 * (1.0 + abs(z) ** p.m.real)


def inv_g(p: PerturbationParams, z) -> complex:
    """1/g(z), exact zero for the free operator; raises PoleError at eigenvalues."""
    check_sheet(z)
    if p.is_free:
        return 0j
    z = complex(z)
    if p.is_rho:
        g = p.coupling + log_neg(z)
        if abs(g) < _pole_tol(p, z):
            raise PoleError(f"g({z}) = 0: z is an eigenvalue of H for {p.label()}")
        return 1.0 / g
    g = -p.inv_coupling + _g_infinite_part(p, z)
    if abs(g) < _pole_tol(p, z):
        raise PoleError(f"g({z}) = 0: z is an eigenvalue of H for {p.label()}")
    return 1.0 / g


def g_boundary(p: PerturbationParams, x, side):
    """Boundary values g(x +/- i0), x > 0 (scalar or array)."""
    side = Side(side)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("boundary points need x > 0")
    L = boundary_log_neg_array(x, side)
    if p.is_rho:
        if p.coupling is INF:
            out = np.full(x.shape, complex("inf"))
        else:
            out = p.coupling + L
    else:
        out = -p.inv_coupling + np.exp(p.m * L) * _pi_over_sin(p.m)
    return out[()] if out.ndim == 0 else out


def free_resolvent_apply(z, v: GridVector) -> GridVector:
    check_sheet(z)
    return GridVector(v.grid, v.values / (z - v.grid.x))


def resolvent_apply(p: PerturbationParams, z, v: GridVector) -> GridVector:
    """(z - H)^-1 v via pointwise division and one bilinear pairing."""
    r0 = free_resolvent_apply(z, v)
    if p.is_free:
        return r0
    c = inv_g(p, z)
    u = GridVector(v.grid, p.h(v.grid.x) / (z - v.grid.x))
    return r0 - u * (c * pair_bilinear(u, v))


def resolvent_kernel(p: PerturbationParams, z, grid: LogGrid) -> KernelMatrix:
    check_sheet(z)
    x = grid.x
    k = np.diag(1.0 / ((z - x) * grid.w))
    if not p.is_free:
        u = p.h(x) / (z - x)
        k = k - inv_g(p, z) * np.outer(u, u)
    return KernelMatrix(grid, k)


def lambda_from_rho(m, rho):
    """lam(m, rho) = m / (1 - m rho); the analytic-family parametrisation."""
    m = complex(m)
    if rho is INF:
        return 0j
    den = 1.0 - m * complex(rho)
    if den == 0:
        return INF
    return m / den


def rho_from_lambda(m, lam):
    """rho(m, lam) = 1/m - 1/lam; inverse of :func:`lambda_from_rho`."""
    m = complex(m)
    if m == 0:
        raise ValueError("rho_from_lambda needs m != 0")
    if lam is INF:
        return 1.0 / m
    lam = complex(lam)
    if lam == 0:
        raise ValueError("lambda = 0 corresponds to rho = inf")
    return 1.0 / m - 1.0 / lam


def kappa_from_lambda(m, lam):
    """Coupling of the equivalent Bessel-type operator: lam pi/sin(pi m) = kappa Gamma(m)/Gamma(-m)."""
    s = varsigma(m, lam)
    if s.is_infinite:
        return INF
    m = complex(m)
    return s.value * _gamma(-m) / _gamma(m)


def lambda_from_kappa(m, kappa):
    m = complex(m)
    if kappa is INF:
        return INF
    s = complex(kappa) * _gamma(m) / _gamma(-m)
    return s / _pi_over_sin(m)


def dilated_params(p: PerturbationParams, tau: float) -> PerturbationParams:
    """Parameters p' with U_tau H_p U_tau^-1 = e^tau H_p'."""
    if p.is_rho:
        return p if p.coupling is INF else PerturbationParams.rho(p.coupling + tau)
    if p.coupling is INF:
        return p
    return PerturbationParams.m_lambda(p.m, p.coupling * cmath.exp(tau * p.m))
