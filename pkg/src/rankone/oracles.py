"""Independent ground truth by adaptive quadrature.

Nothing here imports the closed-form modules (greens, mellin, spectraldata,
scattering); the only reference values are the elementary right-hand sides of the
integral identities being checked.  Quadrature itself is scipy's QUADPACK wrapper
applied on panels that double in length until the tails are negligible.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

DEFAULT_EPS = (1e-2, 5e-3, 2.5e-3)
MAX_HALF_WIDTH = 1024.0


class OracleConvergenceError(ArithmeticError):
    pass


@dataclass
class OracleReport:
    name: str
    params: dict
    numeric: complex
    exact: complex
    rel_error: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.rel_error < self.tol

    def to_dict(self) -> dict:
        d = asdict(self)
        d["numeric"] = [self.numeric.real, self.numeric.imag]
        d["exact"] = [self.exact.real, self.exact.imag]
        d["passed"] = self.passed
        d["params"] = {k: ([v.real, v.imag] if isinstance(v, complex) else v) for k, v in self.params.items()}
        return d


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _quad_c(g: Callable[[float], complex], a: float, b: float, tol: float, points=None) -> complex:
    return complex(quad(g, a, b, complex_func=True, epsabs=0.0, epsrel=tol, limit=400, points=points)[0])


def quad_line(g: Callable[[float], complex], tol: float = 1e-11, points: Sequence[float] = (), start: float = 8.0) -> complex:
    """int_R g(t) dt for g decaying at both ends.

    Integrates over [-L, L] (with the given interior break points) and keeps doubling L
    until the added panels change the result by less than tol relative.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    pts = sorted(float(p) for p in points)
    L = max(start, 2 * max((abs(p) for p in pts), default=0.0))
    edges = [-L] + [p for p in pts if -L < p < L] + [L]
    total = 0j
    for a, b in zip(edges[:-1], edges[1:]):
        total += _quad_c(g, a, b, tol)
    while True:
        if 2 * L > MAX_HALF_WIDTH:
            raise OracleConvergenceError("tails do not decay within the panel budget")
        add = _quad_c(g, -2 * L, -L, tol) + _quad_c(g, L, 2 * L, tol)
        total += add
        L *= 2
        if abs(add) <= tol * max(abs(total), 1e-300):
            return total


def quad_halfline(f: Callable[[float], complex], tol: float = 1e-11, points: Sequence[float] = ()) -> complex:
    """int_0^inf f(x) dx via x = e^t; ``points`` are x-values where f is nearly singular."""

    def g(t):
        # beyond |t| = 700 exp(t) leaves double range; every admissible integrand is
        # below e^-35 there, so the contribution is dropped
        if abs(t) > 700:
            return 0j
        x = math.exp(t)
        return complex(f(x)) * x

    return quad_line(g, tol, [math.log(p) for p in points if p > 0])


# --- Appendix identities --------------------------------------------------------


def _check_strip(a: complex):
    if not -0.5 < complex(a).real < 0.5:
        raise ValueError(f"need -1/2 < Re a < 1/2, got {a}")


def verify_integral0(a, tol: float = 1e-8) -> OracleReport:
    """int e^{a t} / (e^{t/2} + e^{-t/2}) dt = pi / cos(pi a)."""
    a = complex(a)
    _check_strip(a)
    num = quad_line(lambda t: cmath.exp(a * t) / (2 * math.cosh(t / 2)))
    exact = cmath.pi / cmath.cos(cmath.pi * a)
    return OracleReport("integral0", {"a": a}, num, exact, _rel(num, exact), tol)


def integral_pm_at(a, sign: int, eps: float) -> complex:
    """int e^{a t} / (e^{t/2} - e^{-t/2} - sign i eps) dt at finite eps."""
    a = complex(a)
    w = 40 * eps

    def g(t):
        return cmath.exp(a * t) / (2 * math.sinh(t / 2) - sign * 1j * eps)

    return quad_line(g, 1e-12, points=(-w, 0.0, w), start=max(8.0, 4 * w))


def _richardson(values, eps):
    table = [np.asarray(v, dtype=complex) for v in values]
    e = list(eps)
    for lvl in range(1, len(table)):
        table = [(e[i + lvl] * table[i] - e[i] * table[i + 1]) / (e[i + lvl] - e[i]) for i in range(len(table) - 1)]
    return table[0]


def verify_integral_pm(a, sign: int = 1, eps_sequence=DEFAULT_EPS, tol: float = 1e-6) -> OracleReport:
    """int e^{a t} / (e^{t/2} - e^{-t/2} -+ i0) dt = +-2 pi i / (e^{+-2 pi i a} + 1)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    a = complex(a)
    _check_strip(a)
    eps_sequence = [float(e) for e in eps_sequence]
    vals = [integral_pm_at(a, sign, e) for e in eps_sequence]
    num = complex(_richardson(vals, eps_sequence))
    exact = sign * 2j * cmath.pi / (cmath.exp(sign * 2j * cmath.pi * a) + 1)
    return OracleReport("integral_pm", {"a": a, "sign": sign}, num, exact, _rel(num, exact), tol)


def verify_app4(m, tol: float = 1e-8) -> OracleReport:
    """int_0^inf s^m / (1 + s) ds = -pi / sin(pi m), -1 < Re m < 0."""
    m = complex(m)
    if not -1 < m.real < 0:
        raise ValueError(f"need -1 < Re m < 0, got {m}")
    num = quad_halfline(lambda s: cmath.exp(m * math.log(s)) / (1 + s))
    exact = -cmath.pi / cmath.sin(cmath.pi * m)
    return OracleReport("app4", {"m": m}, num, exact, _rel(num, exact), tol)


def appendix_sweep(n: int = 10) -> list[OracleReport]:
    """All three identities over n-point parameter sweeps (both signs for the i0 one)."""
    re = np.linspace(-0.4, 0.4, n)
    im = np.linspace(-0.3, 0.3, n)[::-1]
    out = []
    for r, i in zip(re, im):
        out.append(verify_integral0(complex(r, i)))
    for k, (r, i) in enumerate(zip(re, im)):
        out.append(verify_integral_pm(complex(r, i), 1 if k % 2 == 0 else -1))
    for r, i in zip(np.linspace(-0.9, -0.1, n), im):
        out.append(verify_app4(complex(r, i)))
    return out


# --- pairings with h_m = x^{m/2} --------------------------------------------------


def _on_cut(z: complex) -> bool:
    return z.imag == 0 and z.real >= 0


def pairing_quad(m, z, power: int = 1, tol: float = 1e-11) -> complex:
    """int_0^inf x^m (z - x)^-power dx by quadrature.

    power = 1 converges for -1 < Re m < 0 and gives the z-dependent part of g;
    power = 2 converges for -1 < Re m < 1 and equals <h|(z - X)^-2|h> = -dg/dz.
    """
    m, z = complex(m), complex(z)
    if _on_cut(z):
        raise ValueError("z must lie off [0, inf)")
    hi = 0.0 if power == 1 else 1.0
    if not -1 < m.real < hi:
        raise ValueError(f"integral diverges for m = {m}, power = {power}")
    # the integrand is nearly singular near x = |z| when z hugs the positive axis
    pts = [abs(z)] if z.real > 0 else []
    # log form: (z - x)^power overflows for x near e^700; power is an integer so any log branch works
    return quad_halfline(lambda x: cmath.exp(m * math.log(x) - power * cmath.log(z - x)), tol, pts)


def log_pairing_derivative_quad(z, tol: float = 1e-11) -> complex:
    """-int_0^inf (z - x)^-2 dx, i.e. d/dz of ln(-z) computed as a pairing."""
    z = complex(z)
    if _on_cut(z):
        raise ValueError("z must lie off [0, inf)")
    pts = [abs(z)] if z.real > 0 else []
    return -quad_halfline(lambda x: cmath.exp(-2 * cmath.log(z - x)), tol, pts)


def regularized_cauchy_quad(f: Callable[[float], complex], x: float, eps: float, sign: int, support=None) -> complex:
    """int_0^inf f(y) / (x - y - sign i eps) dy for a smooth, rapidly decaying f.

    ``support`` = (lo, hi) restricts the y-range (f assumed negligible outside).
    """
    lo, hi = support if support is not None else (0.0, math.inf)
    w = 40 * eps
    near = (max(lo, x - w), min(hi, x + w))

    def g(y):
        return complex(f(y)) / (x - y - sign * 1j * eps)

    total = 0j
    if near[0] < near[1]:
        pts = [x] if near[0] < x < near[1] else None
        total += _quad_c(g, near[0], near[1], 1e-12, points=pts)
    if hi == math.inf:
        raise ValueError("give a finite support")
    if lo < near[0]:
        total += _quad_c(g, lo, min(near[0], hi), 1e-12)
    if near[1] < hi:
        total += _quad_c(g, max(near[1], lo), hi, 1e-12)
    return total
