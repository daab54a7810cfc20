"""Dilation flow of X + lam |h><h| for a compactly supported h = x^{m/2} near 0.

Under ``e^-tau U_tau . U_tau^-1`` with a tau-dependent coupling the truncated operator
flows, as tau -> -inf, to one of the homogeneous operators:

* -1 < Re m < 0:   lam_tau = lam e^{-m tau}                 -> H_{m, lam}
* m = 0:           lam_tau = 1/tau                         -> H_0^nu
* 0 <= Re m < 1:   lam_tau = lam / (e^{m tau} - alpha lam)   -> H_{m, lam}

with ``alpha = int h^2/x dx`` and ``nu = int ln(y) (h^2)'(y) dy``.
"""

from __future__ import annotations

import cmath
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import quad

from .grid import KernelMatrix, LogGrid, default_grid, spectral_norm
from .greens import PerturbationParams, dilated_params, resolvent_kernel


class Regime(enum.IntEnum):
    NEGATIVE = 1  # -1 < Re m < 0
    ZERO = 2  # m = 0
    POSITIVE = 3  # 0 <= Re m < 1, m != 0


def regime_of(m) -> Regime:
    m = complex(m)
    if not -1 < m.real < 1:
        raise ValueError(f"need -1 < Re m < 1, got {m}")
    if m == 0:
        return Regime.ZERO
    return Regime.NEGATIVE if m.real < 0 else Regime.POSITIVE


def _ramp(u):
    """C^2 step: 1 for u <= 0, 0 for u >= 1."""
    u = np.clip(u, 0.0, 1.0)
    return 1.0 - u**3 * (10 - 15 * u + 6 * u**2)


def _ramp_prime(u):
    u = np.clip(u, 0.0, 1.0)
    return -30 * u**2 * (1 - u) ** 2


@dataclass(frozen=True)
class CutoffProfile:
    """h = x^{m/2} on (0, 1], then either cut sharply or ramped to 0 on [1, 1 + width]."""

    m: complex
    kind: str = "sharp"
    width: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "m", complex(self.m))
        if self.kind not in ("sharp", "smooth"):
            raise ValueError("kind must be 'sharp' or 'smooth'")
        if self.kind == "smooth" and not self.width > 0:
            raise ValueError("ramp width must be positive")
        regime_of(self.m)

    @property
    def support_end(self) -> float:
        return 1.0 if self.kind == "sharp" else 1.0 + self.width

    def h(self, x) -> np.ndarray:
        """Sample h; at a node sitting exactly on a sharp jump, h^2 takes the mean of both sides."""
        x = np.asarray(x, dtype=float)
        base = np.exp(0.5 * self.m * np.log(x))
        if self.kind == "smooth":
            return base * _ramp((x - 1.0) / self.width)
        r = np.where(x < 1.0, 1.0, 0.0)
        r = np.where(np.abs(x - 1.0) <= 1e-12, math.sqrt(0.5), r)
        return base * r

    @cached_property
    def alpha(self) -> complex | None:
        """int h^2/x dx; defined for Re m > 0."""
        if self.m.real <= 0:
            return None
        a = 1.0 / self.m
        if self.kind == "smooth":
            m, w = self.m, self.width

            def f(x, part):
                v = x ** (m - 1) * _ramp((x - 1) / w) ** 2
                return v.real if part == 0 else v.imag

            a += complex(
                quad(f, 1, 1 + w, args=(0,), epsabs=1e-14, epsrel=1e-13)[0],
                quad(f, 1, 1 + w, args=(1,), epsabs=1e-14, epsrel=1e-13)[0],
            )
        return a

    @cached_property
    def nu(self) -> float | None:
        """int ln(y) (h^2)'(y) dy; defined for m = 0.  Zero for the sharp cutoff (ln 1 = 0)."""
        if self.m != 0:
            return None
        if self.kind == "sharp":
            return 0.0
        w = self.width

        def f(y):
            u = (y - 1) / w
            return math.log(y) * 2 * _ramp(u) * _ramp_prime(u) / w

        return quad(f, 1, 1 + w, epsabs=1e-14, epsrel=1e-13)[0]


@dataclass(frozen=True)
class FlowPoint:
    tau: float
    coupling: complex
    regime: Regime


def flow_coupling(profile: CutoffProfile, lam, tau: float) -> FlowPoint:
    if tau > 0:
        raise ValueError("the flow runs towards tau -> -inf; need tau <= 0")
    reg = regime_of(profile.m)
    m = profile.m
    if reg is Regime.NEGATIVE:
        c = complex(lam) * cmath.exp(-m * tau)
    elif reg is Regime.ZERO:
        if tau == 0:
            raise ZeroDivisionError("lam_tau = 1/tau is undefined at tau = 0")
        c = complex(1.0 / tau)
    else:
        lam = complex(lam)
        den = cmath.exp(m * tau) - profile.alpha * lam
        if abs(den) < 1e-14 * max(1.0, abs(profile.alpha * lam)):
            raise ZeroDivisionError(f"e^(m tau) = alpha lam at tau = {tau}: the schedule has a pole")
        c = lam / den
    return FlowPoint(float(tau), c, reg)


def target_params(profile: CutoffProfile, lam) -> PerturbationParams:
    if regime_of(profile.m) is Regime.ZERO:
        return PerturbationParams.rho(profile.nu)
    return PerturbationParams.m_lambda(profile.m, lam)


def truncated_operator(profile: CutoffProfile, coupling, grid: LogGrid) -> KernelMatrix:
    """Kernel of X + coupling |h><h| on the grid; exactly symmetric."""
    h = profile.h(grid.x)
    return KernelMatrix(grid, np.diag(grid.x / grid.w) + complex(coupling) * np.outer(h, h))


def _resolvent_dense(op: KernelMatrix, z: complex) -> np.ndarray:
    """Kernel of (z - op)^-1 by a dense solve in the symmetric weighted form."""
    s = np.sqrt(op.grid.w)
    a = z * np.eye(op.grid.n) - op.weighted()
    r = np.linalg.solve(a, np.eye(op.grid.n))
    if not np.all(np.isfinite(r)):
        raise np.linalg.LinAlgError("resolvent solve produced non-finite entries")
    return r / s[:, None] / s[None, :]


def scaled_resolvent(profile: CutoffProfile, lam, tau: float, z, grid: LogGrid | None = None) -> KernelMatrix:
    """Kernel of e^tau U_tau (z e^tau - H(lam_tau))^-1 U_-tau on ``grid``.

    The dilation is exact: the truncated operator is discretised on the grid with
    nodes e^tau x_j, and the kernel there, times e^{2 tau}, is the answer at x_j.
    """
    grid = grid or default_grid()
    z = complex(z)
    fp = flow_coupling(profile, lam, tau) if tau != 0 else FlowPoint(0.0, complex(lam), regime_of(profile.m))
    shifted = grid.shifted(tau)
    op = truncated_operator(profile, fp.coupling, shifted)
    k = _resolvent_dense(op, z * math.exp(tau))
    return KernelMatrix(grid, math.exp(2 * tau) * k)


def convergence_report(
    profile: CutoffProfile, lam, z, tau_list, grid: LogGrid | None = None, workers: int = 4
) -> list[float]:
    """Weighted spectral norm of scaled_resolvent - (closed-form limit resolvent), per tau."""
    grid = grid or default_grid()
    target = resolvent_kernel(target_params(profile, lam), z, grid)

    def one(tau):
        d = scaled_resolvent(profile, lam, tau, z, grid) - target
        return spectral_norm(d.weighted())

    taus = list(tau_list)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as ex:
        return list(ex.map(one, taus))


def scaling_covariance_residual(p: PerturbationParams, tau: float, z, grid: LogGrid | None = None) -> float:
    """Relative max deviation between U_tau R_p(z) U_-tau and e^-tau R_{p'}(z e^-tau).

    p' = dilated_params(p, tau); the left side is the closed-form kernel on the shifted
    grid, times e^tau.
    """
    grid = grid or default_grid()
    lhs = math.exp(tau) * resolvent_kernel(p, z, grid.shifted(tau)).entries
    rhs = math.exp(-tau) * resolvent_kernel(dilated_params(p, tau), complex(z) * math.exp(-tau), grid).entries
    s = np.sqrt(grid.w)
    diff = s[:, None] * (lhs - rhs) * s[None, :]
    ref = s[:, None] * rhs * s[None, :]
    return float(np.max(np.abs(diff)) / np.max(np.abs(ref)))
