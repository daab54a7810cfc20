"""Point spectrum, eigenprojections and the spectral projection onto [0, inf)."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .branchcut import log_neg, neg_power
from .grid import GridVector, KernelMatrix, LogGrid
from .greens import INF, PerturbationParams, g_derivative, g_value, varsigma

DEFAULT_K_RANGE = 64
EXCEPTIONAL_TOL = 1e-10
DEFAULT_EPS = (1e-2, 5e-3, 2.5e-3)


@dataclass(frozen=True)
class Eigenvalue:
    w: complex
    branch: int
    residual: float


@dataclass
class SpectralReport:
    params: PerturbationParams
    eigenvalues: list[Eigenvalue]
    count: int | str
    exceptional: bool
    bound: tuple[int, bool] | None = None
    possibly_more: bool = False
    boundary_candidates: list[complex] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [
                {"re": e.w.real, "im": e.w.imag, "branch": e.branch, "residual": e.residual}
                for e in self.eigenvalues
            ],
            "count": self.count,
            "exceptional": self.exceptional,
            "count_bound": None if self.bound is None else {"N": self.bound[0], "satisfied": self.bound[1]},
            "possibly_more": self.possibly_more,
        }


def _branch_logs(p: PerturbationParams, k_range: int) -> list[tuple[int, complex]]:
    """Candidates ln(-w_k) = -(ln varsigma + 2 pi i k)/m."""
    s = varsigma(p.m, p.coupling)
    ln_s = cmath.log(s.value)
    return [(k, -(ln_s + 2j * math.pi * k) / p.m) for k in range(-k_range, k_range + 1)]


def eigenvalue_count_bound(m) -> int:
    """The N with N < |m|^2/|Re m| <= N + 1."""
    m = complex(m)
    if m.real == 0:
        raise ValueError("bound only applies for Re m != 0")
    if not -1 < m.real < 1:
        raise ValueError("need -1 < Re m < 1")
    q = abs(m) ** 2 / abs(m.real)
    if abs(q - round(q)) < 1e-12 * q:
        # integer ratio up to rounding, e.g. m = (1 + i)/2
        return round(q) - 1
    return math.ceil(q) - 1


def eigenvalues(p: PerturbationParams, k_range: int = DEFAULT_K_RANGE) -> SpectralReport:
    if p.is_free:
        raise ValueError("H = X has no eigenvalues; the eigenvalue equation is degenerate")
    if k_range < 1:
        raise ValueError("k_range must be >= 1")
    if p.is_rho:
        rho = p.coupling
        exc = abs(abs(rho.imag) - math.pi) < 1e-12
        found = []
        if abs(rho.imag) < math.pi and not exc:
            w = -cmath.exp(-rho)
            found.append(Eigenvalue(w, 0, float(abs(g_value(p, w)))))
        return SpectralReport(p, found, len(found), exc)
    if p.coupling is INF:
        # homogeneous of degree one: no eigenvalues
        return SpectralReport(p, [], 0, False, _bound_or_none(p.m, 0))
    found = []
    boundary = []
    accepted_k = []
    unrepresentable = False
    for k, L in _branch_logs(p, k_range):
        d = abs(L.imag) - math.pi
        if abs(d) < EXCEPTIONAL_TOL:
            if abs(L.real) <= 700:
                boundary.append(-cmath.exp(L))
        elif d < 0:
            accepted_k.append(k)
            if abs(L.real) > 700:
                # genuine eigenvalue, but |w| or 1/|w| is outside double range
                unrepresentable = True
                continue
            w = -cmath.exp(L)
            found.append(Eigenvalue(w, k, float(abs(g_value(p, w)))))
    found.sort(key=lambda e: abs(e.w))
    edge = bool(accepted_k) and (min(accepted_k) == -k_range or max(accepted_k) == k_range)
    if p.m.real == 0 and accepted_k and min(accepted_k) == -k_range and max(accepted_k) == k_range:
        count: int | str = "infinite"
    else:
        count = len(accepted_k)
    return SpectralReport(
        p,
        found,
        count,
        bool(boundary),
        _bound_or_none(p.m, len(accepted_k)) if count != "infinite" else None,
        possibly_more=edge or unrepresentable,
        boundary_candidates=boundary,
    )


def _bound_or_none(m: complex, count: int):
    if m.real == 0:
        return None
    n = eigenvalue_count_bound(m)
    return (n, count in (n, n + 1))


def is_exceptional(p: PerturbationParams, k_range: int = DEFAULT_K_RANGE) -> bool:
    """Some eigenvalue candidate sits exactly on the boundary of the physical sheet.

    For such parameters the Moller multipliers have a pole on (0, inf).
    """
    if p.is_free:
        return False
    if p.is_rho:
        return abs(abs(p.coupling.imag) - math.pi) < 1e-12
    if p.coupling is INF:
        return False
    return any(abs(abs(L.imag) - math.pi) < EXCEPTIONAL_TOL for _, L in _branch_logs(p, k_range))


def eigenprojection_kernel(p: PerturbationParams, w, grid: LogGrid) -> KernelMatrix:
    """Kernel of the Riesz projection onto the eigenvalue w (rank one)."""
    w = complex(w)
    if p.is_free:
        raise ValueError("H = X has no eigenvalues")
    g = g_value(p, w)
    scale = max(1.0, abs(p.inv_coupling)) if not p.is_rho else max(1.0, abs(log_neg(w)))
    if abs(g) > 1e-9 * scale:
        raise ValueError(f"w = {w} is not an eigenvalue (|g(w)| = {abs(g):.3e})")
    dg = g_derivative(p, w)
    if abs(dg) < 1e-300:
        raise ArithmeticError("<h|(w - X)^-2|h> vanishes; eigenvalue is not simple")
    u = p.h(grid.x) / (w - grid.x)
    if p.is_rho:
        coeff = -w
    else:
        m = p.m
        coeff = cmath.sin(math.pi * m) / (math.pi * m) * neg_power(w, 1 - m)
    return KernelMatrix(grid, coeff * np.outer(u, u))


def eigenprojections_apply(p: PerturbationParams, v: GridVector, k_range: int = DEFAULT_K_RANGE) -> GridVector:
    """Sum of all eigenprojections applied to v (rank-one formula, no dense matrix)."""
    out = np.zeros(v.grid.n, dtype=complex)
    if p.is_free:
        return GridVector(v.grid, out)
    rep = eigenvalues(p, k_range)
    if rep.count == "infinite":
        raise ValueError("infinitely many eigenvalues")
    x, wts = v.grid.x, v.grid.w
    for e in rep.eigenvalues:
        u = p.h(x) / (e.w - x)
        coeff = -e.w if p.is_rho else cmath.sin(math.pi * p.m) / (math.pi * p.m) * neg_power(e.w, 1 - p.m)
        out += coeff * u * np.sum(wts * u * v.values)
    return GridVector(v.grid, out)


# --- Stone formula ---------------------------------------------------------------


def _inv_g_array(p: PerturbationParams, zeta: np.ndarray) -> np.ndarray:
    if p.is_free:
        return np.zeros(zeta.shape, dtype=complex)
    L = log_neg(zeta)
    if p.is_rho:
        return 1.0 / (p.coupling + L)
    return 1.0 / (-p.inv_coupling + np.exp(p.m * L) * (math.pi / cmath.sin(math.pi * p.m)))


def _fft_interpolate(v: GridVector, factor: int) -> tuple[LogGrid, np.ndarray]:
    """Band-limited interpolation of sqrt(x) v onto a grid refined ``factor`` times.

    Returns the fine grid and sqrt(x) v on it (the unitary picture, bounded at both ends).
    """
    grid = v.grid
    fine = grid.refined(factor)
    u = np.sqrt(grid.x) * v.values
    n, nf = grid.n, fine.n
    U = np.fft.fft(u)
    Uf = np.zeros(nf, dtype=complex)
    h = n // 2
    Uf[:h] = U[:h]
    Uf[-h + 1 :] = U[-h + 1 :]
    Uf[h] = 0.5 * U[h]
    Uf[nf - h] = 0.5 * U[h]
    return fine, np.fft.ifft(Uf) * factor


def _log_kernel(sgn: int, eps: float, d: np.ndarray) -> np.ndarray:
    """K(d) = 1/((1 + sgn i eps) - e^d); array index q is the offset q - (nf - 1)."""
    return 1.0 / ((1 + sgn * 1j * eps) - np.exp(d))


def _stone_single(p: PerturbationParams, fine: LogGrid, uf: np.ndarray, eps: float) -> np.ndarray:
    """sqrt(x) (1/2 pi i) int ds [R(s(1 - i eps)) - R(s(1 + i eps))] v on the fine grid.

    ``uf`` is sqrt(x) v.  With s = exp(t_i), x = exp(t_k),
    1/(s(1 +/- i eps) - x) = exp(-t_i) K(k - i), so the sums over nodes are discrete
    convolutions.  Powers of s and x are folded into the kernel as
    Kh(d) = K(d) exp(d (1 + m)/2), which decays in both directions; this keeps FFT
    round-off small relative to the L^2-weighted result.
    """
    nf, dt = fine.n, fine.dt
    d = np.arange(-(nf - 1), nf) * dt
    s = fine.x
    m = p.m
    total = np.zeros(nf, dtype=complex)
    for sgn in (-1, +1):  # zeta = s (1 + sgn i eps); Stone weight -sgn
        K = _log_kernel(sgn, eps, d)
        # diagonal part: dt * sum_i K(j - i), a window sum of K
        csum = np.concatenate(([0j], np.cumsum(K)))
        j = np.arange(nf)
        part = uf * dt * (csum[j + nf] - csum[j])
        if not p.is_free:
            Kh = K * np.exp(0.5 * (1 + m) * d)
            # G_i = s_i^((1-m)/2) F(zeta_i) = dt sum_k uf_k Kh(k - i)
            G = dt * fftconvolve(uf, Kh[::-1])[nf - 1 : 2 * nf - 1]
            ct = _inv_g_array(p, s * (1 + sgn * 1j * eps)) * G * np.exp(m * fine.t)
            part = part - dt * fftconvolve(ct, Kh)[nf - 1 : 2 * nf - 1]
        total += -sgn * part
    return total / (2j * math.pi)


def _richardson(values: list[np.ndarray], eps: list[float]) -> np.ndarray:
    """Neville extrapolation to eps = 0 of a polynomial in eps."""
    table = [np.asarray(v) for v in values]
    e = list(eps)
    for lvl in range(1, len(table)):
        table = [
            (e[i + lvl] * table[i] - e[i] * table[i + 1]) / (e[i + lvl] - e[i]) for i in range(len(table) - 1)
        ]
    return table[0]


def positive_projection_apply(
    p: PerturbationParams,
    v: GridVector,
    eps_sequence=DEFAULT_EPS,
    refine: int | None = None,
) -> GridVector:
    """Spectral projection of H onto [0, inf) applied to v, by the Stone formula.

    The contour offsets are relative (s -> s(1 +/- i eps)), which keeps the sums
    dilation covariant and FFT-evaluable.  Each eps is computed on a grid refined
    enough to resolve the width-eps Lorentzian in t; results are then
    Richardson-extrapolated to eps = 0.
    """
    eps_sequence = [float(e) for e in eps_sequence]
    if len(eps_sequence) < 2:
        raise ValueError("need at least two eps values to extrapolate")
    tail = max(abs(v.values[0]) * math.sqrt(v.grid.x[0]), abs(v.values[-1]) * math.sqrt(v.grid.x[-1]))
    if tail > 1e-8 * max(1e-300, float(np.max(np.abs(v.values) * np.sqrt(v.grid.x)))):
        raise ValueError("vector does not decay at the grid edges")
    if p.is_free:
        return v
    if refine is None:
        refine = 1
        while v.grid.dt / refine > min(eps_sequence) / 4:
            refine *= 2
    fine, uf = _fft_interpolate(v, refine)
    results = [_stone_single(p, fine, uf, e)[::refine] for e in eps_sequence]
    return GridVector(v.grid, _richardson(results, eps_sequence) / np.sqrt(v.grid.x))
