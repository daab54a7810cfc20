"""Moller operators W^+-(H, X) as sums of products of x-multipliers and A-symbols.

For m != 0 the operator is

    W^+- = (1 - q X^m)^-1 - W_inf^+- q X^m (1 - q X^m)^-1,   q = varsigma e^{+-i pi m},

with ``W_inf^+-`` a function of A.  For m = 0,

    W^+- = 1 + C_-+ (ln X +- i pi + rho)^-1,

where ``C_-+`` is the function of A with kernel 1/(x - y +- i0).  Both come from the kernel
``delta(x - y) + h(x) h(y) / ((x - y +- i0) g(y -+ i0))`` and are checked against it in
:func:`moller_kernel_regularized`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .branchcut import Side
from .grid import GridVector, KernelMatrix, LogGrid
from .greens import INF, PerturbationParams, g_boundary, resolvent_apply, varsigma
from .mellin import MellinSymbol, apply_symbol, cauchy_symbol, moller_infinity_symbol, transpose_symbol
from .spectraldata import is_exceptional, positive_projection_apply


class ExceptionalParametersError(ValueError):
    """The x-multiplier of the Moller operator has a pole on (0, inf)."""


@dataclass(frozen=True)
class XMultiplier:
    func: Callable[[np.ndarray], np.ndarray]
    name: str = "f(X)"

    def apply(self, v: GridVector) -> GridVector:
        return GridVector(v.grid, self.func(v.grid.x) * v.values)

    def transposed(self) -> "XMultiplier":
        return self


@dataclass(frozen=True)
class ASymbol:
    symbol: MellinSymbol

    @property
    def name(self) -> str:
        return self.symbol.name

    def apply(self, v: GridVector) -> GridVector:
        return apply_symbol(self.symbol, v)

    def transposed(self) -> "ASymbol":
        return ASymbol(transpose_symbol(self.symbol))


@dataclass(frozen=True)
class Term:
    coeff: complex
    factors: tuple  # applied right to left

    def apply(self, v: GridVector) -> GridVector:
        for f in reversed(self.factors):
            v = f.apply(v)
        return v * self.coeff


@dataclass(frozen=True)
class MollerOperator:
    """W^side(H, X) (direction "HX") or its transpose-type partner W^side(X, H) ("XH")."""

    side: Side
    terms: tuple
    params: PerturbationParams | None = None
    direction: str = "HX"

    def describe(self) -> str:
        parts = []
        for t in self.terms:
            body = " . ".join(f.name for f in t.factors) or "1"
            parts.append(f"({t.coeff:g}) {body}")
        return " + ".join(parts)


def _sign(side) -> int:
    return Side(side).sign


def identity_operator(side=Side.PLUS, params=None) -> MollerOperator:
    return MollerOperator(Side(side), (Term(1.0, ()),), params)


def moller_infinity(m, side) -> MollerOperator:
    m = complex(m)
    if not -1 < m.real < 1:
        raise ValueError("W_inf is unbounded unless -1 < Re m < 1")
    if m == 0:
        raise ValueError("m = 0 has no homogeneous perturbed operator")
    sym = moller_infinity_symbol(m, _sign(side))
    return MollerOperator(Side(side), (Term(1.0, (ASymbol(sym),)),), PerturbationParams.m_lambda(m, INF))


def moller(p: PerturbationParams, side) -> MollerOperator:
    side = Side(side)
    s = side.sign
    if p.is_free:
        return identity_operator(side, p)
    if is_exceptional(p):
        raise ExceptionalParametersError(f"{p.label()} is exceptional: the Moller multiplier is unbounded")
    if p.is_rho:
        rho = p.coupling
        mult = XMultiplier(lambda x: 1.0 / (np.log(x) + s * 1j * math.pi + rho), f"(ln X {'+' if s > 0 else '-'} i pi + rho)^-1")
        return MollerOperator(side, (Term(1.0, ()), Term(1.0, (ASymbol(cauchy_symbol(-s)), mult))), p)
    if p.coupling is INF:
        return moller_infinity(p.m, side)
    m = p.m
    inv_s = varsigma(m, p.coupling).inv
    q = cmath.exp(s * 1j * math.pi * m)

    def m1(x):
        return inv_s / (inv_s - q * np.exp(m * np.log(x)))

    def m2(x):
        qx = q * np.exp(m * np.log(x))
        return qx / (inv_s - qx)

    winf = moller_infinity_symbol(m, s)
    return MollerOperator(
        side,
        (
            Term(1.0, (XMultiplier(m1, "(1 - q X^m)^-1"),)),
            Term(-1.0, (ASymbol(winf), XMultiplier(m2, "q X^m (1 - q X^m)^-1"))),
        ),
        p,
    )


def apply(W: MollerOperator, v: GridVector) -> GridVector:
    out = None
    for t in W.terms:
        r = t.apply(v)
        out = r if out is None else out + r
    return out


def transpose(W: MollerOperator) -> MollerOperator:
    """Bilinear transpose; (W^+-(H, X))^T = W^-+(X, H)."""
    terms = tuple(Term(t.coeff, tuple(f.transposed() for f in reversed(t.factors))) for t in W.terms)
    other = Side.MINUS if W.side is Side.PLUS else Side.PLUS
    return MollerOperator(other, terms, W.params, "XH" if W.direction == "HX" else "HX")


def tail_rate(p: PerturbationParams) -> float:
    """Slowest exponential decay rate, in t = ln x, of the kernels of the A-functions in W."""
    if p.is_free or p.is_rho:
        return 0.5
    return 0.5 * min(1 - p.m.real, 1 + p.m.real)


def recommended_grid(p: PerturbationParams, digits: float = 16.0, dt: float = 1 / 16) -> LogGrid:
    """Smallest symmetric grid (half-width a power of two times 64) on which kernel tails
    fall below e^-digits before reaching the edge."""
    half = 64.0
    while tail_rate(p) * half < digits:
        half *= 2
    return LogGrid(-half, half, int(round(2 * half / dt)))


def moller_kernel_regularized(p: PerturbationParams, side, eps: float, grid: LogGrid, direction: str = "HX") -> KernelMatrix:
    """Dense kernel with the i0 in the Cauchy denominator replaced by i eps.

    HX: delta(x - y) + h(x) h(y) / ((x - y +- i eps) g(y -+ i0))
    XH: delta(x - y) + h(x) h(y) / (g(x +- i0) (y - x -+ i eps))
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    side = Side(side)
    s = side.sign
    if p.is_free:
        return KernelMatrix.identity(grid)
    if is_exceptional(p):
        raise ExceptionalParametersError(f"{p.label()} is exceptional")
    x = grid.x
    h = p.h(x)
    opposite = Side.MINUS if s > 0 else Side.PLUS
    if direction == "HX":
        gy = g_boundary(p, x, opposite)
        k = np.outer(h, h / gy) / (x[:, None] - x[None, :] + s * 1j * eps)
    elif direction == "XH":
        gx = g_boundary(p, x, side)
        k = np.outer(h / gx, h) / (x[None, :] - x[:, None] - s * 1j * eps)
    else:
        raise ValueError("direction must be 'HX' or 'XH'")
    return KernelMatrix(grid, k + np.diag(1.0 / grid.w))


@dataclass
class RelationsReport:
    params: PerturbationParams
    inverse: dict  # side -> max relative residual of W^{-+T} W^{+-} v - v
    intertwining: dict  # side -> max relative residual of W R_X(z) v - R_H(z) W v
    projection: dict  # side -> max relative residual of W^{+-} W^{-+T} v - P_+ v

    def worst(self) -> dict:
        return {
            "pa1": max(self.inverse.values(), default=0.0),
            "pa2": max(self.projection.values(), default=0.0),
            "pa3": max(self.intertwining.values(), default=0.0),
        }

    def to_dict(self) -> dict:
        return {
            "pa1": {k.value: v for k, v in self.inverse.items()},
            "pa2": {k.value: v for k, v in self.projection.items()},
            "pa3": {k.value: v for k, v in self.intertwining.items()},
        }


DEFAULT_Z = (-1.0 + 0.5j, 2.0j, -0.3 - 1.1j)


def verify_relations(
    p: PerturbationParams,
    test_vectors: Sequence[GridVector],
    zs: Iterable[complex] = DEFAULT_Z,
    with_projection: bool = True,
    eps_sequence=None,
) -> RelationsReport:
    """Residuals of W^-+T W^+- = 1, W^+- W^-+T = 1_[0,inf)(H) and W (z - X)^-1 = (z - H)^-1 W."""
    zs = list(zs)
    inv, inter, proj = {}, {}, {}
    pvs = []
    if with_projection:
        # the spectral projection does not depend on the side: compute once per vector
        kw = {} if eps_sequence is None else {"eps_sequence": eps_sequence}
        pvs = [positive_projection_apply(p, v, **kw) for v in test_vectors]
    for side in (Side.PLUS, Side.MINUS):
        W = moller(p, side)
        other = Side.MINUS if side is Side.PLUS else Side.PLUS
        WT = transpose(moller(p, other))
        r1 = r2 = r3 = 0.0
        for i, v in enumerate(test_vectors):
            nv = v.norm()
            Wv = apply(W, v)
            r1 = max(r1, (apply(WT, Wv) - v).norm() / nv)
            for z in zs:
                lhs = apply(W, GridVector(v.grid, v.values / (z - v.grid.x)))
                rhs = resolvent_apply(p, z, Wv)
                r3 = max(r3, (lhs - rhs).norm() / max(rhs.norm(), 1e-300))
            if with_projection:
                r2 = max(r2, (apply(W, apply(WT, v)) - pvs[i]).norm() / nv)
        inv[side], inter[side] = r1, r3
        if with_projection:
            proj[side] = r2
    return RelationsReport(p, inv, inter, proj)


def stationary_moller_apply(
    p: PerturbationParams, side, v: GridVector, eps: float, window: tuple[float, float] = (-4.0, 4.0)
) -> GridVector:
    """(eps/pi) int ds (s -+ i eps - H)^-1 (s +- i eps - X)^-1 v, on output nodes with t in ``window``.

    Independent of the Mellin calculus: the delta part integrates to v exactly, and
    the rank-one part is
    ``-h(x) int ds g(s -+ i eps)^-1 (P_eps * h v)(s) / (s -+ i eps - x)``
    with P_eps the Poisson kernel, done by quadrature on a uniform s-grid of step eps/8.
    Output entries outside the window are NaN.  Converges to ``apply(moller(p, side), v)``
    as eps -> 0; at fixed eps it is only a smoke test.
    """
    from scipy.interpolate import CubicSpline
    from scipy.signal import fftconvolve

    from .spectraldata import _inv_g_array

    if eps <= 0:
        raise ValueError("eps must be positive")
    sgn = _sign(side)
    grid = v.grid
    out = np.full(grid.n, np.nan + 0j)
    mask = (grid.t >= window[0]) & (grid.t <= window[1])
    if p.is_free:
        out[mask] = v.values[mask]
        return GridVector(grid, out)
    mag = np.abs(v.values) * np.sqrt(grid.x)
    support = np.nonzero(mag > 1e-13 * mag.max())[0]
    t_lo, t_hi = grid.t[support[0]], grid.t[support[-1]]
    s_max = 2.0 * max(math.exp(t_hi), math.exp(window[1]))
    ds = eps / 8
    s = np.arange(-1.0, s_max, ds)
    a = np.zeros(s.size, dtype=complex)
    inside = (s > 0) & (s >= math.exp(t_lo)) & (s <= math.exp(t_hi))
    a[inside] = CubicSpline(grid.t, v.values)(np.log(s[inside])) * p.h(s[inside])
    lags = np.arange(-(s.size - 1), s.size) * ds
    poisson = eps / math.pi / (lags**2 + eps**2)
    smooth = ds * fftconvolve(a, poisson)[s.size - 1 : 2 * s.size - 1]
    zeta = s - sgn * 1j * eps
    c = _inv_g_array(p, zeta) * smooth
    x = grid.x[mask]
    rank_one = np.array([ds * np.sum(c / (zeta - xj)) for xj in x])
    out[mask] = v.values[mask] - p.h(x) * rank_one
    return GridVector(grid, out)
