"""Functions of the dilation generator A on a logarithmic grid.

The map ``(U v)(t) = exp(t/2) v(exp(t))`` is unitary from L^2(0, inf) onto L^2(R)
and turns dilations ``U_tau f(x) = exp(tau/2) f(exp(tau) x)`` into translations
``t -> t + tau``.  An operator with kernel ``phi(ln(x/y)) / sqrt(x y)`` becomes
convolution by ``phi``, i.e. ``S(A)`` with ``S(xi) = int phi(t) exp(-i xi t) dt``.
On the grid this is a circulant, applied with the FFT.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import GridVector, LogGrid


@dataclass(frozen=True)
class MellinSymbol:
    func: Callable[[np.ndarray], np.ndarray]
    name: str = "symbol"

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        return np.asarray(self.func(xi), dtype=complex) * np.ones(xi.shape)

    def __mul__(self, other: "MellinSymbol") -> "MellinSymbol":
        return MellinSymbol(lambda xi: self(xi) * other(xi), f"({self.name})*({other.name})")


def frequencies(grid: LogGrid) -> np.ndarray:
    return 2 * np.pi * np.fft.fftfreq(grid.n, d=grid.dt)


def _symbol_on_grid(S: MellinSymbol, grid: LogGrid) -> np.ndarray:
    xi = frequencies(grid)
    s = S(xi)
    # Nyquist bin is its own mirror image; symmetrise so transposition stays exact
    k = grid.n // 2
    s[k] = 0.5 * (s[k] + S(np.array([-xi[k]]))[0])
    return s


def apply_symbol(S: MellinSymbol, v: GridVector) -> GridVector:
    grid = v.grid
    r = np.sqrt(grid.x)
    u = np.fft.ifft(_symbol_on_grid(S, grid) * np.fft.fft(r * v.values))
    return GridVector(grid, u / r)


def transpose_symbol(S: MellinSymbol) -> MellinSymbol:
    return MellinSymbol(lambda xi: S(-np.asarray(xi)), f"T[{S.name}]")


def dilation_apply(tau: float, v: GridVector, interpolate: bool = False) -> GridVector:
    """U_tau v; exact index shift when tau is a multiple of dt (zero-filled at the edge)."""
    grid = v.grid
    s = grid.shift_steps(tau)
    if s is None:
        if not interpolate:
            raise ValueError(f"tau={tau} is not a multiple of the grid step {grid.dt}")
        return apply_symbol(dilation_symbol(tau), v)
    out = np.zeros(grid.n, dtype=complex)
    src = v.values
    if s >= 0:
        out[: grid.n - s] = src[s:]
    else:
        out[-s:] = src[: grid.n + s]
    return GridVector(grid, np.exp(tau / 2) * out)


class DiscreteTransform:
    """phi_hat(xi) = dt * sum_j phi(t_j) exp(-i xi t_j), evaluable at any real xi."""

    def __init__(self, values: np.ndarray, grid: LogGrid):
        self.values = np.asarray(values, dtype=complex)
        self.grid = grid

    def __call__(self, xi):
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        out = np.empty(xi.shape, dtype=complex)
        t = self.grid.t
        for i in range(0, xi.size, 256):
            chunk = xi.flat[i : i + 256]
            out.flat[i : i + 256] = self.grid.dt * (np.exp(-1j * np.outer(chunk, t)) @ self.values)
        return out


def symbol_from_profile(phi: Callable[[np.ndarray], np.ndarray], grid: LogGrid) -> MellinSymbol:
    vals = np.asarray(phi(grid.t), dtype=complex) * np.ones(grid.n)
    return MellinSymbol(DiscreteTransform(vals, grid), "profile")


def profile_from_symbol(S: MellinSymbol, grid: LogGrid) -> np.ndarray:
    """Inverse of :func:`symbol_from_profile` on the FFT frequencies of ``grid``."""
    xi = frequencies(grid)
    phase = np.exp(1j * xi * grid.t_min)
    return np.fft.ifft(S(xi) * phase) / grid.dt


def _exp_ratio(xi, s: int, a: complex, b: complex) -> np.ndarray:
    """(exp(2 pi s xi) + a) / (exp(2 pi s xi) + b) without overflow."""
    xi = np.asarray(xi, dtype=float)
    y = 2 * np.pi * s * xi
    out = np.empty(xi.shape, dtype=complex)
    big = y > 0
    e = np.exp(-y[big])
    out[big] = (1 + a * e) / (1 + b * e)
    e = np.exp(y[~big])
    out[~big] = (e + a) / (e + b)
    return out


def identity_symbol() -> MellinSymbol:
    return MellinSymbol(lambda xi: np.ones_like(xi, dtype=complex), "1")


def dilation_symbol(tau: float) -> MellinSymbol:
    return MellinSymbol(lambda xi: np.exp(1j * tau * xi), f"U_{tau}")


def cauchy_symbol(sign: int) -> MellinSymbol:
    """sign*2 pi i / (exp(sign*2 pi xi) + 1): the operator with kernel 1/(x - y - sign*i0)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return MellinSymbol(
        lambda xi: sign * 2j * np.pi * (1 - _exp_ratio(xi, sign, 0.0, 1.0)),
        f"{'+' if sign > 0 else '-'}2pi i/(exp({'+' if sign > 0 else '-'}2pi A)+1)",
    )


def moller_infinity_symbol(m, sign: int) -> MellinSymbol:
    """(exp(-/+2 pi xi) + exp(-/+ i pi m)) / (exp(-/+2 pi xi) + exp(+/- i pi m)) for sign = +/-1."""
    m = complex(m)
    if not -1 < m.real < 1:
        raise ValueError("symbol unbounded unless -1 < Re m < 1")
    a = cmath.exp(-sign * 1j * np.pi * m)
    b = cmath.exp(sign * 1j * np.pi * m)
    return MellinSymbol(lambda xi: _exp_ratio(xi, -sign, a, b), f"Winf{'+' if sign > 0 else '-'}(m={m})")
