"""Logarithmic grids on (0, inf), grid vectors and dense kernel matrices.

Nodes are ``x_j = exp(t_j)`` with ``t_j = t_min + j*dt`` and weights
``w_j = x_j*dt`` (trapezoid rule in ``t``).  A kernel matrix ``K`` acts by
``(K v)_j = sum_k K[j, k] w_k v_k``, so a multiplication operator by ``f``
is stored as the diagonal ``f(x_j)/w_j``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class LogGrid:
    t_min: float
    t_max: float
    n: int

    def __post_init__(self):
        if not self.t_min < self.t_max:
            raise ValueError("need t_min < t_max")
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")

    @property
    def dt(self) -> float:
        return (self.t_max - self.t_min) / self.n

    @cached_property
    def t(self) -> np.ndarray:
        return self.t_min + self.dt * np.arange(self.n)

    @cached_property
    def x(self) -> np.ndarray:
        return np.exp(self.t)

    @cached_property
    def w(self) -> np.ndarray:
        return self.x * self.dt

    def shifted(self, tau: float) -> "LogGrid":
        """Grid with nodes ``exp(tau) * x_j``."""
        return LogGrid(self.t_min + tau, self.t_max + tau, self.n)

    def shift_steps(self, tau: float, tol: float = 1e-9) -> int | None:
        """Number of nodes ``tau`` spans, or None if it is not a multiple of dt."""
        s = tau / self.dt
        k = int(round(s))
        return k if abs(s - k) < tol else None

    def refined(self, factor: int) -> "LogGrid":
        return LogGrid(self.t_min, self.t_max, self.n * factor)

    def interior_mask(self, fraction: float = 0.1) -> np.ndarray:
        k = int(self.n * fraction)
        mask = np.zeros(self.n, dtype=bool)
        mask[k : self.n - k] = True
        return mask


def default_grid() -> LogGrid:
    # dt = 1/16: integer dilations are exact index shifts
    return LogGrid(-64.0, 64.0, 2048)


@dataclass(frozen=True, eq=False)
class GridVector:
    grid: LogGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.n,):
            raise GridMismatchError(f"vector length {v.shape} does not match grid size {self.grid.n}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def _check(self, other: "GridVector") -> None:
        if other.grid != self.grid:
            raise GridMismatchError("vectors live on different grids")

    def __add__(self, other):
        self._check(other)
        return GridVector(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return GridVector(self.grid, self.values - other.values)

    def __mul__(self, c):
        return GridVector(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return GridVector(self.grid, -self.values)

    def conj(self) -> "GridVector":
        return GridVector(self.grid, self.values.conj())

    def norm(self) -> float:
        return float(np.sqrt(pair_sesquilinear(self, self).real))

    def to_csv(self, path, meta: dict | None = None) -> None:
        """Columns t, x, re, im; optional ``# key=value`` lines before the header."""
        with open(path, "w", newline="") as fh:
            for k, v in (meta or {}).items():
                fh.write(f"# {k}={v}\n")
            wr = csv.writer(fh)
            wr.writerow(["t", "x", "re", "im"])
            for t, x, v in zip(self.grid.t, self.grid.x, self.values):
                wr.writerow([repr(float(t)), repr(float(x)), repr(float(v.real)), repr(float(v.imag))])

    @classmethod
    def from_csv(cls, path, grid: LogGrid | None = None) -> "GridVector":
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(line for line in fh if not line.startswith("#")) if r]
        if not rows or [c.strip() for c in rows[0]] != ["t", "x", "re", "im"]:
            raise ValueError("expected a CSV with header t,x,re,im")
        data = np.array([[float(c) for c in r] for r in rows[1:]])
        if data.ndim != 2 or data.shape[0] < 2:
            raise ValueError("CSV holds no grid data")
        t = data[:, 0]
        n = t.size
        if grid is None:
            dt = (t[-1] - t[0]) / (n - 1)
            grid = LogGrid(float(t[0]), float(t[0] + n * dt), n)
        if grid.n != n or not np.allclose(grid.t, t, rtol=0, atol=1e-9 * max(1.0, abs(grid.dt))):
            raise GridMismatchError("CSV nodes do not match the requested grid")
        return cls(grid, data[:, 2] + 1j * data[:, 3])


def sample(f: Callable[[np.ndarray], np.ndarray], grid: LogGrid) -> GridVector:
    vals = np.asarray(f(grid.x), dtype=complex) * np.ones(grid.n)
    if not np.all(np.isfinite(vals)):
        raise ValueError("function is not finite at every grid node")
    return GridVector(grid, vals)


def pair_bilinear(f: GridVector, g: GridVector) -> complex:
    """<f|g> = sum_j w_j f_j g_j, no conjugation."""
    f._check(g)
    return complex(np.sum(f.grid.w * f.values * g.values))


def pair_sesquilinear(f: GridVector, g: GridVector) -> complex:
    f._check(g)
    return complex(np.sum(f.grid.w * f.values.conj() * g.values))


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    grid: LogGrid
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        k = np.asarray(self.entries, dtype=complex)
        if k.shape != (self.grid.n, self.grid.n):
            raise GridMismatchError("kernel matrix must be n x n for its grid")
        object.__setattr__(self, "entries", k)

    @classmethod
    def multiplier(cls, grid: LogGrid, values) -> "KernelMatrix":
        return cls(grid, np.diag(np.asarray(values, dtype=complex) / grid.w))

    @classmethod
    def separable(cls, grid: LogGrid, left, right, coeff=1.0) -> "KernelMatrix":
        """Kernel coeff * left(x) right(y), i.e. the operator coeff |left><right|."""
        return cls(grid, coeff * np.outer(left, right))

    @classmethod
    def identity(cls, grid: LogGrid) -> "KernelMatrix":
        return cls.multiplier(grid, np.ones(grid.n))

    def apply(self, v: GridVector) -> GridVector:
        if v.grid != self.grid:
            raise GridMismatchError("vector and kernel live on different grids")
        return GridVector(self.grid, self.entries @ (self.grid.w * v.values))

    def compose(self, other: "KernelMatrix") -> "KernelMatrix":
        """Kernel of self @ other."""
        return KernelMatrix(self.grid, (self.entries * self.grid.w) @ other.entries)

    def __add__(self, other):
        return KernelMatrix(self.grid, self.entries + other.entries)

    def __sub__(self, other):
        return KernelMatrix(self.grid, self.entries - other.entries)

    def __mul__(self, c):
        return KernelMatrix(self.grid, self.entries * c)

    __rmul__ = __mul__

    def weighted(self) -> np.ndarray:
        """Plain matrix W^1/2 K W^1/2, unitarily equivalent to K on l^2(w)."""
        s = np.sqrt(self.grid.w)
        return s[:, None] * self.entries * s[None, :]

    def norm(self) -> float:
        """Operator norm on L^2 as approximated by the grid."""
        return spectral_norm(self.weighted())

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        k = self.entries
        return bool(np.max(np.abs(k - k.T)) <= tol * max(np.max(np.abs(k)), 1e-300))


def transpose(k: KernelMatrix) -> KernelMatrix:
    """Transpose w.r.t. the bilinear pairing: kernel K(y, x)."""
    return KernelMatrix(k.grid, k.entries.T)


def spectral_norm(a: np.ndarray) -> float:
    from scipy.sparse.linalg import svds

    if a.shape[0] <= 64:
        return float(np.linalg.norm(a, 2))
    try:
        s = svds(a, k=1, return_singular_vectors=False, tol=1e-10)
        return float(s[0])
    except Exception:
        return float(np.linalg.norm(a, 2))
