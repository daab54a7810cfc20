"""Complex logarithm and powers of ``-z`` with the cut placed on [0, inf).

All functions accept scalars or numpy arrays.  The physical sheet is
C minus [0, inf); on it ``log_neg(z) = ln(-z)`` has imaginary part in (-pi, pi).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class BranchCutError(ValueError):
    """Raised when a point lies on the cut [0, inf)."""


class Side(str, Enum):
    PLUS = "plus"  # x + i0
    MINUS = "minus"  # x - i0

    @property
    def sign(self) -> int:
        return 1 if self is Side.PLUS else -1


@dataclass(frozen=True)
class BoundaryPoint:
    x: float
    side: Side

    def __post_init__(self):
        if not self.x > 0:
            raise ValueError(f"boundary point needs x > 0, got {self.x}")
        object.__setattr__(self, "side", Side(self.side))


def on_cut(z) -> np.ndarray:
    # exact test: tiny negative reals such as -1e-20 are legitimate sheet points
    z = np.asarray(z, dtype=complex)
    return (z.imag == 0) & (z.real >= 0)


def check_sheet(z) -> None:
    if np.any(on_cut(z)):
        raise BranchCutError("point lies on the cut [0, inf); use a BoundaryPoint")


def log_neg(z):
    """ln(-z) on the physical sheet.

    Built from the principal argument of ``z`` itself: arg(-z) = arg(z) - pi*sign(arg z),
    so no library routine with a cut on (-inf, 0] is ever evaluated near its cut.
    """
    check_sheet(z)
    za = np.asarray(z, dtype=complex)
    ang = np.angle(za)
    # arg(z) = 0 only happens on the cut, excluded above
    out = np.log(np.abs(za)) + 1j * (ang - np.pi * np.sign(ang))
    return out[()] if out.ndim == 0 else out


def neg_power(z, m):
    """(-z)**m on the physical sheet, continuous across (-inf, 0)."""
    out = np.exp(np.asarray(m, dtype=complex) * log_neg(z))
    return out[()] if np.ndim(out) == 0 else out


def boundary_log_neg(p: BoundaryPoint) -> complex:
    """Limit of ln(-z) as z -> x +/- i0: ln x -/+ i pi."""
    return complex(np.log(p.x), -p.side.sign * np.pi)


def boundary_neg_power(p: BoundaryPoint, m) -> complex:
    return complex(p.x ** complex(m) * np.exp(-p.side.sign * 1j * np.pi * complex(m)))


def boundary_log_neg_array(x, side) -> np.ndarray:
    """Vectorised boundary values of ln(-z) for an array of x > 0 on one side."""
    s = Side(side).sign
    return np.log(np.asarray(x, dtype=float)) - s * 1j * np.pi
