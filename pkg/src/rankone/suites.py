"""Cross-checks of the closed-form modules against the quadrature oracles.

Each suite returns a list of :class:`Check`; the ``verify`` CLI subcommand and the
acceptance tests both use them.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import oracles
from .grid import GridVector, LogGrid, default_grid, sample
from .greens import INF, PerturbationParams, g_value
from .mellin import apply_symbol, cauchy_symbol

SUITES = ("appendix", "greens", "mellin", "scattering")


@dataclass
class Check:
    suite: str
    name: str
    params: dict
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.error < self.tol)

    def to_dict(self) -> dict:
        params = {k: ([v.real, v.imag] if isinstance(v, complex) else v) for k, v in self.params.items()}
        return {"suite": self.suite, "name": self.name, "params": params, "error": self.error, "tol": self.tol, "passed": self.passed}


def _rel(a, b) -> float:
    return float(abs(a - b) / max(abs(b), 1e-300))


def appendix_suite(n: int = 10) -> list[Check]:
    return [Check("appendix", r.name, r.params, r.rel_error, r.tol) for r in oracles.appendix_sweep(n)]


def random_mz(rng: np.random.Generator, re_range=(-0.9, -0.1)):
    m = complex(rng.uniform(*re_range), rng.uniform(-0.5, 0.5))
    r = math.exp(rng.uniform(-2, 2))
    # keep z a little away from the cut so the quadrature is well conditioned
    phi = rng.uniform(-math.pi + 0.2, math.pi - 0.2)
    z = -r * cmath.exp(1j * phi)
    return m, z


def g_checks(n: int = 20, seed: int = 1) -> list[Check]:
    """z-dependent part of g vs quadrature of <h|(z - X)^-1|h>, -0.9 < Re m < -0.1."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        m, z = random_mz(rng)
        closed = g_value(PerturbationParams.m_lambda(m, INF), z)
        quad = oracles.pairing_quad(m, z, 1)
        out.append(Check("greens", "g_infinity", {"m": m, "z": z}, _rel(closed, quad), 1e-8))
    return out


def derivative_checks(n: int = 20, seed: int = 2) -> list[Check]:
    """Central difference of g vs -<h|(z - X)^-2|h> by quadrature, 0 <= Re m < 1."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        m, z = random_mz(rng, (0.0, 0.9))
        if k == 0:
            m = 0j
        p = PerturbationParams.rho(0.3) if m == 0 else PerturbationParams.m_lambda(m, 0.7)
        step = 1e-4 * abs(z)
        fd = (g_value(p, z + step) - g_value(p, z - step)) / (2 * step)
        quad = oracles.log_pairing_derivative_quad(z) if m == 0 else -oracles.pairing_quad(m, z, 2)
        out.append(Check("greens", "g_derivative", {"m": m, "z": z}, _rel(fd, quad), 1e-6))
    return out


def greens_suite() -> list[Check]:
    return g_checks() + derivative_checks()


LOCK_BUMPS = ((1.0, 0.5), (0.5, 1.0), (2.0, 0.5))


def cauchy_lock(center: float, width: float, sign: int, grid: LogGrid | None = None, eps_ladder=(8e-3, 4e-3, 2e-3, 1e-3)):
    """Relative errors of the symbol route vs the eps-regularised kernel 1/(x - y - sign i eps).

    Returns (error at the smallest eps, error after Richardson extrapolation), measured
    on every other node within two widths of the bump centre.
    """
    grid = grid or default_grid()

    def f(x):
        return math.exp(-((math.log(x) - center) ** 2) / (2 * width**2))

    v = sample(np.vectorize(f), grid)
    support = (math.exp(center - 9 * width), math.exp(center + 9 * width))
    idx = np.nonzero(np.abs(grid.t - center) <= 2 * width)[0][::2]
    symbol_side = apply_symbol(cauchy_symbol(sign), v).values[idx]
    rows = [np.array([oracles.regularized_cauchy_quad(f, grid.x[j], e, sign, support) for j in idx]) for e in eps_ladder]
    ref = np.linalg.norm(symbol_side)
    raw = float(np.linalg.norm(rows[-1] - symbol_side) / ref)
    ext = float(np.linalg.norm(oracles._richardson(rows, list(eps_ladder)) - symbol_side) / ref)
    return raw, ext


def mellin_suite() -> list[Check]:
    out = []
    for c, w in LOCK_BUMPS:
        for s in (1, -1):
            raw, ext = cauchy_lock(c, w, s)
            out.append(Check("mellin", "cauchy_eps_1e-3", {"center": c, "width": w, "sign": s}, raw, 1e-3))
            out.append(Check("mellin", "cauchy_extrapolated", {"center": c, "width": w, "sign": s}, ext, 1e-5))
    return out


MOLLER_PARAMS = (
    PerturbationParams.rho(0.0),
    PerturbationParams.rho(0.5 + 1.0j),
    PerturbationParams.rho(-1.0 - 2.0j),
    PerturbationParams.m_lambda(-0.5, 1.0),
    PerturbationParams.m_lambda(0.5, -1.0),
    PerturbationParams.m_lambda(0.3 + 0.4j, 0.7 - 0.2j),
    PerturbationParams.m_lambda(-0.6 + 0.2j, 2.0 + 1.0j),
    PerturbationParams.m_lambda(0.3 + 0.2j, INF),
    PerturbationParams.m_lambda(-0.25, INF),
    PerturbationParams.m_lambda(0.7 - 0.1j, 0.2j),
)


def bump_vectors(grid: LogGrid) -> list[GridVector]:
    """Smooth bumps, compactly supported to double precision well inside the grid."""
    t = grid.t
    return [
        GridVector(grid, np.exp(-(t**2) / (2 * 0.5**2))),
        GridVector(grid, t * np.exp(-((t - 1) ** 2) / (2 * 0.7**2)) * (1 + 0.5j)),
    ]


def scattering_suite(params=MOLLER_PARAMS, with_projection: bool = True) -> list[Check]:
    from .scattering import recommended_grid, verify_relations

    out = []
    for p in params:
        vs = bump_vectors(recommended_grid(p))
        rep = verify_relations(p, vs, with_projection=with_projection)
        w = rep.worst()
        label = {"params": p.label()}
        out.append(Check("scattering", "inverse", label, w["pa1"], 1e-6))
        out.append(Check("scattering", "intertwining", label, w["pa3"], 1e-6))
        if with_projection:
            out.append(Check("scattering", "projection", label, w["pa2"], 1e-4))
    return out


def run(suite: str = "all") -> list[Check]:
    runners = {"appendix": appendix_suite, "greens": greens_suite, "mellin": mellin_suite, "scattering": scattering_suite}
    if suite == "all":
        return [c for name in SUITES for c in runners[name]()]
    if suite not in runners:
        raise ValueError(f"unknown suite {suite!r}")
    return runners[suite]()

