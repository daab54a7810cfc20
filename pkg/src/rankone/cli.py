"""Command-line front end.

Subcommands: resolvent, spectrum, phase-diagram, moller, rgflow, verify.
Exit codes: 0 success, 1 usage, 2 precondition violated, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .branchcut import BranchCutError
from .grid import GridMismatchError, GridVector, LogGrid, default_grid
from .greens import INF, PerturbationParams, PoleError

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_NUMERICAL = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code: str, message: str, parameter: str | None = None, exit_code: int = EXIT_PRECONDITION):
        super().__init__(message)
        self.code, self.message, self.parameter, self.exit_code = code, message, parameter, exit_code

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "parameter": self.parameter}


# --- deterministic JSON -----------------------------------------------------------


def _num(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0:
        return "0.0"
    if x == int(x) and abs(x) < 1e16:
        return format(float(x), ".1f")
    return format(x, ".17g")


def _enc(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is INF:
        return '"inf"'
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _enc({"re": float(obj.real), "im": float(obj.imag)}, indent, level)
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}{_enc(str(k), indent, level + 1)}: {_enc(v, indent, level + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + _enc(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON with fixed key order (insertion), 17 significant digits and lowercase exponents."""
    return _enc(obj, indent, 0) + "\n"


def _emit(doc: dict, path: str | None) -> None:
    text = dumps(doc)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- argument parsing ---------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def parse_complex(text: str, allow_inf: bool = False):
    s = text.strip().lower()
    if allow_inf and s in ("inf", "+inf", "infinity"):
        return INF
    parts = s.split(",")
    try:
        if len(parts) == 1:
            val = complex(float(parts[0]), 0.0)
        elif len(parts) == 2:
            val = complex(float(parts[0]), float(parts[1]))
        else:
            raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RE or RE,IM{' or inf' if allow_inf else ''}, got {text!r}")
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise argparse.ArgumentTypeError(f"non-finite value {text!r}")
    return val


def _coupling(text):
    return parse_complex(text, allow_inf=True)


def _add_grid(p):
    g = default_grid()
    p.add_argument("--tmin", type=float, default=g.t_min)
    p.add_argument("--tmax", type=float, default=g.t_max)
    p.add_argument("--n", type=int, default=g.n)


def _add_params(p):
    p.add_argument("--m", type=parse_complex, required=False, help="RE or RE,IM")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--lambda", dest="lam", type=_coupling, help="RE,IM or inf")
    grp.add_argument("--rho", type=_coupling, help="RE,IM or inf (m = 0 branch)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rankone", description="Rank-one perturbations of the operator X on L^2(0, inf).")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("resolvent", help="apply (z - H)^-1 to a grid vector")
    _add_params(p)
    p.add_argument("--z", type=parse_complex, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--json")
    _add_grid(p)

    p = sub.add_parser("spectrum", help="eigenvalues and exceptional flag")
    _add_params(p)
    p.add_argument("--k-range", type=int, default=64)
    p.add_argument("--json")

    p = sub.add_parser("phase-diagram", help="eigenvalue count over a grid of m")
    p.add_argument("--m-grid", required=True, help="re0,re1,im0,im1,steps")
    p.add_argument("--lambda", dest="lam", type=_coupling, required=True)
    p.add_argument("--k-range", type=int, default=64)
    p.add_argument("--csv", required=True)
    p.add_argument("--workers", type=int, default=4)

    p = sub.add_parser("moller", help="apply W^+-(H, X) to a grid vector")
    _add_params(p)
    p.add_argument("--side", choices=("plus", "minus"), required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--json")
    _add_grid(p)

    p = sub.add_parser("rgflow", help="convergence of the dilation flow")
    p.add_argument("--m", type=parse_complex, required=True)
    p.add_argument("--lambda", dest="lam", type=_coupling, default=None)
    p.add_argument("--cutoff", choices=("sharp", "smooth"), default="sharp")
    p.add_argument("--width", type=float, default=0.5)
    p.add_argument("--z", type=parse_complex, required=True)
    p.add_argument("--tau-list", required=True, help="comma separated, e.g. -1,-2,-3")
    p.add_argument("--csv", required=True)
    p.add_argument("--json")
    _add_grid(p)

    p = sub.add_parser("verify", help="oracle suites")
    p.add_argument("--suite", choices=("appendix", "greens", "mellin", "scattering", "all"), default="all")
    p.add_argument("--json")
    return ap


# --- helpers ------------------------------------------------------------------------


def _grid(args) -> LogGrid:
    try:
        return LogGrid(args.tmin, args.tmax, args.n)
    except ValueError as e:
        raise CliError("invalid_grid", str(e), "n")


def _params(args) -> PerturbationParams:
    try:
        if args.rho is not None:
            if args.m is not None and args.m != 0:
                raise CliError("invalid_parameter", "--rho belongs to the m = 0 branch", "m")
            return PerturbationParams.rho(args.rho)
        if args.m is None:
            raise CliError("invalid_parameter", "--lambda needs --m", "m")
        return PerturbationParams.m_lambda(args.m, args.lam)
    except ValueError as e:
        raise CliError("invalid_parameter", str(e), "m")


def _params_doc(p: PerturbationParams) -> dict:
    if p.is_rho:
        return {"m": 0j, "rho": p.coupling}
    return {"m": p.m, "lambda": p.coupling}


def _grid_doc(g: LogGrid | None) -> dict | None:
    return None if g is None else {"tmin": g.t_min, "tmax": g.t_max, "n": g.n, "dt": g.dt}


def _doc(params, grid, results, residuals=None) -> dict:
    return {"params": params, "grid": _grid_doc(grid), "results": results, "residuals": residuals or {}, "version": __version__}


def _read_vector(path: str, grid: LogGrid) -> GridVector:
    try:
        return GridVector.from_csv(path, grid)
    except GridMismatchError as e:
        raise CliError("grid_mismatch", f"{path}: {e}", "input")
    except (OSError, ValueError) as e:
        raise CliError("bad_input", f"{path}: {e}", "input")


def _meta(grid: LogGrid, **extra) -> dict:
    meta = {"version": __version__, "tmin": repr(grid.t_min), "tmax": repr(grid.t_max), "n": grid.n}
    meta.update({k: str(v) for k, v in extra.items()})
    return meta


# --- subcommands -------------------------------------------------------------------


def cmd_resolvent(args) -> int:
    from .greens import resolvent_apply

    p, grid = _params(args), _grid(args)
    v = _read_vector(args.input, grid)
    r = resolvent_apply(p, args.z, v)
    r.to_csv(args.output, _meta(grid, params=p.label(), z=args.z))
    if args.json:
        _emit(_doc(_params_doc(p), grid, {"z": args.z, "output": args.output, "norm": r.norm()}), args.json)
    return EXIT_OK


def spectrum_doc(p: PerturbationParams, k_range: int = 64) -> dict:
    from .spectraldata import eigenvalues

    rep = eigenvalues(p, k_range)
    res = rep.to_dict()
    residuals = {"max_abs_g": max((e.residual for e in rep.eigenvalues), default=0.0)}
    return _doc(_params_doc(p), None, res, residuals)


def cmd_spectrum(args) -> int:
    p = _params(args)
    if p.is_free:
        raise CliError("invalid_parameter", "H = X: the eigenvalue equation is degenerate", "lambda")
    if args.k_range < 1:
        raise CliError("invalid_parameter", "--k-range must be >= 1", "k-range")
    _emit(spectrum_doc(p, args.k_range), args.json)
    return EXIT_OK


def _parse_m_grid(text: str):
    try:
        re0, re1, im0, im1, steps = text.split(",")
        steps = int(steps)
        re0, re1, im0, im1 = map(float, (re0, re1, im0, im1))
    except ValueError:
        raise CliError("invalid_parameter", "--m-grid must be re0,re1,im0,im1,steps", "m-grid", EXIT_USAGE)
    if steps < 1:
        raise CliError("invalid_parameter", "steps must be >= 1", "m-grid")
    if not (-1 < min(re0, re1) and max(re0, re1) < 1):
        raise CliError("invalid_parameter", "need -1 < Re m < 1", "m-grid")
    return np.linspace(re0, re1, steps), np.linspace(im0, im1, steps)


def phase_row(re_m: float, im_m: float, lam, k_range: int):
    from .spectraldata import eigenvalues

    m = complex(re_m, im_m)
    if m == 0:
        return (re_m, im_m, "undefined", False)
    p = PerturbationParams.m_lambda(m, lam)
    if p.is_free:
        return (re_m, im_m, 0, False)
    rep = eigenvalues(p, k_range)
    return (re_m, im_m, rep.count, rep.exceptional)


def cmd_phase_diagram(args) -> int:
    res, ims = _parse_m_grid(args.m_grid)
    pts = [(r, i) for i in ims for r in res]
    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as ex:
        rows = list(ex.map(lambda ri: phase_row(ri[0], ri[1], args.lam, args.k_range), pts))
    with open(args.csv, "w", newline="") as fh:
        fh.write(f"# version={__version__}\n# lambda={'inf' if args.lam is INF else repr(args.lam)}\n")
        wr = csv.writer(fh)
        wr.writerow(["re_m", "im_m", "count", "exceptional"])
        for r, i, c, e in rows:
            wr.writerow([repr(float(r)), repr(float(i)), c, str(bool(e)).lower()])
    return EXIT_OK


def cmd_moller(args) -> int:
    from .scattering import apply, moller, verify_relations

    p, grid = _params(args), _grid(args)
    v = _read_vector(args.input, grid)
    W = moller(p, args.side)
    Wv = apply(W, v)
    Wv.to_csv(args.output, _meta(grid, params=p.label(), side=args.side))
    residuals = {}
    if args.verify:
        rep = verify_relations(p, [v])
        residuals = rep.to_dict()
    if args.json or args.verify:
        _emit(_doc(_params_doc(p), grid, {"side": args.side, "factorization": W.describe(), "output": args.output}, residuals), args.json)
    return EXIT_OK


def cmd_rgflow(args) -> int:
    from .rgflow import CutoffProfile, Regime, convergence_report, flow_coupling, regime_of

    grid = _grid(args)
    try:
        taus = [float(s) for s in args.tau_list.split(",") if s.strip()]
    except ValueError:
        raise CliError("invalid_parameter", "--tau-list must be comma separated numbers", "tau-list", EXIT_USAGE)
    try:
        prof = CutoffProfile(args.m, args.cutoff, args.width)
    except ValueError as e:
        raise CliError("invalid_parameter", str(e), "m")
    reg = regime_of(prof.m)
    if reg is not Regime.ZERO and (args.lam is None or args.lam is INF):
        raise CliError("invalid_parameter", "--lambda (finite) is required for m != 0", "lambda")
    if any(t > 0 for t in taus):
        raise CliError("invalid_parameter", "tau values must be <= 0", "tau-list")
    for t in taus:
        if grid.shift_steps(t) is None:
            raise CliError("invalid_parameter", f"tau={t} is not a multiple of the grid step", "tau-list")
    points = [flow_coupling(prof, args.lam, t) for t in taus]
    resid = convergence_report(prof, args.lam, args.z, taus, grid)
    with open(args.csv, "w", newline="") as fh:
        for k, v in _meta(grid, m=args.m, cutoff=args.cutoff, z=args.z).items():
            fh.write(f"# {k}={v}\n")
        wr = csv.writer(fh)
        wr.writerow(["tau", "coupling_re", "coupling_im", "residual"])
        for fp, r in zip(points, resid):
            wr.writerow([repr(fp.tau), repr(fp.coupling.real), repr(fp.coupling.imag), repr(float(r))])
    if args.json:
        results = {
            "regime": int(reg),
            "alpha": prof.alpha,
            "nu": prof.nu,
            "tau": taus,
            "coupling": [fp.coupling for fp in points],
        }
        _emit(_doc({"m": prof.m, "lambda": args.lam, "cutoff": args.cutoff}, grid, results, {"norm": resid}), args.json)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .suites import run

    checks = run(args.suite)
    results = [c.to_dict() for c in checks]
    passed = all(c.passed for c in checks)
    doc = _doc({"suite": args.suite}, None, results, {"worst_ratio": max((c.error / c.tol for c in checks), default=0.0), "all_passed": passed})
    _emit(doc, args.json)
    return EXIT_OK if passed else EXIT_NUMERICAL


COMMANDS = {
    "resolvent": cmd_resolvent,
    "spectrum": cmd_spectrum,
    "phase-diagram": cmd_phase_diagram,
    "moller": cmd_moller,
    "rgflow": cmd_rgflow,
    "verify": cmd_verify,
}


def _fail(err: CliError) -> int:
    sys.stderr.write(dumps({"error": err.to_dict()}))
    return err.exit_code


def _join_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--z -1,0.5`` into ``--z=-1,0.5``; argparse would read the value as a flag."""
    out: list[str] = []
    for tok in argv:
        if (
            out
            and out[-1].startswith("--")
            and "=" not in out[-1]
            and len(tok) > 1
            and tok[0] == "-"
            and (tok[1].isdigit() or tok[1] == ".")
        ):
            out[-1] = out[-1] + "=" + tok
        else:
            out.append(tok)
    return out


def run(argv=None) -> int:
    from .oracles import OracleConvergenceError
    from .scattering import ExceptionalParametersError

    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except CliError as e:
        return _fail(e)
    except ExceptionalParametersError as e:
        return _fail(CliError("exceptional_parameters", str(e), "lambda"))
    except BranchCutError as e:
        return _fail(CliError("branch_cut", str(e), "z"))
    except PoleError as e:
        return _fail(CliError("pole", str(e), "z"))
    except (np.linalg.LinAlgError, OracleConvergenceError, FloatingPointError, ArithmeticError) as e:
        return _fail(CliError("numerical_failure", str(e), None, EXIT_NUMERICAL))
    except ValueError as e:
        return _fail(CliError("invalid_parameter", str(e), None))


def main() -> None:
    sys.exit(run())
