"""Command-line front end.

Every subcommand writes one table or report to ``--out`` (stdout by
default).  Settings resolve as command-line flag, then the ``--config``
JSON file, then the built-in default.  Exit codes: 0 success,
1 verification failure, 2 bad arguments or unwritable output.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from . import __version__, battery, dynamics, export, linsymp, normalform, reduced, unfolding
from .tolerances import CLASSIFY_TOL
from .unfolding import CubicCoeffs, ParamsKMN

DEFAULTS = {
    "a1": 1.0, "a2": 0.0, "a3": 0.0,
    "kappa": 0.0, "mu": None, "nu": None, "q0": 0.0, "r": 0.0,
    "grid": "-0.1:0.1:21", "mu_grid": None, "nu_grid": None, "q0_grid": None,
    "tol": CLASSIFY_TOL, "out": None, "format": "csv", "threads": 1, "json": False,
    "surfaces": False, "beta_max": 1.0, "steps": 11, "table": "curve",
    "example": "1", "x0": None, "dt": 1e-3, "T": 100.0, "method": dynamics.RK4, "every": 100,
}

# per-subcommand fallbacks for settings whose natural default differs
_COMMAND_DEFAULTS = {
    "classify": {"mu": 0.0, "nu": 0.0},
    "normalize": {"nu": 0.1},
    "simulate": {"mu": 0.04},
}

_EXAMPLE_STARTS = {
    "1": (-0.15, 0.0, 0.0, 0.0),
    "2": (0.1, 0.0, 0.0, 0.0),
    "unfolding": (0.01, 0.0, 0.0, 0.0),
}


class UsageError(ValueError):
    """Bad flag values or configuration, reported with exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# settings


def parse_grid(text: str) -> np.ndarray:
    """``min:max:steps`` to ``steps`` evenly spaced values."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError(f"grid {text!r} is not min:max:steps")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"grid {text!r} is not min:max:steps") from None
    if n < 1 or not (np.isfinite(lo) and np.isfinite(hi)):
        raise UsageError(f"grid {text!r} must be finite with at least one step")
    if n == 1:
        return np.array([lo])
    return np.linspace(lo, hi, n)


def parse_vector(text) -> tuple[float, float, float, float]:
    if isinstance(text, (list, tuple)):
        vals = [float(v) for v in text]
    else:
        try:
            vals = [float(v) for v in str(text).split(",")]
        except ValueError:
            raise UsageError(f"x0 {text!r} is not four comma-separated numbers") from None
    if len(vals) != 4:
        raise UsageError(f"x0 needs four components (q1,q2,p1,p2), got {len(vals)}")
    return tuple(vals)


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    unknown = sorted(set(data) - set(DEFAULTS))
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return data


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags over the config file over the defaults."""
    config = load_config(getattr(args, "config", None))
    settings = dict(DEFAULTS)
    settings.update({k: v for k, v in _COMMAND_DEFAULTS.get(args.command, {}).items()})
    settings.update(config)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            settings[key] = val
    if not float(settings["tol"]) > 0:
        raise UsageError("--tol must be positive")
    if int(settings["threads"]) < 1:
        raise UsageError("--threads must be at least 1")
    if settings["format"] not in ("csv", "json"):
        raise UsageError(f"unknown format {settings['format']!r}")
    for key in ("a1", "a2", "a3", "kappa", "q0", "r", "tol", "dt", "T", "beta_max"):
        if not np.isfinite(float(settings[key])):
            raise UsageError(f"{key} must be finite")
    return settings


def _coeffs(s: dict) -> CubicCoeffs:
    return CubicCoeffs(float(s["a1"]), float(s["a2"]), float(s["a3"]))


def _axis(s: dict, name: str) -> np.ndarray:
    return parse_grid(s[f"{name}_grid"] or s["grid"])


def _emit(text: str, s: dict) -> None:
    try:
        export.write_text(text, s["out"])
    except OSError as exc:
        raise UsageError(str(exc)) from None


# subcommands


def cmd_verify(s: dict, corrupt_p: bool = False) -> int:
    P = None
    if corrupt_p:
        P = linsymp.williamson_to_standard().copy()
        P[0, 0] += 1
    checks = battery.run_battery(P)
    failed = [c.name for c in checks if not c.passed]
    if s["json"]:
        text = export.json_text({"passed": not failed, "failed": failed,
                                 "checks": [c.as_dict() for c in checks]})
    else:
        text = "".join(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}\n" for c in checks)
    _emit(text, s)
    if failed:
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def classify_report(p: ParamsKMN, c: CubicCoeffs, tol: float = CLASSIFY_TOL) -> dict:
    """Equilibria of ``H_{kappa,mu,nu}`` with surface proximity and certificates."""
    records = unfolding.solve_equilibria(p, c, tol)
    out = []
    for rec in records:
        item = rec.as_dict()
        row = unfolding.classify_point(p.mu, p.nu, rec.q0, c, tol)
        item["on_fold"] = row.on_fold
        item["on_hopf"] = row.on_hopf
        if row.on_hopf and row.Q < 0:
            cm = unfolding.cm_coefficient(p.nu, rec.q0, c)
            item["C_m"] = cm
            item["hopf"] = "supercritical (C_m > 0)" if cm > 0 else (
                "subcritical (C_m < 0)" if cm < 0 else "degenerate (C_m = 0)")
        if row.on_fold:
            try:
                item["fold_cubic_coefficient"] = unfolding.fold_cubic_coefficient(p.nu, rec.q0, c)
                item["fold_branch"] = unfolding.fold_branch(p.nu, rec.q0, c)
            except ValueError as exc:
                item["fold"] = str(exc)
        out.append(item)
    return {
        "parameters": {"kappa": p.kappa, "mu": p.mu, "nu": p.nu,
                       "a1": c.a1, "a2": c.a2, "a3": c.a3},
        "equilibria": out,
        "summary": "no equilibria" if not out else f"{len(out)} equilibri{'um' if len(out) == 1 else 'a'}",
    }


def cmd_classify(s: dict) -> int:
    c = _coeffs(s)
    p = ParamsKMN(float(s["kappa"]), float(s["mu"]), float(s["nu"]))
    _emit(export.json_text(classify_report(p, c, float(s["tol"]))), s)
    return 0


def cmd_surfaces(s: dict) -> int:
    rows = unfolding.surface_sample(_coeffs(s), _axis(s, "mu"), _axis(s, "nu"), _axis(s, "q0"),
                                    surfaces=bool(s["surfaces"]), threads=int(s["threads"]),
                                    tol=float(s["tol"]))
    _emit(export.table_text(unfolding.SURFACE_COLUMNS, [r.as_tuple() for r in rows], s["format"]), s)
    return 0


EIGENGRID_COLUMNS = ("mu", "nu", "tag")


def eigengrid_rows(mu_values, nu_values, tol: float, threads: int = 1) -> list[tuple]:
    """Tags of ``J0`` row-major in ``mu``; ordering does not depend on ``threads``."""
    work = lambda mu: linsymp.eigen_grid([mu], nu_values, tol)  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(work, mu_values))
    else:
        chunks = [work(mu) for mu in mu_values]
    return [(mu, nu, tag.value) for chunk in chunks for mu, nu, tag in chunk]


def cmd_eigengrid(s: dict) -> int:
    rows = eigengrid_rows(_axis(s, "mu"), _axis(s, "nu"), float(s["tol"]), int(s["threads"]))
    _emit(export.table_text(EIGENGRID_COLUMNS, rows, s["format"]), s)
    return 0


def cmd_reduced(s: dict) -> int:
    r = float(s["r"])
    beta_max = float(s["beta_max"])
    steps = int(s["steps"])
    if steps < 1:
        raise UsageError("--steps must be at least 1")
    if s["table"] == "curve":
        betas = np.linspace(0.0, beta_max, steps) if steps > 1 else np.array([beta_max])
        header, rows = reduced.CURVE_COLUMNS, reduced.curve_table(betas, r)
    elif s["table"] == "grid":
        betas = np.linspace(-beta_max, beta_max, steps) if steps > 1 else np.array([beta_max])
        header, rows = reduced.GRID_COLUMNS, reduced.grid_table(betas, _axis(s, "q0"), r, float(s["tol"]))
    else:
        raise UsageError(f"unknown table {s['table']!r}")
    _emit(export.table_text(header, rows, s["format"]), s)
    return 0


def cmd_normalize(s: dict) -> int:
    try:
        result = normalform.hopf_normal_form(float(s["nu"]), float(s["q0"]), _coeffs(s))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(export.json_text(result.report()), s)
    return 0


def _simulation_hamiltonian(s: dict):
    example = str(s["example"])
    mu = float(s["mu"])
    if example == "1":
        return dynamics.example_centre_saddle(mu)
    if example == "2":
        return dynamics.example_hopf_linear(mu)
    if example == "unfolding":
        return unfolding.hamiltonian(ParamsKMN(float(s["kappa"]), mu, float(s["nu"] or 0.0)), _coeffs(s))
    raise UsageError(f"unknown example {example!r}")


def cmd_simulate(s: dict) -> int:
    H = _simulation_hamiltonian(s)
    x0 = parse_vector(s["x0"]) if s["x0"] is not None else _EXAMPLE_STARTS[str(s["example"])]
    every = int(s["every"])
    if every < 1:
        raise UsageError("--every must be at least 1")
    try:
        traj = dynamics.integrate(H, x0, float(s["dt"]), float(s["T"]), s["method"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = traj.rows()
    kept = rows[::every]
    if rows and kept[-1] is not rows[-1]:
        kept.append(rows[-1])
    _emit(export.table_text(dynamics.TRAJECTORY_COLUMNS, kept, s["format"]), s)
    summary = f"method={traj.method} drift={traj.energy_drift():.3e} escaped={str(traj.escaped).lower()}"
    if traj.fallback:
        summary += " fallback=rk4"
    print(summary, file=sys.stderr)
    return 0


# parser


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("coefficients and parameters")
    for name in ("a1", "a2", "a3"):
        g.add_argument(f"--{name}", type=float, help=f"cubic coefficient {name} (default {DEFAULTS[name]})")
    g.add_argument("--kappa", type=float, help="unfolding parameter kappa (default 0)")
    g.add_argument("--mu", type=float, help="unfolding parameter mu")
    g.add_argument("--nu", type=float, help="unfolding parameter nu")
    g.add_argument("--q0", type=float, help="equilibrium coordinate q0 (default 0)")
    g.add_argument("--r", type=float, help="remainder r of the reduced family (default 0)")
    o = p.add_argument_group("run control")
    o.add_argument("--grid", help=f"default axis grid min:max:steps (default {DEFAULTS['grid']})")
    o.add_argument("--tol", type=float, help=f"classification tolerance (default {CLASSIFY_TOL:g})")
    o.add_argument("--out", metavar="PATH", help="output file, '-' for stdout (default stdout)")
    o.add_argument("--format", choices=("csv", "json"), help="table format (default csv)")
    o.add_argument("--threads", type=int, metavar="N", help="worker threads; output order is unaffected")
    o.add_argument("--config", metavar="PATH", help="JSON file of settings; flags take precedence")
    o.add_argument("--json", action="store_true", default=None, help="machine-readable report")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nilunfold", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="exact algebra battery",
                       description="Run the exact checks (matrix P, S, phi map, sl2 triple, complement). "
                                   "Prints one PASS/FAIL line per check, or with --json an object "
                                   "{passed, failed, checks: [{name, passed, detail}]}. Exit 1 names "
                                   "the failing checks.")
    _common(p)
    p.add_argument("--corrupt-p", action="store_true", help=argparse.SUPPRESS)

    p = sub.add_parser("classify", help="equilibria of one unfolding member",
                       description="JSON report of every equilibrium of H(kappa, mu, nu): state, "
                                   "eigenvalues, configuration, Q, P, fold/Hopf proximity, the Hopf "
                                   "certificate C_m and the fold cubic coefficient where they apply. "
                                   "Defaults kappa = mu = nu = 0.")
    _common(p)

    p = sub.add_parser("surfaces", help="configuration table over (mu, nu, q0)",
                       description="CSV/JSON table with columns "
                                   f"{','.join(unfolding.SURFACE_COLUMNS)}, ordered by nu, q0, mu.")
    _common(p)
    for axis in ("mu", "nu", "q0"):
        p.add_argument(f"--{axis.replace('_', '-')}-grid", dest=f"{axis}_grid", metavar="MIN:MAX:STEPS",
                       help=f"{axis} axis (default --grid)")
    p.add_argument("--surfaces", action="store_true", default=None,
                   help="append the fold and Hopf points of every (nu, q0) pair")

    p = sub.add_parser("eigengrid", help="eigenvalue configurations of the versal family",
                       description="Table mu,nu,tag of the configuration of J0(mu, nu), row-major in mu.")
    _common(p)
    p.add_argument("--mu-grid", dest="mu_grid", metavar="MIN:MAX:STEPS", help="mu axis (default --grid)")
    p.add_argument("--nu-grid", dest="nu_grid", metavar="MIN:MAX:STEPS", help="nu axis (default --grid)")

    p = sub.add_parser("reduced", help="two-parameter reduced family",
                       description="curve table beta,alpha_fold,alpha_hopf,r for beta in [0, beta-max], "
                                   "or grid table beta,q0,r,config for beta in [-beta-max, beta-max] "
                                   "and q0 on --q0-grid.")
    _common(p)
    p.add_argument("--table", choices=("curve", "grid"), help="table kind (default curve)")
    p.add_argument("--beta-max", dest="beta_max", type=float, help="largest |beta| (default 1)")
    p.add_argument("--steps", type=int, help="number of beta values (default 11)")
    p.add_argument("--q0-grid", dest="q0_grid", metavar="MIN:MAX:STEPS", help="q0 axis (default --grid)")

    p = sub.add_parser("normalize", help="Hopf normal form at a Hopf-surface point",
                       description="JSON report {parameters, omega, coefficients {S, N, M, M2, SM, S2}, "
                                   "generators_summary}. S, N, M hold the beta^0..beta^2 series. "
                                   "Default nu = 0.1, q0 = 0 (omega = 1 for a = (1, 0, 0)).")
    _common(p)

    p = sub.add_parser("simulate", help="integrate a fixture Hamiltonian",
                       description="Trajectory table t,q1,q2,p1,p2,H every --every steps plus the "
                                   "final state. Example 1: p1^2/2 - q1^3/3 + mu q1; Example 2: "
                                   "the linear Hopf fixture; 'unfolding': H(kappa, mu, nu). A summary "
                                   "line with the energy drift goes to stderr.")
    _common(p)
    p.add_argument("--example", choices=("1", "2", "unfolding"), help="fixture (default 1, mu = 0.04)")
    p.add_argument("--x0", help="initial state q1,q2,p1,p2 (default -0.15,0,0,0 for Example 1)")
    p.add_argument("--dt", type=float, help="time step (default 1e-3)")
    p.add_argument("--T", type=float, help="final time (default 100)")
    p.add_argument("--method", choices=dynamics.METHODS, help="integrator (default rk4)")
    p.add_argument("--every", type=int, help="output stride in steps (default 100)")
    return parser


_COMMANDS = {
    "classify": cmd_classify,
    "surfaces": cmd_surfaces,
    "eigengrid": cmd_eigengrid,
    "reduced": cmd_reduced,
    "normalize": cmd_normalize,
    "simulate": cmd_simulate,
}


_VALUE_FLAGS = ("--grid", "--mu-grid", "--nu-grid", "--q0-grid", "--x0")


def _attach_values(argv: Sequence[str]) -> list[str]:
    """Join ``--grid -0.1:0.1:5`` into one token so the leading dash is not read as a flag."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_attach_values(argv))
        settings = resolve(args)
        if args.command == "verify":
            return cmd_verify(settings, corrupt_p=args.corrupt_p)
        return _COMMANDS[args.command](settings)
    except UsageError as exc:
        print(f"nilunfold: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
