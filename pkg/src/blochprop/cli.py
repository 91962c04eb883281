"""Command-line front end.  JSON goes out with shortest round-trip floats,
CSV with 12 significant digits.  Exit codes: 0 ok, 2 usage, 3 domain error,
4 verification failure."""
from __future__ import annotations

import argparse
import json
import math
import re
import sys

import numpy as np

from .atlas import atlas_grid
from .core import gamma_from_params, partition
from .cubic import DEFAULT_TOL_REL, RootClass, analyse
from .eigenframe import obliquity, real_basis
from .errors import BlochError
from .oracle import propagator_error, verify_random
from .propagator import propagator
from .solution import steady_state, trajectory

SCHEMA = "blochprop/1"
EXIT_USAGE, EXIT_DOMAIN, EXIT_VERIFY = 2, 3, 4


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} values, got {len(vals)}")
    return vals


def _triple(text: str) -> list[float]:
    return _floats(text, 3)


def _t_grid(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected START:STOP:N")
    try:
        start, stop, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad time grid {text!r}")
    if n < 1 or stop < start:
        raise argparse.ArgumentTypeError("time grid needs N >= 1 and STOP >= START")
    return start, stop, n


def _lambda_grid(text: str) -> tuple[float, float, int]:
    vals = _floats(text, 3)
    if vals[2] != int(vals[2]):
        raise argparse.ArgumentTypeError("grid resolution must be an integer")
    return vals[0], vals[1], int(vals[2])


_NEGATIVE_VALUE = re.compile(r"^-[\d.]")


def _attach_negative_values(argv: list[str]) -> list[str]:
    """Rewrite '--opt -1,2,3' as '--opt=-1,2,3' so argparse does not read it as a flag."""
    out: list[str] = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEGATIVE_VALUE.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def _clean(x):
    """JSON-safe copy: NaN/inf become null, numpy scalars become Python floats."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    return x if math.isfinite(x) else None


def _csv_num(x: float) -> str:
    return format(x, ".12g")


def _system_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--w", type=_triple, required=required, metavar="W1,W2,W3",
                   help="effective field components, rad/s")
    p.add_argument("--r", type=_triple, required=required, metavar="R1,R2,R3",
                   help="relaxation rates, 1/s")
    p.add_argument("--hz", action="store_true", help="read --w in Hz (multiplied by 2 pi)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blochprop", description=__doc__.split("\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--out", default=None, help="write to this file instead of stdout")
    common.add_argument("--tol", type=float, default=None, help="relative tolerance")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("propagate", parents=[common], help="propagator matrix exp(-Gamma t)")
    _system_args(p)
    p.add_argument("--t", type=float, required=True)

    p = sub.add_parser("trajectory", parents=[common], help="M(t) on a time grid")
    _system_args(p)
    p.add_argument("--t-grid", type=_t_grid, required=True, metavar="START:STOP:N")
    p.add_argument("--m0", type=_triple, default=None, metavar="X,Y,Z", help="initial magnetization")
    p.add_argument("--meq", type=float, default=1.0, help="equilibrium magnetization along z")

    p = sub.add_parser("steady-state", parents=[common], help="steady-state magnetization")
    _system_args(p)
    p.add_argument("--meq", type=float, default=1.0)

    p = sub.add_parser("roots", parents=[common], help="cubic coefficients, root class and eigenvalues")
    _system_args(p)

    p = sub.add_parser("regimes", parents=[common], help="regime grid in scaled coordinates")
    p.add_argument("--lambda-grid", type=_lambda_grid, required=True, metavar="L12MAX,L3MAX,N")

    p = sub.add_parser("frame", parents=[common], help="oblique eigenframe and obliquity")
    _system_args(p)
    p.add_argument("--column", type=int, choices=(1, 2, 3), default=None)

    p = sub.add_parser("verify", parents=[common], help="compare the closed form with the reference expm")
    _system_args(p, required=False)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--times", type=int, default=5, help="times per random system")
    return parser


def _field(args) -> list[float]:
    return [w * 2.0 * math.pi for w in args.w] if args.hz else list(args.w)


def _echo(args, **extra) -> dict:
    out = {"w": list(args.w), "r": list(args.r), "hz": bool(args.hz)}
    if args.hz:
        out["w_rad_per_s"] = _field(args)
    out.update(extra)
    return out


def _roots_doc(g, tol) -> dict:
    p = partition(g)
    c, sol = analyse(p, tol)
    eig = [[z.real, z.imag] for z in sol.shifted]
    return {
        "a": c.a,
        "b": c.b,
        "gamma": c.gamma,
        "class": sol.root_class.value,
        "z1": sol.z1,
        "varpi": sol.varpi if sol.varpi_sq >= 0 else None,
        "varpi_sq": sol.varpi_sq,
        "rbar": p.rbar,
        "s1": eig[0],
        "s2": eig[1],
        "s3": eig[2],
    }


def _cmd_propagate(args, tol):
    g = gamma_from_params(_field(args), args.r)
    prop = propagator(g, args.t, tol)
    doc = {"input": _echo(args, t=args.t), "matrix": prop.m, "branch": prop.branch.value,
           "roots": _roots_doc(g, tol)}
    return doc, [[_csv_num(x) for x in row] for row in prop.m], None


def _cmd_trajectory(args, tol):
    g = gamma_from_params(_field(args), args.r)
    start, stop, n = args.t_grid
    times = [start] if n == 1 else list(np.linspace(start, stop, n))
    m_init = args.m0 if args.m0 is not None else [0.0, 0.0, args.meq]
    rows = [[t, m.mx, m.my, m.mz] for t, m in trajectory(g, m_init, args.meq, times, tol)]
    doc = {"input": _echo(args, t_grid=list(args.t_grid), m0=list(m_init), meq=args.meq),
           "columns": ["t", "mx", "my", "mz"], "samples": rows}
    return doc, [[_csv_num(x) for x in row] for row in rows], ["t", "mx", "my", "mz"]


def _cmd_steady_state(args, tol):
    g = gamma_from_params(_field(args), args.r)
    m = steady_state(g, args.meq).as_array()
    doc = {"input": _echo(args, meq=args.meq), "steady_state": m}
    return doc, [[_csv_num(x) for x in m]], ["mx", "my", "mz"]


def _cmd_roots(args, tol):
    g = gamma_from_params(_field(args), args.r)
    return {"input": _echo(args), **_roots_doc(g, tol)}, None, None


def _cmd_regimes(args, tol):
    l12max, l3max, n = args.lambda_grid
    rows = atlas_grid((0.0, l12max), (0.0, l3max), n, tol)
    cols = ["lambda12", "lambda3", "class", "z1_over_Rdelta", "varpi_over_Rdelta"]
    table = [[r["lambda12"], r["lambda3"], r["regime"], r["z1_over_Rdelta"], r["varpi_over_Rdelta"]] for r in rows]
    csv_rows = [[_csv_num(a), _csv_num(b), c, _csv_num(d), _csv_num(e)] for a, b, c, d, e in table]
    doc = {"input": {"lambda_grid": [l12max, l3max, n]}, "columns": cols, "rows": table}
    return doc, csv_rows, cols


def _cmd_frame(args, tol):
    g = gamma_from_params(_field(args), args.r)
    p = partition(g)
    _, sol = analyse(p, tol)
    f = real_basis(p, sol, args.column)
    doc = {
        "input": _echo(args, column=args.column),
        "class": sol.root_class.value,
        "column": f.column_used,
        "basis": {"s1": f.s1, "s2": f.s2, "s3": f.s3},
        "p_inverse": f.p_inverse,
        "rates": list(f.rates),
        "varpi": f.varpi if sol.root_class is RootClass.UNDERDAMPED else None,
        "obliquity": obliquity(f) if sol.root_class is RootClass.UNDERDAMPED else None,
    }
    return doc, None, None


def _cmd_verify(args, tol):
    tol = 1e-9 if args.tol is None else args.tol
    if args.w is not None or args.r is not None:
        if args.w is None or args.r is None or args.t is None:
            raise _Usage("verify on a given system needs --w, --r and --t")
        g = gamma_from_params(_field(args), args.r)
        err = propagator_error(g, args.t)
        doc = {"input": _echo(args, t=args.t), "tol": tol, "max_error": err, "pass": err <= tol}
        return doc, None, None
    if args.samples < 1 or args.times < 1:
        raise _Usage("--samples and --times must be >= 1")
    rep = verify_random(args.samples, args.seed, args.times)
    doc = {
        "input": {"samples": args.samples, "seed": args.seed, "times": args.times},
        "seed": args.seed,
        "evaluations": rep.evaluations,
        "tol": tol,
        "max_error": rep.max_error,
        "worst": {"w": list(rep.worst_field), "r": list(rep.worst_rates), "t": rep.worst_time},
        "pass": rep.max_error <= tol,
    }
    return doc, None, None


class _Usage(Exception):
    pass


_COMMANDS = {
    "propagate": (_cmd_propagate, "json"),
    "trajectory": (_cmd_trajectory, "csv"),
    "steady-state": (_cmd_steady_state, "json"),
    "roots": (_cmd_roots, "json"),
    "regimes": (_cmd_regimes, "csv"),
    "frame": (_cmd_frame, "json"),
    "verify": (_cmd_verify, "json"),
}


def _render(command: str, fmt: str, doc: dict, rows, header) -> str:
    if fmt == "json":
        body = {"schema": SCHEMA, "command": command, **doc}
        return json.dumps(_clean(body), allow_nan=False) + "\n"
    lines = [] if header is None else [",".join(header)]
    lines += [",".join(r) for r in rows]
    return "\n".join(lines) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(_attach_negative_values(sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    handler, default_fmt = _COMMANDS[args.command]
    fmt = args.format or default_fmt
    tol = DEFAULT_TOL_REL if args.tol is None or args.command == "verify" else args.tol
    try:
        doc, rows, header = handler(args, tol)
        if fmt == "csv" and rows is None:
            raise _Usage(f"{args.command} has no CSV form; use --format json")
    except _Usage as e:
        parser.print_usage(stderr)
        print(f"blochprop: error: {e}", file=stderr)
        return EXIT_USAGE
    except BlochError as e:
        err = {"schema": SCHEMA, "command": args.command, "error": type(e).__name__, "message": str(e)}
        print(json.dumps(err), file=stderr)
        return EXIT_DOMAIN
    text = _render(args.command, fmt, doc, rows, header)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if args.command == "verify" and not doc["pass"]:
        return EXIT_VERIFY
    return 0


def main(argv=None) -> int:
    return run(argv)
