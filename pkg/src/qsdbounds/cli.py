"""Command-line front end.

Subcommands: bounds, sweep, strategy, circuit-opt, figure, verify.
Exit status 0 on success, 1 on usage errors, 2 on numerical failure and
3 when ``verify`` finds a failing criterion.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .bounds import (
    chernoff_example1,
    chernoff_example2,
    chernoff_numeric,
    diagnostics,
    diagnostics_example1,
    diagnostics_pure,
    helstrom_general,
)
from .circuits import OptimizerConfig, build_brickwork, optimize_split_strategy
from .errors import DiscriminationError, DomainError, NumericalFailure
from .figures import SUPPORTED, FigureOptions, figure_table
from .states import (
    DiagonalStatePair,
    Example1Params,
    Example2Params,
    Example3Params,
    StatePair,
    build_example1,
    build_example2,
    build_example3,
)
from .strategies import (
    locc_adaptive,
    locc_appendixF,
    majority_vote,
    max_likelihood_diagonal,
    optimize_first_local,
    strategy_first_local,
    strategy_helstrom_then_local,
    ProjectiveQubitMeasurement,
)
from .tables import Table

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3
FAMILIES = ("example1", "example2", "example3", "pure")
SWEEP_OUTPUTS = ("helstrom", "chernoff", "R", "delta", "epsilon", "strategies")
STRATEGY_KINDS = ("first-local", "helstrom-then-local", "locc", "locc2-closed-form", "max-likelihood", "majority")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# problem construction
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Point:
    family: str
    v: float = 0.0
    alpha: float = 0.0
    theta: float = 0.0
    q: float = 0.5
    m: int = 1


def build_pair(p: Point) -> StatePair:
    if p.family == "example1":
        return build_example1(Example1Params(p.v), p.q)
    if p.family == "example2":
        return build_example2(Example2Params(p.v, p.alpha), p.q)
    if p.family == "pure":
        return build_example2(Example2Params(0.0, p.alpha), p.q)
    if p.family == "example3":
        return build_example3(Example3Params(p.theta, p.theta, p.theta), p.q)
    raise DomainError(f"unknown family {p.family!r}")


def report_for(p: Point, m: int | None = None):
    """Exponent report, via a closed form where one exists."""
    m = p.m if m is None else m
    if p.family == "example1":
        return diagnostics_example1(p.v, m, p.q)
    if p.q == 0.5 and (p.family == "pure" or (p.family == "example2" and p.v == 0.0)):
        return diagnostics_pure(p.alpha, m)
    pair = build_pair(p)
    return diagnostics(pair, m, chernoff=chernoff_for(p, pair))


def chernoff_for(p: Point, pair: StatePair | None = None):
    if p.family == "example1":
        return chernoff_example1(p.v)
    if p.family in ("example2", "pure"):
        return chernoff_example2(p.v if p.family == "example2" else 0.0, p.alpha)
    return chernoff_numeric(pair or build_pair(p))


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _point(args) -> Point:
    return Point(args.family, args.v, args.alpha, args.theta, args.q, args.M)


def cmd_bounds(args) -> Table:
    p = _point(args)
    r = report_for(p)
    t = Table(["family", "v", "alpha", "theta", "q", "M", "helstrom", "kappa", "s_star",
               "R", "one_minus_R", "epsilon_M", "epsilon_prime_M", "epsilon_inf"])
    t.add(p.family, p.v, p.alpha, p.theta, p.q, p.m, r.helstrom, r.kappa, r.s_star,
          r.r, r.one_minus_r, r.epsilon_m, r.epsilon_prime_m, r.epsilon_inf)
    return t


def _sweep_columns(outputs) -> list[str]:
    cols = []
    if "helstrom" in outputs:
        cols.append("helstrom")
    if "chernoff" in outputs:
        cols += ["kappa", "s_star"]
    if "R" in outputs:
        cols += ["R", "one_minus_R"]
    if "delta" in outputs:
        cols.append("delta_M_plus_2")
    if "epsilon" in outputs:
        cols += ["epsilon_M", "epsilon_prime_M", "epsilon_inf", "R_epsilon"]
    if "strategies" in outputs:
        cols += ["P_first_local", "P_LOCC"]
    return cols


def sweep_point(job) -> list:
    p, outputs = job
    r = report_for(p)
    row = []
    if "helstrom" in outputs:
        row.append(r.helstrom)
    if "chernoff" in outputs:
        row += [r.kappa, r.s_star]
    if "R" in outputs:
        row += [r.r, r.one_minus_r]
    if "delta" in outputs:
        row.append(report_for(p, p.m + 2).r - r.r)
    if "epsilon" in outputs:
        row += [r.epsilon_m, r.epsilon_prime_m, r.epsilon_inf, r.r_epsilon]
    if "strategies" in outputs:
        pair = build_pair(p)
        first = optimize_first_local(pair, p.m)[1].error_probability if p.m >= 2 else r.helstrom
        row += [first, locc_adaptive(pair, p.m).error_probability]
    return row


def sweep_points(args) -> list[Point]:
    pts = []
    for v, alpha, theta, q, m in itertools.product(args.v, args.alpha, args.theta, args.q, args.M):
        pts.append(Point(args.family, v, alpha, theta, q, m))
    return pts


def cmd_sweep(args) -> Table:
    outputs = tuple(args.outputs)
    pts = sweep_points(args)
    t = Table(["family", "v", "alpha", "theta", "q", "M"] + _sweep_columns(outputs))
    jobs = [(p, outputs) for p in pts]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            rows = list(ex.map(sweep_point, jobs))
    else:
        rows = [sweep_point(j) for j in jobs]
    for p, row in zip(pts, rows):
        t.add(p.family, p.v, p.alpha, p.theta, p.q, p.m, *row)
    return t


def cmd_strategy(args) -> Table:
    p = _point(args)
    pair = build_pair(p)
    p_h = helstrom_general(pair, p.m) if args.kind != "majority" else None
    angle = math.nan
    kind = args.kind
    if kind == "first-local":
        if args.phi is None:
            angle, res = optimize_first_local(pair, p.m)
        else:
            angle, res = args.phi, strategy_first_local(pair, p.m, ProjectiveQubitMeasurement(args.phi))
        err = res.error_probability
    elif kind == "helstrom-then-local":
        err = strategy_helstrom_then_local(pair, p.m).error_probability
    elif kind == "locc":
        res = locc_adaptive(pair, p.m)
        err = res.error_probability
        angle = res.angles.get("", math.nan)
    elif kind == "locc2-closed-form":
        if p.family not in ("example2", "pure") or p.m != 2 or p.q != 0.5:
            raise UsageError("locc2-closed-form needs family example2/pure, M = 2 and q = 0.5")
        err = locc_appendixF(p.v if p.family == "example2" else 0.0, p.alpha).error_probability
        angle = math.pi / 4
    elif kind == "max-likelihood":
        err, _ = max_likelihood_diagonal(DiagonalStatePair.from_pair(pair), p.m)
    else:
        rep = majority_vote(pair, p.m, args.n_total)
        t = Table(["kind", "M", "n_total", "exact_error", "exact_exponent", "exponent_lower_bound", "chernoff_exponent"])
        t.add(kind, p.m, rep.n_total, rep.exact_error, rep.exact_exponent, rep.exponent_lower_bound,
              -math.log(chernoff_for(p, pair).kappa))
        return t
    t = Table(["kind", "family", "v", "alpha", "q", "M", "error_probability", "helstrom", "gap", "angle"])
    t.add(kind, p.family, p.v, p.alpha, p.q, p.m, err, p_h, err - p_h, angle)
    return t


def cmd_circuit_opt(args) -> Table:
    p = _point(args)
    pair = build_pair(p)
    if not 1 <= args.final <= p.m:
        raise UsageError("--final must lie in [1, M]")
    k = p.m - args.final
    ansatz = build_brickwork(k * pair.rho_plus.n_qubits, args.layers) if k else None
    cfg = OptimizerConfig(args.hops, args.iters, args.seed, args.perturbation, args.tol)
    angles, res, trace = optimize_split_strategy(pair, p.m, args.final, ansatz, cfg)
    if args.trace:
        trace.write_csv(args.trace)
    t = Table(["M", "n_first", "n_final", "error_probability", "helstrom", "angles"])
    t.add(p.m, k, args.final, res.error_probability, helstrom_general(pair, p.m),
          " ".join(f"{a:.17g}" for a in angles))
    return t


def cmd_figure(args) -> Table:
    opts = FigureOptions(
        n_total_cap=args.n_total_cap, m_max=args.m_max, phi_points=args.phi_points,
        hops=args.hops, max_iters_per_hop=args.iters, seed=args.seed, layers=args.layers,
    )
    return figure_table(args.n, opts)


def cmd_verify(args) -> int:
    from .acceptance import format_results, run_acceptance

    results = run_acceptance(args.only)
    print(format_results(results), end="")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _float_list(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x]


def _int_range(s: str) -> list[int]:
    """``"3"``, ``"1,2,5"`` or ``"1:10"`` (inclusive)."""
    out = []
    for part in s.split(","):
        if ":" in part:
            lo, hi = part.split(":")
            out += list(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _add_family(p, multi: bool = False):
    p.add_argument("--family", choices=FAMILIES, default="example2")
    conv = _float_list if multi else float
    d = (lambda x: [x]) if multi else (lambda x: x)
    p.add_argument("--v", type=conv, default=d(0.1))
    p.add_argument("--alpha", type=conv, default=d(math.pi / 4), help="radians")
    p.add_argument("--alpha-deg", type=conv, default=None, help="degrees; overrides --alpha")
    p.add_argument("--theta", type=conv, default=d(0.0), help="common theta_x = theta_y = theta_z (example3)")
    p.add_argument("--q", type=conv, default=d(0.5))
    if multi:
        p.add_argument("--M", type=_int_range, default=[1])
    else:
        p.add_argument("--M", type=int, default=1)


def _add_output(p):
    p.add_argument("--out", help="write CSV to this path")
    p.add_argument("--format", choices=("table", "csv"), default="table", help="standard-output format")


def build_parser() -> tuple[_Parser, dict]:
    parser = _Parser(prog="qsdbounds", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="JSON file whose keys mirror the flags; flags win")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    p = subs["bounds"] = sub.add_parser("bounds", help="Helstrom, Chernoff and ratio diagnostics at one point")
    _add_family(p)
    _add_output(p)

    p = subs["sweep"] = sub.add_parser("sweep", help="diagnostics over parameter grids")
    _add_family(p, multi=True)
    p.add_argument("--outputs", type=lambda s: s.split(","), default=["helstrom", "chernoff", "R"])
    p.add_argument("--jobs", type=int, default=1)
    _add_output(p)

    p = subs["strategy"] = sub.add_parser("strategy", help="restricted measurement strategies")
    _add_family(p)
    p.add_argument("--kind", choices=STRATEGY_KINDS, required=True)
    p.add_argument("--phi", type=float, default=None, help="fixed first-copy angle (first-local)")
    p.add_argument("--n-total", type=int, default=10_000, help="copies for the majority vote")
    _add_output(p)

    p = subs["circuit-opt"] = sub.add_parser("circuit-opt", help="optimise a circuit first stage")
    _add_family(p)
    p.add_argument("--final", type=int, required=True, help="copies left for the final collective measurement")
    p.add_argument("--layers", type=int, default=6)
    p.add_argument("--hops", type=int, default=50)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--perturbation", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--trace", help="write the per-hop trace CSV here")
    _add_output(p)

    p = subs["figure"] = sub.add_parser("figure", help="data series behind a figure")
    p.add_argument("n", type=int)
    p.add_argument("--n-total-cap", type=int, default=10_000)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--phi-points", type=int, default=61)
    p.add_argument("--hops", type=int, default=50)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--layers", type=int, default=6)
    _add_output(p)

    p = subs["verify"] = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--only", type=_int_range, default=None, help="criterion numbers, e.g. 1,3:5")
    return parser, subs


def parse_args(argv) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        sp = subs[args.command]
        known = {a.dest for a in sp._actions}
        cfg = {k.replace("-", "_"): v for k, v in cfg.items() if k != "command"}
        unknown = set(cfg) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        for action in sp._actions:
            if action.dest in cfg and isinstance(cfg[action.dest], str) and action.type is not None:
                cfg[action.dest] = action.type(cfg[action.dest])
        multi = args.command == "sweep"
        for key in ("v", "alpha", "alpha_deg", "theta", "q"):
            if multi and key in cfg and not isinstance(cfg[key], list):
                cfg[key] = [cfg[key]]
        if multi and "M" in cfg and isinstance(cfg["M"], int):
            cfg["M"] = [cfg["M"]]
        sp.set_defaults(**cfg)
        args = parser.parse_args(argv)
    if getattr(args, "alpha_deg", None) is not None:
        if isinstance(args.alpha_deg, list):
            args.alpha = [math.radians(a) for a in args.alpha_deg]
        else:
            args.alpha = math.radians(args.alpha_deg)
    if args.command == "figure" and args.n not in SUPPORTED:
        raise UsageError(f"figure {args.n} is not supported; choose one of {list(SUPPORTED)}")
    if args.command == "sweep":
        bad = set(args.outputs) - set(SWEEP_OUTPUTS)
        if bad or not args.outputs:
            raise UsageError(f"unknown outputs {sorted(bad)}; choose from {SWEEP_OUTPUTS}")
        if not all([args.v, args.alpha, args.theta, args.q, args.M]):
            raise UsageError("sweep grids must be nonempty")
        if args.jobs < 1:
            raise UsageError("--jobs must be positive")
    return args


def _echo(args) -> list[str]:
    # worker count cannot change results, so it is left out of the echo
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("config", "jobs")}
    return [f"qsdbounds {__version__}", "config " + json.dumps(cfg, sort_keys=True, default=str)]


COMMANDS = {
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
    "strategy": cmd_strategy,
    "circuit-opt": cmd_circuit_opt,
    "figure": cmd_figure,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if args.command == "verify":
        return cmd_verify(args)
    try:
        table = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"qsdbounds: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"qsdbounds: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DiscriminationError, ValueError) as exc:
        print(f"qsdbounds: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"qsdbounds: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    table.comments = _echo(args) + table.comments
    if args.out:
        Path(args.out).write_text(table.to_csv())
    else:
        sys.stdout.write(table.to_csv() if args.format == "csv" else table.to_text())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
