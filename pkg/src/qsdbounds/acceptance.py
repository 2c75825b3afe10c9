"""Acceptance checks, shared by ``qsdbounds verify`` and the test suite.

Each check returns ``(passed, detail)``; :func:`run_acceptance` times it and
turns exceptions into failures.
"""
from __future__ import annotations

import io
import math
import tempfile
import time
from contextlib import redirect_stdout
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import mpmath
import numpy as np

from .bounds import (
    chernoff_example1,
    chernoff_example2,
    chernoff_example3_sstar,
    chernoff_g,
    chernoff_numeric,
    diagnostics,
    diagnostics_example1,
    diagnostics_pure,
    helstrom_example1,
    helstrom_general,
    helstrom_metrology_approx,
    helstrom_projectors,
    helstrom_pure,
    weighted_powers,
)
from .circuits import OptimizerConfig, build_brickwork, optimize_split_strategy
from .errors import NumericalFailure
from .states import (
    DensityMatrix,
    Example1Params,
    Example2Params,
    Example3Params,
    StatePair,
    build_example1,
    build_example2,
    build_example3,
)
from .strategies import (
    check_optimality,
    helstrom_then_local_at_angle,
    locc_adaptive,
    locc_appendixF,
    majority_vote,
    optimize_first_local,
)

V_GRID = tuple(round(0.1 * k, 10) for k in range(1, 10))
ALPHA_GRID = tuple(k * math.pi / 12 for k in range(1, 6))
FIG7 = Example2Params(0.1, math.pi / 4)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float


def c1_helstrom_analytic():
    t0 = time.perf_counter()
    worst = 0.0
    for v in V_GRID:
        for q in (0.3, 0.5, 0.7):
            pair = build_example1(Example1Params(v), q)
            for m in range(1, 11):
                worst = max(worst, abs(helstrom_example1(v, m, q) - helstrom_general(pair, m)))
    dt = time.perf_counter() - t0
    return worst <= 1e-10 and dt <= 30.0, f"max diff {worst:.2e}, {dt:.1f} s"


def c2_helstrom_pure():
    worst = 0.0
    for alpha in ALPHA_GRID:
        pair = build_example2(Example2Params(0.0, alpha))
        for m in range(1, 11):
            worst = max(worst, abs(helstrom_pure(math.cos(alpha) ** 2, m) - helstrom_general(pair, m)))
    return worst <= 1e-10, f"max diff {worst:.2e}"


def example3_stationarity_residual(a: float, h: float = 1e-6) -> float:
    """``|d/ds Tr[rho_+^s rho_-^(1-s)]|`` at the closed-form ``s*``, by central difference."""
    t = a / math.sqrt(3.0)
    pair = build_example3(Example3Params(t, t, t))
    s = chernoff_example3_sstar(a)
    return abs(chernoff_g(pair, s + h) - chernoff_g(pair, s - h)) / (2 * h)


def c3_chernoff_closed_forms():
    dk = ds = 0.0
    for v in V_GRID:
        num = chernoff_numeric(build_example1(Example1Params(v)))
        dk = max(dk, abs(num.kappa - chernoff_example1(v).kappa))
        ds = max(ds, abs(num.s_star - 0.5))
        for alpha in ALPHA_GRID:
            num = chernoff_numeric(build_example2(Example2Params(v, alpha)))
            dk = max(dk, abs(num.kappa - chernoff_example2(v, alpha).kappa))
            ds = max(ds, abs(num.s_star - 0.5))
    res = max(example3_stationarity_residual(0.05 * k) for k in range(1, 10))
    ok = dk <= 1e-8 and ds <= 1e-6 and res <= 1e-7
    return ok, f"kappa diff {dk:.1e}, |s*-1/2| {ds:.1e}, stationarity residual {res:.1e}"


def c4_pure_ratio_below_one():
    alphas = [k * math.pi / 20 for k in range(1, 10)]
    min_gap = min(diagnostics_pure(a, m).one_minus_r for a in alphas for m in range(1, 26))
    rng = np.random.default_rng(1)
    worst_ratio, worst_rel = 0.0, 0.0
    # gamma can be ~1e-150, so the literal 1 - sqrt(1 - gamma) needs far more than double precision
    with mpmath.workdps(400):
        for _ in range(1000):
            alpha = float(rng.uniform(1e-3, math.pi / 2 - 1e-3))
            m = int(rng.integers(1, 26))
            gamma = mpmath.cos(mpmath.mpf(alpha)) ** (2 * m)
            exact = (1 - mpmath.sqrt(1 - gamma)) / gamma
            if not exact < 1:
                return False, f"R^M = {exact} at alpha={alpha}, M={m}"
            worst_ratio = max(worst_ratio, float(exact))
            r_m = math.exp(m * math.log(diagnostics_pure(alpha, m).r))
            worst_rel = max(worst_rel, abs(r_m - float(exact)) / float(exact))
    ok = min_gap > 0 and worst_ratio < 1 and worst_rel <= 1e-9
    return ok, f"min 1-R {min_gap:.2e}, max R^M {worst_ratio:.6f}, float vs mp rel {worst_rel:.1e}"


def c5_upper_bound_everywhere():
    count = 0
    worst = -math.inf  # max of log(P^(1/M)) - log(kappa)
    reports = []
    for v in V_GRID:
        for q in (0.3, 0.5, 0.7):
            reports += [diagnostics_example1(v, m, q) for m in range(1, 31)]
    for v in (0.05, 0.25, 0.6):
        for alpha in ALPHA_GRID:
            pair = build_example2(Example2Params(v, alpha), 0.5)
            chern = chernoff_numeric(pair)
            reports += [diagnostics(pair, m, chernoff=chern) for m in range(1, 9)]
    for alpha in ALPHA_GRID:
        reports += [diagnostics_pure(alpha, m) for m in range(1, 26)]
    for a in (0.05, 0.2, 0.4):
        t = a / math.sqrt(3.0)
        pair = build_example3(Example3Params(t, t, t))
        chern = chernoff_numeric(pair)
        reports += [diagnostics(pair, m, chernoff=chern) for m in range(1, 7)]
    for r in reports:
        count += 1
        if r.r > 1 + 1e-12:
            return False, f"R({r.m}) = {r.r}"
        if r.helstrom > 0:
            worst = max(worst, r.log_helstrom / r.m - math.log(r.kappa))
    return worst <= 1e-12, f"{count} instances, max log(P^(1/M)/kappa) {worst:.3e}"


def c6_two_copy_locc():
    worst = 0.0
    for v in np.linspace(0.0, 1.0, 20):
        for alpha in np.linspace(0.0, math.pi / 2, 20):
            pair = build_example2(Example2Params(float(v), float(alpha)))
            worst = max(worst, abs(locc_appendixF(float(v), float(alpha)).error_probability - helstrom_general(pair, 2)))
    worst_fl = 0.0
    for v, alpha in ((0.1, math.pi / 4), (0.0, math.pi / 6), (0.3, math.pi / 3), (0.6, math.pi / 8)):
        pair = build_example2(Example2Params(v, alpha))
        _, res = optimize_first_local(pair, 2)
        worst_fl = max(worst_fl, res.error_probability - helstrom_general(pair, 2))
    ok = worst <= 1e-10 and worst_fl <= 1e-8
    return ok, f"closed-form LOCC(2) max diff {worst:.1e}, first-local excess {worst_fl:.1e}"


def fig7_gaps() -> dict[int, float]:
    pair = build_example2(FIG7)
    return {m: optimize_first_local(pair, m)[1].error_probability - helstrom_general(pair, m) for m in (3, 4)}


def c7_first_local_gaps():
    gaps = fig7_gaps()
    return min(gaps.values()) >= 1e-5, f"gap M=3 {gaps[3]:.6e}, M=4 {gaps[4]:.6e}"


def c8_flatness():
    pair = build_example2(FIG7)
    vals = [helstrom_then_local_at_angle(pair, 4, float(phi)).error_probability for phi in np.linspace(0, math.pi, 181)]
    spread = max(vals) - min(vals)
    return spread <= 1e-12, f"spread {spread:.1e} at value {vals[0]:.12f}"


def fig8_split_values(config: OptimizerConfig = OptimizerConfig(), layers: int = 6) -> dict[int, float]:
    """Optimised ``P^4_{4-N,N}`` keyed by ``N``, plus ``P_H(4)`` under key 4."""
    pair = build_example2(FIG7)
    out = {4: helstrom_general(pair, 4)}
    for n_final in (3, 2, 1):
        _, res, _ = optimize_split_strategy(pair, 4, n_final, build_brickwork(4 - n_final, layers), config)
        out[n_final] = res.error_probability
    return out


def c9_split_ordering():
    t0 = time.perf_counter()
    p = fig8_split_values()
    slack = 2e-5
    ordered = p[4] + 1e-4 <= p[3] + slack and p[3] <= p[2] + slack and p[2] <= p[1] + slack
    pure = build_example2(Example2Params(0.0, math.pi / 4))
    locc_gap = abs(locc_adaptive(pure, 4).error_probability - helstrom_general(pure, 4))
    dt = time.perf_counter() - t0
    detail = (
        f"P_H {p[4]:.8f}, P(1,3) {p[3]:.8f}, P(2,2) {p[2]:.8f}, P(3,1) {p[1]:.8f}; "
        f"pure LOCC gap {locc_gap:.1e}; {dt:.0f} s"
    )
    return ordered and locc_gap <= 1e-5 and dt <= 600, detail


def c10_majority_vote():
    v = 0.8
    pair = build_example1(Example1Params(v))
    chern = -math.log(chernoff_example1(v).kappa)
    ok, parts = True, []
    for m in (1, 2, 3):
        r = majority_vote(pair, m, 10_000, helstrom_example1(v, m))
        ok &= r.exact_exponent >= r.exponent_lower_bound
        parts.append(f"M={m}: {r.exact_exponent:.5f} >= {r.exponent_lower_bound:.5f}")
        if m == 1:
            rel = abs(r.exact_exponent - chern) / chern
            ok &= rel <= 0.05
            parts.append(f"rel. to chernoff {rel:.3f}")
    return ok, "; ".join(parts)


def random_qubit_state(rng: np.random.Generator) -> DensityMatrix:
    r = rng.normal(size=3)
    r *= rng.uniform() ** (1 / 3) / np.linalg.norm(r)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.diag([1.0, -1.0]).astype(complex)
    return DensityMatrix(0.5 * (np.eye(2) + r[0] * sx + r[1] * sy + r[2] * sz))


def c11_optimality_conditions():
    rng = np.random.default_rng(7)
    worst, inverted_passed = 0.0, 0
    for _ in range(100):
        pair = StatePair(random_qubit_state(rng), random_qubit_state(rng), float(rng.uniform(0.2, 0.8)))
        for m in (1, 2, 3):
            xp, xm = weighted_powers(pair, m)
            p1, p2 = helstrom_projectors(pair.prior_q * xp, (1 - pair.prior_q) * xm)
            chk = check_optimality((p1, p2), pair, m)
            worst = max(worst, chk.commutation_residual, chk.positivity_residual)
            inverted_passed += bool(check_optimality((p2, p1), pair, m))
    return worst <= 1e-9 and inverted_passed == 0, f"max residual {worst:.1e}, inverted accepted {inverted_passed}"


def metrology_deltas(m: int, thetas=(1e-4, 2e-4, 4e-4)) -> list[float]:
    out = []
    for th in thetas:
        p = Example3Params(th, th, th)
        out.append(abs(helstrom_metrology_approx(p.a, m) - helstrom_general(build_example3(p), m)))
    return out


def c12_metrology_quadratic():
    thetas = (1e-4, 2e-4, 4e-4)
    ok, parts = True, []
    for m in range(1, 7):
        d = metrology_deltas(m, thetas)
        c_fit = max(di / th**2 for di, th in zip(d, thetas))
        ok &= all(di <= c_fit * th**2 * (1 + 1e-12) for di, th in zip(d, thetas))
        if m == 1:
            # first-order formula is exact for one copy
            ok &= max(d) <= 1e-15
            parts.append(f"M=1 max {max(d):.1e}")
            continue
        ratio = min(d[i + 1] / d[i] for i in range(2))
        ok &= ratio >= 3.5
        parts.append(f"M={m} C={c_fit:.3g} ratio {ratio:.2f}")
    return ok, "; ".join(parts)


def _cli(argv) -> int:
    from .cli import main

    buf = io.StringIO()
    with redirect_stdout(buf):
        return main(argv)


def c13_determinism():
    with tempfile.TemporaryDirectory() as tmp:
        d = Path(tmp)
        base = ["circuit-opt", "--M", "4", "--final", "1", "--layers", "6", "--hops", "50",
                "--iters", "500", "--seed", "42"]
        files = []
        for run in (1, 2):
            out, tr = d / f"opt{run}.csv", d / f"trace{run}.csv"
            if _cli(base + ["--out", str(out), "--trace", str(tr)]) != 0:
                return False, "circuit-opt failed"
            files.append((out.read_bytes(), tr.read_bytes().replace(str(tr).encode(), b"")))
        opt_same = files[0][0].replace(b"opt1", b"opt2").replace(b"trace1", b"trace2") == files[1][0]
        trace_same = files[0][1] == files[1][1]
        sweep = ["sweep", "--family", "example2", "--v", "0.05,0.3", "--alpha", "0.4,1.1", "--M", "1:4",
                 "--outputs", "helstrom,chernoff,R,delta,epsilon"]
        texts = []
        for jobs in (1, 3):
            out = d / f"sweep{jobs}.csv"
            if _cli(sweep + ["--jobs", str(jobs), "--out", str(out)]) != 0:
                return False, "sweep failed"
            texts.append(out.read_text().replace(str(out), ""))
        sweep_same = texts[0] == texts[1]
    ok = opt_same and trace_same and sweep_same
    return ok, f"circuit-opt identical {opt_same}, trace identical {trace_same}, sweep identical {sweep_same}"


CRITERIA: dict[int, tuple[str, Callable[[], tuple[bool, str]]]] = {
    1: ("analytic vs numeric Helstrom (example 1)", c1_helstrom_analytic),
    2: ("pure-state Helstrom", c2_helstrom_pure),
    3: ("Chernoff closed forms and stationarity", c3_chernoff_closed_forms),
    4: ("finite-copy ratio below one (pure states)", c4_pure_ratio_below_one),
    5: ("P_H^(1/M) <= kappa and R <= 1 everywhere", c5_upper_bound_everywhere),
    6: ("two-copy LOCC attains Helstrom", c6_two_copy_locc),
    7: ("first-local gaps at M = 3, 4", c7_first_local_gaps),
    8: ("final-copy angle flatness at M = 4", c8_flatness),
    9: ("circuit split ordering at M = 4", c9_split_ordering),
    10: ("majority-vote exponents", c10_majority_vote),
    11: ("optimality conditions", c11_optimality_conditions),
    12: ("first-order metrology approximation", c12_metrology_quadratic),
    13: ("determinism", c13_determinism),
}


def run_criterion(n: int) -> CriterionResult:
    title, fn = CRITERIA[n]
    t0 = time.perf_counter()
    try:
        passed, detail = fn()
    except (NumericalFailure, ArithmeticError, ValueError) as exc:
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CriterionResult(n, title, bool(passed), detail, time.perf_counter() - t0)


def run_acceptance(only=None) -> list[CriterionResult]:
    numbers = sorted(CRITERIA) if not only else [n for n in sorted(set(only)) if n in CRITERIA]
    return [run_criterion(n) for n in numbers]


def format_line(r: CriterionResult) -> str:
    return f"criterion {r.number:2d} {'PASS' if r.passed else 'FAIL'}  {r.title}: {r.detail} [{r.seconds:.1f} s]"


def format_results(results) -> str:
    lines = [format_line(r) for r in results]
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} criteria passed")
    return "\n".join(lines) + "\n"
