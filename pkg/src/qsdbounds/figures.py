"""Data series behind the published figures, at their parameter settings."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import (
    chernoff_example1,
    chernoff_numeric,
    delta,
    delta_epsilon,
    diagnostics,
    diagnostics_example1,
    diagnostics_metrology,
    diagnostics_pure,
    helstrom_example1,
    helstrom_general,
    helstrom_metrology_approx,
)
from .circuits import OptimizerConfig, build_brickwork, optimize_split_strategy
from .errors import DomainError
from .states import Example1Params, Example2Params, Example3Params, build_example1, build_example2, build_example3
from .strategies import first_local_errors, helstrom_then_local_at_angle, locc_adaptive, majority_vote
from .tables import Table

SUPPORTED = (2, 3, 4, 5, 6, 7, 8, 9)
QUBIT_EXAMPLE_V = (0.2, 0.5, 0.8)


@dataclass(frozen=True)
class FigureOptions:
    n_total_cap: int = 10_000
    m_max: int | None = None
    phi_points: int = 61
    hops: int = 50
    max_iters_per_hop: int = 500
    seed: int = 0
    layers: int = 6


def _fig2(o: FigureOptions) -> Table:
    m_max = o.m_max or 30
    t = Table(["v", "M", "one_minus_R", "delta_M_plus_2"])
    t.comments.append("example 1, q = 0.5; delta_M_plus_2 = R(M+2) - R(M)")
    for v in QUBIT_EXAMPLE_V:
        src = lambda m, v=v: diagnostics_example1(v, m)  # noqa: E731
        for m in range(1, m_max + 1):
            t.add(v, m, src(m).one_minus_r, delta(src, m + 2, m))
    return t


def _fig3(o: FigureOptions) -> Table:
    v = 0.8
    m_max = o.m_max or 10
    pair = build_example1(Example1Params(v))
    chern = -math.log(chernoff_example1(v).kappa)
    t = Table(["panel", "M", "n_total", "exact_exponent", "exponent_lower_bound", "chernoff_exponent"])
    t.comments.append(f"example 1, v = {v}, q = 0.5; majority vote over repeated M-copy Helstrom tests")
    t.comments.append("panel a: exponent per block size at n_total = cap; panel b: M = 1 against n_total")
    for m in range(1, m_max + 1):
        r = majority_vote(pair, m, o.n_total_cap, helstrom_example1(v, m))
        t.add("a", m, r.n_total, r.exact_exponent, r.exponent_lower_bound, chern)
    ns = sorted({int(round(x)) for x in np.logspace(1, math.log10(o.n_total_cap), 13)})
    p1 = helstrom_example1(v, 1)
    for n in ns:
        r = majority_vote(pair, 1, n, p1)
        t.add("b", 1, r.n_total, r.exact_exponent, r.exponent_lower_bound, chern)
    return t


def _fig4(o: FigureOptions) -> Table:
    m_max = o.m_max or 50
    t = Table(["alpha", "M", "one_minus_R"])
    t.comments.append("pure states of example 2 (v = 0), q = 0.5")
    for alpha in (math.pi / 8, math.pi / 4, 3 * math.pi / 8):
        for m in range(1, m_max + 1):
            t.add(alpha, m, diagnostics_pure(alpha, m).one_minus_r)
    return t


def _fig5(o: FigureOptions) -> Table:
    m_max = o.m_max or 10
    alpha = math.pi / 5
    t = Table(["v", "M", "one_minus_R"])
    t.comments.append(f"example 2, alpha = pi/5, q = 0.5, exact Helstrom bound")
    for v in (0.05, 0.25, 0.6):
        pair = build_example2(Example2Params(v, alpha))
        chern = chernoff_numeric(pair)
        for m in range(1, m_max + 1):
            t.add(v, m, diagnostics(pair, m, chernoff=chern).one_minus_r)
    return t


def _fig6(o: FigureOptions) -> Table:
    m_max = o.m_max or 6
    t = Table(["panel", "theta", "M", "value"])
    t.comments.append("example 3 with theta_x = theta_y = theta_z = theta")
    t.comments.append("panel a: |first-order approximation - exact Helstrom|; panel b: 1 - R(M) from the approximation")
    for theta in np.logspace(-4, -1, 13):
        p = Example3Params(theta, theta, theta)
        pair = build_example3(p)
        for m in range(1, m_max + 1):
            t.add("a", float(theta), m, abs(helstrom_metrology_approx(p.a, m) - helstrom_general(pair, m)))
    theta = 0.01
    a = Example3Params(theta, theta, theta).a
    for m in range(1, 21):
        t.add("b", theta, m, diagnostics_metrology(a, m).one_minus_r)
    return t


def _fig7(o: FigureOptions) -> Table:
    pair = build_example2(Example2Params(0.1, math.pi / 4))
    phis = np.linspace(0.0, math.pi, o.phi_points)
    t = Table(["M", "phi", "P_first_local", "P_helstrom_then_local", "P_LOCC", "P_H"])
    t.comments.append("example 2, v = 0.1, alpha = pi/4, q = 0.5")
    t.comments.append("phi: first-copy angle for P_first_local, final-copy angle for P_helstrom_then_local")
    for m in (2, 3, 4):
        p_h = helstrom_general(pair, m)
        p_locc = locc_adaptive(pair, m).error_probability
        first = first_local_errors(pair, m, phis)
        for phi, pf in zip(phis, first):
            ph = helstrom_then_local_at_angle(pair, m, float(phi)).error_probability
            t.add(m, float(phi), float(pf), ph, p_locc, p_h)
    return t


def _fig8(o: FigureOptions) -> Table:
    m_max = o.m_max or 4
    pair = build_example2(Example2Params(0.1, math.pi / 4))
    cfg = OptimizerConfig(hops=o.hops, max_iters_per_hop=o.max_iters_per_hop, seed=o.seed)
    t = Table(["M", "n_first", "n_final", "P_split", "P_H"])
    t.comments.append("example 2, v = 0.1, alpha = pi/4, q = 0.5; circuit on n_first copies, Helstrom on n_final")
    t.comments.append(f"optimizer: hops={cfg.hops} iters={cfg.max_iters_per_hop} seed={cfg.seed} layers={o.layers}")
    for m in range(2, m_max + 1):
        p_h = helstrom_general(pair, m)
        for n_final in range(1, m + 1):
            k = m - n_final
            ansatz = build_brickwork(k, o.layers) if k else None
            _, res, _ = optimize_split_strategy(pair, m, n_final, ansatz, cfg)
            t.add(m, k, n_final, res.error_probability, p_h)
    return t


def _fig9(o: FigureOptions) -> Table:
    m_max = o.m_max or 30
    t = Table(["v", "M", "R_epsilon", "delta_epsilon_M_plus_2"])
    t.comments.append("example 1, q = 0.5; delta_epsilon_M_plus_2 = (eps'_M - eps'_(M+2)) / eps_inf")
    for v in QUBIT_EXAMPLE_V:
        src = lambda m, v=v: diagnostics_example1(v, m)  # noqa: E731
        for m in range(1, m_max + 1):
            t.add(v, m, src(m).r_epsilon, delta_epsilon(src, m, m + 2))
    return t


_BUILDERS = {2: _fig2, 3: _fig3, 4: _fig4, 5: _fig5, 6: _fig6, 7: _fig7, 8: _fig8, 9: _fig9}


def figure_table(n: int, options: FigureOptions = FigureOptions()) -> Table:
    if n not in _BUILDERS:
        raise DomainError(f"figure {n} is not supported; choose one of {SUPPORTED}")
    return _BUILDERS[n](options)
