"""Restricted measurement strategies on M copies of a qubit pair.

Two-stage strategies measure a first block of copies, update the prior by
Bayes' rule on the outcome and then apply the Helstrom measurement (at the
posterior) to the remaining block.  Internally every branch carries the
*joint* weights ``(q Pr[D|+], (1-q) Pr[D|-])`` rather than a normalised
posterior, so zero-probability branches need no special casing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.special import gammaln, logsumexp, rel_entr

from . import matops
from .bounds import helstrom_general, helstrom_projectors, split_errors, weighted_powers
from .errors import (
    DepthCapExceeded,
    DomainError,
    InvalidPOVM,
    ZeroProbabilityBranch,
)
from .search import scan_minimize
from .states import DIM_CAP, DiagonalStatePair, Example2Params, StatePair, build_example2

LOCC_DEPTH_CAP = 10
FIRST_LOCAL_SCAN = 721
LOCC_SCAN = 91
ANGLE_XTOL = 1e-9


@dataclass(frozen=True)
class ProjectiveQubitMeasurement:
    """Projectors onto ``cos(phi)|0> + sin(phi)|1>`` and its orthogonal complement."""

    phi: float

    @property
    def ket(self) -> np.ndarray:
        return np.array([math.cos(self.phi), math.sin(self.phi)], dtype=complex)

    @property
    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        k = self.ket
        p0 = np.outer(k, k.conj())
        return p0, np.eye(2) - p0


@dataclass(frozen=True)
class Branch:
    label: str
    probability: float
    posterior: float  # nan for a zero-probability branch
    error: float  # conditional error given this branch


@dataclass(frozen=True)
class StrategyResult:
    error_probability: float
    branches: tuple[Branch, ...]
    p_minus_given_plus: float
    p_plus_given_minus: float
    name: str = ""
    angles: dict = field(default_factory=dict, compare=False)

    @property
    def total_probability(self) -> float:
        return math.fsum(b.probability for b in self.branches)


def _require_qubit(pair: StatePair) -> None:
    if pair.rho_plus.dim != 2:
        raise DomainError("single-copy measurements here act on qubit pairs only")


def _conditionals(q: float, plus_wrong: float, minus_wrong: float) -> tuple[float, float]:
    pm = plus_wrong / q if q > 0 else 0.0
    mp = minus_wrong / (1 - q) if q < 1 else 0.0
    return pm, mp


def _assemble(name, labels, a, b, plus_wrong, minus_wrong, q, angles=None) -> StrategyResult:
    branches = []
    for lab, ai, bi, pw, mw in zip(labels, a, b, plus_wrong, minus_wrong):
        prob = float(ai + bi)
        if prob > 0:
            branches.append(Branch(lab, prob, float(ai / prob), float((pw + mw) / prob)))
        else:
            branches.append(Branch(lab, 0.0, math.nan, 0.0))
    pw_total = math.fsum(map(float, plus_wrong))
    mw_total = math.fsum(map(float, minus_wrong))
    pm, mp = _conditionals(q, pw_total, mw_total)
    # every final guess is Bayes-optimal, so min(q, 1-q) bounds the error; the clip removes round-off
    error = min(pw_total + mw_total, min(q, 1 - q))
    return StrategyResult(error, tuple(branches), pm, mp, name, dict(angles or {}))


def two_stage(
    pair: StatePair,
    lik_plus: np.ndarray,
    lik_minus: np.ndarray,
    n_final: int,
    labels=None,
    name: str = "",
    dim_cap: int = DIM_CAP,
    angles=None,
) -> StrategyResult:
    """Outcome likelihoods of a first stage followed by ``n_final``-copy Helstrom.

    ``lik_plus[i] = Tr[rho_+^{(x)k} Pi_i]`` and likewise for ``lik_minus``.
    With ``n_final = 0`` the guess is made from the posterior alone.
    """
    q = pair.prior_q
    lik_plus = np.asarray(lik_plus, dtype=float)
    lik_minus = np.asarray(lik_minus, dtype=float)
    a = q * lik_plus
    b = (1 - q) * lik_minus
    if n_final == 0:
        plus_wrong = np.where(a < b, a, 0.0)
        minus_wrong = np.where(a < b, 0.0, b)
    else:
        xp, xm = weighted_powers(pair, n_final, dim_cap)
        plus_wrong, minus_wrong = split_errors(a[:, None, None] * xp, b[:, None, None] * xm)
    if labels is None:
        labels = [str(i) for i in range(len(a))]
    return _assemble(name, labels, a, b, plus_wrong, minus_wrong, q, angles)


def posterior_update(pair: StatePair, meas: ProjectiveQubitMeasurement, outcome: int) -> float:
    """Posterior probability of ``rho_+`` after observing ``outcome`` of ``meas``."""
    _require_qubit(pair)
    proj = meas.projectors[outcome]
    q = pair.prior_q
    lp = np.trace(pair.rho_plus.matrix @ proj).real
    lm = np.trace(pair.rho_minus.matrix @ proj).real
    den = q * lp + (1 - q) * lm
    if den < 1e-15:
        raise ZeroProbabilityBranch(f"outcome {outcome} has probability {den:.3e}")
    return float(q * lp / den)


def _qubit_likelihoods(pair: StatePair, phis: np.ndarray):
    """``Pr[D_0 | +]`` and ``Pr[D_0 | -]`` for the real-plane measurement at ``phis``."""
    rp = matops.bloch_vector(pair.rho_plus.matrix)
    rm = matops.bloch_vector(pair.rho_minus.matrix)
    s2, c2 = np.sin(2 * phis), np.cos(2 * phis)
    return 0.5 * (1 + rp[0] * s2 + rp[2] * c2), 0.5 * (1 + rm[0] * s2 + rm[2] * c2)


def strategy_first_local(pair: StatePair, m: int, meas: ProjectiveQubitMeasurement, dim_cap: int = DIM_CAP) -> StrategyResult:
    """Single-copy projective measurement, then ``(m-1)``-copy Helstrom at the posterior."""
    _require_qubit(pair)
    if m < 2:
        raise DomainError("m must be >= 2")
    p0, p1 = meas.projectors
    lp = [np.trace(pair.rho_plus.matrix @ p).real for p in (p0, p1)]
    lm = [np.trace(pair.rho_minus.matrix @ p).real for p in (p0, p1)]
    return two_stage(
        pair, lp, lm, m - 1, labels=["D0", "D1"], name=f"P^{m}_1,{m - 1}",
        dim_cap=dim_cap, angles={"": meas.phi},
    )


def first_local_errors(pair: StatePair, m: int, phis, dim_cap: int = DIM_CAP) -> np.ndarray:
    """Vectorised error of :func:`strategy_first_local` over an array of angles."""
    _require_qubit(pair)
    phis = np.asarray(phis, dtype=float)
    flat = phis.ravel()
    q = pair.prior_q
    xp, xm = weighted_powers(pair, m - 1, dim_cap)
    d = xp.shape[0]
    per_chunk = max(1, 2_000_000 // (2 * d * d))
    out = np.empty(flat.size)
    for start in range(0, flat.size, per_chunk):
        ph = flat[start:start + per_chunk]
        lp0, lm0 = _qubit_likelihoods(pair, ph)
        a = q * np.stack([lp0, 1 - lp0], axis=1)
        b = (1 - q) * np.stack([lm0, 1 - lm0], axis=1)
        pw, mw = split_errors(a[..., None, None] * xp, b[..., None, None] * xm)
        out[start:start + per_chunk] = (pw + mw).sum(axis=1)
    return out.reshape(phis.shape)


def optimize_first_local(pair: StatePair, m: int, n_scan: int = FIRST_LOCAL_SCAN, dim_cap: int = DIM_CAP):
    """Best single-copy first-stage angle in ``[0, pi)``: ``(phi*, StrategyResult)``."""
    f = lambda ph: first_local_errors(pair, m, ph, dim_cap)  # noqa: E731
    phi, _ = scan_minimize(f, 1, 0.0, math.pi, n_scan, ANGLE_XTOL)
    phi_star = float(phi[0]) % math.pi
    return phi_star, strategy_first_local(pair, m, ProjectiveQubitMeasurement(phi_star), dim_cap)


def _helstrom_first_stage(pair: StatePair, k: int, dim_cap: int):
    q = pair.prior_q
    xp, xm = weighted_powers(pair, k, dim_cap)
    p_plus, p_minus = helstrom_projectors(q * xp, (1 - q) * xm)
    lp = [np.trace(xp @ p).real for p in (p_plus, p_minus)]
    lm = [np.trace(xm @ p).real for p in (p_plus, p_minus)]
    return lp, lm


def strategy_helstrom_then_local(pair: StatePair, m: int, dim_cap: int = DIM_CAP) -> StrategyResult:
    """``(m-1)``-copy Helstrom measurement, then single-copy Helstrom at the posterior."""
    if m < 2:
        raise DomainError("m must be >= 2")
    lp, lm = _helstrom_first_stage(pair, m - 1, dim_cap)
    return two_stage(pair, lp, lm, 1, labels=["H+", "H-"], name=f"P^{m}_H({m - 1}),1", dim_cap=dim_cap)


def helstrom_then_local_at_angle(pair: StatePair, m: int, phi: float, dim_cap: int = DIM_CAP) -> StrategyResult:
    """As :func:`strategy_helstrom_then_local` but the last copy is measured at a fixed angle.

    The final guess follows the larger joint weight of each (first, second)
    outcome pair, ties to ``+``.
    """
    _require_qubit(pair)
    if m < 2:
        raise DomainError("m must be >= 2")
    q = pair.prior_q
    lp, lm = _helstrom_first_stage(pair, m - 1, dim_cap)
    sp0, sm0 = _qubit_likelihoods(pair, np.array(phi))
    a = q * np.asarray(lp)
    b = (1 - q) * np.asarray(lm)
    plus_wrong, minus_wrong = [], []
    for ai, bi in zip(a, b):
        pw = mw = 0.0
        for lpp, lmm in ((sp0, sm0), (1 - sp0, 1 - sm0)):
            wa, wb = ai * lpp, bi * lmm
            if wa < wb:
                pw += wa
            else:
                mw += wb
        plus_wrong.append(pw)
        minus_wrong.append(mw)
    return _assemble(f"P^{m}_H({m - 1}),1@phi", ["H+", "H-"], a, b, plus_wrong, minus_wrong, q, {"final": phi})


def helstrom_angle(pair: StatePair) -> float:
    """Angle in ``[0, pi)`` whose first projector is the single-copy "guess +" projector.

    Defined only when that projector is rank one with a real eigenvector.
    """
    _require_qubit(pair)
    q = pair.prior_q
    p_plus, _ = helstrom_projectors(q * pair.rho_plus.matrix, (1 - q) * pair.rho_minus.matrix)
    w, v = np.linalg.eigh(p_plus)
    if not np.isclose(w[-1], 1.0) or not np.isclose(w[0], 0.0):
        raise DomainError("Helstrom projector is not rank one")
    ket = v[:, -1]
    ket = ket * np.exp(-1j * np.angle(ket[np.argmax(np.abs(ket))]))
    if np.max(np.abs(ket.imag)) > 1e-12:
        raise DomainError("Helstrom eigenvector is not real")
    return math.atan2(ket[1].real, ket[0].real) % math.pi


# --------------------------------------------------------------------------
# adaptive LOCC
# --------------------------------------------------------------------------


class _LoccTree:
    """Node-wise optimised adaptive single-copy measurements.

    ``value(k, a, b)`` is the least error reachable on ``k`` remaining
    copies from joint weights ``(a, b)``; it is homogeneous of degree one,
    and evaluated on whole arrays of nodes at once.
    """

    def __init__(self, pair: StatePair, n_scan: int, xtol: float):
        self.rp = matops.bloch_vector(pair.rho_plus.matrix)
        self.rm = matops.bloch_vector(pair.rho_minus.matrix)
        self.n_scan = n_scan
        self.xtol = xtol

    def single(self, a, b):
        w = a[..., None] * self.rp - b[..., None] * self.rm
        norm = np.maximum(np.abs(a - b), np.linalg.norm(w, axis=-1))
        return np.clip(0.5 * (a + b - norm), 0.0, None)

    def likelihoods(self, phis):
        s2, c2 = np.sin(2 * phis), np.cos(2 * phis)
        return (0.5 * (1 + self.rp[0] * s2 + self.rp[2] * c2),
                0.5 * (1 + self.rm[0] * s2 + self.rm[2] * c2))

    def _objective(self, k, a, b):
        def f(phis):
            lp, lm = self.likelihoods(phis)
            aa, bb = a[:, None], b[:, None]
            v0 = self.value(k - 1, (aa * lp).ravel(), (bb * lm).ravel())
            v1 = self.value(k - 1, (aa * (1 - lp)).ravel(), (bb * (1 - lm)).ravel())
            return (v0 + v1).reshape(phis.shape)
        return f

    def best(self, k, a, b):
        return scan_minimize(self._objective(k, a, b), a.size, 0.0, math.pi, self.n_scan, self.xtol)

    def value(self, k, a, b):
        if k == 1:
            return self.single(a, b)
        return self.best(k, a, b)[1]


def locc_adaptive(
    pair: StatePair,
    m: int,
    depth_cap: int = LOCC_DEPTH_CAP,
    n_scan: int = LOCC_SCAN,
    xtol: float = ANGLE_XTOL,
) -> StrategyResult:
    """Adaptive single-copy measurements with the angle optimised at every node.

    Copies are measured one at a time in the real-plane family; each angle
    depends on all earlier outcomes.  The last copy gets the Helstrom
    measurement at its posterior.  Cost grows like
    ``(2 n_scan)^(m-1)``, hence the depth cap.
    """
    _require_qubit(pair)
    if m < 1:
        raise DomainError("m must be >= 1")
    if m > depth_cap:
        raise DepthCapExceeded(f"m={m} exceeds the LOCC depth cap {depth_cap}")
    tree = _LoccTree(pair, n_scan, xtol)
    q = pair.prior_q
    leaves = []  # (label, a, b)
    angles = {}

    def walk(label, k, a, b):
        if k == 1:
            leaves.append((label, a, b))
            return
        phi, _ = tree.best(k, np.array([a]), np.array([b]))
        phi = float(phi[0]) % math.pi
        angles[label] = phi
        lp, lm = tree.likelihoods(np.array(phi))
        walk(label + "0", k - 1, a * float(lp), b * float(lm))
        walk(label + "1", k - 1, a * float(1 - lp), b * float(1 - lm))

    walk("", m, q, 1 - q)
    labels = [lab or "root" for lab, _, _ in leaves]
    a = np.array([x[1] for x in leaves])
    b = np.array([x[2] for x in leaves])
    pw, mw = split_errors(a[:, None, None] * pair.rho_plus.matrix, b[:, None, None] * pair.rho_minus.matrix)
    return _assemble(f"LOCC({m})", labels, a, b, pw, mw, q, angles)


def locc_appendixF(v: float, alpha: float) -> StrategyResult:
    """Two copies, q = 1/2: diagonal-basis (``phi = pi/4``) first, then Helstrom."""
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"v={v} outside [0, 1]")
    pair = build_example2(Example2Params(v, alpha), 0.5)
    q_0 = 0.5 * (1 + (1 - v) * math.sin(alpha))
    q_1 = 0.5 * (1 - (1 - v) * math.sin(alpha))
    meas = ProjectiveQubitMeasurement(math.pi / 4)
    branches, pw_total, mw_total = [], 0.0, 0.0
    for label, post in (("D0", q_0), ("D1", q_1)):
        sub = pair.with_prior(post)
        pw, mw = split_errors(post * sub.rho_plus.matrix, (1 - post) * sub.rho_minus.matrix)
        branches.append(Branch(label, 0.5, post, float(pw + mw)))
        pw_total += 0.5 * float(pw)
        mw_total += 0.5 * float(mw)
    pm, mp = _conditionals(0.5, pw_total, mw_total)
    return StrategyResult(pw_total + mw_total, tuple(branches), pm, mp, "LOCC(2) closed form", {"": meas.phi})


# --------------------------------------------------------------------------
# commuting states, optimality conditions, repeated measurement
# --------------------------------------------------------------------------


def max_likelihood_diagonal(pair: DiagonalStatePair, m: int):
    """Maximum-likelihood test on ``m`` copies of two commuting states.

    Returns ``(error, assignment)``; ``assignment[i]`` is 1 or 2, the state
    guessed for product-basis outcome ``i`` (ties go to state 1).
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    l1, l2 = pair.lambdas_1, pair.lambdas_2
    p1, p2 = l1, l2
    for _ in range(m - 1):
        p1 = np.kron(p1, l1)
        p2 = np.kron(p2, l2)
    w1 = pair.prior_q * p1
    w2 = (1 - pair.prior_q) * p2
    choose_1 = w1 >= w2
    error = math.fsum(np.where(choose_1, w2, w1))
    return error, np.where(choose_1, 1, 2)


@dataclass(frozen=True)
class OptimalityCheck:
    optimal: bool
    commutation_residual: float
    positivity_residual: float

    def __bool__(self) -> bool:
        return self.optimal


def check_optimality(povm, pair: StatePair, m: int, tol: float = 1e-9, dim_cap: int = DIM_CAP) -> OptimalityCheck:
    """Test a two-outcome POVM ``(Pi_1, Pi_2)`` against the Helstrom optimality conditions.

    ``Pi_1`` guesses ``rho_+``.  The residuals are ``max|Pi_1 Gamma Pi_2|``
    and ``-min_j lambda_min(q rho_+ Pi_1 + (1-q) rho_- Pi_2 - p_j rho_j)``;
    both must be at most ``tol``.
    """
    pi1, pi2 = (matops.as_matrix(p) for p in povm)
    d = pi1.shape[0]
    if pi2.shape != pi1.shape:
        raise InvalidPOVM("POVM elements differ in shape")
    if np.max(np.abs(pi1 + pi2 - np.eye(d))) > 1e-10:
        raise InvalidPOVM("POVM elements do not sum to the identity")
    for p in (pi1, pi2):
        if not matops.is_hermitian(p, 1e-10) or np.linalg.eigvalsh(0.5 * (p + p.conj().T))[0] < -1e-10:
            raise InvalidPOVM("POVM element is not positive semidefinite")
    q = pair.prior_q
    xp, xm = weighted_powers(pair, m, dim_cap)
    if xp.shape[0] != d:
        raise InvalidPOVM(f"POVM dimension {d} does not match {xp.shape[0]}")
    gamma = q * xp - (1 - q) * xm
    r1 = float(np.max(np.abs(pi1 @ gamma @ pi2)))
    x = q * xp @ pi1 + (1 - q) * xm @ pi2
    xh = 0.5 * (x + x.conj().T)
    r2 = -min(
        np.linalg.eigvalsh(xh - q * xp)[0],
        np.linalg.eigvalsh(xh - (1 - q) * xm)[0],
    )
    r2 = float(max(r2, 0.0))
    return OptimalityCheck(r1 <= tol and r2 <= tol, r1, r2)


def relative_entropy_bernoulli(a: float, p: float) -> float:
    """``D(a || p)`` between Bernoulli distributions, natural log."""
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"a={a} outside [0, 1]")
    if not 0.0 < p < 1.0:
        raise DomainError(f"p={p} must lie strictly inside (0, 1)")
    return float(rel_entr(a, p) + rel_entr(1 - a, 1 - p))


def majority_vote_exponent_bound(p_helstrom: float, m: int) -> float:
    """Chernoff lower bound on the per-copy exponent of repeated ``m``-copy Helstrom tests."""
    if not 0.0 < p_helstrom < 1.0:
        raise DomainError("block error must lie in (0, 1)")
    return (math.log(1 / (2 * p_helstrom)) + math.log(1 / (2 * (1 - p_helstrom)))) / (2 * m)


@dataclass(frozen=True)
class MajorityVoteReport:
    m: int
    n_total: int  # copies actually used, a multiple of m
    n_requested: int
    p_block: float
    exact_error: float
    exponent_lower_bound: float
    exact_exponent: float
    tie_rule: str = "fair coin"


def log_majority_error(n: int, p: float) -> float:
    """``log(Pr[X < n/2] + Pr[X = n/2] / 2)`` for ``X ~ Binomial(n, p)``."""
    k = np.arange(0, (n - 1) // 2 + 1, dtype=float)
    log_terms = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1) + k * math.log(p) + (n - k) * math.log1p(-p)
    terms = list(log_terms)
    if n % 2 == 0:
        h = n // 2
        terms.append(math.log(0.5) + gammaln(n + 1) - 2 * gammaln(h + 1) + h * (math.log(p) + math.log1p(-p)))
    return float(logsumexp(terms))


def majority_vote(pair: StatePair, m: int, n_total: int, p_helstrom: float | None = None, dim_cap: int = DIM_CAP) -> MajorityVoteReport:
    """Repeat the ``m``-copy Helstrom test ``n_total // m`` times and take a majority vote.

    The block error defaults to :func:`helstrom_general`; pass
    ``p_helstrom`` to use an analytic value instead.
    """
    if m < 1 or n_total < m:
        raise DomainError("need 1 <= m <= n_total")
    p_h = helstrom_general(pair, m, dim_cap) if p_helstrom is None else p_helstrom
    if not 0.0 < p_h < 0.5:
        raise DomainError(f"block error {p_h} must lie in (0, 1/2)")
    n = n_total // m
    used = n * m
    log_err = log_majority_error(n, 1.0 - p_h)
    return MajorityVoteReport(
        m=m,
        n_total=used,
        n_requested=n_total,
        p_block=1.0 - p_h,
        exact_error=math.exp(log_err),
        exponent_lower_bound=majority_vote_exponent_bound(p_h, m),
        exact_exponent=-log_err / used,
    )


def outcome_strings(k: int) -> list[str]:
    return ["".join(bits) for bits in product("01", repeat=k)]
