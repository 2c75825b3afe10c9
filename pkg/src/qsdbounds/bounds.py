"""Helstrom and quantum Chernoff bounds, closed forms and convergence diagnostics.

All logarithms are natural.  Error probabilities that can underflow (large
numbers of copies) are carried as logarithms; ``R(M)`` and the exponents are
formed from ``log P_H(M)`` directly.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, logsumexp, xlogy

from . import matops
from .errors import DomainError, NumericalFailure
from .states import DIM_CAP, StatePair, check_dim

# relative size below which an eigenvalue of Gamma counts as zero (guess "+")
EIG_TIE_TOL = 1e-14
BOUND_SLACK = 1e-12


# --------------------------------------------------------------------------
# Helstrom bound
# --------------------------------------------------------------------------


def split_errors(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Misclassified mass of the Helstrom test for weighted operators ``a``, ``b``.

    ``a`` and ``b`` are (stacks of) PSD matrices, typically ``q rho_+`` and
    ``(1 - q) rho_-`` possibly scaled by branch likelihoods.  The test guesses
    ``+`` on the nonnegative eigenspace of ``a - b``.  Returns
    ``(Tr[a P_-], Tr[b P_+])``; their sum is ``(Tr a + Tr b - ||a - b||) / 2``
    but is computed as a sum of nonnegative diagonal entries so it stays
    accurate when it is much smaller than one.
    """
    a = _real_if_possible(np.asarray(a))
    b = _real_if_possible(np.asarray(b))
    scale = np.trace(a, axis1=-2, axis2=-1).real + np.trace(b, axis1=-2, axis2=-1).real
    if _is_diagonal(a) and _is_diagonal(b):
        da = np.diagonal(a, axis1=-2, axis2=-1).real
        db = np.diagonal(b, axis1=-2, axis2=-1).real
        w = da - db
    else:
        gamma = a - b
        gamma = 0.5 * (gamma + np.conj(np.swapaxes(gamma, -1, -2)))
        w, v = np.linalg.eigh(gamma)
        # <k|a+b|k>, then <k|a|k> and <k|b|k> follow from <k|a-b|k> = w_k
        total = np.sum(np.conj(v) * ((a + b) @ v), axis=-2).real
        da = 0.5 * (total + w)
        db = 0.5 * (total - w)
    guess_minus = w < -EIG_TIE_TOL * np.asarray(scale)[..., None]
    plus_wrong = np.where(guess_minus, np.clip(da, 0, None), 0.0).sum(axis=-1)
    minus_wrong = np.where(guess_minus, 0.0, np.clip(db, 0, None)).sum(axis=-1)
    return plus_wrong, minus_wrong


def _real_if_possible(x: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(x) and not np.any(x.imag):
        return x.real
    return x


def _is_diagonal(x: np.ndarray) -> bool:
    d = x.shape[-1]
    off = x.reshape(*x.shape[:-2], d * d)[..., :-1].reshape(*x.shape[:-2], d - 1, d + 1)[..., 1:]
    return not np.any(off)


def helstrom_projectors(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Projectors (guess +, guess -) onto the sign eigenspaces of ``a - b``.

    The zero eigenspace goes to the "guess +" projector.
    """
    gamma = np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)
    es = matops.hermitian_eig(gamma)
    scale = abs(np.trace(a).real) + abs(np.trace(b).real)
    neg = es.eigenvalues < -EIG_TIE_TOL * scale
    vneg = es.eigenvectors[:, neg]
    vpos = es.eigenvectors[:, ~neg]
    return vpos @ vpos.conj().T, vneg @ vneg.conj().T


def weighted_powers(pair: StatePair, m: int, dim_cap: int = DIM_CAP):
    """``(rho_+^{(x)m}, rho_-^{(x)m})`` as raw arrays."""
    check_dim(pair.rho_plus.n_qubits * m, dim_cap)
    return (
        matops.kron_power(pair.rho_plus.matrix, m),
        matops.kron_power(pair.rho_minus.matrix, m),
    )


def helstrom_general(pair: StatePair, m: int, dim_cap: int = DIM_CAP) -> float:
    """``(1 - ||q rho_+^{(x)m} - (1-q) rho_-^{(x)m}||) / 2`` by direct diagonalisation."""
    if m < 1:
        raise DomainError("m must be >= 1")
    q = pair.prior_q
    plus, minus = weighted_powers(pair, m, dim_cap)
    e1, e2 = split_errors(q * plus, (1 - q) * minus)
    return float(min(max(e1 + e2, 0.0), min(q, 1 - q)))


def helstrom_trace_norm_form(pair: StatePair, m: int, dim_cap: int = DIM_CAP) -> float:
    """Same quantity evaluated literally as ``(1 - trace_norm(Gamma)) / 2``."""
    q = pair.prior_q
    plus, minus = weighted_powers(pair, m, dim_cap)
    return 0.5 * (1.0 - matops.trace_norm(q * plus - (1 - q) * minus))


def _check_v(v: float) -> None:
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"v={v} outside [0, 1]")


def _check_q(q: float) -> None:
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"q={q} outside [0, 1]")


def log_helstrom_example1(v: float, m: int, q: float = 0.5) -> float:
    """``log P_H(m)`` for the commuting pair ``diag(1 - v/2, v/2)`` vs its flip.

    Each binomial class ``i`` (number of ``|1>`` factors) contributes
    ``C(m, i) 2^-m min(q v^i (2-v)^(m-i), (1-q) (2-v)^i v^(m-i))``, the
    misclassified mass of that class; summed with log-sum-exp.
    """
    _check_v(v)
    _check_q(q)
    if m < 1:
        raise DomainError("m must be >= 1")
    i = np.arange(m + 1, dtype=float)
    log_binom = gammaln(m + 1) - gammaln(i + 1) - gammaln(m - i + 1)
    lq = math.log(q) if q > 0 else -math.inf
    lq1 = math.log(1 - q) if q < 1 else -math.inf
    la = lq + xlogy(i, v) + xlogy(m - i, 2 - v)
    lb = lq1 + xlogy(i, 2 - v) + xlogy(m - i, v)
    terms = log_binom - m * math.log(2.0) + np.minimum(la, lb)
    return float(logsumexp(terms))


def helstrom_example1(v: float, m: int, q: float = 0.5) -> float:
    return math.exp(log_helstrom_example1(v, m, q))


def example1_sign_threshold(v: float, m: int, q: float) -> float:
    """Real index below which the class-``i`` term of ``Gamma`` is positive.

    The integer split point is ``floor`` of the returned value.
    """
    if not 0.0 < v < 1.0:
        raise DomainError("threshold diverges at v in {0, 1}")
    if not 0.0 < q < 1.0:
        raise DomainError("threshold diverges at q in {0, 1}")
    lr = math.log((2 - v) / v)
    return (math.log(q / (1 - q)) + m * lr) / (2 * lr)


def log_helstrom_pure(overlap_sq: float, m: int) -> float:
    """``log P_H(m)`` for two pure states with ``|<a|b>|^2 = overlap_sq``, q = 1/2.

    Uses ``1 - sqrt(1 - g) = g / (1 + sqrt(1 - g))`` to avoid cancellation.
    """
    if not 0.0 <= overlap_sq <= 1.0:
        raise DomainError(f"overlap_sq={overlap_sq} outside [0, 1]")
    if m < 1:
        raise DomainError("m must be >= 1")
    if overlap_sq == 0.0:
        return -math.inf
    log_g = m * math.log(overlap_sq)
    one_minus_g = -math.expm1(log_g)
    return math.log(0.5) + log_g - math.log1p(math.sqrt(one_minus_g))


def helstrom_pure(overlap_sq: float, m: int) -> float:
    return math.exp(log_helstrom_pure(overlap_sq, m))


def helstrom_two_copy_example2(v: float, alpha: float) -> float:
    """Closed-form two-copy Helstrom bound for the second family at q = 1/2."""
    _check_v(v)
    inner = 3 - (2 - v) * v + (1 - v) ** 2 * math.cos(2 * alpha)
    return 0.25 * (2 - math.sqrt(2) * (1 - v) * math.sqrt(inner) * math.sin(alpha))


def metrology_coefficient(m: int) -> float:
    """``sum_{i=0}^{floor(m/2)} C(m, i) (m - 2i)``.

    First-order coefficient of ``||rho_2^{(x)m} - rho_1^{(x)m}||`` in units of
    ``a / 2^(m-2)``.  It equals half of ``sum_k C(m, k) |m - 2k|``, the trace
    norm of ``sum_i Z^(i)``; the index starts at ``i = 0`` so that ``m = 1``
    gives the exact single-copy norm ``2a``.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    return float(sum(math.comb(m, i) * (m - 2 * i) for i in range(m // 2 + 1)))


def helstrom_metrology_approx(a: float, m: int) -> float:
    """First-order (in ``a``) Helstrom bound for ``I/2`` vs ``I/2 + theta . sigma``."""
    if a < 0:
        raise DomainError("a must be nonnegative")
    norm = a * metrology_coefficient(m) / 2.0 ** (m - 2)
    return 0.5 * (1.0 - 0.5 * norm)


# --------------------------------------------------------------------------
# Chernoff bound
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ChernoffResult:
    kappa: float
    s_star: float


class _ChernoffFunction:
    """``g(s) = Tr[rho_+^s rho_-^(1-s)]`` as a finite sum of exponentials.

    With spectral decompositions ``rho_+ = sum a_i P_i`` and
    ``rho_- = sum b_j Q_j``, ``g(s) = sum_ij c_ij a_i^s b_j^(1-s)`` where
    ``c_ij = Tr[P_i Q_j]``, restricted to ``a_i, b_j > 0``.  ``g`` is convex
    and its derivative is available in closed form.
    """

    def __init__(self, rho_plus, rho_minus):
        ep = matops.psd_spectrum(rho_plus)
        em = matops.psd_spectrum(rho_minus)
        overlap = np.abs(ep.eigenvectors.conj().T @ em.eigenvectors) ** 2
        keep = (ep.eigenvalues[:, None] > 0) & (em.eigenvalues[None, :] > 0) & (overlap > 0)
        ii, jj = np.nonzero(keep)
        self.c = overlap[ii, jj]
        self.la = np.log(ep.eigenvalues[ii])
        self.lb = np.log(em.eigenvalues[jj])

    def __call__(self, s: float) -> float:
        return float(np.sum(self.c * np.exp(s * self.la + (1 - s) * self.lb)))

    def derivative(self, s: float) -> float:
        e = np.exp(s * self.la + (1 - s) * self.lb)
        return float(np.sum(self.c * (self.la - self.lb) * e))

    def derivative_scale(self) -> float:
        return float(np.sum(self.c * np.abs(self.la - self.lb)))


def chernoff_g(pair: StatePair, s: float) -> float:
    """``Tr[rho_+^s rho_-^(1-s)]`` through explicit matrix powers."""
    value = np.trace(
        matops.frac_power(pair.rho_plus.matrix, s) @ matops.frac_power(pair.rho_minus.matrix, 1 - s)
    )
    return float(value.real)


def chernoff_numeric(pair: StatePair) -> ChernoffResult:
    """Minimise ``Tr[rho_+^s rho_-^(1-s)]`` over ``s`` in ``[0, 1]``.

    Convexity of ``g`` means the minimiser is an endpoint (checked through the
    sign of ``g'`` there) or the unique root of ``g'`` inside, which is
    bracketed by Brent's method to ``1e-14``.  A flat ``g`` (identical states,
    two pure states) returns ``s* = 1/2``.
    """
    g = _ChernoffFunction(pair.rho_plus.matrix, pair.rho_minus.matrix)
    if g.c.size == 0:
        return ChernoffResult(0.0, 0.5)
    d0, d1 = g.derivative(0.0), g.derivative(1.0)
    flat_tol = 1e-13 * max(1.0, g.derivative_scale())
    if abs(d0) <= flat_tol and abs(d1) <= flat_tol:
        s = 0.5
    elif d0 >= 0:
        s = 0.0
    elif d1 <= 0:
        s = 1.0
    else:
        s = brentq(g.derivative, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return ChernoffResult(g(s), float(s))


def chernoff_example1(v: float) -> ChernoffResult:
    _check_v(v)
    return ChernoffResult(math.sqrt(v * (2 - v)), 0.5)


def chernoff_example2(v: float, alpha: float) -> ChernoffResult:
    _check_v(v)
    k = math.sqrt(v * (2 - v))
    return ChernoffResult(k - math.cos(alpha) ** 2 * (k - 1), 0.5)


def chernoff_example3_sstar(a: float) -> float:
    """Stationary exponent on ``I/2`` for ``I/2`` vs a state with eigenvalues ``1/2 +- a``.

    Evaluated with principal complex logarithms; ``log(log(1 - 2a))``
    carries ``+i pi`` which cancels the explicit ``-i pi``.
    """
    if not 0.0 < a < 0.5:
        raise DomainError("a must lie strictly between 0 and 1/2")
    lp, lm = 1 + 2 * a, 1 - 2 * a
    log_lp, log_lm = cmath.log(lp), cmath.log(lm)
    num = -1j * math.pi + log_lm - log_lp + cmath.log(log_lm) - cmath.log(log_lp)
    s = num / (log_lm - log_lp)
    if abs(s.imag) > 1e-12:
        raise NumericalFailure(f"imaginary part {s.imag:.3e} did not cancel")
    return s.real


def chernoff_example3(a: float) -> ChernoffResult:
    s = chernoff_example3_sstar(a)
    kappa = 0.5 * ((1 + 2 * a) ** (1 - s) + (1 - 2 * a) ** (1 - s))
    return ChernoffResult(kappa, s)


# --------------------------------------------------------------------------
# convergence diagnostics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentReport:
    m: int
    helstrom: float
    log_helstrom: float
    epsilon_m: float
    epsilon_prime_m: float
    epsilon_inf: float
    r: float
    one_minus_r: float
    r_epsilon: float
    kappa: float
    s_star: float


def log_prior_factor(q: float, s: float) -> float:
    """``log(q^s (1-q)^(1-s))``."""
    with np.errstate(divide="ignore"):
        return float(xlogy(s, q) + xlogy(1 - s, 1 - q))


def exponent_report(m: int, log_p: float, chernoff: ChernoffResult, q: float) -> ExponentReport:
    """Assemble ``R(M)``, ``eps_M``, ``eps'_M`` from ``log P_H(M)``.

    Raises :class:`NumericalFailure` if the finite-copy upper bound
    ``P_H(M) <= q^s (1-q)^(1-s) kappa^M`` (hence ``P_H(M)^(1/M) <= kappa``)
    is violated beyond round-off.
    """
    kappa, s = chernoff.kappa, chernoff.s_star
    log_kappa = math.log(kappa) if kappa > 0 else -math.inf
    lpf = log_prior_factor(q, s)
    eps_inf = -log_kappa
    eps_m = -log_p / m
    eps_prime = -(log_p - lpf) / m
    if math.isinf(log_kappa) or math.isinf(log_p):
        log_r = math.nan if math.isinf(log_kappa) else -math.inf
    else:
        log_r = (log_p - lpf) / m - log_kappa
    r = math.exp(log_r) if not math.isnan(log_r) else math.nan
    one_minus_r = -math.expm1(log_r) if not math.isnan(log_r) else math.nan
    with np.errstate(divide="ignore", invalid="ignore"):
        r_eps = float(np.divide(eps_prime, eps_inf)) if eps_inf != 0 else math.nan
    if not math.isnan(log_r) and log_r > BOUND_SLACK:
        raise NumericalFailure(f"R({m}) = {r!r} exceeds 1")
    if log_p / m > log_kappa + BOUND_SLACK:
        raise NumericalFailure(f"P_H({m})^(1/{m}) exceeds kappa = {kappa!r}")
    return ExponentReport(
        m=m,
        helstrom=math.exp(log_p),
        log_helstrom=log_p,
        epsilon_m=eps_m,
        epsilon_prime_m=eps_prime,
        epsilon_inf=eps_inf,
        r=r,
        one_minus_r=one_minus_r,
        r_epsilon=r_eps,
        kappa=kappa,
        s_star=s,
    )


def diagnostics(
    pair: StatePair,
    m: int,
    chernoff: ChernoffResult | None = None,
    log_helstrom: float | None = None,
    dim_cap: int = DIM_CAP,
) -> ExponentReport:
    if chernoff is None:
        chernoff = chernoff_numeric(pair)
    if log_helstrom is None:
        p = helstrom_general(pair, m, dim_cap)
        log_helstrom = math.log(p) if p > 0 else -math.inf
    return exponent_report(m, log_helstrom, chernoff, pair.prior_q)


def diagnostics_example1(v: float, m: int, q: float = 0.5) -> ExponentReport:
    return exponent_report(m, log_helstrom_example1(v, m, q), chernoff_example1(v), q)


def diagnostics_pure(alpha: float, m: int) -> ExponentReport:
    """Pure states of the second family (v = 0) at q = 1/2."""
    overlap_sq = math.cos(alpha) ** 2
    return exponent_report(m, log_helstrom_pure(overlap_sq, m), ChernoffResult(overlap_sq, 0.5), 0.5)


def diagnostics_metrology(a: float, m: int) -> ExponentReport:
    """Third family with the first-order Helstrom approximation."""
    p = helstrom_metrology_approx(a, m)
    if p <= 0:
        raise DomainError("first-order approximation is not a probability here")
    return exponent_report(m, math.log(p), chernoff_example3(a), 0.5)


def delta_reports(rm: ExponentReport, rn: ExponentReport) -> float:
    """``R(M) - R(N)``."""
    return rm.r - rn.r


def delta_epsilon_reports(rm: ExponentReport, rn: ExponentReport) -> float:
    """``(eps'_M - eps'_N) / eps_inf``."""
    return (rm.epsilon_prime_m - rn.epsilon_prime_m) / rm.epsilon_inf


def _reports(source, m: int, n: int):
    fn: Callable[[int], ExponentReport]
    if isinstance(source, StatePair):
        chern = chernoff_numeric(source)
        fn = lambda k: diagnostics(source, k, chernoff=chern)  # noqa: E731
    else:
        fn = source
    return fn(m), fn(n)


def delta(source, m: int, n: int) -> float:
    """``R(m) - R(n)`` with ``m >= n >= 1``.

    ``source`` is a :class:`StatePair` (exact path) or any callable mapping a
    copy number to an :class:`ExponentReport`.
    """
    if not m >= n >= 1:
        raise DomainError("delta requires m >= n >= 1")
    return delta_reports(*_reports(source, m, n))


def delta_epsilon(source, m: int, n: int) -> float:
    """``(eps'_m - eps'_n) / eps_inf`` with ``n >= m >= 1``."""
    if not n >= m >= 1:
        raise DomainError("delta_epsilon requires n >= m >= 1")
    return delta_epsilon_reports(*_reports(source, m, n))
