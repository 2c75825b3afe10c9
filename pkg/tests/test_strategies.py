import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsdbounds.bounds import helstrom_example1, helstrom_general, helstrom_projectors, helstrom_two_copy_example2, weighted_powers
from qsdbounds.errors import DepthCapExceeded, DomainError, InvalidPOVM, ZeroProbabilityBranch
from qsdbounds.states import (
    DensityMatrix,
    DiagonalStatePair,
    Example1Params,
    Example2Params,
    StatePair,
    build_example1,
    build_example2,
)
from qsdbounds.strategies import (
    ProjectiveQubitMeasurement,
    check_optimality,
    first_local_errors,
    helstrom_angle,
    helstrom_then_local_at_angle,
    locc_adaptive,
    locc_appendixF,
    log_majority_error,
    majority_vote,
    majority_vote_exponent_bound,
    max_likelihood_diagonal,
    optimize_first_local,
    posterior_update,
    relative_entropy_bernoulli,
    strategy_first_local,
    strategy_helstrom_then_local,
    two_stage,
)

from conftest import qubit_pairs

# regression constants at v = 0.1, alpha = pi/4, q = 1/2
FIRST_LOCAL_GAP = {3: 3.741284068590575e-03, 4: 2.1810507737648616e-03}
HELSTROM_THEN_LOCAL = {3: 0.10121187302524207, 4: 0.07119398900545158}
LOCC_3 = 0.08713802813470461

angle = st.floats(0, math.pi)


def assert_valid(res, tol=1e-12):
    assert res.total_probability == pytest.approx(1.0, abs=tol)
    for b in res.branches:
        assert b.probability >= 0
        if b.probability > 0:
            assert -tol <= b.posterior <= 1 + tol


def test_measurement_projectors():
    m = ProjectiveQubitMeasurement(0.3)
    p0, p1 = m.projectors
    np.testing.assert_allclose(p0 + p1, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(p0 @ p0, p0, atol=1e-15)
    np.testing.assert_allclose(m.ket, [math.cos(0.3), math.sin(0.3)])


def test_posterior_examples():
    pair = build_example1(Example1Params(1.0), 0.3)
    assert posterior_update(pair, ProjectiveQubitMeasurement(0.4), 0) == pytest.approx(0.3)
    v, alpha = 0.1, 0.9
    pair = build_example2(Example2Params(v, alpha))
    meas = ProjectiveQubitMeasurement(math.pi / 4)
    assert posterior_update(pair, meas, 0) == pytest.approx(0.5 * (1 + (1 - v) * math.sin(alpha)))
    assert posterior_update(pair, meas, 1) == pytest.approx(0.5 * (1 - (1 - v) * math.sin(alpha)))
    # both hypotheses are |0><0|, so the |1> outcome never occurs
    same_pure = build_example2(Example2Params(0.0, 0.0))
    with pytest.raises(ZeroProbabilityBranch):
        posterior_update(same_pure, ProjectiveQubitMeasurement(math.pi / 2), 0)


@given(st.floats(0, 1), st.floats(0, math.pi / 2), angle)
def test_outcome_probabilities(v, alpha, phi):
    # mixture outcome probability and the rho_+ likelihood, with the corrected angle argument
    pair = build_example2(Example2Params(v, alpha))
    p0, _ = ProjectiveQubitMeasurement(phi).projectors
    mix = 0.5 * (pair.rho_plus.matrix + pair.rho_minus.matrix)
    assert np.trace(mix @ p0).real == pytest.approx(0.5 * (1 + (1 - v) * math.cos(alpha) * math.cos(2 * phi)), abs=1e-14)
    assert np.trace(pair.rho_plus.matrix @ p0).real == pytest.approx(0.5 * (1 + (1 - v) * math.cos(alpha - 2 * phi)), abs=1e-14)


def test_printed_likelihood_form_is_not_normalised():
    # 1/4 (2 + (1-v) cos(alpha - 2 phi)) disagrees with the direct trace away from the nodes
    v, alpha, phi = 0.1, math.pi / 4, 0.0
    pair = build_example2(Example2Params(v, alpha))
    direct = np.trace(pair.rho_plus.matrix @ ProjectiveQubitMeasurement(phi).projectors[0]).real
    printed = 0.25 * (2 + (1 - v) * math.cos(alpha - 2 * phi))
    assert abs(direct - printed) > 0.1


def test_first_local_examples(fig7_pair):
    res = strategy_first_local(fig7_pair, 2, ProjectiveQubitMeasurement(math.pi / 4))
    assert res.error_probability == pytest.approx(helstrom_general(fig7_pair, 2), abs=1e-12)
    assert_valid(res)
    same = build_example2(Example2Params(0.4, 0.0))
    for phi in (0.0, 0.7, 2.0):
        assert strategy_first_local(same, 3, ProjectiveQubitMeasurement(phi)).error_probability == pytest.approx(0.5)
    with pytest.raises(DomainError):
        strategy_first_local(fig7_pair, 1, ProjectiveQubitMeasurement(0.0))


def test_first_local_vectorised_matches_scalar(fig7_pair):
    phis = np.linspace(0, math.pi, 9)
    vec = first_local_errors(fig7_pair, 3, phis)
    ref = [strategy_first_local(fig7_pair, 3, ProjectiveQubitMeasurement(p)).error_probability for p in phis]
    np.testing.assert_allclose(vec, ref, atol=1e-15)


@pytest.mark.parametrize("m", [3, 4])
def test_first_local_gap_regression(fig7_pair, m):
    phi, res = optimize_first_local(fig7_pair, m)
    gap = res.error_probability - helstrom_general(fig7_pair, m)
    assert gap >= 1e-5
    assert gap == pytest.approx(FIRST_LOCAL_GAP[m], abs=1e-10)
    # a dense scan does not find anything lower
    scan = first_local_errors(fig7_pair, m, np.linspace(0, math.pi, 2001))
    assert res.error_probability <= scan.min() + 1e-12


def test_first_local_m2_attains_helstrom(fig7_pair):
    _, res = optimize_first_local(fig7_pair, 2)
    assert res.error_probability == pytest.approx(helstrom_general(fig7_pair, 2), abs=1e-10)


@pytest.mark.parametrize("m", [2, 3, 5])
def test_first_local_commuting_is_optimal(m):
    pair = build_example1(Example1Params(0.3))
    _, res = optimize_first_local(pair, m)
    assert res.error_probability == pytest.approx(helstrom_example1(0.3, m), abs=1e-10)


def test_first_local_identical_states_flat():
    pair = build_example2(Example2Params(0.2, 0.0))
    _, res = optimize_first_local(pair, 3)
    assert res.error_probability == pytest.approx(0.5)


@settings(max_examples=25)
@given(qubit_pairs(), st.integers(2, 4), angle)
def test_dominance_chain(pair, m, phi):
    p_h = helstrom_general(pair, m)
    _, best = optimize_first_local(pair, m)
    any_phi = strategy_first_local(pair, m, ProjectiveQubitMeasurement(phi)).error_probability
    assert p_h <= best.error_probability + 1e-12
    # scan plus golden refinement is global up to the search tolerance
    assert best.error_probability <= any_phi + 1e-9
    assert_valid(best)


def test_helstrom_then_local(fig7_pair):
    for m, val in HELSTROM_THEN_LOCAL.items():
        res = strategy_helstrom_then_local(fig7_pair, m)
        assert res.error_probability == pytest.approx(val, abs=1e-12)
        assert_valid(res)
    # m = 2: a first-local strategy at the one-copy Helstrom angle
    phi = helstrom_angle(fig7_pair)
    a = strategy_helstrom_then_local(fig7_pair, 2).error_probability
    b = strategy_first_local(fig7_pair, 2, ProjectiveQubitMeasurement(phi)).error_probability
    assert a == pytest.approx(b, abs=1e-12)
    assert strategy_helstrom_then_local(build_example2(Example2Params(0.5, 0.0)), 3).error_probability == pytest.approx(0.5)


def test_helstrom_then_local_m4_ignores_last_copy(fig7_pair):
    vals = [helstrom_then_local_at_angle(fig7_pair, 4, p).error_probability for p in np.linspace(0, math.pi, 61)]
    assert max(vals) - min(vals) <= 1e-12
    assert vals[0] == pytest.approx(helstrom_general(fig7_pair, 3), abs=1e-12)
    # at m = 3 the final angle does matter
    vals3 = [helstrom_then_local_at_angle(fig7_pair, 3, p).error_probability for p in np.linspace(0, math.pi, 61)]
    assert max(vals3) - min(vals3) > 1e-3
    assert min(vals3) >= strategy_helstrom_then_local(fig7_pair, 3).error_probability - 1e-12


def test_locc_examples(fig7_pair):
    res = locc_adaptive(fig7_pair, 2)
    assert res.error_probability == pytest.approx(helstrom_general(fig7_pair, 2), abs=1e-10)
    r3 = locc_adaptive(fig7_pair, 3)
    assert r3.error_probability > helstrom_general(fig7_pair, 3) + 1e-3
    assert r3.error_probability == pytest.approx(LOCC_3, abs=1e-9)
    assert len(r3.branches) == 4
    assert_valid(r3)
    with pytest.raises(DepthCapExceeded):
        locc_adaptive(fig7_pair, 11)


@given(qubit_pairs())
@settings(max_examples=20)
def test_locc_one_copy_is_helstrom(pair):
    assert locc_adaptive(pair, 1).error_probability == helstrom_general(pair, 1)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_locc_commuting_equals_max_likelihood(m):
    pair = build_example1(Example1Params(0.35), 0.4)
    ml, _ = max_likelihood_diagonal(DiagonalStatePair.from_pair(pair), m)
    assert locc_adaptive(pair, m).error_probability == pytest.approx(ml, abs=1e-10)
    assert ml == pytest.approx(helstrom_example1(0.35, m, 0.4), abs=1e-10)


@pytest.mark.slow
def test_locc_pure_four_copies():
    pair = build_example2(Example2Params(0.0, math.pi / 4))
    assert locc_adaptive(pair, 4).error_probability == pytest.approx(helstrom_general(pair, 4), abs=1e-5)


def test_two_copy_locc_closed_form():
    res = locc_appendixF(0.1, math.pi / 4)
    assert res.error_probability == pytest.approx(helstrom_two_copy_example2(0.1, math.pi / 4), abs=1e-12)
    assert locc_appendixF(0.3, 0.0).error_probability == pytest.approx(0.5)
    with pytest.raises(DomainError):
        locc_appendixF(1.5, 0.2)


@given(st.floats(0, 1), st.floats(0, math.pi / 2))
def test_two_copy_locc_closed_form_property(v, alpha):
    pair = build_example2(Example2Params(v, alpha))
    assert locc_appendixF(v, alpha).error_probability == pytest.approx(helstrom_general(pair, 2), abs=1e-12)


def test_max_likelihood_examples():
    v = 0.3
    d = DiagonalStatePair.from_pair(build_example1(Example1Params(v)))
    err, assign = max_likelihood_diagonal(d, 1)
    assert err == pytest.approx(v / 2)
    assert list(assign) == [1, 2]
    assert max_likelihood_diagonal(d, 3)[0] == pytest.approx(helstrom_example1(v, 3))
    same = DiagonalStatePair([0.6, 0.4], [0.6, 0.4], 0.3)
    err, assign = max_likelihood_diagonal(same, 2)
    assert err == pytest.approx(0.3)
    tie = DiagonalStatePair([0.5, 0.5], [0.5, 0.5], 0.5)
    assert set(max_likelihood_diagonal(tie, 1)[1]) == {1}


@given(st.lists(st.floats(0.01, 1), min_size=2, max_size=4), st.integers(1, 3), st.floats(0.05, 0.95))
def test_max_likelihood_matches_helstrom(weights, m, q):
    lam1 = np.array(weights) / sum(weights)
    lam2 = lam1[::-1].copy()
    n = len(lam1)
    if n & (n - 1):
        return
    pair = StatePair(DensityMatrix(np.diag(lam1)), DensityMatrix(np.diag(lam2)), q)
    err, _ = max_likelihood_diagonal(DiagonalStatePair(lam1, lam2, q), m)
    assert err == pytest.approx(helstrom_general(pair, m), abs=1e-12)


def _helstrom_povm(pair, m):
    xp, xm = weighted_powers(pair, m)
    return helstrom_projectors(pair.prior_q * xp, (1 - pair.prior_q) * xm)


@settings(max_examples=30)
@given(qubit_pairs(), st.integers(1, 3))
def test_optimality_conditions(pair, m):
    p1, p2 = _helstrom_povm(pair, m)
    assert check_optimality((p1, p2), pair, m)
    assert not check_optimality((p2, p1), pair, m)


def test_optimality_trivial_povm_on_orthogonal_states():
    pair = build_example2(Example2Params(0.0, math.pi / 2))
    chk = check_optimality((np.eye(2), np.zeros((2, 2))), pair, 1)
    assert not chk.optimal and chk.positivity_residual > 0.1


def test_optimality_rejects_suboptimal_povm(fig7_pair):
    # rotating the Helstrom projector raises the error by far more than 1e-6
    p1, _ = _helstrom_povm(fig7_pair, 1)
    for eps in (1e-2, 1e-1):
        c, s = math.cos(eps), math.sin(eps)
        r = np.array([[c, -s], [s, c]])
        q1 = r @ p1 @ r.T
        assert not check_optimality((q1, np.eye(2) - q1), fig7_pair, 1)


def test_invalid_povm():
    pair = build_example1(Example1Params(0.5))
    with pytest.raises(InvalidPOVM):
        check_optimality((np.eye(2), np.eye(2)), pair, 1)
    with pytest.raises(InvalidPOVM):
        check_optimality((np.eye(4), np.zeros((4, 4))), pair, 1)
    with pytest.raises(InvalidPOVM):
        check_optimality((np.diag([2.0, 1.0]), np.diag([-1.0, 0.0])), pair, 1)


def test_two_stage_without_final_stage():
    pair = build_example1(Example1Params(0.4))
    res = two_stage(pair, [0.8, 0.2], [0.2, 0.8], 0)
    assert res.error_probability == pytest.approx(0.2)


def test_relative_entropy():
    assert relative_entropy_bernoulli(0.5, 0.5) == 0.0
    assert relative_entropy_bernoulli(0.0, 0.5) == pytest.approx(math.log(2))
    with pytest.raises(DomainError):
        relative_entropy_bernoulli(0.3, 1.0)
    assert majority_vote_exponent_bound(0.5, 3) == pytest.approx(0.0, abs=1e-15)


@given(st.floats(0.01, 0.49), st.integers(1, 5))
def test_exponent_bound_is_relative_entropy(p, m):
    assert majority_vote_exponent_bound(p, m) == pytest.approx(relative_entropy_bernoulli(0.5, p) / m, rel=1e-10)


def test_majority_vote_example():
    v = 0.8
    pair = build_example1(Example1Params(v))
    r = majority_vote(pair, 1, 10_000)
    assert r.exact_exponent == pytest.approx(-0.5 * math.log(v * (2 - v)), rel=0.05)
    r3 = majority_vote(pair, 3, 10_000)
    assert r3.n_total == 9999 and r3.n_requested == 10_000
    with pytest.raises(DomainError):
        majority_vote(build_example1(Example1Params(1.0)), 1, 100)


@given(st.floats(0.51, 0.99), st.integers(1, 400))
def test_majority_error_exact(p, n):
    from scipy.stats import binom

    ref = binom.cdf((n - 1) // 2, n, p) + (0.5 * binom.pmf(n // 2, n, p) if n % 2 == 0 else 0.0)
    assert math.exp(log_majority_error(n, p)) == pytest.approx(ref, rel=1e-9, abs=1e-300)


@given(st.floats(0.05, 0.45), st.integers(1, 3))
def test_majority_vote_properties(p_block, m):
    pair = build_example1(Example1Params(0.5))
    errs = []
    for n in (20, 60, 200, 1000):
        r = majority_vote(pair, m, n * m, p_block)
        assert r.exact_exponent >= r.exponent_lower_bound - 1e-12
        errs.append(r.exact_error)
    assert all(b <= a for a, b in zip(errs, errs[1:]))
