import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsdbounds.errors import DimensionCapExceeded, DomainError, NotHermitian, NotPSD
from qsdbounds.states import (
    DensityMatrix,
    DiagonalStatePair,
    Example1Params,
    Example2Params,
    Example3Params,
    StatePair,
    build_example1,
    build_example2,
    build_example3,
    check_dim,
    example2_pure_kets,
    tensor_power,
)

unit = st.floats(0, 1)
angle = st.floats(0, math.pi / 2)


def test_density_matrix_validation():
    with pytest.raises(DomainError):
        DensityMatrix(np.eye(3) / 3)
    with pytest.raises(NotHermitian):
        DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(DomainError):
        DensityMatrix(np.eye(2))
    with pytest.raises(NotPSD):
        DensityMatrix(np.diag([1.2, -0.2]))
    rho = DensityMatrix(np.eye(4) / 4)
    assert rho.n_qubits == 2 and rho.dim == 4
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1


def test_state_pair_validation():
    a = DensityMatrix(np.eye(2) / 2)
    with pytest.raises(DomainError):
        StatePair(a, DensityMatrix(np.eye(4) / 4))
    with pytest.raises(DomainError):
        StatePair(a, a, 1.5)
    p = StatePair(a, DensityMatrix(np.diag([1.0, 0.0])), 0.3)
    assert p.swapped().prior_q == pytest.approx(0.7)
    assert p.with_prior(0.2).prior_q == 0.2


def test_example1_limits():
    p = build_example1(Example1Params(0.0))
    np.testing.assert_array_equal(p.rho_plus.matrix, np.diag([1, 0]))
    np.testing.assert_array_equal(p.rho_minus.matrix, np.diag([0, 1]))
    p = build_example1(Example1Params(1.0))
    np.testing.assert_array_equal(p.rho_plus.matrix, p.rho_minus.matrix)
    np.testing.assert_allclose(build_example1(Example1Params(0.5)).rho_plus.matrix, np.diag([0.75, 0.25]))
    with pytest.raises(DomainError):
        build_example1(Example1Params(1.1))


def test_example2_limits():
    p = build_example2(Example2Params(0.3, 0.0))
    np.testing.assert_array_equal(p.rho_plus.matrix, p.rho_minus.matrix)
    p = build_example2(Example2Params(0.0, math.pi / 2))
    assert abs(np.trace(p.rho_plus.matrix @ p.rho_minus.matrix)) < 1e-15
    with pytest.raises(DomainError):
        build_example2(Example2Params(0.1, 2.0))


def test_example2_pure_kets_match():
    alpha = 0.7
    kp, km = example2_pure_kets(alpha)
    p = build_example2(Example2Params(0.0, alpha))
    np.testing.assert_allclose(p.rho_plus.matrix, np.outer(kp, kp.conj()), atol=1e-15)
    np.testing.assert_allclose(p.rho_minus.matrix, np.outer(km, km.conj()), atol=1e-15)


@given(unit, angle)
def test_example2_spectrum_matches_example1(v, alpha):
    w2 = np.linalg.eigvalsh(build_example2(Example2Params(v, alpha)).rho_plus.matrix)
    w1 = np.linalg.eigvalsh(build_example1(Example1Params(v)).rho_plus.matrix)
    np.testing.assert_allclose(w2, w1, atol=1e-14)


def test_example3():
    p = build_example3(Example3Params(0, 0, 0))
    np.testing.assert_array_equal(p.rho_plus.matrix, p.rho_minus.matrix)
    p = build_example3(Example3Params(0, 0, 0.2))
    np.testing.assert_allclose(np.linalg.eigvalsh(p.rho_minus.matrix), [0.3, 0.7])
    assert Example3Params(0.01, 0.01, 0.01).a == pytest.approx(0.01 * math.sqrt(3))
    build_example3(Example3Params(0, 0.5, 0))
    with pytest.raises(NotPSD):
        build_example3(Example3Params(0.3, 0.3, 0.3))


def test_tensor_power():
    rho = DensityMatrix(np.diag([0.75, 0.25]))
    assert tensor_power(rho, 1) is rho
    np.testing.assert_allclose(tensor_power(rho, 2).matrix, np.diag([0.5625, 0.1875, 0.1875, 0.0625]))
    np.testing.assert_allclose(tensor_power(DensityMatrix(np.eye(2) / 2), 3).matrix, np.eye(8) / 8)
    with pytest.raises(DimensionCapExceeded):
        tensor_power(rho, 13)
    with pytest.raises(DimensionCapExceeded):
        check_dim(5, dim_cap=16)


@given(unit, angle, st.integers(1, 6))
def test_tensor_power_is_a_state(v, alpha, m):
    rho = tensor_power(build_example2(Example2Params(v, alpha)).rho_plus, m)
    assert np.trace(rho.matrix).real == pytest.approx(1, abs=1e-10)
    assert np.linalg.eigvalsh(rho.matrix)[0] >= -1e-10


def test_diagonal_pair():
    d = DiagonalStatePair.from_pair(build_example1(Example1Params(0.4), 0.3))
    np.testing.assert_allclose(d.lambdas_1, [0.8, 0.2])
    assert d.prior_q == 0.3
    with pytest.raises(DomainError):
        DiagonalStatePair.from_pair(build_example2(Example2Params(0.1, 0.5)))
    with pytest.raises(DomainError):
        DiagonalStatePair([0.5, 0.6], [0.5, 0.5])
