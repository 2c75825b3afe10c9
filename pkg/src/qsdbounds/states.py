"""Qubit state families and the discrimination-problem container."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import matops
from .errors import DimensionCapExceeded, DomainError, NotPSD

DIM_CAP = 2**12
STATE_TOL = 1e-12


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    n_qubits: int = field(init=False)

    def __post_init__(self):
        m = matops.as_matrix(self.matrix)
        d = m.shape[0]
        n = d.bit_length() - 1
        if 2**n != d:
            raise DomainError(f"dimension {d} is not a power of two")
        if not matops.is_hermitian(m, STATE_TOL):
            raise matops.NotHermitian("density matrix must be Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > STATE_TOL * max(1, d):
            raise DomainError(f"trace {tr!r} differs from 1")
        wmin = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
        if wmin < -STATE_TOL:
            raise NotPSD(f"minimum eigenvalue {wmin:.3e}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "n_qubits", n)

    @classmethod
    def _trusted(cls, matrix: np.ndarray) -> "DensityMatrix":
        # skips the O(d^3) spectrum check for products of validated states
        obj = object.__new__(cls)
        matrix = np.array(matrix, dtype=complex)
        matrix.flags.writeable = False
        object.__setattr__(obj, "matrix", matrix)
        object.__setattr__(obj, "n_qubits", matrix.shape[0].bit_length() - 1)
        return obj

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True)
class StatePair:
    rho_plus: DensityMatrix
    rho_minus: DensityMatrix
    prior_q: float = 0.5

    def __post_init__(self):
        if self.rho_plus.dim != self.rho_minus.dim:
            raise DomainError("states must have equal dimension")
        if not 0.0 <= self.prior_q <= 1.0:
            raise DomainError(f"prior {self.prior_q} outside [0, 1]")

    def with_prior(self, q: float) -> "StatePair":
        return StatePair(self.rho_plus, self.rho_minus, q)

    def swapped(self) -> "StatePair":
        return StatePair(self.rho_minus, self.rho_plus, 1.0 - self.prior_q)


@dataclass(frozen=True)
class Example1Params:
    v: float


@dataclass(frozen=True)
class Example2Params:
    v: float
    alpha: float


@dataclass(frozen=True)
class Example3Params:
    theta_x: float
    theta_y: float
    theta_z: float

    @property
    def a(self) -> float:
        return math.sqrt(self.theta_x**2 + self.theta_y**2 + self.theta_z**2)


@dataclass(frozen=True)
class DiagonalStatePair:
    lambdas_1: np.ndarray
    lambdas_2: np.ndarray
    prior_q: float = 0.5

    def __post_init__(self):
        l1 = np.asarray(self.lambdas_1, dtype=float)
        l2 = np.asarray(self.lambdas_2, dtype=float)
        if l1.ndim != 1 or l1.shape != l2.shape or l1.size == 0:
            raise DomainError("probability vectors must be 1-D and of equal length")
        for lam in (l1, l2):
            if np.any(lam < 0) or abs(lam.sum() - 1.0) > STATE_TOL:
                raise DomainError("each vector must be a probability distribution")
        if not 0.0 <= self.prior_q <= 1.0:
            raise DomainError(f"prior {self.prior_q} outside [0, 1]")
        object.__setattr__(self, "lambdas_1", l1)
        object.__setattr__(self, "lambdas_2", l2)

    @classmethod
    def from_pair(cls, pair: StatePair) -> "DiagonalStatePair":
        """Spectra of a pair that is diagonal in the computational basis."""
        a, b = pair.rho_plus.matrix, pair.rho_minus.matrix
        for m in (a, b):
            if np.max(np.abs(m - np.diag(np.diag(m)))) > STATE_TOL:
                raise DomainError("pair is not diagonal in the computational basis")
        return cls(np.diag(a).real, np.diag(b).real, pair.prior_q)


def _check_unit(name: str, x: float, lo: float = 0.0, hi: float = 1.0) -> None:
    if not lo <= x <= hi:
        raise DomainError(f"{name}={x} outside [{lo}, {hi}]")


def build_example1(p: Example1Params, q: float = 0.5) -> StatePair:
    """rho_pm = (I +- (1 - v) sigma_z) / 2."""
    _check_unit("v", p.v)
    v = p.v
    plus = np.diag([(2 - v) / 2, v / 2]).astype(complex)
    minus = np.diag([v / 2, (2 - v) / 2]).astype(complex)
    return StatePair(DensityMatrix(plus), DensityMatrix(minus), q)


def build_example2(p: Example2Params, q: float = 0.5) -> StatePair:
    """rho_pm = (I + (1 - v)(sigma_z cos(alpha) +- sigma_x sin(alpha))) / 2."""
    _check_unit("v", p.v)
    _check_unit("alpha", p.alpha, 0.0, math.pi / 2)
    r = 1.0 - p.v
    c, s = math.cos(p.alpha), math.sin(p.alpha)
    plus = 0.5 * (matops.IDENTITY_2 + r * (c * matops.SIGMA_Z + s * matops.SIGMA_X))
    minus = 0.5 * (matops.IDENTITY_2 + r * (c * matops.SIGMA_Z - s * matops.SIGMA_X))
    return StatePair(DensityMatrix(plus), DensityMatrix(minus), q)


def example2_pure_kets(alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """(cos(alpha/2), +-sin(alpha/2)), the v = 0 eigenvectors."""
    c, s = math.cos(alpha / 2), math.sin(alpha / 2)
    return np.array([c, s], dtype=complex), np.array([c, -s], dtype=complex)


def build_example3(p: Example3Params, q: float = 0.5) -> StatePair:
    """rho_plus = I/2 and rho_minus = I/2 + theta . sigma.

    The maximally mixed state is the ``+`` hypothesis; the Chernoff exponent
    ``s`` therefore sits on ``I/2``.
    """
    if p.a > 0.5 + STATE_TOL:
        raise NotPSD(f"|theta| = {p.a} exceeds 1/2")
    rho1 = 0.5 * matops.IDENTITY_2
    rho2 = rho1 + p.theta_x * matops.SIGMA_X + p.theta_y * matops.SIGMA_Y + p.theta_z * matops.SIGMA_Z
    return StatePair(DensityMatrix(rho1), DensityMatrix(rho2), q)


def check_dim(n_qubits_total: int, dim_cap: int = DIM_CAP) -> None:
    if 2**n_qubits_total > dim_cap:
        raise DimensionCapExceeded(
            f"dimension 2**{n_qubits_total} exceeds the cap of {dim_cap}"
        )


def tensor_power(rho: DensityMatrix, m: int, dim_cap: int = DIM_CAP) -> DensityMatrix:
    if m < 1:
        raise DomainError("m must be >= 1")
    check_dim(rho.n_qubits * m, dim_cap)
    if m == 1:
        return rho
    return DensityMatrix._trusted(matops.kron_power(rho.matrix, m))
