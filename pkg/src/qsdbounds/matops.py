"""Dense complex matrix kernel.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
Dimensions stay small (at most a few thousand), so dense ``O(d^3)``
eigendecompositions are used throughout.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NegativeEigenvalue, NotHermitian

HERMITIAN_TOL = 1e-12
# eigenvalues with |lambda| below this are treated as exact zeros
ZERO_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class HermitianEigenSystem:
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # orthonormal columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    return a


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def _checked_hermitian(a) -> np.ndarray:
    a = as_matrix(a)
    if not is_hermitian(a):
        err = np.max(np.abs(a - a.conj().T))
        raise NotHermitian(f"matrix deviates from its adjoint by {err:.3e}")
    # symmetrise so round-off asymmetry below the tolerance cannot leak into eigh
    return 0.5 * (a + a.conj().T)


def kron(a, b) -> np.ndarray:
    """Kronecker product, left factor most significant."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_power(a, m: int) -> np.ndarray:
    if m < 1:
        raise ValueError("m must be >= 1")
    a = as_matrix(a)
    out = a
    for _ in range(m - 1):
        out = np.kron(out, a)
    return out


def hermitian_eig(a) -> HermitianEigenSystem:
    h = _checked_hermitian(a)
    w, v = np.linalg.eigh(h)
    return HermitianEigenSystem(w, v)


def trace_norm(a) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    h = _checked_hermitian(a)
    return float(np.sum(np.abs(np.linalg.eigvalsh(h))))


def _clean_spectrum(w: np.ndarray) -> np.ndarray:
    if np.any(w < -ZERO_TOL):
        raise NegativeEigenvalue(f"minimum eigenvalue {w.min():.3e} below -{ZERO_TOL}")
    w = w.copy()
    w[np.abs(w) <= ZERO_TOL] = 0.0
    return w


def psd_spectrum(a) -> HermitianEigenSystem:
    """Eigen-system of a PSD matrix with round-off eigenvalues snapped to zero."""
    es = hermitian_eig(a)
    return HermitianEigenSystem(_clean_spectrum(es.eigenvalues), es.eigenvectors)


def frac_power(a, s: float) -> np.ndarray:
    """``a**s`` for PSD ``a`` and ``0 <= s <= 1``.

    Zero eigenvalues map to zero for every ``s``, including ``s = 0``, so
    ``frac_power(a, 0)`` is the projector onto the support of ``a``.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"exponent {s} outside [0, 1]")
    es = psd_spectrum(a)
    w = es.eigenvalues
    ws = np.zeros_like(w)
    pos = w > 0
    ws[pos] = w[pos] ** s
    return HermitianEigenSystem(ws, es.eigenvectors).reconstruct()


def bloch_vector(rho) -> np.ndarray:
    """Real 3-vector ``r`` with ``rho = (I + r . sigma) / 2`` for a 2x2 matrix."""
    rho = as_matrix(rho)
    if rho.shape != (2, 2):
        raise ValueError("Bloch vectors are defined for 2x2 matrices only")
    return np.array(
        [2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real]
    )
