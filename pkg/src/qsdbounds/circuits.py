"""Brickwork parameterised circuits as first-stage POVMs, and their optimisation.

A circuit ``U`` on ``k`` qubits followed by a computational-basis readout
defines the ``2^k``-outcome projective measurement ``Pi_j = U^dag |j><j| U``.
Each single-qubit gate is ``Rz(a) Ry(b) Rz(c)`` (identity at zero angles,
global phase dropped).  Qubit 0 is the most significant tensor factor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from .bounds import split_errors, weighted_powers
from .errors import AngleCountMismatch, DomainError
from .states import DIM_CAP, StatePair, check_dim
from .strategies import StrategyResult, _assemble, outcome_strings

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CircuitAnsatz:
    n_qubits: int
    n_cnot_layers: int

    @property
    def angle_count(self) -> int:
        return 3 * self.n_qubits * (self.n_cnot_layers + 1)

    def cnot_pairs(self, layer: int) -> list[tuple[int, int]]:
        """(control, target) pairs of CNOT layer ``layer``: ``(2k+l, 2k+1+l) mod n``."""
        n = self.n_qubits
        return [((2 * k + layer) % n, (2 * k + 1 + layer) % n) for k in range(n // 2)]

    @property
    def layout(self) -> list[list[tuple[int, int]]]:
        return [self.cnot_pairs(layer) for layer in range(self.n_cnot_layers)]


def build_brickwork(n_qubits: int, n_cnot_layers: int) -> CircuitAnsatz:
    if n_qubits < 1:
        raise DomainError("n_qubits must be >= 1")
    if n_cnot_layers < 0:
        raise DomainError("n_cnot_layers must be >= 0")
    return CircuitAnsatz(n_qubits, n_cnot_layers if n_qubits > 1 else 0)


def _cnot_permutation(n: int, pairs) -> np.ndarray:
    """Row gather ``f`` with ``C X = X[f]`` for a layer of disjoint CNOTs."""
    idx = np.arange(2**n)
    out = idx.copy()
    for control, target in pairs:
        cbit = 1 << (n - 1 - control)
        tbit = 1 << (n - 1 - target)
        out = np.where(out & cbit, out ^ tbit, out)
    return out


def _gates(angles: np.ndarray) -> np.ndarray:
    """ZYZ gates for angle triples ``(..., 3)`` -> ``(..., 2, 2)``."""
    a, b, c = angles[..., 0], angles[..., 1], angles[..., 2]
    cb, sb = np.cos(b / 2), np.sin(b / 2)
    g = np.empty(angles.shape[:-1] + (2, 2), dtype=complex)
    g[..., 0, 0] = np.exp(-0.5j * (a + c)) * cb
    g[..., 0, 1] = -np.exp(-0.5j * (a - c)) * sb
    g[..., 1, 0] = np.exp(0.5j * (a - c)) * sb
    g[..., 1, 1] = np.exp(0.5j * (a + c)) * cb
    return g


def _layer_unitaries(gates: np.ndarray) -> np.ndarray:
    """Kronecker product over the qubit axis: ``(B, n, 2, 2)`` -> ``(B, 2^n, 2^n)``."""
    out = gates[:, 0]
    for j in range(1, gates.shape[1]):
        g = gates[:, j]
        d = out.shape[-1]
        out = np.einsum("bij,bkl->bikjl", out, g).reshape(-1, 2 * d, 2 * d)
    return out


def batched_unitaries(ansatz: CircuitAnsatz, angles: np.ndarray) -> np.ndarray:
    angles = np.asarray(angles, dtype=float)
    if angles.shape[-1] != ansatz.angle_count:
        raise AngleCountMismatch(f"expected {ansatz.angle_count} angles, got {angles.shape[-1]}")
    batch = angles.reshape(-1, ansatz.angle_count)
    n, n_layers = ansatz.n_qubits, ansatz.n_cnot_layers
    gates = _gates(batch.reshape(batch.shape[0], n_layers + 1, n, 3))
    u = _layer_unitaries(gates[:, 0])
    for layer in range(n_layers):
        perm = _cnot_permutation(n, ansatz.cnot_pairs(layer))
        u = _layer_unitaries(gates[:, layer + 1]) @ u[:, perm, :]
    return u.reshape(angles.shape[:-1] + u.shape[-2:])


def circuit_unitary(ansatz: CircuitAnsatz, angles) -> np.ndarray:
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (ansatz.angle_count,):
        raise AngleCountMismatch(f"expected {ansatz.angle_count} angles, got shape {angles.shape}")
    return batched_unitaries(ansatz, angles)


def circuit_povm(ansatz: CircuitAnsatz, angles) -> list[np.ndarray]:
    u = circuit_unitary(ansatz, angles)
    return [np.outer(u[j].conj(), u[j]) for j in range(u.shape[0])]


def zyz_angles_for_measurement(phi: float) -> np.ndarray:
    """Single-gate angles whose readout equals the real-plane measurement at ``phi``."""
    return np.array([0.0, -2.0 * phi, 0.0])


class SplitObjective:
    """``P^M_{M-N,N}`` as a function of circuit angles, batched over angle vectors."""

    def __init__(self, pair: StatePair, m: int, n_final: int, ansatz: CircuitAnsatz, dim_cap: int = DIM_CAP):
        if not 1 <= n_final <= m:
            raise DomainError("need 1 <= n_final <= m")
        k = m - n_final
        if k and ansatz.n_qubits != k * pair.rho_plus.n_qubits:
            raise DomainError(f"ansatz must act on {k} copies")
        check_dim(pair.rho_plus.n_qubits * max(k, n_final), dim_cap)
        self.pair, self.m, self.n_final, self.ansatz, self.k = pair, m, n_final, ansatz, k
        if k:
            self.first_plus, self.first_minus = weighted_powers(pair, k, dim_cap)
        self.final_plus, self.final_minus = weighted_powers(pair, n_final, dim_cap)

    def likelihoods(self, angles: np.ndarray):
        u = batched_unitaries(self.ansatz, angles)
        uc = u.conj()
        lp = np.sum((u @ self.first_plus) * uc, axis=-1).real
        lm = np.sum((u @ self.first_minus) * uc, axis=-1).real
        return lp, lm

    def split(self, angles: np.ndarray):
        q = self.pair.prior_q
        lp, lm = self.likelihoods(angles)
        a, b = q * lp, (1 - q) * lm
        pw, mw = split_errors(a[..., None, None] * self.final_plus, b[..., None, None] * self.final_minus)
        return a, b, pw, mw

    def values(self, angles: np.ndarray) -> np.ndarray:
        _, _, pw, mw = self.split(angles)
        return (pw + mw).sum(axis=-1)

    def __call__(self, angles) -> float:
        return float(self.values(np.asarray(angles, dtype=float)[None, :])[0])

    def value_and_grad(self, x: np.ndarray, step: float = 1e-6):
        """Value and central finite-difference gradient in one batched call."""
        p = x.size
        pts = np.repeat(x[None, :], 2 * p + 1, axis=0)
        pts[1 : p + 1] += step * np.eye(p)
        pts[p + 1 :] -= step * np.eye(p)
        vals = self.values(pts)
        return float(vals[0]), (vals[1 : p + 1] - vals[p + 1 :]) / (2 * step)


def evaluate_split_strategy(
    pair: StatePair, m: int, n_final: int, ansatz: CircuitAnsatz | None, angles, dim_cap: int = DIM_CAP
) -> StrategyResult:
    """Circuit measurement on the first ``m - n_final`` copies, Helstrom on the rest.

    Outcome probabilities are taken under the state actually presented,
    ``q rho_+^{(x)k} + (1-q) rho_-^{(x)k}``.
    """
    if not 1 <= n_final <= m:
        raise DomainError("need 1 <= n_final <= m")
    q = pair.prior_q
    name = f"P^{m}_{m - n_final},{n_final}"
    if n_final == m:
        xp, xm = weighted_powers(pair, m, dim_cap)
        pw, mw = split_errors(q * xp, (1 - q) * xm)
        return _assemble(name, [""], [q], [1 - q], [pw], [mw], q)
    obj = SplitObjective(pair, m, n_final, ansatz, dim_cap)
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (ansatz.angle_count,):
        raise AngleCountMismatch(f"expected {ansatz.angle_count} angles, got shape {angles.shape}")
    a, b, pw, mw = obj.split(angles[None, :])
    return _assemble(name, outcome_strings(obj.k), a[0], b[0], pw[0], mw[0], q, {"circuit": tuple(angles)})


@dataclass(frozen=True)
class OptimizerConfig:
    hops: int = 50
    max_iters_per_hop: int = 500
    seed: int = 0
    perturbation_scale: float = 0.5
    convergence_tol: float = 1e-9
    fd_step: float = 1e-6

    def __post_init__(self):
        if self.hops < 1 or self.max_iters_per_hop < 1:
            raise DomainError("hops and max_iters_per_hop must be positive")
        if self.perturbation_scale <= 0 or self.convergence_tol <= 0 or self.fd_step <= 0:
            raise DomainError("scales and tolerances must be positive")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class HopRecord:
    hop: int
    iterations: int
    hop_value: float
    best_value: float


@dataclass
class OptimizationTrace:
    hops: list[HopRecord] = field(default_factory=list)

    def write_csv(self, path) -> None:
        with open(Path(path), "w", newline="") as fh:
            fh.write(trace_csv(self))

    @property
    def best_values(self) -> list[float]:
        return [h.best_value for h in self.hops]


def trace_csv(trace: OptimizationTrace) -> str:
    lines = ["hop,iterations,best_value"]
    lines += [f"{h.hop},{h.iterations},{h.best_value:.12g}" for h in trace.hops]
    return "\n".join(lines) + "\n"


def hop_rng(seed: int, hop: int) -> np.random.Generator:
    """PCG64 stream for one hop, derived from ``(seed, hop)`` via ``SeedSequence``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(hop,))))


def optimize_split_strategy(
    pair: StatePair,
    m: int,
    n_final: int,
    ansatz: CircuitAnsatz | None,
    config: OptimizerConfig = OptimizerConfig(),
    dim_cap: int = DIM_CAP,
):
    """Basin hopping over circuit angles: ``(angles, StrategyResult, trace)``.

    Hop 0 starts from angles uniform in ``[0, 2 pi)``; later hops perturb the
    incumbent by uniform noise of half-width ``perturbation_scale``.  Each hop
    runs L-BFGS-B (central differences) and the incumbent is replaced only
    on strict improvement.
    """
    trace = OptimizationTrace()
    if n_final == m:
        res = evaluate_split_strategy(pair, m, n_final, None, None, dim_cap)
        trace.hops.append(HopRecord(0, 0, res.error_probability, res.error_probability))
        return np.zeros(0), res, trace
    obj = SplitObjective(pair, m, n_final, ansatz, dim_cap)
    n_par = ansatz.angle_count
    best_x, best_val = None, math.inf
    for hop in range(config.hops):
        rng = hop_rng(config.seed, hop)
        if best_x is None:
            x0 = rng.uniform(0.0, TWO_PI, n_par)
        else:
            x0 = best_x + rng.uniform(-config.perturbation_scale, config.perturbation_scale, n_par)
        x0 = np.mod(x0, TWO_PI)
        res = minimize(
            obj.value_and_grad,
            x0,
            args=(config.fd_step,),
            jac=True,
            method="L-BFGS-B",
            bounds=[(-math.pi, 3 * math.pi)] * n_par,
            options={"maxiter": config.max_iters_per_hop, "ftol": config.convergence_tol, "gtol": 1e-12},
        )
        x = np.mod(res.x, TWO_PI)
        val = obj(x)
        if val < best_val:
            best_x, best_val = x, val
        trace.hops.append(HopRecord(hop, int(res.nit), val, best_val))
    return best_x, evaluate_split_strategy(pair, m, n_final, ansatz, best_x, dim_cap), trace
