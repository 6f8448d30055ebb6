"""Dense state vectors, density matrices and outcome distributions.

Qubit ``q`` is bit ``q`` of the basis-state integer (qubit 0 is the least
significant bit). Every module in the package shares this convention.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

NORM_FLOOR = 1e-12


class DegenerateStateError(ValueError):
    """Raised when a state or branch has (numerically) zero norm."""


def _n_from_dim(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if n < 1 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return n


@dataclass(frozen=True, eq=False)
class StateVector:
    amps: np.ndarray
    n_qubits: int = field(default=-1)

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amps, dtype=np.complex128).reshape(-1)
        n = _n_from_dim(amps.size)
        if self.n_qubits not in (-1, n):
            raise ValueError(f"{amps.size} amplitudes do not describe {self.n_qubits} qubits")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "n_qubits", n)

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def from_product(cls, factors: Sequence[np.ndarray]) -> "StateVector":
        """Product state; ``factors[q]`` is the 2-vector of qubit ``q``."""
        out = np.ones(1, dtype=np.complex128)
        for f in factors:
            out = np.kron(np.asarray(f, dtype=np.complex128), out)
        return cls(out)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalize(self) -> "StateVector":
        nrm = self.norm
        if nrm < NORM_FLOOR:
            raise DegenerateStateError(f"cannot normalize state with norm {nrm:.3e}")
        return StateVector(self.amps / nrm)

    def probabilities(self) -> "ProbDist":
        p = np.abs(self.amps) ** 2
        return ProbDist(p / p.sum(), normalized=True)

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amps, self.amps.conj()))

    def overlap(self, other: "StateVector") -> complex:
        if other.n_qubits != self.n_qubits:
            raise ValueError("dimension mismatch")
        return complex(np.vdot(self.amps, other.amps))

    def fidelity(self, other: "StateVector") -> float:
        """|<a|b>|^2 for normalized inputs, clamped to [0, 1]."""
        return float(min(1.0, max(0.0, abs(self.overlap(other)) ** 2)))

    def to_json(self) -> str:
        return json.dumps(
            {"n_qubits": self.n_qubits,
             "amps": [[float(a.real), float(a.imag)] for a in self.amps]}
        )

    @classmethod
    def from_json(cls, text: str) -> "StateVector":
        data = json.loads(text)
        amps = np.array([complex(re, im) for re, im in data["amps"]])
        return cls(amps, n_qubits=int(data["n_qubits"]))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    elements: np.ndarray
    n_qubits: int = field(default=-1)

    def __post_init__(self):
        rho = np.array(self.elements, dtype=np.complex128)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density matrix must be square")
        n = _n_from_dim(rho.shape[0])
        if self.n_qubits not in (-1, n):
            raise ValueError(f"{rho.shape} matrix does not describe {self.n_qubits} qubits")
        rho.setflags(write=False)
        object.__setattr__(self, "elements", rho)
        object.__setattr__(self, "n_qubits", n)

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        d = 1 << n_qubits
        return cls(np.eye(d, dtype=np.complex128) / d)

    def is_valid(self, atol: float = 1e-9, eig_floor: float = -1e-8) -> bool:
        rho = self.elements
        if not np.allclose(rho, rho.conj().T, atol=atol):
            return False
        if abs(np.trace(rho) - 1.0) > atol:
            return False
        return bool(np.linalg.eigvalsh(rho).min() >= eig_floor)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.elements))


@dataclass(frozen=True, eq=False)
class ProbDist:
    probs: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        p = np.array(self.probs, dtype=np.float64).reshape(-1)
        if np.any(p < -1e-12):
            raise ValueError("probabilities must be non-negative")
        p = np.clip(p, 0.0, None)
        if self.normalized and abs(p.sum() - 1.0) > 1e-9:
            raise ValueError(f"distribution sums to {p.sum():.12f}, expected 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def dim(self) -> int:
        return int(self.probs.size)

    @classmethod
    def uniform(cls, dim: int) -> "ProbDist":
        return cls(np.full(dim, 1.0 / dim))

    @classmethod
    def from_counts(cls, counts: np.ndarray) -> "ProbDist":
        counts = np.asarray(counts, dtype=np.float64)
        total = counts.sum()
        if total <= 0:
            raise DegenerateStateError("no counts")
        return cls(counts / total)

    def total_variation(self, other: "ProbDist") -> float:
        return 0.5 * float(np.abs(self.probs - other.probs).sum())


def _check_pair(psi: StateVector, rho: DensityMatrix) -> None:
    if psi.n_qubits != rho.n_qubits:
        raise ValueError(f"dimension mismatch: {psi.n_qubits} vs {rho.n_qubits} qubits")


def state_fidelity(pure: StateVector, rho: DensityMatrix) -> float:
    _check_pair(pure, rho)
    v = pure.amps
    f = float(np.real(np.vdot(v, rho.elements @ v)))
    return min(1.0, max(0.0, f))


def _check_qubits(qubits: Iterable[int], n: int) -> list[int]:
    qs = sorted(set(int(q) for q in qubits))
    if not qs:
        raise ValueError("qubit set must be nonempty")
    if qs[0] < 0 or qs[-1] >= n:
        raise ValueError(f"qubit index out of range for {n} qubits: {qs}")
    return qs


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on ``keep``; kept qubits retain their relative order."""
    n = rho.n_qubits
    kept = _check_qubits(keep, n)
    traced = [q for q in range(n) if q not in kept]
    k, d = len(kept), n - len(kept)
    # row axis a of the tensor is qubit n-1-a; columns follow at offset n
    rows = [n - 1 - q for q in reversed(kept)] + [n - 1 - q for q in reversed(traced)]
    t = rho.elements.reshape([2] * (2 * n)).transpose(rows + [n + a for a in rows])
    t = t.reshape(1 << k, 1 << d, 1 << k, 1 << d)
    return DensityMatrix(np.einsum("itjt->ij", t))


def reduced_state(state: StateVector, keep: Iterable[int]) -> DensityMatrix:
    """Partial trace of a pure state without forming the full density matrix."""
    n = state.n_qubits
    kept = _check_qubits(keep, n)
    traced = [q for q in range(n) if q not in kept]
    t = state.amps.reshape([2] * n)
    perm = [n - 1 - q for q in reversed(kept)] + [n - 1 - q for q in reversed(traced)]
    m = t.transpose(perm).reshape(1 << len(kept), -1)
    return DensityMatrix(m @ m.conj().T)


def postselect(state: StateVector, qubit: int, outcome: int) -> tuple[StateVector, float]:
    """Condition ``qubit`` on ``outcome``; returns the remaining-qubit state and the branch probability."""
    n = state.n_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    if n == 1:
        raise ValueError("cannot post-select the only qubit")
    t = state.amps.reshape(1 << (n - 1 - qubit), 2, 1 << qubit)
    branch = t[:, outcome, :].reshape(-1)
    prob = float(np.vdot(branch, branch).real)
    if prob < NORM_FLOOR ** 2:
        raise DegenerateStateError(f"outcome {outcome} on qubit {qubit} has zero probability")
    return StateVector(branch / np.sqrt(prob)), prob


def marginal(dist: ProbDist, n_qubits: int, keep: Sequence[int]) -> ProbDist:
    """Marginal over ``keep`` (output bit i = qubit keep[i])."""
    kept = list(keep)
    t = dist.probs.reshape([2] * n_qubits)
    drop = tuple(n_qubits - 1 - q for q in range(n_qubits) if q not in kept)
    t = t.sum(axis=drop) if drop else t
    remaining = [q for q in range(n_qubits - 1, -1, -1) if q in kept]
    order = [remaining.index(q) for q in reversed(kept)]
    t = np.transpose(t, order) if len(kept) > 1 else t
    return ProbDist(t.reshape(-1), normalized=dist.normalized)
