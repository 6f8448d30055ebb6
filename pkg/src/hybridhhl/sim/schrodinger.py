"""Dense state-vector (Schrödinger) execution by strided in-place updates."""
from __future__ import annotations

import os

import numpy as np

from ..circuit import CNOT, Circuit, Gate
from ..qstate import StateVector

DEFAULT_MAX_QUBITS = 26


class ResourceError(RuntimeError):
    """Raised when a request exceeds a configured memory or branch cap."""


def max_qubits() -> int:
    return int(os.environ.get("HHLSIM_MAX_QUBITS", DEFAULT_MAX_QUBITS))


def apply_1q(psi: np.ndarray, m: np.ndarray, q: int, n: int) -> None:
    """Apply a 2x2 matrix (not necessarily unitary) to qubit ``q`` in place."""
    v = psi.reshape(1 << (n - 1 - q), 2, 1 << q)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :]
    v[:, 0, :] = m[0, 0] * a0 + m[0, 1] * a1
    v[:, 1, :] = m[1, 0] * a0 + m[1, 1] * a1


def apply_cnot(psi: np.ndarray, c: int, t: int, n: int) -> None:
    if c > t:
        v = psi.reshape(1 << (n - 1 - c), 2, 1 << (c - t - 1), 2, 1 << t)
        tmp = v[:, 1, :, 0, :].copy()
        v[:, 1, :, 0, :] = v[:, 1, :, 1, :]
        v[:, 1, :, 1, :] = tmp
    else:
        v = psi.reshape(1 << (n - 1 - t), 2, 1 << (t - c - 1), 2, 1 << c)
        tmp = v[:, 0, :, 1, :].copy()
        v[:, 0, :, 1, :] = v[:, 1, :, 1, :]
        v[:, 1, :, 1, :] = tmp


def apply_gate(psi: np.ndarray, gate: Gate, n: int) -> None:
    if gate.kind == CNOT:
        apply_cnot(psi, gate.qubits[0], gate.qubits[1], n)
    else:
        apply_1q(psi, gate.matrix, gate.qubits[0], n)


def run_gates(psi: np.ndarray, gates, n: int) -> np.ndarray:
    for g in gates:
        apply_gate(psi, g, n)
    return psi


def schrodinger_run(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    """Exact final state of ``circuit`` applied to ``initial`` (default |0...0>)."""
    n = circuit.n_qubits
    if n > max_qubits():
        raise ResourceError(f"{n} qubits exceeds the state-vector cap of {max_qubits()}")
    if initial is None:
        psi = np.zeros(1 << n, dtype=np.complex128)
        psi[0] = 1.0
    else:
        if initial.n_qubits != n:
            raise ValueError(f"initial state has {initial.n_qubits} qubits, circuit {n}")
        psi = initial.amps.copy()
    run_gates(psi, circuit.gates, n)
    return StateVector(psi)


class SchrodingerBackend:
    """Backend handle used by the HHL runner."""

    name = "sv"

    def run(self, circuit: Circuit, initial: StateVector | None = None) -> StateVector:
        return schrodinger_run(circuit, initial)

    def max_width(self) -> int:
        return max_qubits()
