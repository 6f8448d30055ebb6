"""Input checks shared by the estimators and the command line."""
from __future__ import annotations

import numpy as np

from .circuit import Circuit
from .qstate import StateVector


def check_circuit(obj, max_qubits: int | None = None) -> Circuit:
    if isinstance(obj, dict):
        obj = Circuit.from_dict(obj)
    if not isinstance(obj, Circuit):
        raise TypeError(f"expected a Circuit, got {type(obj).__name__}")
    if max_qubits is not None and obj.n_qubits > max_qubits:
        raise ValueError(f"circuit has {obj.n_qubits} qubits, limit is {max_qubits}")
    return obj


def check_unitary(u, atol: float = 1e-8) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("expected a square matrix")
    dim = u.shape[0]
    if dim < 2 or dim & (dim - 1):
        raise ValueError("matrix size must be a power of two")
    if np.abs(u.conj().T @ u - np.eye(dim)).max() > atol:
        raise ValueError("matrix is not unitary")
    return u


def check_state(obj, n_qubits: int | None = None) -> StateVector:
    if not isinstance(obj, StateVector):
        obj = StateVector(np.asarray(obj, dtype=complex)).normalize()
    if n_qubits is not None and obj.n_qubits != n_qubits:
        raise ValueError(f"state has {obj.n_qubits} qubits, expected {n_qubits}")
    return obj


def check_rate(name: str, value) -> float:
    v = float(value)
    if not 0.0 <= v < 1.0:
        raise ValueError(f"{name}={v} outside [0, 1)")
    return v


def check_positive_int(name: str, value, minimum: int = 1) -> int:
    v = int(value)
    if v != value or v < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}")
    return v
