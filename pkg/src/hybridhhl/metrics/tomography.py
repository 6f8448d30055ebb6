"""Linear-inversion state tomography from Pauli-basis measurement settings."""
from __future__ import annotations

import itertools
from functools import reduce

import numpy as np

from ..circuit import Circuit
from ..qstate import DensityMatrix, StateVector, postselect
from ..sim.schrodinger import apply_1q, schrodinger_run

MAX_REGISTER = 5
PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
# rotation taking the eigenbasis of each Pauli to the computational basis
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
BASIS_CHANGE = {"X": _H, "Y": _H @ np.diag([1, -1j]), "Z": np.eye(2, dtype=complex)}


class InsufficientShotsError(ValueError):
    """Shot noise would swamp the reconstruction."""


def settings(m: int) -> list[tuple[str, ...]]:
    return list(itertools.product("XYZ", repeat=m))


def pauli_string_matrix(label: str) -> np.ndarray:
    """Matrix of a Pauli string; character i acts on register qubit i (qubit 0 least significant)."""
    return reduce(np.kron, [PAULI[c] for c in reversed(label)])


def expectations(oracle, m: int) -> dict[str, float]:
    """All 4**m Pauli-string expectations from the 3**m setting distributions.

    ``oracle(setting)`` returns the outcome probabilities (length 2**m, bit i
    = register qubit i) after rotating qubit i into the eigenbasis of
    ``setting[i]``. Each string is averaged over every setting that measures it.
    """
    sums: dict[str, float] = {}
    hits: dict[str, int] = {}
    idx = np.arange(1 << m)
    bits = [(idx >> i) & 1 for i in range(m)]
    for s in settings(m):
        p = np.asarray(oracle(s), dtype=float)
        for mask in range(1 << m):
            sign = np.ones(1 << m)
            for i in range(m):
                if mask >> i & 1:
                    sign = sign * (1 - 2 * bits[i])
            label = "".join(s[i] if mask >> i & 1 else "I" for i in range(m))
            sums[label] = sums.get(label, 0.0) + float(sign @ p)
            hits[label] = hits.get(label, 0) + 1
    return {k: sums[k] / hits[k] for k in sums}


def _simplex(w: np.ndarray) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex."""
    u = np.sort(w)[::-1]
    css = np.cumsum(u)
    k = np.nonzero(u - (css - 1) / np.arange(1, u.size + 1) > 0)[0][-1]
    return np.clip(w - (css[k] - 1) / (k + 1), 0.0, None)


def project_psd(rho: np.ndarray, method: str = "nearest") -> np.ndarray:
    """Unit-trace PSD matrix from a Hermitian estimate.

    ``nearest`` is the Frobenius-nearest one (eigenvalues projected onto the
    simplex); ``clip`` zeroes negative eigenvalues and rescales the rest.
    """
    h = (rho + rho.conj().T) / 2
    w, v = np.linalg.eigh(h)
    if method == "nearest":
        w = _simplex(w)
    elif method == "clip":
        w = np.clip(w, 0.0, None)
        if w.sum() <= 0:
            raise ValueError("reconstruction has no positive part")
        w = w / w.sum()
    else:
        raise ValueError(f"unknown projection {method!r}")
    return (v * w) @ v.conj().T


def expected_error(m: int, shots: int) -> float:
    """Rough Frobenius-norm error of linear inversion at ``shots`` per setting."""
    return float(np.sqrt((4 ** m - 1) / ((1 << m) * shots)))


def tomography(oracle, register, shots: int | None = None, *, max_error: float = 0.25,
               psd: bool = True, method: str = "nearest") -> DensityMatrix:
    """Reconstruct the register's density matrix, rho = 2**-m Sum_P <P> P.

    ``register`` is the qubit list (or its size). When ``shots`` is given the
    expected statistical error is checked against ``max_error`` first.
    """
    m = register if isinstance(register, int) else len(list(register))
    if not 1 <= m <= MAX_REGISTER:
        raise ValueError(f"register size {m} outside 1..{MAX_REGISTER}")
    if shots is not None:
        if shots < 1:
            raise InsufficientShotsError("need at least one shot per setting")
        err = expected_error(m, shots)
        if err > max_error:
            raise InsufficientShotsError(
                f"{shots} shots per setting give an expected error of {err:.3f} (> {max_error})")
    ev = expectations(oracle, m)
    rho = np.zeros((1 << m, 1 << m), dtype=complex)
    for label in itertools.product("IXYZ", repeat=m):
        label = "".join(label)
        val = 1.0 if set(label) == {"I"} else ev[label]
        rho += val * pauli_string_matrix(label)
    rho /= 1 << m
    if psd:
        rho = project_psd(rho, method)
    return DensityMatrix(rho)


def _rotate(psi: np.ndarray, setting, qubits, n: int) -> np.ndarray:
    out = psi.copy()
    for b, q in zip(setting, qubits):
        if b != "Z":
            apply_1q(out, BASIS_CHANGE[b], q, n)
    return out


def exact_oracle(state: StateVector | DensityMatrix, register=None):
    """Exact setting distributions of a state (register = all its qubits by default)."""
    if isinstance(state, StateVector):
        rho = np.outer(state.amps, state.amps.conj())
        n = state.n_qubits
    else:
        rho = state.elements
        n = state.n_qubits
    qubits = list(range(n)) if register is None else list(register)
    if sorted(qubits) != list(range(n)):
        raise ValueError("exact_oracle expects the register to cover the state")

    def oracle(setting):
        u = reduce(np.kron, [BASIS_CHANGE[setting[qubits.index(q)]] for q in reversed(range(n))])
        return np.real(np.diag(u @ rho @ u.conj().T)).clip(0, None)
    return oracle


def hhl_oracle(circuit: Circuit, layout, shots: int, rng=None, accepted: bool = True):
    """Sampled setting distributions of the HHL vector register.

    Each setting rotates the vector qubits and keeps only runs with the
    ancilla in |1>; the phase register is traced out by marginalizing. With
    ``accepted`` the ``shots`` count post-selected runs, otherwise raw runs
    of which only the successful fraction survives.
    """
    rng = np.random.default_rng(rng)
    final = schrodinger_run(circuit).amps
    n = circuit.n_qubits
    vq = list(layout.vector_qubits)
    if vq != list(range(len(vq))):
        raise ValueError("vector register must occupy the lowest qubits")

    def oracle(setting):
        psi = _rotate(final, setting, vq, n)
        p = np.abs(psi) ** 2
        if accepted:
            p = p.reshape(1 << (n - 1 - layout.ancilla), 2, 1 << layout.ancilla).copy()
            p[:, 0, :] = 0
            p = p.reshape(-1)
        counts = rng.multinomial(shots, p / p.sum())
        t = counts.reshape(1 << (n - 1 - layout.ancilla), 2, 1 << layout.ancilla)[:, 1, :].reshape(-1)
        rest = [q for q in range(n) if q != layout.ancilla]
        t = t.reshape([2] * (n - 1))
        drop = tuple(n - 2 - rest.index(q) for q in rest if q not in vq)
        t = t.sum(axis=drop) if drop else t
        # remaining axes are vector qubits in descending order: flatten directly
        t = t.reshape(-1).astype(float)
        if t.sum() == 0:
            raise InsufficientShotsError("no post-selected shots in a setting")
        return t / t.sum()
    return oracle


def hhl_vector_state(circuit: Circuit, layout) -> StateVector:
    """Exact post-selected vector-register state (ancilla 1, phase register 0)."""
    final = schrodinger_run(circuit)
    post, _ = postselect(final, layout.ancilla, 1)
    nv = len(layout.vector_qubits)
    amps = post.amps.reshape(-1, 1 << nv)[0]
    return StateVector(amps).normalize()
