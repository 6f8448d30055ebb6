"""Shot sampling and Monte-Carlo Pauli/readout noise (digital error model)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..circuit import CNOT, Circuit
from ..qstate import ProbDist, StateVector
from ._kernels import apply_1q_cols, apply_cnot_cols, col_probs
from .schrodinger import ResourceError, max_qubits, run_gates

PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class NoiseModel:
    e1: float = 0.0   # Pauli error probability after each single-qubit gate
    e2: float = 0.0   # Pauli error probability after each CNOT
    er: float = 0.0   # independent readout flip probability per qubit
    seed: int = 0

    def __post_init__(self):
        for name in ("e1", "e2", "er"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ValueError(f"{name}={v} outside [0, 1)")

    @property
    def is_ideal(self) -> bool:
        return self.e1 == 0 and self.e2 == 0 and self.er == 0

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "NoiseModel":
        """From ``"e1,e2,er"``."""
        e1, e2, er = (float(x) for x in text.split(","))
        return cls(e1, e2, er, seed)


def apply_readout(probs: np.ndarray, er: float, n: int) -> np.ndarray:
    """Distribution after independent bit flips with probability ``er`` on every qubit."""
    if er == 0:
        return np.array(probs, dtype=float)
    t = np.array(probs, dtype=float).reshape([2] * n)
    for ax in range(n):
        t = (1 - er) * t + er * np.flip(t, axis=ax)
    return t.reshape(-1)


def sample(state: StateVector, shots: int, noise: NoiseModel | None = None,
           rng: np.random.Generator | int | None = None) -> ProbDist:
    """Empirical distribution of ``shots`` Z-basis measurements.

    Independent readout flips on every measured bit are statistically identical
    to multinomial sampling from the flip-convolved distribution, which is what
    is drawn here.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(rng)
    p = np.abs(state.amps) ** 2
    if noise is not None and noise.er > 0:
        p = apply_readout(p, noise.er, state.n_qubits)
    p = p / p.sum()
    counts = rng.multinomial(shots, p)
    return ProbDist(counts / shots)


def sample_counts(probs: np.ndarray, shots: int, rng) -> np.ndarray:
    rng = np.random.default_rng(rng)
    p = np.asarray(probs, dtype=float)
    return rng.multinomial(shots, p / p.sum())


def _trajectory_stream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def noisy_run(circuit: Circuit, initial: StateVector | None, noise: NoiseModel,
              trajectories: int, *, batch: int | None = None) -> ProbDist:
    """Outcome distribution averaged over Pauli-error trajectories, then readout-flipped.

    Trajectory ``t`` draws one uniform and one Pauli label per gate from its
    own stream ``(noise.seed, t)``; an error fires when the uniform falls below
    the gate's rate, so raising a rate only adds errors to a trajectory.
    Trajectories are simulated side by side as columns of one array.
    """
    if trajectories < 1:
        raise ValueError("trajectories must be >= 1")
    n = circuit.n_qubits
    if n > max_qubits():
        raise ResourceError(f"{n} qubits exceeds the state-vector cap of {max_qubits()}")
    gates = circuit.gates
    if initial is None:
        psi0 = np.zeros(1 << n, dtype=complex)
        psi0[0] = 1.0
    else:
        if initial.n_qubits != n:
            raise ValueError("initial state width mismatch")
        psi0 = initial.amps.copy()
    ideal_psi = psi0.copy()
    run_gates(ideal_psi, gates, n)
    ideal = np.abs(ideal_psi) ** 2
    if noise.e1 == 0 and noise.e2 == 0:
        return ProbDist(_normalize(apply_readout(ideal, noise.er, n)))

    is_cx = np.array([g.kind == CNOT for g in gates], dtype=bool)
    rates = np.where(is_cx, noise.e2, noise.e1)
    hits, labels = draw_errors(noise.seed, trajectories, rates, is_cx)
    dirty = np.flatnonzero(hits.any(axis=1))
    acc = (trajectories - dirty.size) * ideal
    if batch is None:
        batch = max(1, (1 << 22) >> n)
    # every trajectory follows the ideal run up to its first error, so batches
    # sorted by first error start from a shared ideal prefix state
    first = hits[dirty].argmax(axis=1)
    order = np.argsort(first, kind="stable")
    dirty, first = dirty[order], first[order]
    prefix, at = psi0.copy(), 0
    for lo in range(0, dirty.size, batch):
        rows = dirty[lo:lo + batch]
        g0 = int(first[lo])
        run_gates(prefix, gates[at:g0], n)
        at = g0
        acc += _run_batch(gates[g0:], prefix, n, hits[rows, g0:], labels[rows, g0:])
    acc /= trajectories
    return ProbDist(_normalize(apply_readout(acc, noise.er, n)))


def draw_errors(seed: int, trajectories: int, rates: np.ndarray, is_cx: np.ndarray):
    """Per-trajectory error masks and Pauli labels (1..3 single-qubit, 1..15 two-qubit)."""
    g = len(rates)
    hits = np.zeros((trajectories, g), dtype=bool)
    labels = np.zeros((trajectories, g), dtype=np.int8)
    for t in range(trajectories):
        rng = _trajectory_stream(seed, t)
        u = rng.random(g)
        w = rng.integers(0, 15, size=g)
        hits[t] = u < rates
        labels[t] = np.where(is_cx, 1 + w, 1 + w % 3)
    return hits, labels


_ALL = np.zeros(0, dtype=np.int64)


def _run_batch(gates, psi0, n, hits, labels) -> np.ndarray:
    b = hits.shape[0]
    psi = np.ascontiguousarray(np.repeat(psi0[:, None], b, axis=1))
    for i, g in enumerate(gates):
        if g.kind == CNOT:
            apply_cnot_cols(psi, g.qubits[0], g.qubits[1])
        else:
            m = g.matrix
            apply_1q_cols(psi, m[0, 0], m[0, 1], m[1, 0], m[1, 1], g.qubits[0], _ALL)
        cols = np.flatnonzero(hits[:, i])
        if cols.size == 0:
            continue
        for lab in np.unique(labels[cols, i]):
            sel = cols[labels[cols, i] == lab].astype(np.int64)
            _pauli(psi, g, int(lab), sel)
    return col_probs(psi)


def _pauli(psi, gate, which: int, cols) -> None:
    if gate.kind == CNOT:
        pc, pt = divmod(which, 4)
        pairs = ((pc, gate.qubits[0]), (pt, gate.qubits[1]))
    else:
        pairs = ((which, gate.qubits[0]),)
    for lab, q in pairs:
        if lab:
            m = PAULIS[lab]
            apply_1q_cols(psi, m[0, 0], m[0, 1], m[1, 0], m[1, 1], q, cols)


def _normalize(p: np.ndarray) -> np.ndarray:
    return p / p.sum()
