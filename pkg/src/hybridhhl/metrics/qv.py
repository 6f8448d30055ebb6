"""Quantum volume by the heavy-output protocol on square random circuits."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import unitary_group

from ..circuit import Circuit, Gate
from ..qstate import marginal
from ..sim.noise import NoiseModel, noisy_run
from ..sim.schrodinger import schrodinger_run
from ..transpile.router import compact_routed, route
from ..transpile.topology import CouplingMap, all_to_all

THRESHOLD = 2.0 / 3.0
MAX_WIDTH = 8


@dataclass
class QVResult:
    v_q: int
    widths: dict = field(default_factory=dict)   # m -> {"mean", "sigma", "passed"}

    def to_dict(self) -> dict:
        return {"v_q": self.v_q, "widths": {str(k): v for k, v in self.widths.items()}}


def _random_block(a: int, b: int, rng) -> list[Gate]:
    """Random two-qubit block: local layers around three CNOTs."""
    out = []
    for k in range(4):
        out.append(Gate.sq(a, unitary_group.rvs(2, random_state=rng)))
        out.append(Gate.sq(b, unitary_group.rvs(2, random_state=rng)))
        if k < 3:
            out.append(Gate.cnot(a, b) if k % 2 == 0 else Gate.cnot(b, a))
    return out


def qv_circuit(m: int, rng) -> Circuit:
    """Width-m, depth-m model circuit: each layer pairs a random permutation of the qubits."""
    rng = np.random.default_rng(rng)
    gates = []
    for _ in range(m):
        perm = rng.permutation(m)
        for i in range(0, m - 1, 2):
            gates += _random_block(int(perm[i]), int(perm[i + 1]), rng)
    return Circuit(m, tuple(gates), {"kind": "qv", "width": m})


def heavy_outputs(probs: np.ndarray) -> np.ndarray:
    return probs > np.median(probs)


def heavy_output_probability(circuit: Circuit, cmap: CouplingMap, noise: NoiseModel,
                             trajectories: int, seed: int, restarts: int = 5) -> float:
    m = circuit.n_qubits
    ideal = np.abs(schrodinger_run(circuit).amps) ** 2
    heavy = heavy_outputs(ideal)
    rep = route(circuit, cmap, restarts=restarts, seed=seed)
    small, where = compact_routed(rep, m)
    dist = noisy_run(small, None, NoiseModel(noise.e1, noise.e2, noise.er, seed), trajectories)
    out = marginal(dist, small.n_qubits, where)
    return float(out.probs[heavy].sum())


def quantum_volume(cmap: CouplingMap | None, rates: NoiseModel | None, max_width: int,
                   n_circuits: int = 100, trajectories: int = 200, seed: int = 0,
                   restarts: int = 5) -> QVResult:
    """V_Q = 2**m for the largest tested width m whose mean heavy-output
    probability exceeds 2/3 by two standard errors.

    Circuit ``j`` at width ``m`` and its error draws depend only on
    ``(seed, m, j)``, so runs at different error rates are paired. Rates
    default to the map's annotations.
    """
    if not 2 <= max_width <= MAX_WIDTH:
        raise ValueError(f"max_width must be in 2..{MAX_WIDTH}")
    cmap = cmap or all_to_all(max_width)
    if max_width > cmap.n_qubits:
        raise ValueError("max_width exceeds the device")
    if rates is None:
        rates = NoiseModel(cmap.e1 or 0.0, cmap.e2 or 0.0, cmap.er or 0.0, seed)
    result = QVResult(1)
    for m in range(2, max_width + 1):
        hs = []
        for j in range(n_circuits):
            s = int(np.random.SeedSequence([int(seed), m, j]).generate_state(1)[0])
            circ = qv_circuit(m, s)
            hs.append(heavy_output_probability(circ, cmap, rates, trajectories, s, restarts))
        mean = float(np.mean(hs))
        sigma = float(np.sqrt(mean * (1 - mean) / n_circuits))
        passed = mean - 2 * sigma > THRESHOLD
        result.widths[m] = {"mean": mean, "sigma": sigma, "passed": bool(passed)}
        if passed:
            result.v_q = 1 << m
    return result
