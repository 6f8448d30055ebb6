"""Schrödinger–Feynman simulation: cut the register in two and sum Schmidt branches.

Each CNOT crossing the cut is replaced by its operator-Schmidt terms
``|0><0| (x) I`` and ``|1><1| (x) X``; a branch fixes one term per crossing
CNOT, so ``k`` crossing gates give ``2**k`` pairs of independent half-width
simulations.
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..circuit import CNOT, Circuit
from ..qstate import StateVector
from .schrodinger import ResourceError, apply_1q, apply_cnot

DEFAULT_MAX_CUT = 12
EXHAUSTIVE_LIMIT = 12

_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_I = np.eye(2, dtype=complex)


def max_cut() -> int:
    return int(os.environ.get("HHLSIM_MAX_CUT", DEFAULT_MAX_CUT))


@dataclass(frozen=True)
class CutPlan:
    partition: tuple[tuple[int, ...], tuple[int, ...]]  # (larger half, smaller half)
    cross_gates: tuple[int, ...]

    def __post_init__(self):
        big, small = self.partition
        if len(small) > len(big):
            raise ValueError("partition must list the larger half first")
        if set(big) & set(small):
            raise ValueError("halves overlap")

    @property
    def k(self) -> int:
        return len(self.cross_gates)

    @property
    def n_tilde(self) -> int:
        return len(self.partition[1])

    def to_dict(self) -> dict:
        return {"partition": [list(self.partition[0]), list(self.partition[1])],
                "cross_gates": list(self.cross_gates), "k": self.k}


def crossing_gates(circuit: Circuit, small: set[int]) -> tuple[int, ...]:
    return tuple(i for i, g in enumerate(circuit.gates)
                 if g.kind == CNOT and ((g.qubits[0] in small) != (g.qubits[1] in small)))


def plan_from_partition(circuit: Circuit, small) -> CutPlan:
    small = tuple(sorted(int(q) for q in small))
    big = tuple(q for q in range(circuit.n_qubits) if q not in small)
    if len(small) > len(big):
        big, small = small, big
    cross = crossing_gates(circuit, set(small))
    return CutPlan((big, small), cross)


def make_cut_plan(circuit: Circuit, n_tilde: int | None = None) -> CutPlan:
    """Balanced cut minimizing crossing CNOTs.

    Exhaustive over all bipartitions for ``n <= 12``; otherwise the best
    contiguous (cyclic) window of qubit indices.
    """
    n = circuit.n_qubits
    if n < 2:
        raise ValueError("need at least two qubits to cut")
    size = n // 2 if n_tilde is None else int(n_tilde)
    if not 1 <= size <= n // 2:
        raise ValueError(f"n_tilde must be in [1, {n // 2}]")
    pairs = [g.qubits for g in circuit.gates if g.kind == CNOT]

    def cost(small: set[int]) -> int:
        return sum((c in small) != (t in small) for c, t in pairs)

    if n <= EXHAUSTIVE_LIMIT:
        candidates = itertools.combinations(range(n), size)
    else:
        candidates = (tuple(sorted((s + j) % n for j in range(size))) for s in range(n))
    best = min(candidates, key=lambda c: (cost(set(c)), c))
    return plan_from_partition(circuit, best)


def _factor_product(psi: np.ndarray, n: int, big, small) -> tuple[np.ndarray, np.ndarray]:
    axes = [n - 1 - q for q in reversed(big)] + [n - 1 - q for q in reversed(small)]
    m = psi.reshape([2] * n).transpose(axes).reshape(1 << len(big), 1 << len(small))
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    if len(s) > 1 and s[1] > 1e-10 * max(s[0], 1e-300):
        raise ValueError("initial state is entangled across the cut")
    return u[:, 0] * s[0], vh[0].copy()


def _compile_half(circuit: Circuit, plan: CutPlan, half: tuple[int, ...]):
    """Per-half op list; crossing CNOTs become ('cut', index, role, local qubit)."""
    local = {q: i for i, q in enumerate(half)}
    cut_index = {g: i for i, g in enumerate(plan.cross_gates)}
    ops = []
    for gi, g in enumerate(circuit.gates):
        if gi in cut_index:
            c, t = g.qubits
            if c in local:
                ops.append(("cut", cut_index[gi], "control", local[c]))
            elif t in local:
                ops.append(("cut", cut_index[gi], "target", local[t]))
            continue
        if not all(q in local for q in g.qubits):
            if any(q in local for q in g.qubits):
                raise ValueError(f"gate {gi} straddles the cut but is not a CNOT")
            continue
        if g.kind == CNOT:
            ops.append(("cx", local[g.qubits[0]], local[g.qubits[1]]))
        else:
            ops.append(("m", local[g.qubits[0]], g.matrix))
    return ops


def _run_half(ops, psi0: np.ndarray, n: int, bits: tuple[int, ...]) -> np.ndarray:
    psi = psi0.copy()
    for op in ops:
        if op[0] == "m":
            apply_1q(psi, op[2], op[1], n)
        elif op[0] == "cx":
            apply_cnot(psi, op[1], op[2], n)
        else:
            _, idx, role, q = op
            if role == "control":
                apply_1q(psi, _P1 if bits[idx] else _P0, q, n)
            elif bits[idx]:
                apply_1q(psi, _X, q, n)
    return psi


def _tree_sum(terms: list[np.ndarray]) -> np.ndarray:
    while len(terms) > 1:
        nxt = [terms[i] + terms[i + 1] for i in range(0, len(terms) - 1, 2)]
        if len(terms) % 2:
            nxt.append(terms[-1])
        terms = nxt
    return terms[0]


def sfa_run(circuit: Circuit, plan: CutPlan | None = None, initial: StateVector | None = None,
            *, n_jobs: int = 1, return_info: bool = False):
    """Final state via ``2**k`` branch pairs of half-width simulations."""
    n = circuit.n_qubits
    plan = plan or make_cut_plan(circuit)
    big, small = plan.partition
    if sorted(big + small) != list(range(n)):
        raise ValueError("cut plan does not cover the circuit's qubits")
    if set(plan.cross_gates) != set(crossing_gates(circuit, set(small))):
        raise ValueError("cut plan's crossing gates do not match the circuit")
    k = plan.k
    if k > max_cut():
        raise ResourceError(f"{k} crossing CNOTs exceeds the branch cap of {max_cut()}")
    if initial is None:
        psi_big = np.zeros(1 << len(big), dtype=complex)
        psi_big[0] = 1.0
        psi_small = np.zeros(1 << len(small), dtype=complex)
        psi_small[0] = 1.0
    else:
        if initial.n_qubits != n:
            raise ValueError("initial state width mismatch")
        psi_big, psi_small = _factor_product(initial.amps, n, big, small)
    ops_big = _compile_half(circuit, plan, big)
    ops_small = _compile_half(circuit, plan, small)
    branches = list(itertools.product((0, 1), repeat=k))

    def one(bits):
        a = _run_half(ops_big, psi_big, len(big), bits)
        b = _run_half(ops_small, psi_small, len(small), bits)
        return np.multiply.outer(a, b)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as ex:
            terms = list(ex.map(one, branches))
        total = _tree_sum(terms)
    else:
        total = _chunked_tree_sum(one, branches)
    # rows index the big half, columns the small half, each MSB-first over local qubits
    order = list(reversed(big)) + list(reversed(small))
    t = total.reshape([2] * n)
    perm = [order.index(q) for q in range(n - 1, -1, -1)]
    psi = np.ascontiguousarray(t.transpose(perm)).reshape(-1)
    out = StateVector(psi)
    if return_info:
        return out, {"branches": len(branches), "k": k, "n_tilde": len(small)}
    return out


def _chunked_tree_sum(fn, items) -> np.ndarray:
    """Pairwise tree reduction without holding every term in memory."""
    def rec(lo, hi):
        if hi - lo == 1:
            return fn(items[lo])
        mid = lo + (hi - lo + 1) // 2
        return rec(lo, mid) + rec(mid, hi)
    return rec(0, len(items))


class SFABackend:
    name = "sfa"

    def __init__(self, plan: CutPlan | None = None, n_jobs: int = 1):
        self.plan = plan
        self.n_jobs = n_jobs

    def run(self, circuit: Circuit, initial: StateVector | None = None) -> StateVector:
        return sfa_run(circuit, self.plan, initial, n_jobs=self.n_jobs)

    def max_width(self) -> int:
        from .schrodinger import max_qubits
        return 2 * max_qubits()
