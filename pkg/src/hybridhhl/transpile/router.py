"""SABRE-style SWAP routing with randomized multi-restart search."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..circuit import CNOT, Circuit, Gate, simplify
from . import _sabre
from .topology import CouplingMap

EXTENDED_SET = 20


@dataclass(frozen=True)
class TranspileReport:
    routed: Circuit
    depth: int
    cnot_count: int
    sq_count: int
    restarts_used: int
    seed: int
    initial_layout: tuple[int, ...]   # logical qubit -> physical qubit before the circuit
    final_layout: tuple[int, ...]     # logical qubit -> physical qubit after it
    swaps: int = 0
    device: str = ""
    history: list = field(default_factory=list, repr=False, compare=False)

    def to_dict(self, include_circuit: bool = True) -> dict:
        d = {"device": self.device, "depth": self.depth, "cnot_count": self.cnot_count,
             "sq_count": self.sq_count, "swaps": self.swaps, "restarts_used": self.restarts_used,
             "seed": self.seed, "initial_layout": list(self.initial_layout),
             "final_layout": list(self.final_layout)}
        if include_circuit:
            d["routed"] = self.routed.to_dict()
        return d


class _Prepared:
    """Circuit skeleton and device arrays shared by every restart."""

    def __init__(self, circuit: Circuit, cmap: CouplingMap):
        self.circuit = circuit
        self.n = circuit.n_qubits
        self.n_phys = cmap.n_qubits
        gates = circuit.gates
        self.qa = np.array([g.qubits[0] for g in gates], dtype=np.int64)
        self.qb = np.array([g.qubits[1] if g.kind == CNOT else -1 for g in gates], dtype=np.int64)
        self.fwd = _sabre.build_dag(self.qa, self.qb, self.n)
        self.ra, self.rb = self.qa[::-1].copy(), self.qb[::-1].copy()
        self.bwd = _sabre.build_dag(self.ra, self.rb, self.n)
        self.dist = np.ascontiguousarray(cmap.distance_matrix())
        nbrs = cmap.neighbors()
        self.nbr_ptr = np.zeros(self.n_phys + 1, dtype=np.int64)
        self.nbr_ptr[1:] = np.cumsum([len(x) for x in nbrs])
        self.nbr_idx = np.array([q for x in nbrs for q in x], dtype=np.int64)
        self.adj = nbrs
        self.cap = len(gates) * (4 * self.n_phys + 2) + 16
        self._dummy = np.zeros(1, dtype=np.int64)

    def run(self, l2p, p2l, backward=False, emit=False):
        qa, qb = (self.ra, self.rb) if backward else (self.qa, self.qb)
        nxt_a, nxt_b, npred = self.bwd if backward else self.fwd
        if emit:
            ev = [np.empty(self.cap, dtype=np.int64) for _ in range(3)]
        else:
            ev = [self._dummy] * 3
        n_ev, depth, cnots, swaps = _sabre.sabre_pass(
            qa, qb, nxt_a, nxt_b, npred, l2p, p2l, self.dist, self.nbr_ptr, self.nbr_idx,
            EXTENDED_SET, emit, ev[0], ev[1], ev[2])
        if emit:
            ev = [a[:n_ev].copy() for a in ev]
        return int(depth), int(cnots), int(swaps), ev


def random_connected_layout(adj: list[list[int]], n_logical: int, rng: np.random.Generator) -> np.ndarray:
    """Physical positions for logical qubits 0..n-1 on a random connected region, then the rest."""
    n_phys = len(adj)
    start = int(rng.integers(n_phys))
    region = [start]
    seen = {start}
    frontier = [q for q in adj[start]]
    while len(region) < n_logical:
        j = int(rng.integers(len(frontier)))
        q = frontier.pop(j)
        if q in seen:
            continue
        seen.add(q)
        region.append(q)
        frontier.extend(x for x in adj[q] if x not in seen)
    region = list(rng.permutation(region))
    rest = [q for q in range(n_phys) if q not in seen]
    return np.array(region + list(rng.permutation(rest)), dtype=np.int64)


def _restart_seed(seed: int, r: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(r)]).generate_state(1)[0])


def _one_restart(prep: _Prepared, seed: int, r: int, emit: bool, fixed=None):
    rs = _restart_seed(seed, r)
    rng = np.random.default_rng(rs)
    _sabre.seed_rng(rs % (2**32))
    if fixed is None:
        l2p = random_connected_layout(prep.adj, prep.n, rng)
    else:
        rest = [q for q in range(prep.n_phys) if q not in set(fixed)]
        l2p = np.array(list(fixed) + rest, dtype=np.int64)
    p2l = np.empty_like(l2p)
    p2l[l2p] = np.arange(prep.n_phys)
    if fixed is None:
        # forward then backward pass to settle the layout; the final pass is the one kept
        prep.run(l2p, p2l)
        prep.run(l2p, p2l, backward=True)
    init = l2p.copy()
    depth, cnots, swaps, ev = prep.run(l2p, p2l, emit=emit)
    return depth, cnots, swaps, init, l2p.copy(), ev


def _assemble(prep: _Prepared, init: np.ndarray, events) -> Circuit:
    l2p = init.copy()
    p2l = np.empty_like(l2p)
    p2l[l2p] = np.arange(prep.n_phys)
    gates = prep.circuit.gates
    out: list[Gate] = []
    kind, ea, eb = events
    for k, a, b in zip(kind.tolist(), ea.tolist(), eb.tolist()):
        if k == 0:
            out.append(gates[a].remap(l2p))
        else:
            out += [Gate.cnot(a, b), Gate.cnot(b, a), Gate.cnot(a, b)]
            la, lb = p2l[a], p2l[b]
            p2l[a], p2l[b] = lb, la
            l2p[la], l2p[lb] = b, a
    return Circuit(prep.n_phys, tuple(out))


def route(circuit: Circuit, cmap: CouplingMap, restarts: int = 20, seed: int = 0,
          optimize: bool = True, initial_layout=None) -> TranspileReport:
    """Map ``circuit`` onto ``cmap``; the minimum-depth result over ``restarts`` placements wins.

    Ties break on CNOT count, then restart index. On a complete graph no SWAPs
    are needed and the identity placement is returned directly. A fixed
    ``initial_layout`` (logical -> physical) skips the placement search; only
    SWAP tie-breaking then varies between restarts.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    n = circuit.n_qubits
    if n > cmap.n_qubits:
        raise ValueError(f"circuit needs {n} qubits, device {cmap.name!r} has {cmap.n_qubits}")
    base = simplify(circuit) if optimize else circuit
    if initial_layout is not None:
        initial_layout = [int(q) for q in initial_layout]
        if len(initial_layout) != n or len(set(initial_layout)) != n or \
                not all(0 <= q < cmap.n_qubits for q in initial_layout):
            raise ValueError("initial_layout must place every logical qubit on a distinct device qubit")
    if initial_layout is None and (cmap.is_complete or n == 1 or base.cnot_count == 0):
        routed = base.widen(cmap.n_qubits)
        ident = tuple(range(cmap.n_qubits))
        return TranspileReport(routed, routed.depth(), routed.cnot_count, routed.sq_count, 1, seed,
                               ident, ident, 0, cmap.name)
    prep = _Prepared(base, cmap)
    best = None
    for r in range(restarts):
        depth, cnots, swaps, init, final, _ = _one_restart(prep, seed, r, emit=False, fixed=initial_layout)
        key = (depth, cnots, r)
        if best is None or key < best[0]:
            best = (key, swaps, init, final)
    (depth, cnots, r), swaps, init, final = best
    # replay the winner with event output
    d2, c2, s2, init2, final2, ev = _one_restart(prep, seed, r, emit=True, fixed=initial_layout)
    assert (d2, c2) == (depth, cnots)
    routed = _assemble(prep, init2, ev)
    routed = Circuit(routed.n_qubits, routed.gates, {"initial_layout": init2.tolist(),
                                                     "final_layout": final2.tolist(),
                                                     "device": cmap.name})
    return TranspileReport(routed, depth, cnots, routed.sq_count, restarts, seed,
                           tuple(int(x) for x in init2), tuple(int(x) for x in final2), swaps, cmap.name)


def route_stats(circuit: Circuit, cmap: CouplingMap, restarts: int = 20, seed: int = 0,
                optimize: bool = True, prepared: _Prepared | None = None) -> tuple[int, int]:
    """(depth, cnot_count) of the best restart, without assembling the routed circuit."""
    base = simplify(circuit) if optimize else circuit
    if cmap.is_complete or base.cnot_count == 0:
        return base.depth(), base.cnot_count
    prep = prepared or _Prepared(base, cmap)
    best = None
    for r in range(restarts):
        depth, cnots, *_ = _one_restart(prep, seed, r, emit=False)
        if best is None or (depth, cnots, r) < best:
            best = (depth, cnots, r)
    return best[0], best[1]


def layout_permutation_check(report: TranspileReport, circuit: Circuit, atol: float = 1e-9) -> bool:
    """True when the routed unitary equals the logical one up to the layouts (small widths only)."""
    from ..circuit import unitary_of
    n_phys = report.routed.n_qubits
    u_log = unitary_of(circuit.widen(n_phys))
    u_rt = unitary_of(report.routed)
    # layouts cover every device qubit, unused ones as idle logical wires
    p_in = _perm_matrix(report.initial_layout, n_phys)
    p_out = _perm_matrix(report.final_layout, n_phys)
    lhs = u_rt @ p_in
    rhs = p_out @ u_log
    # the phase of any global factor is irrelevant
    k = np.argmax(np.abs(rhs[:, 0]))
    ph = lhs[k, 0] / rhs[k, 0] if abs(rhs[k, 0]) > 1e-12 else 1.0
    return bool(np.allclose(lhs, ph * rhs, atol=atol))


def _perm_matrix(l2p, n):
    dim = 1 << n
    idx = np.arange(dim)
    out = np.zeros(dim, dtype=np.int64)
    for l, p in enumerate(l2p):
        out |= ((idx >> l) & 1) << p
    m = np.zeros((dim, dim))
    m[out, idx] = 1
    return m


def compact_routed(report: TranspileReport, n_logical: int) -> tuple[Circuit, list[int]]:
    """Routed circuit restricted to the device qubits it uses, plus where each
    logical qubit ends up in that smaller register."""
    routed = report.routed
    used = sorted(set(report.initial_layout[:n_logical]) | routed.active_qubits())
    idx = {q: i for i, q in enumerate(used)}
    small = Circuit(len(used), tuple(g.remap(idx) for g in routed.gates))
    return small, [idx[q] for q in report.final_layout[:n_logical]]
