"""Full and hybrid HHL circuits for ``(log U / 2 pi i) x = b`` plus the classical oracle."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg import schur

from . import circuit as qc
from .circuit import Circuit, Gate, Spectrum
from .qstate import DegenerateStateError, ProbDist, StateVector, marginal, postselect
from .sim.schrodinger import SchrodingerBackend, run_gates

SINGULAR_TOL = 1e-10


class SingularSystemError(ValueError):
    """An eigenphase is indistinguishable from zero."""


# ------------------------------------------------------------- classical oracle

def eigenphases(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenphases in [0, 1) and an orthonormal eigenbasis of a unitary matrix."""
    u = np.asarray(u, dtype=complex)
    if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-8):
        raise ValueError("matrix is not unitary within 1e-8")
    t, z = schur(u, output="complex")
    lam = np.mod(np.angle(np.diag(t)) / (2 * np.pi), 1.0)
    return lam, z


def _center_eigvec(m: np.ndarray, phase_eighths: int) -> np.ndarray:
    w, v = np.linalg.eig(m)
    k = int(np.argmin(np.abs(w - np.exp(2j * np.pi * phase_eighths / 8))))
    return v[:, k] / np.linalg.norm(v[:, k])


def _structured_solve(op: Circuit, b: np.ndarray) -> np.ndarray:
    """Spectral-projector solve using the generated frame/center structure."""
    n = op.n_qubits
    frame, center = qc.family_parts(op)
    inv_frame = list(reversed(frame))
    psi = run_gates(b.copy(), frame, n)  # into the center's eigenbasis
    uc_gate = next(g for g in center if g.qubits[0] == op.tags.get("uc_qubit", 0))
    involutions = [g for g in center if g is not uc_gate]
    flipped = run_gates(psi.copy(), involutions, n)
    out = np.zeros_like(psi)
    for c, k in enumerate(qc.UC_PHASE_EIGHTHS):
        vec = _center_eigvec(uc_gate.matrix, k)
        proj = np.outer(vec, vec.conj())
        for parity in ((0,) if not involutions else (0, 1)):
            sign = 1.0 if parity == 0 else -1.0
            part = 0.5 * (psi + sign * flipped) if involutions else psi.copy()
            qc_apply = part.reshape(1 << (n - 1), 2)
            part = (qc_apply @ proj.T).reshape(-1)
            lam = (Fraction(k, 8) + Fraction(parity, 2)) % 1
            out += part / float(lam)
    return run_gates(out, inv_frame, n)


def classical_solve(operator: np.ndarray | Circuit, b: StateVector) -> StateVector:
    """Normalized ``(log U / 2 pi i)^{-1} b`` with every eigenphase taken in (0, 1).

    ``operator`` is either a dense unitary (solved by Schur decomposition) or a
    circuit from :func:`gen_family` (solved through its known spectral
    projectors, usable well past dense sizes).
    """
    if isinstance(operator, Circuit):
        if operator.n_qubits != b.n_qubits:
            raise ValueError("operator and b have different widths")
        x = _structured_solve(operator, b.amps.copy())
        return StateVector(x).normalize()
    lam, z = eigenphases(operator)
    if z.shape[0] != b.amps.size:
        raise ValueError("operator and b have different dimensions")
    near0 = np.minimum(lam, 1.0 - lam)
    if np.any(near0 < SINGULAR_TOL):
        raise SingularSystemError("eigenphase 0 makes log U singular")
    coeff = z.conj().T @ b.amps
    return StateVector(z @ (coeff / lam)).normalize()


# ------------------------------------------------------------------ layout

@dataclass
class HHLLayout:
    ancilla: int
    phase_qubits: tuple[int, ...]      # phase_qubits[i] holds bit i (LSB first) of the register value
    vector_qubits: tuple[int, ...]
    p: int
    fixed_bits: dict[int, int]         # binary-fraction digit (1 = MSB) -> classical value
    rotation_constant: float
    p_full: int
    operator: Circuit | None = field(default=None, repr=False)

    def __post_init__(self):
        regs = [self.ancilla, *self.phase_qubits, *self.vector_qubits]
        if len(set(regs)) != len(regs):
            raise ValueError("registers overlap")
        if len(self.phase_qubits) != self.p:
            raise ValueError("phase register size does not match p")
        if any(pos <= self.p for pos in self.fixed_bits):
            raise ValueError("fixed bits overlap active phase bits")

    @property
    def n_qubits(self) -> int:
        return 1 + self.p + len(self.vector_qubits)

    @property
    def fixed_value(self) -> Fraction:
        return sum((Fraction(bit, 1 << pos) for pos, bit in self.fixed_bits.items()), Fraction(0))

    def register_phase(self, m: int) -> Fraction:
        """Eigenphase encoded by phase-register value ``m`` with fixed bits reinserted."""
        return Fraction(m, 1 << self.p) + self.fixed_value

    def to_dict(self) -> dict:
        return {
            "ancilla": self.ancilla, "phase_qubits": list(self.phase_qubits),
            "vector_qubits": list(self.vector_qubits), "p": self.p,
            "fixed_bits": {str(k): v for k, v in self.fixed_bits.items()},
            "rotation_constant": self.rotation_constant, "p_full": self.p_full,
            "phase_bit_order": "lsb_first",
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HHLLayout":
        op = data.get("operator")
        return cls(int(data["ancilla"]), tuple(data["phase_qubits"]), tuple(data["vector_qubits"]),
                   int(data["p"]), {int(k): int(v) for k, v in data["fixed_bits"].items()},
                   float(data["rotation_constant"]), int(data["p_full"]),
                   None if op is None else Circuit.from_dict(op))


@dataclass
class SolutionReport:
    solution_state: StateVector
    success_prob: float
    oracle_state: StateVector
    fidelity: float
    phase_register_clean: float = 1.0

    def to_dict(self) -> dict:
        return {
            "success_prob": self.success_prob, "fidelity": self.fidelity,
            "phase_register_clean": self.phase_register_clean,
            "solution_state": json.loads(self.solution_state.to_json()),
            "oracle_state": json.loads(self.oracle_state.to_json()),
        }


def plan_phase_bits(spectrum: Spectrum, p: int | None, hybrid: bool) -> tuple[int, dict[int, int]]:
    """Active width and classically fixed trailing bits for the phase register."""
    table = spectrum.bit_table()
    pf = spectrum.p_full
    if not hybrid:
        p = pf if p is None else int(p)
        if p < 1 or p < pf:
            raise ValueError(f"p={p} too small to separate a {pf}-bit spectrum")
        return p, {}
    const = [j for j in range(pf) if np.all(table[:, j] == table[0, j])]
    trailing = 0
    for j in range(pf - 1, -1, -1):
        if j not in const:
            break
        trailing += 1
    if trailing == 0:
        raise ValueError("hybrid reduction needs a constant trailing phase bit; none exists")
    min_p = pf - trailing
    p = min_p if p is None else int(p)
    if p < max(1, min_p):
        raise ValueError(f"p={p} too small: {min_p} phase bits vary across the spectrum")
    if p >= pf:
        raise ValueError(f"hybrid p={p} leaves no bit to fix for a {pf}-bit spectrum")
    fixed = {j + 1: int(table[0, j]) for j in range(p, pf)}
    return p, fixed


# ---------------------------------------------------------------- subcircuits

def controlled_phase(angle: float, c: int, t: int) -> list[Gate]:
    half = angle / 2
    return [Gate.sq(c, qc._phase(half)), Gate.cnot(c, t), Gate.sq(t, qc._phase(-half)),
            Gate.cnot(c, t), Gate.sq(t, qc._phase(half))]


def qft_swapless(qubits: Sequence[int]) -> list[Gate]:
    """QFT without the final swaps: ``qubits[l]`` ends holding ``0.j_l ... j_p``."""
    out: list[Gate] = []
    p = len(qubits)
    for l in range(p):
        out.append(Gate.sq(qubits[l], qc.H))
        for k in range(l + 1, p):
            out.extend(controlled_phase(2 * np.pi / (1 << (k - l + 1)), qubits[k], qubits[l]))
    return out


def inverse_gates(gates: Sequence[Gate]) -> list[Gate]:
    return [g.inverse() for g in reversed(gates)]


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def multiplexed_ry(angles: Sequence[float], controls: Sequence[int], target: int) -> list[Gate]:
    """Uniformly controlled RY: ``RY(angles[m])`` on ``target`` when controls read ``m``.

    ``controls[i]`` carries bit i of ``m``. Uses 2^k rotations and 2^k CNOTs.
    """
    k = len(controls)
    angles = np.asarray(angles, dtype=float)
    if angles.size != 1 << k:
        raise ValueError("need 2**len(controls) angles")
    if k == 0:
        return [Gate.sq(target, qc.ry(angles[0]))]
    size = 1 << k
    gray = [_gray(i) for i in range(size)]
    signs = np.array([[(-1) ** bin(j & g).count("1") for g in gray] for j in range(size)], dtype=float)
    alpha = signs.T @ angles / size
    out: list[Gate] = []
    for i in range(size):
        out.append(Gate.sq(target, qc.ry(alpha[i])))
        flip = gray[i] ^ gray[(i + 1) % size]
        out.append(Gate.cnot(controls[flip.bit_length() - 1], target))
    return out


def _qpe_gates(op: Circuit, layout: HHLLayout, n: int) -> tuple[list[Gate], int]:
    """QPE gates and the length of its controlled-power section."""
    p = layout.p
    f = layout.fixed_value
    gates: list[Gate] = [Gate.sq(q, qc.H) for q in layout.phase_qubits]
    powers: list[Gate] = []
    for i, q in enumerate(layout.phase_qubits):
        s_exp = p - 1 - i
        correction = -2 * np.pi * float(f * (1 << s_exp))
        powers.extend(qc.controlled_power(op, s_exp, q, n, extra_phase=correction).gates)
    gates.extend(powers)
    msb_first = list(reversed(layout.phase_qubits))
    gates.extend(inverse_gates(qft_swapless(msb_first)))
    return gates, len(powers)


def aqe_angles(layout: HHLLayout) -> np.ndarray:
    c = layout.rotation_constant
    out = np.zeros(1 << layout.p)
    for m in range(1 << layout.p):
        lam = float(layout.register_phase(m))
        if lam > 0:
            out[m] = 2 * np.arcsin(min(1.0, c / lam))
    return out


def build_hhl(op: Circuit, spectrum: Spectrum, p: int | None = None,
              hybrid: bool = False, rotation_constant: float | None = None) -> tuple[Circuit, HHLLayout]:
    """HHL circuit (QPE, ancilla encoding, inverse QPE) acting on ``|b> = |0>``.

    With ``hybrid`` the trailing eigenphase bits shared by the whole spectrum are
    fixed classically and only ``p`` phase qubits remain.
    """
    p, fixed = plan_phase_bits(spectrum, p, hybrid)
    nv = op.n_qubits
    c_rot = float(min(spectrum.phases)) if rotation_constant is None else float(rotation_constant)
    if not 0 < c_rot <= float(min(spectrum.phases)) + 1e-15:
        raise ValueError("rotation constant must lie in (0, min eigenphase]")
    layout = HHLLayout(
        ancilla=nv + p,
        phase_qubits=tuple(range(nv, nv + p)),
        vector_qubits=tuple(range(nv)),
        p=p, fixed_bits=fixed, rotation_constant=c_rot,
        p_full=spectrum.p_full, operator=op,
    )
    for lam in spectrum.phases:
        scaled = (lam - layout.fixed_value) * (1 << p)
        if scaled.denominator != 1:
            raise ValueError(f"eigenphase {lam} is not resolved by {p} phase bits")
    n = layout.n_qubits
    qpe, n_power = _qpe_gates(op, layout, n)
    aqe = multiplexed_ry(aqe_angles(layout), layout.phase_qubits, layout.ancilla)
    gates = qpe + aqe + inverse_gates(qpe)
    tags = {
        "kind": "hhl", "hybrid": bool(hybrid), "p": p,
        "family": op.tags.get("family"), "seed": op.tags.get("seed"),
        "qpe_gates": len(qpe), "qpe_power_gates": n_power, "aqe_gates": len(aqe),
        "layout": layout.to_dict(),
    }
    return Circuit(n, tuple(gates), tags), layout


# ------------------------------------------------------------------- running

def _extract_vector_state(state: StateVector, layout: HHLLayout) -> tuple[StateVector, float, float]:
    """Post-select ancilla = 1 and phase register = 0; returns (state, P(anc=1), P(phase=0 | anc=1))."""
    try:
        post, success = postselect(state, layout.ancilla, 1)
    except DegenerateStateError as exc:
        raise DegenerateStateError("ancilla success probability below 1e-12") from exc
    nv = len(layout.vector_qubits)
    amps = post.amps.reshape(1 << layout.p, 1 << nv)
    clean = float(np.vdot(amps[0], amps[0]).real)
    return StateVector(amps[0]).normalize(), success, clean


def run_hhl(circuit: Circuit, layout: HHLLayout, backend=None, *, check_clean: bool = True,
            tol: float = 1e-9) -> SolutionReport:
    backend = backend or SchrodingerBackend()
    if layout.n_qubits > backend.max_width():
        raise ValueError("backend cannot hold the HHL register")
    final = backend.run(circuit)
    vec, success, clean = _extract_vector_state(final, layout)
    if success < 1e-12:
        raise DegenerateStateError("ancilla success probability below 1e-12")
    if check_clean and clean < 1 - tol:
        raise AssertionError(f"phase register not restored: P(0...0) = {clean:.3e}")
    if layout.operator is None:
        raise ValueError("layout carries no operator for the oracle comparison")
    oracle = classical_solve(layout.operator, StateVector.basis(len(layout.vector_qubits)))
    return SolutionReport(vec, success, oracle, vec.fidelity(oracle), clean)


# ---------------------------------------------------------------- QPE alone

def eigenvector(op: Circuit, label: str) -> StateVector:
    """Eigenvector of a family operator for a spectrum label ``uc=c,parity=p``."""
    parts = dict(item.split("=") for item in label.split(","))
    c, parity = int(parts["uc"]), int(parts["parity"])
    n = op.n_qubits
    frame, center = qc.family_parts(op)
    uc_q = op.tags.get("uc_qubit", 0)
    factors = [None] * n
    flipped = False
    for g in center:
        q = g.qubits[0]
        if q == uc_q:
            factors[q] = _center_eigvec(g.matrix, qc.UC_PHASE_EIGHTHS[c])
        else:
            w, v = np.linalg.eigh(g.matrix)  # involution: eigenvalues -1, +1
            want_minus = parity == 1 and not flipped
            flipped = flipped or want_minus
            factors[q] = v[:, 0] if want_minus else v[:, 1]
    if parity == 1 and not flipped:
        raise ValueError(f"label {label!r} has no eigenvector for this operator")
    psi = StateVector.from_product(factors).amps.copy()
    return StateVector(run_gates(psi, list(reversed(frame)), n))


def qpe_only(op: Circuit, spectrum: Spectrum, p: int, eigen_label: str,
             backend=None) -> ProbDist:
    """Phase-register distribution after QPE on the eigenvector ``eigen_label``."""
    if p < 1:
        raise ValueError("p too small: need at least one phase qubit")
    lam = next((l for l, lab in spectrum.entries if lab == eigen_label), None)
    if lam is None:
        raise ValueError(f"unknown eigen label {eigen_label!r}")
    if (lam * (1 << p)).denominator != 1:
        raise ValueError(f"eigenphase {lam} is not dyadic at width {p}")
    nv = op.n_qubits
    n = nv + p
    layout = HHLLayout(ancilla=n, phase_qubits=tuple(range(nv, n)), vector_qubits=tuple(range(nv)),
                       p=p, fixed_bits={}, rotation_constant=1.0, p_full=spectrum.p_full)
    gates, _ = _qpe_gates(op, layout, n)
    vec = eigenvector(op, eigen_label)
    init = np.kron(StateVector.basis(p).amps, vec.amps)
    backend = backend or SchrodingerBackend()
    out = backend.run(Circuit(n, tuple(gates)), StateVector(init))
    return marginal(out.probabilities(), n, list(layout.phase_qubits))
