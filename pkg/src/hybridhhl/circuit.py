"""Gate/circuit data model and the TP1 / TP2 / NTP unitary families.

Every family circuit has the shape ``frame + center + reversed(frame)``:

* the frame holds only self-inverse gates (involutory single-qubit gates and
  CNOTs), and qubit 0 appears in frame CNOTs only as a control;
* the center is a tensor product of one correcting gate on qubit 0 and
  involutory gates ``R = A X A^dagger`` on the other qubits.

Hence ``U = F^-1 C F`` squares to ``U_c^2 (x) I`` and its spectrum is fixed by
the correcting gate: eigenphases {1/8, 3/8} shifted by 1/2 for odd parity of
the involutory factors.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np
from scipy.stats import unitary_group

SQ = "SQ"
CNOT = "CNOT"
FAMILIES = ("TP1", "TP2", "NTP")
MAX_DENSE_QUBITS = 14

# eigenphases of the correcting gate, in units of 1/8
UC_PHASE_EIGHTHS = (1, 3)
SPECTRUM_BITS = 3

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
I2 = np.eye(2, dtype=complex)


def u3_matrix(theta: float, phi: float, lam: float, gphase: float = 0.0) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    m = np.array(
        [[c, -np.exp(1j * lam) * s],
         [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=complex,
    )
    return np.exp(1j * gphase) * m


def u3_params(m: np.ndarray, atol: float = 1e-12) -> tuple[float, float, float, float]:
    """Inverse of :func:`u3_matrix`: ``(theta, phi, lam, gphase)`` for a 2x2 unitary."""
    m = np.asarray(m, dtype=complex)
    if np.abs(m.conj().T @ m - I2).max() > 1e-9:
        raise ValueError("matrix is not unitary")
    a00, a10 = abs(m[0, 0]), abs(m[1, 0])
    theta = 2.0 * np.arctan2(a10, a00)
    if a10 < atol:
        g = np.angle(m[0, 0])
        phi, lam = 0.0, float(np.angle(m[1, 1]) - g)
    elif a00 < atol:
        g = np.angle(-m[0, 1])
        lam, phi = 0.0, float(np.angle(m[1, 0]) - g)
    else:
        g = np.angle(m[0, 0])
        phi = float(np.angle(m[1, 0]) - g)
        lam = float(np.angle(-m[0, 1]) - g)
    return float(theta), phi, lam, float(g)


@dataclass(frozen=True)
class Gate:
    """One gate. ``qubits`` is ``(target,)`` for SQ and ``(control, target)`` for CNOT."""

    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == SQ:
            if len(self.qubits) != 1 or len(self.params) != 4:
                raise ValueError("SQ gate needs one qubit and (theta, phi, lam, gphase)")
        elif self.kind == CNOT:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"bad CNOT qubits {self.qubits}")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    @classmethod
    def sq(cls, target: int, matrix: np.ndarray) -> "Gate":
        return cls(SQ, (int(target),), u3_params(matrix))

    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        return cls(CNOT, (int(control), int(target)))

    @property
    def matrix(self) -> np.ndarray:
        if self.kind == SQ:
            return u3_matrix(*self.params)
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

    def inverse(self) -> "Gate":
        if self.kind == CNOT:
            return self
        th, ph, la, g = self.params
        return Gate(SQ, self.qubits, (-th, -la, -ph, -g))

    def remap(self, mapping: Sequence[int] | dict) -> "Gate":
        return Gate(self.kind, tuple(int(mapping[q]) for q in self.qubits), self.params)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    tags: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits or min(g.qubits) < 0:
                raise ValueError(f"gate {g} outside {self.n_qubits} qubits")

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        n = max(self.n_qubits, other.n_qubits)
        return Circuit(n, self.gates + other.gates, dict(self.tags))

    def inverse(self) -> "Circuit":
        return Circuit(self.n_qubits, tuple(g.inverse() for g in reversed(self.gates)), dict(self.tags))

    def widen(self, n_qubits: int, offset: int = 0) -> "Circuit":
        """Embed in ``n_qubits`` wires, shifting every index by ``offset``."""
        mapping = {q: q + offset for q in range(self.n_qubits)}
        return Circuit(n_qubits, tuple(g.remap(mapping) for g in self.gates), dict(self.tags))

    @property
    def sq_count(self) -> int:
        return sum(g.kind == SQ for g in self.gates)

    @property
    def cnot_count(self) -> int:
        return sum(g.kind == CNOT for g in self.gates)

    def depth(self) -> int:
        level = [0] * self.n_qubits
        for g in self.gates:
            d = max(level[q] for q in g.qubits) + 1
            for q in g.qubits:
                level[q] = d
        return max(level) if self.gates else 0

    def active_qubits(self) -> set[int]:
        return {q for g in self.gates for q in g.qubits}

    def stats(self) -> dict:
        return {"n": self.n_qubits, "depth": self.depth(), "gates": len(self.gates),
                "sq_gates": self.sq_count, "cnots": self.cnot_count}

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "gates": [{"kind": g.kind, "targets": list(g.qubits), "params": list(g.params)}
                      for g in self.gates],
            "tags": _jsonable(self.tags),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "Circuit":
        gates = tuple(Gate(d["kind"], tuple(d["targets"]), tuple(d.get("params", ())))
                      for d in data["gates"])
        return cls(int(data["n_qubits"]), gates, dict(data.get("tags", {})))

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


# ---------------------------------------------------------------- dense oracle

def _embed_1q(m: np.ndarray, q: int, n: int) -> np.ndarray:
    return np.kron(np.kron(np.eye(1 << (n - 1 - q)), m), np.eye(1 << q))


def _cnot_dense(c: int, t: int, n: int) -> np.ndarray:
    dim = 1 << n
    idx = np.arange(dim)
    src = np.where((idx >> c) & 1, idx ^ (1 << t), idx)
    out = np.zeros((dim, dim), dtype=complex)
    out[src, idx] = 1.0
    return out


def unitary_of(circuit: Circuit) -> np.ndarray:
    """Dense ordered gate product built from Kronecker embeddings."""
    n = circuit.n_qubits
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"{n} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}")
    u = np.eye(1 << n, dtype=complex)
    for g in circuit.gates:
        if g.kind == SQ:
            u = _embed_1q(g.matrix, g.qubits[0], n) @ u
        else:
            u = _cnot_dense(g.qubits[0], g.qubits[1], n) @ u
    return u


# ------------------------------------------------------------------- spectrum

@dataclass(frozen=True)
class Spectrum:
    """Distinct dyadic eigenphases ``k / 2**p_full`` with their eigenspace labels."""

    entries: tuple[tuple[Fraction, str], ...]
    p_full: int

    def __post_init__(self):
        for lam, _ in self.entries:
            scaled = lam * (1 << self.p_full)
            if scaled.denominator != 1 or not 0 < scaled < (1 << self.p_full):
                raise ValueError(f"eigenphase {lam} is not a nonzero {self.p_full}-bit dyadic")

    @property
    def phases(self) -> list[Fraction]:
        return [lam for lam, _ in self.entries]

    def bit_table(self, width: int | None = None) -> np.ndarray:
        """Rows are eigenphases, column j is binary-fraction digit j+1 (MSB first)."""
        w = self.p_full if width is None else width
        out = []
        for lam in self.phases:
            k = lam * (1 << w)
            if k.denominator != 1:
                raise ValueError(f"{lam} is not dyadic on {w} bits")
            k = int(k)
            out.append([(k >> (w - 1 - j)) & 1 for j in range(w)])
        return np.array(out, dtype=int)

    def to_dict(self) -> dict:
        return {"p_full": self.p_full,
                "entries": [[str(lam), label] for lam, label in self.entries]}


# ------------------------------------------------------------------- families

def _haar(rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(2, random_state=rng)


def random_involution(rng: np.random.Generator) -> np.ndarray:
    a = _haar(rng)
    return a @ X @ a.conj().T


def random_reflection(rng: np.random.Generator) -> np.ndarray:
    a = _haar(rng)
    return a @ Z @ a.conj().T


def correcting_diagonal() -> np.ndarray:
    return np.diag([np.exp(2j * np.pi * k / 8) for k in UC_PHASE_EIGHTHS])


def _family_layout(family: str, n: int, rng: np.random.Generator):
    """Return ``(frame, center, uc_matrix)`` gate lists for the family."""
    frame: list[Gate] = []
    center: list[Gate] = []
    delta = correcting_diagonal()
    if family == "TP1":
        v = _haar(rng)
        uc = v @ delta @ v.conj().T
        center.append(Gate.sq(0, uc))
        for q in range(1, n):
            center.append(Gate.sq(q, random_involution(rng)))
        return frame, center, uc

    vc = random_reflection(rng)
    uc = vc @ delta @ vc
    if family == "TP2":
        for a in range(0, n - 1, 2):
            b = a + 1
            frame.append(Gate.sq(a, vc if a == 0 else random_involution(rng)))
            frame.append(Gate.cnot(a, b))
            center.append(Gate.sq(a, delta) if a == 0 else Gate.sq(a, random_involution(rng)))
            center.append(Gate.sq(b, random_involution(rng)))
        if n % 2:
            center.append(Gate.sq(n - 1, random_involution(rng)))
    elif family == "NTP":
        frame.append(Gate.sq(0, vc))
        for q in range(1, n):
            frame.append(Gate.sq(q, random_involution(rng)))
        for q in range(n - 1):
            frame.append(Gate.cnot(q, q + 1))
        center.append(Gate.sq(0, delta))
        for q in range(1, n):
            center.append(Gate.sq(q, random_involution(rng)))
    else:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return frame, center, uc


def family_spectrum(n_vector_qubits: int) -> Spectrum:
    entries = []
    for c, k in enumerate(UC_PHASE_EIGHTHS):
        parities = (0,) if n_vector_qubits == 1 else (0, 1)
        for par in parities:
            lam = Fraction(k, 8) + Fraction(par, 2)
            lam -= int(lam)
            entries.append((lam, f"uc={c},parity={par}"))
    entries.sort()
    return Spectrum(tuple(entries), SPECTRUM_BITS)


def gen_family(family: str, n_vector_qubits: int, seed: int) -> tuple[Circuit, Spectrum]:
    """Random family operator on ``n_vector_qubits`` qubits with its exact spectrum."""
    family = family.upper()
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    n = int(n_vector_qubits)
    min_n = 1 if family == "TP1" else 2
    if n < min_n:
        raise ValueError(f"{family} needs at least {min_n} vector qubits, got {n}")
    rng = np.random.default_rng(seed)
    frame, center, uc = _family_layout(family, n, rng)
    gates = tuple(frame) + tuple(center) + tuple(reversed(frame))
    tags = {
        "family": family, "seed": int(seed), "n_vector_qubits": n,
        "uc_qubit": 0, "uc": list(u3_params(uc)),
        "frame_len": len(frame), "center_len": len(center),
    }
    return Circuit(n, gates, tags), family_spectrum(n)


def family_parts(circuit: Circuit) -> tuple[list[Gate], list[Gate]]:
    """Split a generated family circuit into (frame, center)."""
    try:
        f, c = circuit.tags["frame_len"], circuit.tags["center_len"]
    except KeyError as exc:
        raise ValueError("circuit was not produced by gen_family") from exc
    return list(circuit.gates[:f]), list(circuit.gates[f:f + c])


def uc_matrix(circuit: Circuit) -> np.ndarray:
    if "uc" not in circuit.tags:
        raise ValueError("circuit was not produced by gen_family")
    return u3_matrix(*circuit.tags["uc"])


# -------------------------------------------------------- controlled versions

def _phase(angle: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * angle)]).astype(complex)


def ry(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(angle: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])


def _split_phase(m: np.ndarray) -> tuple[float, np.ndarray]:
    """``m = e^{i alpha} s`` with ``det s = 1``."""
    alpha = float(np.angle(np.linalg.det(m))) / 2
    return alpha, m * np.exp(-1j * alpha)


def controlled_sq(m: np.ndarray, control: int, target: int,
                  control_phase: float = 0.0) -> tuple[list[Gate], float]:
    """Gates for controlled-``m`` plus the accumulated phase owed to the control.

    The returned phase (radians) must be applied as ``diag(1, e^{i phase})`` on
    the control; callers merge these so a controlled block emits one phase gate.
    """
    alpha, s = _split_phase(np.asarray(m, dtype=complex))
    phase = control_phase + alpha
    if np.abs(s - I2).max() <= 1e-12:
        return [], phase
    if np.abs(s + I2).max() <= 1e-12:
        return [], phase + np.pi
    if abs(np.trace(s)) < 1e-12:
        # s = -i * A X A^dagger: one CNOT in the eigenbasis of s
        w, vecs = np.linalg.eig(1j * s)
        order = np.argsort(-w.real)
        q = vecs[:, order]
        q, _ = np.linalg.qr(q)
        a = q @ H
        gates = [Gate.sq(target, a.conj().T), Gate.cnot(control, target), Gate.sq(target, a)]
        return gates, phase - np.pi / 2
    # general ZYZ: s = Rz(b) Ry(g) Rz(d) -> A X B X C with ABC = I
    th, ph, la, _ = u3_params(s)
    beta, gamma, delta = ph, th, la
    a_m = rz(beta) @ ry(gamma / 2)
    b_m = ry(-gamma / 2) @ rz(-(delta + beta) / 2)
    c_m = rz((delta - beta) / 2)
    check = rz(beta) @ ry(gamma) @ rz(delta)
    # absorb any residual sign from the ZYZ reconstruction into the control phase
    ratio = np.vdot(check.reshape(-1), s.reshape(-1)) / 2
    phase += float(np.angle(ratio))
    gates = [Gate.sq(target, c_m), Gate.cnot(control, target), Gate.sq(target, b_m),
             Gate.cnot(control, target), Gate.sq(target, a_m)]
    return gates, phase


T_GATE = _phase(np.pi / 4)


def toffoli(c1: int, c2: int, t: int) -> list[Gate]:
    """Six-CNOT Toffoli decomposition."""
    tdg = T_GATE.conj().T
    return [
        Gate.sq(t, H), Gate.cnot(c2, t), Gate.sq(t, tdg), Gate.cnot(c1, t),
        Gate.sq(t, T_GATE), Gate.cnot(c2, t), Gate.sq(t, tdg), Gate.cnot(c1, t),
        Gate.sq(c2, T_GATE), Gate.sq(t, T_GATE), Gate.sq(t, H), Gate.cnot(c1, c2),
        Gate.sq(c1, T_GATE), Gate.sq(c2, tdg), Gate.cnot(c1, c2),
    ]


def controlled_circuit(gates: Iterable[Gate], control: int, n_qubits: int,
                       extra_phase: float = 0.0) -> Circuit:
    """Gate-by-gate controlled version; one merged phase gate on the control."""
    out: list[Gate] = []
    phase = extra_phase
    for g in gates:
        if control in g.qubits:
            raise ValueError(f"control qubit {control} overlaps gate {g}")
        if g.kind == SQ:
            seq, phase = controlled_sq(g.matrix, control, g.qubits[0], phase)
            out.extend(seq)
        else:
            out.extend(toffoli(control, g.qubits[0], g.qubits[1]))
    phase = float(np.angle(np.exp(1j * phase)))
    if abs(phase) > 1e-12:
        out.append(Gate.sq(control, _phase(phase)))
    return Circuit(n_qubits, tuple(out))


def controlled_power(circuit: Circuit, s_exp: int, control: int,
                     n_qubits: int | None = None, extra_phase: float = 0.0) -> Circuit:
    """Controlled ``U^(2**s_exp)`` for a generated family circuit.

    ``extra_phase`` multiplies the controlled operator by ``e^{i extra_phase}``
    (used by the hybrid phase-bit correction).
    """
    if s_exp < 0:
        raise ValueError("s_exp must be >= 0")
    if "uc" not in circuit.tags:
        raise ValueError("controlled_power needs a circuit produced by gen_family")
    n_total = n_qubits if n_qubits is not None else max(circuit.n_qubits, control + 1)
    if control < circuit.n_qubits:
        raise ValueError(f"control qubit {control} overlaps the operator's qubits")
    if s_exp == 0:
        return controlled_circuit(circuit.gates, control, n_total, extra_phase)
    uc = uc_matrix(circuit)
    power = np.linalg.matrix_power(uc, 1 << s_exp)
    gate = Gate.sq(circuit.tags.get("uc_qubit", 0), power)
    return controlled_circuit([gate], control, n_total, extra_phase)


# ------------------------------------------------------------------ utilities

def simplify(circuit: Circuit) -> Circuit:
    """Merge runs of single-qubit gates, drop identities, cancel adjacent CNOT pairs."""
    out: list[Gate | None] = []
    last: dict[int, int] = {}  # qubit -> index in out of last gate touching it
    for g in circuit.gates:
        if g.kind == SQ:
            q = g.qubits[0]
            j = last.get(q)
            if j is not None and out[j] is not None and out[j].kind == SQ:
                merged = g.matrix @ out[j].matrix
                if np.abs(merged - merged[0, 0] * I2).max() <= 1e-12 and abs(abs(merged[0, 0]) - 1) < 1e-12:
                    out[j] = None
                    del last[q]
                    _restore_last(out, last, q)
                else:
                    out[j] = Gate.sq(q, merged)
                continue
            if _is_scalar(g.matrix):
                continue
            out.append(g)
            last[q] = len(out) - 1
        else:
            c, t = g.qubits
            jc, jt = last.get(c), last.get(t)
            if jc is not None and jc == jt and out[jc] is not None and out[jc].qubits == g.qubits:
                out[jc] = None
                del last[c], last[t]
                _restore_last(out, last, c)
                _restore_last(out, last, t)
                continue
            out.append(g)
            last[c] = last[t] = len(out) - 1
    gates = tuple(g for g in out if g is not None)
    return Circuit(circuit.n_qubits, gates, dict(circuit.tags))


def _is_scalar(m) -> bool:
    return np.abs(m - m[0, 0] * I2).max() <= 1e-12


def _restore_last(out: list, last: dict, q: int) -> None:
    for j in range(len(out) - 1, -1, -1):
        if out[j] is not None and q in out[j].qubits:
            last[q] = j
            return


def operator_schmidt_rank(u: np.ndarray, n_left: int, n_right: int, tol: float = 1e-9) -> int:
    """Operator-Schmidt rank of ``u`` across (high ``n_left`` | low ``n_right``) qubits."""
    dl, dr = 1 << n_left, 1 << n_right
    t = u.reshape(dl, dr, dl, dr).transpose(0, 2, 1, 3).reshape(dl * dl, dr * dr)
    s = np.linalg.svd(t, compute_uv=False)
    return int(np.sum(s > tol * s[0]))
