"""Digital error model: fidelity as a product of readout, 1q-gate and 2q-gate survival."""
from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class DemFidelity:
    f_r: float
    f_1qg: float
    f_2qg: float
    f_xeb: float
    counts: dict

    def to_dict(self) -> dict:
        return asdict(self)


def dem_predict(counts: dict, rates) -> DemFidelity:
    """``counts`` needs n, sq_gates, cnots; ``rates`` is a NoiseModel or a dict with e1, e2, er."""
    get = (lambda k: rates[k]) if isinstance(rates, dict) else (lambda k: getattr(rates, k))
    e1, e2, er = (float(get(k)) for k in ("e1", "e2", "er"))
    for name, v in (("e1", e1), ("e2", e2), ("er", er)):
        if not 0.0 <= v < 1.0:
            raise ValueError(f"{name}={v} outside [0, 1)")
    n, sq, cx = int(counts["n"]), int(counts["sq_gates"]), int(counts["cnots"])
    f_r = (1.0 - er) ** n
    f_1 = (1.0 - e1) ** sq
    f_2 = (1.0 - e2) ** cx
    return DemFidelity(f_r, f_1, f_2, f_r * f_1 * f_2, {"n": n, "sq_gates": sq, "cnots": cx})


def circuit_counts(circuit) -> dict:
    return {"n": circuit.n_qubits, "sq_gates": circuit.sq_count, "cnots": circuit.cnot_count}
