"""Cross-entropy benchmarking on ancilla-filtered outcome distributions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..qstate import DegenerateStateError, ProbDist


class DegenerateSpectrumError(ValueError):
    """Every ideal distribution is uniform, so the XEB denominator vanishes."""


def filter_ancilla(raw: ProbDist, layout_or_ancilla, n_qubits: int | None = None) -> ProbDist:
    """Keep outcomes with the ancilla measured as 1 and renormalize.

    The result is over the other ``n - 1`` qubits, in ascending index order.
    """
    anc = getattr(layout_or_ancilla, "ancilla", layout_or_ancilla)
    n = n_qubits or int(round(np.log2(raw.dim)))
    if raw.dim != 1 << n:
        raise ValueError("distribution size is not a power of two")
    if not 0 <= anc < n:
        raise ValueError(f"ancilla {anc} out of range for {n} qubits")
    kept = raw.probs.reshape(1 << (n - 1 - anc), 2, 1 << anc)[:, 1, :].reshape(-1)
    mass = kept.sum()
    if mass <= 0:
        raise DegenerateStateError("no probability mass with the ancilla in |1>")
    return ProbDist(kept / mass)


@dataclass(frozen=True)
class XebInput:
    """Pairs of (experimental, ideal) distributions, one per circuit."""
    pairs: tuple[tuple[ProbDist, ProbDist], ...]

    def __post_init__(self):
        pairs = tuple((pe, pt) for pe, pt in self.pairs)
        if not pairs:
            raise ValueError("XEB needs at least one circuit")
        dim = pairs[0][0].dim
        for pe, pt in pairs:
            if pe.dim != dim or pt.dim != dim:
                raise ValueError("all distributions must share one dimension")
            for d in (pe, pt):
                if abs(d.probs.sum() - 1.0) > 1e-9:
                    raise ValueError("distributions must be normalized")
        object.__setattr__(self, "pairs", pairs)

    @property
    def dim(self) -> int:
        return self.pairs[0][0].dim


def xeb(data: XebInput | list) -> float:
    """Sum_j (p_e - p_c, p_t) / Sum_j (p_t - p_c, p_t), with p_c uniform."""
    if not isinstance(data, XebInput):
        data = XebInput(tuple(data))
    pc = 1.0 / data.dim
    num = 0.0
    den = 0.0
    for pe, pt in data.pairs:
        num += float(np.dot(pe.probs - pc, pt.probs))
        den += float(np.dot(pt.probs - pc, pt.probs))
    if abs(den) < 1e-15:
        raise DegenerateSpectrumError("ideal distributions are uniform; XEB is undefined")
    return num / den
