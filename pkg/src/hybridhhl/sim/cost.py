"""Classical simulation cost model: Schrödinger, Schrödinger–Feynman and tensor-network runtimes."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .sfa import CutPlan

SECONDS_PER_MINUTE = 60.0
SECONDS_PER_HOUR = 3600.0
SECONDS_PER_DAY = 86400.0
SECONDS_PER_YEAR = 365.25 * SECONDS_PER_DAY
SECONDS_PER_MONTH = SECONDS_PER_YEAR / 12

# Per-amplitude-update constants (seconds), measured on a 160-core POWER8 node
# and the values quoted for a 100K-core machine.
C_POWER8 = {"TP1": 5e-9, "TP2": 14e-9, "NTP": 17e-9}
C_100K = {"TP1": 1e-12, "TP2": 2.8e-12, "NTP": 3.4e-12}

# Documented (n_tilde, k) cut inputs for the 53-qubit TP1 estimate.
TP1_53_CUT = (6, 12)


@dataclass(frozen=True)
class Machine:
    name: str
    constants: dict = field(default_factory=dict)
    cores: int = 1
    ram_qubits: int = 47

    def constant(self, family: str) -> float:
        try:
            return self.constants[family.upper()]
        except KeyError:
            raise ValueError(f"machine {self.name!r} has no constant for family {family!r}") from None


POWER8 = Machine("power8", dict(C_POWER8), cores=160, ram_qubits=36)
SUPERCOMPUTER_100K = Machine("100k", dict(C_100K), cores=100_000, ram_qubits=47)
MACHINES = {"power8": POWER8, "100k": SUPERCOMPUTER_100K}


@dataclass(frozen=True)
class CostEstimate:
    t_sa: float
    t_sfa: float
    t_tn_exponent: int | None
    t_tn_log10: float | None
    t_f: float | None
    constant: float
    n_tilde: int
    k: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["t_sa_human"] = human_time(self.t_sa)
        d["t_sfa_human"] = human_time(self.t_sfa)
        if self.t_f is not None:
            d["t_f_human"] = human_time(self.t_f)
        return d


def t_sa(c: float, n: int) -> float:
    return c * n * 2.0 ** n


def t_sfa(c: float, n: int, n_tilde: int, k: int) -> float:
    big = n - n_tilde
    return c * big * 2.0 ** big * 2.0 ** k


def estimate_costs(stats: dict, plan, machine: Machine | dict, fidelity: float | None = None,
                   family: str | None = None) -> CostEstimate:
    """Runtime estimates for simulating a circuit described by ``stats``.

    ``stats`` needs ``n`` and optionally ``depth``, ``gates``, ``family`` and
    ``max_cnots_per_qubit`` (the tensor-network exponent proxy). ``plan`` is
    a CutPlan or an ``(n_tilde, k)`` pair. The tensor-network figure is
    ``2**exponent`` amplitude updates, reported in log10 seconds.
    """
    n = int(stats["n"])
    if isinstance(plan, CutPlan):
        n_tilde, k = plan.n_tilde, plan.k
    else:
        n_tilde, k = (int(x) for x in plan)
    if not 0 <= n_tilde <= n - n_tilde:
        raise ValueError(f"n_tilde={n_tilde} must lie in [0, n/2]")
    if k < 0:
        raise ValueError("k must be non-negative")
    if isinstance(machine, dict):
        machine = Machine(machine.get("name", "custom"), dict(machine.get("constants", {})),
                          int(machine.get("cores", 1)), int(machine.get("ram_qubits", 47)))
    fam = family or stats.get("family")
    if fam is None:
        raise ValueError("family needed to pick the machine constant")
    if n - n_tilde > machine.ram_qubits:
        raise ValueError(f"larger half ({n - n_tilde} qubits) exceeds the RAM cap of "
                         f"{machine.ram_qubits} qubits")
    c = machine.constant(fam)
    sa = t_sa(c, n)
    sfa = t_sfa(c, n, n_tilde, k)
    exponent = stats.get("max_cnots_per_qubit", stats.get("depth"))
    tn_log10 = None
    if exponent is not None:
        exponent = int(exponent)
        tn_log10 = math.log10(c) + exponent * math.log10(2.0)
    tf = None if fidelity is None else sfa * float(fidelity)
    return CostEstimate(sa, sfa, exponent, tn_log10, tf, c, n_tilde, k)


def max_cnots_per_qubit(circuit) -> int:
    counts = [0] * circuit.n_qubits
    for g in circuit.gates:
        if len(g.qubits) == 2:
            for q in g.qubits:
                counts[q] += 1
    return max(counts, default=0)


def qpu_sampling_seconds(n: int) -> float:
    """Time for a million samples of an n-qubit circuit on a Sycamore-class device."""
    return 2.0 + 1.5 * n


_UNITS = (("years", SECONDS_PER_YEAR), ("months", SECONDS_PER_MONTH), ("days", SECONDS_PER_DAY),
          ("hours", SECONDS_PER_HOUR), ("minutes", SECONDS_PER_MINUTE), ("seconds", 1.0))


def human_time(seconds: float) -> str:
    for name, size in _UNITS:
        if seconds >= size:
            return f"{seconds / size:.3g} {name}"
    return f"{seconds:.3g} seconds"


def parse_duration(text: str) -> float:
    """``"10 months"``, ``"5e6 years"``, ``"<1 minute"`` -> seconds (the bound itself for ``<``)."""
    t = text.strip().lstrip("<").strip()
    num, unit = t.split(None, 1)
    unit = unit.strip().lower()
    if not unit.endswith("s"):
        unit += "s"
    table = dict(_UNITS)
    if unit not in table:
        raise ValueError(f"unknown time unit in {text!r}")
    return float(num) * table[unit]
