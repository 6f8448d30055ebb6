"""Hybrid HHL simulation and benchmarking toolkit."""
__version__ = "0.1.0"

from .circuit import Circuit, Gate, Spectrum, controlled_power, gen_family, unitary_of  # noqa: E402
from .hhl import HHLLayout, SolutionReport, build_hhl, classical_solve, qpe_only, run_hhl  # noqa: E402
from .qstate import DensityMatrix, ProbDist, StateVector, partial_trace, postselect, state_fidelity  # noqa: E402

__all__ = [
    "Circuit", "DensityMatrix", "Gate", "HHLLayout", "ProbDist", "SolutionReport", "Spectrum",
    "StateVector", "build_hhl", "classical_solve", "controlled_power", "gen_family",
    "partial_trace", "postselect", "qpe_only", "run_hhl", "state_fidelity", "unitary_of",
]
