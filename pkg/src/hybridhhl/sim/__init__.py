from .cost import CostEstimate, Machine, MACHINES, estimate_costs, qpu_sampling_seconds
from .noise import NoiseModel, noisy_run, sample
from .schrodinger import ResourceError, SchrodingerBackend, schrodinger_run
from .sfa import CutPlan, SFABackend, make_cut_plan, plan_from_partition, sfa_run

__all__ = [
    "CostEstimate", "CutPlan", "MACHINES", "Machine", "NoiseModel", "ResourceError",
    "SFABackend", "SchrodingerBackend", "estimate_costs", "make_cut_plan", "noisy_run",
    "plan_from_partition", "qpu_sampling_seconds", "sample", "schrodinger_run", "sfa_run",
]
