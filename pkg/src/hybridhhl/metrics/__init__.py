from .dem import DemFidelity, circuit_counts, dem_predict
from .qv import QVResult, quantum_volume
from .table import TABLE1, supremacy_table, to_csv, to_markdown
from .tomography import InsufficientShotsError, exact_oracle, hhl_oracle, tomography
from .xeb import DegenerateSpectrumError, XebInput, filter_ancilla, xeb

__all__ = [
    "DegenerateSpectrumError", "DemFidelity", "InsufficientShotsError", "QVResult", "TABLE1",
    "XebInput", "circuit_counts", "dem_predict", "exact_oracle", "filter_ancilla", "hhl_oracle",
    "quantum_volume", "supremacy_table", "to_csv", "to_markdown", "tomography", "xeb",
]
