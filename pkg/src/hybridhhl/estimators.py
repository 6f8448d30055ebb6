"""Estimator-style wrappers (fit / predict / transform) over the solver and router."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_circuit, check_positive_int, check_state
from .circuit import gen_family
from .hhl import build_hhl, classical_solve, run_hhl
from .qstate import StateVector
from .sim import SchrodingerBackend, SFABackend
from .transpile import load_topology, route


class HHLSolver(BaseEstimator):
    """Hybrid HHL solver for a generated family operator.

    ``fit`` takes either a family circuit or ``(family, n_vector_qubits, seed)``;
    ``predict`` returns the post-selected solution amplitudes for |b> = |0>.
    """

    def __init__(self, p=None, hybrid=True, backend="sv"):
        self.p = p
        self.hybrid = hybrid
        self.backend = backend

    def fit(self, X, y=None):
        if isinstance(X, tuple):
            family, nv, seed = X
            op, spectrum = gen_family(family, nv, seed)
        else:
            op = check_circuit(X)
            if "family" not in op.tags:
                raise ValueError("operator circuit must come from gen_family")
            _, spectrum = gen_family(op.tags["family"], op.n_qubits, op.tags.get("seed", 0))
        if self.backend not in ("sv", "sfa"):
            raise ValueError("backend must be 'sv' or 'sfa'")
        self.operator_ = op
        self.spectrum_ = spectrum
        self.circuit_, self.layout_ = build_hhl(op, spectrum, p=self.p, hybrid=self.hybrid)
        return self

    def _check_fitted(self):
        if not hasattr(self, "circuit_"):
            raise RuntimeError("HHLSolver is not fitted")

    def _b(self, b):
        nv = len(self.layout_.vector_qubits)
        if b is None:
            return StateVector.basis(nv)
        b = check_state(b, nv)
        if abs(abs(b.amps[0]) - 1) > 1e-12:
            raise ValueError("only |b> = |0> is prepared by the circuit")
        return b

    def predict(self, b=None):
        self._check_fitted()
        self._b(b)
        backend = SchrodingerBackend() if self.backend == "sv" else SFABackend()
        self.report_ = run_hhl(self.circuit_, self.layout_, backend)
        return self.report_.solution_state.amps.copy()

    def solve_classically(self, b=None):
        self._check_fitted()
        return classical_solve(self.operator_, self._b(b)).amps.copy()

    def score(self, X=None, y=None):
        """Fidelity of the circuit output with the classical solution."""
        x = self.predict()
        ref = self.solve_classically()
        return float(abs(np.vdot(ref, x)) ** 2)


class Router(TransformerMixin, BaseEstimator):
    """SWAP router as a transformer; ``transform`` returns the routed circuit."""

    def __init__(self, topology="rochester53", restarts=20, seed=0):
        self.topology = topology
        self.restarts = restarts
        self.seed = seed

    def fit(self, X, y=None):
        circuit = check_circuit(X)
        check_positive_int("restarts", self.restarts)
        cmap = load_topology(self.topology) if isinstance(self.topology, str) else self.topology
        self.coupling_map_ = cmap
        self.report_ = route(circuit, cmap, restarts=self.restarts, seed=self.seed)
        self._fitted_on = circuit
        return self

    def transform(self, X):
        if not hasattr(self, "report_"):
            raise RuntimeError("Router is not fitted")
        circuit = check_circuit(X)
        if circuit is self._fitted_on:
            return self.report_.routed
        return route(circuit, self.coupling_map_, restarts=self.restarts, seed=self.seed).routed
