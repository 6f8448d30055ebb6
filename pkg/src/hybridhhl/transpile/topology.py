"""Device coupling maps: built-in edge lists and custom JSON files."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

BUILTIN = ("melbourne15", "johannesburg20", "rochester53", "sycamore53")


class TopologyError(ValueError):
    """Unknown, malformed or disconnected coupling map."""


@dataclass(frozen=True)
class CouplingMap:
    name: str
    n_qubits: int
    edges: tuple[tuple[int, int], ...]
    e1: float | None = None
    e2: float | None = None
    er: float | None = None
    _dist: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        n = self.n_qubits
        if n < 1:
            raise TopologyError("coupling map needs at least one qubit")
        norm = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise TopologyError(f"self-loop on qubit {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise TopologyError(f"edge ({a}, {b}) out of range for {n} qubits")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))
        if n > 1 and connected_components(self._adjacency(), directed=False)[0] != 1:
            raise TopologyError(f"coupling map {self.name!r} is disconnected")

    def _adjacency(self):
        n = self.n_qubits
        if not self.edges:
            return coo_matrix((n, n))
        e = np.array(self.edges)
        return coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n))

    @property
    def is_complete(self) -> bool:
        n = self.n_qubits
        return len(self.edges) == n * (n - 1) // 2

    def distance_matrix(self) -> np.ndarray:
        if self._dist is None:
            d = shortest_path(self._adjacency(), directed=False, unweighted=True)
            object.__setattr__(self, "_dist", d.astype(np.int64))
        return self._dist

    def neighbors(self) -> list[list[int]]:
        out = [[] for _ in range(self.n_qubits)]
        for a, b in self.edges:
            out[a].append(b)
            out[b].append(a)
        return out

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in set(self.edges)

    def with_edges(self, extra) -> "CouplingMap":
        return CouplingMap(self.name + "+", self.n_qubits, tuple(self.edges) + tuple(extra),
                           self.e1, self.e2, self.er)

    def to_dict(self) -> dict:
        d = {"name": self.name, "n": self.n_qubits, "edges": [list(e) for e in self.edges]}
        for k in ("e1", "e2", "er"):
            if getattr(self, k) is not None:
                d[k] = getattr(self, k)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CouplingMap":
        try:
            return cls(str(d["name"]), int(d["n"]), tuple(tuple(e) for e in d["edges"]),
                       d.get("e1"), d.get("e2"), d.get("er"))
        except (KeyError, TypeError) as exc:
            raise TopologyError(f"malformed topology: {exc}") from exc


def all_to_all(n: int) -> CouplingMap:
    return CouplingMap(f"all_to_all({n})", n, tuple((a, b) for a in range(n) for b in range(a + 1, n)))


def line(n: int) -> CouplingMap:
    return CouplingMap(f"line({n})", n, tuple((a, a + 1) for a in range(n - 1)))


def load_file(path) -> CouplingMap:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise TopologyError(f"cannot read topology file {path}: {exc}") from exc
    return CouplingMap.from_dict(data)


def load_topology(name: str) -> CouplingMap:
    """Resolve ``all_to_all(n)``, ``line(n)``, a built-in device name, or a JSON file path."""
    spec = str(name).strip()
    m = re.fullmatch(r"(all_to_all|line)\s*\(?\s*(\d+)\s*\)?", spec.replace(":", "("))
    if m:
        n = int(m.group(2))
        return all_to_all(n) if m.group(1) == "all_to_all" else line(n)
    if spec in BUILTIN:
        text = resources.files("hybridhhl.transpile").joinpath("data", f"{spec}.json").read_text()
        return CouplingMap.from_dict(json.loads(text))
    if spec.endswith(".json") or Path(spec).exists():
        return load_file(spec)
    raise TopologyError(f"unknown topology {spec!r}; built-ins: {', '.join(BUILTIN)}, "
                        "all_to_all(n), line(n), or a JSON file")
