"""Depth and CNOT count of transpiled H-HHL circuits versus width (the Fig. 2 style sweep)."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from ..circuit import gen_family, simplify
from .router import _Prepared, route_stats
from .topology import CouplingMap

HYBRID_P = 2
MIN_VECTOR = {"TP1": 1, "TP2": 2, "NTP": 2}
FIELDS = ("family", "width", "device", "instances", "restarts",
          "depth_mean", "depth_stderr", "cnot_mean", "cnot_stderr")


def hhl_circuit(family: str, width: int, seed: int):
    """Hybrid (p=2) H-HHL circuit of total ``width`` qubits for a random family instance."""
    from ..hhl import build_hhl
    nv = width - HYBRID_P - 1
    op, spectrum = gen_family(family, nv, seed)
    circ, _ = build_hhl(op, spectrum, p=HYBRID_P, hybrid=True)
    return circ


def instance_seed(seed: int, family: str, width: int, i: int) -> int:
    tag = sum(ord(ch) << (8 * k) for k, ch in enumerate(family))
    return int(np.random.SeedSequence([int(seed), tag, int(width), int(i)]).generate_state(1)[0])


def depth_study(families, widths, cmap, n_instances: int = 140, restarts: int = 20,
                seed: int = 0, progress=None) -> list[dict]:
    """Mean and standard error of transpiled depth and CNOT count per (family, width).

    Instance ``i`` draws a fresh random operator and routes it with its own
    seed; widths too small for a family are skipped. ``cmap`` may be a list
    of maps, in which case every instance is routed on each of them.
    """
    if n_instances < 1 or restarts < 1:
        raise ValueError("n_instances and restarts must be >= 1")
    cmaps = list(cmap) if isinstance(cmap, (list, tuple)) else [cmap]
    rows = []
    for family in families:
        family = family.upper()
        for width in widths:
            width = int(width)
            if width - HYBRID_P - 1 < MIN_VECTOR[family]:
                continue
            for m in cmaps:
                if width > m.n_qubits:
                    raise ValueError(f"width {width} exceeds device {m.name!r} ({m.n_qubits} qubits)")
            depths = [[] for _ in cmaps]
            cnots = [[] for _ in cmaps]
            preps = None
            skeleton = None
            for i in range(n_instances):
                s = instance_seed(seed, family, width, i)
                circ = simplify(hhl_circuit(family, width, s))
                key = tuple(g.qubits for g in circ.gates)
                if key != skeleton:
                    # routing only sees the gate skeleton, so reuse the compiled arrays
                    skeleton = key
                    preps = [None if m.is_complete else _Prepared(circ, m) for m in cmaps]
                for j, m in enumerate(cmaps):
                    d, c = route_stats(circ, m, restarts=restarts, seed=s, optimize=False,
                                       prepared=preps[j])
                    depths[j].append(d)
                    cnots[j].append(c)
            for j, m in enumerate(cmaps):
                rows.append(_summarize(family, width, m.name, restarts, depths[j], cnots[j]))
                if progress:
                    progress(rows[-1])
    return rows


def _summarize(family, width, device, restarts, depths, cnots) -> dict:
    d = np.asarray(depths, dtype=float)
    c = np.asarray(cnots, dtype=float)
    m = len(d)
    se = (lambda x: float(x.std(ddof=1) / math.sqrt(m)) if m > 1 else 0.0)
    return {"family": family, "width": width, "device": device, "instances": m,
            "restarts": restarts, "depth_mean": float(d.mean()), "depth_stderr": se(d),
            "cnot_mean": float(c.mean()), "cnot_stderr": se(c)}


def write_study(rows: list[dict], path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".") or "csv"
    if fmt == "json":
        path.write_text(json.dumps(rows, indent=1) + "\n")
    elif fmt == "csv":
        with path.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=FIELDS, lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: r[k] for k in FIELDS})
    else:
        raise ValueError(f"unknown study format {fmt!r}")
    return path
