"""Config-driven experiment pipelines writing replayable file artifacts."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .circuit import gen_family, simplify
from .hhl import build_hhl
from .metrics.dem import circuit_counts, dem_predict
from .metrics.table import TABLE1, supremacy_table
from .metrics.xeb import filter_ancilla, xeb
from .qstate import ProbDist, marginal
from .sim.noise import NoiseModel, noisy_run
from .sim.schrodinger import schrodinger_run
from .transpile.router import compact_routed, route
from .transpile.study import FIELDS as FIG2_FIELDS, depth_study, instance_seed
from .transpile.topology import load_topology

SCHEMA_VERSION = 1

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ExperimentConfig",
    "type": "object",
    "additionalProperties": False,
    "required": ["study"],
    "properties": {
        "study": {"enum": ["fig2", "fig4", "table1"]},
        "families": {"type": "array", "minItems": 1,
                     "items": {"enum": ["TP1", "TP2", "NTP", "tp1", "tp2", "ntp"]}},
        "widths": {"oneOf": [
            {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 4}},
            {"type": "string", "pattern": "^[0-9]+\\.\\.[0-9]+$"}]},
        "instances": {"type": "integer", "minimum": 1},
        "restarts": {"type": "integer", "minimum": 1},
        "shots": {"type": "integer", "minimum": 1},
        "trajectories": {"type": "integer", "minimum": 1},
        "noise": {"type": "object", "additionalProperties": False,
                  "properties": {k: {"type": "number", "minimum": 0, "exclusiveMaximum": 1}
                                 for k in ("e1", "e2", "er")}},
        "topology": {"type": "string"},
        "compare_topology": {"type": "string"},
        "output_dir": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "rows": {"type": "array", "items": {"type": "object"}},
    },
}

DEFAULTS = {
    "families": ["TP1", "TP2", "NTP"], "widths": "4..20", "instances": 140, "restarts": 20,
    "shots": 100_000, "trajectories": 1000, "noise": {"e1": 1e-3, "e2": 5e-3, "er": 0.0},
    "topology": "all_to_all(20)", "output_dir": "out", "seed": 0,
}


class PipelineError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage

    def to_dict(self) -> dict:
        return {"error": "PipelineError", "stage": self.stage, "message": str(self)}


def parse_widths(w) -> list[int]:
    if isinstance(w, str):
        lo, hi = (int(x) for x in w.split(".."))
        return list(range(lo, hi + 1))
    return [int(x) for x in w]


def resolve_config(raw: dict) -> dict:
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise PipelineError("config", f"invalid config: {exc.message}") from None
    cfg = {**DEFAULTS, **raw}
    cfg["noise"] = {**DEFAULTS["noise"], **raw.get("noise", {})}
    cfg["families"] = [f.upper() for f in cfg["families"]]
    cfg["widths"] = parse_widths(cfg["widths"])
    return cfg


def config_hash(cfg: dict) -> str:
    """SHA-256 of the canonical config, ignoring where the output goes."""
    body = {k: v for k, v in cfg.items() if k != "output_dir"}
    return hashlib.sha256(json.dumps(body, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def _header(cfg_hash: str) -> dict:
    return {"schema_version": SCHEMA_VERSION, "tool": "hybridhhl", "tool_version": __version__,
            "config_hash": cfg_hash}


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _write_csv(path: Path, fields, rows, cfg_hash: str) -> None:
    buf = io.StringIO()
    buf.write(f"# hybridhhl {__version__} schema_version={SCHEMA_VERSION} config_hash={cfg_hash}\n")
    w = csv.DictWriter(buf, fieldnames=list(fields), extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.10g}" if isinstance(v, float) else v) for k, v in r.items()})
    path.write_text(buf.getvalue())


def run_pipeline(raw_config: dict, output_dir: str | None = None) -> dict:
    cfg = resolve_config(raw_config)
    if output_dir is not None:
        cfg["output_dir"] = output_dir
    h = config_hash(cfg)
    out = Path(cfg["output_dir"])
    try:
        for sub in ("circuits", "reports"):
            (out / sub).mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise PipelineError("output", f"cannot create {out}: {exc}") from None
    runner = {"fig2": _fig2, "fig4": _fig4, "table1": _table1}[cfg["study"]]
    fields, rows = runner(cfg, out, h)
    _write_csv(out / "metrics.csv", fields, rows, h)
    summary = {**_header(h), "config": {k: v for k, v in cfg.items() if k != "output_dir"},
               "study": cfg["study"], "rows": rows}
    _write_json(out / "summary.json", summary)
    return summary


def _fig2(cfg, out: Path, h: str):
    try:
        maps = [load_topology(cfg["topology"])]
        if cfg.get("compare_topology"):
            maps.append(load_topology(cfg["compare_topology"]))
    except ValueError as exc:
        raise PipelineError("topology", str(exc)) from None
    rows = depth_study(cfg["families"], cfg["widths"], maps, n_instances=cfg["instances"],
                       restarts=cfg["restarts"], seed=cfg["seed"])
    for fam in cfg["families"]:
        for width in cfg["widths"]:
            if not any(r["family"] == fam and r["width"] == width for r in rows):
                continue
            s = instance_seed(cfg["seed"], fam, width, 0)
            op, sp = gen_family(fam, width - 3, s)
            circ, layout = build_hhl(op, sp, p=2, hybrid=True)
            _write_json(out / "circuits" / f"{fam}_w{width}.json",
                        {**_header(h), "seed": s, "circuit": circ.to_dict(), "layout": layout.to_dict()})
    for r in rows:
        _write_json(out / "reports" / f"{r['family']}_w{r['width']}_{_safe(r['device'])}.json",
                    {**_header(h), **r})
    return FIG2_FIELDS, rows


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() else "_" for c in name).strip("_")


FIG4_FIELDS = ("family", "width", "instances", "f_xeb_measured", "f_xeb_dem", "sq_gates", "cnots")


def fig4_point(family: str, width: int, instances: int, noise: NoiseModel, trajectories: int,
               shots: int | None, seed: int, topology=None, restarts: int = 20):
    """Measured XEB and DEM prediction for one (family, width); also returns the circuits."""
    pairs, dems, circuits = [], [], []
    rng = np.random.default_rng([seed, width, sum(map(ord, family))])
    for i in range(instances):
        s = instance_seed(seed, family, width, i)
        op, sp = gen_family(family, width - 3, s)
        circ, layout = build_hhl(op, sp, p=2, hybrid=True)
        circ = simplify(circ)
        ideal = schrodinger_run(circ).probabilities()
        run_circ, where = circ, list(range(width))
        if topology is not None and not topology.is_complete:
            rep = route(circ, topology, restarts=restarts, seed=s)
            run_circ, where = compact_routed(rep, width)
        dist = noisy_run(run_circ, None, NoiseModel(noise.e1, noise.e2, noise.er, s), trajectories)
        dist = marginal(dist, run_circ.n_qubits, where)
        if shots:
            dist = ProbDist.from_counts(rng.multinomial(shots, dist.probs / dist.probs.sum()))
        pairs.append((filter_ancilla(dist, layout), filter_ancilla(ideal, layout)))
        dems.append(dem_predict(circuit_counts(run_circ), noise).f_xeb)
        circuits.append((s, circ, run_circ))
    counts = circuit_counts(circuits[0][2])
    row = {"family": family, "width": width, "instances": instances,
           "f_xeb_measured": xeb(pairs), "f_xeb_dem": float(np.mean(dems)),
           "sq_gates": counts["sq_gates"], "cnots": counts["cnots"]}
    return row, circuits


def _fig4(cfg, out: Path, h: str):
    nz = cfg["noise"]
    noise = NoiseModel(nz["e1"], nz["e2"], nz["er"], cfg["seed"])
    try:
        cmap = load_topology(cfg["topology"])
    except ValueError as exc:
        raise PipelineError("topology", str(exc)) from None
    rows = []
    for fam in cfg["families"]:
        for width in cfg["widths"]:
            if width - 3 < (1 if fam == "TP1" else 2):
                continue
            if width > cmap.n_qubits:
                raise PipelineError("fig4", f"width {width} exceeds {cmap.name}")
            row, circs = fig4_point(fam, width, cfg["instances"], noise, cfg["trajectories"],
                                    cfg["shots"], cfg["seed"], cmap, cfg["restarts"])
            rows.append(row)
            s, circ, _ = circs[0]
            _write_json(out / "circuits" / f"{fam}_w{width}.json",
                        {**_header(h), "seed": s, "circuit": circ.to_dict()})
            _write_json(out / "reports" / f"{fam}_w{width}.json", {**_header(h), **row})
    return FIG4_FIELDS, rows


def _table1(cfg, out: Path, h: str):
    table = supremacy_table(cfg.get("rows") or TABLE1)
    fields = ("family", "n", "qpu", "f_r", "f_1qg", "f_2qg", "f_xeb", "t_sfa_s", "t_f_s", "t_sfa", "t_f")
    rows = [{k: r[k] for k in fields} for r in table]
    _write_json(out / "reports" / "table1.json", {**_header(h), "rows": rows})
    return fields, rows
