"""``hhlsim`` command line.

Every subcommand reads and writes JSON (CSV for sweep tables). Output goes to
stdout unless ``--out`` names a file. Environment caps: ``HHLSIM_MAX_QUBITS``
(state-vector width), ``HHLSIM_MAX_CUT`` (SFA crossing gates) and
``NUMBA_NUM_THREADS`` (kernel threads).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dump(obj, out: str | None) -> None:
    _emit(json.dumps(obj, indent=1), out)


def _load_json(path: str):
    return json.loads(Path(path).read_text())


def _load_circuit(path: str):
    from .circuit import Circuit
    data = _load_json(path)
    return Circuit.from_dict(data.get("circuit", data))


def _families(text: str) -> list[str]:
    return [f.strip().upper() for f in text.split(",") if f.strip()]


# ----------------------------------------------------------------- gen

def cmd_gen(a) -> int:
    from .circuit import gen_family
    op, spec = gen_family(a.family.upper(), a.nv, a.seed)
    _dump({"family": a.family.upper(), "n_vector_qubits": a.nv, "seed": a.seed,
           "spectrum": spec.to_dict(), "circuit": op.to_dict()}, a.out)
    return 0


# ----------------------------------------------------------------- transpile

def cmd_transpile_route(a) -> int:
    from .transpile import load_topology, route
    circ = _load_circuit(a.input)
    rep = route(circ, load_topology(a.map), restarts=a.restarts, seed=a.seed)
    _dump({**rep.to_dict(include_circuit=False), "circuit": rep.routed.to_dict()}, a.out)
    return 0


def cmd_transpile_study(a) -> int:
    from .pipeline import parse_widths
    from .transpile import depth_study, load_topology, write_study
    maps = [load_topology(m) for m in a.map.split(",")]
    rows = depth_study(_families(a.families), parse_widths(a.widths), maps,
                       n_instances=a.instances, restarts=a.restarts, seed=a.seed)
    if a.output:
        write_study(rows, a.output, a.out)
    elif a.out == "json":
        _dump(rows, None)
    else:
        from .pipeline import FIG2_FIELDS
        import csv
        w = csv.DictWriter(sys.stdout, fieldnames=list(FIG2_FIELDS), extrasaction="ignore",
                           lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return 0


# ----------------------------------------------------------------- sim

def cmd_sim_run(a) -> int:
    from .qstate import StateVector
    from .sim import NoiseModel, make_cut_plan, noisy_run, schrodinger_run, sfa_run
    circ = _load_circuit(a.input)
    init = StateVector.from_json(Path(a.initial).read_text()) if a.initial else None
    noise = NoiseModel.parse(a.noise, a.seed) if a.noise else NoiseModel(seed=a.seed)
    meta = {"tool_version": __version__, "backend": a.backend, "n_qubits": circ.n_qubits,
            "seed": a.seed, "noise": {"e1": noise.e1, "e2": noise.e2, "er": noise.er}}
    if a.dump_state:
        if noise.e1 or noise.e2:
            raise ValueError("--dump-state needs a noiseless gate model")
        if a.backend == "sfa":
            plan = make_cut_plan(circ)
            state = sfa_run(circ, plan, init)
            meta["cut"] = plan.to_dict()
        else:
            state = schrodinger_run(circ, init)
        _dump({"state": json.loads(state.to_json()), "metadata": meta}, a.out)
        return 0
    if noise.e1 or noise.e2:
        dist = noisy_run(circ, init, noise, a.trajectories)
        meta["trajectories"] = a.trajectories
        probs = dist.probs
    else:
        if a.backend == "sfa":
            plan = make_cut_plan(circ)
            state = sfa_run(circ, plan, init)
            meta["cut"] = plan.to_dict()
        else:
            state = schrodinger_run(circ, init)
        from .sim.noise import apply_readout
        probs = apply_readout(np.abs(state.amps) ** 2, noise.er, circ.n_qubits)
    if a.shots:
        rng = np.random.default_rng(a.seed)
        counts = rng.multinomial(a.shots, probs / probs.sum())
        meta["shots"] = a.shots
        probs = counts / a.shots
    _dump({"probs": [float(x) for x in probs], "metadata": meta}, a.out)
    return 0


# ----------------------------------------------------------------- hhl

def cmd_hhl_build(a) -> int:
    from .circuit import gen_family
    from .hhl import build_hhl
    op, spec = gen_family(a.family.upper(), a.nv, a.seed)
    circ, layout = build_hhl(op, spec, p=a.p, hybrid=not a.full)
    out = Path(a.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "circuit.json").write_text(circ.to_json() + "\n")
    (out / "layout.json").write_text(json.dumps(
        {**layout.to_dict(), "operator": op.to_dict(), "spectrum": spec.to_dict(),
         "family": a.family.upper(), "seed": a.seed}, indent=1) + "\n")
    print(f"wrote {out / 'circuit.json'} ({circ.n_qubits} qubits, {len(circ.gates)} gates) "
          f"and {out / 'layout.json'}")
    return 0


def cmd_hhl_run(a) -> int:
    from .hhl import HHLLayout, run_hhl
    circ = _load_circuit(a.circuit)
    layout = HHLLayout.from_dict(_load_json(a.layout))
    _dump(run_hhl(circ, layout).to_dict(), a.out)
    return 0


# ----------------------------------------------------------------- metrics

def _dist(obj):
    from .qstate import ProbDist
    p = np.asarray(obj, dtype=float)
    return ProbDist(p / p.sum())


def cmd_metrics_xeb(a) -> int:
    from .metrics import filter_ancilla, xeb
    runs = _load_json(a.input)
    pairs = []
    for r in runs:
        pe, pt = _dist(r["experimental"]), _dist(r["ideal"])
        if a.ancilla is not None:
            pe, pt = filter_ancilla(pe, a.ancilla), filter_ancilla(pt, a.ancilla)
        pairs.append((pe, pt))
    _dump({"f_xeb": xeb(pairs), "circuits": len(pairs)}, a.out)
    return 0


def _kv(text: str) -> dict:
    if Path(text).is_file():
        return _load_json(text)
    out = {}
    for part in text.split(","):
        k, v = part.split("=")
        out[k.strip()] = float(v)
    return out


def _rates_or_kv(text: str) -> dict:
    """``e1,e2,er`` or ``k=v`` pairs (or a JSON file); unnamed rates are 0."""
    if "=" in text or Path(text).is_file():
        rates = _kv(text)
        unknown = set(rates) - {"e1", "e2", "er"}
        if Path(text).is_file():
            rates = {k: v for k, v in rates.items() if k not in unknown}
        elif unknown:
            raise ValueError(f"unknown rate(s): {', '.join(sorted(unknown))}")
        return {"e1": 0.0, "e2": 0.0, "er": 0.0, **rates}
    e1, e2, er = (float(x) for x in text.split(","))
    return {"e1": e1, "e2": e2, "er": er}


def cmd_metrics_dem(a) -> int:
    from .metrics import dem_predict
    if not (a.counts or a.circuit):
        raise ValueError("give --counts or --circuit")
    if a.circuit:
        from .metrics import circuit_counts
        counts = circuit_counts(_load_circuit(a.circuit))
    else:
        counts = _kv(a.counts)
    rates = _rates_or_kv(a.rates)
    _dump(dem_predict(counts, rates).to_dict(), a.out)
    return 0


def cmd_metrics_qv(a) -> int:
    from .metrics import quantum_volume
    from .sim import NoiseModel
    from .transpile import load_topology
    cmap = load_topology(a.map)
    rates = None
    if a.rates:
        r = _rates_or_kv(a.rates)
        rates = NoiseModel(r["e1"], r["e2"], r["er"], a.seed)
    res = quantum_volume(cmap, rates, a.max_width, n_circuits=a.circuits,
                         trajectories=a.trajectories, seed=a.seed)
    _dump(res.to_dict(), a.out)
    return 0


def cmd_metrics_table(a) -> int:
    from .metrics import TABLE1, supremacy_table, to_csv, to_markdown
    rows = TABLE1
    if a.config:
        cfg = _load_json(a.config)
        rows = cfg.get("rows", cfg) if isinstance(cfg, dict) else cfg
    table = supremacy_table(rows)
    _emit(to_csv(table) if a.format == "csv" else to_markdown(table), a.out)
    return 0


# ----------------------------------------------------------------- estimate

def cmd_estimate(a) -> int:
    from .sim import MACHINES, estimate_costs, make_cut_plan, qpu_sampling_seconds
    from .sim.cost import max_cnots_per_qubit
    machine = MACHINES[a.machine]
    if a.circuit:
        circ = _load_circuit(a.circuit)
        stats = {"n": circ.n_qubits, "max_cnots_per_qubit": max_cnots_per_qubit(circ)}
        plan = (a.n_tilde, a.k) if a.k is not None else make_cut_plan(circ)
    else:
        if a.n is None or a.n_tilde is None or a.k is None:
            raise ValueError("give --circuit or all of --n, --n-tilde, --k")
        stats = {"n": a.n}
        if a.tn_exponent is not None:
            stats["max_cnots_per_qubit"] = a.tn_exponent
        plan = (a.n_tilde, a.k)
    est = estimate_costs(stats, plan, machine, fidelity=a.fidelity, family=a.family.upper())
    _dump({**est.to_dict(), "machine": machine.name, "n": stats["n"],
           "qpu_sampling_seconds": qpu_sampling_seconds(stats["n"])}, a.out)
    return 0


# ----------------------------------------------------------------- pipeline / verify

def cmd_pipeline(a) -> int:
    from .pipeline import PipelineError, run_pipeline
    try:
        try:
            cfg = _load_json(a.config)
        except (OSError, json.JSONDecodeError) as exc:
            raise PipelineError("config", f"cannot read {a.config}: {exc}") from None
        summary = run_pipeline(cfg, a.output_dir)
    except PipelineError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return 2
    except Exception as exc:
        print(json.dumps({"error": type(exc).__name__, "stage": "run", "message": str(exc)}),
              file=sys.stderr)
        return 2
    print(json.dumps({"study": summary["study"], "config_hash": summary["config_hash"],
                      "rows": len(summary["rows"])}))
    return 0


def cmd_verify(a) -> int:
    from .verify import run_checks
    return 0 if run_checks(quick=a.quick, topologies=a.topology or ()) else 1


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hhlsim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a TP1/TP2/NTP operator circuit")
    g.add_argument("--family", required=True, choices=["tp1", "tp2", "ntp", "TP1", "TP2", "NTP"])
    g.add_argument("--nv", type=int, required=True, help="vector-register qubits")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    t = sub.add_parser("transpile", help="route circuits onto a coupling map")
    ts = t.add_subparsers(dest="action", required=True)
    tr = ts.add_parser("route", help="route one circuit")
    tr.add_argument("--in", dest="input", required=True, help="circuit JSON")
    tr.add_argument("--map", required=True, help="built-in name, all_to_all(n), line(n) or a file")
    tr.add_argument("--restarts", type=int, default=20)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--out")
    tr.set_defaults(func=cmd_transpile_route)
    st = ts.add_parser("study", help="mean depth and CNOT count of routed HHL circuits")
    st.add_argument("--families", default="tp1,tp2,ntp")
    st.add_argument("--widths", default="4..20", help="a..b or comma list")
    st.add_argument("--map", default="rochester53", help="one or more maps, comma separated")
    st.add_argument("--instances", type=int, default=140)
    st.add_argument("--restarts", type=int, default=20)
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--out", choices=["csv", "json"], default="csv", help="output format")
    st.add_argument("--output", help="write to this file instead of stdout")
    st.set_defaults(func=cmd_transpile_study)

    s = sub.add_parser("sim", help="simulate a circuit")
    ss = s.add_subparsers(dest="action", required=True)
    sr = ss.add_parser("run", help="run one circuit")
    sr.add_argument("--in", dest="input", required=True, help="circuit JSON")
    sr.add_argument("--backend", choices=["sv", "sfa"], default="sv")
    sr.add_argument("--noise", help="e1,e2,er")
    sr.add_argument("--shots", type=int)
    sr.add_argument("--trajectories", type=int, default=1000)
    sr.add_argument("--seed", type=int, default=0)
    sr.add_argument("--initial", help="state JSON to start from")
    sr.add_argument("--dump-state", action="store_true", help="emit amplitudes instead of probabilities")
    sr.add_argument("--out")
    sr.set_defaults(func=cmd_sim_run)

    h = sub.add_parser("hhl", help="build and run hybrid HHL circuits")
    hs = h.add_subparsers(dest="action", required=True)
    hb = hs.add_parser("build", help="write circuit.json and layout.json")
    hb.add_argument("--family", required=True, choices=["tp1", "tp2", "ntp", "TP1", "TP2", "NTP"])
    hb.add_argument("--nv", type=int, required=True)
    hb.add_argument("--seed", type=int, default=0)
    hb.add_argument("--p", type=int, help="phase-register qubits (default: 2 hybrid, p_full otherwise)")
    hb.add_argument("--full", action="store_true", help="no classically fixed phase bits")
    hb.add_argument("--out-dir", default=".")
    hb.set_defaults(func=cmd_hhl_build)
    hr = hs.add_parser("run", help="simulate and compare with the classical solution")
    hr.add_argument("--circuit", required=True)
    hr.add_argument("--layout", required=True)
    hr.add_argument("--out")
    hr.set_defaults(func=cmd_hhl_run)

    m = sub.add_parser("metrics", help="XEB, DEM, quantum volume and the estimate table")
    ms = m.add_subparsers(dest="action", required=True)
    mx = ms.add_parser("xeb", help="F_XEB from a list of {experimental, ideal} distributions")
    mx.add_argument("--in", dest="input", required=True)
    mx.add_argument("--ancilla", type=int, help="post-select this qubit on 1 first")
    mx.add_argument("--out")
    mx.set_defaults(func=cmd_metrics_xeb)
    md = ms.add_parser("dem", help="digital-error-model fidelity")
    md.add_argument("--counts", help="n=..,sq_gates=..,cnots=.. or a JSON file")
    md.add_argument("--circuit", help="take the counts from a circuit JSON")
    md.add_argument("--rates", required=True, help="e1,e2,er or e1=..,e2=..,er=..")
    md.add_argument("--out")
    md.set_defaults(func=cmd_metrics_dem)
    mq = ms.add_parser("qv", help="quantum volume of a coupling map")
    mq.add_argument("--map", required=True)
    mq.add_argument("--rates", help="e1,e2,er (default: the map's annotations)")
    mq.add_argument("--max-width", type=int, default=5)
    mq.add_argument("--circuits", type=int, default=100)
    mq.add_argument("--trajectories", type=int, default=200)
    mq.add_argument("--seed", type=int, default=0)
    mq.add_argument("--out")
    mq.set_defaults(func=cmd_metrics_qv)
    mt = ms.add_parser("table", help="supremacy-estimate table")
    mt.add_argument("--config", help="JSON with a rows list (default: the printed rows)")
    mt.add_argument("--format", choices=["md", "csv"], default="md")
    mt.add_argument("--out")
    mt.set_defaults(func=cmd_metrics_table)

    e = sub.add_parser("estimate", help="classical simulation runtime estimates")
    e.add_argument("--circuit")
    e.add_argument("--n", type=int)
    e.add_argument("--n-tilde", type=int)
    e.add_argument("--k", type=int)
    e.add_argument("--tn-exponent", type=int)
    e.add_argument("--family", default="tp1")
    e.add_argument("--machine", choices=["power8", "100k"], default="100k")
    e.add_argument("--fidelity", type=float, help="target F_XEB, gives T_f")
    e.add_argument("--out")
    e.set_defaults(func=cmd_estimate)

    pl = sub.add_parser("pipeline", help="run a fig2 / fig4 / table1 study from a config file")
    pl.add_argument("config")
    pl.add_argument("--output-dir")
    pl.set_defaults(func=cmd_pipeline)

    v = sub.add_parser("verify", help="self-check suite")
    v.add_argument("--quick", action="store_true")
    v.add_argument("--topology", action="append", help="also load this topology file")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, RuntimeError) as exc:
        print(f"hhlsim: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
