"""Self-check suite behind ``hhlsim verify``."""
from __future__ import annotations

import time

import numpy as np

from .circuit import FAMILIES, gen_family
from .hhl import build_hhl, run_hhl
from .metrics.table import supremacy_table
from .metrics.xeb import xeb
from .qstate import ProbDist, StateVector
from .sim.schrodinger import schrodinger_run
from .sim.sfa import make_cut_plan, sfa_run
from .transpile.topology import BUILTIN, load_topology

MIN_VECTOR = {"TP1": 1, "TP2": 2, "NTP": 2}


def _oracle(quick):
    worst = 1.0
    for fam in FAMILIES:
        for nv in range(MIN_VECTOR[fam], (3 if quick else 6) + 1):
            for seed in range(2 if quick else 10):
                op, sp = gen_family(fam, nv, seed)
                c, lay = build_hhl(op, sp, hybrid=True)
                worst = min(worst, run_hhl(c, lay).fidelity)
    return worst >= 1 - 1e-9, f"min fidelity {worst:.12f}"


def _hybrid(quick):
    worst, fewer = 1.0, True
    for fam in FAMILIES:
        for nv in range(MIN_VECTOR[fam], (3 if quick else 6) + 1):
            for seed in range(2 if quick else 10):
                op, sp = gen_family(fam, nv, seed)
                ch, lh = build_hhl(op, sp, hybrid=True)
                cf, lf = build_hhl(op, sp, p=3, hybrid=False)
                a = run_hhl(ch, lh).solution_state
                b = run_hhl(cf, lf).solution_state
                worst = min(worst, a.fidelity(b))
                fewer &= ch.tags["qpe_gates"] < cf.tags["qpe_gates"]
    return worst >= 1 - 1e-9 and fewer, f"min fidelity {worst:.12f}, fewer QPE gates: {fewer}"


def _backends(quick):
    worst = 0.0
    for fam in FAMILIES:
        for seed in range(2 if quick else 5):
            op, _ = gen_family(fam, 8 if quick else 12, seed)
            rng = np.random.default_rng(seed)
            factors = [v / np.linalg.norm(v) for v in rng.normal(size=(op.n_qubits, 2))
                       + 1j * rng.normal(size=(op.n_qubits, 2))]
            init = StateVector.from_product(factors)
            a = schrodinger_run(op, init).amps
            b = sfa_run(op, make_cut_plan(op), init).amps
            worst = max(worst, float(np.abs(a - b).max()))
    return worst < 1e-10, f"max |amp diff| {worst:.2e}"


def _xeb(quick):
    rng = np.random.default_rng(0)
    pairs = []
    for _ in range(5):
        pt = rng.exponential(size=128)
        pairs.append(ProbDist(pt / pt.sum()))
    same = xeb([(p, p) for p in pairs])
    unif = xeb([(ProbDist.uniform(128), p) for p in pairs])
    ok = abs(same - 1) < 1e-12 and abs(unif) < 1e-12
    return ok, f"identical {same:.3f}, uniform {unif:.3f}"


def _topologies(quick, extra=()):
    names = list(BUILTIN) + list(extra)
    for name in names:
        load_topology(name)
    return True, f"loaded {', '.join(names)}"


def _table(quick):
    t = supremacy_table()
    worst = max(max(r["f_xeb"] / r["f_xeb_printed"], r["f_xeb_printed"] / r["f_xeb"]) for r in t)
    return worst <= 1.5, f"worst F_XEB ratio {worst:.2f}"


CHECKS = (
    ("oracle-equivalence", _oracle),
    ("hybrid-equivalence", _hybrid),
    ("backend-equivalence", _backends),
    ("xeb-sanity", _xeb),
    ("topology-files", _topologies),
    ("table-arithmetic", _table),
)


def run_checks(quick: bool = False, topologies=(), out=print) -> bool:
    ok_all = True
    out(f"{'check':<22} {'result':<6} {'time':>7}  detail")
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            ok, detail = fn(quick, topologies) if fn is _topologies else fn(quick)
        except Exception as exc:  # a failing check reports, it does not abort the suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        ok_all &= ok
        out(f"{name:<22} {'PASS' if ok else 'FAIL':<6} {time.perf_counter() - t0:6.1f}s  {detail}")
    return ok_all
