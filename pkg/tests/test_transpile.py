import json
from importlib import resources

import jsonschema
import numpy as np
import pytest

from hybridhhl.circuit import Circuit, FAMILIES, Gate, simplify
from hybridhhl.transpile import (BUILTIN, TopologyError, all_to_all, depth_study, line,
                                 load_topology, route, write_study)
from hybridhhl.transpile.router import compact_routed, layout_permutation_check
from hybridhhl.transpile.study import hhl_circuit

SCHEMA = json.loads(open(__file__.replace("tests/test_transpile.py", "docs/topology.schema.json")).read())


def test_simple_maps():
    assert len(all_to_all(4).edges) == 6
    assert len(line(5).edges) == 4
    assert all_to_all(4).is_complete and not line(5).is_complete


def test_melbourne_file():
    m = load_topology("melbourne15")
    assert m.n_qubits == 15
    assert len(m.edges) == 20


@pytest.mark.parametrize("name", BUILTIN)
def test_shipped_files_valid(name):
    data = json.loads(resources.files("hybridhhl.transpile").joinpath("data", f"{name}.json").read_text())
    jsonschema.validate(data, SCHEMA)
    m = load_topology(name)
    deg = np.bincount(np.ravel(m.edges), minlength=m.n_qubits)
    assert deg.min() >= 1 and deg.max() <= 4
    assert np.isfinite(m.distance_matrix()).all()


def test_builtin_sizes():
    assert {n: load_topology(n).n_qubits for n in BUILTIN} == {
        "melbourne15": 15, "johannesburg20": 20, "rochester53": 53, "sycamore53": 53}


def test_name_forms():
    assert load_topology("line(3)").n_qubits == 3
    assert load_topology("all_to_all:5").is_complete


def test_bad_topologies(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text(json.dumps({"name": "broken", "n": 3, "edges": [[0, 1]]}))
    with pytest.raises(TopologyError, match="disconnected"):
        load_topology(str(p))
    p.write_text(json.dumps({"name": "loop", "n": 2, "edges": [[0, 0], [0, 1]]}))
    with pytest.raises(TopologyError):
        load_topology(str(p))
    p.write_text(json.dumps({"name": "far", "n": 2, "edges": [[0, 5]]}))
    with pytest.raises(TopologyError):
        load_topology(str(p))
    p.write_text("{not json")
    with pytest.raises(TopologyError):
        load_topology(str(p))
    with pytest.raises(TopologyError):
        load_topology("no_such_device")


def test_complete_graph_needs_no_swaps():
    circ = hhl_circuit("NTP", 7, 3)
    rep = route(circ, all_to_all(7))
    assert rep.cnot_count == simplify(circ).cnot_count and rep.swaps == 0


def test_far_cnot_on_a_line():
    circ = Circuit(3, (Gate.cnot(0, 2),))
    rep = route(circ, line(3), initial_layout=(0, 1, 2))
    assert rep.swaps >= 1 and rep.cnot_count >= 4
    assert layout_permutation_check(rep, circ)


@pytest.mark.parametrize("family", FAMILIES)
def test_routing_is_unitary_equivalent(family):
    circ = hhl_circuit(family, 6, 2)
    rep = route(circ, line(6), restarts=3, seed=1)
    assert layout_permutation_check(rep, circ)
    cmap = line(6)
    for g in rep.routed.gates:
        if len(g.qubits) == 2:
            assert cmap.has_edge(*g.qubits)


def test_more_restarts_never_worse():
    circ = hhl_circuit("TP2", 8, 0)
    cmap = load_topology("rochester53")
    assert route(circ, cmap, restarts=40, seed=5).depth <= route(circ, cmap, restarts=1, seed=5).depth


def test_routing_is_deterministic():
    circ = hhl_circuit("TP1", 4, 0)
    a = route(circ, line(4), seed=3)
    b = route(circ, line(4), seed=3)
    assert a.depth == b.depth and a.routed.to_dict() == b.routed.to_dict()


def test_compact_routed_keeps_semantics():
    circ = hhl_circuit("TP2", 5, 1)
    rep = route(circ, load_topology("melbourne15"), restarts=2)
    small, where = compact_routed(rep, 5)
    assert small.n_qubits <= 15 and len(where) == 5
    from hybridhhl.qstate import marginal
    from hybridhhl.sim import schrodinger_run
    got = marginal(schrodinger_run(small).probabilities(), small.n_qubits, where)
    want = schrodinger_run(circ).probabilities()
    assert np.allclose(got.probs, want.probs, atol=1e-10)


def test_route_errors():
    with pytest.raises(ValueError):
        route(Circuit(6), line(5))
    with pytest.raises(ValueError):
        route(Circuit(3, (Gate.cnot(0, 1),)), line(3), initial_layout=(0, 0, 1))
    with pytest.raises(ValueError):
        route(Circuit(2), line(2), restarts=0)


def test_all_to_all_53_cnot_magnitudes():
    counts = {f: simplify(hhl_circuit(f, 53, 0)).cnot_count for f in FAMILIES}
    assert counts["TP1"] < counts["TP2"] < counts["NTP"]
    for f, scale in zip(FAMILIES, (1e2, 5e2, 1e3)):
        assert scale / 2 <= counts[f] <= scale * 2


def test_restricted_map_costs_more():
    rows = depth_study(FAMILIES, [8], [load_topology("rochester53"), all_to_all(8)],
                       n_instances=3, restarts=3)
    by = {(r["family"], r["device"]): r for r in rows}
    for f in FAMILIES:
        assert by[(f, "rochester53")]["cnot_mean"] > by[(f, "all_to_all(8)")]["cnot_mean"]
        assert by[(f, "rochester53")]["depth_mean"] > by[(f, "all_to_all(8)")]["depth_mean"]


def test_study_output(tmp_path):
    rows = depth_study(["TP1"], [4, 5], line(5), n_instances=2, restarts=2)
    assert [r["width"] for r in rows] == [4, 5]
    p = write_study(rows, tmp_path / "s.csv")
    assert p.read_text().splitlines()[0].startswith("family,width")
    assert json.loads(write_study(rows, tmp_path / "s.json").read_text()) == rows
