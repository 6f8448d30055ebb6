import csv
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from hybridhhl.cli import main

DOCS = Path(__file__).resolve().parents[1] / "docs"


def schema(name):
    return json.loads((DOCS / f"{name}.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_and_hhl_roundtrip(tmp_path, capsys):
    code, out, _ = run(capsys, "gen", "--family", "ntp", "--nv", "3", "--seed", "2")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc["circuit"], schema("circuit"))
    assert doc["spectrum"]["p_full"] == 3

    assert run(capsys, "hhl", "build", "--family", "tp2", "--nv", "3", "--out-dir", str(tmp_path))[0] == 0
    jsonschema.validate(json.loads((tmp_path / "circuit.json").read_text()), schema("circuit"))
    assert "operator" in json.loads((tmp_path / "layout.json").read_text())
    code, out, _ = run(capsys, "hhl", "run", "--circuit", str(tmp_path / "circuit.json"),
                       "--layout", str(tmp_path / "layout.json"))
    rep = json.loads(out)
    jsonschema.validate(rep, schema("solution_report"))
    assert rep["fidelity"] >= 1 - 1e-9


def test_sim_run_backends_agree(tmp_path, capsys):
    circ = tmp_path / "c.json"
    main(["gen", "--family", "tp2", "--nv", "6", "--out", str(circ)])
    states = []
    for backend in ("sv", "sfa"):
        code, out, _ = run(capsys, "sim", "run", "--in", str(circ), "--backend", backend, "--dump-state")
        assert code == 0
        d = json.loads(out)
        jsonschema.validate(d["state"], schema("state"))
        states.append(d["state"]["amps"])
    assert max(abs(complex(*a) - complex(*b)) for a, b in zip(*states)) < 1e-10


def test_sim_run_noisy_shots(tmp_path, capsys):
    circ = tmp_path / "c.json"
    main(["gen", "--family", "tp1", "--nv", "3", "--out", str(circ)])
    argv = ["sim", "run", "--in", str(circ), "--noise", "0.01,0.05,0.02", "--shots", "500",
            "--seed", "4", "--trajectories", "50"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    d = json.loads(a)
    assert len(d["probs"]) == 8 and abs(sum(d["probs"]) - 1) < 1e-12
    assert d["metadata"]["shots"] == 500


def test_transpile_commands(tmp_path, capsys):
    main(["hhl", "build", "--family", "tp1", "--nv", "2", "--out-dir", str(tmp_path)])
    capsys.readouterr()
    code, out, _ = run(capsys, "transpile", "route", "--in", str(tmp_path / "circuit.json"),
                       "--map", "line(5)", "--restarts", "2")
    d = json.loads(out)
    assert code == 0 and d["device"] == "line(5)" and d["circuit"]["n_qubits"] == 5
    code, out, _ = run(capsys, "transpile", "study", "--families", "tp1,ntp", "--widths", "5..6",
                       "--map", "rochester53", "--instances", "2", "--restarts", "2")
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and len(rows) == 4 and {"depth_mean", "cnot_mean"} <= set(rows[0])


def test_metrics_commands(tmp_path, capsys):
    runs = tmp_path / "runs.json"
    runs.write_text(json.dumps([{"experimental": [0.25] * 4, "ideal": [0.7, 0.1, 0.1, 0.1]}]))
    _, out, _ = run(capsys, "metrics", "xeb", "--in", str(runs))
    assert json.loads(out)["f_xeb"] == pytest.approx(0.0)
    _, out, _ = run(capsys, "metrics", "dem", "--counts", "n=2,sq_gates=10,cnots=1", "--rates", "0.01,0.1,0")
    assert json.loads(out)["f_xeb"] == pytest.approx(0.99 ** 10 * 0.9)
    _, out, _ = run(capsys, "metrics", "table")
    assert out.startswith("| Type |")
    cfg = tmp_path / "t.json"
    cfg.write_text(json.dumps({"rows": [{"family": "TP1", "n": 53, "qpu": "q", "f_r": 0.1, "f_1qg": 0.1,
                                         "f_2qg": 0.1, "t_sfa": "1 day"}]}))
    _, out, _ = run(capsys, "metrics", "table", "--config", str(cfg), "--format", "csv")
    row = next(csv.DictReader(out.splitlines()))
    assert float(row["t_f_s"]) == pytest.approx(86.4)
    _, out, _ = run(capsys, "metrics", "qv", "--map", "line(3)", "--rates", "0,0,0", "--max-width", "2",
                    "--circuits", "5", "--trajectories", "1")
    assert "v_q" in json.loads(out)


def test_estimate_command(capsys):
    _, out, _ = run(capsys, "estimate", "--n", "53", "--n-tilde", "6", "--k", "12", "--family", "tp1",
                    "--fidelity", "1.1e-4")
    d = json.loads(out)
    assert d["t_sfa_human"] == "10.3 months" and d["qpu_sampling_seconds"] == 81.5


def test_errors_are_reported(capsys):
    code, _, err = run(capsys, "estimate", "--n", "53")
    assert code == 1 and "error" in err
    code, _, err = run(capsys, "transpile", "route", "--in", "/nonexistent.json", "--map", "line(3)")
    assert code == 1


def test_pipeline_error_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"study": "fig2", "instances": 0}))
    code, _, err = run(capsys, "pipeline", str(bad))
    d = json.loads(err)
    assert code != 0 and d["stage"] == "config"
    code, _, err = run(capsys, "pipeline", str(tmp_path / "missing.json"))
    assert code != 0 and json.loads(err)["error"] == "PipelineError"


def test_verify_quick(capsys):
    code, out, _ = run(capsys, "verify", "--quick")
    assert code == 0 and out.count("PASS") == 6


def test_verify_flags_corrupt_topology(tmp_path, capsys):
    p = tmp_path / "corrupt.json"
    p.write_text('{"name": "c", "n": 4, "edges": [[0, 1], [2, 3]]}')
    code, out, _ = run(capsys, "verify", "--quick", "--topology", str(p))
    assert code == 1
    assert "topology-files" in out and "TopologyError" in out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "hybridhhl", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for cmd in ("gen", "transpile", "sim", "hhl", "metrics", "estimate", "pipeline", "verify"):
        assert cmd in r.stdout


def test_partial_rates_default_to_zero(capsys):
    assert main(["metrics", "dem", "--counts", "n=2,sq_gates=0,cnots=1", "--rates", "e2=0.1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["f_xeb"] == pytest.approx(0.9)
    assert main(["metrics", "dem", "--counts", "n=2,sq_gates=0,cnots=1", "--rates", "e3=0.1"]) == 1
