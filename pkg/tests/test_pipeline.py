import csv
import json
from pathlib import Path

import jsonschema
import pytest

from hybridhhl.pipeline import PipelineError, config_hash, resolve_config, run_pipeline

DOCS = Path(__file__).resolve().parents[1] / "docs"
FIG2 = {"study": "fig2", "families": ["TP1", "NTP"], "widths": "5..6", "instances": 2, "restarts": 2,
        "topology": "rochester53", "compare_topology": "all_to_all(20)", "seed": 3}
FIG4 = {"study": "fig4", "families": ["tp1", "tp2"], "widths": [6], "instances": 3, "trajectories": 200,
        "shots": 20000, "noise": {"e1": 0.001, "e2": 0.005}, "topology": "all_to_all(8)", "seed": 1}


def read_metrics(path):
    lines = (path / "metrics.csv").read_text().splitlines()
    assert lines[0].startswith("# hybridhhl") and "config_hash=" in lines[0]
    return list(csv.DictReader(lines[1:]))


def test_config_schema_shipped():
    schema = json.loads((DOCS / "config.schema.json").read_text())
    jsonschema.validate(FIG2, schema)
    jsonschema.validate(FIG4, schema)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"study": "fig2", "instances": 0}, schema)


def test_defaults():
    cfg = resolve_config({"study": "fig2"})
    assert cfg["instances"] == 140 and cfg["restarts"] == 20 and cfg["shots"] == 100_000
    assert cfg["widths"] == list(range(4, 21))


def test_hash_ignores_output_dir():
    a = resolve_config({"study": "table1", "output_dir": "x"})
    b = resolve_config({"study": "table1", "output_dir": "y"})
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash(resolve_config({"study": "table1", "seed": 1}))


def test_fig2_pipeline(tmp_path):
    s = run_pipeline(FIG2, str(tmp_path))
    rows = read_metrics(tmp_path)
    assert len(rows) == 2 * 2 * 2
    assert {"family", "width", "depth_mean", "cnot_mean"} <= set(rows[0])
    for r in s["rows"]:
        if r["device"] == "rochester53":
            twin = next(x for x in s["rows"] if x["device"] != "rochester53"
                        and x["family"] == r["family"] and x["width"] == r["width"])
            assert r["cnot_mean"] > twin["cnot_mean"]
    for f in list((tmp_path / "circuits").iterdir()) + list((tmp_path / "reports").iterdir()):
        d = json.loads(f.read_text())
        assert d["config_hash"] == s["config_hash"] and d["schema_version"] == 1


def test_fig4_pipeline(tmp_path):
    s = run_pipeline(FIG4, str(tmp_path))
    rows = read_metrics(tmp_path)
    assert {"family", "width", "f_xeb_measured", "f_xeb_dem"} <= set(rows[0])
    for r in s["rows"]:
        assert 0 < r["f_xeb_dem"] < 1
        assert r["f_xeb_measured"] == pytest.approx(r["f_xeb_dem"], rel=0.25)


def test_replay_is_byte_identical(tmp_path):
    for cfg in (FIG2, FIG4, {"study": "table1"}):
        run_pipeline(cfg, str(tmp_path / "a"))
        run_pipeline(cfg, str(tmp_path / "b"))
        for name in ("summary.json", "metrics.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_pipeline_errors(tmp_path):
    with pytest.raises(PipelineError) as e:
        run_pipeline({"study": "fig2", "bogus": 1}, str(tmp_path))
    assert e.value.stage == "config"
    with pytest.raises(PipelineError) as e:
        run_pipeline({"study": "fig2", "topology": "nowhere"}, str(tmp_path))
    assert e.value.stage == "topology"
    with pytest.raises(PipelineError) as e:
        run_pipeline({"study": "fig4", "widths": [9], "topology": "line(6)"}, str(tmp_path))
    assert e.value.stage == "fig4"
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(PipelineError) as e:
        run_pipeline({"study": "table1"}, str(blocker / "sub"))
    assert e.value.stage == "output"
