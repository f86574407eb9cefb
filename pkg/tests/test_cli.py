import csv
import json
import subprocess
import sys

import pytest

from fedscan.cli import main
from fedscan.synth import ScenarioSpec, generate_scenario, write_bundle

SMALL = {"n_owners": 2, "nodes_per_owner": 60, "public_nodes": 60, "planted_private_size": 10,
         "planted_public_size": 8, "noise_fraction": 0.1}


@pytest.fixture
def bundle(tmp_path):
    (tmp_path / "spec.json").write_text(json.dumps(SMALL))
    assert main(["gen", "--config", str(tmp_path / "spec.json"), "--seed", "4", "--out", str(tmp_path / "b")]) == 0
    return tmp_path


def test_gen_run_eval_report(bundle):
    b = bundle
    assert main(["run", "--config", str(b / "b/manifest.json"), "--out", str(b / "r")]) == 0
    assert (b / "r/result.json").exists() and (b / "r/messages.jsonl").exists()
    assert main(["eval", "--config", str(b / "b/manifest.json"), "--result", str(b / "r/result.json"),
                 "--out", str(b / "e")]) == 0
    metrics = json.loads((b / "e/metrics.json").read_text())
    assert 0.0 <= metrics["f1"] <= 1.0
    rows = list(csv.DictReader((b / "e/metrics.csv").open()))
    assert len(rows) == 1 and set(rows[0]) >= {"precision", "recall", "f1", "accuracy", "tpr", "fnr"}
    assert main(["report", "--result", str(b / "r/result.json"), "--out", str(b / "rep")]) == 0
    table = list(csv.DictReader((b / "rep/objectives.csv").open()))
    result = json.loads((b / "r/result.json").read_text())
    assert len(table) == len(result["rounds"])
    assert [float(r["objective"]) for r in table] == [r["objective"] for r in result["rounds"]]
    nodes = list(csv.DictReader((b / "rep/nodes.csv").open()))
    assert {r["node"] for r in nodes if r["network"] == "public"} == set(result["final_U"])


def test_pipeline_deterministic(bundle):
    b = bundle
    for out in ("r1", "r2"):
        assert main(["run", "--config", str(b / "b/manifest.json"), "--out", str(b / out)]) == 0
        assert main(["eval", "--config", str(b / "b/manifest.json"), "--result", str(b / out / "result.json"),
                     "--out", str(b / out / "e")]) == 0
    assert (b / "r1/result.json").read_bytes() == (b / "r2/result.json").read_bytes()
    assert (b / "r1/messages.jsonl").read_bytes() == (b / "r2/messages.jsonl").read_bytes()
    assert (b / "r1/e/metrics.csv").read_bytes() == (b / "r2/e/metrics.csv").read_bytes()


def test_flags_override_manifest(bundle):
    b = bundle
    assert main(["run", "--config", str(b / "b/manifest.json"), "--alpha", "0.05", "--lambda", "2",
                 "--statistic", "hc", "--theta", "0.5", "--max-rounds", "3", "--out", str(b / "r")]) == 0
    cfg = json.loads((b / "r/result.json").read_text())["config"]
    assert (cfg["alpha"], cfg["lambda"], cfg["statistic"], cfg["theta"], cfg["max_rounds"]) == (0.05, 2.0, "HC",
                                                                                               0.5, 3)
    assert main(["run", "--config", str(b / "b/manifest.json"), "--profile", "traffic", "--out", str(b / "t")]) == 0
    assert json.loads((b / "t/result.json").read_text())["config"]["alpha"] == 0.05


def test_perfect_detection_all_ones(bundle, tmp_path):
    b = bundle
    from fedscan.synth import read_truth
    truth = read_truth(b / "b/truth.tsv")
    fake = {"final_S": {o: sorted(v) for o, v in truth.anomalies.items()}, "final_U": sorted(truth.public_anomaly),
            "rounds": [], "converged": True}
    (tmp_path / "perfect.json").write_text(json.dumps(fake))
    assert main(["eval", "--config", str(b / "b/manifest.json"), "--result", str(tmp_path / "perfect.json"),
                 "--out", str(tmp_path / "pe")]) == 0
    m = json.loads((tmp_path / "pe/metrics.json").read_text())
    assert (m["precision"], m["recall"], m["f1"], m["accuracy"], m["tpr"]) == (1.0, 1.0, 1.0, 1.0, 1.0)


def test_tampered_audit_log_exits_2(bundle):
    b = bundle
    manifest = json.loads((b / "b/manifest.json").read_text())
    leak = {"channel": "report", "payload": {"owner_id": "owner0", "public_nodes": ["o0n0001"], "size": 1,
                                             "q_value": 1.0, "f_value": 0.0, "round": 0}}
    (b / "b/tampered.jsonl").write_text(json.dumps(leak) + "\n")
    manifest["audit_log"] = "tampered.jsonl"
    (b / "b/manifest.json").write_text(json.dumps(manifest))
    assert main(["run", "--config", str(b / "b/manifest.json"), "--out", str(b / "r")]) == 2

    extra = {"channel": "report", "payload": {**leak["payload"], "public_nodes": ["w0001"], "pvalues": [0.01]}}
    (b / "b/tampered.jsonl").write_text(json.dumps(extra) + "\n")
    assert main(["run", "--config", str(b / "b/manifest.json"), "--out", str(b / "r")]) == 2


def test_clean_audit_log_accepted(bundle):
    b = bundle
    assert main(["run", "--config", str(b / "b/manifest.json"), "--out", str(b / "r")]) == 0
    manifest = json.loads((b / "b/manifest.json").read_text())
    manifest["audit_log"] = str(b / "r/messages.jsonl")
    (b / "b/manifest.json").write_text(json.dumps(manifest))
    assert main(["run", "--config", str(b / "b/manifest.json"), "--out", str(b / "r2")]) == 0


def test_input_errors_exit_1(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 1
    assert "not found" in capsys.readouterr().err
    (tmp_path / "bad.json").write_text("{oops")
    assert main(["gen", "--config", str(tmp_path / "bad.json"), "--out", str(tmp_path / "x")]) == 1
    (tmp_path / "spec.json").write_text(json.dumps({"planted_private_size": 999}))
    assert main(["gen", "--config", str(tmp_path / "spec.json"), "--out", str(tmp_path / "x")]) == 1
    assert main(["run", "--out", str(tmp_path)]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["run", "--no-such-flag"])
    assert exc.value.code == 1


def test_bad_manifest_reference_line_context(bundle):
    b = bundle
    (b / "b/public/pvalues.tsv").write_text("w0000\t0.5\nw0001\tnope\n")
    assert main(["run", "--config", str(b / "b/manifest.json"), "--out", str(b / "r")]) == 1


def test_pvalues_subcommand(tmp_path):
    (tmp_path / "h.csv").write_text("node,t1,t2,t3,t4,t5\na,1,2,3,4,5\nb,5,5,5,5,5\n")
    assert main(["pvalues", "--history", str(tmp_path / "h.csv"), "--t", "3", "--out", str(tmp_path / "pv")]) == 0
    lines = (tmp_path / "pv/pvalues.tsv").read_text().splitlines()
    assert lines == ["a\t0.6", "b\t1.0"]
    assert main(["pvalues", "--history", str(tmp_path / "h.csv"), "--t", "9", "--out", str(tmp_path / "pv")]) == 1


def test_history_manifest_runs(tmp_path):
    spec = ScenarioSpec(rng_seed=2, n_owners=2, nodes_per_owner=50, public_nodes=50, planted_private_size=8,
                        planted_public_size=6, history_length=15)
    write_bundle(generate_scenario(spec), tmp_path / "b")
    manifest = json.loads((tmp_path / "b/manifest.json").read_text())
    assert all("history" in o for o in manifest["owners"])
    assert main(["run", "--config", str(tmp_path / "b/manifest.json"), "--out", str(tmp_path / "r")]) == 0


def test_help_lists_flags():
    out = subprocess.run([sys.executable, "-m", "fedscan.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for flag in ("--config", "--seed", "--alpha", "--sigma", "--lambda", "--theta", "--statistic",
                 "--max-rounds", "--out"):
        assert flag in out.stdout
