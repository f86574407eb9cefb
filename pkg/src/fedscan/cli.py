"""Command-line entry point: gen, run, eval, pvalues, report."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import io
from .errors import ContractError, InputError, PrivacyError
from .graph import AttributedNetwork
from .runtime import FederationConfig, MessageBus, OwnerInput, audit_log, run_federation
from .stats import empirical_pvalues
from .synth import ScenarioSpec, anchor_count, evaluate_metrics, generate_scenario, read_truth, write_bundle

log = logging.getLogger("fedscan")

EXIT_OK, EXIT_INPUT, EXIT_PRIVACY = 0, 1, 2

# alpha presets; "traffic" is the sparser-signal setting
PROFILES = {"network": {"alpha": 0.15, "sigma": 0.8}, "traffic": {"alpha": 0.05, "sigma": 0.8}}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is reserved for privacy violations here
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _read_json(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: file not found")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    return data


def _write_json(path: Path, data: Any) -> None:
    path.write_text(json.dumps(data, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def _require(args, name: str) -> str:
    val = getattr(args, name)
    if val is None:
        raise InputError(f"--{name.replace('_', '-')} is required for '{args.command}'")
    return val


def _overrides(args) -> dict:
    out: dict[str, Any] = {}
    if args.profile:
        out.update(PROFILES[args.profile])
    for key, attr in (("alpha", "alpha"), ("sigma", "sigma"), ("lambda", "lam"), ("theta", "theta"),
                      ("max_rounds", "max_rounds"), ("rng_seed", "seed")):
        val = getattr(args, attr)
        if val is not None:
            out[key] = val
    if args.statistic is not None:
        out["statistic"] = args.statistic.upper()
    return out


# --- manifest ------------------------------------------------------------------------------------

def _resolve(base: Path, rel: str) -> Path:
    p = Path(rel)
    return p if p.is_absolute() else base / p


def load_manifest(path: str | Path) -> tuple[dict, AttributedNetwork, list[OwnerInput], Path]:
    path = Path(path)
    m = _read_json(path)
    base = path.parent
    for key in ("public", "owners"):
        if key not in m:
            raise InputError(f"{path}: manifest lacks {key!r}")
    pub = m["public"]
    public = io.load_network(pub.get("id", "public"), _resolve(base, pub["edges"]),
                             _resolve(base, pub["pvalues"]) if pub.get("pvalues") else None)
    cfg = dict(m.get("config") or {})
    sigma = float(cfg.get("sigma", 0.8))
    owners = []
    for i, entry in enumerate(m["owners"]):
        missing = [k for k in ("id", "edges", "alignment") if k not in entry]
        if missing:
            raise InputError(f"{path}: owners[{i}] lacks {missing[0]!r}")
        oid = entry["id"]
        net = io.load_network(oid, _resolve(base, entry["edges"]),
                              _resolve(base, entry["pvalues"]) if entry.get("pvalues") else None)
        if entry.get("attributeless"):
            net = net.with_pvalues({v: 1.0 for v in net.nodes})
        amap = io.read_alignment(_resolve(base, entry["alignment"]), oid, sigma)
        history = io.read_history(_resolve(base, entry["history"])) if entry.get("history") else None
        owners.append(OwnerInput(net, amap, history, entry.get("t")))
    return m, public, owners, base


# --- subcommands ---------------------------------------------------------------------------------

def cmd_gen(args) -> int:
    spec_d = _read_json(args.config) if args.config else {}
    if args.seed is not None:
        spec_d["rng_seed"] = args.seed
    spec = ScenarioSpec.from_dict(spec_d)
    run_cfg = FederationConfig.from_dict(_overrides(args)).to_dict()
    run_cfg.pop("search")
    manifest = write_bundle(generate_scenario(spec), _require(args, "out"), run_cfg)
    print(manifest)
    return EXIT_OK


def cmd_run(args) -> int:
    m, public, owners, base = load_manifest(_require(args, "config"))
    cfg = FederationConfig.from_dict({**(m.get("config") or {}), **_overrides(args)})
    private_ids = set().union(*(o.network.nodes for o in owners))
    if m.get("audit_log"):
        lines = _resolve(base, m["audit_log"]).read_text(encoding="utf-8").splitlines()
        n = audit_log(lines, public, private_ids)
        log.info("audited %d report records", n)
    bus = MessageBus(public, private_ids)
    res = run_federation(cfg, owners, public, bus=bus, workers=args.workers)
    out = Path(_require(args, "out"))
    out.mkdir(parents=True, exist_ok=True)
    (out / "result.json").write_text(res.to_json(), encoding="utf-8")
    bus.write(out / "messages.jsonl")
    log.info("%d rounds, converged=%s, |U|=%d", len(res.rounds), res.converged, len(res.final_U.nodes))
    print(out / "result.json")
    return EXIT_OK


METRIC_FIELDS = ("precision", "recall", "f1", "accuracy", "tpr", "fnr", "anchor_count")


def cmd_eval(args) -> int:
    m, _, owners, base = load_manifest(_require(args, "config"))
    result = _read_json(_require(args, "result"))
    truth_path = Path(args.truth) if args.truth else _resolve(base, m.get("truth", "truth.tsv"))
    truth = read_truth(truth_path)
    universe = {o.network.network_id: o.network for o in owners}
    final_S = result.get("final_S", {})
    metrics = evaluate_metrics(final_S, truth.anomalies, universe)
    row = metrics.to_dict()
    row["anchor_count"] = anchor_count(final_S, result.get("final_U", []), truth.anchors)
    row["anchors_into_U"] = sum(1 for _, _, w in truth.anchors if w in set(result.get("final_U", [])))
    out = Path(_require(args, "out"))
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "metrics.json", row)
    with (out / "metrics.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRIC_FIELDS)
        w.writerow([repr(row[k]) if isinstance(row[k], float) else row[k] for k in METRIC_FIELDS])
    print(",".join(f"{k}={row[k]:.4g}" for k in METRIC_FIELDS))
    return EXIT_OK


def cmd_pvalues(args) -> int:
    history = io.read_history(_require(args, "history"))
    if not history:
        raise InputError(f"{args.history}: no observations")
    T = len(next(iter(history.values())))
    t = args.t if args.t is not None else T
    out = Path(_require(args, "out"))
    if out.suffix == "":
        out.mkdir(parents=True, exist_ok=True)
        out = out / "pvalues.tsv"
    io.write_pvalues(empirical_pvalues(history, t), out)
    print(out)
    return EXIT_OK


def cmd_report(args) -> int:
    result = _read_json(_require(args, "result"))
    rounds = result.get("rounds")
    if not isinstance(rounds, list):
        raise InputError(f"{args.result}: not a result file (no 'rounds')")
    owners = sorted(result.get("final_S", {}))
    out = Path(_require(args, "out"))
    out.mkdir(parents=True, exist_ok=True)
    with (out / "objectives.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["round", "objective", "U_size"] + [f"{o}_{k}" for o in owners for k in ("f", "q", "S_size")])
        for r in rounds:
            row = [r["round"], repr(r["objective"]), len(r["U"])]
            for o in owners:
                sc = r["scores"][o]
                row += [repr(sc["f"]), repr(sc["q"]), len(r["S"][o])]
            w.writerow(row)
    with (out / "nodes.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["network", "node"])
        for v in result.get("final_U", []):
            w.writerow(["public", v])
        for o in owners:
            for v in result["final_S"][o]:
                w.writerow([o, v])
    print(f"{len(rounds)} rounds, converged={result.get('converged')}, final objective "
          f"{rounds[-1]['objective'] if rounds else 0.0:.6f}")
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "run": cmd_run, "eval": cmd_eval, "pvalues": cmd_pvalues, "report": cmd_report}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fedscan", description="Federated detection of correlated anomaly subgraphs.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="scenario spec (gen) or run manifest (run, eval), JSON")
    p.add_argument("--seed", type=int, help="rng seed; overrides the config value")
    p.add_argument("--alpha", type=float, help="significance level (default 0.15)")
    p.add_argument("--sigma", type=float, help="alignment probability threshold (default 0.8)")
    p.add_argument("--lambda", dest="lam", type=float, help="weight of the alignment term (default 1)")
    p.add_argument("--theta", type=float, help="coalition tolerance (default 0.75)")
    p.add_argument("--statistic", choices=["bj", "hc", "BJ", "HC"], help="scan statistic (default bj)")
    p.add_argument("--max-rounds", type=int, help="round cap (default 20)")
    p.add_argument("--profile", choices=sorted(PROFILES), help="parameter preset applied before other flags")
    p.add_argument("--out", help="output directory (pvalues: directory or .tsv file)")
    p.add_argument("--result", help="result.json for eval and report")
    p.add_argument("--truth", help="truth file for eval (default: from the manifest)")
    p.add_argument("--history", help="history CSV for pvalues")
    p.add_argument("--t", type=int, help="1-based snapshot index for pvalues (default: last)")
    p.add_argument("--workers", type=int, default=1, help="threads for participants in run")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("FEDSCAN_LOG_LEVEL", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except PrivacyError as exc:
        print(f"privacy violation: {exc}", file=sys.stderr)
        return EXIT_PRIVACY
    except (InputError, ContractError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TypeError as exc:
        # e.g. a config field of the wrong type
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
