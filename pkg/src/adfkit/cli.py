"""Command-line entry point.

Orchestrates the pipeline end to end: population synthesis, raw filtering,
fingerprint dataset construction, attribute statistics, classifier training,
vulnerability reporting, block-set selection, countermeasure simulation and
chart emission. `serve` runs the ingestion service; `post` is a thin client
that replays sample files against it.

Exit codes: 0 ok, 2 usage, 3 data error, 4 internal error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from . import countermeasures as cm
from . import datasets, manifest, metrics, stats, synth
from .classifier import Hyperparams, save_classifier, train
from .classifier.training import assign_measured_uniqueness
from .errors import AdfkitError
from .fingerprint import build_fingerprint_dataset, count_singletons, filter_raw
from .registry import load_registry

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4


def _fail(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--registry", default="adf-v1", help="registry tag or JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".", help="directory for outputs and run manifests")
    p.add_argument("--config", default=None, help="JSON config file (service settings)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adfkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic population")
    _add_common(p)
    p.add_argument("--out", required=True, help="output sample JSONL")
    p.add_argument("--spec", default=None, help="population spec JSON (default: benchmark)")
    p.add_argument("--n-samples", type=int, default=50_000)

    p = sub.add_parser("serve", help="run the ingestion service")
    _add_common(p)
    p.add_argument("--listen", default=None, help="host:port (overrides config)")
    p.add_argument("--storage-dir", default=None)

    p = sub.add_parser("post", help="POST samples from a JSONL file to a running service")
    _add_common(p)
    p.add_argument("--endpoint", required=True, help="base URL, e.g. http://127.0.0.1:8300")
    p.add_argument("--samples", required=True)

    p = sub.add_parser("filter", help="apply the raw filters (ad-ID, DNT, completeness)")
    _add_common(p)
    p.add_argument("--samples", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("fingerprint", help="build the fingerprint dataset")
    _add_common(p)
    p.add_argument("--samples", required=True, help="filtered sample JSONL")
    p.add_argument("--out", required=True, help="output group JSONL")

    p = sub.add_parser("stats", help="attribute discrimination statistics")
    _add_common(p)
    p.add_argument("--groups", required=True)
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--weight-by-samples", action="store_true")

    p = sub.add_parser("train", help="train the uniqueness classifier")
    _add_common(p)
    p.add_argument("--groups", required=True)
    p.add_argument("--channel", choices=["web", "app"], default="web")
    p.add_argument("--model-out", required=True)
    p.add_argument("--groups-out", default=None, help="groups with measured uniqueness")
    p.add_argument("--metrics-out", default=None, help="per-fold accuracy/AUC CSV")
    p.add_argument("--k-folds", type=int, default=5)
    p.add_argument("--n-rounds", type=int, default=200)
    p.add_argument("--max-depth", type=int, default=6)
    p.add_argument("--learning-rate", type=float, default=0.1)

    p = sub.add_parser("report", help="vulnerability metrics per configuration")
    _add_common(p)
    p.add_argument("--groups", required=True, help="groups with measured uniqueness")
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--shares", default=None, help="market share CSV for extrapolation")

    p = sub.add_parser("select", help="select a block set from a stats CSV")
    _add_common(p)
    p.add_argument("--stats", required=True)
    p.add_argument("--out", required=True, help="output policy JSON")
    p.add_argument("--cardinality-min", type=int, default=25)
    p.add_argument("--entropy-min", type=float, default=0.10)
    p.add_argument("--defaults", action="store_true", help="use the documented overrides")

    p = sub.add_parser("simulate", help="evaluate blocking policies")
    _add_common(p)
    p.add_argument("--samples", required=True, help="filtered sample JSONL")
    p.add_argument("--policy", action="append", required=True,
                   help="policy JSON file, or built-ins 'shieldf'/'identity' (repeatable)")
    p.add_argument("--channel", choices=["web", "app"], default="web")
    p.add_argument("--out", required=True, help="comparison CSV")
    p.add_argument("--k-folds", type=int, default=5)
    p.add_argument("--n-rounds", type=int, default=200)

    p = sub.add_parser("plot", help="emit charts from report CSVs")
    _add_common(p)
    p.add_argument("--report", default=None, help="vulnerability report CSV")
    p.add_argument("--comparison", default=None, help="policy comparison CSV")
    p.add_argument("--out", required=True, help="output image (png/svg)")
    return parser


def _resolve_policy(token: str, reg, channel: str) -> cm.BlockingPolicy:
    if token == "shieldf":
        return cm.shieldf_policy(reg, channel)
    if token == "identity":
        return cm.identity_policy()
    return cm.policy_from_json(Path(token))


def _write_comparison_csv(rows: list[dict], path: str) -> None:
    header = ["policy", "device_type", "os", "agent", "channel",
              "TV", "MV", "A", "dTV_pct", "dMV_pct", "dA_pct"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=header)
        writer.writeheader()
        for row in rows:
            out = dict(row)
            for key in ("TV", "MV", "A"):
                out[key] = f"{out[key]:.6f}"
            for key in ("dTV_pct", "dMV_pct", "dA_pct"):
                out[key] = "" if out[key] is None else f"{out[key]:.2f}"
            writer.writerow(out)


def run(args: argparse.Namespace) -> int:
    started = time.monotonic()
    reg = load_registry(args.registry)
    outputs: list[str] = []
    inputs: list[str] = []
    summary: dict = {}

    if args.command == "synth":
        inputs = [args.spec] if args.spec else []
        if args.spec:
            doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
            spec, dists = _population_from_json(doc, reg)
            spec.seed = args.seed
            samples = synth.generate(spec, dists, reg)
        else:
            samples = synth.default_benchmark(reg, n_samples=args.n_samples, seed=args.seed)
        datasets.write_samples_jsonl(samples, args.out)
        outputs = [args.out]
        summary = {"n_samples": len(samples)}

    elif args.command == "serve":
        from .service import ServiceConfig, create_app

        cfg = ServiceConfig.load(args.config)
        if args.listen:
            cfg.listen = args.listen
        if args.storage_dir:
            cfg.storage_dir = args.storage_dir
        cfg.registry = args.registry
        import uvicorn

        host, _, port = cfg.listen.partition(":")
        app = create_app(cfg, registry=reg)
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8300), log_level="warning")
        return EXIT_OK  # unreachable in practice; uvicorn blocks

    elif args.command == "post":
        import httpx

        inputs = [args.samples]
        samples = datasets.read_samples_jsonl(args.samples, reg)
        results: dict[str, int] = {}
        with httpx.Client(base_url=args.endpoint, timeout=10.0) as client:
            for sample in samples:
                payload = {
                    "schema_version": "1",
                    "device_type": sample.config.device_type,
                    "os": sample.config.os,
                    "agent": sample.config.agent,
                    "channel": sample.config.channel,
                    "ad_id": sample.ad_id,
                    "dnt": sample.dnt,
                    "attributes": sample.attributes,
                }
                resp = client.post("/v1/collect", json=payload)
                status = resp.json().get("status", "error")
                results[status] = results.get(status, 0) + 1
        summary = results
        print(json.dumps(results))

    elif args.command == "filter":
        inputs = [args.samples]
        samples = datasets.read_samples_jsonl(args.samples, reg)
        kept = filter_raw(samples)
        datasets.write_samples_jsonl(kept, args.out)
        outputs = [args.out]
        summary = {"n_in": len(samples), "n_kept": len(kept)}

    elif args.command == "fingerprint":
        inputs = [args.samples]
        samples = datasets.read_samples_jsonl(args.samples, reg)
        groups = build_fingerprint_dataset(samples, reg)
        datasets.write_groups_jsonl(groups, args.out)
        outputs = [args.out]
        summary = {
            "n_samples": len(samples),
            "n_groups": len(groups),
            "n_singletons_discarded": count_singletons(samples, reg),
        }

    elif args.command == "stats":
        inputs = [args.groups]
        groups = datasets.read_groups_jsonl(args.groups)
        report = stats.compute_stats(groups, reg, weight_by_samples=args.weight_by_samples)
        stats.write_stats_csv(report, args.out)
        outputs = [args.out]
        summary = {
            "n_rows": len(report.rows),
            "reported_counts": {
                "/".join(k): v for k, v in report.reported_count_per_config.items()
            },
        }

    elif args.command == "train":
        inputs = [args.groups]
        groups = datasets.read_groups_jsonl(args.groups)
        params = Hyperparams(
            n_rounds=args.n_rounds,
            max_depth=args.max_depth,
            learning_rate=args.learning_rate,
        )
        clf = train(groups, reg, args.channel, params, k_folds=args.k_folds, seed=args.seed)
        save_classifier(clf, args.model_out)
        outputs = [args.model_out]
        if args.groups_out:
            assign_measured_uniqueness(groups, clf)
            labeled = [g for g in groups if g.measured_uniqueness is not None]
            datasets.write_groups_jsonl(labeled, args.groups_out)
            outputs.append(args.groups_out)
        if args.metrics_out:
            with open(args.metrics_out, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["fold", "accuracy", "auc", "n_test"])
                for m in clf.cv_metrics:
                    writer.writerow([m.fold, f"{m.accuracy:.6f}", f"{m.auc:.6f}", m.n_test])
            outputs.append(args.metrics_out)
        summary = {
            "mean_cv_accuracy": sum(m.accuracy for m in clf.cv_metrics) / len(clf.cv_metrics),
            "n_groups": len(clf.oof_labels),
        }

    elif args.command == "report":
        inputs = [args.groups]
        groups = datasets.read_groups_jsonl(args.groups)
        reports = metrics.vulnerability_by_config(groups)
        metrics.write_reports_csv(reports, args.out)
        outputs = [args.out]
        summary = {
            "/".join(k): {"TV": r.tv, "MV": r.mv, "A": r.accuracy}
            for k, r in reports.items()
        }
        if args.shares:
            inputs.append(args.shares)
            shares = metrics.read_shares_csv(args.shares)
            summary["extrapolated_mv"] = metrics.extrapolate(reports, shares)
        print(json.dumps(summary, indent=2))

    elif args.command == "select":
        inputs = [args.stats]
        report = stats.read_stats_csv(args.stats)
        cfg = cm.shieldf_selector_config() if args.defaults else cm.SelectorConfig()
        cfg.cardinality_min = args.cardinality_min
        cfg.entropy_min = args.entropy_min
        policy = cm.select_blockset(report, cfg)
        Path(args.out).write_text(cm.policy_to_json(policy), encoding="utf-8")
        outputs = [args.out]
        summary = {"blocked": sorted(policy.blocked)}
        print(json.dumps(summary, indent=2))

    elif args.command == "simulate":
        inputs = [args.samples]
        samples = datasets.read_samples_jsonl(args.samples, reg)
        samples = filter_raw(samples)
        policies = [_resolve_policy(tok, reg, args.channel) for tok in args.policy]
        params = Hyperparams(n_rounds=args.n_rounds)
        rows = cm.benchmark_masks(
            samples, policies, reg, args.channel, params,
            k_folds=args.k_folds, seed=args.seed,
        )
        _write_comparison_csv(rows, args.out)
        outputs = [args.out]
        summary = {"n_policies": len(policies), "n_rows": len(rows)}

    elif args.command == "plot":
        from . import plots

        if not args.report and not args.comparison:
            raise AdfkitError("plot needs --report or --comparison")
        if args.report:
            inputs = [args.report]
            plots.plot_vulnerability(args.report, args.out)
        else:
            inputs = [args.comparison]
            plots.plot_comparison(args.comparison, args.out)
        outputs = [args.out]

    manifest.write_manifest(
        out_dir=args.out_dir,
        command=args.command,
        config={k: v for k, v in vars(args).items() if k != "command"},
        registry_version=reg.version,
        seed=getattr(args, "seed", None),
        inputs=[str(p) for p in inputs if p],
        outputs=[str(p) for p in outputs],
        metrics=summary,
        wall_clock_s=round(time.monotonic() - started, 3),
    )
    return EXIT_OK


def _population_from_json(doc: dict, reg) -> tuple[synth.PopulationSpec, list[synth.AttributeDistSpec]]:
    from .fingerprint import DeviceConfig
    from .metrics import ConfigPattern

    shares = [
        (DeviceConfig(c["device_type"], c["os"], c["agent"], c["channel"]), float(c["share"]))
        for c in doc["configs"]
    ]
    imp = doc.get("impressions", {})
    spec = synth.PopulationSpec(
        n_devices=int(doc["n_devices"]),
        config_shares=shares,
        impressions=synth.ImpressionsSpec(
            kind=imp.get("kind", "geometric"),
            mean=float(imp.get("mean", 3.0)),
            n=int(imp.get("n", 2)),
        ),
        ad_id_report_rate=float(doc.get("ad_id_report_rate", 1.0)),
        loss_rate=float(doc.get("loss_rate", 0.0)),
        seed=int(doc.get("seed", 0)),
    )
    dists = []
    for d in doc.get("distributions", []):
        overrides = []
        for o in d.get("per_config", []):
            pattern = ConfigPattern(
                device_type=o.get("device_type"),
                os=o.get("os"),
                agent=o.get("agent"),
                channel=o.get("channel"),
            )
            overrides.append(
                (
                    pattern,
                    synth.DistOverride(
                        support_size=o.get("support_size"),
                        target_h=o.get("target_h"),
                        report_prob=o.get("report_prob"),
                    ),
                )
            )
        dists.append(
            synth.AttributeDistSpec(
                meta_attribute=d["meta_attribute"],
                support_size=int(d["support_size"]),
                target_h=float(d["target_h"]),
                report_prob=float(d.get("report_prob", 1.0)),
                per_config=overrides,
            )
        )
    if not dists:
        dists = synth.benchmark_dists(reg)
    return spec, dists


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except AdfkitError as exc:
        _fail(exc.__class__.__name__, str(exc))
        return EXIT_DATA
    except (OSError, json.JSONDecodeError) as exc:
        _fail(exc.__class__.__name__, str(exc))
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - defensive
        _fail("InternalError", f"{exc.__class__.__name__}: {exc}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
