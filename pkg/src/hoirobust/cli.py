"""Command-line entry point.

One binary, six subcommands: evaluate, robustness, errors, augment, filter,
f4m-check.  Every run writes a JSON report carrying the resolved
configuration and, where applicable, derived CSV/SVG views next to it.

Exit codes: 0 success, 1 configuration error (bad flags, unknown subcommand,
missing paths), 2 data error (unreadable or invalid input content), 3
internal invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from .benchfilter import (
    FilterScores,
    FilterThresholds,
    apply_filters,
    filtered_manifest,
    load_exclusion_list,
    load_object_detections,
    load_vl_scores,
)
from .cma import CorruptionSpec, MixupConfig, build_augmented_dataset
from .cma.builder import PAIRING_POLICIES
from .core import (
    ConfigError,
    DataError,
    SchemaError,
    load_dataset,
    load_detections,
    load_json,
    load_manifest,
    manifest_to_dict,
    write_json,
)
from .errors import ERROR_TYPES, breakdown, breakdown_from_dict, compare_domains
from .evaluation import SETTINGS, evaluate
from .f4m import F4MConfig, f4m_check, vfm_output_from_dict
from .plots import bar_chart_svg, scatter_svg
from .robustness import UndefinedRatioError, fleet_report, parse_pairs
from . import __version__

SCHEMA_VERSION = "1"

log = logging.getLogger("hoirobust")


class _Parser(argparse.ArgumentParser):
    """Bad flags and unknown subcommands become ConfigError (exit 1)."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(f"{message}\n{self.format_usage()}")


def _positive_seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits, "
                                         f"got {value}")
    return value


def _grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"grid must look like 2x2, got {text!r}")
    return int(parts[0]), int(parts[1])


def _default_workers() -> int:
    env = os.environ.get("HOIROBUST_WORKERS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"HOIROBUST_WORKERS must be an integer, "
                              f"got {env!r}") from exc
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hoirobust",
                     description="HOI-detection robustness toolkit")
    parser.add_argument("--version", action="version",
                        version=f"hoirobust {__version__} "
                                f"(schema {SCHEMA_VERSION})")
    sub = parser.add_subparsers(dest="command", metavar="subcommand")
    parser.set_defaults(handler=None)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", required=True, help="output path")
        p.add_argument("--log-level", default="warning",
                       choices=("debug", "info", "warning", "error"))

    p = sub.add_parser("evaluate", help="triplet mAP for one detection file")
    p.add_argument("--dataset", required=True)
    p.add_argument("--detections", required=True)
    p.add_argument("--setting", default="default",
                   choices=("default", "ko", "known_object"))
    p.add_argument("--iou", type=float, default=0.5)
    common(p)
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("robustness", help="RR/RRM table for a method fleet")
    p.add_argument("--pairs", required=True)
    p.add_argument("--mean-rr", type=float, default=None,
                   help="pin the fleet-mean RR instead of computing it")
    common(p)
    p.set_defaults(handler=cmd_robustness)

    p = sub.add_parser("errors", help="false-positive error-type breakdown")
    p.add_argument("--dataset", required=True)
    p.add_argument("--detections", required=True)
    p.add_argument("--setting", default="default",
                   choices=("default", "ko", "known_object"))
    p.add_argument("--iou", type=float, default=0.5)
    p.add_argument("--compare", default=None,
                   help="breakdown (or report) JSON to diff against")
    common(p)
    p.set_defaults(handler=cmd_errors)

    p = sub.add_parser("augment", help="build a corrupted/mixed dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--images", required=True, help="source image directory")
    p.add_argument("--specs", required=True,
                   help='JSON list of {"kind", "severity"}')
    p.add_argument("--mix", default="on", choices=("on", "off"))
    p.add_argument("--alpha", type=float, default=1.5)
    p.add_argument("--pi-c", type=float, default=0.3)
    p.add_argument("--patch", type=int, default=32)
    p.add_argument("--seed", type=_positive_seed, default=0)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--pairing", default="original-synthesized",
                   choices=PAIRING_POLICIES)
    p.add_argument("--workers", type=int, default=None,
                   help="default: HOIROBUST_WORKERS or all cores")
    common(p)
    p.set_defaults(handler=cmd_augment)

    p = sub.add_parser("filter", help="benchmark sample-filter decisions")
    p.add_argument("--manifest", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--vl-scores", required=True)
    p.add_argument("--detections", required=True,
                   help="comma-separated per-domain detection files "
                        "(the original pass included)")
    p.add_argument("--exclude", default=None, help="manual exclusion list")
    p.add_argument("--tau-vl", type=float, default=0.25)
    p.add_argument("--tau-f1", type=float, default=0.5)
    p.add_argument("--min-area-ratio", type=float, default=0.005)
    p.add_argument("--iou", type=float, default=0.5)
    common(p)
    p.set_defaults(handler=cmd_filter)

    p = sub.add_parser("f4m-check", help="token-fusion kernel self-checks")
    p.add_argument("--query-type", type=int, default=4, choices=(1, 2, 3, 4))
    p.add_argument("--grid", type=_grid, default=(2, 2), metavar="RxC")
    p.add_argument("--pi-f", type=float, default=0.5)
    p.add_argument("--seed", type=_positive_seed, default=0)
    p.add_argument("--d-model", type=int, default=32)
    p.add_argument("--num-vfms", type=int, default=1)
    p.add_argument("--d-v", type=int, default=16)
    p.add_argument("--patch-grid", type=_grid, default=(24, 24), metavar="RxC")
    p.add_argument("--vfm-tokens", default=None,
                   help="externally exported token JSON")
    common(p)
    p.set_defaults(handler=cmd_f4m_check)

    return parser


def _require_paths(**named: str | None) -> None:
    """RunConfig invariant: every referenced input path exists at invocation."""
    for flag, value in named.items():
        if value is not None and not Path(value).exists():
            raise ConfigError(f"--{flag}: path does not exist: {value}")


def _write_report(out: str | Path, config: dict, result: dict) -> None:
    write_json(out, {
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "result": result,
        "metadata": {
            "created_at": datetime.now(timezone.utc).isoformat(),
            "tool": "hoirobust",
            "version": __version__,
        },
    })


def _resolve_setting(setting: str) -> str:
    return "known_object" if setting == "ko" else setting


# ---------------------------------------------------------------------------
# subcommands

def cmd_evaluate(args: argparse.Namespace) -> int:
    _require_paths(dataset=args.dataset, detections=args.detections)
    setting = _resolve_setting(args.setting)
    dataset = load_dataset(args.dataset)
    dets = load_detections(args.detections, dataset=dataset)
    report = evaluate(dataset, dets, setting=setting, iou_threshold=args.iou)

    config = {"subcommand": "evaluate", "dataset": args.dataset,
              "detections": args.detections, "setting": setting,
              "iou": args.iou, "out": args.out}
    _write_report(args.out, config, report.to_dict())

    csv_path = Path(args.out).with_suffix(".csv")
    table = dataset.categories
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["category", "interaction", "object", "ap"])
        for c in sorted(report.per_category_ap):
            writer.writerow([c, table.interactions[table.interaction_of(c)],
                             table.objects[table.object_of(c)],
                             f"{report.per_category_ap[c]:.6f}"])

    print(f"setting: {setting}  iou: {args.iou:g}")
    print(f"mAP (full)      {report.map_full:.3f}")
    print(f"mAP (rare)      {report.map_rare:.3f}")
    print(f"mAP (non-rare)  {report.map_nonrare:.3f}")
    print(f"categories evaluated: {len(report.per_category_ap)} "
          f"(zero-GT excluded: {len(report.zero_gt_categories)})")
    return 0


def cmd_robustness(args: argparse.Namespace) -> int:
    _require_paths(pairs=args.pairs)
    rows, per_domain = parse_pairs(load_json(args.pairs))
    fleet = fleet_report(rows, mean_rr_override=args.mean_rr,
                         per_domain=per_domain or None)
    if not fleet.mean_rr_overridden and fleet.rrm:
        residual = abs(sum(fleet.rrm.values()))
        if residual > 1e-9:
            raise AssertionError(f"margins must be zero-sum without an "
                                 f"override; residual {residual}")

    config = {"subcommand": "robustness", "pairs": args.pairs,
              "mean_rr": args.mean_rr, "out": args.out}
    _write_report(args.out, config, fleet.to_dict())

    if fleet.methods:
        scatter_svg([(m.map_h, m.map_r, m.method) for m in fleet.methods],
                    Path(args.out).with_suffix(".svg"),
                    xlabel="original-domain mAP", ylabel="shifted-domain mAP",
                    title="Robustness of the method fleet")

    name_w = max([len(m.method) for m in fleet.methods] + [6])
    print(f"{'method':<{name_w}}  {'map_h':>6}  {'map_r':>6}  {'RR':>6}  RRM(pp)")
    for m in fleet.methods:
        print(f"{m.method:<{name_w}}  {m.map_h:>6.2f}  {m.map_r:>6.2f}  "
              f"{m.rr:>6.4f}  {100 * fleet.rrm[m.method]:+.1f}")
    print(f"mean RR: {fleet.mean_rr:.4f}"
          + ("  (override)" if fleet.mean_rr_overridden else ""))
    return 0


def cmd_errors(args: argparse.Namespace) -> int:
    _require_paths(dataset=args.dataset, detections=args.detections,
                   compare=args.compare)
    setting = _resolve_setting(args.setting)
    dataset = load_dataset(args.dataset)
    dets = load_detections(args.detections, dataset=dataset)
    current = breakdown(dataset, dets, setting=setting, iou_threshold=args.iou)

    result = current.to_dict()
    series = {"current": [current.percentages()[t] for t in ERROR_TYPES]}
    if args.compare is not None:
        raw = load_json(args.compare)
        inner = raw.get("result", raw) if isinstance(raw, dict) else raw
        if not isinstance(inner, dict) or "counts" not in inner:
            raise SchemaError(f"{args.compare}: not a breakdown (no 'counts')")
        other = breakdown_from_dict(inner)
        delta = compare_domains(other, current)
        result["compare"] = {
            "against": args.compare,
            "delta_pp": {t.value: delta[t] for t in ERROR_TYPES},
        }
        series = {"base": [other.percentages()[t] for t in ERROR_TYPES],
                  **series}

    config = {"subcommand": "errors", "dataset": args.dataset,
              "detections": args.detections, "setting": setting,
              "iou": args.iou, "compare": args.compare, "out": args.out}
    _write_report(args.out, config, result)

    bar_chart_svg([t.value for t in ERROR_TYPES], series,
                  Path(args.out).with_suffix(".svg"),
                  ylabel="share of false positives (%)",
                  title="Error-type breakdown")

    print(f"{'error type':<16}  {'count':>6}  {'share':>7}")
    pct = current.percentages()
    for t in ERROR_TYPES:
        print(f"{t.value:<16}  {current.counts.get(t, 0):>6}  {pct[t]:>6.1f}%")
    print(f"total FPs: {current.total_fp}  missed GTs: {current.missed_gt}")
    return 0


def cmd_augment(args: argparse.Namespace) -> int:
    _require_paths(dataset=args.dataset, images=args.images, specs=args.specs)
    dataset = load_dataset(args.dataset)
    raw_specs = load_json(args.specs)
    if not isinstance(raw_specs, list):
        raise SchemaError(f"{args.specs}: expected a JSON list of specs")
    specs = []
    for k, item in enumerate(raw_specs):
        if not isinstance(item, dict) or \
                not {"kind", "severity"} <= item.keys():
            raise SchemaError(f"{args.specs}[{k}]: needs 'kind' and 'severity'")
        specs.append(CorruptionSpec(kind=item["kind"],
                                    severity=int(item["severity"])))
    cfg = MixupConfig(alpha=args.alpha, pi_c=args.pi_c,
                      patch_size=args.patch, seed=args.seed)
    workers = args.workers if args.workers is not None else _default_workers()
    summary = build_augmented_dataset(
        dataset, args.images, specs, cfg, pairing=args.pairing,
        out_dir=args.out, count=args.count, mix=args.mix == "on",
        workers=workers)

    config = {"subcommand": "augment", "dataset": args.dataset,
              "images": args.images, "specs": args.specs, "mix": args.mix,
              "alpha": args.alpha, "pi_c": args.pi_c, "patch": args.patch,
              "seed": args.seed, "count": args.count, "pairing": args.pairing,
              "workers": workers, "out": args.out}
    _write_report(Path(args.out) / "report.json", config, summary.to_dict())

    print(f"emitted {len(summary.emitted)} samples to {summary.image_dir}")
    print(f"annotations: {summary.annotation_path}")
    print(f"provenance:  {summary.provenance_path}")
    if summary.failures:
        print(f"failures: {len(summary.failures)} (see report)")
    return 0


def cmd_filter(args: argparse.Namespace) -> int:
    _require_paths(manifest=args.manifest, dataset=args.dataset,
                   vl_scores=args.vl_scores, exclude=args.exclude)
    det_paths = [p for p in args.detections.split(",") if p]
    if not det_paths:
        raise ConfigError("--detections: need at least one file")
    for path in det_paths:
        _require_paths(detections=path)

    manifest = load_manifest(args.manifest)
    dataset = load_dataset(args.dataset)
    detections: dict[tuple[str, str], tuple] = {}
    for path in det_paths:
        domain, per_base = load_object_detections(path)
        for base, objs in per_base.items():
            detections[base, domain] = objs
    scores = FilterScores(vl_scores=load_vl_scores(args.vl_scores),
                          detections=detections)
    thresholds = FilterThresholds(tau_vl=args.tau_vl, tau_f1=args.tau_f1,
                                  min_area_ratio=args.min_area_ratio,
                                  iou_threshold=args.iou)
    exclusions = load_exclusion_list(args.exclude) if args.exclude else ()
    decision = apply_filters(manifest, dataset, scores, thresholds, exclusions)
    kept_manifest = filtered_manifest(manifest, decision)
    for entry in kept_manifest.copies:
        if entry.base in decision.discarded:
            raise AssertionError(f"discarded base {entry.base!r} leaked into "
                                 f"the filtered manifest")

    manifest_path = Path(args.out).with_name(
        Path(args.out).stem + "_manifest.json")
    write_json(manifest_path, manifest_to_dict(kept_manifest))

    config = {"subcommand": "filter", "manifest": args.manifest,
              "dataset": args.dataset, "vl_scores": args.vl_scores,
              "detections": det_paths, "exclude": args.exclude,
              "out": args.out, **thresholds.to_dict()}
    result = {"thresholds": thresholds.to_dict(),
              "decision": decision.to_dict(),
              "filtered_manifest": str(manifest_path)}
    _write_report(args.out, config, result)

    reasons: dict[str, int] = {}
    for reason in decision.discarded.values():
        reasons[reason] = reasons.get(reason, 0) + 1
    print(f"kept {len(decision.kept)} of "
          f"{len(decision.kept) + len(decision.discarded)} base samples")
    for reason in ("vl", "consistency", "small_object", "manual"):
        if reason in reasons:
            print(f"  discarded by {reason}: {reasons[reason]}")
    print(f"filtered manifest: {manifest_path}")
    return 0


def cmd_f4m_check(args: argparse.Namespace) -> int:
    _require_paths(vfm_tokens=args.vfm_tokens)
    cfg = F4MConfig(query_type=args.query_type, grid=args.grid, pi_f=args.pi_f,
                    d_model=args.d_model, num_vfms=args.num_vfms,
                    seed=args.seed, d_v=args.d_v, patch_grid=args.patch_grid)
    tokens = None
    if args.vfm_tokens is not None:
        tokens = vfm_output_from_dict(load_json(args.vfm_tokens))
    report = f4m_check(cfg, tokens)

    config = {"subcommand": "f4m-check", "vfm_tokens": args.vfm_tokens,
              "out": args.out, **report["config"]}
    _write_report(args.out, config, report)

    for name, entry in report["checks"].items():
        state = "SKIP" if entry.get("skipped") else \
            ("PASS" if entry["passed"] else "FAIL")
        print(f"{state}  {name}")
    if report["config_error"] is not None:
        raise ConfigError(report["config_error"])
    if not report["passed"]:
        print("verdict: FAILED", file=sys.stderr)
        return 3
    print("verdict: passed")
    return 0


# ---------------------------------------------------------------------------

def main(argv: Sequence[str] | None = None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if args.handler is None:
            raise ConfigError(f"a subcommand is required\n"
                              f"{parser.format_usage()}")
        logging.basicConfig(level=getattr(logging, args.log_level.upper()),
                            format="%(levelname)s %(name)s: %(message)s",
                            stream=sys.stderr)
        return args.handler(args)
    except SystemExit as exc:  # argparse --version / --help
        return exc.code if isinstance(exc.code, int) else 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (DataError, UndefinedRatioError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - last-resort mapping
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
