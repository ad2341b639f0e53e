"""``drift-bench`` command line entry point.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from driftbench.harness.bench import (
    METRIC_FIELDS,
    _fmt,
    _write_csv,
    rank_rows,
    read_metrics_csv,
    run_benchmark,
    run_sweep,
    wilcoxon_rows,
)
from driftbench.harness.config import ConfigError, ExperimentConfig, config_from_dict, parse_config
from driftbench.metrics import evaluate
from driftbench.stream_gen import dump_stream, generate_stream, stream_grid

log = logging.getLogger("driftbench")


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="JSON experiment configuration")
    p.add_argument("--seed", type=int, help="base seed (overrides the config)")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--jobs", type=int, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drift-bench", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    gen = sub.add_parser("generate", help="dump synthetic streams as CSV + schedule JSON")
    _common(gen)
    gen.add_argument("--dynamics", nargs="+", choices=["sudden", "gradual"])
    gen.add_argument("--drifts", nargs="+", type=int)
    gen.add_argument("--features", nargs="+", type=int)
    gen.add_argument("--replications", type=int)

    run = sub.add_parser("run", help="run the detector benchmark grid")
    _common(run)

    sweep = sub.add_parser("sweep", help="PADD alpha x theta sensitivity sweep")
    _common(sweep)

    ev = sub.add_parser("evaluate", help="score a detections CSV against a schedule")
    ev.add_argument("--detections", type=Path, required=True)
    ev.add_argument("--schedule", type=Path, required=True)
    ev.add_argument("--out", type=Path, help="write metrics CSV here instead of stdout")

    rk = sub.add_parser("ranks", help="mean ranks and Nemenyi CD from a metrics CSV")
    rk.add_argument("--metrics", type=Path, required=True)
    rk.add_argument("--out", type=Path, help="write ranks CSV here instead of stdout")
    rk.add_argument("--unit", choices=["config", "run"], default="config",
                    help="rank per stream configuration (mean over replications) or per run")
    rk.add_argument("--wilcoxon", type=Path, help="also write pairwise Wilcoxon p-values")
    return parser


def load_config(args) -> ExperimentConfig:
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc}") from exc
        doc = json.loads(text) if text.strip() else {}
        if args.seed is not None:
            doc["base_seed"] = args.seed
        config = config_from_dict(doc)
    elif args.seed is not None:
        config = config_from_dict({"base_seed": args.seed})
    else:
        raise UsageError("either --config or --seed is required")
    return config


def _emit(path: Path | None, header, rows):
    if path is not None:
        _write_csv(path, header, rows)
        return
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def cmd_generate(args) -> int:
    config = load_config(args)
    out = args.out or Path(config.out) / "streams"
    grid = stream_grid(
        args.dynamics or config.dynamics,
        args.drifts or config.n_drifts,
        args.features or config.n_features,
        args.replications if args.replications is not None else config.replications,
        config.base_seed,
        **config.stream_overrides(),
    )
    for spec, rep in grid:
        csv_path, _ = dump_stream(generate_stream(spec), out, f"{spec.stream_id}-r{rep}")
        log.info("wrote %s", csv_path)
    return 0


def cmd_run(args) -> int:
    config = load_config(args)
    result = run_benchmark(config, out_dir=args.out, jobs=args.jobs)
    for path in result.paths.values():
        log.info("wrote %s", path)
    return 0


def cmd_sweep(args) -> int:
    config = load_config(args)
    for res in run_sweep(config.sweep, config, out_dir=args.out, jobs=args.jobs):
        for path in res.paths.values():
            log.info("wrote %s", path)
    return 0


def cmd_evaluate(args) -> int:
    schedule = json.loads(args.schedule.read_text())
    centers = schedule["centers"]
    runs: dict[tuple, list[int]] = {}
    with open(args.detections, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["detector"], row["stream_id"], row["replication"])
            runs.setdefault(key, []).append(int(row["chunk"]))
    rows = []
    for (detector, stream_id, rep), chunks in runs.items():
        ev = evaluate(sorted(chunks), centers)
        rows.append((detector, stream_id, rep, ev.d1, ev.d2, ev.r_err))
    _emit(args.out, ["detector", "stream_id", "replication", "d1", "d2", "r"], rows)
    return 0


def cmd_ranks(args) -> int:
    metrics = read_metrics_csv(args.metrics)
    missing = set(METRIC_FIELDS) - set(metrics[0]) if metrics else set()
    if missing:
        raise ConfigError(f"metrics CSV lacks columns {sorted(missing)}")
    _emit(args.out, ["measure", "method", "mean_rank"], rank_rows(metrics, args.unit))
    if args.wilcoxon is not None:
        _write_csv(args.wilcoxon, ["measure", "method_a", "method_b", "p"], wilcoxon_rows(metrics, args.unit))
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "evaluate": cmd_evaluate,
    "ranks": cmd_ranks,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"drift-bench: error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"drift-bench: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
