"""Benchmark grid runner, alpha/theta sweep, and CSV emission."""
from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from driftbench.baselines import CentroidDistanceDetector, cddd_sensitivity, supervised_protocol
from driftbench.baselines.protocol import make_supervised
from driftbench.harness.config import ExperimentConfig, SweepSpec
from driftbench.metrics import evaluate, mean_ranks, minmax_normalize, nemenyi_cd, NEMENYI_Q05
from driftbench.padd import PaddDetector, PaddParams, detector_seed
from driftbench.projector import forward
from driftbench.stats import wilcoxon_signed_rank
from driftbench.stream_gen import StreamSpec, generate_stream, stream_grid

log = logging.getLogger(__name__)

DETECTION_FIELDS = ["detector", "stream_id", "replication", "chunk"]
METRIC_FIELDS = ["dynamics", "n_drifts", "n_features", "detector", "replication", "d1", "d2", "r"]
MEASURES = ("d1", "d2", "r")


def padd_params_for(spec: StreamSpec, overrides: dict) -> PaddParams:
    """Table preset for the stream's dynamics, then flat overrides, then
    per-dynamics overrides (``{"sudden": {...}}``)."""
    flat = {k: v for k, v in overrides.items() if k not in ("sudden", "gradual")}
    flat.update(overrides.get(spec.dynamics, {}))
    return PaddParams.for_dynamics(spec.dynamics).with_(**flat)


def run_detector(name: str, chunks, spec: StreamSpec, base_seed: int, replication: int,
                 params: dict | None = None, reset_classifier: bool = True) -> list[int]:
    params = dict(params or {})
    if name == "padd":
        seed = detector_seed(base_seed, spec.stream_id, replication, "padd")
        detector = PaddDetector(padd_params_for(spec, params), spec.n_features, seed)
        for chunk in chunks:
            detector.update(chunk.features, chunk.index)
        return detector.detections
    if name == "cddd":
        detector = CentroidDistanceDetector(
            sensitivity=params.get("sensitivity", cddd_sensitivity(spec.n_drifts)),
            warmup=params.get("warmup", 3),
        )
        for chunk in chunks:
            detector.update(chunk.features, chunk.index)
        return detector.detections
    return supervised_protocol(chunks, make_supervised(name, **params), reset_classifier=reset_classifier)


@dataclass(frozen=True)
class _Task:
    spec: StreamSpec
    replication: int
    detectors: tuple[str, ...]
    base_seed: int
    detector_params: dict
    reset_classifier: bool


def _run_task(task: _Task) -> list[tuple[str, list[int] | None]]:
    chunks = generate_stream(task.spec).chunks()
    out = []
    for name in task.detectors:
        try:
            dets = run_detector(name, chunks, task.spec, task.base_seed, task.replication,
                                task.detector_params.get(name), task.reset_classifier)
        except Exception:
            log.exception("detector %s failed on %s rep %d", name, task.spec.stream_id, task.replication)
            dets = None
        out.append((name, dets))
    return out


def _map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=1))


def _fmt(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return repr(float(value)) if isinstance(value, (float, np.floating)) else str(value)


def _write_csv(path: Path, header: list[str], rows) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        path.write_text(buf.getvalue())
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


@dataclass
class BenchmarkResult:
    detections: list[tuple]
    metrics: list[dict]
    ranks: list[tuple]
    paths: dict[str, Path]


def run_benchmark(config: ExperimentConfig, out_dir: str | Path | None = None,
                  jobs: int | None = None) -> BenchmarkResult:
    """Run every (stream, replication, detector) of the grid and write
    ``detections.csv``, ``metrics.csv`` and ``ranks.csv``."""
    out_dir = Path(out_dir or config.out)
    jobs = jobs or config.jobs
    grid = stream_grid(config.dynamics, config.n_drifts, config.n_features,
                       config.replications, config.base_seed, **config.stream_overrides())
    tasks = [
        _Task(spec, rep, config.detectors, config.base_seed, config.detector_params, config.reset_classifier)
        for spec, rep in grid
    ]
    results = _map(_run_task, tasks, jobs)

    detections, metrics = [], []
    for task, per_detector in zip(tasks, results):
        spec = task.spec
        centers = generate_stream(spec).schedule.centers
        for name, dets in per_detector:
            if dets is None:
                continue
            detections.extend((name, spec.stream_id, task.replication, k) for k in dets)
            if centers:
                ev = evaluate(dets, centers)
                d1v, d2v, rv = ev.d1, ev.d2, ev.r_err
            else:
                d1v = d2v = rv = None
            metrics.append({
                "dynamics": spec.dynamics, "n_drifts": spec.n_drifts, "n_features": spec.n_features,
                "detector": name, "replication": task.replication, "d1": d1v, "d2": d2v, "r": rv,
            })
    ranks = rank_rows(metrics)
    paths = {
        "detections": _write_csv(out_dir / "detections.csv", DETECTION_FIELDS, detections),
        "metrics": _write_csv(out_dir / "metrics.csv", METRIC_FIELDS, ([m[f] for f in METRIC_FIELDS] for m in metrics)),
        "ranks": _write_csv(out_dir / "ranks.csv", ["measure", "method", "mean_rank"], ranks),
    }
    return BenchmarkResult(detections, metrics, ranks, paths)


def error_table(metrics: list[dict], measure: str, unit: str = "config"):
    """Methods x datasets table of one measure.

    ``unit="config"`` averages the defined values of each stream
    configuration over replications (undefined only if every replication
    is); ``unit="run"`` treats each (configuration, replication) as a dataset.
    """
    methods = list(dict.fromkeys(m["detector"] for m in metrics))
    if unit == "config":
        key = lambda m: (m["dynamics"], m["n_drifts"], m["n_features"])  # noqa: E731
    elif unit == "run":
        key = lambda m: (m["dynamics"], m["n_drifts"], m["n_features"], m["replication"])  # noqa: E731
    else:
        raise ValueError(f"unknown ranking unit {unit!r}")
    datasets = list(dict.fromkeys(key(m) for m in metrics))
    cells: dict[tuple, list[float]] = {}
    for m in metrics:
        v = m[measure]
        bucket = cells.setdefault((m["detector"], key(m)), [])
        if v is not None and v != "":
            bucket.append(float(v))
    table = np.full((len(methods), len(datasets)), np.nan)
    for i, method in enumerate(methods):
        for j, ds in enumerate(datasets):
            vals = cells.get((method, ds))
            if vals:
                table[i, j] = float(np.mean(vals))
    return methods, datasets, table


def rank_rows(metrics: list[dict], unit: str = "config") -> list[tuple]:
    """``(measure, method, mean_rank)`` rows plus a ``(measure, "CD", value)``
    row per measure. Methods with undefined cells get an empty rank."""
    rows = []
    if not metrics:
        return rows
    for measure in MEASURES:
        methods, datasets, table = error_table(metrics, measure, unit)
        keep = [i for i in range(len(methods)) if not np.isnan(table[i]).any()]
        ranks = {}
        if len(keep) >= 1:
            mr = mean_ranks(table[keep], [methods[i] for i in keep])
            ranks = {methods[i]: float(r) for i, r in zip(keep, mr)}
        for method in methods:
            rows.append((measure, method, ranks.get(method)))
        if len(keep) in NEMENYI_Q05:
            rows.append((measure, "CD", nemenyi_cd(len(keep), len(datasets))))
    return rows


def wilcoxon_rows(metrics: list[dict], unit: str = "config") -> list[tuple]:
    """Pairwise two-sided Wilcoxon signed-rank p-values between fully defined methods."""
    rows = []
    for measure in MEASURES:
        methods, datasets, table = error_table(metrics, measure, unit)
        keep = [i for i in range(len(methods)) if not np.isnan(table[i]).any()]
        if len(datasets) < 5:
            continue
        for i, j in combinations(keep, 2):
            rows.append((measure, methods[i], methods[j], wilcoxon_signed_rank(table[i], table[j])))
    return rows


def _sweep_task(args) -> np.ndarray:
    """All (alpha, theta) cells for one stream replication.

    Returns an array ``(n_alpha, n_theta, 4)``: n_detections, d1, d2, r.
    """
    spec, replication, base_seed, alphas, thetas = args
    stream = generate_stream(spec)
    chunks, centers = stream.chunks(), stream.schedule.centers
    seed = detector_seed(base_seed, spec.stream_id, replication, "padd")
    base = PaddParams.for_dynamics(spec.dynamics)
    net = PaddDetector(base, spec.n_features, seed).net
    activations = [forward(net, c.features) for c in chunks]
    out = np.full((len(alphas), len(thetas), 4), np.nan)
    for i, alpha in enumerate(alphas):
        for j, theta in enumerate(thetas):
            det = PaddDetector(base.with_(alpha=alpha, theta=theta), spec.n_features, seed, net=net)
            for k, act in enumerate(activations):
                det.update_activations(act, k)
            ev = evaluate(det.detections, centers)
            out[i, j] = [ev.n_detections,
                         np.nan if ev.d1 is None else ev.d1,
                         np.nan if ev.d2 is None else ev.d2,
                         np.nan if ev.r_err is None else ev.r_err]
    return out


@dataclass
class SweepResult:
    family: str
    alphas: tuple[float, ...]
    thetas: tuple[float, ...]
    matrices: dict[str, np.ndarray]
    normalized: dict[str, np.ndarray]
    cells: np.ndarray
    paths: dict[str, Path]


def _write_matrix(path: Path, alphas, thetas, matrix) -> Path:
    rows = ([a, *row] for a, row in zip(alphas, matrix))
    return _write_csv(path, ["alpha/theta", *[repr(float(t)) for t in thetas]], rows)


def run_sweep(sweep: SweepSpec, config: ExperimentConfig, out_dir: str | Path | None = None,
              jobs: int | None = None) -> list[SweepResult]:
    """PADD over an alpha x theta grid for every sweep stream family.

    Writes, per family, ``d1.csv``/``d2.csv``/``r.csv`` (alpha rows, theta
    columns, mean over replications of defined values, empty when no
    replication detected anything), ``normalized.csv`` with each measure
    min-max scaled to [0, 1], and ``cells.csv`` with per-replication values.
    """
    out_dir = Path(out_dir or config.out) / "sweep"
    jobs = jobs or config.jobs
    reps = sweep.replications if sweep.replications is not None else config.replications
    grid = stream_grid(sweep.dynamics, (sweep.n_drifts,), sweep.n_features, reps,
                       config.base_seed, **config.stream_overrides())
    args = [(spec, rep, config.base_seed, sweep.alphas, sweep.thetas) for spec, rep in grid]
    cell_blocks = _map(_sweep_task, args, jobs)

    results = []
    families = list(dict.fromkeys(spec.stream_id for spec, _ in grid))
    for family in families:
        idx = [i for i, (spec, _) in enumerate(grid) if spec.stream_id == family]
        if idx:
            stack = np.stack([cell_blocks[i] for i in idx])
        else:
            stack = np.full((0, len(sweep.alphas), len(sweep.thetas), 4), np.nan)
        matrices = {}
        for m, measure in enumerate(MEASURES, start=1):
            vals = stack[..., m]
            with np.errstate(invalid="ignore"):
                defined = (~np.isnan(vals)).sum(axis=0)
                summed = np.nansum(vals, axis=0)
                matrices[measure] = np.where(defined > 0, summed / np.maximum(defined, 1), np.nan)
        normalized = {k: minmax_normalize(v) for k, v in matrices.items()}
        fam_dir = out_dir / family
        paths = {k: _write_matrix(fam_dir / f"{k}.csv", sweep.alphas, sweep.thetas, v) for k, v in matrices.items()}
        norm_rows = (
            (a, t, normalized["d1"][i, j], normalized["d2"][i, j], normalized["r"][i, j])
            for i, a in enumerate(sweep.alphas) for j, t in enumerate(sweep.thetas)
        )
        paths["normalized"] = _write_csv(fam_dir / "normalized.csv", ["alpha", "theta", "d1", "d2", "r"], norm_rows)
        cell_rows = (
            (a, t, grid[g][1], int(stack[n, i, j, 0]), *stack[n, i, j, 1:])
            for n, g in enumerate(idx)
            for i, a in enumerate(sweep.alphas) for j, t in enumerate(sweep.thetas)
        )
        paths["cells"] = _write_csv(fam_dir / "cells.csv",
                                    ["alpha", "theta", "replication", "n_detections", "d1", "d2", "r"], cell_rows)
        results.append(SweepResult(family, sweep.alphas, sweep.thetas, matrices, normalized, stack, paths))
    return results


def read_metrics_csv(path: str | Path) -> list[dict]:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            for f in ("d1", "d2", "r"):
                row[f] = float(row[f]) if row[f] != "" else None
            rows.append(row)
    return rows
