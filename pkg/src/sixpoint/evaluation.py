"""Misclassification error and batch evaluation reports."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import permutations
from pathlib import Path

import numpy as np

from .errors import SixPointError
from .pipeline import SegmentationConfig, segment
from .trajectories import SequenceRecord, load_trajectories

log = logging.getLogger(__name__)

REPORT_COLUMNS = ("sequence", "category", "motions", "error_pct", "runtime_ms", "seed")
MAX_LABELS = 5
SEQUENCE_SUFFIX = ".traj"
MANIFEST = "manifest.csv"


def misclassification_error(predicted, truth) -> float:
    """Percentage of points mislabelled under the best one-to-one relabelling.

    Exhaustive over label permutations, so at most five distinct labels are
    accepted on either side.
    """
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape or predicted.ndim != 1:
        raise ValueError(f"label arrays differ in shape: {predicted.shape} vs {truth.shape}")
    if predicted.size == 0:
        return 0.0
    p_vals, p_idx = np.unique(predicted, return_inverse=True)
    t_vals, t_idx = np.unique(truth, return_inverse=True)
    if max(len(p_vals), len(t_vals)) > MAX_LABELS:
        raise ValueError(f"at most {MAX_LABELS} distinct labels are supported")
    size = max(len(p_vals), len(t_vals))
    confusion = np.zeros((size, size), dtype=int)
    np.add.at(confusion, (p_idx, t_idx), 1)
    rows = np.arange(size)
    best = max(confusion[rows, list(perm)].sum() for perm in permutations(range(size)))
    return 100.0 * (predicted.size - best) / predicted.size


def median(values) -> float:
    """Median with the usual even-length rule (mean of the two middle values)."""
    v = sorted(values)
    if not v:
        return math.nan
    mid = len(v) // 2
    return float(v[mid]) if len(v) % 2 else 0.5 * (v[mid - 1] + v[mid])


@dataclass
class SequenceResult:
    sequence: str
    category: str
    motions: int
    error_pct: float | None
    runtime_ms: float | None
    seed: int
    failure: str | None = None


@dataclass
class EvaluationReport:
    rows: list[SequenceResult] = field(default_factory=list)

    def errors(self, motions: int | None = None, category: str | None = None) -> list[float]:
        return [
            r.error_pct
            for r in self.rows
            if r.error_pct is not None
            and (motions is None or r.motions == motions)
            and (category is None or r.category == category)
        ]

    def summary(self) -> list[dict]:
        """Mean and median error by (motions, category), by motions, and overall."""
        out = []
        groups = [(None, None)]
        for m in sorted({r.motions for r in self.rows}):
            groups.append((m, None))
            groups.extend((m, c) for c in sorted({r.category for r in self.rows if r.motions == m}))
        for m, c in groups:
            errs = self.errors(m, c)
            out.append({
                "motions": "all" if m is None else m,
                "category": "all" if c is None else c,
                "sequences": len(errs),
                "mean": float(np.mean(errs)) if errs else math.nan,
                "median": median(errs),
            })
        return out

    def histogram(self, motions: int | None = None, bin_width: float = 1.0) -> list[tuple[float, float, int]]:
        errs = self.errors(motions)
        if not errs:
            return []
        edges = np.arange(0.0, max(100.0, max(errs)) + bin_width, bin_width)
        counts, _ = np.histogram(errs, bins=edges)
        return [(float(lo), float(lo + bin_width), int(c)) for lo, c in zip(edges[:-1], counts)]

    def cdf(self, motions: int | None = None) -> list[tuple[float, float]]:
        """(error, fraction of sequences with error <= it) at each observed error."""
        errs = sorted(self.errors(motions))
        n = len(errs)
        return [(e, (i + 1) / n) for i, e in enumerate(errs) if i + 1 == n or errs[i + 1] != e]

    @property
    def failures(self) -> list[SequenceResult]:
        return [r for r in self.rows if r.failure is not None]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in self.rows:
            w.writerow([
                r.sequence,
                r.category,
                r.motions,
                "" if r.error_pct is None else f"{r.error_pct:.6f}",
                "" if r.runtime_ms is None else f"{r.runtime_ms:.1f}",
                r.seed,
            ])
        return buf.getvalue()

    def histogram_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("motions", "bin_lo_pct", "bin_hi_pct", "count"))
        for m in ["all"] + sorted({r.motions for r in self.rows}):
            for lo, hi, c in self.histogram(None if m == "all" else m):
                w.writerow((m, f"{lo:g}", f"{hi:g}", c))
        return buf.getvalue()

    def cdf_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("motions", "error_pct", "fraction"))
        for m in ["all"] + sorted({r.motions for r in self.rows}):
            for e, frac in self.cdf(None if m == "all" else m):
                w.writerow((m, f"{e:.6f}", f"{frac:.6f}"))
        return buf.getvalue()

    def summary_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("motions", "category", "sequences", "mean_pct", "median_pct"))
        for s in self.summary():
            w.writerow((s["motions"], s["category"], s["sequences"], f"{s['mean']:.6f}", f"{s['median']:.6f}"))
        return buf.getvalue()

    def write(self, path) -> list[Path]:
        """Write the per-sequence CSV plus ``_summary``, ``_hist`` and ``_cdf`` siblings."""
        path = Path(path)
        written = []
        for suffix, text in (("", self.to_csv()), ("_summary", self.summary_csv()),
                             ("_hist", self.histogram_csv()), ("_cdf", self.cdf_csv())):
            target = path.with_name(path.stem + suffix + path.suffix)
            target.write_text(text)
            written.append(target)
        return written


def read_manifest(directory) -> dict[str, str]:
    """Optional ``manifest.csv`` with columns ``sequence,category``."""
    path = Path(directory) / MANIFEST
    if not path.exists():
        return {}
    with path.open(newline="") as fh:
        return {row["sequence"]: row["category"] for row in csv.DictReader(fh)}


def evaluate_sequence(record: SequenceRecord, config: SegmentationConfig, timing: bool = True) -> SequenceResult:
    cfg = replace(config, target_motions=record.target_motions)
    start = time.perf_counter()
    category = record.category or "uncategorized"
    try:
        result = segment(record.trajectories, cfg)
    except SixPointError as exc:
        log.warning("%s: segmentation failed: %s", record.name, exc)
        return SequenceResult(record.name, category, record.target_motions, None, None, cfg.rng_seed, str(exc))
    elapsed = 1000 * (time.perf_counter() - start) if timing else None
    err = None if record.labels is None else misclassification_error(result.labels, record.labels)
    return SequenceResult(record.name, category, record.target_motions, err, elapsed, cfg.rng_seed)


def _evaluate_path(args) -> SequenceResult:
    path, category, config, timing = args
    try:
        record = load_trajectories(path)
    except (OSError, SixPointError) as exc:
        return SequenceResult(Path(path).stem, category, 0, None, None, config.rng_seed, str(exc))
    record = replace(record, category=category)
    return evaluate_sequence(record, config, timing)


def sequence_paths(directory) -> list[Path]:
    return sorted(Path(directory).glob("*" + SEQUENCE_SUFFIX))


def run_batch(directory, config: SegmentationConfig | None = None, jobs: int = 1, timing: bool = True) -> EvaluationReport:
    """Segment every ``*.traj`` file in ``directory`` and collect per-sequence errors.

    Failures are recorded in the report and do not stop the batch. With
    ``timing=False`` the runtime column is left empty so repeated runs give
    byte-identical CSV output.
    """
    config = config or SegmentationConfig()
    manifest = read_manifest(directory)
    tasks = [(p, manifest.get(p.stem, "uncategorized"), config, timing) for p in sequence_paths(directory)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_evaluate_path, tasks))
    else:
        rows = [_evaluate_path(t) for t in tasks]
    return EvaluationReport(rows)
