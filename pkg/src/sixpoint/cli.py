"""Command-line entry point: segment one file, run a batch, or emit a synthetic scene.

Exit codes: 0 success, 1 usage error, 2 data error, 3 segmentation failure.
"""

from __future__ import annotations

import argparse
import ast
import dataclasses
import logging
import re
import sys
import time
from pathlib import Path

from .errors import SceneInfeasibleError, SegmentationError, SixPointError
from .evaluation import EvaluationReport, SequenceResult, misclassification_error, run_batch, sequence_paths
from .pipeline import SegmentationConfig, segment
from .synthetic import SceneSpec, generate_scene, project
from .trajectories import format_trajectories, load_trajectories

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_SEGMENTATION = 0, 1, 2, 3

log = logging.getLogger("sixpoint")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _frame(value: str):
    if value in ("first", "last"):
        return value
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'first', 'last' or an integer, got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sixpoint", description=__doc__.splitlines()[0])
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--input", type=Path, help="trajectory file to segment")
    mode.add_argument("--batch-dir", type=Path, help="directory of *.traj files to evaluate")
    mode.add_argument("--emit-synthetic", nargs="*", metavar="KEY=VALUE",
                      help="write a synthetic scene, e.g. bodies=3 noise=1.0 rng_seed=4")
    p.add_argument("--motions", type=int, help="number of motions (overrides the file header)")
    p.add_argument("--seeds", type=int, default=SegmentationConfig.seeds, metavar="M")
    p.add_argument("--frame", type=_frame, default=SegmentationConfig.frame, help="first, last or an index")
    p.add_argument("--tau-fraction", type=float, default=SegmentationConfig.tau_fraction)
    p.add_argument("--mixture-samples", type=int, default=SegmentationConfig.mixture_samples, metavar="K")
    p.add_argument("--rng-seed", type=int, default=SegmentationConfig.rng_seed)
    p.add_argument("--report", type=Path, help="CSV report path (siblings _summary, _hist, _cdf are added)")
    p.add_argument("--output", type=Path, help="output file for --emit-synthetic (default stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for --batch-dir")
    p.add_argument("--no-timing", action="store_true", help="leave runtime_ms empty for reproducible reports")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def parse_keyvals(items) -> dict:
    """``key=value`` pairs; values are Python literals, bare words stay strings.

    Several pairs may share one argument, separated by whitespace.
    """
    out = {}
    for item in items:
        for token in re.split(r"\s+(?=[A-Za-z_][\w-]*=)", item.strip()):
            if not token:
                continue
            key, sep, raw = token.partition("=")
            if not sep or not key.strip():
                raise UsageError(f"expected KEY=VALUE, got {token!r}")
            try:
                value = ast.literal_eval(raw.strip())
            except (ValueError, SyntaxError):
                value = raw.strip()
            out[key.strip().replace("-", "_")] = tuple(value) if isinstance(value, list) else value
    return out


def scene_spec(items) -> SceneSpec:
    values = parse_keyvals(items)
    known = {f.name for f in dataclasses.fields(SceneSpec)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise UsageError(f"unknown scene keys: {', '.join(unknown)} (known: {', '.join(sorted(known))})")
    return SceneSpec(**values)


def _config(args) -> SegmentationConfig:
    for name in ("seeds", "mixture_samples", "jobs"):
        if getattr(args, name) < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")
    if not args.tau_fraction > 0:
        raise UsageError("--tau-fraction must be positive")
    return SegmentationConfig(
        target_motions=args.motions or 1,
        seeds=args.seeds,
        frame=args.frame,
        tau_fraction=args.tau_fraction,
        mixture_samples=args.mixture_samples,
        rng_seed=args.rng_seed,
    )


def _emit(args) -> int:
    spec = scene_spec(args.emit_synthetic)
    traj = project(generate_scene(spec))
    text = format_trajectories(traj, spec.bodies)
    if args.output:
        args.output.write_text(text)
        log.info("wrote %d trajectories to %s", traj.N, args.output)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _single(args, config) -> int:
    record = load_trajectories(args.input)
    if args.motions:
        record = dataclasses.replace(record, target_motions=args.motions)
    config = dataclasses.replace(config, target_motions=record.target_motions)
    start = time.perf_counter()
    try:
        output = segment(record.trajectories, config)
    except SegmentationError as exc:
        if args.report:
            row = SequenceResult(record.name, "uncategorized", record.target_motions, None, None,
                                 config.rng_seed, str(exc))
            EvaluationReport([row]).write(args.report)
        raise
    elapsed = None if args.no_timing else 1000 * (time.perf_counter() - start)
    err = None if record.labels is None else misclassification_error(output.labels, record.labels)
    if err is not None:
        print(f"{record.name}: {err:.2f}% misclassified", file=sys.stderr)
    if args.report:
        row = SequenceResult(record.name, "uncategorized", record.target_motions, err, elapsed, config.rng_seed)
        EvaluationReport([row]).write(args.report)
    sys.stdout.write("\n".join(str(v) for v in output.labels) + "\n")
    return EXIT_OK


def _batch(args, config) -> int:
    if not args.batch_dir.is_dir():
        raise FileNotFoundError(f"not a directory: {args.batch_dir}")
    if not sequence_paths(args.batch_dir):
        print(f"no *.traj files in {args.batch_dir}", file=sys.stderr)
        if args.report:
            EvaluationReport([]).write(args.report)
        return EXIT_DATA
    report = run_batch(args.batch_dir, config, jobs=args.jobs, timing=not args.no_timing)
    if args.report:
        report.write(args.report)
    else:
        sys.stdout.write(report.to_csv())
    for s in report.summary():
        print(f"motions={s['motions']} category={s['category']} n={s['sequences']} "
              f"mean={s['mean']:.2f}% median={s['median']:.2f}%", file=sys.stderr)
    for r in report.failures:
        print(f"{r.sequence}: {r.failure}", file=sys.stderr)
    return EXIT_SEGMENTATION if report.failures else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.emit_synthetic is not None:
            return _emit(args)
        config = _config(args)
        return _single(args, config) if args.input else _batch(args, config)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"sixpoint: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SegmentationError as exc:
        print(f"segmentation failed: {exc}", file=sys.stderr)
        return EXIT_SEGMENTATION
    except SceneInfeasibleError as exc:
        print(f"infeasible scene: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, SixPointError, ValueError, TypeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
