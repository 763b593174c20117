"""Trajectory containers and the line-oriented trajectory file format.

File layout::

    N F target_motions
    x_1 y_1 x_2 y_2 ... x_F y_F      (N lines, pixels)
    labels                            (optional)
    l_1                               (N lines, integers 1..target_motions)
    ...
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import TrajectoryFormatError


@dataclass(frozen=True)
class TrajectorySet:
    """``points`` holds N complete trajectories of F frames, shape ``(N, F, 2)``."""

    points: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 3 or pts.shape[2] != 2:
            raise ValueError(f"trajectories must have shape (N, F, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("trajectories must not contain missing or non-finite entries")
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=int)
            if labels.shape != (pts.shape[0],):
                raise ValueError(f"expected {pts.shape[0]} labels, got shape {labels.shape}")
            object.__setattr__(self, "labels", labels)

    @property
    def N(self) -> int:
        return self.points.shape[0]

    @property
    def F(self) -> int:
        return self.points.shape[1]

    def frame(self, t: int) -> np.ndarray:
        return self.points[:, t, :]


@dataclass(frozen=True)
class SequenceRecord:
    name: str
    trajectories: TrajectorySet
    target_motions: int
    category: str | None = None

    @property
    def labels(self) -> np.ndarray | None:
        return self.trajectories.labels


def _parse_ints(tokens, lineno, what):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise TrajectoryFormatError(f"{what} must be integers", lineno) from None


def parse_trajectories(text: str, name: str = "sequence") -> SequenceRecord:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise TrajectoryFormatError("empty file", 1)
    header = lines[0].split()
    if len(header) != 3:
        raise TrajectoryFormatError("header must be 'N F target_motions'", 1)
    n, f, motions = _parse_ints(header, 1, "header fields")
    if n < 1 or f < 1 or motions < 1:
        raise TrajectoryFormatError("N, F and target_motions must be positive", 1)
    if len(lines) < 1 + n:
        raise TrajectoryFormatError(f"expected {n} trajectory rows, found {len(lines) - 1}", len(lines))
    points = np.empty((n, f, 2))
    for row in range(n):
        lineno = row + 2
        tokens = lines[row + 1].split()
        if len(tokens) != 2 * f:
            raise TrajectoryFormatError(
                f"trajectory row {row + 1} has {len(tokens)} values, expected {2 * f}", lineno
            )
        try:
            points[row] = np.array([float(t) for t in tokens]).reshape(f, 2)
        except ValueError:
            raise TrajectoryFormatError(f"trajectory row {row + 1} has a non-numeric value", lineno) from None
        if not np.all(np.isfinite(points[row])):
            raise TrajectoryFormatError(f"trajectory row {row + 1} has a non-finite value", lineno)
    labels = None
    rest = lines[1 + n :]
    if rest:
        if rest[0].strip() != "labels":
            raise TrajectoryFormatError("expected 'labels' or end of file", n + 2)
        if len(rest) - 1 != n:
            raise TrajectoryFormatError(f"expected {n} labels, found {len(rest) - 1}", n + 2)
        labels = np.empty(n, dtype=int)
        for i, line in enumerate(rest[1:]):
            lineno = n + 3 + i
            tokens = line.split()
            if len(tokens) != 1:
                raise TrajectoryFormatError("each label line holds one integer", lineno)
            (labels[i],) = _parse_ints(tokens, lineno, "labels")
            if not 1 <= labels[i] <= motions:
                raise TrajectoryFormatError(f"label {labels[i]} outside 1..{motions}", lineno)
    return SequenceRecord(name, TrajectorySet(points, labels), motions)


def load_trajectories(path) -> SequenceRecord:
    path = Path(path)
    return parse_trajectories(path.read_text(), name=path.stem)


def format_trajectories(traj: TrajectorySet, target_motions: int) -> str:
    out = [f"{traj.N} {traj.F} {target_motions}"]
    for row in traj.points:
        out.append(" ".join(repr(float(v)) for v in row.ravel()))
    if traj.labels is not None:
        out.append("labels")
        out.extend(str(int(v)) for v in traj.labels)
    return "\n".join(out) + "\n"


def write_trajectories(path, traj: TrajectorySet, target_motions: int) -> None:
    Path(path).write_text(format_trajectories(traj, target_motions))
