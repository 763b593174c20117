import numpy as np
import pytest

from sixpoint.errors import TrajectoryFormatError
from sixpoint.synthetic import synthetic_trajectories
from sixpoint.trajectories import (
    TrajectorySet, format_trajectories, load_trajectories, parse_trajectories, write_trajectories,
)


def minimal_text(n=7, f=4, labels=True):
    rows = [" ".join(f"{i + 0.5 * t} {2 * i - t}" for t in range(f)) for i in range(n)]
    text = f"{n} {f} 2\n" + "\n".join(rows) + "\n"
    if labels:
        text += "labels\n" + "\n".join(str(1 + i % 2) for i in range(n)) + "\n"
    return text


def test_minimal_file():
    rec = parse_trajectories(minimal_text(), "mini")
    assert rec.name == "mini" and rec.target_motions == 2
    assert rec.trajectories.points.shape == (7, 4, 2)
    assert rec.trajectories.points[3, 2].tolist() == [4.0, 4.0]
    assert rec.labels.tolist() == [1, 2, 1, 2, 1, 2, 1]


def test_labels_are_optional():
    assert parse_trajectories(minimal_text(labels=False)).labels is None


def test_short_row_names_the_row():
    lines = minimal_text().splitlines()
    lines[3] = " ".join(lines[3].split()[:-1])
    with pytest.raises(TrajectoryFormatError, match=r"line 4: trajectory row 3 has 7 values, expected 8"):
        parse_trajectories("\n".join(lines))


@pytest.mark.parametrize("mutate, pattern", [
    (lambda l: ["7 4"] + l[1:], "line 1"),
    (lambda l: ["7 x 2"] + l[1:], "line 1"),
    (lambda l: l[:5], "expected 7 trajectory rows"),
    (lambda l: l[:2] + ["1 2 3 4 5 6 7 nan"] + l[3:], "non-finite"),
    (lambda l: l[:2] + ["1 2 3 4 5 6 7 q"] + l[3:], "non-numeric"),
    (lambda l: l[:8] + ["label"] + l[9:], "line 9"),
    (lambda l: l[:-1], "expected 7 labels"),
    (lambda l: l[:-1] + ["3"], "outside 1..2"),
    (lambda l: l[:-1] + ["1 2"], "one integer"),
])
def test_format_errors(mutate, pattern):
    with pytest.raises(TrajectoryFormatError, match=pattern):
        parse_trajectories("\n".join(mutate(minimal_text().splitlines())))


def test_empty_file():
    with pytest.raises(TrajectoryFormatError, match="empty"):
        parse_trajectories("\n\n")


def test_round_trip_full_precision(tmp_path):
    traj = synthetic_trajectories(bodies=2, noise=0.7, rng_seed=1)
    path = tmp_path / "scene.traj"
    write_trajectories(path, traj, 2)
    rec = load_trajectories(path)
    assert rec.name == "scene"
    assert np.array_equal(rec.trajectories.points, traj.points)
    assert np.array_equal(rec.labels, traj.labels)
    assert format_trajectories(rec.trajectories, 2) == path.read_text()


def test_trajectory_set_validation():
    with pytest.raises(ValueError):
        TrajectorySet(np.zeros((3, 4)))
    with pytest.raises(ValueError):
        TrajectorySet(np.full((2, 3, 2), np.nan))
    with pytest.raises(ValueError):
        TrajectorySet(np.zeros((2, 3, 2)), labels=[1])
