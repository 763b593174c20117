import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from sixpoint.invariants import signature_from_canonical
from sixpoint.projective import canonical_3d_coords


def random_camera(rng):
    """K [R | t] with the world origin a few units in front of the camera."""
    f = rng.uniform(400, 1000)
    K = np.array([[f, rng.uniform(-2, 2), rng.uniform(200, 400)],
                  [0.0, f * rng.uniform(0.9, 1.1), rng.uniform(150, 300)],
                  [0.0, 0.0, 1.0]])
    R = Rotation.random(random_state=rng).as_matrix()
    t = np.array([0.0, 0.0, rng.uniform(6, 12)]) - R @ np.zeros(3)
    return K @ np.hstack([R, t[:, None]])


def random_rigid(rng, angle=0.3, shift=0.5):
    T = np.eye(4)
    T[:3, :3] = Rotation.from_rotvec(rng.normal(size=3) * angle).as_matrix()
    T[:3, 3] = rng.normal(size=3) * shift
    return T


def rigid_six(rng, frames=1):
    """Six random 3D points seen under one camera and ``frames`` rigid motions.

    Returns homogeneous image points ``(frames, 6, 3)``, the 3D points
    ``(6, 4)`` and their unit signature.
    """
    X = np.hstack([rng.uniform(-1, 1, size=(6, 3)), np.ones((6, 1))])
    C = random_camera(rng)
    y = np.stack([(C @ random_rigid(rng) @ X.T).T for _ in range(frames)])
    s = signature_from_canonical(canonical_3d_coords(X))
    return y, X, s


def pixel_bundle(rng, frames=30):
    """Dehomogenised pixel tracks ``(6, F, 2)`` of one rigid body, plus its signature."""
    y, _, s = rigid_six(rng, frames)
    pix = y[..., :2] / y[..., 2:]
    return np.swapaxes(pix, 0, 1), s


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance lines, filled by test_acceptance.py and printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
