"""Synthetic multi-body rigid scenes seen by a fixed pinhole camera."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import SceneInfeasibleError
from .trajectories import TrajectorySet


@dataclass(frozen=True)
class SceneSpec:
    bodies: int = 2
    points_per_body: int = 40
    frames: int = 30
    rotation_step_deg: float = 8.0
    translation_step: float = 0.03
    body_radius: float = 0.7
    # cap on a body's image half-width as a fraction of its column
    max_footprint: float = 0.35
    depth_range: tuple[float, float] = (8.0, 12.0)
    noise: float = 0.0
    focal: float = 600.0
    image_size: tuple[int, int] = (640, 480)
    shared_motion: bool = False
    # reject draws where bodies overlap horizontally in any frame, not just the first
    keep_separated: bool = True
    rng_seed: int = 0


@dataclass(frozen=True)
class RigidScene:
    """World points with per-body 4x4 rigid transforms for every frame."""

    points: np.ndarray  # (N, 3) reference configuration
    labels: np.ndarray  # (N,) body ids 1..bodies
    motions: np.ndarray  # (bodies, F, 4, 4)
    camera: np.ndarray  # (3, 4)
    noise: float
    noise_seed: int
    image_size: tuple[int, int]

    @property
    def frames(self) -> int:
        return self.motions.shape[1]


def intrinsics(focal: float, image_size: tuple[int, int]) -> np.ndarray:
    w, h = image_size
    return np.array([[focal, 0.0, w / 2.0], [0.0, focal, h / 2.0], [0.0, 0.0, 1.0]])


def rigid(rotation: np.ndarray, translation: np.ndarray) -> np.ndarray:
    T = np.eye(4)
    T[:3, :3] = rotation
    T[:3, 3] = translation
    return T


def _random_unit(rng, n=3):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


def _in_ball(rng, n):
    """Uniform samples inside the unit ball (rotations keep the footprint fixed)."""
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * rng.uniform(size=(n, 1)) ** (1 / 3)


def _body_motion(rng, centre, spec: SceneSpec) -> np.ndarray:
    """Smooth rotation about the body centre plus drifting translation."""
    step = np.deg2rad(spec.rotation_step_deg) * rng.uniform(0.5, 1.0)
    axis = _random_unit(rng)
    velocity = _random_unit(rng) * spec.translation_step * rng.uniform(0.5, 1.0)
    R = np.eye(3)
    offset = np.zeros(3)
    out = np.empty((spec.frames, 4, 4))
    for t in range(spec.frames):
        out[t] = rigid(R, centre + offset - R @ centre)
        axis = axis + 0.1 * rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        velocity = velocity + 0.1 * spec.translation_step * rng.normal(size=3)
        R = Rotation.from_rotvec(axis * step).as_matrix() @ R
        offset = offset + velocity
    return out


def generate_scene(spec: SceneSpec | None = None, max_attempts: int = 20, **overrides) -> RigidScene:
    """Random scene: bodies side by side in the image at frame 0, each with its own motion.

    A draw where a body overlaps another in the first frame, leaves the
    field of view or passes behind the camera is discarded and redrawn from
    the same generator; SceneInfeasibleError is raised after ``max_attempts``.
    """
    spec = SceneSpec(**overrides) if spec is None else spec
    if spec.bodies < 1 or spec.points_per_body < 1 or spec.frames < 1:
        raise SceneInfeasibleError("bodies, points_per_body and frames must be positive")
    rng = np.random.default_rng(spec.rng_seed)
    for attempt in range(max_attempts):
        try:
            return _draw_scene(spec, rng)
        except SceneInfeasibleError as exc:
            last = exc
    raise SceneInfeasibleError(f"no feasible scene in {max_attempts} draws: {last}")


def _draw_scene(spec: SceneSpec, rng) -> RigidScene:
    K = intrinsics(spec.focal, spec.image_size)
    camera = K @ np.hstack([np.eye(3), np.zeros((3, 1))])
    w, h = spec.image_size
    column = w / spec.bodies

    clouds, labels, motions = [], [], []
    for b in range(spec.bodies):
        depth = rng.uniform(*spec.depth_range)
        u = (b + 0.5) * column
        v = h / 2 + rng.uniform(-h / 8, h / 8)
        centre = np.array([(u - K[0, 2]) * depth / spec.focal, (v - K[1, 2]) * depth / spec.focal, depth])
        radius = min(spec.body_radius, spec.max_footprint * column * depth / spec.focal)
        cloud = centre + radius * _in_ball(rng, spec.points_per_body)
        clouds.append(cloud)
        labels.append(np.full(spec.points_per_body, b + 1))
        motions.append(_body_motion(rng, centre, spec))
    if spec.shared_motion:
        motions = [motions[0]] * spec.bodies
    scene = RigidScene(
        points=np.vstack(clouds),
        labels=np.concatenate(labels),
        motions=np.stack(motions),
        camera=camera,
        noise=spec.noise,
        noise_seed=int(rng.integers(2**31)),
        image_size=spec.image_size,
    )

    pix = _project_clean(scene)
    checked = pix if spec.keep_separated else pix[:, :1]
    for a in range(spec.bodies - 1):
        right = checked[scene.labels == a + 1, :, 0].max(axis=0)
        left = checked[scene.labels == a + 2, :, 0].min(axis=0)
        if np.any(right >= left):
            raise SceneInfeasibleError(f"bodies {a + 1} and {a + 2} overlap in the image")
    inside = (pix[..., 0] >= 0) & (pix[..., 0] <= w) & (pix[..., 1] >= 0) & (pix[..., 1] <= h)
    if not inside.all():
        raise SceneInfeasibleError("a body leaves the field of view")
    return scene


def _project_clean(scene: RigidScene) -> np.ndarray:
    x = np.hstack([scene.points, np.ones((len(scene.points), 1))])
    T = scene.motions[scene.labels - 1]  # (N, F, 4, 4)
    y = np.einsum("ij,nfjk,nk->nfi", scene.camera, T, x)
    if np.any(y[..., 2] <= 0):
        raise SceneInfeasibleError("a point is on or behind the camera plane")
    return y[..., :2] / y[..., 2:]


def project(scene: RigidScene) -> TrajectorySet:
    """Pixel trajectories with ground-truth labels, plus seeded Gaussian noise if requested."""
    pix = _project_clean(scene)
    if scene.noise > 0:
        rng = np.random.default_rng(scene.noise_seed)
        pix = pix + rng.normal(scale=scene.noise, size=pix.shape)
    return TrajectorySet(pix, scene.labels.copy())


def synthetic_trajectories(**kwargs) -> TrajectorySet:
    return project(generate_scene(**kwargs))
