"""Homogeneous 2D/3D primitives.

Points and lines in the image plane are 3-vectors, 3D points are 4-vectors.
All functions accept stacked inputs (leading batch axes) and broadcast
the way numpy does.
"""

from __future__ import annotations

from typing import NamedTuple
from itertools import combinations

import numpy as np

from .errors import DegenerateConfigurationError

EPS_DEG = 1e-12


class Canonical3D(NamedTuple):
    """Coordinates of the sixth point once points 1-5 are mapped to the standard basis."""

    X: float
    Y: float
    Z: float
    T: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


def det3(a, b, c) -> np.ndarray:
    """Determinant of the 3x3 matrix with rows ``a``, ``b``, ``c``.

    Evaluated as ``(a x b) . c``, which is exactly linear in each argument's
    structure. Zero means the three points are collinear.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    return np.sum(np.cross(a, b) * c, axis=-1)


def line_through(a, b, eps: float = EPS_DEG) -> np.ndarray:
    """Homogeneous line joining two image points (``a x b``).

    Raises DegenerateConfigurationError when the points are projectively
    equal, judged on unit-normalized inputs.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    line = np.cross(a, b)
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    if np.any(na == 0) or np.any(nb == 0):
        raise DegenerateConfigurationError("zero vector is not a homogeneous point")
    if np.any(np.linalg.norm(line, axis=-1) < eps * na * nb):
        raise DegenerateConfigurationError("points coincide; no unique line through them")
    return line


def point_line_distance(y, line, eps: float = EPS_DEG) -> np.ndarray:
    """Euclidean distance between an image point and a line.

    The point is scaled to third coordinate 1 and the line to unit norm over
    its first two components, so ``|y . l|`` becomes a distance in pixels.
    """
    y = np.asarray(y, dtype=float)
    line = np.asarray(line, dtype=float)
    w = y[..., 2]
    if np.any(np.abs(w) < eps * np.linalg.norm(y, axis=-1)):
        raise DegenerateConfigurationError("point at infinity has no finite distance")
    normal = np.linalg.norm(line[..., :2], axis=-1)
    if np.any(normal < eps * np.linalg.norm(line, axis=-1)) or np.any(normal == 0):
        raise DegenerateConfigurationError("line at infinity has no finite distance")
    return np.abs(np.sum(y * line, axis=-1)) / (np.abs(w) * normal)


def _unit_columns(m: np.ndarray) -> np.ndarray:
    return m / np.linalg.norm(m, axis=0, keepdims=True)


def canonical_3d_coords(points, eps: float = EPS_DEG) -> Canonical3D:
    """Canonical coordinates (X, Y, Z, T) of the sixth of six 3D points.

    The projective basis maps points 1-4 to the unit axes and point 5 to
    (1, 1, 1, 1); the sixth point's image under that map is returned. The
    result is defined up to a common scale.
    """
    x = np.asarray(points, dtype=float)
    if x.shape != (6, 4):
        raise ValueError(f"expected six homogeneous 3D points of shape (6, 4), got {x.shape}")
    if np.any(np.linalg.norm(x, axis=1) == 0):
        raise DegenerateConfigurationError("zero vector is not a homogeneous point")
    unit = _unit_columns(x[:5].T)
    for subset in combinations(range(5), 4):
        if abs(np.linalg.det(unit[:, subset])) < eps:
            raise DegenerateConfigurationError(
                f"points {[i + 1 for i in subset]} do not span projective 3-space"
            )
    basis = x[:4].T
    scales = np.linalg.solve(basis, x[4])
    coords = np.linalg.solve(basis * scales, x[5])
    return Canonical3D(*coords)
