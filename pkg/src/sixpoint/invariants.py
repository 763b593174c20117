"""Six-point relative invariants and constraint lines.

A frame is an array of shape ``(..., 6, 3)`` holding six homogeneous image
points. ``z`` (image side) and ``s`` (3D side) are 5-vectors with
``z . s = 0`` whenever the six image points are a pinhole projection of the
six 3D points that produced ``s``, for any camera and any rigid motion.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateConfigurationError
from .projective import EPS_DEG, Canonical3D, det3

# Zero-based (i, j, k), (l, m, n) index pairs: z_c = D_ijk * D_lmn.
Z_TERMS = (
    ((0, 1, 5), (2, 4, 3)),
    ((0, 2, 5), (1, 3, 4)),
    ((0, 3, 5), (1, 4, 2)),
    ((0, 3, 4), (1, 5, 2)),
    ((0, 2, 4), (1, 3, 5)),
)


def _as_frame(frame) -> np.ndarray:
    y = np.asarray(frame, dtype=float)
    if y.shape[-2:] != (6, 3):
        raise ValueError(f"a frame must have trailing shape (6, 3), got {y.shape}")
    return y


def compute_z(frame) -> np.ndarray:
    """Relative image invariants of six points, without the common prefactor.

    Every component is a product of two determinants in which each point
    appears once, so ``z`` is linear in each individual point.
    """
    y = _as_frame(frame)
    cols = []
    for (i, j, k), (l, m, n) in Z_TERMS:
        cols.append(
            det3(y[..., i, :], y[..., j, :], y[..., k, :])
            * det3(y[..., l, :], y[..., m, :], y[..., n, :])
        )
    return np.stack(cols, axis=-1)


def signature_raw(c) -> np.ndarray:
    X, Y, Z, T = np.asarray(c, dtype=float)
    return np.array([X * Y - Z * T, X * Z - Z * T, X * T - Z * T, Y * Z - Z * T, Y * T - Z * T])


def signature_from_canonical(c: Canonical3D, eps: float = EPS_DEG) -> np.ndarray:
    """Unit motion signature ``s`` from canonical 3D coordinates."""
    raw = signature_raw(c)
    scale = float(np.sum(np.asarray(c, dtype=float) ** 2))
    norm = np.linalg.norm(raw)
    if scale == 0 or norm < eps * scale:
        raise DegenerateConfigurationError("sixth point coincides with the basis: s vanishes")
    return raw / norm


def compute_lines(frame, s) -> np.ndarray:
    """The six constraint lines, shape ``(..., 6, 3)``.

    Line k has coordinates ``(f(e1), f(e2), f(e3))`` where ``f`` maps a
    replacement for point k to ``z . s``. Because ``z`` is linear in each
    point, ``lines[k] . y_k == z . s`` for every k.
    """
    y = _as_frame(frame)
    s = np.asarray(s, dtype=float)
    # (..., k, c, 6, 3): point k replaced by basis vector e_c
    rep = np.broadcast_to(y[..., None, None, :, :], y.shape[:-2] + (6, 3, 6, 3)).copy()
    eye = np.eye(3)
    for k in range(6):
        rep[..., k, :, k, :] = eye
    z_rep = compute_z(rep)
    return np.einsum("...kci,...i->...kc", z_rep, s)


def frame_distances(frame, s, eps: float = EPS_DEG, return_mask: bool = False):
    """Point-to-line distance for each of the six points, in image units.

    Lines whose normal part is negligible (below ``eps`` relative to the
    line's norm) contribute a distance of 0; pass ``return_mask=True`` to get
    the boolean degeneracy mask alongside.
    """
    y = _as_frame(frame)
    w = y[..., 2]
    if np.any(np.abs(w) < eps * np.linalg.norm(y, axis=-1)):
        raise DegenerateConfigurationError("frame contains a point at infinity")
    lines = compute_lines(y, s)
    normal = np.linalg.norm(lines[..., :2], axis=-1)
    degenerate = (normal < eps * np.linalg.norm(lines, axis=-1)) | (normal == 0)
    incidence = np.abs(np.sum(lines * y, axis=-1))
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(degenerate, 0.0, incidence / (np.abs(w) * normal))
    if return_mask:
        return d, degenerate
    return d
