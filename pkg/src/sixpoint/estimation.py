"""Total-least-squares estimation of the motion signature from many frames."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientObservationsError
from .invariants import compute_z

EPS_Z = 1e-10
# conditioned frames have RMS radius sqrt(2), so this is far below pixel resolution
EPS_COINCIDE = 1e-9
MIN_OBSERVATIONS = 4
ILL_CONDITIONED_RATIO = 10.0


def condition_frames(pixels) -> tuple[np.ndarray, np.ndarray]:
    """Isotropically condition each frame's six points.

    ``pixels`` has shape ``(..., 6, F, 2)`` (six trajectories). Returns the
    conditioned homogeneous points with shape ``(..., F, 6, 3)`` and the
    per-frame scale factor, so that a conditioned distance divided by the
    scale is a distance in pixels.

    Each frame is translated to zero centroid and scaled to RMS radius
    sqrt(2). This is a similarity, so ``z`` only changes by a positive
    per-frame factor.
    """
    p = np.swapaxes(np.asarray(pixels, dtype=float), -3, -2)
    centred = p - p.mean(axis=-2, keepdims=True)
    rms = np.sqrt(np.mean(np.sum(centred**2, axis=-1), axis=-1))
    scale = np.where(rms > 0, np.sqrt(2.0) / np.where(rms > 0, rms, 1.0), 1.0)
    y = np.concatenate([centred * scale[..., None, None], np.ones(p.shape[:-1] + (1,))], axis=-1)
    return y, scale


def invariant_rows(y) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Raw ``z`` per frame, unit-norm rows (zeroed where degenerate) and the usable mask.

    A frame is degenerate when ``|z|`` is below ``EPS_Z`` or when two of its
    conditioned points coincide (no single coincidence zeroes all of ``z``).
    """
    z = compute_z(y)
    norm = np.linalg.norm(z, axis=-1)
    gaps = np.linalg.norm(y[..., :, None, :2] - y[..., None, :, :2], axis=-1)
    iu = np.triu_indices(6, 1)
    usable = (norm > EPS_Z) & (gaps[..., iu[0], iu[1]].min(axis=-1) > EPS_COINCIDE)
    rows = np.where(usable[..., None], z / np.where(usable, norm, 1.0)[..., None], 0.0)
    return z, rows, usable


@dataclass(frozen=True)
class ObservationMatrix:
    """Unit-norm invariant vectors, one row per usable frame."""

    rows: np.ndarray
    frames: np.ndarray

    @property
    def B(self) -> int:
        return self.rows.shape[0]


def assemble_Z(bundle) -> ObservationMatrix:
    """Build the observation matrix from six pixel trajectories of shape ``(6, F, 2)``."""
    bundle = np.asarray(bundle, dtype=float)
    if bundle.ndim != 3 or bundle.shape[0] != 6 or bundle.shape[2] != 2:
        raise ValueError(f"expected six trajectories of shape (6, F, 2), got {bundle.shape}")
    y, _ = condition_frames(bundle)
    _, rows, usable = invariant_rows(y)
    if usable.sum() < MIN_OBSERVATIONS:
        raise InsufficientObservationsError(
            f"{int(usable.sum())} usable frames; at least {MIN_OBSERVATIONS} are required"
        )
    return ObservationMatrix(rows=rows[usable], frames=np.flatnonzero(usable))


def fix_sign(v) -> np.ndarray:
    """Flip ``v`` (along the last axis) so that its first nonzero component is positive."""
    v = np.asarray(v, dtype=float)
    mag = np.abs(v)
    thresh = 1e-12 * mag.max(axis=-1, keepdims=True)
    first = np.argmax(mag > thresh, axis=-1)
    lead = np.take_along_axis(v, first[..., None], axis=-1)
    return np.where(lead < 0, -v, v)


@dataclass(frozen=True)
class SignatureEstimate:
    s: np.ndarray
    sigma4: float
    sigma5: float

    @property
    def ill_conditioned(self) -> bool:
        # null direction is ambiguous when the two smallest singular values are close
        return self.sigma4 < ILL_CONDITIONED_RATIO * self.sigma5


def tls_null_vectors(rows) -> tuple[np.ndarray, np.ndarray]:
    """Batched TLS: smallest right singular vectors of ``(..., B, 5)`` stacks.

    Returns sign-fixed unit vectors ``(..., 5)`` and singular values ``(..., 5)``.
    """
    rows = np.asarray(rows, dtype=float)
    short = 5 - rows.shape[-2]
    if short > 0:
        # zero rows leave the right singular vectors alone and expose the null direction
        rows = np.concatenate([rows, np.zeros(rows.shape[:-2] + (short, 5))], axis=-2)
    _, sv, vt = np.linalg.svd(rows, full_matrices=False)
    return fix_sign(vt[..., -1, :]), sv


def estimate_s(Z) -> SignatureEstimate:
    """Unit ``s`` minimising ``|Z s|``: the right singular vector of the smallest singular value."""
    rows = Z.rows if isinstance(Z, ObservationMatrix) else np.asarray(Z, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != 5:
        raise ValueError(f"observation matrix must be B x 5, got {rows.shape}")
    if rows.shape[0] < MIN_OBSERVATIONS:
        raise InsufficientObservationsError(
            f"{rows.shape[0]} observations; at least {MIN_OBSERVATIONS} are required"
        )
    s, sv = tls_null_vectors(rows)
    return SignatureEstimate(s=s, sigma4=float(sv[3]), sigma5=float(sv[4]))
