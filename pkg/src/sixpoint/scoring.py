"""Matching score of six point trajectories.

The score is the median over frames of the root-sum-square of the six
point-to-line distances, after estimating the signature from the same
trajectories.
"""

from __future__ import annotations

import numpy as np

from .estimation import MIN_OBSERVATIONS, condition_frames, invariant_rows, tls_null_vectors
from .invariants import frame_distances

CHUNK = 256


def median_rss(distances, usable=None) -> np.ndarray:
    """Median over frames of ``sqrt(sum_k d_k^2)``; ``distances`` is ``(..., F, 6)``.

    Frames where ``usable`` is False are left out of the median.
    """
    d = np.asarray(distances, dtype=float)
    rss = np.sqrt(np.sum(d**2, axis=-1))
    if usable is None:
        return np.median(rss, axis=-1)
    rss = np.where(usable, rss, np.nan)
    enough = np.sum(usable, axis=-1) >= 1
    with np.errstate(all="ignore"):
        out = np.nanmedian(np.where(enough[..., None], rss, 0.0), axis=-1)
    return np.where(enough, out, np.inf)


def _score_chunk(tracks: np.ndarray) -> np.ndarray:
    y, scale = condition_frames(tracks)
    _, rows, usable = invariant_rows(y)
    s, _ = tls_null_vectors(rows)
    d = frame_distances(y, s[..., None, :]) / scale[..., None]
    scores = median_rss(d, usable)
    return np.where(usable.sum(axis=-1) >= MIN_OBSERVATIONS, scores, np.inf)


def bundle_scores(tracks) -> np.ndarray:
    """Scores for a stack of bundles, ``tracks`` of shape ``(B, 6, F, 2)`` in pixels.

    Bundles with fewer than four usable frames score ``inf``.
    """
    tracks = np.asarray(tracks, dtype=float)
    if tracks.ndim != 4 or tracks.shape[1] != 6 or tracks.shape[3] != 2:
        raise ValueError(f"expected bundles of shape (B, 6, F, 2), got {tracks.shape}")
    if tracks.shape[0] == 0:
        return np.zeros(0)
    return np.concatenate(
        [_score_chunk(tracks[i : i + CHUNK]) for i in range(0, tracks.shape[0], CHUNK)]
    )


def matching_score(bundle) -> float:
    """Score of a single bundle of six pixel trajectories, shape ``(6, F, 2)``."""
    return float(bundle_scores(np.asarray(bundle, dtype=float)[None])[0])
