"""Sparse motion segmentation of point trajectories from six-point projective consistency."""

from .errors import (
    DegenerateConfigurationError,
    InsufficientObservationsError,
    SceneInfeasibleError,
    SegmentationError,
    SixPointError,
    TrajectoryFormatError,
)
from .estimation import ObservationMatrix, SignatureEstimate, assemble_Z, estimate_s
from .evaluation import EvaluationReport, misclassification_error, run_batch
from .gev import GevFit, GevParams, fit_gev_mle, gev_mode
from .invariants import compute_lines, compute_z, frame_distances, signature_from_canonical
from .pipeline import RankingMatrix, SegmentationConfig, SegmentationResult, nbc_similarity, segment
from .projective import canonical_3d_coords, det3, line_through, point_line_distance
from .scoring import bundle_scores, matching_score
from .synthetic import RigidScene, SceneSpec, generate_scene, project
from .trajectories import SequenceRecord, TrajectorySet, load_trajectories, write_trajectories

__version__ = "0.1.0"

__all__ = [
    "DegenerateConfigurationError",
    "EvaluationReport",
    "GevFit",
    "GevParams",
    "InsufficientObservationsError",
    "ObservationMatrix",
    "RankingMatrix",
    "RigidScene",
    "SceneInfeasibleError",
    "SceneSpec",
    "SegmentationConfig",
    "SegmentationError",
    "SegmentationResult",
    "SequenceRecord",
    "SignatureEstimate",
    "SixPointError",
    "TrajectoryFormatError",
    "TrajectorySet",
    "assemble_Z",
    "bundle_scores",
    "canonical_3d_coords",
    "compute_lines",
    "compute_z",
    "det3",
    "estimate_s",
    "fit_gev_mle",
    "frame_distances",
    "generate_scene",
    "gev_mode",
    "line_through",
    "load_trajectories",
    "matching_score",
    "misclassification_error",
    "nbc_similarity",
    "point_line_distance",
    "project",
    "run_batch",
    "segment",
    "signature_from_canonical",
    "write_trajectories",
]
