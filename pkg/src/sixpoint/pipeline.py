"""Motion segmentation: spatial seeding, classification, rejection and merging."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from sklearn.cluster import KMeans

from .errors import SegmentationError
from .gev import robust_location
from .scoring import bundle_scores
from .trajectories import TrajectorySet

log = logging.getLogger(__name__)

SEED_SIZE = 6
EPS_SCORE = 1e-9


@dataclass
class SegmentationConfig:
    target_motions: int = 2
    seeds: int = 20
    frame: str | int = "last"
    tau_fraction: float = 0.2
    mixture_samples: int = 75
    rng_seed: int = 0
    reject_size: int = 7
    # the seed count is capped at N // points_per_seed so that every seed can
    # attract enough points to survive rejection
    points_per_seed: int = 10
    tau_retries: int = 3
    kmeans_restarts: int = 10


@dataclass(frozen=True)
class SeedCluster:
    id: int
    members: np.ndarray  # six point indices, nearest to the centre first
    centre: np.ndarray


@dataclass(frozen=True)
class RankingMatrix:
    """Scores of classified points against seed clusters.

    ``scores[j, k]`` is the score of point ``points[k]`` against cluster
    ``clusters[j]``; ``order[i, k]`` is the id of the cluster with the i-th
    smallest score for that point (ties go to the lower id).
    """

    points: np.ndarray
    clusters: np.ndarray
    scores: np.ndarray
    order: np.ndarray

    @classmethod
    def from_scores(cls, points, clusters, scores) -> RankingMatrix:
        points = np.asarray(points, dtype=int)
        clusters = np.asarray(clusters, dtype=int)
        scores = np.asarray(scores, dtype=float).reshape(len(clusters), len(points))
        # lexsort: last key is primary, so ties fall back to ascending cluster id
        ids = np.broadcast_to(clusters[:, None], scores.shape)
        idx = np.stack([np.lexsort((ids[:, k], scores[:, k])) for k in range(len(points))], axis=1) if len(points) else np.zeros((len(clusters), 0), dtype=int)
        return cls(points, clusters, scores, clusters[idx] if idx.size else idx)

    @property
    def assigned(self) -> np.ndarray:
        return self.order[0]

    def score_of(self, cluster_ids) -> np.ndarray:
        """Score of each point against the given (per-point) cluster id."""
        row = {c: j for j, c in enumerate(self.clusters)}
        rows = np.array([row[c] for c in np.asarray(cluster_ids)], dtype=int)
        return self.scores[rows, np.arange(len(self.points))]

    def restrict(self, live) -> RankingMatrix:
        keep = np.isin(self.clusters, np.asarray(list(live), dtype=int))
        return RankingMatrix.from_scores(self.points, self.clusters[keep], self.scores[keep])

    def extend(self, other: RankingMatrix) -> RankingMatrix:
        if not np.array_equal(self.clusters, other.clusters):
            raise ValueError("rankings must cover the same clusters")
        return RankingMatrix.from_scores(
            np.concatenate([self.points, other.points]),
            self.clusters,
            np.hstack([self.scores, other.scores]),
        )


@dataclass
class ClassificationState:
    seeds: dict[int, SeedCluster]
    live: list[int]
    ranking: RankingMatrix  # over all classified points, against every seed
    rejected: list[dict] = field(default_factory=list)

    def live_ranking(self) -> RankingMatrix:
        return self.ranking.restrict(self.live)

    def cluster_points(self) -> dict[int, np.ndarray]:
        """Members of every live cluster: its seed plus the points assigned to it."""
        ranking = self.live_ranking()
        out = {}
        for c in self.live:
            assigned = ranking.points[ranking.assigned == c]
            out[c] = np.sort(np.concatenate([self.seeds[c].members, assigned]))
        return out


@dataclass
class SegmentationResult:
    labels: np.ndarray
    best_scores: np.ndarray  # nan for points that stayed seed members
    merge_tree: list[dict]
    rejected: list[dict]
    rng_seed: int
    n_seeds: int
    n_intermediate: int
    tau_fraction: float
    fallbacks: int = 0


def _frame_index(frame, F: int) -> int:
    if frame == "first":
        return 0
    if frame == "last":
        return F - 1
    t = int(frame)
    if not -F <= t < F:
        raise ValueError(f"frame index {t} outside 0..{F - 1}")
    return t % F


def spatial_kmeans_init(traj: TrajectorySet, M: int, frame="last", rng=None, restarts: int = 10) -> list[SeedCluster]:
    """Seed clusters: the six points nearest to each K-means centre in one frame.

    Points are handed out greedily in order of increasing distance to any
    centre, skipping points already taken and centres that are full.
    """
    if traj.N < SEED_SIZE * M + 1:
        raise SegmentationError(f"{traj.N} points are too few for {M} seeds (need {SEED_SIZE * M + 1})")
    rng = np.random.default_rng(rng)
    xy = traj.frame(_frame_index(frame, traj.F))
    km = KMeans(n_clusters=M, init="random", n_init=restarts, random_state=int(rng.integers(2**31)))
    km.fit(xy)
    centres = km.cluster_centers_
    dist = np.linalg.norm(xy[None, :, :] - centres[:, None, :], axis=-1)  # (M, N)
    members = [[] for _ in range(M)]
    taken = np.zeros(traj.N, dtype=bool)
    for flat in np.argsort(dist, axis=None, kind="stable"):
        c, p = divmod(int(flat), traj.N)
        if taken[p] or len(members[c]) == SEED_SIZE:
            continue
        members[c].append(p)
        taken[p] = True
        if taken.sum() == SEED_SIZE * M:
            break
    return [SeedCluster(j, np.array(members[j]), centres[j]) for j in range(M)]


def classify_points(traj: TrajectorySet, seeds, queries=None) -> RankingMatrix:
    """Score every query point against every seed cluster.

    The bundle for (point, cluster) is the point followed by the cluster's
    members 2..6. Queries default to all points outside the seeds. A bundle
    that repeats a point scores ``inf``.
    """
    seeds = list(seeds)
    if queries is None:
        in_seed = np.zeros(traj.N, dtype=bool)
        for sc in seeds:
            in_seed[sc.members] = True
        queries = np.flatnonzero(~in_seed)
    queries = np.asarray(queries, dtype=int)
    ids = np.array([sc.id for sc in seeds], dtype=int)
    if len(queries) == 0:
        return RankingMatrix.from_scores(queries, ids, np.zeros((len(seeds), 0)))
    rest = np.stack([sc.members[1:] for sc in seeds])  # (M, 5)
    index = np.concatenate(
        [np.broadcast_to(queries[None, :, None], (len(seeds), len(queries), 1)),
         np.broadcast_to(rest[:, None, :], (len(seeds), len(queries), 5))],
        axis=-1,
    )
    flat = index.reshape(-1, SEED_SIZE)
    scores = bundle_scores(traj.points[flat])
    repeated = np.any(flat[:, :1] == flat[:, 1:], axis=1)
    scores[repeated] = np.inf
    return RankingMatrix.from_scores(queries, ids, scores.reshape(len(seeds), len(queries)))


def reject_small_clusters(traj: TrajectorySet, seeds, ranking: RankingMatrix, reject_size: int = 7,
                          target_motions: int = 1) -> ClassificationState:
    """Drop clusters with at most ``reject_size`` points and reclassify their points.

    The smallest cluster goes first (lowest id on ties), one per round.
    Assigned points move to their next-best surviving cluster; the seed
    points of a dropped cluster are scored against the seeds and join the
    classified points. Repeats until no surviving cluster is small. One at
    a time matters when a body owns many seeds that split its points
    between them: dropping all of them at once would leave the body with
    no cluster at all.
    """
    state = ClassificationState({sc.id: sc for sc in seeds}, [sc.id for sc in seeds], ranking)
    while True:
        live_rank = state.live_ranking()
        sizes = {c: SEED_SIZE + int(np.sum(live_rank.assigned == c)) for c in state.live}
        small = [c for c in state.live if sizes[c] <= reject_size]
        if not small:
            return state
        small = [min(small, key=lambda c: (sizes[c], c))]
        live = [c for c in state.live if c not in small]
        if len(live) < target_motions:
            raise SegmentationError(
                f"only {len(live)} clusters survive rejection; {target_motions} motions requested"
            )
        for c in small:
            state.rejected.append({"cluster": c, "size": sizes[c], "members": state.seeds[c].members.tolist()})
        orphans = np.concatenate([state.seeds[c].members for c in small])
        extra = classify_points(traj, list(state.seeds.values()), orphans)
        state.ranking = state.ranking.extend(extra)
        state.live = live


def nbc_similarity(ranking: RankingMatrix) -> np.ndarray:
    """Next-best classification similarity between the ranking's clusters.

    For each point assigned to cluster i with runner-up j, both ``L[i, j]``
    and ``L[j, i]`` grow by the reciprocal of the point's score against j.
    Rows and columns follow ``ranking.clusters``.
    """
    M = len(ranking.clusters)
    L = np.zeros((M, M))
    if M < 2 or len(ranking.points) == 0:
        return L
    pos = {c: j for j, c in enumerate(ranking.clusters)}
    best = np.array([pos[c] for c in ranking.order[0]])
    second = np.array([pos[c] for c in ranking.order[1]])
    e = np.maximum(ranking.scores[second, np.arange(len(ranking.points))], EPS_SCORE)
    w = 1.0 / e
    # interleave both symmetric updates so each entry accumulates in point order
    rows = np.stack([best, second], axis=1).ravel()
    cols = np.stack([second, best], axis=1).ravel()
    np.add.at(L, (rows, cols), np.repeat(w, 2))
    return L


def threshold_and_components(L, tau_fraction: float) -> np.ndarray:
    """Component index of every cluster after keeping entries >= tau_fraction * max(L)."""
    L = np.asarray(L, dtype=float)
    top = L.max() if L.size else 0.0
    adj = (L >= tau_fraction * top) & (L > 0)
    _, comp = connected_components(csr_matrix(adj), directed=False)
    return comp


def _mixture_bundles(a: np.ndarray, b: np.ndarray, K: int, rng) -> np.ndarray:
    na = min(3, len(a))
    na = max(na, SEED_SIZE - len(b))
    nb = SEED_SIZE - na
    out = np.empty((K, SEED_SIZE), dtype=int)
    for i in range(K):
        out[i, :na] = rng.choice(a, na, replace=False)
        out[i, na:] = rng.choice(b, nb, replace=False)
    return out


def mixture_similarity(traj: TrajectorySet, a, b, K: int, rng) -> tuple[float, bool]:
    """GEV mode of scores of K random 3+3 bundles drawn from two clusters."""
    a = np.asarray(a, dtype=int)
    b = np.asarray(b, dtype=int)
    if len(a) + len(b) < SEED_SIZE:
        return np.inf, True
    bundles = _mixture_bundles(a, b, K, rng)
    return robust_location(bundle_scores(traj.points[bundles]))


def refinement_merge(clusters, traj: TrajectorySet, target_motions: int, K: int = 75, rng=None):
    """Agglomerative merging of point groups, most similar pair first.

    Returns the final list of groups and the merge history.
    """
    rng = np.random.default_rng(rng)
    groups = {i: np.asarray(g, dtype=int) for i, g in enumerate(clusters)}
    next_id = len(groups)
    sims: dict[tuple[int, int], tuple[float, bool]] = {}
    ids = sorted(groups)
    for x in range(len(ids)):
        for y in range(x + 1, len(ids)):
            sims[ids[x], ids[y]] = mixture_similarity(traj, groups[ids[x]], groups[ids[y]], K, rng)
    tree = []
    while len(groups) > target_motions:
        (a, b), (value, fallback) = min(sims.items(), key=lambda kv: (kv[1][0], kv[0]))
        merged = np.sort(np.concatenate([groups.pop(a), groups.pop(b)]))
        sims = {k: v for k, v in sims.items() if a not in k and b not in k}
        tree.append({"a": a, "b": b, "into": next_id, "similarity": value, "fallback": fallback})
        for other in sorted(groups):
            sims[other, next_id] = mixture_similarity(traj, groups[other], merged, K, rng)
        groups[next_id] = merged
        next_id += 1
    return [groups[k] for k in sorted(groups)], tree


def effective_seed_count(N: int, config: SegmentationConfig) -> int:
    M = min(config.seeds, N // config.points_per_seed, (N - 1) // SEED_SIZE)
    M = max(M, min(config.target_motions, (N - 1) // SEED_SIZE))
    if M < 1:
        raise SegmentationError(f"{N} points are too few to form a single seed")
    return M


def segment(traj: TrajectorySet, config: SegmentationConfig | None = None) -> SegmentationResult:
    """Run the whole pipeline and return labels 1..target_motions."""
    config = config or SegmentationConfig()
    rng = np.random.default_rng(config.rng_seed)
    M = effective_seed_count(traj.N, config)
    if M < config.seeds:
        log.info("using %d seeds instead of %d for %d points", M, config.seeds, traj.N)
    seeds = spatial_kmeans_init(traj, M, config.frame, rng, config.kmeans_restarts)
    ranking = classify_points(traj, seeds)
    state = reject_small_clusters(traj, seeds, ranking, config.reject_size, config.target_motions)
    live_rank = state.live_ranking()
    L = nbc_similarity(live_rank)

    tau = config.tau_fraction
    comp = threshold_and_components(L, tau)
    retries = 0
    while comp.max() + 1 < config.target_motions:
        if retries == config.tau_retries:
            raise SegmentationError(
                f"NBC merging left {comp.max() + 1} clusters for {config.target_motions} motions"
            )
        tau *= 2
        retries += 1
        log.info("over-merged; retrying with tau_fraction=%g", tau)
        comp = threshold_and_components(L, tau)

    members = state.cluster_points()
    n_comp = int(comp.max()) + 1
    groups = [np.sort(np.concatenate([members[c] for c, k in zip(live_rank.clusters, comp) if k == g]))
              for g in range(n_comp)]
    tree = []
    if n_comp > config.target_motions:
        groups, tree = refinement_merge(groups, traj, config.target_motions, config.mixture_samples, rng)

    # stable label order: by smallest member index
    groups.sort(key=lambda g: int(g.min()))
    labels = np.zeros(traj.N, dtype=int)
    for i, g in enumerate(groups):
        labels[g] = i + 1
    best = np.full(traj.N, np.nan)
    best[live_rank.points] = live_rank.score_of(live_rank.assigned) if len(live_rank.points) else []
    return SegmentationResult(
        labels=labels,
        best_scores=best,
        merge_tree=tree,
        rejected=state.rejected,
        rng_seed=config.rng_seed,
        n_seeds=M,
        n_intermediate=n_comp,
        tau_fraction=tau,
        fallbacks=sum(1 for m in tree if m["fallback"]),
    )
