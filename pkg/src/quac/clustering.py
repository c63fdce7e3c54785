"""Clustering algorithms: Lloyd k-means with three seeding strategies, the
graph-sampling hybrids (seed selection and full labeling), l-nearest-neighbor
classification, and a Laplacian spectral baseline.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DisconnectedGraphError, InputError, ParameterError
from .graphs import LaplacianMatrix, MarkSet, PointCloud
from .qci import QciConfig, qci, qci_distribution
from .spectral import eigendecompose

__all__ = [
    "KMeansConfig",
    "ClusteringResult",
    "kmeans",
    "kpp_seed",
    "random_seed",
    "qmeans_seed",
    "l_nearest_neighbor_classify",
    "qnn",
    "laplacian_spectral_clustering",
]


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    max_iterations: int = 300
    centroid_tolerance: float = 1e-6
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ParameterError("k must be >= 1")
        if self.max_iterations < 1:
            raise ParameterError("max_iterations must be >= 1")
        if self.centroid_tolerance < 0:
            raise ParameterError("centroid_tolerance must be >= 0")


@dataclass(frozen=True)
class ClusteringResult:
    """Lloyd output plus the per-iteration objective trail.

    inertia_trajectory holds the assignment objective after every
    assign/update cycle, which is what the monotonicity guarantee is about.
    """

    labels: np.ndarray
    centroids: np.ndarray
    iterations_used: int
    converged: bool
    inertia_trajectory: tuple[float, ...]

    @property
    def inertia(self) -> float:
        return self.inertia_trajectory[-1]

    def to_json_dict(self) -> dict:
        return {
            "labels": self.labels.tolist(),
            "centroids": self.centroids.tolist(),
            "iterations": self.iterations_used,
            "converged": self.converged,
            "metrics": {"inertia": self.inertia},
        }


def _points_of(x) -> np.ndarray:
    if isinstance(x, PointCloud):
        return x.points
    pts = np.asarray(x, dtype=float)
    if pts.ndim != 2:
        raise InputError("points must be an (n, d) array")
    return pts


def _assign(points: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, float]:
    """Nearest-centroid labels (ties to the lowest index) and the objective."""
    d2 = np.sum((points[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
    labels = np.argmin(d2, axis=1)
    return labels, float(d2[np.arange(len(points)), labels].sum())


def _update(points: np.ndarray, labels: np.ndarray, old: np.ndarray) -> np.ndarray:
    """Means per cluster; an empty cluster is re-seeded with the point
    farthest from that cluster's stale centroid (distinct picks when several
    clusters empty out at once)."""
    k = old.shape[0]
    new = old.copy()
    taken: list[int] = []
    for j in range(k):
        member = points[labels == j]
        if len(member):
            new[j] = member.mean(axis=0)
        else:
            d2 = np.sum((points - old[j]) ** 2, axis=1)
            if taken:
                d2[taken] = -np.inf
            pick = int(np.argmax(d2))
            new[j] = points[pick]
            taken.append(pick)
    return new


def kmeans(x, seeds, cfg: KMeansConfig) -> ClusteringResult:
    """Lloyd iteration from explicit seed vectors.

    Runs assign/update cycles until the labeling is a fixed point (or the
    centroid movement drops below tolerance), so the returned centroids are
    the means of the returned labels.
    """
    points = _points_of(x)
    centroids = np.array(seeds, dtype=float)
    if centroids.ndim != 2 or centroids.shape[1] != points.shape[1]:
        raise InputError("seeds must be k vectors matching point dimension")
    if centroids.shape[0] != cfg.k:
        raise InputError(f"expected {cfg.k} seeds, got {centroids.shape[0]}")
    if cfg.k > len(points):
        raise InputError("more clusters than points")

    labels, objective = _assign(points, centroids)
    trajectory = [objective]
    iterations = 0
    converged = False
    for it in range(cfg.max_iterations):
        new_centroids = _update(points, labels, centroids)
        movement = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        new_labels, objective = _assign(points, new_centroids)
        trajectory.append(objective)
        iterations = it + 1
        stable = bool(np.array_equal(new_labels, labels))
        labels, centroids = new_labels, new_centroids
        if stable or movement <= cfg.centroid_tolerance:
            converged = True
            break
    return ClusteringResult(labels, centroids, iterations, converged, tuple(trajectory))


def random_seed(x, k: int, rng: np.random.Generator) -> np.ndarray:
    """k distinct data points chosen uniformly without replacement."""
    points = _points_of(x)
    if k > len(points):
        raise InputError("more seeds than points")
    idx = rng.choice(len(points), size=k, replace=False)
    return points[idx].copy()


def kpp_seed(x, k: int, rng: np.random.Generator, weighting: str = "d2") -> np.ndarray:
    """Distance-weighted greedy seeding.

    The default weights each point by its squared distance to the nearest
    already-chosen seed; ``weighting="linear"`` uses the distance itself
    (the variant reading of "normalized distances").
    """
    if weighting not in ("d2", "linear"):
        raise ParameterError(f"unknown weighting {weighting!r}")
    points = _points_of(x)
    if k > len(points):
        raise InputError("more seeds than points")
    seeds = [points[rng.integers(len(points))].copy()]
    d2 = np.sum((points - seeds[0]) ** 2, axis=1)
    while len(seeds) < k:
        w = d2 if weighting == "d2" else np.sqrt(d2)
        total = float(w.sum())
        if total <= 0.0:
            pick = int(rng.integers(len(points)))
        else:
            pick = int(rng.choice(len(points), p=w / total))
        seeds.append(points[pick].copy())
        d2 = np.minimum(d2, np.sum((points - seeds[-1]) ** 2, axis=1))
    return np.array(seeds)


def qmeans_seed(
    x: PointCloud,
    laplacian: LaplacianMatrix,
    k: int,
    m: int,
    cfg: QciConfig = QciConfig(),
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Graph-sampled seed vectors for k-means.

    One representative vertex per cluster is found by iterated marked-vertex
    sampling; each seed is then the mean of m data points drawn with the
    other representatives marked, which pulls it toward its cluster's bulk
    instead of a single sampled point.
    """
    if k < 2:
        raise ParameterError("need k >= 2")
    if m < 1:
        raise ParameterError("need m >= 1")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    x_points = {vid: x.coords(vid) for vid in laplacian.vertex_ids}

    reps = [int(rng.choice(laplacian.vertex_ids))]
    while len(reps) < k:
        reps.append(qci(laplacian, MarkSet.of(reps), cfg, rng))

    seeds = np.empty((k, x.dim))
    for i in range(k):
        marks = MarkSet.of(v for j, v in enumerate(reps) if j != i)
        dist = qci_distribution(laplacian, marks, cfg)
        ids = list(dist.keys())
        p = np.array([dist[v] for v in ids])
        draws = rng.choice(len(ids), size=m, p=p / p.sum())
        seeds[i] = np.mean([x_points[ids[j]] for j in draws], axis=0)
    return seeds


def l_nearest_neighbor_classify(
    labeled_points,
    labeled_labels,
    query,
    l: int,
    rng: np.random.Generator,
) -> int:
    """Majority label among the l nearest labeled points; vote ties are
    broken uniformly at random among the tied labels."""
    points = _points_of(labeled_points)
    labels = np.asarray(labeled_labels)
    if len(points) == 0:
        raise InputError("no labeled points")
    if not (1 <= l <= len(points)):
        raise InputError("need 1 <= l <= number of labeled points")
    d2 = np.sum((points - np.asarray(query, dtype=float)) ** 2, axis=1)
    nearest = np.argpartition(d2, l - 1)[:l]
    votes, counts = np.unique(labels[nearest], return_counts=True)
    winners = votes[counts == counts.max()]
    if len(winners) == 1:
        return int(winners[0])
    return int(winners[rng.integers(len(winners))])


def qnn(
    x: PointCloud,
    laplacian: LaplacianMatrix,
    k: int,
    m: int,
    l: int,
    cfg: QciConfig = QciConfig(),
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Full-dataset labels from graph sampling plus nearest-neighbor spread.

    One representative per cluster via iterated marked sampling; then m
    rounds each drawing one more labeled vertex per cluster with the *other*
    representatives marked (a vertex drawn twice keeps its first label);
    finally every unlabeled point takes the majority label of its l nearest
    labeled points.  Returns labels aligned with x.points.
    """
    if k < 2:
        raise ParameterError("need k >= 2")
    if m < 0:
        raise ParameterError("need m >= 0")
    if l < 1:
        raise ParameterError("need l >= 1")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)

    reps = [int(rng.choice(laplacian.vertex_ids))]
    while len(reps) < k:
        reps.append(qci(laplacian, MarkSet.of(reps), cfg, rng))
    assigned: dict[int, int] = {v: j for j, v in enumerate(reps)}

    per_cluster = []
    for j in range(k):
        marks = MarkSet.of(v for i, v in enumerate(reps) if i != j)
        dist = qci_distribution(laplacian, marks, cfg)
        ids = list(dist.keys())
        p = np.array([dist[v] for v in ids])
        per_cluster.append((ids, p / p.sum()))
    for _ in range(m):
        for j in range(k):
            ids, p = per_cluster[j]
            v = ids[int(rng.choice(len(ids), p=p))]
            if v not in assigned:
                assigned[v] = j

    labeled_pts = np.array([x.coords(v) for v in assigned])
    labeled_labs = np.array(list(assigned.values()))
    l_eff = min(l, len(labeled_pts))
    labels = np.empty(x.n, dtype=np.int64)
    for i, vid in enumerate(x.ids):
        if vid in assigned:
            labels[i] = assigned[vid]
        else:
            labels[i] = l_nearest_neighbor_classify(
                labeled_pts, labeled_labs, x.points[i], l_eff, rng
            )
    return labels


def laplacian_spectral_clustering(
    laplacian: LaplacianMatrix,
    k: int,
    cfg: KMeansConfig | None = None,
) -> np.ndarray:
    """Spectral baseline: embed by the k lowest-eigenvalue eigenvectors of
    the graph Laplacian and cluster the embedded rows.

    Only defined on connected graphs; a disconnected input raises so the
    caller can record the trial as skipped.
    """
    n = laplacian.entries.shape[0]
    if not (1 <= k <= n):
        raise ParameterError("need 1 <= k <= number of vertices")
    report = eigendecompose(laplacian.entries)
    if report.zero_multiplicity != 1:
        raise DisconnectedGraphError(
            f"graph has {report.zero_multiplicity} components; spectral baseline needs 1"
        )
    embedding = report.eigenvectors[:, :k]
    cfg = cfg if cfg is not None else KMeansConfig(k=k)
    if cfg.k != k:
        cfg = KMeansConfig(k, cfg.max_iterations, cfg.centroid_tolerance, cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    seeds = kpp_seed(embedding, k, rng)
    return kmeans(embedding, seeds, cfg).labels
