"""Partition-quality measures used by the benchmark harness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = [
    "ScatterReport",
    "within_cluster_scatter",
    "inertia",
    "contingency_table",
    "adjusted_rand_index",
    "success_indicator",
    "SUCCESS_TOL",
]

#: A trial counts as recovering the reference partition when its adjusted
#: Rand index clears 1 - SUCCESS_TOL.
SUCCESS_TOL = 1e-12


@dataclass(frozen=True)
class ScatterReport:
    """Within-cluster scatter matrix with its two scalar summaries.

    inertia is the trace of S_W; det_criterion is its determinant, the
    volume-style measure that penalizes partitions whose residual spread is
    fat in every direction at once rather than merely large.
    """

    s_w: np.ndarray
    inertia: float
    det_criterion: float

    def to_json_dict(self) -> dict:
        return {
            "s_w": self.s_w.tolist(),
            "inertia": self.inertia,
            "det_criterion": self.det_criterion,
        }


def _check_points_labels(points, labels) -> tuple[np.ndarray, np.ndarray]:
    points = np.asarray(points, dtype=float)
    labels = np.asarray(labels)
    if points.ndim != 2:
        raise InputError("points must be an (n, d) array")
    if labels.shape != (points.shape[0],):
        raise InputError("labels must be a vector aligned with points")
    return points, labels


def _cluster_centers(points, labels, centroids):
    """Yield (members, center) per cluster; empty clusters contribute nothing."""
    if centroids is None:
        for lab in np.unique(labels):
            member = points[labels == lab]
            yield member, member.mean(axis=0)
    else:
        centroids = np.asarray(centroids, dtype=float)
        for j in range(centroids.shape[0]):
            member = points[labels == j]
            if member.size:
                yield member, centroids[j]


def within_cluster_scatter(points, labels, centroids=None) -> ScatterReport:
    """Pooled scatter S_W = sum over clusters of deviation outer products.

    When ``centroids`` is omitted the per-cluster means are recomputed;
    when given, labels are taken as indices into the centroid rows.
    """
    points, labels = _check_points_labels(points, labels)
    d = points.shape[1]
    s = np.zeros((d, d))
    for member, center in _cluster_centers(points, labels, centroids):
        dev = member - center
        s += dev.T @ dev
    return ScatterReport(s, float(np.trace(s)), float(np.linalg.det(s)))


def inertia(points, labels, centroids=None) -> float:
    """Sum of squared distances to cluster centers; trace of S_W."""
    points, labels = _check_points_labels(points, labels)
    total = 0.0
    for member, center in _cluster_centers(points, labels, centroids):
        total += float(np.sum((member - center) ** 2))
    return total


def contingency_table(labels_a, labels_b) -> np.ndarray:
    labels_a = np.asarray(labels_a)
    labels_b = np.asarray(labels_b)
    if labels_a.shape != labels_b.shape or labels_a.ndim != 1:
        raise InputError("label vectors must be 1-D and the same length")
    _, ia = np.unique(labels_a, return_inverse=True)
    _, ib = np.unique(labels_b, return_inverse=True)
    if ia.size == 0:
        return np.zeros((0, 0), dtype=np.int64)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    return table


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Chance-corrected pair-counting agreement between two labelings.

    Returns 1.0 when the correction denominator vanishes (both sides trivial,
    or fewer than two points), treating "no structure to disagree about" as
    perfect agreement.
    """
    table = contingency_table(labels_a, labels_b)
    n = int(table.sum())
    if n < 2:
        return 1.0

    def comb2(x):
        x = x.astype(np.float64)
        return x * (x - 1.0) / 2.0

    sum_cells = float(comb2(table).sum())
    sum_rows = float(comb2(table.sum(axis=1)).sum())
    sum_cols = float(comb2(table.sum(axis=0)).sum())
    total = n * (n - 1.0) / 2.0
    expected = sum_rows * sum_cols / total
    max_index = 0.5 * (sum_rows + sum_cols)
    denom = max_index - expected
    if denom == 0.0:
        return 1.0
    return (sum_cells - expected) / denom


def success_indicator(result, truth) -> bool:
    """True iff the labeling recovers the reference partition exactly.

    Accepts either a clustering result object (its ``labels`` attribute is
    used) or a bare label vector.
    """
    labels = getattr(result, "labels", result)
    return bool(adjusted_rand_index(labels, truth) >= 1.0 - SUCCESS_TOL)
