"""Point clouds, weighted graphs, and graph Laplacians.

Vertices carry stable integer ids so that marking, reduction, and outlier
removal can all be traced back to rows of the original point cloud.  Graph
structure is stored sparsely (edge dict keyed by index pairs); Laplacians are
dense symmetric arrays sized for direct eigendecomposition.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConstructionError, InputError, ParameterError

__all__ = [
    "PointCloud",
    "WeightedGraph",
    "LaplacianMatrix",
    "MarkSet",
    "build_epsilon_graph",
    "graph_laplacian",
    "reduced_laplacian",
    "connected_components",
    "remove_outliers",
    "matrix_to_csv",
]

_SYM_TOL = 1e-10


@dataclass(frozen=True)
class PointCloud:
    """Immutable set of points with per-row integer ids.

    Parameters
    ----------
    points : ndarray, shape (n, d)
        Coordinates, float64.
    ids : tuple of int
        One id per row, unique.  Defaults to ``0..n-1`` via `from_array`.
    """

    points: np.ndarray
    ids: tuple[int, ...]

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise InputError(f"points must be 2-D (n, d), got shape {pts.shape}")
        if len(self.ids) != pts.shape[0]:
            raise InputError(
                f"{len(self.ids)} ids for {pts.shape[0]} points"
            )
        if len(set(self.ids)) != len(self.ids):
            raise InputError("point ids must be unique")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "ids", tuple(int(i) for i in self.ids))

    @classmethod
    def from_array(cls, points: np.ndarray, ids: Sequence[int] | None = None) -> "PointCloud":
        pts = np.asarray(points, dtype=float)
        if ids is None:
            ids = range(pts.shape[0])
        return cls(pts, tuple(ids))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def index_of(self, vid: int) -> int:
        try:
            return self.ids.index(vid)
        except ValueError:
            raise InputError(f"unknown point id {vid}") from None

    def coords(self, vid: int) -> np.ndarray:
        return self.points[self.index_of(vid)]

    def select(self, ids: Sequence[int]) -> "PointCloud":
        """Sub-cloud for the given ids, preserving them."""
        idx = [self.index_of(v) for v in ids]
        return PointCloud(self.points[idx], tuple(int(v) for v in ids))


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with positive edge weights.

    Edges live in index space ``0..n-1``; ``vertex_ids[i]`` maps index ``i``
    back to the originating point id (identity when omitted).  Zero-weight
    edges are never stored.
    """

    n: int
    edges: dict[tuple[int, int], float]
    vertex_ids: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InputError("graph needs at least one vertex")
        if not self.vertex_ids:
            object.__setattr__(self, "vertex_ids", tuple(range(self.n)))
        if len(self.vertex_ids) != self.n:
            raise InputError("vertex_ids length must equal n")
        if len(set(self.vertex_ids)) != self.n:
            raise InputError("vertex_ids must be unique")
        canon: dict[tuple[int, int], float] = {}
        for (u, v), w in self.edges.items():
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InputError(f"edge ({u},{v}) out of range for n={self.n}")
            if u == v:
                raise InputError(f"self-loop on vertex {u}")
            w = float(w)
            if w < 0:
                raise InputError(f"negative weight {w} on edge ({u},{v})")
            if w == 0.0:
                continue
            key = (u, v) if u < v else (v, u)
            if key in canon and canon[key] != w:
                raise InputError(f"conflicting weights for edge {key}")
            canon[key] = w
        object.__setattr__(self, "edges", canon)
        object.__setattr__(self, "vertex_ids", tuple(int(i) for i in self.vertex_ids))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def weight(self, u: int, v: int) -> float:
        key = (u, v) if u < v else (v, u)
        return self.edges.get(key, 0.0)

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for (u, v) in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def adjacency(self) -> np.ndarray:
        """Dense symmetric weight matrix."""
        a = np.zeros((self.n, self.n))
        for (u, v), w in self.edges.items():
            a[u, v] = w
            a[v, u] = w
        return a

    def degrees(self) -> np.ndarray:
        d = np.zeros(self.n)
        for (u, v), w in self.edges.items():
            d[u] += w
            d[v] += w
        return d

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "edges": [[u, v, w] for (u, v), w in sorted(self.edges.items())],
            "vertex_ids": list(self.vertex_ids),
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "WeightedGraph":
        try:
            n = int(doc["n"])
            edges = {(int(u), int(v)): float(w) for u, v, w in doc["edges"]}
            ids = tuple(int(i) for i in doc["vertex_ids"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed graph document: {exc}") from exc
        return cls(n, edges, ids)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "WeightedGraph":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class LaplacianMatrix:
    """Symmetric PSD-structured matrix L(G) + W with vertex bookkeeping.

    ``entries`` is dense; off-diagonals are nonpositive, diagonal holds
    weighted degree plus any vertex weight.
    """

    entries: np.ndarray
    vertex_ids: tuple[int, ...]
    vertex_weights: np.ndarray | None = None

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"Laplacian must be square, got {m.shape}")
        if len(self.vertex_ids) != m.shape[0]:
            raise InputError("vertex_ids length must match matrix size")
        scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
        if np.max(np.abs(m - m.T)) > _SYM_TOL * scale:
            raise InputError("Laplacian entries must be symmetric")
        off = m - np.diag(np.diag(m))
        if off.size and off.max() > 1e-12 * scale:
            raise InputError("Laplacian off-diagonals must be nonpositive")
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "vertex_ids", tuple(int(i) for i in self.vertex_ids))
        if self.vertex_weights is not None:
            w = np.asarray(self.vertex_weights, dtype=float)
            if w.shape != (m.shape[0],):
                raise InputError("vertex_weights must be length-n")
            object.__setattr__(self, "vertex_weights", w)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def index_of(self, vid: int) -> int:
        try:
            return self.vertex_ids.index(vid)
        except ValueError:
            raise InputError(f"unknown vertex id {vid}") from None

    def to_json_dict(self) -> dict:
        # decompose into graph part (off-diagonals) + diagonal residual so the
        # document round-trips through the {n, edges, vertex_ids} schema
        m = self.entries
        edges = []
        for u in range(self.n):
            for v in range(u + 1, self.n):
                if m[u, v] != 0.0:
                    edges.append([u, v, -float(m[u, v])])
        resid = np.diag(m).copy()
        for u, v, w in edges:
            resid[u] -= w
            resid[v] -= w
        return {
            "n": self.n,
            "edges": edges,
            "vertex_ids": list(self.vertex_ids),
            "vertex_weights": [float(x) for x in resid],
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "LaplacianMatrix":
        try:
            n = int(doc["n"])
            ids = tuple(int(i) for i in doc["vertex_ids"])
            weights = np.asarray(doc.get("vertex_weights", np.zeros(n)), dtype=float)
            m = np.diag(weights.copy())
            for u, v, w in doc["edges"]:
                u, v, w = int(u), int(v), float(w)
                m[u, v] -= w
                m[v, u] -= w
                m[u, u] += w
                m[v, v] += w
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed Laplacian document: {exc}") from exc
        return cls(m, ids, vertex_weights=weights)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "LaplacianMatrix":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class MarkSet:
    """Set of marked vertex ids (Dirichlet boundary)."""

    ids: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ids", frozenset(int(i) for i in self.ids))

    @classmethod
    def of(cls, ids: Iterable[int]) -> "MarkSet":
        return cls(frozenset(ids))

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self):
        return iter(sorted(self.ids))

    def validate_against(self, vertex_ids: Sequence[int]) -> None:
        known = set(vertex_ids)
        extra = self.ids - known
        if extra:
            raise InputError(f"marks reference unknown vertex ids {sorted(extra)}")
        if len(self.ids) >= len(known):
            raise InputError("marks may not cover every vertex")


def build_epsilon_graph(cloud: PointCloud, eps: float) -> WeightedGraph:
    """Unit-weight graph joining points at Euclidean distance strictly below eps.

    Parameters
    ----------
    cloud : PointCloud
    eps : float
        Ball radius; must be positive and finite.
    """
    if not np.isfinite(eps) or eps <= 0:
        raise ParameterError(f"eps must be positive and finite, got {eps}")
    pts = cloud.points
    sq = np.sum(pts**2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (pts @ pts.T)
    np.maximum(d2, 0.0, out=d2)
    close = d2 < eps * eps
    edges: dict[tuple[int, int], float] = {}
    iu, ju = np.nonzero(np.triu(close, k=1))
    for u, v in zip(iu.tolist(), ju.tolist()):
        edges[(u, v)] = 1.0
    return WeightedGraph(cloud.n, edges, cloud.ids)


def graph_laplacian(
    g: WeightedGraph, vertex_weights: Mapping[int, float] | None = None
) -> LaplacianMatrix:
    """Dense Laplacian L(G) plus optional diagonal vertex weights.

    ``L[u, u]`` is the weighted degree (+ the vertex's own weight, keyed by
    original id); ``L[u, v] = -w(u, v)`` off the diagonal.
    """
    m = -g.adjacency()
    np.fill_diagonal(m, g.degrees())
    w = np.zeros(g.n)
    if vertex_weights:
        for vid, wt in vertex_weights.items():
            wt = float(wt)
            if wt < 0:
                raise InputError(f"vertex weight for id {vid} must be nonnegative")
            idx = g.vertex_ids.index(int(vid)) if int(vid) in g.vertex_ids else None
            if idx is None:
                raise InputError(f"vertex weight references unknown id {vid}")
            m[idx, idx] += wt
            w[idx] = wt
    return LaplacianMatrix(m, g.vertex_ids, vertex_weights=w)


def reduced_laplacian(
    L: LaplacianMatrix,
    marks: MarkSet,
    mode: str = "delete",
    penalty_weight: float = 1e6,
) -> LaplacianMatrix:
    """Impose Dirichlet conditions at the marked vertices.

    mode="delete" removes the marked rows/columns (dimension shrinks);
    mode="penalty" keeps the dimension and adds ``penalty_weight`` to each
    marked diagonal, approximating deletion for large weights.
    """
    marks.validate_against(L.vertex_ids)
    if len(marks) == 0:
        raise InputError("mark set is empty")
    mark_idx = {L.index_of(v) for v in marks.ids}
    if mode == "delete":
        keep = [i for i in range(L.n) if i not in mark_idx]
        sub = L.entries[np.ix_(keep, keep)]
        ids = tuple(L.vertex_ids[i] for i in keep)
        weights = None
        if L.vertex_weights is not None:
            weights = L.vertex_weights[keep]
        return LaplacianMatrix(sub, ids, vertex_weights=weights)
    if mode == "penalty":
        if not np.isfinite(penalty_weight) or penalty_weight <= 0:
            raise ParameterError("penalty_weight must be positive and finite")
        m = L.entries.copy()
        for i in mark_idx:
            m[i, i] += penalty_weight
        weights = (
            L.vertex_weights.copy() if L.vertex_weights is not None else np.zeros(L.n)
        )
        for i in mark_idx:
            weights[i] += penalty_weight
        return LaplacianMatrix(m, L.vertex_ids, vertex_weights=weights)
    raise ParameterError(f"unknown reduction mode {mode!r}")


def connected_components(g: WeightedGraph) -> tuple[frozenset[int], ...]:
    """Vertex-id partition into connected components (BFS), largest first.

    Deterministic: components ordered by (-size, smallest contained id).
    """
    adj = g.neighbors()
    seen = [False] * g.n
    comps: list[frozenset[int]] = []
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        comp = [start]
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        comps.append(frozenset(g.vertex_ids[i] for i in comp))
    comps.sort(key=lambda c: (-len(c), min(c)))
    return tuple(comps)


def remove_outliers(g: WeightedGraph, min_component_fraction: float) -> WeightedGraph:
    """Drop every component smaller than max(2, ceil(fraction * n)) vertices.

    Raises ConstructionError when nothing survives.
    """
    if not (0.0 <= min_component_fraction <= 1.0):
        raise ParameterError("min_component_fraction must lie in [0, 1]")
    threshold = max(2, int(np.ceil(min_component_fraction * g.n)))
    keep_ids: set[int] = set()
    for comp in connected_components(g):
        if len(comp) >= threshold:
            keep_ids.update(comp)
    if not keep_ids:
        raise ConstructionError(
            f"all components fall below the size threshold {threshold}"
        )
    keep_idx = [i for i, vid in enumerate(g.vertex_ids) if vid in keep_ids]
    remap = {old: new for new, old in enumerate(keep_idx)}
    edges = {
        (remap[u], remap[v]): w
        for (u, v), w in g.edges.items()
        if u in remap and v in remap
    }
    ids = tuple(g.vertex_ids[i] for i in keep_idx)
    return WeightedGraph(len(keep_idx), edges, ids)


def matrix_to_csv(path, m: np.ndarray) -> None:
    """Write a dense matrix as plain CSV rows (repr-precision floats)."""
    m = np.asarray(m)
    with open(path, "w", encoding="utf-8") as fh:
        for row in m:
            fh.write(",".join(repr(float(x)) for x in row))
            fh.write("\n")
