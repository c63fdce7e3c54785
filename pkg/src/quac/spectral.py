"""Spectra, spectral gaps, and interpolating Hamiltonian paths.

All Hamiltonians here are real symmetric.  Eigenvalues are reported in
ascending order.  The spectral gap is degeneracy-aware: it is the distance
from the lowest eigenvalue to the first eigenvalue *strictly* above it,
where "strictly" is decided by ``DEGENERACY_TOL`` relative to the spectral
scale.  A matrix whose spectrum is a single degenerate point has gap 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import ConstructionError, InputError, ParameterError
from .graphs import LaplacianMatrix, MarkSet, WeightedGraph, connected_components, graph_laplacian, reduced_laplacian

__all__ = [
    "DEGENERACY_TOL",
    "SpectrumReport",
    "HamiltonianPath",
    "eigendecompose",
    "dirichlet_spectrum",
    "gap_profile",
    "grover_path",
    "grover_gap",
    "generalized_grover_path",
    "GroverEquivalenceReport",
    "verify_grover_equivalence",
]

#: Relative tolerance deciding when two eigenvalues count as degenerate and
#: when an eigenvalue counts as zero.
DEGENERACY_TOL = 1e-8

_SYM_TOL = 1e-10


def _check_symmetric(h: np.ndarray, what: str = "matrix") -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InputError(f"{what} must be square, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
    if np.max(np.abs(h - h.T)) > _SYM_TOL * scale:
        raise InputError(f"{what} must be symmetric within {_SYM_TOL}")
    return h


def _gap_from_eigenvalues(vals: np.ndarray) -> float:
    if vals.size < 2:
        return 0.0
    scale = max(1.0, float(np.max(np.abs(vals))))
    above = vals[vals > vals[0] + DEGENERACY_TOL * scale]
    if above.size == 0:
        return 0.0
    return float(above[0] - vals[0])


@dataclass(frozen=True)
class SpectrumReport:
    """Eigendecomposition summary of a symmetric matrix.

    Attributes
    ----------
    eigenvalues : ndarray, ascending.
    eigenvectors : ndarray, columns aligned with ``eigenvalues``, orthonormal.
    zero_multiplicity : int
        Count of eigenvalues below the zero tolerance used at construction.
    gap : float
        Degeneracy-aware spectral gap above the ground eigenvalue.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    zero_multiplicity: int
    gap: float

    def to_json_dict(self) -> dict:
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "zero_multiplicity": int(self.zero_multiplicity),
            "gap": float(self.gap),
            "eigenvectors": [[float(x) for x in col] for col in self.eigenvectors.T],
        }


def eigendecompose(h: np.ndarray, zero_tol: float | None = None) -> SpectrumReport:
    """Full symmetric eigendecomposition with zero-multiplicity bookkeeping.

    Parameters
    ----------
    h : ndarray
        Symmetric within 1e-10 (relative); asymmetric input raises InputError.
    zero_tol : float, optional
        Absolute threshold below which an eigenvalue counts as zero.  Default
        is ``DEGENERACY_TOL * max(1, lambda_max)``.
    """
    h = _check_symmetric(h)
    vals, vecs = scipy.linalg.eigh(h)
    if zero_tol is None:
        zero_tol = DEGENERACY_TOL * max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
    zero_mult = int(np.count_nonzero(vals < zero_tol))
    return SpectrumReport(vals, vecs, zero_mult, _gap_from_eigenvalues(vals))


def dirichlet_spectrum(L: LaplacianMatrix, marks: MarkSet) -> SpectrumReport:
    """Spectrum of the reduced (delete-mode) Laplacian under the given marks."""
    red = reduced_laplacian(L, marks, mode="delete")
    return eigendecompose(red.entries)


@dataclass(frozen=True)
class HamiltonianPath:
    """Convex interpolation H(s) = (1-s) H_init + s H_final, s in [0, 1]."""

    h_init: np.ndarray
    h_final: np.ndarray

    def __post_init__(self) -> None:
        hi = _check_symmetric(self.h_init, "h_init")
        hf = _check_symmetric(self.h_final, "h_final")
        if hi.shape != hf.shape:
            raise InputError(
                f"endpoint dimensions differ: {hi.shape} vs {hf.shape}"
            )
        object.__setattr__(self, "h_init", hi)
        object.__setattr__(self, "h_final", hf)

    @property
    def dim(self) -> int:
        return self.h_init.shape[0]

    def at(self, s: float) -> np.ndarray:
        if not (0.0 <= s <= 1.0):
            raise ParameterError(f"s must lie in [0, 1], got {s}")
        return (1.0 - s) * self.h_init + s * self.h_final


def gap_profile(path: HamiltonianPath, s_samples: Sequence[float]) -> np.ndarray:
    """Spectral gap of H(s) at each sample; returns rows (s, gap)."""
    samples = np.asarray(list(s_samples), dtype=float)
    if samples.size == 0:
        raise ParameterError("s_samples must be nonempty")
    out = np.empty((samples.size, 2))
    for i, s in enumerate(samples):
        vals = scipy.linalg.eigvalsh(path.at(float(s)))
        out[i, 0] = s
        out[i, 1] = _gap_from_eigenvalues(vals)
    return out


def _uniform(n: int) -> np.ndarray:
    return np.full(n, 1.0 / np.sqrt(n))


def grover_path(n: int, marked: Sequence[int]) -> HamiltonianPath:
    """Textbook search path on an unstructured register of ``n`` states.

    H_init projects out the uniform superposition; H_final projects out the
    uniform superposition over the ``marked`` index set.
    """
    if n < 2:
        raise ParameterError("need n >= 2 states")
    marked = sorted({int(m) for m in marked})
    if not marked:
        raise ParameterError("need at least one marked state")
    if len(marked) >= n:
        raise ParameterError("marked set must be a proper subset")
    if marked[0] < 0 or marked[-1] >= n:
        raise ParameterError("marked indices out of range")
    phi = _uniform(n)
    phi_m = np.zeros(n)
    phi_m[marked] = 1.0 / np.sqrt(len(marked))
    h_init = np.eye(n) - np.outer(phi, phi)
    h_final = np.eye(n) - np.outer(phi_m, phi_m)
    return HamiltonianPath(h_init, h_final)


def grover_gap(n: int, n_marked: int, s: float | np.ndarray) -> float | np.ndarray:
    """Closed-form gap g(s) = sqrt(1 - 4 (1 - |M|/n) s (1-s)) of the search path."""
    if n < 2 or not (1 <= n_marked < n):
        raise ParameterError("need n >= 2 and 1 <= n_marked < n")
    s = np.asarray(s, dtype=float)
    g = np.sqrt(1.0 - 4.0 * (1.0 - n_marked / n) * s * (1.0 - s))
    return float(g) if g.ndim == 0 else g


@dataclass(frozen=True)
class GroverEquivalenceReport:
    """Outcome of comparing a generalized path against the textbook one.

    ``applicable`` is False for the degenerate no-mark construction, where the
    path is constant on the shared eigenspace and there is nothing to compare.
    """

    applicable: bool
    max_gap_deviation: float
    min_ground_overlap: float
    gap_generalized: np.ndarray | None
    gap_reference: np.ndarray | None

    def __bool__(self) -> bool:  # truthy when the check is meaningful and tight
        return self.applicable and self.max_gap_deviation < 1e-9


def generalized_grover_path(
    graph: WeightedGraph, marks: MarkSet, target_ids: Sequence[int]
) ->tuple[HamiltonianPath, int, int]:
    """Build the reduced search path for a marked multi-component graph.

    The final Hamiltonian is the delete-mode reduced Laplacian.  The initial
    Hamiltonian shares every eigenvector of the final one except two: the
    uniform vector on the target component (eigenvalue 0) and the uniform
    vector on the remaining surviving vertices (eigenvalue 1) are replaced by
    the global uniform vector e0 (eigenvalue 0) and its in-plane orthogonal
    complement e1 (eigenvalue 1).  Construction requires every surviving
    non-target vertex to be adjacent to exactly one mark with unit weight.

    Returns (path, n_reduced, n_target).
    """
    marks.validate_against(graph.vertex_ids)
    target = {int(t) for t in target_ids}
    if not target:
        raise ConstructionError("target component is empty")
    comps = connected_components(graph)
    target_comp = None
    for comp in comps:
        if target <= comp:
            target_comp = comp
            break
    if target_comp is None or target != set(target_comp):
        raise ConstructionError("target_ids must be exactly one connected component")
    if marks.ids & target:
        raise ConstructionError("marks may not touch the target component")
    if len(marks) == 0:
        raise ConstructionError(
            "no marks: degenerate single-component construction has no search structure"
        )

    # adjacency bookkeeping in id space
    idx_of = {vid: i for i, vid in enumerate(graph.vertex_ids)}
    adj = graph.neighbors()
    mark_idx = {idx_of[v] for v in marks.ids}
    survivors = [vid for vid in graph.vertex_ids if vid not in marks.ids]
    for vid in survivors:
        if vid in target:
            continue
        i = idx_of[vid]
        touching = [j for j in adj[i] if j in mark_idx]
        if len(touching) != 1:
            raise ConstructionError(
                f"vertex {vid} is adjacent to {len(touching)} marks; need exactly 1"
            )
        j = touching[0]
        if abs(graph.weight(i, j) - 1.0) > 1e-12:
            raise ConstructionError(
                f"mark edge at vertex {vid} must have unit weight"
            )

    L = graph_laplacian(graph)
    h_final = reduced_laplacian(L, marks, mode="delete")
    n_red = h_final.n
    n_target = len(target)
    n_rest = n_red - n_target
    if n_rest == 0:
        raise ConstructionError("no surviving non-target vertices")

    in_target = np.array([vid in target for vid in h_final.vertex_ids])
    f0 = np.where(in_target, 1.0 / np.sqrt(n_target), 0.0)
    f1 = np.where(~in_target, 1.0 / np.sqrt(n_rest), 0.0)
    e0 = _uniform(n_red)
    e1 = np.sqrt(n_rest / n_red) * f0 - np.sqrt(n_target / n_red) * f1
    # surgery: swap the (f0, 0), (f1, 1) eigenpairs for (e0, 0), (e1, 1)
    h_init = h_final.entries - np.outer(f1, f1) + np.outer(e1, e1)
    return HamiltonianPath(h_init, h_final.entries), n_red, n_target


def verify_grover_equivalence(
    generalized: HamiltonianPath,
    n: int,
    n_target: int,
    s_samples: Sequence[float] | None = None,
) -> GroverEquivalenceReport:
    """Compare a generalized path's gap profile to the textbook search path.

    Parameters
    ----------
    generalized : HamiltonianPath
        Path built by `generalized_grover_path` (dimension must equal ``n``).
    n, n_target : int
        Reduced dimension and target-component size; the reference path is
        the ``n``-state search Hamiltonian with ``n_target`` marked states.
    s_samples : sequence of float, optional
        Defaults to 101 evenly spaced points on [0, 1].

    Also reports the smallest overlap of the instantaneous ground state with
    the two-dimensional invariant plane spanned by the kernel vector of
    H_final and the uniform vector.
    """
    if generalized.dim != n:
        raise InputError(f"path dimension {generalized.dim} != n = {n}")
    if not (1 <= n_target < n):
        raise ParameterError("need 1 <= n_target < n")
    if s_samples is None:
        s_samples = np.linspace(0.0, 1.0, 101)
    reference = grover_path(n, list(range(n_target)))

    prof_gen = gap_profile(generalized, s_samples)
    prof_ref = gap_profile(reference, s_samples)
    max_dev = float(np.max(np.abs(prof_gen[:, 1] - prof_ref[:, 1])))

    # invariant plane span{f0, e0} = span{f0, f1}
    vals_f, vecs_f = scipy.linalg.eigh(generalized.h_final)
    f0 = vecs_f[:, 0]
    e0 = _uniform(n)
    basis = np.linalg.qr(np.column_stack([f0, e0]))[0]
    min_overlap = 1.0
    for s in np.asarray(list(s_samples), dtype=float):
        vals, vecs = scipy.linalg.eigh(generalized.at(float(s)))
        ground = vecs[:, 0]
        proj = basis.T @ ground
        min_overlap = min(min_overlap, float(proj @ proj))
    return GroverEquivalenceReport(
        applicable=True,
        max_gap_deviation=max_dev,
        min_ground_overlap=min_overlap,
        gap_generalized=prof_gen,
        gap_reference=prof_ref,
    )
