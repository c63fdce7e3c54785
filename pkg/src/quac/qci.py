"""Quantum-component-identification sampling.

Given a weighted graph's Laplacian and a set of marked vertices, the marked
rows/columns are removed (or penalized), the remaining register is evolved
from the uniform superposition under the locally-adiabatic search schedule
with the operator pair

    H_I = I - |u><u|        (u uniform on the register)
    H_F = reduced Laplacian

and the evolved state is projected onto the ground eigenspace of H_F before
Born sampling.  For a graph whose marked vertices sit in their own
components, that ground space is spanned by the uniform vectors of the
untouched components, so samples land outside every marked component up to
floating-point roundoff rather than up to the adiabatic error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .adiabatic import (
    QuantumState,
    evolve,
    gershgorin_max,
    grover_schedule,
    suggest_steps,
    uniform_state,
)
from .errors import IntegrationError, ParameterError
from .graphs import LaplacianMatrix, MarkSet, WeightedGraph, connected_components, reduced_laplacian
from .spectral import DEGENERACY_TOL

__all__ = [
    "QciConfig",
    "qci_state",
    "qci_distribution",
    "qci",
    "qci_samples",
    "mass_on_marked_components",
]


@dataclass(frozen=True)
class QciConfig:
    """Knobs for the sampling subroutine.

    fidelity_eps: adiabatic accuracy parameter of the schedule.
    mode: "delete" removes marked rows/columns, "penalty" adds
        penalty_weight to marked diagonal entries instead.
    penalty_weight: diagonal shift used by penalty mode; kept moderate by
        default so the explicit integrator's stability step bound stays
        usable.
    steps: fixed integrator step count, or None for the deterministic
        spectral-bound rule.
    seed: fallback sampling seed, used only when no generator is passed in.
    """

    fidelity_eps: float = 0.1
    mode: str = "delete"
    penalty_weight: float = 50.0
    steps: int | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if not (0.0 < self.fidelity_eps < 1.0):
            raise ParameterError("fidelity_eps must lie in (0, 1)")
        if self.mode not in ("delete", "penalty"):
            raise ParameterError(f"unknown marking mode {self.mode!r}")
        if self.penalty_weight <= 0:
            raise ParameterError("penalty_weight must be positive")
        if self.steps is not None and self.steps < 1:
            raise ParameterError("steps must be >= 1 when given")


def _project_ground(h: np.ndarray, amplitudes: np.ndarray) -> np.ndarray:
    """Project onto the ground eigenspace of symmetric h and renormalize."""
    vals, vecs = scipy.linalg.eigh(h)
    scale = max(1.0, float(abs(vals[-1])))
    basis = vecs[:, vals <= vals[0] + DEGENERACY_TOL * scale]
    proj = basis @ (basis.T @ amplitudes)
    nrm = float(np.linalg.norm(proj))
    if nrm < 1e-12:
        raise IntegrationError("evolved state has no overlap with the ground space")
    return proj / nrm


def qci_state(
    laplacian: LaplacianMatrix,
    marks: MarkSet,
    config: QciConfig = QciConfig(),
) -> QuantumState:
    """Evolved-and-projected register state for one marked-vertex query."""
    marks = marks if isinstance(marks, MarkSet) else MarkSet.of(marks)
    reduced = reduced_laplacian(
        laplacian, marks, mode=config.mode, penalty_weight=config.penalty_weight
    )
    ids = reduced.vertex_ids
    n = len(ids)
    if n == 1:
        return QuantumState(np.ones(1, dtype=complex), ids)

    h_final = reduced.entries
    u = np.full(n, 1.0 / np.sqrt(n))
    h_init = np.eye(n) - np.outer(u, u)
    schedule = grover_schedule(n, 1, config.fidelity_eps)
    steps = config.steps
    if steps is None:
        lam = max(gershgorin_max(h_init), gershgorin_max(h_final), 1.0)
        # penalty mode keeps the marked vertices in the register, so the
        # initial uniform state occupies the penalized (stiffest) modes and
        # the stability margin must be far more conservative
        margin = 0.3 if config.mode == "penalty" else None
        steps = suggest_steps(schedule.t_final, lam, margin)

    psi0 = uniform_state(ids, ids)
    psi = evolve(h_init, h_final, schedule, psi0, steps)
    amp = _project_ground(h_final, psi.amplitudes)
    return QuantumState(amp, ids)


def qci_distribution(
    laplacian: LaplacianMatrix,
    marks: MarkSet,
    config: QciConfig = QciConfig(),
) -> dict[int, float]:
    """Sampling distribution over register vertex ids."""
    psi = qci_state(laplacian, marks, config)
    p = psi.probabilities()
    return {vid: float(p[i]) for i, vid in enumerate(psi.vertex_ids)}


def qci(
    laplacian: LaplacianMatrix,
    marks: MarkSet,
    config: QciConfig = QciConfig(),
    rng: np.random.Generator | None = None,
) -> int:
    """Draw one vertex id from the query distribution."""
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    psi = qci_state(laplacian, marks, config)
    idx = int(rng.choice(psi.dim, p=psi.probabilities()))
    return psi.vertex_ids[idx]


def qci_samples(
    laplacian: LaplacianMatrix,
    marks: MarkSet,
    n_samples: int,
    config: QciConfig = QciConfig(),
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Draw many ids from a single evolution of the register."""
    if n_samples < 1:
        raise ParameterError("n_samples must be >= 1")
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    psi = qci_state(laplacian, marks, config)
    idx = rng.choice(psi.dim, size=n_samples, p=psi.probabilities())
    ids = np.asarray(psi.vertex_ids)
    return ids[idx]


def mass_on_marked_components(
    distribution: dict[int, float],
    graph: WeightedGraph,
    marks: MarkSet,
) -> float:
    """Probability mass the distribution places inside marked components."""
    marks = marks if isinstance(marks, MarkSet) else MarkSet.of(marks)
    mark_ids = set(marks)
    touched: set[int] = set()
    for comp in connected_components(graph):
        if comp & mark_ids:
            touched |= comp
    return float(sum(p for vid, p in distribution.items() if vid in touched))
