"""Simulator and benchmark harness for graph-sampling-assisted clustering.

The package simulates slow continuous-time evolution between an easy
Hamiltonian and a reduced graph Laplacian, uses it as a sampling subroutine
that avoids marked vertices, and benchmarks the resulting seeding/labeling
hybrids against classical baselines on synthetic datasets.
"""

from .adiabatic import (
    QuantumState,
    Schedule,
    evolve,
    evolve_converged,
    grover_schedule,
    measure,
    outcome_distribution,
    uniform_state,
)
from .clustering import (
    ClusteringResult,
    KMeansConfig,
    kmeans,
    kpp_seed,
    l_nearest_neighbor_classify,
    laplacian_spectral_clustering,
    qmeans_seed,
    qnn,
    random_seed,
)
from .datasets import (
    LabeledDataset,
    gen_elliptical,
    gen_five_cluster,
    gen_sun_moon,
    gen_three_cigars,
    regenerate,
    subsample,
)
from .errors import (
    ConstructionError,
    DisconnectedGraphError,
    InputError,
    IntegrationError,
    ParameterError,
    QuacError,
)
from .graphs import (
    LaplacianMatrix,
    MarkSet,
    PointCloud,
    WeightedGraph,
    build_epsilon_graph,
    connected_components,
    graph_laplacian,
    reduced_laplacian,
    remove_outliers,
)
from .harness import (
    ExperimentRecord,
    ExperimentSpec,
    TrialRecord,
    epsilon_sweep,
    optimal_epsilon,
    report,
    run_experiment,
)
from .metrics import (
    ScatterReport,
    adjusted_rand_index,
    inertia,
    success_indicator,
    within_cluster_scatter,
)
from .qci import QciConfig, qci, qci_distribution, qci_samples, qci_state
from .spectral import (
    HamiltonianPath,
    SpectrumReport,
    dirichlet_spectrum,
    eigendecompose,
    gap_profile,
    generalized_grover_path,
    grover_gap,
    grover_path,
    verify_grover_equivalence,
)

__version__ = "0.1.0"
