"""Experiment runner: seeded trials, epsilon sweeps, and report rendering.

Every trial is fully determined by (root_seed, trial index): the dataset is
regenerated, subsampled, and processed with random streams derived from that
pair, so identical specs produce byte-identical canonical CSVs.  Wall-clock
times are recorded per trial but kept out of the canonical CSV (they go to
the JSON record), because timing is the one per-trial output that is not a
function of the seed.
"""

from __future__ import annotations

import concurrent.futures
import csv
import json
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .clustering import (
    KMeansConfig,
    kmeans,
    kpp_seed,
    laplacian_spectral_clustering,
    qmeans_seed,
    qnn,
    random_seed,
)
from .datasets import _GENERATORS, subsample
from .errors import InputError, ParameterError, QuacError
from .graphs import build_epsilon_graph, graph_laplacian, remove_outliers
from .metrics import adjusted_rand_index, success_indicator, within_cluster_scatter
from .qci import QciConfig

__all__ = [
    "ExperimentSpec",
    "TrialRecord",
    "ExperimentRecord",
    "run_experiment",
    "epsilon_sweep",
    "optimal_epsilon",
    "report",
]

ALGORITHMS = ("qmeans", "kpp", "random", "qnn", "spectral")

CSV_COLUMNS = (
    "trial",
    "dataset",
    "algorithm",
    "eps",
    "skip_reason",
    "success",
    "iterations",
    "ars",
    "ars_full",
    "inertia",
    "det_criterion",
)


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce one experiment batch."""

    dataset: str
    algorithm: str
    eps: float | None = None
    eps_grid: tuple[float, ...] = ()
    trials: int = 500
    subsample_fraction: float = 0.10
    m: int | None = None
    l: int = 5
    k: int | None = None
    fidelity_eps: float = 0.1
    outlier_fraction: float = 0.01
    kpp_weighting: str = "d2"
    root_seed: int = 0
    dataset_params: dict = field(default_factory=dict)
    output_path: str | None = None

    def __post_init__(self) -> None:
        if self.dataset not in _GENERATORS:
            raise ParameterError(f"unknown dataset {self.dataset!r}")
        if self.algorithm not in ALGORITHMS:
            raise ParameterError(f"unknown algorithm {self.algorithm!r}")
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if not (0.0 < self.subsample_fraction <= 1.0):
            raise ParameterError("subsample_fraction must lie in (0, 1]")
        if self.algorithm in ("qmeans", "qnn", "spectral") and self.eps is None and not self.eps_grid:
            raise ParameterError(f"algorithm {self.algorithm!r} needs eps or eps_grid")

    def to_json_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentSpec":
        data = dict(data)
        if "eps_grid" in data and data["eps_grid"] is not None:
            data["eps_grid"] = tuple(data["eps_grid"])
        return cls(**data)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    dataset: str
    algorithm: str
    eps: float | None
    skip_reason: str | None = None
    success: bool | None = None
    iterations: int | None = None
    ars: float | None = None
    ars_full: float | None = None
    inertia: float | None = None
    det_criterion: float | None = None
    wall_time: float = 0.0

    def csv_row(self) -> list[str]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return "1" if v else "0"
            if isinstance(v, float):
                return repr(v)
            return str(v)

        return [fmt(getattr(self, c)) for c in CSV_COLUMNS]


def _trial_streams(root_seed: int, trial: int):
    """Named, order-independent random streams for one trial."""
    data_seed = [root_seed, trial, 0]
    sub_seed = [root_seed, trial, 1]
    alg_rng = np.random.default_rng([root_seed, trial, 2])
    return data_seed, sub_seed, alg_rng


def _scored(
    base: TrialRecord,
    labels: np.ndarray,
    truth: np.ndarray,
    points: np.ndarray,
    iterations: int | None = None,
    ars_full: float | None = None,
) -> TrialRecord:
    scatter = within_cluster_scatter(points, labels)
    return replace(
        base,
        success=success_indicator(labels, truth),
        iterations=iterations,
        ars=adjusted_rand_index(labels, truth),
        ars_full=ars_full,
        inertia=scatter.inertia,
        det_criterion=scatter.det_criterion,
    )


def run_trial(spec: ExperimentSpec, trial: int) -> TrialRecord:
    """One fully-seeded trial; failures become skip records, not exceptions."""
    started = time.perf_counter()
    base = TrialRecord(trial, spec.dataset, spec.algorithm, spec.eps)
    data_seed, sub_seed, rng = _trial_streams(spec.root_seed, trial)
    try:
        ds = _GENERATORS[spec.dataset](seed=data_seed, **spec.dataset_params)
        k = spec.k if spec.k is not None else ds.n_clusters
        cfg = KMeansConfig(k)

        if spec.algorithm in ("kpp", "random"):
            if spec.algorithm == "kpp":
                seeds = kpp_seed(ds.cloud, k, rng, weighting=spec.kpp_weighting)
            else:
                seeds = random_seed(ds.cloud, k, rng)
            result = kmeans(ds.cloud, seeds, cfg)
            rec = _scored(base, result.labels, ds.truth, ds.cloud.points,
                          iterations=result.iterations_used)
        else:
            sub = subsample(ds, spec.subsample_fraction, sub_seed)
            graph = remove_outliers(
                build_epsilon_graph(sub.cloud, spec.eps), spec.outlier_fraction
            )
            if graph.n < k:
                raise InputError(f"{graph.n} graph vertices for k={k}")
            lap = graph_laplacian(graph)
            qci_cfg = QciConfig(fidelity_eps=spec.fidelity_eps)
            keep = [i for i, vid in enumerate(sub.cloud.ids) if vid in set(graph.vertex_ids)]
            sub_truth = sub.truth[keep]
            sub_points = sub.cloud.points[keep]

            if spec.algorithm == "qmeans":
                m = spec.m if spec.m is not None else 20 * graph.n
                seeds = qmeans_seed(ds.cloud, lap, k, m, qci_cfg, rng)
                result = kmeans(ds.cloud, seeds, cfg)
                rec = _scored(base, result.labels, ds.truth, ds.cloud.points,
                              iterations=result.iterations_used)
            elif spec.algorithm == "qnn":
                m = spec.m if spec.m is not None else 10
                labels = qnn(ds.cloud, lap, k, m, spec.l, qci_cfg, rng)
                on_graph = {vid: lab for vid, lab in zip(ds.cloud.ids, labels)}
                sub_labels = np.array([on_graph[v] for v in graph.vertex_ids])
                rec = _scored(
                    base, sub_labels, sub_truth, sub_points,
                    ars_full=adjusted_rand_index(labels, ds.truth),
                )
            else:  # spectral
                cfg = KMeansConfig(k, seed=int(rng.integers(2**31)))
                sub_labels = laplacian_spectral_clustering(lap, k, cfg)
                rec = _scored(base, sub_labels, sub_truth, sub_points)
    except QuacError as exc:
        rec = replace(base, skip_reason=f"{type(exc).__name__}: {exc}")
    return replace(rec, wall_time=time.perf_counter() - started)


@dataclass(frozen=True)
class ExperimentRecord:
    spec: ExperimentSpec
    trials: tuple[TrialRecord, ...]

    @property
    def valid_trials(self) -> tuple[TrialRecord, ...]:
        return tuple(t for t in self.trials if t.skip_reason is None)

    def aggregates(self) -> dict:
        valid = self.valid_trials
        out: dict = {
            "n_trials": len(self.trials),
            "n_skipped": len(self.trials) - len(valid),
        }
        if not valid:
            return out
        successes = [t for t in valid if t.success]
        failures = [t for t in valid if not t.success]
        rate = len(successes) / len(valid)
        out["success_rate"] = rate
        out["wilson_low"], out["wilson_high"] = _wilson(len(successes), len(valid))
        for name, group in (("successful", successes), ("failed", failures)):
            its = [t.iterations for t in group if t.iterations is not None]
            if its:
                out[f"iterations_{name}_mean"] = float(np.mean(its))
                out[f"iterations_{name}_std"] = float(np.std(its))
        scores = [t.ars for t in valid if t.ars is not None]
        if scores:
            out["ars_mean"] = float(np.mean(scores))
            out["ars_median"] = float(np.median(scores))
        full = [t.ars_full for t in valid if t.ars_full is not None]
        if full:
            out["ars_full_median"] = float(np.median(full))
        return out

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for t in self.trials:
                writer.writerow(t.csv_row())

    def to_json_dict(self) -> dict:
        return {
            "spec": self.spec.to_json_dict(),
            "aggregates": self.aggregates(),
            "trials": [asdict(t) for t in self.trials],
        }

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=1))

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentRecord":
        spec = ExperimentSpec.from_json_dict(data["spec"])
        trials = tuple(TrialRecord(**t) for t in data["trials"])
        return cls(spec, trials)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentRecord":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def _wilson(hits: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = hits / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return float(center - half), float(center + half)


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentRecord:
    """Run spec.trials seeded trials; merge results by trial index."""
    indices = range(spec.trials)
    if workers <= 1:
        trials = [run_trial(spec, i) for i in indices]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            trials = list(pool.map(run_trial, [spec] * spec.trials, indices, chunksize=4))
    trials.sort(key=lambda t: t.trial)
    return ExperimentRecord(spec, tuple(trials))


def epsilon_sweep(spec: ExperimentSpec, workers: int = 1) -> list[ExperimentRecord]:
    """run_experiment at every grid point, same root seed (paired trials)."""
    if not spec.eps_grid:
        raise ParameterError("epsilon_sweep needs a nonempty eps_grid")
    records = []
    for eps in spec.eps_grid:
        records.append(run_experiment(replace(spec, eps=float(eps), eps_grid=()), workers))
    return records


def optimal_epsilon(
    records: Sequence[ExperimentRecord],
    by: str = "success_rate",
    min_valid: int = 0,
) -> float:
    """Pick the sweep's best eps by an aggregate key (ties -> smaller eps).

    min_valid filters out grid points where too few trials produced a result
    (e.g. the spectral baseline refusing disconnected graphs).
    """
    best: tuple[float, float] | None = None
    for rec in records:
        agg = rec.aggregates()
        if len(rec.valid_trials) < min_valid:
            continue
        score = agg.get(by)
        if score is None:
            continue
        eps = float(rec.spec.eps)
        if best is None or score > best[0] + 1e-12 or (abs(score - best[0]) <= 1e-12 and eps < best[1]):
            best = (score, eps)
    if best is None:
        raise InputError(f"no sweep record offers aggregate {by!r}")
    return best[1]


def report(records: Sequence[ExperimentRecord], fmt: str = "text", path: str | Path | None = None) -> str:
    """Render records as a text table, per-trial CSV, or JSON bundle."""
    records = list(records)
    if not records:
        raise InputError("nothing to report")
    if fmt == "text":
        out = _text_report(records)
    elif fmt == "csv":
        lines = [",".join(CSV_COLUMNS)]
        for rec in records:
            for t in rec.trials:
                lines.append(",".join(t.csv_row()))
        out = "\n".join(lines) + "\n"
    elif fmt == "json":
        out = json.dumps([rec.to_json_dict() for rec in records], indent=1)
    else:
        raise ParameterError(f"unknown report format {fmt!r}")
    if path is not None:
        Path(path).write_text(out)
    return out


def _fmt_pm(agg: dict, name: str) -> str:
    mean = agg.get(f"iterations_{name}_mean")
    if mean is None:
        return "-"
    return f"{mean:.3f}±{agg[f'iterations_{name}_std']:.3f}"


def _text_report(records: Sequence[ExperimentRecord]) -> str:
    header = (
        f"{'dataset':<14}{'algorithm':<10}{'eps':>7}{'trials':>8}{'skip':>6}"
        f"{'success':>9}{'95% CI':>17}{'iters(ok)':>14}{'iters(fail)':>14}{'medARS':>8}"
    )
    lines = [header, "-" * len(header)]
    for rec in records:
        agg = rec.aggregates()
        eps = "-" if rec.spec.eps is None else f"{rec.spec.eps:g}"
        rate = agg.get("success_rate")
        rate_s = "-" if rate is None else f"{100 * rate:.1f}%"
        ci = (
            "-"
            if "wilson_low" not in agg
            else f"[{100 * agg['wilson_low']:.1f},{100 * agg['wilson_high']:.1f}]%"
        )
        med = agg.get("ars_median")
        lines.append(
            f"{rec.spec.dataset:<14}{rec.spec.algorithm:<10}{eps:>7}"
            f"{agg['n_trials']:>8}{agg['n_skipped']:>6}{rate_s:>9}{ci:>17}"
            f"{_fmt_pm(agg, 'successful'):>14}{_fmt_pm(agg, 'failed'):>14}"
            f"{'-' if med is None else f'{med:.3f}':>8}"
        )
    return "\n".join(lines) + "\n"
