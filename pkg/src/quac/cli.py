"""Command-line front end.

Subcommands: generate, graph, qci, qmeans, qnn, sweep, report.  Experiment
subcommands accept every spec field as a flag and/or a JSON config file
(flags win).  Outputs are CSV/JSON files plus a text table on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import scipy.linalg

from . import adiabatic, harness
from .datasets import _GENERATORS, LabeledDataset, subsample
from .errors import QuacError
from .graphs import (
    MarkSet,
    WeightedGraph,
    build_epsilon_graph,
    graph_laplacian,
    matrix_to_csv,
    reduced_laplacian,
    remove_outliers,
)
from .qci import QciConfig, qci_distribution, qci_samples

__all__ = ["main"]


def _parse_params(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep:
            raise SystemExit(f"--param expects key=value, got {pair!r}")
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def _load_dataset(args) -> LabeledDataset:
    if getattr(args, "infile", None):
        path = Path(args.infile)
        return (
            LabeledDataset.from_json(path)
            if path.suffix == ".json"
            else LabeledDataset.from_csv(path)
        )
    params = _parse_params(getattr(args, "param", []) or [])
    ds = _GENERATORS[args.dataset](seed=args.seed, **params)
    if getattr(args, "subsample_fraction", None) is not None:
        ds = subsample(ds, args.subsample_fraction, args.subsample_seed)
    return ds


def _build_graph(args) -> WeightedGraph:
    if getattr(args, "graph", None):
        return WeightedGraph.from_json(Path(args.graph).read_text())
    ds = _load_dataset(args)
    g = build_epsilon_graph(ds.cloud, args.eps)
    if args.outlier_fraction is not None:
        g = remove_outliers(g, args.outlier_fraction)
    return g


def _add_dataset_source(p: argparse.ArgumentParser, with_subsample: bool = True) -> None:
    p.add_argument("--dataset", choices=sorted(_GENERATORS), help="generator name")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="generator parameter override (repeatable)")
    p.add_argument("--in", dest="infile", help="load dataset from CSV/JSON instead")
    if with_subsample:
        p.add_argument("--subsample-fraction", type=float, default=None)
        p.add_argument("--subsample-seed", type=int, default=0)


def _cmd_generate(args) -> int:
    ds = _load_dataset(args)
    out = Path(args.out)
    if args.format == "json" or (args.format == "auto" and out.suffix == ".json"):
        ds.to_json(out)
    else:
        ds.to_csv(out)
    print(f"wrote {ds.n} points, {ds.n_clusters} clusters -> {out}")
    return 0


def _cmd_graph(args) -> int:
    g = _build_graph(args)
    Path(args.out).write_text(g.to_json())
    if args.laplacian_csv:
        matrix_to_csv(args.laplacian_csv, graph_laplacian(g).entries)
    print(f"graph: {g.n} vertices, {len(g.edges)} edges -> {args.out}")
    return 0


def _write_trace(path: str, lap, marks: MarkSet, cfg: QciConfig) -> None:
    """Evolve once more with tracing and dump (t, s, norm, ground overlap)."""
    reduced = reduced_laplacian(lap, marks, mode=cfg.mode, penalty_weight=cfg.penalty_weight)
    n = len(reduced.vertex_ids)
    h_final = reduced.entries
    u = np.full(n, 1.0 / np.sqrt(n))
    h_init = np.eye(n) - np.outer(u, u)
    schedule = adiabatic.grover_schedule(n, 1, cfg.fidelity_eps)
    steps = cfg.steps or adiabatic.suggest_steps(
        schedule.t_final,
        max(adiabatic.gershgorin_max(h_init), adiabatic.gershgorin_max(h_final), 1.0),
    )
    rows = []

    def trace(t, s, norm, amp):
        h = (1 - s) * h_init + s * h_final
        vals, vecs = scipy.linalg.eigh(h)
        ground = vecs[:, vals <= vals[0] + 1e-8 * max(1.0, abs(vals[-1]))]
        overlap = float(np.sum(np.abs(ground.T @ amp) ** 2))
        rows.append((t, s, norm, overlap))

    psi0 = adiabatic.uniform_state(reduced.vertex_ids, reduced.vertex_ids)
    adiabatic.evolve(h_init, h_final, schedule, psi0, steps, trace=trace)
    with open(path, "w") as fh:
        fh.write("t,s,norm,ground_overlap\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _cmd_qci(args) -> int:
    g = _build_graph(args)
    lap = graph_laplacian(g)
    marks = MarkSet.of(int(v) for v in args.marks.split(","))
    cfg = QciConfig(
        fidelity_eps=args.fidelity_eps,
        mode=args.mode,
        steps=args.steps,
        seed=args.rng_seed,
    )
    rng = np.random.default_rng(args.rng_seed)
    samples = qci_samples(lap, marks, args.samples, cfg, rng)
    print(" ".join(str(int(v)) for v in samples))
    if args.distribution:
        dist = qci_distribution(lap, marks, cfg)
        Path(args.distribution).write_text(json.dumps({str(k): v for k, v in dist.items()}, indent=1))
    if args.trace:
        _write_trace(args.trace, lap, marks, cfg)
    return 0


def _add_experiment_flags(p: argparse.ArgumentParser, algorithms: tuple[str, ...]) -> None:
    p.add_argument("--config", help="JSON file with ExperimentSpec fields")
    p.add_argument("--dataset", choices=sorted(_GENERATORS))
    p.add_argument("--algorithm", choices=algorithms)
    p.set_defaults(default_algorithm=algorithms[0])
    p.add_argument("--eps", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--subsample-fraction", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--fidelity-eps", type=float)
    p.add_argument("--outlier-fraction", type=float)
    p.add_argument("--kpp-linear", action="store_true",
                   help="seed k++ with linear instead of squared distance weights")
    p.add_argument("--root-seed", type=int)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="dataset parameter override (repeatable)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output prefix (writes PREFIX.csv and PREFIX.json)")


def _spec_from_args(args, eps_grid: tuple[float, ...] = ()) -> harness.ExperimentSpec:
    fields: dict = {}
    if args.config:
        fields.update(json.loads(Path(args.config).read_text()))
    overrides = {
        "dataset": args.dataset,
        "algorithm": args.algorithm,
        "eps": args.eps,
        "trials": args.trials,
        "subsample_fraction": args.subsample_fraction,
        "m": args.m,
        "l": args.l,
        "k": args.k,
        "fidelity_eps": args.fidelity_eps,
        "outlier_fraction": args.outlier_fraction,
        "root_seed": args.root_seed,
        "output_path": args.out,
    }
    fields.update({k: v for k, v in overrides.items() if v is not None})
    fields.setdefault("algorithm", args.default_algorithm)
    if args.kpp_linear:
        fields["kpp_weighting"] = "linear"
    if args.param:
        fields.setdefault("dataset_params", {}).update(_parse_params(args.param))
    if eps_grid:
        fields["eps_grid"] = eps_grid
        fields.pop("eps", None)
    return harness.ExperimentSpec.from_json_dict(fields)


def _emit_record(rec: harness.ExperimentRecord, out: str | None) -> None:
    if out:
        rec.to_csv(f"{out}.csv")
        rec.to_json(f"{out}.json")
    sys.stdout.write(harness.report([rec]))


def _cmd_experiment(args) -> int:
    spec = _spec_from_args(args)
    rec = harness.run_experiment(spec, workers=args.workers)
    _emit_record(rec, spec.output_path)
    return 0


def _cmd_sweep(args) -> int:
    grid = tuple(float(v) for v in args.eps_grid.split(","))
    spec = _spec_from_args(args, eps_grid=grid)
    records = harness.epsilon_sweep(spec, workers=args.workers)
    for rec in records:
        if spec.output_path:
            stem = f"{spec.output_path}_eps{rec.spec.eps:g}"
            rec.to_csv(f"{stem}.csv")
            rec.to_json(f"{stem}.json")
    sys.stdout.write(harness.report(records))
    by = "success_rate" if spec.algorithm in ("qmeans", "kpp", "random") else "ars_median"
    try:
        print(f"optimal eps by {by}: {harness.optimal_epsilon(records, by=by):g}")
    except QuacError:
        print("optimal eps: undefined (no valid trials)")
    return 0


def _cmd_report(args) -> int:
    records = [harness.ExperimentRecord.from_json(p) for p in args.records]
    out = harness.report(records, fmt=args.format, path=args.out)
    if not args.out:
        sys.stdout.write(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quac", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a labeled synthetic dataset")
    _add_dataset_source(p)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("auto", "csv", "json"), default="auto")
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("graph", help="build an epsilon-neighborhood graph")
    _add_dataset_source(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--outlier-fraction", type=float, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--laplacian-csv")
    p.set_defaults(fn=_cmd_graph)

    p = sub.add_parser("qci", help="sample vertices with marked vertices removed")
    _add_dataset_source(p)
    p.add_argument("--graph", help="load graph JSON instead of building one")
    p.add_argument("--eps", type=float)
    p.add_argument("--outlier-fraction", type=float, default=None)
    p.add_argument("--marks", required=True, help="comma-separated vertex ids")
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--fidelity-eps", type=float, default=0.1)
    p.add_argument("--mode", choices=("delete", "penalty"), default="delete")
    p.add_argument("--steps", type=int)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--distribution", help="write the full distribution JSON here")
    p.add_argument("--trace", help="write an evolution trace CSV here")
    p.set_defaults(fn=_cmd_qci)

    p = sub.add_parser("qmeans", help="seeding-comparison experiment trials")
    _add_experiment_flags(p, ("qmeans", "kpp", "random"))
    p.set_defaults(fn=_cmd_experiment)

    p = sub.add_parser("qnn", help="graph-labeling vs spectral experiment trials")
    _add_experiment_flags(p, ("qnn", "spectral"))
    p.set_defaults(fn=_cmd_experiment)

    p = sub.add_parser("sweep", help="run an experiment across an eps grid")
    _add_experiment_flags(p, ("qmeans", "kpp", "random", "qnn", "spectral"))
    p.add_argument("--eps-grid", required=True, help="comma-separated eps values")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("report", help="render saved experiment records")
    p.add_argument("records", nargs="+", help="record JSON files")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except QuacError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
