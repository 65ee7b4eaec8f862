"""Experiment driver: identification-rate grids over (method, distractor
count, seed), runtime curves, and tidy CSV output.

Per-run seeds are derived as SeedSequence((master_seed, xb_size, run_index)),
so every run is reproducible in isolation and all methods within a run see
the identical dataset (paired comparison). Wall-clock columns are the only
nondeterministic output; pass record_timings=False to zero them when byte-
identical re-runs are required.
"""

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
import numpy as np

from . import _kernels as kernels
from .errors import ConfigError, InfeasibleError
from .icp import IcpConfig, icp_fit
from .icscm import IcscmConfig, icscm_fit
from .scm import ScmConfig, scm_fit
from .simulator import SimConfig, simulate

KNOWN_METHODS = ("scm", "icscm", "icscm_noprune", "icp")

IDENTIFICATION_COLUMNS = (
    "method",
    "xb_size",
    "seed",
    "exact_match",
    "precision",
    "recall",
    "wall_time_s",
)

SUMMARY_COLUMNS = (
    "method",
    "xb_size",
    "n_runs",
    "identification_rate",
    "mean_precision",
    "mean_recall",
    "mean_wall_time_s",
)


@dataclass(frozen=True)
class ExperimentGrid:
    methods: tuple = ("scm", "icscm", "icp")
    xb_sizes: tuple = (1, 2, 3, 4, 5, 6, 7)
    n_runs: int = 20
    master_seed: int = 0
    base_sim: SimConfig = SimConfig()
    scm_config: ScmConfig = ScmConfig()
    icscm_config: IcscmConfig = IcscmConfig()
    icp_config: IcpConfig = IcpConfig()
    record_timings: bool = True
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "xb_sizes", tuple(int(x) for x in self.xb_sizes))
        if not self.methods:
            raise ConfigError("methods must not be empty")
        unknown = [m for m in self.methods if m not in KNOWN_METHODS]
        if unknown:
            raise ConfigError(f"unknown methods {unknown}; choices: {KNOWN_METHODS}")
        if not self.xb_sizes:
            raise ConfigError("xb_sizes must not be empty")
        if any(x < 0 for x in self.xb_sizes):
            raise ConfigError("xb_sizes must be non-negative")
        if self.n_runs < 1:
            raise ConfigError(f"n_runs must be >= 1, got {self.n_runs}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")


@dataclass(frozen=True)
class IdentificationResult:
    method: str
    xb_size: int
    seed: int
    selected_features: frozenset
    exact_match: bool
    precision: float
    recall: float
    wall_time_s: float


def derive_run_seed(master_seed, xb_size, run_index):
    """Stable 64-bit per-run seed; independent of the method list."""
    ss = np.random.SeedSequence((int(master_seed), int(xb_size), int(run_index)))
    return int(ss.generate_state(1, np.uint64)[0])


def precision_recall(selected, parents):
    """Precision of the selected set against the true parents (empty
    selection counts as precision 1) and recall |selected & parents| /
    |parents|."""
    selected = frozenset(selected)
    parents = frozenset(parents)
    hit = len(selected & parents)
    precision = 1.0 if not selected else hit / len(selected)
    recall = hit / len(parents) if parents else 1.0
    return precision, recall


def check_icp_feasible(grid):
    if not any(m == "icp" for m in grid.methods):
        return
    cfg = grid.icp_config
    if cfg.max_subset_size is not None:
        return
    worst = max(grid.xb_sizes) + 3
    if worst > cfg.feasibility_limit:
        raise InfeasibleError(
            f"icp over {worst} features needs 2**{worst} subset tests "
            f"(limit 2**{cfg.feasibility_limit}); cap max_subset_size or "
            "shrink the grid"
        )


def _fit_selected(method, dataset, grid):
    if method == "scm":
        return set(scm_fit(dataset, grid.scm_config).selected_features)
    if method == "icscm":
        return set(icscm_fit(dataset, grid.icscm_config).selected_features)
    if method == "icscm_noprune":
        config = replace(grid.icscm_config, prune=False)
        return set(icscm_fit(dataset, config).selected_features)
    if method == "icp":
        return icp_fit(dataset, grid.icp_config)
    raise ConfigError(f"unknown method {method!r}")


def _run_cell(args):
    """One (xb_size, run_index) task: simulate once, fit every method."""
    grid, xb_size, run_index = args
    seed = derive_run_seed(grid.master_seed, xb_size, run_index)
    sim = replace(grid.base_sim, n_distractors=xb_size, seed=seed)
    dataset, truth = simulate(sim)
    parents = truth.parent_indices
    rows = []
    for method in grid.methods:
        start = time.perf_counter()
        selected = _fit_selected(method, dataset, grid)
        elapsed = time.perf_counter() - start
        precision, recall = precision_recall(selected, parents)
        rows.append(
            IdentificationResult(
                method=method,
                xb_size=xb_size,
                seed=seed,
                selected_features=frozenset(selected),
                exact_match=frozenset(selected) == parents,
                precision=precision,
                recall=recall,
                wall_time_s=elapsed if grid.record_timings else 0.0,
            )
        )
    return rows


def run_identification(grid, out_dir=None, plot_data=False):
    """Run the grid and return the per-run results, optionally writing
    identification.csv, summary.csv, manifest.json (and the tidy plot CSV)
    under ``out_dir``."""
    check_icp_feasible(grid)
    tasks = [
        (grid, xb, run) for xb in grid.xb_sizes for run in range(grid.n_runs)
    ]
    if grid.jobs > 1:
        with ProcessPoolExecutor(max_workers=grid.jobs) as pool:
            nested = list(pool.map(_run_cell, tasks, chunksize=1))
    else:
        nested = [_run_cell(task) for task in tasks]
    results = [row for rows in nested for row in rows]
    order = {m: i for i, m in enumerate(grid.methods)}
    results.sort(key=lambda r: (r.xb_size, r.seed, order[r.method]))
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_identification_csv(results, out_dir / "identification.csv")
        summary = summarize(results)
        write_summary_csv(summary, out_dir / "summary.csv")
        write_manifest(grid, out_dir)
        if plot_data:
            write_precision_recall_csv(summary, out_dir / "fig_precision_recall.csv")
    return results


def summarize(results):
    """Aggregate per (method, xb_size): identification rate, mean precision,
    recall and wall time."""
    cells = {}
    for row in results:
        cells.setdefault((row.method, row.xb_size), []).append(row)
    summary = []
    for (method, xb_size) in sorted(cells, key=lambda key: (key[1], key[0])):
        rows = cells[(method, xb_size)]
        summary.append(
            {
                "method": method,
                "xb_size": xb_size,
                "n_runs": len(rows),
                "identification_rate": sum(r.exact_match for r in rows) / len(rows),
                "mean_precision": sum(r.precision for r in rows) / len(rows),
                "mean_recall": sum(r.recall for r in rows) / len(rows),
                "mean_wall_time_s": sum(r.wall_time_s for r in rows) / len(rows),
            }
        )
    return summary


def write_identification_csv(results, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(IDENTIFICATION_COLUMNS)
        for r in results:
            writer.writerow(
                [
                    r.method,
                    r.xb_size,
                    r.seed,
                    int(r.exact_match),
                    f"{r.precision:.6f}",
                    f"{r.recall:.6f}",
                    f"{r.wall_time_s:.6f}",
                ]
            )


def write_summary_csv(summary, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for row in summary:
            writer.writerow(
                [
                    row["method"],
                    row["xb_size"],
                    row["n_runs"],
                    f"{row['identification_rate']:.6f}",
                    f"{row['mean_precision']:.6f}",
                    f"{row['mean_recall']:.6f}",
                    f"{row['mean_wall_time_s']:.6f}",
                ]
            )


def write_precision_recall_csv(summary, path):
    """Tidy long-format metric table (one row per method/size/metric)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "xb_size", "metric", "value"])
        for row in summary:
            for metric in ("identification_rate", "mean_precision", "mean_recall"):
                writer.writerow(
                    [row["method"], row["xb_size"], metric, f"{row[metric]:.6f}"]
                )


def write_manifest(grid, out_dir, extra=None):
    doc = {
        "methods": list(grid.methods),
        "xb_sizes": list(grid.xb_sizes),
        "n_runs": grid.n_runs,
        "master_seed": grid.master_seed,
        "base_sim": grid.base_sim.to_dict(),
        "scm_config": {"p": grid.scm_config.p, "max_rules": grid.scm_config.max_rules},
        "icscm_config": {
            "p": grid.icscm_config.p,
            "max_rules": grid.icscm_config.max_rules,
            "alpha": grid.icscm_config.alpha,
            "min_leaf": grid.icscm_config.min_leaf,
            "test_method": grid.icscm_config.test_method,
            "prune": grid.icscm_config.prune,
        },
        "icp_config": {
            "alpha": grid.icp_config.alpha,
            "max_subset_size": grid.icp_config.max_subset_size,
            "min_samples_per_cell": grid.icp_config.min_samples_per_cell,
            "feasibility_limit": grid.icp_config.feasibility_limit,
        },
        "record_timings": grid.record_timings,
        "jobs": grid.jobs,
        "seed_derivation": "SeedSequence((master_seed, xb_size, run_index)) -> uint64;"
        " datasets are shared across methods within a run",
        "kernel_backend": kernels.BACKEND,
    }
    if extra:
        doc.update(extra)
    path = Path(out_dir) / "manifest.json"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def run_runtime_benchmark(grid, repeats=3, out_dir=None):
    """Median-of-``repeats`` fit wall time per (method, xb_size) cell,
    measured sequentially (data generation excluded from the timing).
    Returns rows of dicts; optionally writes benchmark.csv."""
    check_icp_feasible(grid)
    if repeats < 1:
        raise ConfigError(f"repeats must be >= 1, got {repeats}")
    rows = []
    for xb_size in grid.xb_sizes:
        datasets = []
        for rep in range(repeats):
            seed = derive_run_seed(grid.master_seed, xb_size, rep)
            sim = replace(grid.base_sim, n_distractors=xb_size, seed=seed)
            datasets.append(simulate(sim)[0])
        for method in grid.methods:
            times = []
            for dataset in datasets:
                start = time.perf_counter()
                _fit_selected(method, dataset, grid)
                times.append(time.perf_counter() - start)
            rows.append(
                {
                    "method": method,
                    "xb_size": xb_size,
                    "repeats": repeats,
                    "median_wall_time_s": float(np.median(times)),
                }
            )
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "benchmark.csv", "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["method", "xb_size", "repeats", "median_wall_time_s"])
            for row in rows:
                writer.writerow(
                    [
                        row["method"],
                        row["xb_size"],
                        row["repeats"],
                        f"{row['median_wall_time_s']:.6f}",
                    ]
                )
    return rows
