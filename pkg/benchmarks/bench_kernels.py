"""Benchmark the compiled counting kernels against the pure-numpy fallback.

Times the two kernel functions on representative workload shapes and an
end-to-end invariance-filtered fit under each backend. Run after an
editable install:

    python3 benchmarks/bench_kernels.py [--csv out.csv]
"""

import argparse
import csv
import sys
import time

import numpy as np

from rulecover import _kernels as kernels
from rulecover.harness import derive_run_seed
from rulecover.icscm import IcscmConfig, icscm_fit
from rulecover.simulator import SimConfig, simulate


def _time_best_of(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_leaf_counts(backend, m, n_rules, n_env=2, seed=0):
    rng = np.random.default_rng(seed)
    preds = (rng.random((m, n_rules)) < 0.5).astype(np.uint8)
    y = (rng.random(m) < 0.3).astype(np.uint8)
    e = rng.integers(0, n_env, size=m).astype(np.int64)
    impl = kernels.available_backends()[backend]
    return _time_best_of(lambda: impl.leaf_label_env_counts(preds, y, e, n_env))


def bench_stratified_counts(backend, m, n_strata, n_env=2, seed=0):
    rng = np.random.default_rng(seed)
    strata = rng.integers(0, n_strata, size=m).astype(np.int64)
    y = (rng.random(m) < 0.3).astype(np.uint8)
    e = rng.integers(0, n_env, size=m).astype(np.int64)
    impl = kernels.available_backends()[backend]
    return _time_best_of(
        lambda: impl.stratified_label_env_counts(strata, n_strata, y, e, n_env)
    )


def bench_fit(backend, n_distractors, seed=0):
    dataset, _ = simulate(
        SimConfig(n_distractors=n_distractors, seed=derive_run_seed(seed, n_distractors, 0))
    )
    config = IcscmConfig()
    original = kernels.BACKEND
    kernels.use_backend(backend)
    try:
        return _time_best_of(lambda: icscm_fit(dataset, config), repeats=3)
    finally:
        kernels.use_backend(original)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--csv", default=None, help="also write results as CSV")
    args = parser.parse_args(argv)

    backends = sorted(kernels.available_backends())
    if "compiled" not in backends:
        print("note: compiled kernels are not built; benchmarking python only")

    cases = []
    for m, n_rules in ((20000, 20), (20000, 200), (100000, 50)):
        cases.append((f"leaf_counts m={m} rules={n_rules}",
                      {b: bench_leaf_counts(b, m, n_rules) for b in backends}))
    for m, n_strata in ((20000, 4), (20000, 256), (100000, 1024)):
        cases.append((f"stratified m={m} strata={n_strata}",
                      {b: bench_stratified_counts(b, m, n_strata) for b in backends}))
    for xb in (3, 50):
        cases.append((f"icscm_fit m=20000 xb={xb}",
                      {b: bench_fit(b, xb) for b in backends}))

    width = max(len(name) for name, _ in cases)
    header = f"{'case':<{width}}  " + "  ".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    rows = []
    for name, timings in cases:
        line = f"{name:<{width}}  " + "  ".join(
            f"{timings[b] * 1000:>10.3f}ms" for b in backends
        )
        row = {"case": name, **{b: timings[b] for b in backends}}
        if len(backends) == 2:
            speedup = timings["python"] / timings["compiled"]
            line += f"  {speedup:>7.2f}x"
            row["speedup"] = speedup
        print(line)
        rows.append(row)

    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
