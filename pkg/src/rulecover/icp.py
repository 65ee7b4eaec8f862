"""Exhaustive invariant-set search baseline.

Every feature subset S is scored with a conditional G-test of the label
against the environment given the joint value of S; the result is the
intersection of all subsets whose test does not reject independence. Costs
2**d tests, which is why it only runs at desk scale.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .errors import ConfigError, InfeasibleError
from .stats import conditional_gtest, joint_strata


@dataclass(frozen=True)
class IcpConfig:
    """alpha: rejection threshold for the conditional tests.
    max_subset_size: optional cap on |S|, for the largest runtime-benchmark
    points only; identification experiments never cap. min_samples_per_cell:
    declare a subset's test degenerate (p = 1, accepted) unless the data
    provides this many samples per cell of the full (label, env, S) table;
    0 disables the guard. feasibility_limit: refuse uncapped runs beyond
    this many features."""

    alpha: float = 0.05
    max_subset_size: Optional[int] = None
    min_samples_per_cell: int = 10
    feasibility_limit: int = 20

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.max_subset_size is not None and self.max_subset_size < 0:
            raise ConfigError("max_subset_size must be >= 0")
        if self.min_samples_per_cell < 0:
            raise ConfigError("min_samples_per_cell must be >= 0")


@dataclass(frozen=True)
class SubsetTest:
    features: tuple
    p_value: float
    accepted: bool
    degenerate: bool


@dataclass(frozen=True)
class IcpReport:
    selected: frozenset
    tests: tuple


def icp_report(dataset, config):
    """Run the full subset scan and keep the per-subset log."""
    if dataset.n_distinct_envs < 2:
        raise ConfigError(
            "invariance is untestable on single-environment data "
            f"(got {dataset.n_distinct_envs} distinct environment id)"
        )
    d = dataset.n_features
    if config.max_subset_size is None and d > config.feasibility_limit:
        raise InfeasibleError(
            f"2**{d} subset tests refused (limit 2**{config.feasibility_limit}); "
            "set max_subset_size to cap the search"
        )
    max_size = d if config.max_subset_size is None else min(d, config.max_subset_size)

    labels, envs, features = dataset.labels, dataset.envs, dataset.features
    tests = []
    selected = None
    for size in range(max_size + 1):
        for subset in combinations(range(d), size):
            result = conditional_gtest(
                labels,
                envs,
                joint_strata(features, subset),
                min_samples_per_cell=config.min_samples_per_cell,
                n_possible_strata=2 ** size,
            )
            accepted = result.p_value > config.alpha
            tests.append(
                SubsetTest(
                    features=subset,
                    p_value=float(result.p_value),
                    accepted=accepted,
                    degenerate=result.degenerate,
                )
            )
            if accepted:
                subset_set = frozenset(subset)
                selected = subset_set if selected is None else selected & subset_set
    return IcpReport(
        selected=frozenset() if selected is None else selected, tests=tuple(tests)
    )


def icp_fit(dataset, config):
    """Intersection of all feature subsets whose conditional test does not
    reject independence; empty when no subset is accepted."""
    return set(icp_report(dataset, config).selected)
