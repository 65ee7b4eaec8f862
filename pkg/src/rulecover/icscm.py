"""Invariance-filtered set covering: greedy construction where every
candidate rule must leave the label independent of the environment inside its
negative leaf, with an environment-independence stopping test on the samples
that remain, plus iterative pruning of rules whose removal keeps the label
independent of the environment given the other selected features.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .data import (
    Conjunction,
    FitReport,
    IterationRecord,
    StopReason,
    candidate_rules,
)
from .errors import ConfigError
from .scm import prediction_matrix
from .stats import (
    chi2_sf,
    conditional_gtest,
    independence_test,
    joint_strata,
    table_stats,
)


@dataclass(frozen=True)
class IcscmConfig:
    """Hyperparameters of the invariance-filtered learner.

    alpha: threshold on independence-test p-values, both for the per-rule
    leaf filter and the stopping test. min_leaf: leaves smaller than this are
    treated as degenerate (p = 1, not refutable); the asymptotic chi-square
    null is meaningless on a handful of samples. test_method: 'chi2' or
    'gtest' for the leaf and stopping tests. prune: apply the conditional
    G-test pruning pass to the fitted model.
    """

    p: float = 1.0
    max_rules: int = 10
    alpha: float = 0.05
    min_leaf: int = 10
    test_method: str = "chi2"
    prune: bool = True

    def __post_init__(self):
        if not self.p > 0:
            raise ConfigError(f"p must be positive, got {self.p}")
        if self.max_rules < 1:
            raise ConfigError(f"max_rules must be >= 1, got {self.max_rules}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.min_leaf < 1:
            raise ConfigError(f"min_leaf must be >= 1, got {self.min_leaf}")
        if self.test_method not in ("chi2", "gtest"):
            raise ConfigError(
                f"test_method must be 'chi2' or 'gtest', got {self.test_method!r}"
            )


def leaf_invariance_pvalue(rule, dataset, min_leaf=10, method="chi2", active=None):
    """p-value of the label-vs-environment independence test over the
    samples the rule sends to its negative leaf (rule output 0), restricted
    to ``active`` samples when given. Returns 1 when the leaf holds fewer
    than ``min_leaf`` samples."""
    leaf = rule.evaluate(dataset.features) == 0
    if active is not None:
        leaf &= active
    if int(leaf.sum()) < min_leaf:
        return 1.0
    return independence_test(
        dataset.labels[leaf], dataset.envs[leaf], method=method
    ).p_value


def icscm_fit(dataset, config, rules=None):
    """Greedy fit with the per-rule invariance filter and stopping test.

    Candidates whose negative-leaf test rejects independence (p <= alpha)
    are disregarded for that iteration; if every candidate is disregarded
    the fit stops with ``no_valid_rule``. After each append, the label/
    environment test on the surviving samples decides whether invariance is
    reached. Pruning is applied afterwards when configured.
    """
    if dataset.n_distinct_envs < 2:
        raise ConfigError(
            "invariance is untestable on single-environment data "
            f"(got {dataset.n_distinct_envs} distinct environment id)"
        )
    if rules is None:
        rules = candidate_rules(dataset)
    rules = list(rules)
    if not rules:
        raise ConfigError("empty candidate rule set")

    features, labels, envs = dataset.features, dataset.labels, dataset.envs
    n_envs = dataset.n_envs
    preds = prediction_matrix(features, rules)
    active = np.ones(features.shape[0], dtype=bool)
    available = np.ones(len(rules), dtype=bool)
    chosen = []
    log = []
    stop = None

    while True:
        if len(chosen) >= config.max_rules:
            stop = StopReason.MAX_RULES
            break
        if not (labels[active] == 0).any():
            stop = StopReason.NO_NEGATIVES_LEFT
            break
        if not available.any():
            stop = StopReason.NO_VALID_RULE
            break

        counts = kernels.leaf_label_env_counts(
            preds[active], labels[active], envs[active], n_envs
        )
        leaf_sizes = counts.sum(axis=(1, 2))
        stat, dof = table_stats(counts, config.test_method)
        leaf_p = np.ones(len(rules))
        for r in range(len(rules)):
            if available[r] and leaf_sizes[r] >= config.min_leaf and dof[r] > 0:
                leaf_p[r] = chi2_sf(stat[r], int(dof[r]))

        covered = counts[:, 0, :].sum(axis=1)
        errors = counts[:, 1, :].sum(axis=1)
        utilities = covered.astype(np.float64) - config.p * errors.astype(np.float64)
        valid = available & (leaf_p > config.alpha)
        if not valid.any():
            stop = StopReason.NO_VALID_RULE
            break
        best = int(np.argmax(np.where(valid, utilities, -np.inf)))

        chosen.append(rules[best])
        available[best] = False
        active &= preds[:, best] == 1

        if active.any():
            gamma = independence_test(
                labels[active], envs[active], method=config.test_method
            ).p_value
        else:
            gamma = 1.0
        log.append(
            IterationRecord(
                rule=rules[best],
                utility=float(utilities[best]),
                leaf_p_value=float(leaf_p[best]),
                stop_p_value=float(gamma),
            )
        )
        if gamma > config.alpha:
            stop = StopReason.INVARIANCE_REACHED
            break

    model = Conjunction(rules=tuple(chosen))
    if config.prune and len(model) > 0:
        model = prune(model, dataset, config.alpha)
    return FitReport(
        model=model,
        selected_features=model.feature_indices(),
        per_iteration_log=tuple(log),
        stop_reason=stop,
    )


def prune(model, dataset, alpha):
    """Iteratively drop rules that are not needed for invariance.

    For each rule, test label-environment independence conditioned on the
    joint value of the features of the *other* rules; a p-value above alpha
    certifies the rule's feature is not a causal parent and the rule is
    removed. The scan restarts after each removal (the conditioning set has
    changed) and repeats until a full pass removes nothing.
    """
    rules = list(model.rules)
    labels, envs, features = dataset.labels, dataset.envs, dataset.features
    removed = True
    while removed and rules:
        removed = False
        for idx in range(len(rules)):
            remaining = {
                r.feature_index for j, r in enumerate(rules) if j != idx
            }
            strata = joint_strata(features, remaining)
            result = conditional_gtest(labels, envs, strata)
            if result.p_value > alpha:
                del rules[idx]
                removed = True
                break
    return Conjunction(rules=tuple(rules), is_disjunction=model.is_disjunction)
