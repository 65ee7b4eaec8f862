"""Greedy set-covering learner for conjunctions (and, via De Morgan,
disjunctions) of binary rules.

Each iteration scores every candidate rule by utility
``|covered negatives| - p * |misclassified positives|``, appends the argmax
(ties broken by lowest candidate index) and discards the samples the new rule
settles. Training stops when no negatives remain, the length cap is hit, or
the candidate pool is exhausted. Running time is O(m * |rules| * max_rules).
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


@dataclass(frozen=True)
class ScmConfig:
    """p: utility trade-off, the penalty on each misclassified positive;
    max_rules: cap on the conjunction length."""

    p: float = 1.0
    max_rules: int = 10

    def __post_init__(self):
        if not self.p > 0:
            raise ConfigError(f"p must be positive, got {self.p}")
        if self.max_rules < 1:
            raise ConfigError(f"max_rules must be >= 1, got {self.max_rules}")


def utility(rule, negative_features, positive_features, p):
    """Covered negatives minus p times misclassified positives."""
    covered = int((rule.evaluate(negative_features) == 0).sum())
    errors = int((rule.evaluate(positive_features) == 0).sum())
    return float(covered) - p * float(errors)


def prediction_matrix(features, rules):
    """(m, n_rules) uint8 matrix of rule outputs."""
    out = np.empty((features.shape[0], len(rules)), dtype=np.uint8)
    for idx, rule in enumerate(rules):
        out[:, idx] = features[:, rule.feature_index] == rule.expected_value
    return out


def scm_fit(dataset, config, rules=None, model_type="conjunction"):
    """Fit a conjunction (or disjunction) greedily.

    ``rules`` defaults to the dataset's candidate stumps. Disjunctions are
    learned by fitting a conjunction on negated labels with negated rules and
    wrapping the result (De Morgan).
    """
    if model_type not in ("conjunction", "disjunction"):
        raise ConfigError(f"unknown model_type {model_type!r}")
    if rules is None:
        rules = candidate_rules(dataset)
    rules = list(rules)
    if not rules:
        raise ConfigError("empty candidate rule set")

    if model_type == "disjunction":
        report = _fit_conjunction(
            dataset.features,
            1 - dataset.labels,
            dataset.envs,
            dataset.n_envs,
            config,
            [r.negated() for r in rules],
        )
        return _dualize(report)
    return _fit_conjunction(
        dataset.features, dataset.labels, dataset.envs, dataset.n_envs, config, rules
    )


def _dualize(report):
    """Map a conjunction fit on flipped labels back to a disjunction."""
    model = Conjunction(
        rules=tuple(r.negated() for r in report.model.rules), is_disjunction=True
    )
    log = tuple(
        IterationRecord(
            rule=rec.rule.negated(),
            utility=rec.utility,
            leaf_p_value=rec.leaf_p_value,
            stop_p_value=rec.stop_p_value,
        )
        for rec in report.per_iteration_log
    )
    return FitReport(
        model=model,
        selected_features=model.feature_indices(),
        per_iteration_log=log,
        stop_reason=report.stop_reason,
    )


def _fit_conjunction(features, labels, envs, n_envs, config, rules):
    preds = prediction_matrix(features, rules)
    active = np.ones(features.shape[0], dtype=bool)
    available = np.ones(len(rules), dtype=bool)
    chosen = []
    log = []

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
        covered = counts[:, 0, :].sum(axis=1)
        errors = counts[:, 1, :].sum(axis=1)
        utilities = covered.astype(np.float64) - config.p * errors.astype(np.float64)
        best = int(np.argmax(np.where(available, utilities, -np.inf)))

        chosen.append(rules[best])
        log.append(IterationRecord(rule=rules[best], utility=float(utilities[best])))
        available[best] = False
        active &= preds[:, best] == 1

    model = Conjunction(rules=tuple(chosen))
    return FitReport(
        model=model,
        selected_features=model.feature_indices(),
        per_iteration_log=tuple(log),
        stop_reason=stop,
    )
