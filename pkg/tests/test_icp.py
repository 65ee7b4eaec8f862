import numpy as np
import pytest

from rulecover.data import Dataset
from rulecover.errors import ConfigError, InfeasibleError
from rulecover.harness import derive_run_seed
from rulecover.icp import IcpConfig, icp_fit, icp_report
from rulecover.simulator import SimConfig, simulate


def _independent_dataset(seed=0, m=400, d=3):
    rng = np.random.default_rng(seed)
    return Dataset(
        features=(rng.random((m, d)) < 0.5).astype(np.uint8),
        labels=(rng.random(m) < 0.5).astype(np.uint8),
        envs=(rng.random(m) < 0.5).astype(np.int64),
    )


def test_config_validation():
    with pytest.raises(ConfigError):
        IcpConfig(alpha=1.5)
    with pytest.raises(ConfigError):
        IcpConfig(max_subset_size=-1)


def test_single_environment_rejected():
    ds = Dataset(
        features=np.array([[0], [1]], dtype=np.uint8),
        labels=np.array([0, 1], dtype=np.uint8),
        envs=np.zeros(2, dtype=np.int64),
    )
    with pytest.raises(ConfigError):
        icp_fit(ds, IcpConfig())


def test_fully_independent_data_returns_empty_set():
    # env independent of label: the empty set is accepted, and the
    # intersection with the empty set is empty
    ds = _independent_dataset(seed=5)
    report = icp_report(ds, IcpConfig(min_samples_per_cell=0))
    empty = next(t for t in report.tests if t.features == ())
    assert empty.accepted
    assert report.selected == frozenset()


def test_subset_enumeration_order_and_count():
    ds = _independent_dataset(seed=1, d=3)
    report = icp_report(ds, IcpConfig(min_samples_per_cell=0))
    subsets = [t.features for t in report.tests]
    assert len(subsets) == 8
    assert subsets[0] == ()
    assert subsets[1:4] == [(0,), (1,), (2,)]
    sizes = [len(s) for s in subsets]
    assert sizes == sorted(sizes)


def test_identifies_parents_on_simulated_data():
    hits = 0
    for run in range(5):
        ds, truth = simulate(
            SimConfig(n_distractors=2, seed=derive_run_seed(201, 2, run))
        )
        hits += icp_fit(ds, IcpConfig()) == set(truth.parent_indices)
    assert hits >= 4


def test_output_is_subset_of_every_accepted_set():
    ds, _ = simulate(SimConfig(n_distractors=3, seed=33))
    report = icp_report(ds, IcpConfig())
    for t in report.tests:
        if t.accepted:
            assert report.selected <= frozenset(t.features)


def test_parent_set_membership_logic():
    ds, truth = simulate(SimConfig(n_distractors=3, seed=34))
    report = icp_report(ds, IcpConfig())
    parents = frozenset(truth.parent_indices)
    accepted = [frozenset(t.features) for t in report.tests if t.accepted]
    if any(s == parents for s in accepted) and all(
        parents <= s for s in accepted
    ):
        assert report.selected == parents


def test_max_subset_size_caps_enumeration():
    ds = _independent_dataset(seed=2, d=5)
    report = icp_report(ds, IcpConfig(max_subset_size=2, min_samples_per_cell=0))
    assert len(report.tests) == 1 + 5 + 10
    assert max(len(t.features) for t in report.tests) == 2


def test_feasibility_refusal():
    ds = _independent_dataset(seed=3, d=25)
    with pytest.raises(InfeasibleError):
        icp_fit(ds, IcpConfig(feasibility_limit=20))
    # capping restores feasibility
    selected = icp_fit(
        ds, IcpConfig(max_subset_size=1, feasibility_limit=20, min_samples_per_cell=0)
    )
    assert isinstance(selected, set)


def test_deficiency_guard_marks_large_subsets_degenerate():
    ds, _ = simulate(SimConfig(n_distractors=7, seed=11, n_samples_per_env=10000))
    report = icp_report(ds, IcpConfig(min_samples_per_cell=10))
    # 20000 samples < 10 * 2 * 2 * 2**9 cells: subsets of size >= 9 skip
    for t in report.tests:
        if len(t.features) >= 9:
            assert t.degenerate and t.accepted
        if len(t.features) <= 8:
            assert not t.degenerate


def test_tests_cover_the_full_powerset():
    ds, _ = simulate(SimConfig(n_distractors=1, seed=9, n_samples_per_env=2000))
    report = icp_report(ds, IcpConfig())
    assert len(report.tests) == 2 ** ds.n_features
    assert len({t.features for t in report.tests}) == len(report.tests)
