import json

import numpy as np
import pytest

from rulecover.cli import main, parse_parent_probs, parse_xb_sizes
from rulecover.data import load_dataset_csv, load_model_json
from rulecover.errors import ConfigError


def test_parse_xb_sizes():
    assert parse_xb_sizes("1..4") == (1, 2, 3, 4)
    assert parse_xb_sizes("3") == (3,)
    assert parse_xb_sizes("1,5,9") == (1, 5, 9)
    assert parse_xb_sizes("1..2,7") == (1, 2, 7)
    with pytest.raises(ConfigError):
        parse_xb_sizes("4..1")
    with pytest.raises(ConfigError):
        parse_xb_sizes("abc")


def test_parse_parent_probs():
    assert parse_parent_probs("0.1,0.5;0.5,0.3") == ((0.1, 0.5), (0.5, 0.3))
    with pytest.raises(ConfigError):
        parse_parent_probs("0.1;0.2,0.3")


@pytest.fixture
def sim_dir(tmp_path):
    out = tmp_path / "data"
    code = main(
        [
            "simulate", "--xb", "2", "--seed", "7", "--samples", "1500",
            "-o", str(out),
        ]
    )
    assert code == 0
    return out


def test_simulate_writes_expected_rows(sim_dir, capsys):
    ds = load_dataset_csv(sim_dir / "dataset.csv")
    assert ds.n_samples == 3000
    assert ds.n_features == 5
    truth = json.loads((sim_dir / "ground_truth.json").read_text())
    assert truth["ground_truth"]["parent_indices"] == [0, 1]


def test_simulate_single_env_refused(tmp_path, capsys):
    code = main(["simulate", "--n-env", "1", "-o", str(tmp_path / "x")])
    assert code == 2
    assert "force" in capsys.readouterr().err
    code = main(
        ["simulate", "--n-env", "1", "--samples", "100", "--force",
         "-o", str(tmp_path / "y")]
    )
    assert code == 0


def test_simulate_zero_label_noise(tmp_path, capsys):
    code = main(
        ["simulate", "--xb", "1", "--eps-y", "0", "--samples", "500",
         "-o", str(tmp_path / "z")]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "P(y = parents' AND) = 1.0000" in out


def test_fit_icscm_finds_parents(sim_dir, tmp_path, capsys):
    model_path = tmp_path / "model.json"
    code = main(
        ["fit", "--data", str(sim_dir / "dataset.csv"), "--method", "icscm",
         "--alpha", "0.05", "--p", "1.0", "--max-rules", "5",
         "-o", str(model_path)]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "parent_1" not in out  # CSV loses simulator names; x-names used
    model, stop = load_model_json(model_path)
    assert model.feature_indices() == {0, 1}
    assert stop == "invariance_reached"


def test_fit_scm_selects_child(sim_dir, tmp_path):
    model_path = tmp_path / "scm.json"
    code = main(
        ["fit", "--data", str(sim_dir / "dataset.csv"), "--method", "scm",
         "-o", str(model_path)]
    )
    assert code == 0
    model, _ = load_model_json(model_path)
    assert 4 in model.feature_indices()  # child column of a 2-distractor run


def test_fit_round_trip_predictions(sim_dir, tmp_path):
    model_path = tmp_path / "model.json"
    assert main(
        ["fit", "--data", str(sim_dir / "dataset.csv"), "--method", "icscm",
         "-o", str(model_path)]
    ) == 0
    ds = load_dataset_csv(sim_dir / "dataset.csv")
    model, _ = load_model_json(model_path)
    reloaded, _ = load_model_json(model_path)
    assert np.array_equal(model.predict(ds.features), reloaded.predict(ds.features))


def test_fit_missing_file_is_data_error(tmp_path):
    assert main(["fit", "--data", str(tmp_path / "nope.csv")]) == 3


def test_fit_single_env_is_config_error(tmp_path):
    assert main(
        ["simulate", "--n-env", "1", "--samples", "200", "--force",
         "-o", str(tmp_path / "one")]
    ) == 0
    code = main(
        ["fit", "--data", str(tmp_path / "one" / "dataset.csv"),
         "--method", "icscm"]
    )
    assert code == 2


def test_prune_subcommand(sim_dir, tmp_path, capsys):
    model_path = tmp_path / "model.json"
    pruned_path = tmp_path / "pruned.json"
    assert main(
        ["fit", "--data", str(sim_dir / "dataset.csv"), "--method", "icscm",
         "--no-prune", "-o", str(model_path)]
    ) == 0
    assert main(
        ["prune", "--data", str(sim_dir / "dataset.csv"),
         "--model", str(model_path), "-o", str(pruned_path)]
    ) == 0
    model, _ = load_model_json(model_path)
    pruned, _ = load_model_json(pruned_path)
    assert set(pruned.rules) <= set(model.rules)


def test_icp_subcommand(sim_dir, tmp_path, capsys):
    out = tmp_path / "icp.json"
    code = main(
        ["icp", "--data", str(sim_dir / "dataset.csv"), "-o", str(out)]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["n_tested"] == 2 ** 5
    assert doc["selected"] == [0, 1]


def test_icp_infeasible_exit_code(tmp_path):
    assert main(
        ["simulate", "--xb", "30", "--samples", "60", "-o", str(tmp_path / "wide")]
    ) == 0
    code = main(["icp", "--data", str(tmp_path / "wide" / "dataset.csv")])
    assert code == 4


def test_experiment_subcommand(tmp_path, capsys):
    out = tmp_path / "exp"
    code = main(
        ["experiment", "--methods", "scm,icscm", "--xb", "1..2", "--runs", "2",
         "--seed", "1", "--samples", "600", "--no-timing", "--plot-data",
         "-o", str(out)]
    )
    assert code == 0
    lines = (out / "summary.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 * 2
    assert (out / "fig_precision_recall.csv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["master_seed"] == 1
    assert manifest["record_timings"] is False


def test_experiment_rerun_byte_identical(tmp_path):
    args = ["experiment", "--methods", "scm", "--xb", "1", "--runs", "2",
            "--seed", "3", "--samples", "400", "--no-timing"]
    assert main(args + ["-o", str(tmp_path / "a")]) == 0
    assert main(args + ["-o", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "identification.csv").read_bytes() == (
        tmp_path / "b" / "identification.csv"
    ).read_bytes()


def test_benchmark_subcommand(tmp_path):
    out = tmp_path / "bench"
    code = main(
        ["benchmark", "--methods", "scm,icscm", "--xb", "1..2",
         "--repeats", "1", "--samples", "400", "-o", str(out)]
    )
    assert code == 0
    lines = (out / "benchmark.csv").read_text().splitlines()
    assert len(lines) == 5


def test_manifest_flag(sim_dir, tmp_path):
    manifest = tmp_path / "resolved.json"
    assert main(
        ["fit", "--data", str(sim_dir / "dataset.csv"), "--method", "icscm",
         "--manifest", str(manifest)]
    ) == 0
    doc = json.loads(manifest.read_text())
    assert doc["command"] == "fit"
    assert doc["alpha"] == 0.05


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as excinfo:
        main(["fit"])  # missing --data
    assert excinfo.value.code == 2
