import json
from pathlib import Path

import numpy as np
import pytest

from krklab.harness import (
    ExperimentConfig,
    MissingReferenceRowError,
    ResultRow,
    SweepGrid,
    compare_to_reference,
    data_fingerprint,
    default_experiment,
    nn_grid,
    run_experiment,
    run_sweep,
)
from krklab.dataset import SplitSpec


@pytest.fixture(scope="module")
def small_data(tmp_path_factory, oracle_records):
    """A stratified-enough subset of the dataset written to disk."""
    path = tmp_path_factory.mktemp("data") / "subset.data"
    subset = [r for i, r in enumerate(oracle_records) if i % 10 == 0]
    path.write_text("".join(r.to_line() + "\n" for r in subset))
    return str(path)


def fast_cfg(small_data, tmp_path=None, **overrides):
    params = {"seed": 3, "iterations": 30}
    params.update(overrides.pop("model_params", {}))
    return ExperimentConfig(
        model_kind=overrides.pop("model_kind", "logistic_regression"),
        dataset_source=small_data,
        split=SplitSpec(0.7, seed=3),
        model_params=params,
        output_dir=str(tmp_path) if tmp_path else None,
        **overrides,
    )


class TestRunExperiment:
    def test_pipeline_and_outputs(self, small_data, tmp_path):
        cfg = fast_cfg(small_data, tmp_path, run_id="lr_smoke")
        result = run_experiment(cfg)
        assert 0.0 <= result.row.overall_accuracy <= 1.0
        assert result.report.micro_precision == result.report.overall_accuracy
        manifest = json.loads((tmp_path / "lr_smoke.manifest.json").read_text())
        assert manifest["model_kind"] == "logistic_regression"
        assert manifest["result"]["overall_accuracy"] == result.row.overall_accuracy
        assert (tmp_path / "lr_smoke.model.json").exists()
        assert (tmp_path / "lr_smoke.metrics.txt").exists()

    def test_deterministic_given_seeds(self, small_data):
        a = run_experiment(fast_cfg(small_data))
        b = run_experiment(fast_cfg(small_data))
        assert a.row.overall_accuracy == b.row.overall_accuracy

    def test_netscript_topology(self, small_data):
        cfg = fast_cfg(
            small_data,
            model_kind="neural_network",
            netscript="input Data auto; hidden H [8] from Data all; "
                      "output Out [18] sigmoid from H all;",
            model_params={"iterations": 2, "seed": 1},
        )
        result = run_experiment(cfg)
        assert result.model.topology.layer_sizes == (48, 8, 18)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            ExperimentConfig(model_kind="svm")


class TestSweep:
    def grid(self, small_data, tmp_path=None):
        base = ExperimentConfig(
            model_kind="neural_network",
            dataset_source=small_data,
            split=SplitSpec(0.7, seed=5),
            model_params={"iterations": 2},
            output_dir=str(tmp_path) if tmp_path else None,
        )
        return nn_grid(base, nodes=(4, 8), rates=(0.1,), iterations=(1, 2))

    def test_rows_in_grid_order(self, small_data):
        rows = run_sweep(self.grid(small_data))
        assert len(rows) == 4
        assert [r.params["hidden_layers"] for r in rows] == [(4,), (4,), (8,), (8,)]
        assert [r.params["iterations"] for r in rows] == [1, 2, 1, 2]

    def test_resume_skips_completed_cells(self, small_data, tmp_path):
        first = run_sweep(self.grid(small_data, tmp_path))
        stamp = {p.name: p.stat().st_mtime_ns for p in tmp_path.glob("*.manifest.json")}
        second = run_sweep(self.grid(small_data, tmp_path))
        assert [r.overall_accuracy for r in first] == [r.overall_accuracy for r in second]
        assert stamp == {p.name: p.stat().st_mtime_ns for p in tmp_path.glob("*.manifest.json")}

    def test_cell_failure_recorded_and_sweep_continues(self, small_data):
        base = ExperimentConfig(
            model_kind="neural_network",
            dataset_source=small_data,
            split=SplitSpec(0.7, seed=5),
            model_params={"iterations": 1},
        )
        grid = nn_grid(base, nodes=(0, 4), rates=(0.1,), iterations=(1,))
        rows = run_sweep(grid)
        assert rows[0].error is not None
        assert np.isnan(rows[0].overall_accuracy)
        assert rows[1].error is None

    def test_single_cell_grid_equals_run_experiment(self, small_data):
        base = ExperimentConfig(
            model_kind="neural_network",
            dataset_source=small_data,
            split=SplitSpec(0.7, seed=5),
            model_params={"iterations": 2},
        )
        grid = nn_grid(base, nodes=(8,), rates=(0.1,), iterations=(2,))
        [row] = run_sweep(grid)
        params = dict(base.model_params, hidden_layers=(8,), learning_rate=0.1,
                      iterations=2, seed=base.split.seed)
        direct = run_experiment(
            ExperimentConfig(model_kind="neural_network", dataset_source=small_data,
                             split=base.split, model_params=params)
        )
        assert row.overall_accuracy == direct.row.overall_accuracy

    def test_reference_grid_shape(self, small_data):
        base = ExperimentConfig(model_kind="neural_network", dataset_source=small_data)
        assert len(nn_grid(base).cells()) == 27


class TestCompare:
    def row(self, kind, acc):
        return ResultRow(kind, {}, acc, 1 - 2 * (1 - acc) / 18, 0.0, 0)

    def test_in_band_passes(self):
        rows = [
            self.row("logistic_regression", 0.33),
            self.row("decision_forest", 0.80),
            self.row("decision_jungle", 0.45),
            self.row("neural_network", 0.60),
        ]
        report = compare_to_reference(rows)
        assert report.passed
        assert all(line.margin >= 0 for line in report.lines)

    def test_out_of_band_fails_with_margin(self):
        report = compare_to_reference([self.row("decision_forest", 0.40)])
        assert not report.passed
        line = report.lines[0]
        assert line.margin == pytest.approx(0.08 - abs(0.40 - 0.793038))
        assert "FAIL" in report.to_text()

    def test_average_accuracy_identity_against_reference(self):
        from krklab.references import load_references

        refs = load_references()
        for kind, vals in refs["figure_metrics"].items():
            overall = vals["overall_accuracy"]
            derived = 1 - 2 * (1 - overall) / 18
            assert round(derived, 2) == round(vals["average_accuracy"], 2)

    def test_missing_reference_row(self):
        with pytest.raises(MissingReferenceRowError):
            compare_to_reference([self.row("support_vector_machine", 0.5)])


class TestFingerprint:
    def test_stable_and_content_sensitive(self, oracle_records):
        a = data_fingerprint(list(oracle_records[:100]))
        b = data_fingerprint(list(oracle_records[:100]))
        c = data_fingerprint(list(oracle_records[:101]))
        assert a == b
        assert a != c


class TestDefaults:
    def test_fast_mode_caps_network(self):
        cfg = default_experiment("neural_network", fast=True)
        assert cfg.model_params["hidden_layers"] == [100]
        assert cfg.model_params["iterations"] <= 100

    def test_kinds_have_encodings(self):
        from krklab.harness import DEFAULT_ENCODINGS, MODEL_KINDS

        assert set(DEFAULT_ENCODINGS) == set(MODEL_KINDS)
