"""Experiment runner: ingest, encode, split, train, evaluate, sweep, compare.

Every run is reproducible from its manifest (config, seeds, data and
encoding fingerprints).  Sweeps are resumable: cells whose manifest is
already on disk are skipped.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import time
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import tablebase
from .artifacts import save_model
from .dataset import (
    EncodedMatrix,
    EncodingScheme,
    Record,
    SplitSpec,
    encode,
    load_dataset,
    split,
)
from .metrics import MetricsReport, confusion, metrics
from .models import (
    DecisionForestConfig,
    DecisionJungleConfig,
    LogisticRegressionConfig,
    MlpConfig,
    TrainedModel,
    train_decision_forest,
    train_decision_jungle,
    train_logistic_regression,
    train_mlp,
)
from .netscript import NetworkTopology, elaborate, parse
from .references import load_references

MODEL_KINDS = ("logistic_regression", "decision_forest", "decision_jungle", "neural_network")

# Pipeline defaults: trees see ordinal min-max features, the linear model
# and the networks see one-hot indicators.
DEFAULT_ENCODINGS = {
    "logistic_regression": EncodingScheme("onehot", "none"),
    "decision_forest": EncodingScheme("ordinal", "minmax"),
    "decision_jungle": EncodingScheme("ordinal", "minmax"),
    "neural_network": EncodingScheme("onehot", "none"),
}

ORACLE_SOURCE = "oracle:generate"


class MissingReferenceRowError(KeyError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    model_kind: str
    dataset_source: str = ORACLE_SOURCE          # file path or oracle:generate
    encoding: EncodingScheme | None = None       # None = per-kind default
    split: SplitSpec = field(default_factory=SplitSpec)
    model_params: dict = field(default_factory=dict)
    netscript: str | None = None                 # script text or path, NN only
    output_dir: str | None = None
    run_id: str = "run"

    def __post_init__(self):
        if self.model_kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind: {self.model_kind!r}")
        if self.netscript is not None and self.model_kind != "neural_network":
            raise ValueError("netscript only applies to the neural network")


@dataclass(frozen=True)
class ResultRow:
    model_kind: str
    params: dict
    overall_accuracy: float
    average_accuracy: float
    train_seconds: float
    seed: int
    error: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@lru_cache(maxsize=1)
def _oracle_records() -> tuple[Record, ...]:
    tb = tablebase.solve()
    return tuple(tablebase.export_dataset(tb))


def load_records(source: str) -> list[Record]:
    if source == ORACLE_SOURCE:
        return list(_oracle_records())
    return load_dataset(source)


def data_fingerprint(records: list[Record]) -> str:
    digest = hashlib.sha256()
    for r in records:
        digest.update(r.to_line().encode())
        digest.update(b"\n")
    return digest.hexdigest()[:16]


def _resolve_netscript(text_or_path: str) -> str:
    if ";" in text_or_path:  # declarations always end in one; paths never do
        return text_or_path
    return Path(text_or_path).read_text()


def build_topology(cfg: ExperimentConfig, input_width: int, n_classes: int) -> NetworkTopology:
    if cfg.netscript is not None:
        ast = parse(_resolve_netscript(cfg.netscript))
        return elaborate(ast, input_width, n_classes)
    hidden = cfg.model_params.get("hidden_layers", [100])
    return NetworkTopology.dense([input_width, *hidden, n_classes])


def _train(cfg: ExperimentConfig, train_matrix: EncodedMatrix) -> TrainedModel:
    params = {k: v for k, v in cfg.model_params.items() if k != "hidden_layers"}
    kind = cfg.model_kind
    if kind == "logistic_regression":
        return train_logistic_regression(train_matrix, LogisticRegressionConfig(**params))
    if kind == "decision_forest":
        return train_decision_forest(train_matrix, DecisionForestConfig(**params))
    if kind == "decision_jungle":
        return train_decision_jungle(train_matrix, DecisionJungleConfig(**params))
    topology = build_topology(cfg, train_matrix.features.shape[1], train_matrix.n_classes)
    return train_mlp(train_matrix, MlpConfig(topology=topology, **params))


@dataclass(frozen=True)
class ExperimentResult:
    row: ResultRow
    report: MetricsReport
    model: TrainedModel
    train_matrix: EncodedMatrix
    test_matrix: EncodedMatrix


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Execute ingest -> encode -> split -> train -> predict -> metrics and
    write the manifest, model artifact and report when an output directory
    is configured."""
    records = load_records(cfg.dataset_source)
    scheme = cfg.encoding or DEFAULT_ENCODINGS[cfg.model_kind]
    matrix = encode(records, scheme)
    train_matrix, test_matrix = split(matrix, cfg.split)

    started = time.perf_counter()
    model = _train(cfg, train_matrix)
    train_seconds = time.perf_counter() - started

    predicted, _ = model.predict_batch(test_matrix.features)
    report = metrics(confusion(test_matrix.labels, predicted, matrix.class_order))
    seed = int(cfg.model_params.get("seed", 0))
    row = ResultRow(
        model_kind=cfg.model_kind,
        params=dict(cfg.model_params),
        overall_accuracy=report.overall_accuracy,
        average_accuracy=report.average_accuracy,
        train_seconds=train_seconds,
        seed=seed,
    )

    if cfg.output_dir is not None:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        manifest = {
            "run_id": cfg.run_id,
            "model_kind": cfg.model_kind,
            "dataset_source": cfg.dataset_source,
            "data_fingerprint": data_fingerprint(records),
            "encoding": scheme.kind + "+" + scheme.normalize,
            "split": asdict(cfg.split),
            "model_params": dict(cfg.model_params),
            "netscript": cfg.netscript,
            "result": row.to_dict(),
            "metrics": report.to_dict(),
        }
        (out / f"{cfg.run_id}.manifest.json").write_text(json.dumps(manifest, indent=2))
        (out / f"{cfg.run_id}.metrics.txt").write_text(report.to_text() + "\n")
        save_model(model, out / f"{cfg.run_id}.model.json",
                   fitted_encoding=matrix.encoding, manifest=manifest)
    return ExperimentResult(row, report, model, train_matrix, test_matrix)


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian parameter grid over a base experiment configuration."""

    base: ExperimentConfig
    axes: tuple[tuple[str, tuple], ...]  # (param name, values), row-major order

    def cells(self) -> list[dict]:
        names = [name for name, _ in self.axes]
        combos = itertools.product(*(values for _, values in self.axes))
        return [dict(zip(names, combo)) for combo in combos]


def nn_grid(base: ExperimentConfig,
            nodes=(100, 1000, 10000),
            rates=(0.1, 0.01, 0.001),
            iterations=(100, 1000, 10000)) -> SweepGrid:
    """The published 27-cell network parameter grid (nodes x rate x passes)."""
    return SweepGrid(
        base=base,
        axes=(
            ("hidden_layers", tuple((n,) for n in nodes)),
            ("learning_rate", tuple(rates)),
            ("iterations", tuple(iterations)),
        ),
    )


def run_sweep(grid: SweepGrid, progress=None) -> list[ResultRow]:
    """One row per cell, in grid order.  Completed cells (manifest already
    present) are skipped; per-cell failures are recorded and the sweep
    continues."""
    rows = []
    for index, cell in enumerate(grid.cells()):
        run_id = f"cell_{index:04d}"
        out_dir = grid.base.output_dir
        manifest_path = None
        if out_dir is not None:
            manifest_path = Path(out_dir) / f"{run_id}.manifest.json"
            if manifest_path.exists():
                stored = json.loads(manifest_path.read_text())
                rows.append(ResultRow(**stored["result"]))
                continue
        params = dict(grid.base.model_params)
        params.update(cell)
        params.setdefault("seed", grid.base.split.seed + index)
        cfg = replace(grid.base, model_params=params, run_id=run_id)
        try:
            result = run_experiment(cfg)
            rows.append(result.row)
        except Exception as exc:  # record and continue with the other cells
            rows.append(ResultRow(grid.base.model_kind, params, float("nan"),
                                  float("nan"), 0.0, params.get("seed", 0), str(exc)))
        if progress is not None:
            progress(index, rows[-1])
    return rows


@dataclass(frozen=True)
class ComparisonLine:
    model_kind: str
    actual: float
    expected: float
    tolerance: float
    margin: float        # tolerance - |actual - expected|; negative = fail
    passed: bool


@dataclass(frozen=True)
class ComparisonReport:
    lines: tuple[ComparisonLine, ...]

    @property
    def passed(self) -> bool:
        return all(line.passed for line in self.lines)

    def to_text(self) -> str:
        out = []
        for ln in self.lines:
            status = "pass" if ln.passed else "FAIL"
            out.append(
                f"{status}  {ln.model_kind:<22} actual {ln.actual:.4f}  "
                f"expected {ln.expected:.4f} +/- {ln.tolerance:.2f}  margin {ln.margin:+.4f}"
            )
        return "\n".join(out)


def compare_to_reference(rows: list[ResultRow]) -> ComparisonReport:
    """Check each row's overall accuracy against the published value for its
    model kind, within the per-kind tolerance band."""
    refs = load_references()
    lines = []
    for row in rows:
        if row.model_kind not in refs["figure_metrics"]:
            raise MissingReferenceRowError(row.model_kind)
        expected = refs["figure_metrics"][row.model_kind]["overall_accuracy"]
        tol = refs["tolerances"][row.model_kind]
        margin = tol - abs(row.overall_accuracy - expected)
        lines.append(ComparisonLine(row.model_kind, row.overall_accuracy,
                                    expected, tol, margin, margin >= 0))
    return ComparisonReport(tuple(lines))


def default_experiment(kind: str, dataset_source: str = ORACLE_SOURCE,
                       output_dir: str | None = None, fast: bool = False,
                       seed: int = 7) -> ExperimentConfig:
    """The baseline configuration for each model kind.  `fast` caps network
    width at 200 and iterations at 100 so a full comparison finishes at desk
    scale."""
    params: dict = {"seed": seed}
    if kind == "neural_network":
        params["hidden_layers"] = [100]
        params["learning_rate"] = 0.1
        params["iterations"] = 100
        if fast:
            params["hidden_layers"] = [min(200, params["hidden_layers"][0])]
            params["iterations"] = min(100, params["iterations"])
    return ExperimentConfig(
        model_kind=kind,
        dataset_source=dataset_source,
        split=SplitSpec(0.7, seed=seed, stratified=True),
        model_params=params,
        output_dir=output_dir,
        run_id=kind,
    )


def run_model_comparison(dataset_source: str = ORACLE_SOURCE,
                         output_dir: str | None = None, fast: bool = True,
                         seed: int = 7, kinds=MODEL_KINDS,
                         progress=None) -> tuple[list[ResultRow], ComparisonReport]:
    """Train the four baseline models on one shared split and compare their
    metrics against the published table."""
    rows = []
    for kind in kinds:
        cfg = default_experiment(kind, dataset_source, output_dir, fast=fast, seed=seed)
        result = run_experiment(cfg)
        rows.append(result.row)
        if progress is not None:
            progress(kind, result.row)
    return rows, compare_to_reference(rows)
