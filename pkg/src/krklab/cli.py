"""Command-line interface.

Exit codes: 0 success, 1 verification/tolerance failure, 2 execution error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import tablebase as tb_mod
from .artifacts import load_model
from .board import IllegalPositionError, Position, Side, Square
from .dataset import (
    EncodingScheme,
    SplitSpec,
    encode,
    load_dataset,
    split,
    statistics,
    statistics_csv,
    statistics_json,
)
from .harness import (
    ExperimentConfig,
    default_experiment,
    load_records,
    nn_grid,
    run_experiment,
    run_model_comparison,
    run_sweep,
)
from .metrics import confusion, metrics


def _solve():
    print("solving the endgame space...", file=sys.stderr)
    return tb_mod.solve()


def cmd_generate(args) -> int:
    tb = _solve()
    count = tb_mod.write_dataset(tb, args.output)
    print(f"wrote {count} records to {args.output}")
    return 0


def cmd_verify(args) -> int:
    tb = _solve()
    records = load_dataset(args.data)
    report = tb_mod.verify_against_dataset(tb, records)
    print(f"records compared: {report.n_records}")
    print(f"agreement: {report.n_agree}/{report.n_records} "
          f"({report.agreement_ratio * 100:.4f}%)")
    for d in report.disagreements[:20]:
        print(f"  mismatch {d.record.to_line()}: dataset={d.dataset_label} "
              f"oracle={d.oracle_label}")
    if len(report.disagreements) > 20:
        print(f"  ... and {len(report.disagreements) - 20} more")
    nonzero = {k: v for k, v in report.histogram_delta.items() if v != 0}
    if nonzero:
        print(f"histogram deltas (dataset - oracle): {nonzero}")
    return 0 if report.success else 1


def cmd_stats(args) -> int:
    records = load_records(args.data)
    if args.format == "json":
        print(statistics_json(records))
    elif args.format == "csv":
        print(statistics_csv(records), end="")
    else:
        print(f"{'label':<10} {'count':>7} {'percent':>8}")
        for label, count, pct in statistics(records):
            print(f"{label:<10} {count:>7} {pct:>7.2f}%")
        print(f"{'total':<10} {len(records):>7}")
    return 0


def cmd_probe(args) -> int:
    tb = _solve()
    try:
        p = Position(Square.from_text(args.wk), Square.from_text(args.wr),
                     Square.from_text(args.bk), Side.BLACK)
    except (ValueError, IllegalPositionError) as exc:
        print(f"illegal position: {exc}", file=sys.stderr)
        return 2
    print(tb_mod.classify(tb, p))
    return 0


def _split_spec(args) -> SplitSpec:
    return SplitSpec(args.train_fraction, seed=args.seed, stratified=True)


def cmd_train(args) -> int:
    params = json.loads(args.params) if args.params else {}
    params.setdefault("seed", args.seed)
    encoding = None
    if args.encoding:
        encoding = EncodingScheme(args.encoding, args.normalize)
    cfg = ExperimentConfig(
        model_kind=args.model,
        dataset_source=args.data,
        encoding=encoding,
        split=_split_spec(args),
        model_params=params,
        netscript=args.netscript,
        output_dir=args.out,
        run_id=args.run_id or args.model,
    )
    result = run_experiment(cfg)
    print(result.report.to_text())
    print(f"train time: {result.row.train_seconds:.1f}s")
    if args.out:
        print(f"artifacts in {args.out}/")
    return 0


def cmd_evaluate(args) -> int:
    artifact = load_model(args.model_file)
    records = load_records(args.data)
    manifest_split = (artifact.manifest or {}).get("split")
    spec = SplitSpec(**manifest_split) if manifest_split else _split_spec(args)
    if artifact.fitted_encoding is None:
        print("artifact carries no fitted encoding; cannot rebuild features",
              file=sys.stderr)
        return 2
    scheme = artifact.fitted_encoding.scheme
    matrix = encode(records, scheme)
    _, test = split(matrix, spec)
    predicted, _ = artifact.model.predict_batch(test.features)
    print(metrics(confusion(test.labels, predicted, matrix.class_order)).to_text())
    return 0


def cmd_sweep(args) -> int:
    base = ExperimentConfig(
        model_kind="neural_network",
        dataset_source=args.data,
        split=_split_spec(args),
        output_dir=args.out,
    )
    if args.grid == "reference":
        grid = nn_grid(base)
    elif args.grid == "desk":
        grid = nn_grid(base, nodes=(20, 60, 180), rates=(0.1, 0.01, 0.001),
                       iterations=(3, 10, 30))
    else:
        spec = json.loads(Path(args.grid).read_text())
        grid = nn_grid(base, nodes=tuple(spec["nodes"]), rates=tuple(spec["rates"]),
                       iterations=tuple(spec["iterations"]))
    def progress(i, row):
        print(f"cell {i:02d} {row.params.get('hidden_layers')} "
              f"rate={row.params.get('learning_rate')} iters={row.params.get('iterations')}"
              f" -> {row.overall_accuracy:.4f}", flush=True)
    rows = run_sweep(grid, progress=progress)
    out = Path(args.out) / "sweep.json"
    out.write_text(json.dumps([r.to_dict() for r in rows], indent=2))
    print(f"sweep results in {out}")
    return 0


def cmd_compare(args) -> int:
    def progress(kind, row):
        print(f"{kind}: overall {row.overall_accuracy:.4f} "
              f"({row.train_seconds:.0f}s)", flush=True)
    rows, report = run_model_comparison(
        dataset_source=args.data, output_dir=args.out,
        fast=not args.full, seed=args.seed, progress=progress,
    )
    print(report.to_text())
    if args.out:
        Path(args.out, "comparison.json").write_text(json.dumps(
            {"rows": [r.to_dict() for r in rows],
             "passed": report.passed}, indent=2))
    return 0 if report.passed else 1


def cmd_serve(args) -> int:
    from .server import create_app, load_registry, serve

    tb = _solve()
    records = load_records(args.data)
    registry = load_registry(args.models_dir)
    ui_dir = args.ui
    if ui_dir is None:
        bundled = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
        ui_dir = bundled if bundled.is_dir() else None
    app = create_app(tb, records, registry, ui_dir=ui_dir)
    print(f"serving on http://{args.host}:{args.port} "
          f"({len(registry)} models, ui={'yes' if ui_dir else 'no'})")
    serve(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="krk",
        description="King-Rook-vs-King endgame lab: tablebase oracle, "
                    "classifiers, evaluation and serving.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="solve and write the dataset file")
    p.add_argument("-o", "--output", default="krkopt.data")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="compare a dataset file against the solver")
    p.add_argument("data")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stats", help="per-class counts and percentages")
    p.add_argument("--data", default="oracle:generate")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("probe", help="oracle label for one position (black to move)")
    p.add_argument("wk")
    p.add_argument("wr")
    p.add_argument("bk")
    p.set_defaults(func=cmd_probe)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", default="oracle:generate",
                        help="dataset file path, or oracle:generate (default)")
    common.add_argument("--seed", type=int, default=7)
    common.add_argument("--train-fraction", type=float, default=0.7)

    p = sub.add_parser("train", parents=[common], help="train one model")
    p.add_argument("--model", required=True,
                   choices=("logistic_regression", "decision_forest",
                            "decision_jungle", "neural_network"))
    p.add_argument("--encoding", choices=("ordinal", "onehot"))
    p.add_argument("--normalize", choices=("none", "minmax"), default="none")
    p.add_argument("--params", help="model config overrides as a JSON object")
    p.add_argument("--netscript", help="network script text or .netscript path")
    p.add_argument("--out", help="output directory for artifacts")
    p.add_argument("--run-id")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", parents=[common], help="evaluate a saved model")
    p.add_argument("--model-file", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", parents=[common], help="network parameter grid")
    p.add_argument("--out", required=True)
    p.add_argument("--grid", default="desk",
                   help="'desk' (minutes), 'reference' (the full published "
                        "grid; many hours), or a JSON file with nodes/rates/iterations")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", parents=[common],
                       help="train the four baselines and check the published bands")
    p.add_argument("--out")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--fast", action="store_true", default=True,
                      help="desk-scale caps on the network (the default)")
    mode.add_argument("--full", action="store_true",
                      help="disable the desk-scale caps on the network")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.add_argument("--models-dir")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", help="static web UI directory (default: bundled build)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # uniform nonzero exit for operational errors
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
