"""Command-line pipeline: generate runs, fit models, evaluate, serve.

Every command is deterministic given its arguments; seeds are explicit and
recorded in the artifacts each step writes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import classifier, dataset, evaluate
from .constants import DT_S
from .dataset import BASE_FEATURE_COUNT, FEATURE_NAMES
from .evaluate import SPLIT_SEED, SPLIT_TRAIN_RUNS
from .route import RouteError, load_route
from .simulate import generate_run
from .weights import WeightTable, WeightTableError, load_weights, save_weights

STATE_DIR_ENV = "RAILCAB_STATE_DIR"


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def cmd_generate(args: argparse.Namespace) -> int:
    try:
        route = load_route(args.route)
    except RouteError as exc:
        return _fail(f"invalid route {args.route}:\n  " + "\n  ".join(exc.errors))
    out_dir = Path(args.out)
    seeds = list(range(args.seed, args.seed + args.runs))
    runs = []
    for seed in seeds:
        runs.append(generate_run(route, seed, dt=args.dt))
        print(f"run seed={seed}: {len(runs[-1])} steps")
    total = dataset.export_dataset(
        runs, out_dir, route, seeds, args.dt, route_name=Path(args.route).stem
    )
    manifest_path = out_dir / dataset.MANIFEST_NAME
    print(f"wrote {total} rows over {len(runs)} runs")
    print(f"manifest: {manifest_path}")
    return 0


def _split_dataset(data: dataset.Dataset, train_count: int, seed: int):
    run_ids = list(range(len(data.manifest["runs"])))
    train_runs, test_runs = evaluate.split_runs(run_ids, train_count, seed)
    train_mask = np.isin(data.run_ids, train_runs)
    split = {
        "train_runs": train_runs,
        "test_runs": test_runs,
        "train_count": train_count,
        "seed": seed,
    }
    return train_mask, split


def cmd_fit(args: argparse.Namespace) -> int:
    data = dataset.load_dataset(args.manifest)
    train_mask, split = _split_dataset(data, args.train_count, args.split_seed)
    if args.features == "base":
        names = FEATURE_NAMES[:BASE_FEATURE_COUNT]
        X = data.X[train_mask, :BASE_FEATURE_COUNT]
    else:
        names = FEATURE_NAMES
        X = data.X[train_mask]
    try:
        model = classifier.fit(X, data.y[train_mask], names, split=split)
    except classifier.FitError as exc:
        return _fail(str(exc))
    weights = load_weights(args.weights) if args.weights else WeightTable.default()
    classifier.save_model(model, args.out, weights)
    print(f"fitted on {int(train_mask.sum())} rows from runs {split['train_runs']}")
    print("class priors:")
    for cls, prior in zip(model.classes, model.priors):
        print(f"  ({cls.power_notch},{cls.brake_notch}): {prior:.6f}")
    print(f"model: {args.out}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    try:
        model, model_weights = classifier.load_model(args.model)
    except (OSError, KeyError, ValueError) as exc:
        return _fail(f"cannot load model {args.model}: {exc}")
    if args.weights:
        try:
            weights = load_weights(args.weights)
        except (OSError, WeightTableError) as exc:
            return _fail(f"invalid weights {args.weights}: {exc}")
    else:
        weights = model_weights

    data = dataset.load_dataset(args.manifest)
    split = model.split
    if split is None or args.ignore_model_split:
        _, split = _split_dataset(data, args.train_count, args.split_seed)
    test_mask = np.isin(data.run_ids, split["test_runs"])
    if model.has_pi_features():
        X = data.X[test_mask]
    else:
        X = data.X[test_mask, :BASE_FEATURE_COUNT]

    variants = tuple(v.strip() for v in args.variants.split(",") if v.strip())
    metadata = {
        "route_hash": data.manifest["route_hash"],
        "seeds": [entry["seed"] for entry in data.manifest["runs"]],
        "weight_hash": weights.hash(),
        "split": split,
        "dt": data.manifest["dt"],
    }
    try:
        report = evaluate.evaluate(
            model, X, data.y[test_mask], data.states[test_mask], weights,
            variants=variants, metadata=metadata,
        )
    except (ValueError, classifier.PredictionError) as exc:
        return _fail(str(exc))

    out = Path(args.out) if args.out else Path(args.manifest).parent / "report.json"
    evaluate.save_report(report, out)
    print(evaluate.render_report_table(report))
    print(f"report: {out}")

    if set(classifier.VARIANTS) <= set(variants):
        comparison = evaluate.compare(report)
        print()
        for claim in comparison.claims:
            marker = "PASS" if claim.passed else "FAIL"
            print(f"[{marker}] {claim.name}: {claim.detail}")
        return 0 if comparison.all_passed else 1
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    state_dir = Path(args.state_dir)
    if not (state_dir / dataset.MANIFEST_NAME).exists():
        return _fail(f"state dir {state_dir} has no {dataset.MANIFEST_NAME}")
    if not (state_dir / "model.json").exists():
        return _fail(f"state dir {state_dir} has no model.json (run fit first)")
    app = create_app(state_dir, ui_dir=Path(args.ui_dir) if args.ui_dir else None)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_weights_init(args: argparse.Namespace) -> int:
    save_weights(WeightTable.default(), args.out)
    print(f"default weight table written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="railcab",
        description="Cab-simulation pipeline: generate labelled runs, fit "
        "classifiers, reproduce the per-state accuracy comparison, and host "
        "the weight-tuning service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="simulate runs and write a dataset")
    p.add_argument("--route", required=True, help="route file (JSON)")
    p.add_argument("--runs", type=int, default=25)
    p.add_argument("--seed", type=int, default=1, help="seed of the first run")
    p.add_argument("--dt", type=float, default=DT_S)
    p.add_argument("--out", required=True, help="output dataset directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("fit", help="fit the Gaussian model on the train split")
    p.add_argument("--manifest", required=True)
    p.add_argument("--train-count", type=int, default=SPLIT_TRAIN_RUNS)
    p.add_argument("--split-seed", type=int, default=SPLIT_SEED)
    p.add_argument("--features", choices=("base", "with-pi"), default="with-pi")
    p.add_argument("--weights", help="weight table to bundle (default: built-in)")
    p.add_argument("--out", required=True, help="model file path")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="evaluate variants on the test split")
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--weights", help="weight table file (default: model's)")
    p.add_argument("--variants", default="nb,owo,owo_pi")
    p.add_argument("--out", help="report path (default: <dataset>/report.json)")
    p.add_argument("--train-count", type=int, default=SPLIT_TRAIN_RUNS)
    p.add_argument("--split-seed", type=int, default=SPLIT_SEED)
    p.add_argument(
        "--ignore-model-split",
        action="store_true",
        help="re-split with --train-count/--split-seed instead of the model's split",
    )
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="host the HTTP tuning service")
    p.add_argument(
        "--state-dir",
        default=os.environ.get(STATE_DIR_ENV),
        required=os.environ.get(STATE_DIR_ENV) is None,
        help=f"dataset/model directory (default: ${STATE_DIR_ENV})",
    )
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui-dir", help="built web UI to serve at / (optional)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("weights-init", help="write the default weight table")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_weights_init)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
