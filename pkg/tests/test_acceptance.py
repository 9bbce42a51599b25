"""Acceptance suite: runs the full fixture pipeline once and checks every
primary criterion at its stated tolerance. One PASS/FAIL line is printed
per criterion (run pytest with -s to watch them live).
"""

import json
import time
from types import SimpleNamespace

import numpy as np
import pandas as pd
import pytest

from railcab import classifier
from railcab import evaluate as ev
from railcab.cli import main
from railcab.dataset import FEATURE_NAMES, MANIFEST_NAME, load_dataset
from railcab.fixtures import fixture_route_path, load_fixture_route
from railcab.simulate import generate_run
from railcab.weights import WeightTable

RUNS = 25
FIRST_SEED = 1
TRAIN_COUNT = 20
SPLIT_SEED = 7


def check(criterion: str, passed: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if passed else 'FAIL'} ({detail})")
    assert passed, f"{criterion}: {detail}"


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """generate(25 runs) + fit + eval through the real CLI, timed."""
    root = tmp_path_factory.mktemp("acceptance")
    data_dir = root / "dataset"
    model_path = root / "model.json"
    report_path = root / "report.json"

    t0 = time.monotonic()
    assert main([
        "generate", "--route", str(fixture_route_path()), "--runs", str(RUNS),
        "--seed", str(FIRST_SEED), "--out", str(data_dir),
    ]) == 0
    generate_s = time.monotonic() - t0

    t1 = time.monotonic()
    assert main([
        "fit", "--manifest", str(data_dir / MANIFEST_NAME),
        "--train-count", str(TRAIN_COUNT), "--split-seed", str(SPLIT_SEED),
        "--out", str(model_path),
    ]) == 0
    fit_s = time.monotonic() - t1

    t2 = time.monotonic()
    eval_code = main([
        "eval", "--model", str(model_path),
        "--manifest", str(data_dir / MANIFEST_NAME),
        "--out", str(report_path),
    ])
    eval_s = time.monotonic() - t2

    manifest = json.loads((data_dir / MANIFEST_NAME).read_text())
    report = ev.load_report(report_path)
    return SimpleNamespace(
        data_dir=data_dir,
        manifest=manifest,
        model_path=model_path,
        report=report,
        eval_exit_code=eval_code,
        elapsed_s=generate_s + fit_s + eval_s,
        timings=(generate_s, fit_s, eval_s),
    )


def random_rows(rng, n):
    """Feature rows spanning the fixture's realistic ranges, plus margin."""
    return np.column_stack([
        rng.uniform(0.0, 5000.0, n),     # T
        rng.uniform(0.0, 3.5, n),        # S
        rng.uniform(2.5, 3.2, n),        # SL
        rng.uniform(2.5, 3.2, n),        # SLS
        rng.uniform(-1.5, 1.1, n),       # RoA
        rng.integers(0, 2, n).astype(float),   # ES
        rng.integers(0, 5, n).astype(float),   # prev_power
        rng.integers(0, 5, n).astype(float),   # prev_brake
    ])


@pytest.fixture(scope="module")
def synthetic_model():
    rng = np.random.default_rng(42)
    X = random_rows(rng, 6000)
    y = rng.integers(0, 9, 6000)
    return classifier.fit(X, y, FEATURE_NAMES)


class TestCriterion1UniformEquivalence:
    def test_nb_equals_owo_on_uniform_weights(self, synthetic_model):
        rng = np.random.default_rng(7)
        rows = random_rows(rng, 12_000)
        states = rng.integers(0, 5, 12_000)
        t0 = time.monotonic()
        nb = classifier.predict_indices(synthetic_model, rows, None, None, "nb")
        owo = classifier.predict_indices(
            synthetic_model, rows, states, WeightTable.uniform(), "owo"
        )
        elapsed = time.monotonic() - t0
        mismatches = int((nb != owo).sum())
        check(
            "C1 uniform-weights equivalence",
            mismatches == 0 and elapsed < 10.0,
            f"{len(rows)} rows, {mismatches} mismatches, {elapsed:.2f}s",
        )


class TestCriterion2ZeroWeightInvariance:
    def test_zero_weight_channels_are_inert(self, synthetic_model):
        rng = np.random.default_rng(8)
        table = WeightTable.default()
        changes = 0
        trials = 0
        feature_pos = {name: i for i, name in enumerate(FEATURE_NAMES)}
        for state_code, state_name in enumerate(
            ("Cruise", "AWS", "Engine_Check", "Brake_Change", "Speed_Change")
        ):
            row = table.state_weights(state_name)
            zero_channels = [k for k, v in row.items() if v == 0]
            for channel in zero_channels:
                columns = (
                    ["prev_power", "prev_brake"] if channel == "PI" else [channel]
                )
                base_rows = random_rows(rng, 1000)
                states = np.full(1000, state_code)
                before = classifier.predict_indices(
                    synthetic_model, base_rows, states, table, "owo_pi"
                )
                perturbed = base_rows.copy()
                for column in columns:
                    perturbed[:, feature_pos[column]] = rng.uniform(-1e6, 1e6, 1000)
                after = classifier.predict_indices(
                    synthetic_model, perturbed, states, table, "owo_pi"
                )
                changes += int((before != after).sum())
                trials += 1000
        check(
            "C2 zero-weight invariance",
            changes == 0,
            f"{trials} perturbed predictions, {changes} changed",
        )


class TestCriterion3BruteForceOracle:
    def test_log_space_matches_linear_enumeration(self):
        import math

        rng = np.random.default_rng(9)
        disagreements = 0
        for trial in range(4):
            n_classes = 2 + trial % 2
            X = rng.normal(size=(60 * n_classes, 2)) * rng.uniform(0.5, 2.0)
            y = np.repeat(np.arange(n_classes), 60)
            model = classifier.fit(X, y, ("T", "S"))
            points = rng.normal(size=(200, 2)) * 2.0
            predicted = classifier.predict_indices(model, points, None, None, "nb")
            for point, got in zip(points, predicted):
                z = (point - model.scale_mean) / model.scale_sd
                best, best_posterior = None, -1.0
                for c in range(n_classes):
                    posterior = float(model.priors[c])
                    for f in range(2):
                        var = float(model.variances[c, f])
                        posterior *= math.exp(
                            -((z[f] - model.means[c, f]) ** 2) / (2 * var)
                        ) / math.sqrt(2 * math.pi * var)
                    if posterior > best_posterior:
                        best_posterior, best = posterior, int(model.class_indices[c])
                if best != got:
                    disagreements += 1
        check(
            "C3 brute-force oracle agreement",
            disagreements == 0,
            f"4 toy models x 200 points, {disagreements} argmax disagreements",
        )


class TestCriterion4AwsAccuracy:
    def test_all_variants_hit_aws_floor(self, pipeline):
        aws = pipeline.report.states.get("AWS")
        assert aws is not None, "AWS absent from test rows"
        worst = min(aws["accuracy"].values())
        check(
            "C4 AWS accuracy",
            worst >= 0.98,
            f"support {aws['support']}, accuracies "
            + ", ".join(f"{k}={v:.4f}" for k, v in aws["accuracy"].items()),
        )

    def test_owo_predicts_idle_on_held_out_aws_steps(self, pipeline):
        aws = pipeline.report.states["AWS"]
        assert aws["accuracy"]["owo"] >= 0.99
        assert aws["accuracy"]["owo_pi"] >= 0.99


class TestCriterion5QualitativeOrdering:
    def test_report_reproduces_published_ordering(self, pipeline):
        comparison = ev.compare(pipeline.report)
        for claim in comparison.claims:
            print(f"  claim {claim.name}: {'PASS' if claim.passed else 'FAIL'} ({claim.detail})")
        check(
            "C5 qualitative ordering",
            comparison.all_passed,
            "; ".join(f"{c.name}={'ok' if c.passed else 'FAIL'}" for c in comparison.claims),
        )

    def test_cli_eval_exit_code_reflects_claims(self, pipeline):
        check(
            "C5 cli exit code",
            pipeline.eval_exit_code == 0,
            f"railcab eval returned {pipeline.eval_exit_code}",
        )


class TestCriterion6Determinism:
    def test_identical_inputs_identical_bytes(self, tmp_path):
        route = load_fixture_route()
        from railcab.dataset import write_run_csv

        first = tmp_path / "first.csv"
        second = tmp_path / "second.csv"
        other = tmp_path / "other.csv"
        write_run_csv(generate_run(route, 1), first)
        write_run_csv(generate_run(route, 1), second)
        write_run_csv(generate_run(route, 2), other)
        identical = first.read_bytes() == second.read_bytes()
        different = first.read_bytes() != other.read_bytes()
        check(
            "C6 simulator determinism",
            identical and different,
            f"same-seed identical={identical}, new-seed differs={different}",
        )


class TestCriterion7PhysicsAndLabels:
    def test_fixture_runs_are_physically_sane(self, pipeline):
        route = load_fixture_route()
        signal_positions = [f.position_m for f in route.signals()]
        violations = []
        for entry in pipeline.manifest["runs"]:
            frame = pd.read_csv(pipeline.data_dir / entry["file"])
            speeds = frame["S"].to_numpy()
            limit = np.minimum(frame["SL"].to_numpy(), frame["SLS"].to_numpy())
            t = frame["t_s"].to_numpy()
            if (speeds < 0).any():
                violations.append(f"{entry['file']}: negative speed")
            # overspeed allowed only within 3 s after a drop of min(SL, SLS)
            drops = np.flatnonzero(np.diff(limit) < 0) + 1
            last_drop_t = np.full(len(t), -np.inf)
            for idx in drops:
                last_drop_t[idx:] = t[idx]
            overspeed = speeds > 1.05 * limit
            uncovered = overspeed & ((t - last_drop_t) > 3.0)
            if uncovered.any():
                violations.append(
                    f"{entry['file']}: overspeed outside drop grace at rows "
                    f"{np.flatnonzero(uncovered)[:3].tolist()}"
                )
            states = frame["state"].to_numpy()
            positions = frame["pos_m"].to_numpy()
            for sig in signal_positions:
                after = np.flatnonzero(positions >= sig)
                if len(after) == 0:
                    violations.append(f"{entry['file']}: no step after signal {sig}")
                elif states[after[0]] != "AWS":
                    violations.append(
                        f"{entry['file']}: state {states[after[0]]} after signal {sig}"
                    )
            aws = states == "AWS"
            if (frame.loc[aws, ["power", "brake"]].to_numpy() != 0).any():
                violations.append(f"{entry['file']}: non-zero input in AWS")
            leaving = aws[:-1] & ~aws[1:]
            successors = states[1:][leaving[: len(states) - 1]]
            if not (successors == "Engine_Check").all():
                violations.append(f"{entry['file']}: AWS successor not Engine_Check")
            if set(states) != {"Cruise", "AWS", "Engine_Check", "Brake_Change", "Speed_Change"}:
                violations.append(f"{entry['file']}: missing states {set(states)}")
        check(
            "C7 physics and labelling sanity",
            not violations,
            f"{len(pipeline.manifest['runs'])} runs checked"
            + ("" if not violations else "; " + "; ".join(violations[:4])),
        )


class TestCriterion8ScaleAndRuntime:
    def test_dataset_scale(self, pipeline):
        rows = pipeline.manifest["total_rows"]
        per_run = [entry["rows"] for entry in pipeline.manifest["runs"]]
        check(
            "C8 dataset scale",
            rows >= 1_000_000 and min(per_run) >= 40_000,
            f"{rows} rows total, min run {min(per_run)} steps",
        )

    def test_pipeline_runtime(self, pipeline):
        generate_s, fit_s, eval_s = pipeline.timings
        check(
            "C8 end-to-end runtime",
            pipeline.elapsed_s < 300.0,
            f"generate {generate_s:.1f}s + fit {fit_s:.1f}s + eval {eval_s:.1f}s "
            f"= {pipeline.elapsed_s:.1f}s (< 300s)",
        )
