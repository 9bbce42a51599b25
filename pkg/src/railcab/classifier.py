"""Gaussian naive Bayes and its state-weighted extension.

Both classifiers pick the input class with the largest
log P(I) + sum_o (w_o / 100) * log N(o; mu, sigma^2); plain naive Bayes is
the special case where every base channel weighs 100 and the previous-input
channels are excluded. Weight 0 removes a channel from the sum entirely.
All scoring happens in log space on z-scored features with a variance
floor, so products of many densities never underflow. Ties break to the
lowest canonical class index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .constants import VAR_FLOOR
from .dataset import BASE_FEATURE_COUNT, CLASS_ORDER, FEATURE_NAMES
from .dynamics import InputCommand
from .odm import OperationalState
from .weights import WeightTable

InputClass = InputCommand

BASE_FEATURES = FEATURE_NAMES[:BASE_FEATURE_COUNT]
PI_FEATURES = FEATURE_NAMES[BASE_FEATURE_COUNT:]

VARIANT_NB = "nb"
VARIANT_OWO = "owo"
VARIANT_OWO_PI = "owo_pi"
VARIANTS = (VARIANT_NB, VARIANT_OWO, VARIANT_OWO_PI)

_LOG_2PI = float(np.log(2.0 * np.pi))


class FitError(ValueError):
    pass


class PredictionError(ValueError):
    pass


@dataclass
class GaussianNbModel:
    """Fitted model: empirical priors plus per-class feature Gaussians.

    Parameters live in standardised space; scale_mean/scale_sd map raw
    feature values into it. Classes absent from training carry no
    parameters and are never predicted.
    """

    feature_names: tuple[str, ...]
    class_indices: np.ndarray   # [C] canonical indices, strictly ascending
    priors: np.ndarray          # [C] empirical P(I), sums to 1
    means: np.ndarray           # [C, F]
    variances: np.ndarray       # [C, F], floored
    scale_mean: np.ndarray      # [F]
    scale_sd: np.ndarray        # [F]
    split: dict | None = None   # bookkeeping: how the training rows were chosen

    @property
    def classes(self) -> list[InputClass]:
        return [CLASS_ORDER[i] for i in self.class_indices]

    def has_pi_features(self) -> bool:
        return all(name in self.feature_names for name in PI_FEATURES)


def fit(
    X: np.ndarray,
    y: Sequence[int],
    feature_names: Sequence[str] = FEATURE_NAMES,
    split: dict | None = None,
) -> GaussianNbModel:
    """Maximum-likelihood fit: empirical priors, per-class mean/variance.

    Requires at least two rows for every class that appears; a singleton
    class has no defined variance and is reported by name.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise FitError("empty dataset")
    if X.shape[0] != y.shape[0]:
        raise FitError("X and y row counts differ")
    if X.shape[1] != len(feature_names):
        raise FitError("feature count does not match feature_names")
    if not np.isfinite(X).all():
        raise FitError("non-finite feature values in training data")

    present, counts = np.unique(y, return_counts=True)
    for idx, count in zip(present, counts):
        if count < 2:
            p, b = CLASS_ORDER[idx].power_notch, CLASS_ORDER[idx].brake_notch
            raise FitError(
                f"class ({p},{b}) has a single training row; variance undefined"
            )

    scale_mean = X.mean(axis=0)
    scale_sd = X.std(axis=0)
    scale_sd = np.where(scale_sd < 1e-9, 1.0, scale_sd)
    Xz = (X - scale_mean) / scale_sd

    n_classes = len(present)
    n_features = X.shape[1]
    priors = counts.astype(np.float64) / len(y)
    means = np.empty((n_classes, n_features))
    variances = np.empty((n_classes, n_features))
    for row, idx in enumerate(present):
        block = Xz[y == idx]
        means[row] = block.mean(axis=0)
        variances[row] = np.maximum(block.var(axis=0), VAR_FLOOR)

    return GaussianNbModel(
        feature_names=tuple(feature_names),
        class_indices=present,
        priors=priors,
        means=means,
        variances=variances,
        scale_mean=scale_mean,
        scale_sd=scale_sd,
        split=dict(split) if split else None,
    )


def _weight_vector(model: GaussianNbModel, state_name: str | None, table: WeightTable | None,
                   include_pi: bool) -> np.ndarray:
    """Per-feature exponents (w/100) aligned to the model's feature order."""
    weights = np.zeros(len(model.feature_names))
    if table is None:  # plain NB: base channels at 100%, PI never used
        for i, name in enumerate(model.feature_names):
            if name in BASE_FEATURES:
                weights[i] = 1.0
        return weights
    row = table.state_weights(state_name)
    for i, name in enumerate(model.feature_names):
        if name in PI_FEATURES:
            weights[i] = row["PI"] / 100.0 if include_pi else 0.0
        else:
            weights[i] = row[name] / 100.0
    return weights


def _scores(model: GaussianNbModel, X: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """[N, C] weighted log-posterior scores (up to the evidence constant)."""
    active = np.flatnonzero(weights > 0.0)
    scores = np.broadcast_to(np.log(model.priors), (X.shape[0], len(model.priors))).copy()
    if active.size == 0:
        return scores
    Xa = (X[:, active] - model.scale_mean[active]) / model.scale_sd[active]
    w = weights[active]
    for c in range(len(model.class_indices)):
        mu = model.means[c, active]
        var = model.variances[c, active]
        log_pdf = -0.5 * ((Xa - mu) ** 2 / var + np.log(var) + _LOG_2PI)
        scores[:, c] += log_pdf @ w
    return scores


def _check_matrix(model: GaussianNbModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != len(model.feature_names):
        raise PredictionError(
            f"expected {len(model.feature_names)} features, got {X.shape[1]}"
        )
    if not np.isfinite(X).all():
        raise PredictionError("non-finite feature value")
    return X


def _row_from_mapping(model: GaussianNbModel, obs: Mapping[str, float]) -> np.ndarray:
    row = np.empty(len(model.feature_names))
    for i, name in enumerate(model.feature_names):
        if name not in obs:
            raise PredictionError(f"missing feature {name!r}")
        row[i] = obs[name]
    return row


def predict_nb(model: GaussianNbModel, obs: Mapping[str, float]) -> InputClass:
    """Plain Gaussian naive Bayes over the base channels."""
    X = _check_matrix(model, _row_from_mapping(model, obs))
    weights = _weight_vector(model, None, None, include_pi=False)
    scores = _scores(model, X, weights)
    return CLASS_ORDER[model.class_indices[int(np.argmax(scores[0]))]]


def predict_owo(
    model: GaussianNbModel,
    obs: Mapping[str, float],
    state: OperationalState,
    weights: WeightTable,
) -> InputClass:
    """State-weighted prediction; channel weights come from the table row.

    The PI column applies only when the model was fitted with the
    previous-input features.
    """
    X = _check_matrix(model, _row_from_mapping(model, obs))
    vector = _weight_vector(model, state.value, weights, include_pi=model.has_pi_features())
    scores = _scores(model, X, vector)
    return CLASS_ORDER[model.class_indices[int(np.argmax(scores[0]))]]


def predict_indices(
    model: GaussianNbModel,
    X: np.ndarray,
    states: np.ndarray | None,
    weights: WeightTable | None,
    variant: str,
) -> np.ndarray:
    """Vectorised prediction; returns canonical class indices."""
    X = _check_matrix(model, X)
    if variant not in VARIANTS:
        raise PredictionError(f"unknown variant {variant!r}")
    if variant == VARIANT_NB:
        vector = _weight_vector(model, None, None, include_pi=False)
        return model.class_indices[np.argmax(_scores(model, X, vector), axis=1)]

    if weights is None:
        raise PredictionError(f"variant {variant!r} needs a weight table")
    if states is None or len(states) != X.shape[0]:
        raise PredictionError("row/state length mismatch")
    if variant == VARIANT_OWO_PI and not model.has_pi_features():
        raise PredictionError(
            "variant owo_pi requires a model fitted with previous-input features"
        )
    include_pi = variant == VARIANT_OWO_PI and model.has_pi_features()
    states = np.asarray(states, dtype=np.int64)
    out = np.empty(X.shape[0], dtype=np.int64)
    state_order = tuple(OperationalState)
    for code in np.unique(states):
        mask = states == code
        vector = _weight_vector(model, state_order[code].value, weights, include_pi)
        out[mask] = model.class_indices[np.argmax(_scores(model, X[mask], vector), axis=1)]
    return out


def predict_batch(
    model: GaussianNbModel,
    X: np.ndarray,
    states: np.ndarray | None,
    weights: WeightTable | None,
    variant: str,
) -> list[InputClass]:
    """Elementwise predictions as input classes (see predict_indices)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 2 and X.shape[0] == 0:
        return []
    return [CLASS_ORDER[i] for i in predict_indices(model, X, states, weights, variant)]


def save_model(model: GaussianNbModel, path: str | Path, weights: WeightTable) -> None:
    """Serialise model plus the weight table configured for it.

    JSON floats round-trip exactly, so a reload scores identically.
    """
    doc = {
        "feature_names": list(model.feature_names),
        "classes": [[c.power_notch, c.brake_notch] for c in model.classes],
        "priors": model.priors.tolist(),
        "means": model.means.tolist(),
        "variances": model.variances.tolist(),
        "scale_mean": model.scale_mean.tolist(),
        "scale_sd": model.scale_sd.tolist(),
        "split": model.split,
        "weight_table": weights.to_mapping(),
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n")


def load_model(path: str | Path) -> tuple[GaussianNbModel, WeightTable]:
    doc = json.loads(Path(path).read_text())
    from .dataset import class_index  # local import to avoid cycle at module load

    model = GaussianNbModel(
        feature_names=tuple(doc["feature_names"]),
        class_indices=np.array(
            [class_index(p, b) for p, b in doc["classes"]], dtype=np.int64
        ),
        priors=np.array(doc["priors"], dtype=np.float64),
        means=np.array(doc["means"], dtype=np.float64),
        variances=np.array(doc["variances"], dtype=np.float64),
        scale_mean=np.array(doc["scale_mean"], dtype=np.float64),
        scale_sd=np.array(doc["scale_sd"], dtype=np.float64),
        split=doc.get("split"),
    )
    return model, WeightTable(doc["weight_table"])
