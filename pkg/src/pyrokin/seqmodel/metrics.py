"""Error metrics for mass-loss predictions, in original target units."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from .lstm import LstmModel, predict_scaled


@dataclass(frozen=True)
class EvalMetrics:
    """MAE/MSE/RMSE in mass-percent units plus the determination coefficient."""

    mae: float
    mse: float
    rmse: float
    r_squared: float


def metrics_from_arrays(actual, predicted) -> EvalMetrics:
    actual = np.asarray(actual, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if actual.size == 0 or actual.shape != predicted.shape:
        raise InputError("actual and predicted must be equal-length, non-empty")
    err = predicted - actual
    mse = float((err**2).mean())
    ss_res = float((err**2).sum())
    ss_tot = float(((actual - actual.mean()) ** 2).sum())
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res <= 1e-300 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return EvalMetrics(
        mae=float(np.abs(err).mean()),
        mse=mse,
        rmse=math.sqrt(mse),
        r_squared=r2,
    )


def evaluate(model: LstmModel, test_samples) -> EvalMetrics:
    """Score a model on raw (unscaled) samples.

    Windows are scaled with the model's stored scaler, predictions are
    mapped back to mass percent, and all metrics are computed in those
    unscaled units.
    """
    if not test_samples:
        raise InputError("test set must be non-empty")
    X = model.scaler.scale_window(np.stack([s.window for s in test_samples]))
    predicted = model.scaler.unscale_target(predict_scaled(model, X))
    actual = np.array([s.target for s in test_samples], dtype=float)
    return metrics_from_arrays(actual, predicted)
