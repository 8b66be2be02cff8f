"""Training configuration, from-scratch optimizers, the BPTT training loop,
and the finite-difference gradient harness."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from ..errors import ConfigError, InputError, TrainingError
from .features import DEFAULT_LOOK_BACK, MinMaxScaler
from .lstm import ACTIVATIONS, LstmModel, backward_batch, forward_batch, init_params

OPTIMIZERS = ("adam", "sgd", "rmsprop")

# Conventional moment/decay constants for the from-scratch optimizers.
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
RMSPROP_RHO = 0.9
RMSPROP_EPS = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of one training run.

    The tuning search space constrains these to its catalogue of values;
    direct construction accepts anything structurally valid so that small
    diagnostic models (e.g. for gradient checking) remain expressible.
    """

    learning_rate: float = 0.005
    batch_size: int = 32
    epochs: int = 30
    dropout: float = 0.2
    hidden_units: int = 64
    lstm_layers: int = 1
    activation: str = "tanh"
    optimizer: str = "adam"
    look_back: int = DEFAULT_LOOK_BACK
    early_stop_patience: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0.0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1 or self.epochs < 1 or self.hidden_units < 1:
            raise ConfigError("batch_size, epochs, and hidden_units must be >= 1")
        if self.lstm_layers < 1:
            raise ConfigError(f"lstm_layers must be >= 1, got {self.lstm_layers}")
        if not (0.0 <= self.dropout < 1.0):
            raise ConfigError(f"dropout must lie in [0, 1), got {self.dropout}")
        if self.activation not in ACTIVATIONS:
            raise ConfigError(
                f"activation {self.activation!r} not one of {sorted(ACTIVATIONS)}"
            )
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"optimizer {self.optimizer!r} not one of {OPTIMIZERS}")
        if self.look_back < 1 or self.early_stop_patience < 0:
            raise ConfigError("look_back must be >= 1 and patience >= 0")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainConfig":
        return cls(**doc)


class _Sgd:
    def __init__(self, lr):
        self.lr = lr

    def step(self, params, grads):
        for key, grad in grads.items():
            params[key] -= self.lr * grad


class _RmsProp:
    def __init__(self, lr):
        self.lr = lr
        self.v = {}

    def step(self, params, grads):
        for key, grad in grads.items():
            v = self.v.get(key)
            if v is None:
                v = np.zeros_like(grad)
            v = RMSPROP_RHO * v + (1.0 - RMSPROP_RHO) * grad**2
            self.v[key] = v
            params[key] -= self.lr * grad / (np.sqrt(v) + RMSPROP_EPS)


class _Adam:
    def __init__(self, lr):
        self.lr = lr
        self.m = {}
        self.v = {}
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        bias1 = 1.0 - ADAM_BETA1**self.t
        bias2 = 1.0 - ADAM_BETA2**self.t
        for key, grad in grads.items():
            m = self.m.get(key)
            v = self.v.get(key)
            if m is None:
                m = np.zeros_like(grad)
                v = np.zeros_like(grad)
            m = ADAM_BETA1 * m + (1.0 - ADAM_BETA1) * grad
            v = ADAM_BETA2 * v + (1.0 - ADAM_BETA2) * grad**2
            self.m[key] = m
            self.v[key] = v
            params[key] -= self.lr * (m / bias1) / (np.sqrt(v / bias2) + ADAM_EPS)


def _make_optimizer(config: TrainConfig):
    return {"sgd": _Sgd, "rmsprop": _RmsProp, "adam": _Adam}[config.optimizer](
        config.learning_rate
    )


def _stack(samples, scaler):
    X = scaler.scale_window(np.stack([s.window for s in samples]).astype(float))
    y = np.asarray(scaler.scale_target([s.target for s in samples]))
    return X, y


def _dataset_loss(params, X, y, config, chunk: int = 512) -> float:
    total = 0.0
    for start in range(0, len(X), chunk):
        pred, _ = forward_batch(params, X[start : start + chunk], config)
        total += float(((pred - y[start : start + chunk]) ** 2).sum())
    return total / len(X)


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float


def train(train_samples, val_samples, config: TrainConfig):
    """Fit the network on raw (unscaled) sequence samples.

    The feature scaler is fit on the training split only, then applied to
    both splits. Mini-batch gradients are averaged within each batch and
    applied as one optimizer update; epoch-level shuffling, weight
    initialization, and dropout all derive from ``config.seed``, so a fixed
    (data, config) pair reproduces the history bitwise.

    Returns ``(model, history)`` where the model carries the weights of the
    epoch with the lowest validation loss.
    """
    if not train_samples or not val_samples:
        raise InputError("train and validation sets must be non-empty")
    look_back = train_samples[0].window.shape[0]
    if look_back != config.look_back:
        raise ConfigError(
            f"sample look-back {look_back} != configured {config.look_back}"
        )
    feature_count = train_samples[0].window.shape[1]

    scaler = MinMaxScaler.fit(train_samples)
    X_train, y_train = _stack(train_samples, scaler)
    X_val, y_val = _stack(val_samples, scaler)

    rng = np.random.default_rng(config.seed)
    params = init_params(feature_count, config, rng)
    optimizer = _make_optimizer(config)

    history: list[EpochRecord] = []
    best_val = math.inf
    best_params = {k: v.copy() for k, v in params.items()}
    bad_epochs = 0
    n = len(X_train)
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        sq_err_total = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            Xb, yb = X_train[idx], y_train[idx]
            pred, cache = forward_batch(
                params, Xb, config, training=True, rng=rng, want_cache=True
            )
            err = pred - yb
            sq_err_total += float((err**2).sum())
            grads = backward_batch(params, cache, 2.0 * err / len(idx))
            optimizer.step(params, grads)
        train_loss = sq_err_total / n
        val_loss = _dataset_loss(params, X_val, y_val, config)
        if not (math.isfinite(train_loss) and math.isfinite(val_loss)):
            raise TrainingError(f"loss diverged at epoch {epoch}")
        history.append(EpochRecord(epoch, train_loss, val_loss))
        if val_loss < best_val:
            best_val = val_loss
            best_params = {k: v.copy() for k, v in params.items()}
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs > config.early_stop_patience:
                break

    feature_mode = "model2" if feature_count == 7 else "model1"
    model = LstmModel(
        params=best_params,
        config=config,
        scaler=scaler,
        feature_mode=feature_mode,
        feature_count=feature_count,
    )
    return model, history


def gradient_check(config: TrainConfig, sample, epsilon: float = 1e-5) -> float:
    """Analytic vs central-finite-difference gradients over every parameter.

    Uses squared error on a single window. Only small models are accepted
    (hidden <= 8) and dropout must be off, since a stochastic forward pass
    would make the numeric reference meaningless.
    """
    if config.hidden_units > 8:
        raise ConfigError("gradient check is limited to hidden_units <= 8")
    if config.dropout > 0.0:
        raise ConfigError("gradient check requires dropout = 0 (training-mode "
                          "dropout makes the loss stochastic)")
    window = np.asarray(sample.window, dtype=float)
    target = float(sample.target)
    X = window[None, :, :]
    check_config = replace(config, look_back=window.shape[0])

    rng = np.random.default_rng(check_config.seed)
    params = init_params(window.shape[1], check_config, rng)

    pred, cache = forward_batch(params, X, check_config, want_cache=True)
    analytic = backward_batch(params, cache, 2.0 * (pred - target))

    def loss_at() -> float:
        p, _ = forward_batch(params, X, check_config)
        return float((p[0] - target) ** 2)

    worst = 0.0
    for key in sorted(params):
        tensor = params[key]
        flat = tensor.reshape(-1)
        grad_flat = analytic[key].reshape(-1)
        for j in range(flat.size):
            original = flat[j]
            flat[j] = original + epsilon
            up = loss_at()
            flat[j] = original - epsilon
            down = loss_at()
            flat[j] = original
            numeric = (up - down) / (2.0 * epsilon)
            denom = max(abs(grad_flat[j]) + abs(numeric), 1e-8)
            worst = max(worst, abs(grad_flat[j] - numeric) / denom)
    return worst
