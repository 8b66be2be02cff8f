"""Random hyperparameter search over the tuning catalogue."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .training import TrainConfig, train


@dataclass(frozen=True)
class SearchSpace:
    """Value catalogue sampled by the random search.

    Defaults cover the standard tuning grid: learning rate log-uniform in
    [1e-4, 1e-2], batch size 32/64, epochs 10..50 by 10, dropout 0.1..0.5 by
    0.1, hidden units 64..256 by 32, one to three stacked layers, and the
    three activations and optimizers.
    """

    learning_rate_bounds: tuple[float, float] = (0.0001, 0.01)
    batch_sizes: tuple[int, ...] = (32, 64)
    epochs_choices: tuple[int, ...] = (10, 20, 30, 40, 50)
    dropout_choices: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5)
    hidden_choices: tuple[int, ...] = (64, 96, 128, 160, 192, 224, 256)
    layer_choices: tuple[int, ...] = (1, 2, 3)
    activations: tuple[str, ...] = ("relu", "sigmoid", "tanh")
    optimizers: tuple[str, ...] = ("adam", "sgd", "rmsprop")
    look_back_choices: tuple[int, ...] = (20,)
    early_stop_patience: int = 5

    def sample(self, rng: np.random.Generator, seed: int) -> TrainConfig:
        lo, hi = self.learning_rate_bounds
        lr = float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
        pick = lambda choices: choices[int(rng.integers(len(choices)))]
        return TrainConfig(
            learning_rate=lr,
            batch_size=pick(self.batch_sizes),
            epochs=pick(self.epochs_choices),
            dropout=pick(self.dropout_choices),
            hidden_units=pick(self.hidden_choices),
            lstm_layers=pick(self.layer_choices),
            activation=pick(self.activations),
            optimizer=pick(self.optimizers),
            look_back=pick(self.look_back_choices),
            early_stop_patience=self.early_stop_patience,
            seed=seed,
        )


@dataclass(frozen=True)
class TrialResult:
    trial: int
    config: TrainConfig
    val_loss: float


def random_search(space: SearchSpace, trials: int, master_seed: int,
                  train_samples, val_samples):
    """Train one model per randomly drawn config; rank by validation loss.

    Trial i derives all of its randomness from (master_seed, i), so repeated
    searches with the same master seed reproduce the leaderboard exactly.
    Ties in validation loss break by trial index.
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    results = []
    for i in range(trials):
        rng = np.random.default_rng([master_seed, i])
        config = space.sample(rng, seed=int(rng.integers(2**31)))
        _, history = train(train_samples, val_samples, config)
        val_loss = min(rec.val_loss for rec in history)
        results.append(TrialResult(trial=i, config=config, val_loss=val_loss))
    leaderboard = sorted(results, key=lambda r: (r.val_loss, r.trial))
    return leaderboard[0].config, leaderboard
