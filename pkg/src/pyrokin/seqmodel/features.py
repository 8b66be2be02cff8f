"""Feature engineering and dataset assembly for the mass-loss predictor.

Two feature layouts exist: the basic one carries blend ratio, heating rate,
and temperature (4 features); the extended one adds the three fibre
percentages depleted linearly across their decomposition windows (7
features). The prediction target is the remaining mass percent at the step
following each look-back window.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..constants import KELVIN_OFFSET
from ..errors import DomainError, InputError
from ..tga_io import TgaCurve

MODEL1 = "model1"
MODEL2 = "model2"

MODEL1_FEATURES = ("ds_pct", "scg_pct", "heating_rate", "temperature")
MODEL2_FEATURES = MODEL1_FEATURES + ("cellulose_t", "hemicellulose_t", "lignin_t")

# Decomposition windows in degrees Celsius used for the dynamic fibre features.
FIBRE_WINDOWS_C = {
    "cellulose": (315.0, 405.0),
    "hemicellulose": (225.0, 325.0),
    "lignin": (160.0, 900.0),
}

DEFAULT_LOOK_BACK = 20


@dataclass(frozen=True)
class FeatureRow:
    """One TGA measurement turned into model features plus its mass target."""

    ds_pct: float
    scg_pct: float
    heating_rate: float  # C/min
    temperature: float  # C
    mass_pct: float  # target, percent of initial mass
    cellulose_t: float | None = None
    hemicellulose_t: float | None = None
    lignin_t: float | None = None

    @property
    def mode(self) -> str:
        return MODEL1 if self.cellulose_t is None else MODEL2

    def as_vector(self) -> np.ndarray:
        if self.cellulose_t is None:
            return np.array(
                [self.ds_pct, self.scg_pct, self.heating_rate, self.temperature]
            )
        return np.array(
            [
                self.ds_pct,
                self.scg_pct,
                self.heating_rate,
                self.temperature,
                self.cellulose_t,
                self.hemicellulose_t,
                self.lignin_t,
            ]
        )


@dataclass(frozen=True)
class SequenceSample:
    """A look-back window of feature vectors and the next-step mass target.

    Windows never span two curves. Values are raw (percent / Celsius) until
    a fitted scaler transforms them for training or inference.
    """

    window: np.ndarray  # (look_back, n_features)
    target: float
    curve_id: str


def lignocellulosic_remaining(temperature_c: float, window: tuple[float, float]) -> float:
    """Fraction of a fibre component not yet decomposed at a temperature.

    1 below the window, 0 above it, and a linear ramp in between; continuous
    and non-increasing in temperature.
    """
    t_start, t_end = window
    if t_start >= t_end:
        raise DomainError(f"window start must precede end, got {window}")
    if temperature_c <= t_start:
        return 1.0
    if temperature_c >= t_end:
        return 0.0
    return (t_end - temperature_c) / (t_end - t_start)


def build_features(curve: TgaCurve, mode: str = MODEL1) -> list[FeatureRow]:
    """Convert one curve into per-measurement feature rows.

    The extended mode multiplies each initial fibre percentage by its
    remaining fraction at the row's temperature, so fibre features deplete
    as the corresponding stage progresses.
    """
    if mode not in (MODEL1, MODEL2):
        raise DomainError(f"unknown feature mode {mode!r}")
    spec = curve.spec
    if mode == MODEL2 and (
        spec.cellulose_pct is None or spec.hemicellulose_pct is None or spec.lignin_pct is None
    ):
        raise InputError(f"sample {spec.sample_id!r} lacks fibre metadata for extended features")
    rows = []
    for temp_k, mass in zip(curve.temperature_k, curve.mass_fraction):
        temp_c = temp_k - KELVIN_OFFSET
        fibre = {}
        if mode == MODEL2:
            fibre = {
                "cellulose_t": spec.cellulose_pct
                * lignocellulosic_remaining(temp_c, FIBRE_WINDOWS_C["cellulose"]),
                "hemicellulose_t": spec.hemicellulose_pct
                * lignocellulosic_remaining(temp_c, FIBRE_WINDOWS_C["hemicellulose"]),
                "lignin_t": spec.lignin_pct
                * lignocellulosic_remaining(temp_c, FIBRE_WINDOWS_C["lignin"]),
            }
        rows.append(
            FeatureRow(
                ds_pct=spec.ds_fraction * 100.0,
                scg_pct=spec.scg_fraction * 100.0,
                heating_rate=curve.heating_rate_beta,
                temperature=temp_c,
                mass_pct=mass * 100.0,
                **fibre,
            )
        )
    return rows


def window_sequences(rows_by_curve, look_back: int = DEFAULT_LOOK_BACK):
    """Slide a look-back window over each curve's rows independently.

    ``rows_by_curve`` maps curve id -> feature rows. A curve with n rows
    yields max(0, n - look_back) samples; windows never mix curves.
    """
    if look_back < 1:
        raise DomainError(f"look_back must be >= 1, got {look_back}")
    samples = []
    for curve_id, rows in rows_by_curve.items():
        if len(rows) <= look_back:
            continue
        vectors = np.stack([r.as_vector() for r in rows])
        targets = np.array([r.mass_pct for r in rows])
        for start in range(len(rows) - look_back):
            samples.append(
                SequenceSample(
                    window=vectors[start : start + look_back],
                    target=float(targets[start + look_back]),
                    curve_id=curve_id,
                )
            )
    return samples


def split_dataset(samples, fractions=(0.70, 0.15, 0.15), holdout_curves=(), seed: int = 0):
    """Deterministic train/val/test split with curve-level holdout.

    Samples from held-out curves are excluded from train/val entirely and
    prepended to the test set; the rest are shuffled by ``seed`` and divided
    by ``fractions``, whose third share becomes the in-distribution test
    remainder.
    """
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise DomainError(f"fractions must sum to 1, got {fractions}")
    holdout_set = set(holdout_curves)
    held = [s for s in samples if s.curve_id in holdout_set]
    rest = [s for s in samples if s.curve_id not in holdout_set]
    if not rest:
        raise InputError("holdout covers every curve; nothing left to train on")
    perm = np.random.default_rng(seed).permutation(len(rest))
    n_train = int(len(rest) * fractions[0])
    n_val = int(len(rest) * fractions[1])
    train = [rest[i] for i in perm[:n_train]]
    val = [rest[i] for i in perm[n_train : n_train + n_val]]
    remainder = [rest[i] for i in perm[n_train + n_val :]]
    return train, val, held + remainder


@dataclass(frozen=True)
class MinMaxScaler:
    """Per-feature min/max scaling with the target scaled separately.

    Fit on the training split only; validation and test data may legitimately
    map outside [0, 1] and are not clamped. Degenerate (constant) features
    scale to 0 and round-trip back to their constant value.
    """

    feature_min: np.ndarray
    feature_max: np.ndarray
    target_min: float
    target_max: float

    @classmethod
    def fit(cls, samples) -> "MinMaxScaler":
        if not samples:
            raise InputError("cannot fit a scaler on an empty sample list")
        stacked = np.concatenate([s.window for s in samples])
        targets = np.array([s.target for s in samples])
        return cls(
            feature_min=stacked.min(axis=0),
            feature_max=stacked.max(axis=0),
            target_min=float(targets.min()),
            target_max=float(targets.max()),
        )

    def _feature_range(self) -> np.ndarray:
        return self.feature_max - self.feature_min

    def scale_window(self, window: np.ndarray) -> np.ndarray:
        span = self._feature_range()
        safe = np.where(span > 0.0, span, 1.0)
        scaled = (window - self.feature_min) / safe
        return np.where(span > 0.0, scaled, 0.0)

    def unscale_window(self, scaled: np.ndarray) -> np.ndarray:
        return scaled * self._feature_range() + self.feature_min

    def scale_target(self, value):
        value = np.asarray(value, dtype=float)
        span = self.target_max - self.target_min
        if span <= 0.0:
            return np.zeros_like(value)
        return (value - self.target_min) / span

    def unscale_target(self, value):
        span = self.target_max - self.target_min
        return np.asarray(value, dtype=float) * span + self.target_min

    def transform(self, sample: SequenceSample) -> SequenceSample:
        return replace(
            sample,
            window=self.scale_window(sample.window),
            target=float(self.scale_target(sample.target)),
        )
