"""Conversion curves, DTG derivatives, and decomposition-stage peak detection.

Operates on uniformly resampled TGA curves. Conversion is defined against a
pair of mass bounds (m0, mf); by default m0 is the mass remaining once the
moisture stage has finished (160 C) and mf is the final mass, so the
conversion axis indexes the devolatilization zone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import KELVIN_OFFSET
from .errors import DomainError, InputError, RangeError, ResolutionError
from .tga_io import TgaCurve

DEFAULT_SMOOTH_WINDOW = 9
DEFAULT_M0_AT_C = 160.0
DEFAULT_ALPHA_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7)
PEAK_THRESHOLD_FRAC = 0.05

# Conventional lignocellulosic decomposition stages, in kelvin. The lignin
# stage intentionally spans the whole active range; lignin devolatilizes
# slowly without a sharp peak of its own.
DEFAULT_STAGE_WINDOWS = {
    "moisture": (0.0, 160.0 + KELVIN_OFFSET),
    "hemicellulose": (225.0 + KELVIN_OFFSET, 325.0 + KELVIN_OFFSET),
    "cellulose": (315.0 + KELVIN_OFFSET, 405.0 + KELVIN_OFFSET),
    "lignin": (160.0 + KELVIN_OFFSET, 900.0 + KELVIN_OFFSET),
}


@dataclass(frozen=True)
class AlphaCurve:
    """Conversion and conversion rate against temperature for one run."""

    parent: TgaCurve
    temperature_k: np.ndarray
    alpha: np.ndarray
    dalpha_dT: np.ndarray
    m0: float
    mf: float

    @property
    def heating_rate_beta(self) -> float:
        return self.parent.heating_rate_beta

    def alpha_range(self) -> tuple[float, float]:
        return float(self.alpha[0]), float(self.alpha[-1])


@dataclass(frozen=True)
class DtgPeak:
    """Location of a stage's maximum mass-loss rate."""

    stage_label: str
    T_peak: float  # K
    peak_rate: float  # |dm/dT| maximum, 1/K
    window: tuple[float, float]  # K


def _require_uniform(curve: TgaCurve) -> float:
    if not curve.is_uniform_grid():
        raise InputError("curve must be resampled to a uniform temperature grid first")
    return float(curve.temperature_k[1] - curve.temperature_k[0])


def _moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """Centered box average; the window shrinks near the edges."""
    if window == 1:
        return values
    half = window // 2
    csum = np.concatenate(([0.0], np.cumsum(values)))
    idx = np.arange(len(values))
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, len(values))
    return (csum[hi] - csum[lo]) / (hi - lo)


def compute_dtg(curve: TgaCurve, smooth_window: int = DEFAULT_SMOOTH_WINDOW):
    """Differentiate mass against temperature on a uniform grid.

    The mass series is box-smoothed (width ``smooth_window`` points, odd),
    then differentiated with centered differences; the two endpoints use
    one-sided differences. Returns ``(temperature_k, dm_dT)``.
    """
    step = _require_uniform(curve)
    n = curve.n_points
    if smooth_window < 1 or smooth_window % 2 == 0:
        raise DomainError(f"smooth_window must be an odd count >= 1, got {smooth_window}")
    if smooth_window >= max(2, n // 4):
        raise ResolutionError(
            f"smooth_window {smooth_window} too wide for a {n}-point curve"
        )
    smoothed = _moving_average(curve.mass_fraction, smooth_window)
    deriv = np.empty(n)
    deriv[1:-1] = (smoothed[2:] - smoothed[:-2]) / (2.0 * step)
    deriv[0] = (smoothed[1] - smoothed[0]) / step
    deriv[-1] = (smoothed[-1] - smoothed[-2]) / step
    return curve.temperature_k.copy(), deriv


def mass_at_temperature(curve: TgaCurve, temperature_k: float) -> float:
    """Linearly interpolated mass fraction; clamps outside the curve range."""
    return float(np.interp(temperature_k, curve.temperature_k, curve.mass_fraction))


def default_mass_bounds(curve: TgaCurve, m0_at_c: float = DEFAULT_M0_AT_C):
    """(m0, mf) = (mass once moisture is gone, final mass)."""
    return mass_at_temperature(curve, m0_at_c + KELVIN_OFFSET), float(curve.mass_fraction[-1])


def compute_alpha(curve: TgaCurve, m0: float, mf: float,
                  smooth_window: int = DEFAULT_SMOOTH_WINDOW) -> AlphaCurve:
    """Conversion curve alpha(T) = (m0 - m)/(m0 - mf), monotone-enforced.

    Pointwise conversion is clipped to [0, 1] and made non-decreasing with a
    running maximum (instrument noise can make raw conversion dip). The
    conversion rate column comes from the smoothed DTG derivative.
    """
    if m0 <= mf:
        raise DomainError(f"m0 must exceed mf, got m0={m0}, mf={mf}")
    lo = float(curve.mass_fraction.min())
    hi = float(curve.mass_fraction.max())
    if not (lo - 1e-9 <= mf < m0 <= hi + 1e-9):
        raise DomainError(
            f"mass bounds ({m0}, {mf}) outside observed mass range [{lo}, {hi}]"
        )
    _, dm_dT = compute_dtg(curve, smooth_window)
    raw = (m0 - curve.mass_fraction) / (m0 - mf)
    alpha = np.maximum.accumulate(np.clip(raw, 0.0, 1.0))
    return AlphaCurve(
        parent=curve,
        temperature_k=curve.temperature_k.copy(),
        alpha=alpha,
        dalpha_dT=-dm_dT / (m0 - mf),
        m0=m0,
        mf=mf,
    )


def temperature_at_alpha(alpha_curve: AlphaCurve, alpha: float) -> float:
    """Invert the monotone conversion curve at one conversion level.

    Uses the earliest crossing when the curve has flat segments, which keeps
    the result single-valued and deterministic.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    series = alpha_curve.alpha
    a_lo, a_hi = alpha_curve.alpha_range()
    if alpha < series[0] or alpha > a_hi:
        raise RangeError(
            f"alpha={alpha} outside achieved range [{a_lo:.6g}, {a_hi:.6g}]"
        )
    idx = int(np.searchsorted(series, alpha, side="left"))
    if series[idx] == alpha:
        return float(alpha_curve.temperature_k[idx])
    T = alpha_curve.temperature_k
    frac = (alpha - series[idx - 1]) / (series[idx] - series[idx - 1])
    return float(T[idx - 1] + frac * (T[idx] - T[idx - 1]))


def rate_at_temperature(alpha_curve: AlphaCurve, temperature_k: float) -> float:
    """Conversion rate dalpha/dT interpolated at a temperature."""
    return float(
        np.interp(temperature_k, alpha_curve.temperature_k, alpha_curve.dalpha_dT)
    )


def find_peaks(dtg, windows=None, threshold_frac: float = PEAK_THRESHOLD_FRAC):
    """Per stage window, the temperature of maximum mass-loss rate.

    ``dtg`` is the ``(temperature_k, dm_dT)`` pair from compute_dtg. A window
    only yields a peak when its maximum |dm/dT| reaches ``threshold_frac`` of
    the global maximum, so stages masked at high heating rates simply drop
    out of the result. Absence of a peak is a valid outcome, not an error.
    """
    temperature_k, dm_dT = dtg
    if len(temperature_k) == 0:
        return []
    if windows is None:
        windows = DEFAULT_STAGE_WINDOWS
    magnitude = np.abs(dm_dT)
    global_max = float(magnitude.max())
    if global_max <= 0.0:
        return []
    peaks = []
    for label, (t_lo, t_hi) in windows.items():
        mask = (temperature_k >= t_lo) & (temperature_k <= t_hi)
        if not mask.any():
            continue
        local = np.where(mask, magnitude, -np.inf)
        k = int(np.argmax(local))
        if magnitude[k] < threshold_frac * global_max or magnitude[k] <= 0.0:
            continue
        peaks.append(
            DtgPeak(
                stage_label=label,
                T_peak=float(temperature_k[k]),
                peak_rate=float(magnitude[k]),
                window=(t_lo, t_hi),
            )
        )
    peaks.sort(key=lambda p: (p.T_peak, p.stage_label))
    return peaks
