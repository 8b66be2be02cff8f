"""Synthetic TGA generator: independent parallel Arrhenius pseudo-components.

Serves as the ground-truth oracle for the preprocessing, kinetics, and
sequence-model pipelines. Components react independently (no cross-component
interaction), which makes blend curves exactly additive and keeps the
analytic DTG-peak condition valid per component.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import GAS_CONSTANT
from .errors import BracketError, DomainError, StabilityError
from .tga_io import (
    DATE_SEEDS,
    SPENT_COFFEE_GROUNDS,
    SampleSpec,
    TgaCurve,
    blend_spec,
)

OVERSHOOT_TOL = 1e-6


@dataclass(frozen=True)
class PseudoComponent:
    """One volatilizable fraction with first-order-family Arrhenius kinetics."""

    fraction: float  # mass fraction of the whole sample
    ea: float  # activation energy, J/mol
    a: float  # pre-exponential factor, 1/s
    order: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.fraction <= 1.0):
            raise DomainError(f"component fraction outside (0, 1]: {self.fraction}")
        if self.ea <= 0.0 or self.a < 0.0 or self.order <= 0.0:
            raise DomainError("component requires ea > 0, a >= 0, order > 0")


@dataclass(frozen=True)
class PseudoComponentModel:
    """Parallel-reaction sample model: components plus inert residue."""

    components: tuple[PseudoComponent, ...]
    residue: float
    t_start: float  # K
    t_end: float  # K

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        total = self.residue + sum(c.fraction for c in self.components)
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"residue + component fractions must equal 1, got {total}")
        if not (0.0 <= self.residue < 1.0):
            raise DomainError(f"residue outside [0, 1): {self.residue}")
        if self.t_start >= self.t_end:
            raise DomainError("t_start must be below t_end")


def _rates(T, alphas, eas, a_over_beta, orders):
    """d(alpha_i)/dT at temperature T; depleted components are pinned at zero."""
    remaining = np.clip(1.0 - alphas, 0.0, None)
    return a_over_beta * np.exp(-eas / (GAS_CONSTANT * T)) * remaining**orders


def simulate(model: PseudoComponentModel, beta: float, dT: float,
             spec: SampleSpec | None = None) -> TgaCurve:
    """Integrate the component conversions with classical RK4 on a uniform grid.

    Parameters
    ----------
    model : PseudoComponentModel
        Kinetic ground truth to integrate.
    beta : float
        Heating rate in K/min (converted to K/s internally so the
        pre-exponential factors keep 1/s units).
    dT : float
        Grid step in K, at most 1 K. The step is adjusted to the nearest
        value dividing the span evenly.
    spec : SampleSpec, optional
        Metadata attached to the returned curve; a generic synthetic spec
        is used when omitted.

    The returned mass series is renormalized to its first point, so it
    starts at exactly 1 regardless of float rounding in the fractions.
    Raises StabilityError when any conversion overshoots 1 by more than
    1e-6 before clamping, which signals a too-coarse step.
    """
    if dT <= 0.0 or dT > 1.0:
        raise DomainError(f"dT must lie in (0, 1] K, got {dT}")
    if beta <= 0.0:
        raise DomainError(f"beta must be positive, got {beta}")
    beta_s = beta / 60.0

    n_steps = max(1, round((model.t_end - model.t_start) / dT))
    grid = np.linspace(model.t_start, model.t_end, n_steps + 1)
    h = (model.t_end - model.t_start) / n_steps

    eas = np.array([c.ea for c in model.components])
    a_over_beta = np.array([c.a for c in model.components]) / beta_s
    orders = np.array([c.order for c in model.components])
    fracs = np.array([c.fraction for c in model.components])

    alphas = np.zeros(len(model.components))
    mass = np.empty(len(grid))
    mass[0] = model.residue + fracs.sum()
    for k in range(n_steps):
        T = grid[k]
        k1 = _rates(T, alphas, eas, a_over_beta, orders)
        k2 = _rates(T + 0.5 * h, alphas + 0.5 * h * k1, eas, a_over_beta, orders)
        k3 = _rates(T + 0.5 * h, alphas + 0.5 * h * k2, eas, a_over_beta, orders)
        k4 = _rates(T + h, alphas + h * k3, eas, a_over_beta, orders)
        alphas = alphas + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        overshoot = alphas.max(initial=0.0) - 1.0
        if overshoot > OVERSHOOT_TOL:
            raise StabilityError(
                f"conversion overshoot {overshoot:.3g} at T={grid[k + 1]:.2f} K; "
                f"reduce dT below {dT}"
            )
        alphas = np.clip(alphas, 0.0, 1.0)
        # floor keeps complete burnout representable under the (0, 1] mass contract
        mass[k + 1] = max(model.residue + float(fracs @ (1.0 - alphas)), 1e-12)

    if spec is None:
        spec = SampleSpec(
            sample_id="synthetic",
            ds_fraction=1.0,
            scg_fraction=0.0,
            cellulose_pct=0.0,
            hemicellulose_pct=0.0,
            lignin_pct=0.0,
        )
    time_s = (grid - grid[0]) / beta_s
    return TgaCurve(
        spec=spec,
        heating_rate_beta=beta,
        time_s=time_s,
        temperature_k=grid,
        mass_fraction=mass / mass[0],
    )


def kissinger_peak(ea: float, a: float, beta: float) -> float:
    """Solve the first-order DTG-peak condition for the peak temperature.

    Finds the root of  ea*beta/(R*T^2) = a*exp(-ea/(R*T))  by bisection in
    (200 K, 2000 K), tightened to 1e-9 K so the defining equation's residual
    stays below 1e-9 relative. ``beta`` is in K/s here, matching the 1/s
    units of ``a``.
    """
    if ea <= 0.0 or a <= 0.0 or beta <= 0.0:
        raise DomainError("kissinger_peak requires positive ea, a, beta")

    def resid(T):
        return ea * beta / (GAS_CONSTANT * T * T) - a * math.exp(-ea / (GAS_CONSTANT * T))

    lo, hi = 200.0, 2000.0
    f_lo, f_hi = resid(lo), resid(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        raise BracketError(
            f"no sign change in (200 K, 2000 K) for ea={ea}, a={a}, beta={beta}"
        )
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        f_mid = resid(mid)
        if f_mid == 0.0:
            return mid
        if f_lo * f_mid < 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def blend_models(model_a: PseudoComponentModel, model_b: PseudoComponentModel,
                 frac_a: float) -> PseudoComponentModel:
    """Convex combination of two models: parallel reactions are additive."""
    if not (0.0 <= frac_a <= 1.0):
        raise DomainError(f"frac_a outside [0, 1]: {frac_a}")
    if (model_a.t_start, model_a.t_end) != (model_b.t_start, model_b.t_end):
        raise DomainError("blended models must share the temperature range")
    frac_b = 1.0 - frac_a
    components = []
    for frac, parent in ((frac_a, model_a), (frac_b, model_b)):
        if frac == 0.0:
            continue
        for c in parent.components:
            components.append(
                PseudoComponent(fraction=frac * c.fraction, ea=c.ea, a=c.a, order=c.order)
            )
    return PseudoComponentModel(
        components=tuple(components),
        residue=frac_a * model_a.residue + frac_b * model_b.residue,
        t_start=model_a.t_start,
        t_end=model_a.t_end,
    )


def model_to_json(model: PseudoComponentModel) -> str:
    doc = {
        "components": [
            {"fraction": c.fraction, "ea_j_mol": c.ea, "a_per_s": c.a, "order": c.order}
            for c in model.components
        ],
        "residue": model.residue,
        "t_start_k": model.t_start,
        "t_end_k": model.t_end,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def model_from_json(text: str) -> PseudoComponentModel:
    doc = json.loads(text)
    return PseudoComponentModel(
        components=tuple(
            PseudoComponent(
                fraction=c["fraction"], ea=c["ea_j_mol"], a=c["a_per_s"], order=c["order"]
            )
            for c in doc["components"]
        ),
        residue=doc["residue"],
        t_start=doc["t_start_k"],
        t_end=doc["t_end_k"],
    )


@dataclass(frozen=True)
class SyntheticFixture:
    """A named ground-truth model plus its simulated curves per heating rate."""

    name: str
    model: PseudoComponentModel
    spec: SampleSpec
    curves: dict[float, TgaCurve] = field(default_factory=dict)


# Base kinetic triplets chosen so the 10 K/min DTG peaks fall inside the
# conventional lignocellulosic stage windows (hemicellulose 225-325 C,
# cellulose 315-405 C, lignin broad and shallow).
_SINGLE_STEP = dict(ea=180e3, a=1e13)
_HEMI = dict(ea=150e3, a=1.75e12)
_CELL = dict(ea=200e3, a=3.9e14)
_LIGNIN = dict(ea=55e3, a=6.0e1)

STANDARD_BETAS = (5.0, 10.0, 15.0, 20.0)


def suite_models(seed: int, jitter: float = 0.0):
    """The deterministic suite's models: (name, model, spec) triples.

    Contains (a) a single-step first-order sample, (b) two three-component
    samples shaped like the pure feedstocks, and (c) convex blends of the
    two at fractions 0.75/0.5/0.25. ``jitter`` optionally perturbs the
    pre-exponential factors log-uniformly, deterministically per seed.
    """
    rng = np.random.default_rng(seed)

    def jittered(a):
        if jitter <= 0.0:
            return a
        return a * math.exp(rng.uniform(-jitter, jitter))

    t_lo, t_hi = 300.0, 900.0
    single = PseudoComponentModel(
        components=(PseudoComponent(fraction=1.0, **_SINGLE_STEP),),
        residue=0.0,
        t_start=t_lo,
        t_end=t_hi,
    )
    # Dyadic fractions keep the mass balance exact in floating point, which
    # the blend-additivity checks rely on.
    ds_like = PseudoComponentModel(
        components=(
            PseudoComponent(fraction=0.46875, ea=_HEMI["ea"], a=jittered(_HEMI["a"])),
            PseudoComponent(fraction=0.21875, ea=_CELL["ea"], a=jittered(_CELL["a"])),
            PseudoComponent(fraction=0.125, ea=_LIGNIN["ea"], a=jittered(_LIGNIN["a"])),
        ),
        residue=0.1875,
        t_start=t_lo,
        t_end=t_hi,
    )
    scg_like = PseudoComponentModel(
        components=(
            PseudoComponent(fraction=0.375, ea=_HEMI["ea"], a=jittered(_HEMI["a"] * 1.2)),
            PseudoComponent(fraction=0.3125, ea=_CELL["ea"], a=jittered(_CELL["a"] * 0.8)),
            PseudoComponent(fraction=0.125, ea=_LIGNIN["ea"], a=jittered(_LIGNIN["a"])),
        ),
        residue=0.1875,
        t_start=t_lo,
        t_end=t_hi,
    )

    triples = [
        ("single-step", single, DATE_SEEDS),
        ("three-component-ds", ds_like, DATE_SEEDS),
        ("three-component-scg", scg_like, SPENT_COFFEE_GROUNDS),
    ]
    for frac in (0.75, 0.5, 0.25):
        triples.append(
            (
                f"blend-{frac:g}",
                blend_models(ds_like, scg_like, frac),
                blend_spec(DATE_SEEDS, SPENT_COFFEE_GROUNDS, frac),
            )
        )
    return triples


def make_fixture_suite(seed: int, betas=STANDARD_BETAS, dT: float = 0.5,
                       jitter: float = 0.0) -> list[SyntheticFixture]:
    """Simulate the whole verification suite at the given heating rates.

    Identical seeds reproduce bitwise identical curves.
    """
    return [
        SyntheticFixture(
            name,
            model,
            spec,
            {beta: simulate(model, beta, dT, spec=spec) for beta in betas},
        )
        for name, model, spec in suite_models(seed, jitter)
    ]
