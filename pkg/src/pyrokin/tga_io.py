"""TGA curve data model, CSV/JSON ingestion, resampling, and blend composition.

Internal units are kelvin, seconds, and mass fraction of the initial sample
mass. File formats use instrument-friendly units (degrees Celsius, mass
percent, K/min) and are converted on the way in and out.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import KELVIN_OFFSET
from .errors import DomainError, InputError, ParseError, ResolutionError

CSV_HEADER_3COL = "time_s,temperature_c,mass_pct"
CSV_HEADER_2COL = "temperature_c,mass_pct"

MIN_ROWS = 10


@dataclass(frozen=True)
class SampleSpec:
    """Identity and composition of a feedstock or a feedstock blend.

    Fibre percentages are on a dry-mass basis. ``ds_fraction`` and
    ``scg_fraction`` describe the blend ratio of the two parent feedstocks
    and must sum to one.
    """

    sample_id: str
    ds_fraction: float
    scg_fraction: float
    cellulose_pct: float
    hemicellulose_pct: float
    lignin_pct: float
    ash_pct: float | None = None
    vm_pct: float | None = None
    fc_pct: float | None = None

    def __post_init__(self):
        if abs(self.ds_fraction + self.scg_fraction - 1.0) > 1e-9:
            raise DomainError(
                f"ds_fraction + scg_fraction must equal 1, got "
                f"{self.ds_fraction} + {self.scg_fraction}"
            )
        if not (0.0 <= self.ds_fraction <= 1.0):
            raise DomainError(f"ds_fraction outside [0, 1]: {self.ds_fraction}")
        fibre_sum = self.cellulose_pct + self.hemicellulose_pct + self.lignin_pct
        if fibre_sum > 100.0 + 1e-9:
            raise DomainError(f"fibre percentages sum to {fibre_sum} > 100")
        for name in ("cellulose_pct", "hemicellulose_pct", "lignin_pct"):
            if getattr(self, name) < 0.0:
                raise DomainError(f"{name} must be non-negative")


# Fibre compositions of the two pure feedstocks (dry-basis mass percent).
DATE_SEEDS = SampleSpec(
    sample_id="DS",
    ds_fraction=1.0,
    scg_fraction=0.0,
    cellulose_pct=22.5,
    hemicellulose_pct=48.2,
    lignin_pct=25.7,
    ash_pct=1.2,
    vm_pct=77.6,
    fc_pct=21.2,
)

SPENT_COFFEE_GROUNDS = SampleSpec(
    sample_id="SCG",
    ds_fraction=0.0,
    scg_fraction=1.0,
    cellulose_pct=32.0,
    hemicellulose_pct=35.0,
    lignin_pct=25.0,
    ash_pct=1.8,
    vm_pct=77.9,
    fc_pct=20.3,
)


@dataclass(frozen=True)
class TgaCurve:
    """One thermogravimetric run at a fixed heating rate.

    ``time_s``, ``temperature_k`` and ``mass_fraction`` are parallel arrays;
    time is strictly increasing, temperature non-decreasing, and mass is
    normalized so the first sample equals 1.
    """

    spec: SampleSpec
    heating_rate_beta: float  # K/min
    time_s: np.ndarray
    temperature_k: np.ndarray
    mass_fraction: np.ndarray

    def __post_init__(self):
        if self.heating_rate_beta <= 0.0:
            raise DomainError(f"heating rate must be positive, got {self.heating_rate_beta}")
        n = len(self.time_s)
        if not (len(self.temperature_k) == n == len(self.mass_fraction)):
            raise InputError("time, temperature, and mass series must have equal length")
        if n < 2:
            raise InputError("curve needs at least 2 points")
        dt = np.diff(self.time_s)
        if np.any(dt <= 0.0):
            row = int(np.argmax(dt <= 0.0)) + 1
            raise InputError(f"time not strictly increasing at row {row}")
        dT = np.diff(self.temperature_k)
        if np.any(dT < 0.0):
            row = int(np.argmax(dT < 0.0)) + 1
            raise InputError(f"temperature decreases at row {row}")
        if np.any(self.mass_fraction <= 0.0) or np.any(self.mass_fraction > 1.0 + 1e-12):
            raise InputError("mass fraction must lie in (0, 1]")
        if abs(self.mass_fraction[0] - 1.0) > 1e-12:
            raise InputError("first mass fraction must equal 1 after normalization")

    @property
    def n_points(self) -> int:
        return len(self.time_s)

    @property
    def temperature_span(self) -> float:
        return float(self.temperature_k[-1] - self.temperature_k[0])

    def is_uniform_grid(self, rel_tol: float = 1e-9) -> bool:
        steps = np.diff(self.temperature_k)
        if len(steps) == 0 or steps[0] <= 0.0:
            return False
        return bool(np.all(np.abs(steps - steps[0]) <= rel_tol * abs(steps[0])))


def _parse_float(token: str, line_no: int, column: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"cannot parse {column} value {token!r}", line=line_no) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite {column} value {token!r}", line=line_no)
    return value


def load_curve(data_stream, meta: SampleSpec, beta: float) -> TgaCurve:
    """Read a TGA CSV stream into a curve with normalized mass.

    Parameters
    ----------
    data_stream : str or text file object
        CSV text with header ``time_s,temperature_c,mass_pct`` or the
        two-column variant ``temperature_c,mass_pct`` (time is then
        reconstructed from the heating rate).
    meta : SampleSpec
        Sample identity attached to the curve.
    beta : float
        Heating rate in K/min.

    The first mass value becomes 1 after normalization; temperatures are
    converted from Celsius to kelvin.
    """
    if isinstance(data_stream, str):
        data_stream = io.StringIO(data_stream)
    lines = [ln.strip() for ln in data_stream]
    lines = [(i + 1, ln) for i, ln in enumerate(lines) if ln]
    if not lines:
        raise InputError("empty input: no CSV rows found")

    header_no, header = lines[0]
    header_cols = [c.strip().lower() for c in header.split(",")]
    if header_cols == CSV_HEADER_3COL.split(","):
        has_time = True
    elif header_cols == CSV_HEADER_2COL.split(","):
        has_time = False
    else:
        raise ParseError(
            f"unrecognized header {header!r}; expected "
            f"{CSV_HEADER_3COL!r} or {CSV_HEADER_2COL!r}",
            line=header_no,
        )

    rows = lines[1:]
    if len(rows) < MIN_ROWS:
        raise InputError(f"need at least {MIN_ROWS} data rows, got {len(rows)}")

    n_cols = 3 if has_time else 2
    time_s = np.empty(len(rows))
    temp_c = np.empty(len(rows))
    mass = np.empty(len(rows))
    for k, (line_no, line) in enumerate(rows):
        parts = line.split(",")
        if len(parts) != n_cols:
            raise ParseError(f"expected {n_cols} columns, got {len(parts)}", line=line_no)
        if has_time:
            time_s[k] = _parse_float(parts[0], line_no, "time_s")
            temp_c[k] = _parse_float(parts[1], line_no, "temperature_c")
            mass[k] = _parse_float(parts[2], line_no, "mass_pct")
        else:
            temp_c[k] = _parse_float(parts[0], line_no, "temperature_c")
            mass[k] = _parse_float(parts[1], line_no, "mass_pct")

    if not has_time:
        # beta in K/min; reconstruct elapsed seconds from the temperature ramp
        time_s = (temp_c - temp_c[0]) * 60.0 / beta

    if mass[0] <= 0.0:
        raise InputError("initial mass must be positive")
    return TgaCurve(
        spec=meta,
        heating_rate_beta=beta,
        time_s=time_s,
        temperature_k=temp_c + KELVIN_OFFSET,
        mass_fraction=mass / mass[0],
    )


def curve_to_csv(curve: TgaCurve) -> str:
    """Serialize a curve to the three-column CSV dialect (shortest round-trip floats)."""
    out = [CSV_HEADER_3COL]
    temp_c = (curve.temperature_k - KELVIN_OFFSET).tolist()
    mass_pct = (curve.mass_fraction * 100.0).tolist()
    for t, T, m in zip(curve.time_s.tolist(), temp_c, mass_pct):
        out.append(f"{t!r},{T!r},{m!r}")
    return "\n".join(out) + "\n"


def spec_to_sidecar(spec: SampleSpec, beta: float) -> str:
    """Serialize sample metadata plus heating rate to the JSON sidecar format."""
    doc = {
        "sample_id": spec.sample_id,
        "ds_fraction": spec.ds_fraction,
        "scg_fraction": spec.scg_fraction,
        "heating_rate_c_per_min": beta,
        "cellulose_pct": spec.cellulose_pct,
        "hemicellulose_pct": spec.hemicellulose_pct,
        "lignin_pct": spec.lignin_pct,
    }
    for key in ("ash_pct", "vm_pct", "fc_pct"):
        value = getattr(spec, key)
        if value is not None:
            doc[key] = value
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def sidecar_to_spec(text: str) -> tuple[SampleSpec, float]:
    """Parse a JSON sidecar; returns the sample spec and the heating rate (K/min)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid sidecar JSON: {exc}") from None
    required = (
        "sample_id",
        "ds_fraction",
        "scg_fraction",
        "heating_rate_c_per_min",
        "cellulose_pct",
        "hemicellulose_pct",
        "lignin_pct",
    )
    missing = [k for k in required if k not in doc]
    if missing:
        raise InputError(f"sidecar missing fields: {', '.join(missing)}")
    spec = SampleSpec(
        sample_id=doc["sample_id"],
        ds_fraction=float(doc["ds_fraction"]),
        scg_fraction=float(doc["scg_fraction"]),
        cellulose_pct=float(doc["cellulose_pct"]),
        hemicellulose_pct=float(doc["hemicellulose_pct"]),
        lignin_pct=float(doc["lignin_pct"]),
        ash_pct=doc.get("ash_pct"),
        vm_pct=doc.get("vm_pct"),
        fc_pct=doc.get("fc_pct"),
    )
    return spec, float(doc["heating_rate_c_per_min"])


def resample_uniform(curve: TgaCurve, dT: float) -> TgaCurve:
    """Resample a curve onto an arithmetic temperature grid of step ~dT.

    The step is adjusted to the nearest value that divides the temperature
    span evenly, so both endpoints are preserved exactly. Mass and time are
    linearly interpolated; a curve already on the requested grid passes
    through unchanged.
    """
    if dT <= 0.0:
        raise DomainError(f"dT must be positive, got {dT}")
    span = curve.temperature_span
    if span < 10.0 * dT:
        raise ResolutionError(
            f"dT={dT} too coarse: temperature span {span:.6g} K is below 10*dT"
        )
    n_intervals = max(1, round(span / dT))
    grid = np.linspace(curve.temperature_k[0], curve.temperature_k[-1], n_intervals + 1)
    if curve.n_points == len(grid) and np.array_equal(grid, curve.temperature_k):
        return curve

    # np.interp needs a strictly increasing abscissa; collapse any isothermal
    # plateaus to their last point so interpolation stays single-valued.
    T = curve.temperature_k
    keep = np.empty(len(T), dtype=bool)
    keep[:-1] = T[:-1] < T[1:]
    keep[-1] = True
    T_inc = T[keep]
    mass = np.interp(grid, T_inc, curve.mass_fraction[keep])
    time = np.interp(grid, T_inc, curve.time_s[keep])
    mass[0] = curve.mass_fraction[0]
    mass[-1] = curve.mass_fraction[-1]
    return replace(curve, time_s=time, temperature_k=grid, mass_fraction=mass)


def blend_spec(pure_a: SampleSpec, pure_b: SampleSpec, frac_a: float) -> SampleSpec:
    """Compose a blend from two pure feedstocks by mass fraction of the first.

    Fibre percentages (and proximate values, where both parents carry them)
    are fraction-weighted means of the parent values.
    """
    if not (0.0 <= frac_a <= 1.0):
        raise DomainError(f"frac_a outside [0, 1]: {frac_a}")
    for spec in (pure_a, pure_b):
        if spec.ds_fraction not in (0.0, 1.0):
            raise DomainError(f"{spec.sample_id!r} is not a pure feedstock")
    frac_b = 1.0 - frac_a

    def mix(a, b):
        if a is None or b is None:
            return None
        return frac_a * a + frac_b * b

    ds = mix(pure_a.ds_fraction, pure_b.ds_fraction)
    scg = mix(pure_a.scg_fraction, pure_b.scg_fraction)
    return SampleSpec(
        sample_id=f"ds{ds * 100:g}_scg{scg * 100:g}",
        ds_fraction=ds,
        scg_fraction=scg,
        cellulose_pct=mix(pure_a.cellulose_pct, pure_b.cellulose_pct),
        hemicellulose_pct=mix(pure_a.hemicellulose_pct, pure_b.hemicellulose_pct),
        lignin_pct=mix(pure_a.lignin_pct, pure_b.lignin_pct),
        ash_pct=mix(pure_a.ash_pct, pure_b.ash_pct),
        vm_pct=mix(pure_a.vm_pct, pure_b.vm_pct),
        fc_pct=mix(pure_a.fc_pct, pure_b.fc_pct),
    )
