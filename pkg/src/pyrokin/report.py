"""Serialization of analysis results: machine CSV and aligned text tables."""

from __future__ import annotations

import numpy as np

from .errors import InputError, ParseError
from .kinetics import METHODS, AnalysisTable, KineticEstimate
from .seqmodel.metrics import EvalMetrics

ANALYSIS_CSV_HEADER = "alpha,method,ea_kj_mol,a_per_s,r_squared"
THERMO_CSV_HEADER = "alpha,method,quantity,value"
HISTORY_CSV_HEADER = "epoch,train_loss,val_loss"
LEADERBOARD_CSV_HEADER = (
    "rank,trial,val_loss,learning_rate,batch_size,epochs,dropout,"
    "hidden_units,lstm_layers,activation,optimizer,look_back,seed"
)
PREDICTIONS_CSV_HEADER = "temperature_c,actual_mass_pct,predicted_mass_pct"
METRICS_CSV_HEADER = "mae,mse,rmse,r_squared"

_METHOD_LABELS = {"friedman": "Friedman", "kas": "KAS", "fwo": "FWO"}


def analysis_to_csv(table: AnalysisTable) -> str:
    lines = [ANALYSIS_CSV_HEADER]
    for est in table.estimates:
        lines.append(
            f"{est.alpha!r},{est.method},{est.ea / 1000.0!r},{est.a!r},{est.r_squared!r}"
        )
    return "\n".join(lines) + "\n"


def analysis_from_csv(text: str) -> AnalysisTable:
    """Rebuild a (partial) analysis table from its machine CSV form.

    Regression internals are not stored in the CSV, so slope/intercept come
    back as NaN; averages and downstream thermodynamics are unaffected.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty analysis CSV")
    if lines[0].strip() != ANALYSIS_CSV_HEADER:
        raise ParseError(f"unexpected header {lines[0]!r}", line=1)
    estimates = []
    for no, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 5:
            raise ParseError(f"expected 5 columns, got {len(parts)}", line=no)
        try:
            estimates.append(
                KineticEstimate(
                    method=parts[1],
                    alpha=float(parts[0]),
                    ea=float(parts[2]) * 1000.0,
                    a=float(parts[3]),
                    r_squared=float(parts[4]),
                    slope=float("nan"),
                    intercept=float("nan"),
                )
            )
        except ValueError as exc:
            raise ParseError(str(exc), line=no) from None
    alphas = tuple(dict.fromkeys(e.alpha for e in estimates))
    return AnalysisTable(
        sample_id="", betas=(), estimates=tuple(estimates), included_alphas=alphas
    )


def analysis_to_text(table: AnalysisTable) -> str:
    """Aligned comparison table: one block of Ea/R^2/A per method, plus the
    per-method Ea averages on the final row."""
    header_top = f"{'':>6}"
    header_sub = f"{'alpha':>6}"
    for method in METHODS:
        label = _METHOD_LABELS[method]
        header_top += f" | {label + ' model':^34}"
        header_sub += f" | {'Ea(kJ/mol)':>10} {'R^2':>8} {'A(1/s)':>12}"
    rows = [header_top, header_sub, "-" * len(header_sub)]
    for alpha in table.included_alphas:
        row = f"{alpha:>6.2f}"
        for method in METHODS:
            match = [e for e in table.by_method(method) if e.alpha == alpha]
            if match:
                est = match[0]
                row += f" | {est.ea / 1000.0:>10.2f} {est.r_squared:>8.4f} {est.a:>12.3e}"
            else:
                row += f" | {'-':>10} {'-':>8} {'-':>12}"
        rows.append(row)
    averages = table.ea_averages()
    row = f"{'Avg':>6}"
    for method in METHODS:
        if method in averages:
            row += f" | {averages[method] / 1000.0:>10.2f} {'-':>8} {'-':>12}"
        else:
            row += f" | {'-':>10} {'-':>8} {'-':>12}"
    rows.append("-" * len(header_sub))
    rows.append(row)
    for warning in table.warnings:
        rows.append(f"note: {warning}")
    return "\n".join(rows) + "\n"


def ea_plot_series(table: AnalysisTable):
    """Per-method (alpha, Ea kJ/mol) series for the Ea-vs-conversion chart."""
    series = []
    for method in METHODS:
        ests = table.by_method(method)
        if not ests:
            continue
        xs = [e.alpha for e in ests]
        ys = [e.ea / 1000.0 for e in ests]
        series.append((_METHOD_LABELS[method], xs, ys))
    return series


def ea_plot_csv(table: AnalysisTable) -> str:
    lines = ["alpha,method,ea_kj_mol"]
    for est in table.estimates:
        lines.append(f"{est.alpha!r},{est.method},{est.ea / 1000.0!r}")
    return "\n".join(lines) + "\n"


def thermo_to_csv(profile) -> str:
    """Three rows (dH, dG, dS) per thermodynamic estimate, in kJ-based units."""
    lines = [THERMO_CSV_HEADER]
    for est in profile:
        lines.append(f"{est.alpha!r},{est.method},dH,{est.delta_h / 1000.0!r}")
        lines.append(f"{est.alpha!r},{est.method},dG,{est.delta_g / 1000.0!r}")
        lines.append(f"{est.alpha!r},{est.method},dS,{est.delta_s!r}")
    return "\n".join(lines) + "\n"


def history_to_csv(history) -> str:
    lines = [HISTORY_CSV_HEADER]
    for rec in history:
        lines.append(f"{rec.epoch},{rec.train_loss!r},{rec.val_loss!r}")
    return "\n".join(lines) + "\n"


def leaderboard_to_csv(leaderboard) -> str:
    lines = [LEADERBOARD_CSV_HEADER]
    for rank, result in enumerate(leaderboard, start=1):
        c = result.config
        lines.append(
            f"{rank},{result.trial},{result.val_loss!r},{c.learning_rate!r},"
            f"{c.batch_size},{c.epochs},{c.dropout!r},{c.hidden_units},"
            f"{c.lstm_layers},{c.activation},{c.optimizer},{c.look_back},{c.seed}"
        )
    return "\n".join(lines) + "\n"


def predictions_to_csv(temperatures_c, actual_pct, predicted_pct) -> str:
    lines = [PREDICTIONS_CSV_HEADER]
    for T, a, p in zip(temperatures_c, actual_pct, predicted_pct):
        lines.append(f"{float(T)!r},{float(a)!r},{float(p)!r}")
    return "\n".join(lines) + "\n"


def predictions_from_csv(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty predictions CSV")
    if lines[0].strip() != PREDICTIONS_CSV_HEADER:
        raise ParseError(f"unexpected header {lines[0]!r}", line=1)
    temps, actual, predicted = [], [], []
    for no, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(f"expected 3 columns, got {len(parts)}", line=no)
        try:
            temps.append(float(parts[0]))
            actual.append(float(parts[1]))
            predicted.append(float(parts[2]))
        except ValueError as exc:
            raise ParseError(str(exc), line=no) from None
    return np.array(temps), np.array(actual), np.array(predicted)


def metrics_to_csv(metrics: EvalMetrics) -> str:
    return (
        METRICS_CSV_HEADER + "\n"
        f"{metrics.mae!r},{metrics.mse!r},{metrics.rmse!r},{metrics.r_squared!r}\n"
    )


def metrics_to_text(metrics: EvalMetrics) -> str:
    return (
        f"MAE  = {metrics.mae:.4f}\n"
        f"MSE  = {metrics.mse:.4f}\n"
        f"RMSE = {metrics.rmse:.4f}\n"
        f"R^2  = {metrics.r_squared:.4f}\n"
    )
