"""Batch command-line interface.

Commands: analyze, thermo, synth, features, train, tune, predict, evaluate,
massbalance. Every command that produces files writes them into the output
directory (``--out-dir``, or the PYROKIN_OUT environment variable, or the
working directory) together with a run manifest; all outputs except the
manifest's timestamp are byte-identical across reruns with equal inputs.

Exit codes: 0 success, 2 input problem, 3 numerical failure, 4 bad
configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .constants import KELVIN_OFFSET
from .errors import (
    BracketError,
    ConfigError,
    DomainError,
    InputError,
    ParseError,
    PyrokinError,
    RangeError,
    RankError,
    ResolutionError,
    StabilityError,
    TrainingError,
)
from .kinetics import KineticModelAssumption, run_analysis
from .manifest import build_manifest, write_manifest
from .preprocess import (
    DEFAULT_M0_AT_C,
    DEFAULT_SMOOTH_WINDOW,
    DEFAULT_STAGE_WINDOWS,
    compute_dtg,
    find_peaks,
)
from .report import (
    analysis_from_csv,
    analysis_to_csv,
    analysis_to_text,
    ea_plot_csv,
    ea_plot_series,
    history_to_csv,
    leaderboard_to_csv,
    metrics_to_csv,
    metrics_to_text,
    predictions_from_csv,
    predictions_to_csv,
    thermo_to_csv,
)
from .seqmodel import (
    MODEL1,
    MODEL2,
    SearchSpace,
    TrainConfig,
    build_features,
    evaluate,
    load_model,
    random_search,
    save_model,
    split_dataset,
    train,
    window_sequences,
)
from .seqmodel.lstm import predict_scaled
from .seqmodel.metrics import metrics_from_arrays
from .svgplot import emit_svg
from .synthkin import blend_models, model_to_json, simulate, suite_models
from .tga_io import (
    DATE_SEEDS,
    SPENT_COFFEE_GROUNDS,
    blend_spec,
    curve_to_csv,
    load_curve,
    resample_uniform,
    sidecar_to_spec,
    spec_to_sidecar,
)
from .thermo import thermo_profile

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_CONFIG = 4

_INPUT_ERRORS = (
    InputError,
    ParseError,
    DomainError,
    RangeError,
    ResolutionError,
    FileNotFoundError,
    IsADirectoryError,
)
_NUMERIC_ERRORS = (RankError, StabilityError, BracketError, TrainingError)


def vm_from_char(eta_pct: float) -> float:
    """Volatile-matter percent from char yield: the two must sum to 100."""
    if not (0.0 <= eta_pct <= 100.0):
        raise DomainError(f"char yield must lie in [0, 100], got {eta_pct}")
    return 100.0 - eta_pct


def check_mass_balance(vm_pct: float, eta_pct: float, tol: float = 0.005) -> bool:
    """True when a reported (VM, char) pair satisfies the sum identity.

    The tolerance defaults to half the last printed decimal of two-decimal
    percentage tables.
    """
    return abs(vm_pct - vm_from_char(eta_pct)) <= tol


def _out_dir(args) -> Path:
    root = args.out_dir or os.environ.get("PYROKIN_OUT") or "."
    path = Path(root)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write(path: Path, text: str):
    path.write_text(text, encoding="utf-8")


def _load_curve_file(path: Path):
    sidecar = path.with_suffix(".json")
    if not sidecar.exists():
        raise InputError(f"missing metadata sidecar {sidecar} for {path}")
    spec, beta = sidecar_to_spec(sidecar.read_text(encoding="utf-8"))
    return load_curve(path.read_text(encoding="utf-8"), spec, beta)


def _load_curves(paths):
    return [_load_curve_file(Path(p)) for p in paths]


def _parse_alpha_grid(text: str):
    try:
        start, stop, step = (float(tok) for tok in text.split(":"))
    except ValueError:
        raise InputError(
            f"bad --alpha-grid {text!r}; expected start:stop:step"
        ) from None
    if step <= 0.0 or stop < start:
        raise InputError(f"bad --alpha-grid {text!r}")
    n = int(round((stop - start) / step))
    return tuple(round(start + i * step, 10) for i in range(n + 1))


def _parse_float_list(text: str):
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise InputError(f"bad numeric list {text!r}") from None


def _parse_int_list(text: str):
    return tuple(int(v) for v in _parse_float_list(text))


def _parse_stage_windows(text: str):
    """Format: name:lo_c:hi_c[,name:lo_c:hi_c...]; returns kelvin windows."""
    windows = {}
    for part in text.split(","):
        try:
            name, lo, hi = part.split(":")
            windows[name.strip()] = (
                float(lo) + KELVIN_OFFSET,
                float(hi) + KELVIN_OFFSET,
            )
        except ValueError:
            raise InputError(f"bad --stage-windows entry {part!r}") from None
    return windows


def _curve_id(curve) -> str:
    return f"{curve.spec.sample_id}@{curve.heating_rate_beta:g}"


def _assemble_dataset(curves, mode, look_back, dt=None):
    rows_by_curve = {}
    for curve in curves:
        prepared = resample_uniform(curve, dt) if dt else curve
        rows_by_curve[_curve_id(prepared)] = build_features(prepared, mode)
    samples = window_sequences(rows_by_curve, look_back)
    if not samples:
        raise InputError(
            f"no training windows: curves are shorter than look_back={look_back}"
        )
    return samples


def _manifest(args, command, inputs, config: dict):
    out = _out_dir(args)
    seed = getattr(args, "seed", None)
    write_manifest(build_manifest(command, inputs, config, seed, __version__), out)
    return out


def cmd_analyze(args) -> int:
    curves = _load_curves(args.curves)
    if len(curves) < 3:
        raise InputError(f"need >=3 heating rates, got {len(curves)}")
    alpha_grid = _parse_alpha_grid(args.alpha_grid)
    table = run_analysis(
        curves,
        alpha_grid=alpha_grid,
        model=KineticModelAssumption(order=args.order),
        smooth_window=args.smooth_window,
        m0_at_c=args.m0_at,
        resample_dt=args.dt,
    )
    config = {
        "alpha_grid": list(alpha_grid),
        "smooth_window": args.smooth_window,
        "m0_at": args.m0_at,
        "dt": args.dt,
        "order": args.order,
    }
    out = _manifest(args, "analyze", args.curves, config)
    _write(out / "kinetics.csv", analysis_to_csv(table))
    if args.format in ("text", "svg"):
        _write(out / "kinetics.txt", analysis_to_text(table))
    _write(out / "ea_vs_alpha.csv", ea_plot_csv(table))
    if args.format == "svg":
        svg = emit_svg(
            ea_plot_series(table),
            {"title": f"Ea vs conversion: {table.sample_id}",
             "xlabel": "conversion", "ylabel": "Ea (kJ/mol)"},
        )
        _write(out / "ea_vs_alpha.svg", svg)
    for warning in table.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    for method, ea in table.ea_averages().items():
        print(f"{method}: average Ea = {ea / 1000.0:.2f} kJ/mol")
    return EXIT_OK


def cmd_thermo(args) -> int:
    table = analysis_from_csv(Path(args.kinetics).read_text(encoding="utf-8"))
    if args.tm is not None:
        t_m = args.tm
    elif args.curve:
        curve = resample_uniform(_load_curve_file(Path(args.curve)), args.dt)
        windows = (
            _parse_stage_windows(args.stage_windows)
            if args.stage_windows
            else DEFAULT_STAGE_WINDOWS
        )
        peaks = find_peaks(compute_dtg(curve, args.smooth_window), windows)
        stage_peaks = [p for p in peaks if p.stage_label == args.stage]
        if not stage_peaks:
            raise InputError(
                f"no {args.stage!r} peak found in {args.curve}; pass --tm explicitly"
            )
        t_m = stage_peaks[0].T_peak
    else:
        raise InputError("need --tm or --curve to fix the reference peak temperature")
    profile = thermo_profile(table, t_m)
    config = {"tm": t_m, "stage": args.stage, "kinetics": str(args.kinetics)}
    out = _manifest(args, "thermo", [args.kinetics], config)
    _write(out / "thermo.csv", thermo_to_csv(profile))
    if args.format == "svg":
        for quantity, pick, unit in (
            ("dH", lambda e: e.delta_h / 1000.0, "kJ/mol"),
            ("dG", lambda e: e.delta_g / 1000.0, "kJ/mol"),
            ("dS", lambda e: e.delta_s, "J/(mol K)"),
        ):
            series = []
            for method in ("friedman", "kas", "fwo"):
                ests = [e for e in profile if e.method == method]
                if ests:
                    series.append(
                        (method, [e.alpha for e in ests], [pick(e) for e in ests])
                    )
            svg = emit_svg(
                series,
                {"title": f"{quantity} vs conversion", "xlabel": "conversion",
                 "ylabel": f"{quantity} ({unit})"},
            )
            _write(out / f"thermo_{quantity.lower()}.svg", svg)
    print(f"thermo profile at Tm = {t_m:.2f} K: {len(profile)} estimates")
    return EXIT_OK


def cmd_synth(args) -> int:
    betas = _parse_float_list(args.beta)
    if not betas:
        raise InputError("need at least one heating rate")
    models = {name: (model, spec) for name, model, spec in suite_models(args.seed)}
    if args.preset == "blend":
        ds_model, _ = models["three-component-ds"]
        scg_model, _ = models["three-component-scg"]
        model = blend_models(ds_model, scg_model, args.frac)
        spec = blend_spec(DATE_SEEDS, SPENT_COFFEE_GROUNDS, args.frac)
        name = f"blend-{args.frac:g}"
    elif args.preset in models:
        model, spec = models[args.preset]
        name = args.preset
    else:
        raise ConfigError(
            f"unknown preset {args.preset!r}; choose from "
            f"{sorted(models) + ['blend']}"
        )
    config = {"preset": args.preset, "betas": list(betas), "dt": args.dt,
              "frac": args.frac}
    out = _manifest(args, "synth", [], config)
    for beta in betas:
        curve = simulate(model, beta, args.dt, spec=spec)
        stem = f"{name}_beta{beta:g}"
        _write(out / f"{stem}.csv", curve_to_csv(curve))
        _write(out / f"{stem}.json", spec_to_sidecar(spec, beta))
    _write(out / f"{name}_model.json", model_to_json(model))
    print(f"wrote {len(betas)} curves for preset {name}")
    return EXIT_OK


def cmd_features(args) -> int:
    curves = _load_curves(args.curves)
    header = "curve_id,ds_pct,scg_pct,heating_rate,temperature"
    if args.mode == MODEL2:
        header += ",cellulose_t,hemicellulose_t,lignin_t"
    header += ",mass_pct"
    lines = [header]
    for curve in curves:
        prepared = resample_uniform(curve, args.dt) if args.dt else curve
        cid = _curve_id(prepared)
        for row in build_features(prepared, args.mode):
            cells = [cid, f"{row.ds_pct!r}", f"{row.scg_pct!r}",
                     f"{row.heating_rate!r}", f"{row.temperature!r}"]
            if args.mode == MODEL2:
                cells += [f"{row.cellulose_t!r}", f"{row.hemicellulose_t!r}",
                          f"{row.lignin_t!r}"]
            cells.append(f"{row.mass_pct!r}")
            lines.append(",".join(cells))
    config = {"mode": args.mode, "dt": args.dt}
    out = _manifest(args, "features", args.curves, config)
    _write(out / "features.csv", "\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} feature rows")
    return EXIT_OK


def _train_config_from_args(args) -> TrainConfig:
    return TrainConfig(
        learning_rate=args.lr,
        batch_size=args.batch,
        epochs=args.epochs,
        dropout=args.dropout,
        hidden_units=args.hidden,
        lstm_layers=args.layers,
        activation=args.activation,
        optimizer=args.optimizer,
        look_back=args.look_back,
        early_stop_patience=args.patience,
        seed=args.seed,
    )


def cmd_train(args) -> int:
    curves = _load_curves(args.curves)
    if args.config:
        try:
            config = TrainConfig.from_dict(
                json.loads(Path(args.config).read_text(encoding="utf-8"))
            )
        except (json.JSONDecodeError, TypeError) as exc:
            raise ConfigError(f"bad config file {args.config}: {exc}") from None
    else:
        config = _train_config_from_args(args)
    samples = _assemble_dataset(curves, args.mode, config.look_back, args.dt)
    holdout = tuple(args.holdout.split(",")) if args.holdout else ()
    train_set, val_set, _ = split_dataset(samples, holdout_curves=holdout, seed=args.seed)
    model, history = train(train_set, val_set, config)
    out = _manifest(args, "train", args.curves,
                    {"mode": args.mode, "dt": args.dt, "holdout": list(holdout),
                     **config.to_dict()})
    _write(out / "model.json", save_model(model))
    _write(out / "history.csv", history_to_csv(history))
    best = min(rec.val_loss for rec in history)
    print(f"trained {len(history)} epochs; best val loss = {best:.6g}")
    return EXIT_OK


def cmd_tune(args) -> int:
    curves = _load_curves(args.curves)
    samples = _assemble_dataset(curves, args.mode, args.look_back, args.dt)
    holdout = tuple(args.holdout.split(",")) if args.holdout else ()
    train_set, val_set, _ = split_dataset(samples, holdout_curves=holdout, seed=args.seed)
    space = SearchSpace(
        learning_rate_bounds=tuple(_parse_float_list(args.lr_bounds)),
        batch_sizes=_parse_int_list(args.batch_choices),
        epochs_choices=_parse_int_list(args.epochs_choices),
        dropout_choices=_parse_float_list(args.dropout_choices),
        hidden_choices=_parse_int_list(args.hidden_choices),
        layer_choices=_parse_int_list(args.layers_choices),
        activations=tuple(args.activations.split(",")),
        optimizers=tuple(args.optimizers.split(",")),
        look_back_choices=(args.look_back,),
        early_stop_patience=args.patience,
    )
    best_config, leaderboard = random_search(
        space, args.trials, args.seed, train_set, val_set
    )
    out = _manifest(args, "tune", args.curves,
                    {"mode": args.mode, "trials": args.trials, "dt": args.dt,
                     "holdout": list(holdout), "space": str(space)})
    _write(out / "leaderboard.csv", leaderboard_to_csv(leaderboard))
    _write(out / "best_config.json",
           json.dumps(best_config.to_dict(), indent=2, sort_keys=True) + "\n")
    print(f"best trial: val loss = {leaderboard[0].val_loss:.6g}")
    return EXIT_OK


def cmd_predict(args) -> int:
    model = load_model(Path(args.model).read_text(encoding="utf-8"))
    curve = _load_curve_file(Path(args.curve))
    prepared = resample_uniform(curve, args.dt) if args.dt else curve
    rows = build_features(prepared, model.feature_mode)
    look_back = model.config.look_back
    if len(rows) <= look_back:
        raise InputError(
            f"curve has {len(rows)} rows; need more than look_back={look_back}"
        )
    samples = window_sequences({_curve_id(prepared): rows}, look_back)
    X = model.scaler.scale_window(np.stack([s.window for s in samples]))
    predicted = model.scaler.unscale_target(predict_scaled(model, X))
    actual = np.array([s.target for s in samples])
    temps = np.array([r.temperature for r in rows[look_back:]])
    out = _manifest(args, "predict", [args.model, args.curve],
                    {"dt": args.dt, "model": str(args.model)})
    _write(out / "predictions.csv", predictions_to_csv(temps, actual, predicted))
    svg = emit_svg(
        [("actual", temps.tolist(), actual.tolist()),
         ("predicted", temps.tolist(), predicted.tolist())],
        {"title": f"mass-loss prediction: {_curve_id(prepared)}",
         "xlabel": "temperature (C)", "ylabel": "mass (%)"},
    )
    _write(out / "predictions.svg", svg)
    print(metrics_to_text(metrics_from_arrays(actual, predicted)), end="")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if args.predictions:
        _, actual, predicted = predictions_from_csv(
            Path(args.predictions).read_text(encoding="utf-8")
        )
        metrics = metrics_from_arrays(actual, predicted)
        inputs = [args.predictions]
    elif args.model and args.curves:
        model = load_model(Path(args.model).read_text(encoding="utf-8"))
        curves = _load_curves(args.curves)
        samples = _assemble_dataset(
            curves, model.feature_mode, model.config.look_back, args.dt
        )
        metrics = evaluate(model, samples)
        inputs = [args.model, *args.curves]
    else:
        raise InputError("need --predictions, or --model plus curve files")
    out = _manifest(args, "evaluate", inputs, {"dt": args.dt})
    _write(out / "metrics.csv", metrics_to_csv(metrics))
    _write(out / "metrics.txt", metrics_to_text(metrics))
    print(metrics_to_text(metrics), end="")
    return EXIT_OK


def cmd_massbalance(args) -> int:
    vm = vm_from_char(args.char)
    print(f"char_yield_pct = {args.char:g}")
    print(f"vm_pct = {vm:g}")
    if args.vm is not None:
        if check_mass_balance(args.vm, args.char):
            print(f"mass balance: consistent ({args.vm:g} + {args.char:g} = 100)")
        else:
            total = args.vm + args.char
            print(
                f"mass balance: INCONSISTENT ({args.vm:g} + {args.char:g} "
                f"= {total:g}, expected 100)"
            )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pyrokin",
        description="TGA pyrolysis analysis: kinetics, thermodynamics, "
                    "synthetic ground truth, and LSTM mass-loss prediction.",
    )
    parser.add_argument("--version", action="version", version=f"pyrokin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master random seed")
    common.add_argument("--out-dir", default=None,
                        help="output directory (default: $PYROKIN_OUT or .)")
    common.add_argument("--format", choices=("csv", "text", "svg"), default="text",
                        help="csv: machine output only; text: plus aligned tables; "
                             "svg: plus charts")

    p = sub.add_parser("analyze", parents=[common],
                       help="isoconversional kinetics over >=3 heating rates")
    p.add_argument("curves", nargs="+", help="curve CSVs (each with a .json sidecar)")
    p.add_argument("--alpha-grid", default="0.1:0.7:0.1")
    p.add_argument("--smooth-window", type=int, default=DEFAULT_SMOOTH_WINDOW)
    p.add_argument("--m0-at", type=float, default=DEFAULT_M0_AT_C,
                   help="temperature (C) whose mass defines conversion zero")
    p.add_argument("--dt", type=float, default=0.5, help="resampling step (K)")
    p.add_argument("--order", type=float, default=1.0, help="assumed reaction order")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("thermo", parents=[common],
                       help="activation thermodynamics from a kinetics table")
    p.add_argument("--kinetics", required=True, help="kinetics.csv from analyze")
    p.add_argument("--tm", type=float, default=None, help="reference peak temperature (K)")
    p.add_argument("--curve", default=None,
                   help="curve CSV whose DTG peak supplies the reference temperature")
    p.add_argument("--stage", default="hemicellulose",
                   help="stage whose peak is the reference")
    p.add_argument("--stage-windows", default=None,
                   help="override stage windows: name:lo_c:hi_c[,...]")
    p.add_argument("--smooth-window", type=int, default=DEFAULT_SMOOTH_WINDOW)
    p.add_argument("--dt", type=float, default=0.5)
    p.set_defaults(func=cmd_thermo)

    p = sub.add_parser("synth", parents=[common],
                       help="generate synthetic ground-truth curves")
    p.add_argument("--preset", default="single-step",
                   help="single-step, three-component-ds, three-component-scg, or blend")
    p.add_argument("--beta", default="5,10,15,20", help="heating rates (K/min)")
    p.add_argument("--dt", type=float, default=0.5)
    p.add_argument("--frac", type=float, default=0.75,
                   help="first-parent fraction for the blend preset")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("features", parents=[common],
                       help="emit model feature rows for curves")
    p.add_argument("curves", nargs="+")
    p.add_argument("--mode", choices=(MODEL1, MODEL2), default=MODEL1)
    p.add_argument("--dt", type=float, default=None,
                   help="optional resampling step (K) before featurization")
    p.set_defaults(func=cmd_features)

    train_common = argparse.ArgumentParser(add_help=False)
    train_common.add_argument("--mode", choices=(MODEL1, MODEL2), default=MODEL2)
    train_common.add_argument("--dt", type=float, default=None)
    train_common.add_argument("--look-back", type=int, default=20)
    train_common.add_argument("--holdout", default=None,
                              help="comma-separated curve ids excluded from train/val")
    train_common.add_argument("--patience", type=int, default=5)

    p = sub.add_parser("train", parents=[common, train_common],
                       help="train the mass-loss predictor")
    p.add_argument("curves", nargs="+")
    p.add_argument("--config", default=None,
                   help="JSON training config (e.g. best_config.json from tune); "
                        "overrides the individual hyperparameter flags")
    p.add_argument("--lr", type=float, default=0.005)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--dropout", type=float, default=0.0)
    p.add_argument("--hidden", type=int, default=32)
    p.add_argument("--layers", type=int, default=1)
    p.add_argument("--activation", choices=("relu", "sigmoid", "tanh"), default="tanh")
    p.add_argument("--optimizer", choices=("adam", "sgd", "rmsprop"), default="adam")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tune", parents=[common, train_common],
                       help="random hyperparameter search")
    p.add_argument("curves", nargs="+")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--lr-bounds", default="0.0001,0.01")
    p.add_argument("--batch-choices", default="32,64")
    p.add_argument("--epochs-choices", default="10,20,30,40,50")
    p.add_argument("--dropout-choices", default="0.1,0.2,0.3,0.4,0.5")
    p.add_argument("--hidden-choices", default="64,96,128,160,192,224,256")
    p.add_argument("--layers-choices", default="1,2,3")
    p.add_argument("--activations", default="relu,sigmoid,tanh")
    p.add_argument("--optimizers", default="adam,sgd,rmsprop")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("predict", parents=[common],
                       help="predicted-vs-actual mass curve for one run")
    p.add_argument("curve")
    p.add_argument("--model", required=True, help="model.json checkpoint")
    p.add_argument("--dt", type=float, default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", parents=[common],
                       help="error metrics on held-out curves or a predictions CSV")
    p.add_argument("curves", nargs="*")
    p.add_argument("--model", default=None)
    p.add_argument("--predictions", default=None)
    p.add_argument("--dt", type=float, default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("massbalance", parents=[common],
                       help="volatile matter from char yield (sum identity)")
    p.add_argument("--char", type=float, required=True, help="char yield, percent")
    p.add_argument("--vm", type=float, default=None,
                   help="reported VM percent to check for consistency")
    p.set_defaults(func=cmd_massbalance)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _NUMERIC_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PyrokinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
