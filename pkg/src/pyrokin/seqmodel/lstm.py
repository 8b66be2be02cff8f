"""Hand-rolled stacked LSTM with a dense regression head.

The cell is the canonical formulation: input/forget/output gates through
sigmoids, a tanh candidate, and h = o * tanh(c). The configurable activation
from the tuning space sits on the dense output path (applied to the final
hidden state before the linear read-out); gate nonlinearities are never
substituted. Everything is float64 numpy so the analytic gradients can be
verified against central finite differences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from ..errors import ConfigError, InputError
from .features import MinMaxScaler, SequenceSample

if TYPE_CHECKING:
    from .training import TrainConfig

GATES = ("i", "f", "g", "o")

CHECKPOINT_VERSION = 1


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


ACTIVATIONS = {
    "relu": (lambda x: np.maximum(x, 0.0), lambda x: (x > 0.0).astype(float)),
    "sigmoid": (_sigmoid, lambda x: _sigmoid(x) * (1.0 - _sigmoid(x))),
    "tanh": (np.tanh, lambda x: 1.0 - np.tanh(x) ** 2),
}


def init_params(feature_count: int, config: "TrainConfig", rng: np.random.Generator):
    """Glorot-uniform weights, zero biases, forget-gate bias at 1."""
    hidden = config.hidden_units
    params: dict[str, np.ndarray] = {}
    for layer in range(config.lstm_layers):
        in_dim = feature_count if layer == 0 else hidden
        for gate in GATES:
            bound_w = np.sqrt(6.0 / (in_dim + hidden))
            bound_u = np.sqrt(6.0 / (hidden + hidden))
            params[f"l{layer}.W{gate}"] = rng.uniform(-bound_w, bound_w, (in_dim, hidden))
            params[f"l{layer}.U{gate}"] = rng.uniform(-bound_u, bound_u, (hidden, hidden))
            bias = np.zeros(hidden)
            if gate == "f":
                bias[:] = 1.0
            params[f"l{layer}.b{gate}"] = bias
    bound_d = np.sqrt(6.0 / (hidden + 1))
    params["dense.w"] = rng.uniform(-bound_d, bound_d, hidden)
    params["dense.b"] = np.zeros(1)
    return params


def forward_batch(params, X, config, training: bool = False,
                  rng: np.random.Generator | None = None, want_cache: bool = False):
    """Run a batch of windows through the network.

    ``X`` has shape (batch, look_back, features). Returns ``(pred, cache)``
    with ``pred`` of shape (batch,). Inverted dropout is applied between
    stacked layers when ``training`` is set and the config asks for it.
    """
    n, steps, _ = X.shape
    hidden = config.hidden_units
    use_dropout = training and config.dropout > 0.0 and config.lstm_layers > 1
    if use_dropout and rng is None:
        raise ConfigError("training-mode dropout requires an RNG")

    layers = []
    layer_input = X
    for layer in range(config.lstm_layers):
        Wi, Wf, Wg, Wo = (params[f"l{layer}.W{g}"] for g in GATES)
        Ui, Uf, Ug, Uo = (params[f"l{layer}.U{g}"] for g in GATES)
        bi, bf, bg, bo = (params[f"l{layer}.b{g}"] for g in GATES)
        i_s = np.empty((n, steps, hidden))
        f_s = np.empty((n, steps, hidden))
        g_s = np.empty((n, steps, hidden))
        o_s = np.empty((n, steps, hidden))
        c_s = np.empty((n, steps, hidden))
        tc_s = np.empty((n, steps, hidden))
        h_s = np.empty((n, steps, hidden))
        h = np.zeros((n, hidden))
        c = np.zeros((n, hidden))
        for t in range(steps):
            x_t = layer_input[:, t]
            i_t = _sigmoid(x_t @ Wi + h @ Ui + bi)
            f_t = _sigmoid(x_t @ Wf + h @ Uf + bf)
            g_t = np.tanh(x_t @ Wg + h @ Ug + bg)
            o_t = _sigmoid(x_t @ Wo + h @ Uo + bo)
            c = f_t * c + i_t * g_t
            tc = np.tanh(c)
            h = o_t * tc
            i_s[:, t], f_s[:, t], g_s[:, t], o_s[:, t] = i_t, f_t, g_t, o_t
            c_s[:, t], tc_s[:, t], h_s[:, t] = c, tc, h
        mask = None
        output = h_s
        if use_dropout and layer < config.lstm_layers - 1:
            keep = 1.0 - config.dropout
            mask = (rng.random((n, steps, hidden)) < keep) / keep
            output = h_s * mask
        layers.append(
            {"x": layer_input, "i": i_s, "f": f_s, "g": g_s, "o": o_s,
             "c": c_s, "tc": tc_s, "h": h_s, "mask": mask}
        )
        layer_input = output

    act, _ = ACTIVATIONS[config.activation]
    h_last = layers[-1]["h"][:, -1]
    z = act(h_last)
    pred = z @ params["dense.w"] + params["dense.b"][0]
    if not want_cache:
        return pred, None
    return pred, {"layers": layers, "h_last": h_last, "z": z, "config": config}


def backward_batch(params, cache, dpred):
    """Backpropagation through time for one batch.

    ``dpred`` is dLoss/dprediction of shape (batch,). Returns gradients
    keyed identically to ``params``.
    """
    config = cache["config"]
    layers = cache["layers"]
    hidden = config.hidden_units
    _, act_deriv = ACTIVATIONS[config.activation]

    grads = {k: np.zeros_like(v) for k, v in params.items()}
    grads["dense.w"] = cache["z"].T @ dpred
    grads["dense.b"] = np.array([dpred.sum()])
    dh_last = np.outer(dpred, params["dense.w"]) * act_deriv(cache["h_last"])

    n, steps, _ = layers[0]["x"].shape
    d_output = None  # gradient wrt the (possibly dropped-out) output sequence
    for layer in reversed(range(config.lstm_layers)):
        Lc = layers[layer]
        if d_output is None:
            dH = np.zeros((n, steps, hidden))
            dH[:, -1] = dh_last
        else:
            dH = d_output
            if Lc["mask"] is not None:
                dH = dH * Lc["mask"]
        Wi, Wf, Wg, Wo = (params[f"l{layer}.W{g}"] for g in GATES)
        Ui, Uf, Ug, Uo = (params[f"l{layer}.U{g}"] for g in GATES)
        dWi, dWf, dWg, dWo = (grads[f"l{layer}.W{g}"] for g in GATES)
        dUi, dUf, dUg, dUo = (grads[f"l{layer}.U{g}"] for g in GATES)
        dbi, dbf, dbg, dbo = (grads[f"l{layer}.b{g}"] for g in GATES)
        dx_seq = np.zeros_like(Lc["x"])
        dh_rec = np.zeros((n, hidden))
        dc_rec = np.zeros((n, hidden))
        for t in reversed(range(steps)):
            i_t, f_t, g_t, o_t = Lc["i"][:, t], Lc["f"][:, t], Lc["g"][:, t], Lc["o"][:, t]
            tc = Lc["tc"][:, t]
            dh = dH[:, t] + dh_rec
            dc = dh * o_t * (1.0 - tc**2) + dc_rec
            c_prev = Lc["c"][:, t - 1] if t > 0 else np.zeros((n, hidden))
            h_prev = Lc["h"][:, t - 1] if t > 0 else np.zeros((n, hidden))
            dpre_o = dh * tc * o_t * (1.0 - o_t)
            dpre_i = dc * g_t * i_t * (1.0 - i_t)
            dpre_g = dc * i_t * (1.0 - g_t**2)
            dpre_f = dc * c_prev * f_t * (1.0 - f_t)
            dc_rec = dc * f_t
            x_t = Lc["x"][:, t]
            dWi += x_t.T @ dpre_i
            dWf += x_t.T @ dpre_f
            dWg += x_t.T @ dpre_g
            dWo += x_t.T @ dpre_o
            dUi += h_prev.T @ dpre_i
            dUf += h_prev.T @ dpre_f
            dUg += h_prev.T @ dpre_g
            dUo += h_prev.T @ dpre_o
            dbi += dpre_i.sum(axis=0)
            dbf += dpre_f.sum(axis=0)
            dbg += dpre_g.sum(axis=0)
            dbo += dpre_o.sum(axis=0)
            dx_seq[:, t] = (
                dpre_i @ Wi.T + dpre_f @ Wf.T + dpre_g @ Wg.T + dpre_o @ Wo.T
            )
            dh_rec = dpre_i @ Ui.T + dpre_f @ Uf.T + dpre_g @ Ug.T + dpre_o @ Uo.T
        d_output = dx_seq
    return grads


@dataclass(frozen=True)
class LstmModel:
    """Trained network: weights, tuning config, scaler, and feature layout."""

    params: dict
    config: "TrainConfig"
    scaler: MinMaxScaler
    feature_mode: str
    feature_count: int


def forward(model: LstmModel, sample, training_mode: bool = False,
            rng: np.random.Generator | None = None) -> float:
    """Predict the scaled next-step mass for one already-scaled window.

    Deterministic whenever ``training_mode`` is off: dropout only exists
    during training.
    """
    window = sample.window if isinstance(sample, SequenceSample) else np.asarray(sample)
    if window.ndim != 2:
        raise InputError("sample window must be a 2-D array (look_back, features)")
    if window.shape[0] != model.config.look_back:
        raise InputError(
            f"window length {window.shape[0]} != configured look-back "
            f"{model.config.look_back}"
        )
    pred, _ = forward_batch(
        model.params, window[None, :, :], model.config,
        training=training_mode, rng=rng,
    )
    return float(pred[0])


def predict_scaled(model: LstmModel, X: np.ndarray, chunk: int = 512) -> np.ndarray:
    """Inference over a stack of scaled windows, chunked to bound memory."""
    preds = []
    for start in range(0, len(X), chunk):
        p, _ = forward_batch(model.params, X[start : start + chunk], model.config)
        preds.append(p)
    return np.concatenate(preds) if preds else np.empty(0)


def save_model(model: LstmModel) -> str:
    """Checkpoint as a self-describing JSON document.

    Weights are nested row-major lists keyed ``l<k>.W<g>`` (input-to-gate,
    shape (in_dim, hidden)), ``l<k>.U<g>`` (recurrent, (hidden, hidden)),
    ``l<k>.b<g>`` ((hidden,)) for gates g in i/f/g/o, plus ``dense.w``
    ((hidden,)) and ``dense.b`` ((1,)). Layer 0 input dim is the feature
    count; deeper layers take the hidden size.
    """
    doc = {
        "format_version": CHECKPOINT_VERSION,
        "feature_mode": model.feature_mode,
        "feature_count": model.feature_count,
        "config": model.config.to_dict(),
        "scaler": {
            "feature_min": model.scaler.feature_min.tolist(),
            "feature_max": model.scaler.feature_max.tolist(),
            "target_min": model.scaler.target_min,
            "target_max": model.scaler.target_max,
        },
        "weights": {k: v.tolist() for k, v in sorted(model.params.items())},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_model(text: str) -> LstmModel:
    from .training import TrainConfig

    doc = json.loads(text)
    version = doc.get("format_version")
    if version != CHECKPOINT_VERSION:
        raise InputError(f"unsupported checkpoint version {version!r}")
    scaler = MinMaxScaler(
        feature_min=np.array(doc["scaler"]["feature_min"], dtype=float),
        feature_max=np.array(doc["scaler"]["feature_max"], dtype=float),
        target_min=float(doc["scaler"]["target_min"]),
        target_max=float(doc["scaler"]["target_max"]),
    )
    params = {k: np.array(v, dtype=float) for k, v in doc["weights"].items()}
    return LstmModel(
        params=params,
        config=TrainConfig.from_dict(doc["config"]),
        scaler=scaler,
        feature_mode=doc["feature_mode"],
        feature_count=int(doc["feature_count"]),
    )
