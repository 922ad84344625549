"""One-hidden-layer event-probability predictor.

    z1 = x @ W1 + b1,  a1 = tanh(z1),  z2 = a1 @ W2 + b2,  p = sigmoid(z2)

Inputs are row vectors (batch-major), so ``W1`` is (N*L, H) and ``W2`` is
(H, N).  The loss is per-sample binary cross-entropy summed over nodes,
averaged over the batch, plus ``lam/2 * (|W1|_F^2 + |W2|_F^2)``.
"""

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

LOG_CLAMP = 1e-12

_MAGIC = b"EEIBMANN"
_FORMAT_VERSION = 1


@dataclass(eq=False)
class PredictorModel:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    @property
    def dims(self):
        return self.w1.shape[0], self.w1.shape[1], self.w2.shape[1]

    def copy(self):
        return PredictorModel(self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy())

    def params(self):
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2}

    def is_finite(self):
        return all(np.isfinite(p).all() for p in self.params().values())


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    l2_lambda: float = 1e-4
    epochs: int = 200
    batch_size: int = 0       # 0 (or >= |train|) means full batch
    hidden_units: int = 64
    seq_len: int = 8
    train_ratio: float = 0.8
    seed: int = 7

    def validate(self):
        from .errors import ConfigError

        if not self.learning_rate > 0:
            raise ConfigError("train.learning_rate", "must be > 0")
        if self.l2_lambda < 0:
            raise ConfigError("train.l2_lambda", "must be >= 0")
        if self.epochs < 1:
            raise ConfigError("train.epochs", "must be >= 1")
        if self.batch_size < 0:
            raise ConfigError("train.batch_size", "must be >= 0")
        if self.hidden_units < 1:
            raise ConfigError("train.hidden_units", "must be >= 1")
        if self.seq_len < 1:
            raise ConfigError("train.seq_len", "must be >= 1")
        if not 0.0 < self.train_ratio < 1.0:
            raise ConfigError("train.train_ratio", "must be in (0, 1)")
        return self


@dataclass
class EvalReport:
    p_true_per_node: np.ndarray
    p_pred_per_node: np.ndarray
    error_per_node: np.ndarray
    p_true_global: float
    p_pred_global: float
    rmse: float
    p_pred_min: float
    p_pred_max: float
    n_test: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "n_test": self.n_test,
            "p_true_global": self.p_true_global,
            "p_pred_global": self.p_pred_global,
            "p_pred_min": self.p_pred_min,
            "p_pred_max": self.p_pred_max,
            "rmse": self.rmse,
            "p_true_per_node": self.p_true_per_node.tolist(),
            "p_pred_per_node": self.p_pred_per_node.tolist(),
            "error_per_node": self.error_per_node.tolist(),
        }


def init_model(input_dim, hidden_dim, output_dim, seed):
    """Uniform fan-balanced (Glorot) weights, zero biases."""
    for name, d in (("input_dim", input_dim), ("hidden_dim", hidden_dim),
                    ("output_dim", output_dim)):
        if int(d) < 1:
            raise ValueError(f"{name} must be >= 1, got {d}")
    rng = np.random.default_rng(seed)
    s1 = np.sqrt(6.0 / (input_dim + hidden_dim))
    s2 = np.sqrt(6.0 / (hidden_dim + output_dim))
    w1 = rng.uniform(-s1, s1, size=(input_dim, hidden_dim))
    w2 = rng.uniform(-s2, s2, size=(hidden_dim, output_dim))
    return PredictorModel(w1, np.zeros(hidden_dim), w2, np.zeros(output_dim))


def _as_batch(model, x):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != model.w1.shape[0]:
        raise ValueError(f"input has {x.shape[-1]} features, model expects {model.w1.shape[0]}")
    return x, single


def _forward_cache(model, x):
    a1 = np.tanh(x @ model.w1 + model.b1)
    p = expit(a1 @ model.w2 + model.b2)
    return a1, p


def forward(model, x):
    """Per-node event probabilities for one input vector or a (B, N*L) batch."""
    x, single = _as_batch(model, x)
    _, p = _forward_cache(model, x)
    return p[0] if single else p


def _unpack(batch):
    if hasattr(batch, "inputs"):
        return np.asarray(batch.inputs, np.float64), np.asarray(batch.targets, np.float64)
    xs, ys = zip(*batch) if len(batch) else ((), ())
    return np.asarray(xs, np.float64), np.asarray(ys, np.float64)


def _weight_penalty(model, lam):
    return 0.5 * lam * (np.sum(model.w1 * model.w1) + np.sum(model.w2 * model.w2))


def _bce(p, y):
    pc = np.clip(p, LOG_CLAMP, 1.0 - LOG_CLAMP)
    return float(np.mean(np.sum(-y * np.log(pc) - (1.0 - y) * np.log1p(-pc), axis=1)))


def bce_loss(model, batch, lam):
    """Mean-over-batch BCE summed over nodes, plus the L2 weight penalty.

    ``batch`` is a Dataset or a sequence of (input, target) pairs.
    """
    x, y = _unpack(batch)
    if x.shape[0] == 0:
        raise ValueError("bce_loss needs a non-empty batch")
    x, _ = _as_batch(model, x)
    _, p = _forward_cache(model, x)
    return _bce(p, y) + float(_weight_penalty(model, lam))


def gradient(model, batch, lam):
    """Backprop gradients of ``bce_loss`` as a dict keyed like ``model.params()``.

    Uses dL/dz2 = (p - y) / B, the exact derivative everywhere the log clamp
    is inactive (|z2| < ~27.6).
    """
    x, y = _unpack(batch)
    if x.shape[0] == 0:
        raise ValueError("gradient needs a non-empty batch")
    x, _ = _as_batch(model, x)
    return _grad_arrays(model, x, y, lam)


def _grad_arrays(model, x, y, lam, cache=None):
    a1, p = _forward_cache(model, x) if cache is None else cache
    dz2 = (p - y) / x.shape[0]
    gw2 = a1.T @ dz2 + lam * model.w2
    gb2 = dz2.sum(axis=0)
    dz1 = (dz2 @ model.w2.T) * (1.0 - a1 * a1)
    gw1 = x.T @ dz1 + lam * model.w1
    gb1 = dz1.sum(axis=0)
    return {"w1": gw1, "b1": gb1, "w2": gw2, "b2": gb2}


def _step(model, g, lr):
    model.w1 -= lr * g["w1"]
    model.b1 -= lr * g["b1"]
    model.w2 -= lr * g["w2"]
    model.b2 -= lr * g["b2"]


def train(model, train_set, cfg):
    """Plain (mini-)batch gradient descent.  Returns ``(model, loss_history)``.

    The input model is not modified.  ``loss_history[e]`` is the full
    training-set loss after epoch ``e``.
    """
    x, y = _unpack(train_set)
    n_s = x.shape[0]
    if n_s == 0:
        raise ValueError("cannot train on an empty dataset")
    x, _ = _as_batch(model, x)
    model = model.copy()
    bs = n_s if cfg.batch_size <= 0 or cfg.batch_size >= n_s else cfg.batch_size
    rng = np.random.default_rng((cfg.seed, 1))
    lr, lam = cfg.learning_rate, cfg.l2_lambda
    history = []
    # full batch: the end-of-epoch forward pass doubles as the next epoch's cache
    cache = _forward_cache(model, x)
    for _ in range(cfg.epochs):
        if bs == n_s:
            g = _grad_arrays(model, x, y, lam, cache)
            _step(model, g, lr)
        else:
            order = rng.permutation(n_s)
            for k in range(0, n_s, bs):
                idx = order[k:k + bs]
                _step(model, _grad_arrays(model, x[idx], y[idx], lam), lr)
        cache = _forward_cache(model, x)
        history.append(_bce(cache[1], y) + float(_weight_penalty(model, lam)))
    if not model.is_finite():
        raise FloatingPointError("training diverged: non-finite weights")
    return model, history


def evaluate(model, test_set):
    x, y = _unpack(test_set)
    if x.shape[0] == 0:
        raise ValueError("cannot evaluate on an empty test set")
    p = forward(model, x)
    return report_from_predictions(p, y)


def report_from_predictions(p, y):
    """Build an EvalReport from a (S, N) prediction matrix and matching targets."""
    p = np.asarray(p, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    p_pred = p.mean(axis=0)
    p_true = y.mean(axis=0)
    err = p_pred - p_true
    frame_means = p.mean(axis=1)
    return EvalReport(
        p_true_per_node=p_true,
        p_pred_per_node=p_pred,
        error_per_node=err,
        p_true_global=float(p_true.mean()),
        p_pred_global=float(p_pred.mean()),
        rmse=float(np.sqrt(np.mean(err * err))),
        p_pred_min=float(frame_means.min()),
        p_pred_max=float(frame_means.max()),
        n_test=int(p.shape[0]),
    )


def save_model(model, path):
    """Binary model file.

    Layout (little-endian): 8-byte magic ``EEIBMANN``, uint32 version,
    three uint32 dims (input, hidden, output), then float64 blocks
    W1, b1, W2, b2 in row-major order.
    """
    i, h, o = model.dims
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<4I", _FORMAT_VERSION, i, h, o))
        for arr in (model.w1, model.b1, model.w2, model.b2):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_model(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:8] != _MAGIC:
        raise ValueError(f"{path}: not a predictor model file")
    version, i, h, o = struct.unpack("<4I", data[8:24])
    if version != _FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported model version {version}")
    sizes = [(i, h), (h,), (h, o), (o,)]
    expected = 24 + 8 * sum(int(np.prod(s)) for s in sizes)
    if len(data) != expected:
        raise ValueError(f"{path}: truncated or oversized model file")
    off, arrays = 24, []
    for shape in sizes:
        count = int(np.prod(shape))
        arrays.append(np.frombuffer(data, dtype="<f8", count=count, offset=off)
                      .astype(np.float64).reshape(shape))
        off += 8 * count
    return PredictorModel(*arrays)
