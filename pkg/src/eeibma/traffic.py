"""Correlated binary event traces and the supervised datasets built from them.

Random numbers come from numpy's PCG64 generator (``np.random.default_rng``)
seeded with a single integer.  ``generate_trace`` always draws in the same
order::

    start_u  = rng.random(T)                       # burst start test per frame
    block    = rng.integers(0, N - G + 1, size=T)  # burst block start node
    u        = rng.random((N, T))                  # Bernoulli draws
    flip_u   = rng.random((N, T))                  # bit-flip noise

so a seed fully determines the trace regardless of the kernel backend.
"""

import csv
from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import ConfigError


@dataclass(frozen=True)
class TrafficConfig:
    n_nodes: int = 20
    n_frames: int = 2000
    p_base: float = 0.1
    burst_rate: float = 0.05
    burst_prob: float = 0.6
    burst_duration: int = 5
    burst_group_size: int = 6
    flip_noise: float = 0.01
    seed: int = 42

    def validate(self):
        if self.n_nodes < 1:
            raise ConfigError("traffic.n_nodes", "must be >= 1")
        if self.n_frames < 1:
            raise ConfigError("traffic.n_frames", "must be >= 1")
        for name in ("p_base", "burst_rate", "burst_prob", "flip_noise"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"traffic.{name}", f"{value} outside [0, 1]")
        if self.p_base > self.burst_prob:
            raise ConfigError("traffic.burst_prob",
                              f"must be >= p_base ({self.burst_prob} < {self.p_base})")
        if self.burst_duration < 1:
            raise ConfigError("traffic.burst_duration", "must be >= 1")
        if not 1 <= self.burst_group_size <= self.n_nodes:
            raise ConfigError("traffic.burst_group_size",
                              f"{self.burst_group_size} not in [1, n_nodes={self.n_nodes}]")
        return self


@dataclass(frozen=True, eq=False)
class EventTrace:
    """N x T event bitmap.  ``burst_mask`` marks burst-elevated (node, frame) cells."""

    bits: np.ndarray
    config: TrafficConfig
    burst_mask: np.ndarray

    @property
    def n_nodes(self):
        return self.bits.shape[0]

    @property
    def n_frames(self):
        return self.bits.shape[1]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Stacked samples: ``inputs`` is (S, N*L), ``targets`` is (S, N).

    Row k of ``inputs`` holds frames t-L .. t-1 frame-major, node-minor:
    ``[Y[0, t-L], ..., Y[N-1, t-L], Y[0, t-L+1], ...]``.
    """

    inputs: np.ndarray
    targets: np.ndarray
    seq_len: int
    n_nodes: int

    def __len__(self):
        return self.inputs.shape[0]

    @property
    def samples(self):
        return list(zip(self.inputs, self.targets))

    def subset(self, idx):
        return Dataset(self.inputs[idx], self.targets[idx], self.seq_len, self.n_nodes)


def generate_trace(config, backend=None):
    config.validate()
    n, t_max = config.n_nodes, config.n_frames
    g = config.burst_group_size
    rng = np.random.default_rng(config.seed)
    start_u = rng.random(t_max)
    block = rng.integers(0, n - g + 1, size=t_max)
    u = rng.random((n, t_max))
    flip_u = rng.random((n, t_max))

    mask = _accel.burst_mask(start_u, block, config.burst_rate, config.burst_duration,
                             g, n, backend=backend)
    bits = _accel.draw_bits(u, flip_u, mask, config.p_base, config.burst_prob,
                            config.flip_noise, backend=backend)
    return EventTrace(bits=bits, config=config, burst_mask=mask)


def build_dataset(trace, seq_len):
    bits = np.asarray(trace.bits)
    n, t_max = bits.shape
    if seq_len < 1:
        raise ValueError(f"seq_len must be >= 1, got {seq_len}")
    if seq_len >= t_max:
        raise ValueError(f"seq_len ({seq_len}) must be < number of frames ({t_max})")
    frames = bits.T.astype(np.float64)          # (T, N)
    windows = np.lib.stride_tricks.sliding_window_view(frames, seq_len, axis=0)
    # windows: (T-L+1, N, L); drop the last window (no next frame to predict)
    inputs = windows[:-1].transpose(0, 2, 1).reshape(t_max - seq_len, n * seq_len)
    targets = frames[seq_len:]
    return Dataset(np.ascontiguousarray(inputs), np.ascontiguousarray(targets), seq_len, n)


def split_dataset(dataset, train_ratio, seed):
    if not 0.0 < train_ratio < 1.0:
        raise ValueError(f"train_ratio must be in (0, 1), got {train_ratio}")
    n_s = len(dataset)
    if n_s == 0:
        raise ValueError("cannot split an empty dataset")
    perm = np.random.default_rng(seed).permutation(n_s)
    n_train = int(np.floor(train_ratio * n_s))
    return dataset.subset(perm[:n_train]), dataset.subset(perm[n_train:])


def write_trace_csv(trace, path):
    """One row per node: ``node_id,f1..fT`` with 0/1 entries."""
    bits = np.asarray(trace.bits)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node_id"] + [f"f{t + 1}" for t in range(bits.shape[1])])
        for i, row in enumerate(bits):
            w.writerow([i + 1] + [int(b) for b in row])


def read_trace_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header[0] != "node_id":
        raise ValueError(f"{path}: expected header starting with node_id")
    return np.array([[int(v) for v in r[1:]] for r in body], dtype=np.uint8)
