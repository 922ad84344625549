"""Optional numba acceleration for the trace-generation kernels.

Every kernel exists twice: a pure-numpy/Python implementation and a
``numba.njit`` build of an equivalent loop.  Both consume the same
pre-drawn random arrays, so the two paths are bit-identical.

Set ``EEIBMA_NUMBA=0`` to force the numpy path (also used automatically
when numba is not importable).
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional speedup
    numba = None


def _env_enabled():
    flag = os.environ.get("EEIBMA_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and _env_enabled()


def resolve_backend(backend=None):
    """Return ``"numba"`` or ``"numpy"`` for an explicit or default choice."""
    if backend is None:
        return "numba" if USE_NUMBA else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


def _burst_mask_impl(start_u, block, burst_rate, duration, group, n_nodes):
    # A burst may only start while no burst is active, so the elevated set
    # in any frame is exactly one contiguous block of `group` nodes.
    n_frames = start_u.shape[0]
    mask = np.zeros((n_nodes, n_frames), dtype=np.bool_)
    remaining = 0
    lo = 0
    for t in range(n_frames):
        if remaining == 0 and start_u[t] < burst_rate:
            remaining = duration
            lo = block[t]
        if remaining > 0:
            for i in range(lo, lo + group):
                mask[i, t] = True
            remaining -= 1
    return mask


def _draw_bits_numpy(u, flip_u, mask, p_base, burst_prob, flip_noise):
    prob = np.where(mask, burst_prob, p_base)
    bits = (u < prob) ^ (flip_u < flip_noise)
    return bits.astype(np.uint8)


def _draw_bits_loop(u, flip_u, mask, p_base, burst_prob, flip_noise):
    n, t_max = u.shape
    out = np.empty((n, t_max), dtype=np.uint8)
    for i in range(n):
        for t in range(t_max):
            p = burst_prob if mask[i, t] else p_base
            b = u[i, t] < p
            if flip_u[i, t] < flip_noise:
                b = not b
            out[i, t] = 1 if b else 0
    return out


if HAVE_NUMBA:
    _burst_mask_nb = numba.njit(cache=True)(_burst_mask_impl)
    _draw_bits_nb = numba.njit(cache=True)(_draw_bits_loop)
else:  # pragma: no cover
    _burst_mask_nb = None
    _draw_bits_nb = None


def burst_mask(start_u, block, burst_rate, duration, group, n_nodes, backend=None):
    """Boolean N x T mask of nodes whose probability is elevated by a burst."""
    start_u = np.ascontiguousarray(start_u, dtype=np.float64)
    block = np.ascontiguousarray(block, dtype=np.int64)
    if resolve_backend(backend) == "numba":
        return _burst_mask_nb(start_u, block, float(burst_rate), int(duration),
                              int(group), int(n_nodes))
    return _burst_mask_impl(start_u, block, burst_rate, duration, group, n_nodes)


def draw_bits(u, flip_u, mask, p_base, burst_prob, flip_noise, backend=None):
    """Threshold uniforms into event bits, then apply bit-flip noise."""
    if resolve_backend(backend) == "numba":
        return _draw_bits_nb(np.ascontiguousarray(u), np.ascontiguousarray(flip_u),
                             np.ascontiguousarray(mask), float(p_base),
                             float(burst_prob), float(flip_noise))
    return _draw_bits_numpy(u, flip_u, mask, p_base, burst_prob, flip_noise)
