#!/usr/bin/env python3
"""Time the trace kernels on the numba and numpy backends.

    python benchmarks/bench_kernels.py [--nodes 20] [--frames 200000] [--repeat 5]

Both backends get the same pre-drawn random arrays; the script checks the
outputs match before reporting timings.
"""

import argparse
import timeit

import numpy as np

from eeibma import _accel
from eeibma.traffic import TrafficConfig, generate_trace


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=20)
    ap.add_argument("--frames", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    n, t = args.nodes, args.frames
    rng = np.random.default_rng(0)
    start_u, block = rng.random(t), rng.integers(0, n - 5, t)
    u, flip_u = rng.random((n, t)), rng.random((n, t))

    def mask(backend):
        return _accel.burst_mask(start_u, block, 0.05, 5, 6, n, backend=backend)

    m = mask("numpy")
    assert np.array_equal(m, mask("numba"))

    def bits(backend):
        return _accel.draw_bits(u, flip_u, m, 0.1, 0.6, 0.01, backend=backend)

    assert np.array_equal(bits("numpy"), bits("numba"))

    cfg = TrafficConfig(n_nodes=n, n_frames=t)
    cases = {
        "burst_mask": mask,
        "draw_bits": bits,
        "generate_trace": lambda b: generate_trace(cfg, backend=b),
    }
    print(f"N={n} T={t}, best of {args.repeat}")
    print(f"{'kernel':<16}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, fn in cases.items():
        best = {b: min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat)) * 1e3
                for b in ("numpy", "numba")}
        print(f"{name:<16}{best['numpy']:>12.2f}{best['numba']:>12.2f}"
              f"{best['numpy'] / best['numba']:>9.1f}x")


if __name__ == "__main__":
    main()
