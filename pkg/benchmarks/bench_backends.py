"""Benchmark the numba kernels against the pure-numpy fallbacks.

Usage: python benchmarks/bench_backends.py [--paths 2000] [--steps 10000]

Each kernel is timed on identical inputs under both backends and the
outputs are compared (the reflection and block-sum kernels must agree bit
for bit; the transcendental kernels to ~1e-13 relative).
"""

import argparse
import time

import numpy as np

from reflectsim import kernels, substream


def _time(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--paths", type=int, default=2000)
    parser.add_argument("--steps", type=int, default=10000)
    parser.add_argument("--draws", type=int, default=20000)
    args = parser.parse_args()

    names = kernels.available_backends()
    if "numba" not in names:
        raise SystemExit("numba backend unavailable; nothing to compare")
    nb = kernels.get_backend("numba")
    npb = kernels.get_backend("numpy")

    g = substream(0, 0)
    xi = g.standard_normal((args.paths, args.steps)) * 0.2
    u = g.random((args.draws, 100 * 100 // 10))
    w = g.standard_exponential(u.shape)
    ups = g.random(args.draws)
    z1 = g.standard_normal((args.draws, 150, 3))
    z2 = g.standard_normal((args.draws, 150, 3))

    cases = [
        ("reflect_batch", (0.3, xi, False), "bitwise"),
        ("block_sums", (xi, 100), "bitwise"),
        ("cms", (u.ravel(), w.ravel(), 1.5, 0.0), "rtol"),
        ("nested_gap", (u - 0.5, 100), "bitwise"),
        ("bessel_min", (ups, z1, z2), "rtol"),
    ]

    print(f"{'kernel':<14}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}  agreement")
    for name, call_args, mode in cases:
        # warm the jit before timing
        getattr(nb, name)(*call_args)
        t_nb, out_nb = _time(getattr(nb, name), *call_args)
        t_np, out_np = _time(getattr(npb, name), *call_args, repeats=1)
        if isinstance(out_nb, tuple):
            pairs = zip(out_nb, out_np)
        else:
            pairs = [(out_nb, out_np)]
        if mode == "bitwise":
            agree = all(np.array_equal(np.asarray(a), np.asarray(b)) for a, b in pairs)
            label = "bit-identical" if agree else "MISMATCH"
        else:
            diff = max(
                float(np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(1e-300, np.abs(b))))
                for a, b in pairs
            )
            label = f"max rel diff {diff:.2e}"
        print(f"{name:<14}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>9.1f}x  {label}")


if __name__ == "__main__":
    main()
