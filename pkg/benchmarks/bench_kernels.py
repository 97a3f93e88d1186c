"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--rows 20000] [--dim 12] [--repeat 5]

The dispatch layer picks one backend at import (POLYRENORM_DISABLE_NUMBA=1
forces numpy); here both are called directly so one run compares them.
"""

import argparse
import time

import numpy as np

from polyrenorm import _kernels as kern


def best_of(fn, repeat):
    fn()  # compile / warm caches
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=20_000)
    ap.add_argument("--dim", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not kern.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(0)
    absrows = np.ascontiguousarray(rng.uniform(0.0, 1.0, (args.rows, args.dim)))
    signed = absrows * rng.choice([-1.0, 1.0], absrows.shape)
    long_x = rng.normal(size=args.rows * args.dim)

    cases = [
        ("luxemburg default M", lambda: kern.luxemburg_rows_np(absrows, kern.KIND_DEFAULT, 0.0),
         lambda: kern.luxemburg_rows_nb(absrows, kern.KIND_DEFAULT, 0.0, 1.0)),
        ("luxemburg t^3", lambda: kern.luxemburg_rows_np(absrows, kern.KIND_POWER, 3.0),
         lambda: kern.luxemburg_rows_nb(absrows, kern.KIND_POWER, 3.0, 1.0)),
        ("day rows", lambda: kern.day_rows_np(absrows), lambda: kern.day_rows_nb(absrows)),
        ("summing rows", lambda: kern.summing_rows_np(signed), lambda: kern.summing_rows_nb(signed)),
        ("summing projection sup", lambda: kern.summing_projection_sup_np(long_x),
         lambda: kern.summing_projection_sup_nb(long_x)),
    ]
    print(f"rows={args.rows} dim={args.dim} best of {args.repeat}")
    print(f"{'kernel':<26}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}  max |diff|")
    for name, f_np, f_nb in cases:
        t_np = best_of(f_np, args.repeat)
        t_nb = best_of(f_nb, args.repeat)
        diff = float(np.max(np.abs(f_np() - f_nb())))
        print(f"{name:<26}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>8.1f}x  {diff:.2e}")


if __name__ == "__main__":
    main()
