"""Compare the numba and pure-numpy hot kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Prints the median wall time per call for each kernel and problem size and
checks that both backends agree.
"""

import argparse
import statistics
import time

import numpy as np

from bank_ews import _kernels as k


def timed(fn, args, repeat):
    fn(*args)  # warm-up (JIT compile for numba)
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    if not k.HAS_NUMBA:
        raise SystemExit("numba unavailable (or disabled by BANK_EWS_DISABLE_NUMBA); nothing to compare")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<8} {'size':>12} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for n, d in ((140, 10), (2000, 10), (20000, 10)):
        X = rng.normal(size=(n, d))
        labels = (rng.random(n) < 0.5).astype(np.int64)
        a, b = k.scatter_numpy(X, labels), k.scatter_numba(X, labels)
        assert np.allclose(a[0], b[0]) and np.allclose(a[1], b[1])
        tn = timed(k.scatter_numpy, (X, labels), args.repeat)
        tb = timed(k.scatter_numba, (X, labels), args.repeat)
        print(f"{'scatter':<8} {f'{n}x{d}':>12} {1e3 * tn:10.3f} {1e3 * tb:10.3f} {tn / tb:8.1f}")
    for n in (140, 2000, 20000):
        s = rng.normal(size=n)
        y = rng.random(n) < 0.5
        u = np.unique(s)
        t = np.concatenate([[-np.inf], (u[1:] + u[:-1]) / 2, [np.inf]])
        a, b = k.sweep_numpy(s, y, t), k.sweep_numba(s, y, t)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
        tn = timed(k.sweep_numpy, (s, y, t), args.repeat)
        tb = timed(k.sweep_numba, (s, y, t), args.repeat)
        print(f"{'sweep':<8} {n:>12} {1e3 * tn:10.3f} {1e3 * tb:10.3f} {tn / tb:8.1f}")


if __name__ == "__main__":
    main()
