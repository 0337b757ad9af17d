"""Compare the compiled kernels with the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is run on identical inputs through both backends. The script
reports the best-of-``repeat`` wall time and the maximum deviation between
the two outputs.
"""

import argparse
import math
import timeit

import numpy as np

from beamdoppler._kernels import _pykernels

try:
    from beamdoppler._kernels import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def cases(rng):
    x = np.linspace(-1.0, 1.0, 200_001)
    half = math.radians(5.0)
    yield (
        "branch_density exact, 2e5 points",
        "branch_density",
        (x, math.radians(3.0), -half, half, True, -1.0, 1.0, 1, 2 * half, 1.0),
    )
    yield (
        "branch_density paper, 2e5 points",
        "branch_density",
        (x, math.radians(90.0), -half, half, False, -0.05, 0.05, 0, 0.0, 1.0),
    )
    values = rng.uniform(-1.0, 1.0, 2_000_000)
    yield "bin_counts, 2e6 values, 200 bins", "bin_counts", (values, -1.0, 1.0, 200, 1e-9)
    freqs = rng.uniform(-1000.0, 1000.0, 256)
    phasors = np.exp(1j * rng.uniform(0, 2 * math.pi, 256)) / 16.0
    yield "sos_synthesize, 256 paths x 2e5 samples", "sos_synthesize", (freqs, phasors, 1.0 / 4000.0, 200_000)


def deviation(a, b):
    if isinstance(a, tuple):
        return max(deviation(u, v) for u, v in zip(a, b))
    a, b = np.asarray(a), np.asarray(b)
    finite = np.isfinite(a) & np.isfinite(b)
    if not np.array_equal(np.isfinite(a), np.isfinite(b)):
        return math.inf
    return float(np.max(np.abs(a[finite] - b[finite]), initial=0.0))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _ckernels is None:
        print("compiled extension not available; only the fallback can be timed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<42} {'numpy [ms]':>11} {'cython [ms]':>12} {'speedup':>8} {'max dev':>9}")
    for label, name, call_args in cases(rng):
        py = getattr(_pykernels, name)
        t_py = min(timeit.repeat(lambda: py(*call_args), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{label:<42} {1e3 * t_py:>11.2f} {'-':>12} {'-':>8} {'-':>9}")
            continue
        cy = getattr(_ckernels, name)
        t_cy = min(timeit.repeat(lambda: cy(*call_args), number=1, repeat=args.repeat))
        dev = deviation(py(*call_args), cy(*call_args))
        print(f"{label:<42} {1e3 * t_py:>11.2f} {1e3 * t_cy:>12.2f} {t_py / t_cy:>7.1f}x {dev:>9.1e}")


if __name__ == "__main__":
    main()
