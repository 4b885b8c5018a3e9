"""Compiled vs numpy kernels, plus end-to-end timings that depend on them.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from maslovkit import _kernels_py

try:
    from maslovkit import _kernels as _compiled
except ImportError:
    _compiled = None


def _cases(rng):
    return {
        "orthonormalize (4096 x 6 x 3)": ("orthonormalize", (rng.standard_normal((4096, 6, 3)),)),
        "orthonormalize (65536 x 4 x 2)": ("orthonormalize", (rng.standard_normal((65536, 4, 2)),)),
        "wrapped_increments (1e6)": ("wrapped_increments", (rng.uniform(-np.pi, np.pi, 10**6),)),
        "left_chain (20000 x 3 x 3)": ("left_chain", (rng.standard_normal((20000, 3, 3)) / 3,)),
    }


def bench(fn, args, repeat):
    t = timeit.Timer(lambda: fn(*args))
    number, _ = t.autorange()
    return min(t.repeat(repeat, number)) / number


END_TO_END = ("import time, maslovkit.acceptance as A, maslovkit.kernels as K;"
              "t=time.perf_counter(); A.criterion_1(); A.criterion_8();"
              "print(K.BACKEND, time.perf_counter()-t)")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<34}{'numpy [ms]':>12}{'cython [ms]':>13}{'speedup':>9}")
    for label, (name, a) in _cases(rng).items():
        py = bench(getattr(_kernels_py, name), a, args.repeat)
        if _compiled is None:
            print(f"{label:<34}{py * 1e3:>12.3f}{'n/a':>13}{'':>9}")
            continue
        cy = bench(getattr(_compiled, name), a, args.repeat)
        print(f"{label:<34}{py * 1e3:>12.3f}{cy * 1e3:>13.3f}{py / cy:>8.1f}x")

    print("\nend to end (parity suite + period identity), seconds:")
    for env in ({"MASLOVKIT_PURE_PYTHON": "1"}, {}):
        out = subprocess.run([sys.executable, "-c", END_TO_END], capture_output=True,
                             text=True, env={**os.environ, **env}, check=True).stdout.split()
        print(f"  {out[0]:<8}{float(out[1]):8.2f}")


if __name__ == "__main__":
    main()
