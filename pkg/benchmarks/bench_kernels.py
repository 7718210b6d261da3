"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--grid 1024]
"""

import argparse
import timeit

import numpy as np

from pqapprox import _pykernels
from pqapprox.operators import _log_coefficients, _powers

try:
    from pqapprox import _ckernels
except ImportError:
    _ckernels = None


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--grid", type=int, default=1024)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
        return

    xs = np.arange(args.grid + 1) / args.grid
    print(f"{'kernel':<14}{'n':>6}{'numpy [ms]':>13}{'cython [ms]':>13}{'speedup':>9}")
    for n in (16, 64, 256, 1024):
        p, q = 1 - 1 / (n + 1), 1 - 1 / n
        ppow, qpow = _powers(n, p, q)
        inputs = (_log_coefficients(n, p, q), ppow, qpow, xs)
        t_py = _best(lambda: _pykernels.weight_matrix(*inputs), args.repeat)
        t_c = _best(lambda: _ckernels.weight_matrix(*inputs), args.repeat)
        print(f"{'weights':<14}{n:>6}{t_py * 1e3:>13.2f}{t_c * 1e3:>13.2f}{t_py / t_c:>9.1f}")

    vals = np.ascontiguousarray(np.sin(np.pi * xs) + np.abs(xs - 0.5))
    for lag in (4, 32, 256):
        t_py = _best(lambda: _pykernels.sup_modulus(vals, lag), args.repeat)
        t_c = _best(lambda: _ckernels.sup_modulus(vals, lag), args.repeat)
        print(f"{'modulus':<14}{lag:>6}{t_py * 1e3:>13.2f}{t_c * 1e3:>13.2f}{t_py / t_c:>9.1f}")


if __name__ == "__main__":
    main()
