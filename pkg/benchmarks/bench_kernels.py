"""Time the y-pattern enumeration kernel: compiled extension vs pure Python.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Both implementations are loaded directly (not through the dispatcher) and
their outputs are compared before timing is reported.
"""

import argparse
import math
import time

import numpy as np

from sgclust import _kernels_py
from sgclust.graph import GeneratorConfig, generate_random

try:
    from sgclust import _kernels as _compiled
except ImportError:
    _compiled = None

CASES = [  # (n, K, density, seed)
    (6, 2, 0.6, 1),
    (8, 2, 0.5, 2),
    (6, 3, 0.6, 3),
    (10, 2, 0.4, 4),
    (7, 3, 0.5, 5),
]


def _args(n, K, density, seed, nu=0.5, sigma=0.5):
    g = generate_random(GeneratorConfig(n, density, 9, seed))
    adj = [sum(1 << j for j in g.neighbors(i)) for i in range(n)]
    return n, K, adj, nu, math.ceil(sigma * n)


def _time(fn, args, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    opts = ap.parse_args(argv)
    if _compiled is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`")
    print(f"{'n':>3} {'K':>2} {'bits':>4} {'patterns':>9} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for n, K, d, seed in CASES:
        args = _args(n, K, d, seed)
        t_py, ref = _time(_kernels_py.feasible_masks, args, opts.repeat)
        if _compiled is not None:
            t_c, got = _time(_compiled.feasible_masks, args, opts.repeat)
            if not np.array_equal(np.asarray(ref), np.asarray(got)):
                raise SystemExit(f"mismatch at n={n} K={K}")
            speed = f"{t_py / t_c:8.1f}x"
            tc = f"{t_c:11.4f}"
        else:
            speed, tc = f"{'-':>8}", f"{'-':>11}"
        print(f"{n:>3} {K:>2} {n * K:>4} {len(ref):>9} {t_py:>10.4f} {tc} {speed}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
