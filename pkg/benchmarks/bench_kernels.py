"""Time the numba kernels against their numpy fallbacks on a Barak-Erdos graph.

    python3 benchmarks/bench_kernels.py --n 16384 --c 2 --repeat 5

Both paths are called directly, so the PIPPHASE_DISABLE_NUMBA flag does not
matter here. Outputs are compared for equality before any timing is reported.
"""

import argparse
import time

import numpy as np

from pipphase import _kernels
from pipphase._accel import HAVE_NUMBA
from pipphase.dag import sample_barak_erdos
from pipphase.experiments import edge_probability


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2**14)
    ap.add_argument("--c", type=float, default=2.0)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    n = args.n
    p, _ = edge_probability(n, args.c)
    g = sample_barak_erdos(n, p, args.seed)
    indptr, indices = g.csr()
    order = g.topological_order()
    lin = np.sort(np.random.default_rng(args.seed).choice(n * (n - 1) // 2, size=g.n_edges, replace=False))
    print(f"n={n} c={args.c} edges={g.n_edges} numba={'yes' if HAVE_NUMBA else 'no'}")

    cases = [
        ("decode_pairs", lambda k: k(lin, n), _kernels.decode_pairs_numba, _kernels.decode_pairs_numpy),
        ("closure", lambda k: k(indptr, indices, order, n), _kernels.closure_numba, _kernels.closure_numpy),
    ]
    reach = _kernels.closure_numpy(indptr, indices, order, n)
    cases.append(("row_popcount", lambda k: k(reach), _kernels.row_popcount_numba, _kernels.row_popcount_numpy))

    print(f"{'kernel':<14}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for name, call, fast, slow in cases:
        call(fast)  # compile outside the timed region
        t_fast, out_fast = best_of(lambda: call(fast), args.repeat)
        t_slow, out_slow = best_of(lambda: call(slow), args.repeat)
        if isinstance(out_fast, tuple):
            same = all(np.array_equal(a, b) for a, b in zip(out_fast, out_slow))
        else:
            same = np.array_equal(out_fast, out_slow)
        if not same:
            raise SystemExit(f"{name}: numba and numpy outputs differ")
        print(f"{name:<14}{t_fast:>10.4f}{t_slow:>10.4f}{t_slow / t_fast:>8.1f}x")


if __name__ == "__main__":
    main()
