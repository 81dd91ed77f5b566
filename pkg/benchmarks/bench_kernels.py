"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each row reports the best of ``--repeat`` runs after one warm-up call (which
absorbs numba compilation), plus the max abs difference between backends.
"""

import argparse
import time

import numpy as np

from gouq import _accel, kernels
from gouq.params import RawRates
from gouq.simulate import simulate_batch


def _cases():
    rng = np.random.default_rng(0)
    codes = rng.integers(0, 3, 3_000_000).astype(np.int8)
    pw20 = 2.0 ** -np.arange(20)
    v = 1.0 - rng.random((20_000, 45))
    pw45 = 2.0 ** -np.arange(45)
    lam = np.concatenate([[0.0], 0.8 * 0.6 ** np.arange(1, 3001)])
    return [
        ("sym_series A=0.99 B=0.9 k=4000", lambda: kernels.sym_series(0.99, 0.9, 4000, 4000)),
        ("paths_from_marks 9e4 paths", lambda: kernels.paths_from_marks(codes, 20, pw20, 90_000)[1]),
        ("series_draws 20000x45", lambda: kernels.series_draws(v, 0.3, 0.5, 0.2, pw45)),
        ("cp_recursion k=3000", lambda: kernels.cp_recursion(0.2, lam, 3000)),
        ("simulate_batch 2e5 paths", lambda: simulate_batch(RawRates(1, 2, 1), 2, 10, 200_000, 1)[1]),
    ]


def _time(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, np.asarray(out, dtype=float)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        print("numba is not installed; only the numpy backend can be timed")
    print(f"{'kernel':34s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s} {'max diff':>10s}")
    for name, fn in _cases():
        res = {}
        for backend in ("numba", "numpy"):
            if backend == "numba" and not _accel.HAVE_NUMBA:
                continue
            prev = _accel.set_backend(backend)
            try:
                res[backend] = _time(fn, args.repeat)
            finally:
                _accel.set_backend(prev)
        t_np, out_np = res["numpy"]
        if "numba" in res:
            t_nb, out_nb = res["numba"]
            diff = float(np.max(np.abs(out_nb - out_np)))
            print(f"{name:34s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f} {diff:10.2e}")
        else:
            print(f"{name:34s} {'-':>10s} {t_np:10.4f} {'-':>8s} {'-':>10s}")


if __name__ == "__main__":
    main()
