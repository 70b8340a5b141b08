"""Time the numba kernels against their numpy twins on representative inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--quick]

The numba set is compiled before timing, so the numbers exclude JIT cost.
Each row also checks that both implementations return the same result.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from weyl_lab import kernels
from weyl_lab.spectra import a1_spectrum, hermite_spectrum


def _tuple_inputs(tau: float):
    # brute-force layout for hermite (x) hermite (x) a1 below tau
    h = hermite_spectrum()
    a = a1_spectrum()
    specs = (h, h, a)
    width = int(tau) + 1
    values = np.full((3, width), np.inf)
    mults = np.zeros((3, width), dtype=np.int64)
    lengths = np.zeros(3, dtype=np.int64)
    for d, s in enumerate(specs):
        n = int(s.levels_below_estimate(np.array([tau]))[0])
        k = np.arange(n)
        values[d, :n] = s.values_at(k).astype(float)
        mults[d, :n] = s.mults_at(k)
        lengths[d] = n
    return values, mults, lengths


def cases(quick: bool):
    tau = 2e4 if quick else 2e5
    T = 10**10 if quick else 10**13
    values, mults, lengths = _tuple_inputs(tau)
    x = np.random.default_rng(0).standard_normal(10**5 if quick else 10**7)
    return [
        ("tuple_count", lambda ns: ns.tuple_count(values, mults, lengths, tau, 1e-12, 10**9,
                                                   np.zeros((4096, 3), dtype=np.int64))[:3]),
        ("hyperbola_sum", lambda ns: ns.hyperbola_sum(T)),
        ("root_column_sum", lambda ns: ns.root_column_sum(T, 3, 2, int(T ** 0.5))),
        ("compensated_sum", lambda ns: ns.compensated_sum(x)),
        ("compensated_cumsum", lambda ns: float(ns.compensated_cumsum(x)[-1])),
    ]


def best_of(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="numba vs numpy kernel timings")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="small inputs, for smoke runs")
    args = ap.parse_args(argv)

    jit = kernels.numba_kernels
    if jit is None:
        print("numba is not installed; timing the numpy kernels only")
    print(f"{'kernel':20s} {'numpy [s]':>12s} {'numba [s]':>12s} {'speedup':>9s}  agree")
    ok = True
    for name, call in cases(args.quick):
        t_np, r_np = best_of(lambda: call(kernels.numpy_kernels), args.repeat)
        if jit is None:
            print(f"{name:20s} {t_np:12.5f} {'-':>12s} {'-':>9s}  -")
            continue
        call(jit)  # compile
        t_jit, r_jit = best_of(lambda: call(jit), args.repeat)
        agree = np.allclose(np.asarray(r_np, dtype=float), np.asarray(r_jit, dtype=float), rtol=1e-12, atol=0)
        ok &= bool(agree)
        print(f"{name:20s} {t_np:12.5f} {t_jit:12.5f} {t_np / t_jit:9.1f}  {'yes' if agree else 'NO'}")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
