"""Time the compiled and pure-Python integration kernels on the same shots.

    python benchmarks/bench_kernels.py --repeats 5
"""
import argparse
import statistics
import time

import numpy as np

from lamtorus import kernels

CASES = {
    # name: (nm1, lam, delta, step)
    "hit n=2 lam=1 d=0.1": (1.0, 1.0, 0.1, 1e-4),
    "delta* n=2 lam=1": (1.0, 1.0, 0.5354818858817829, 1e-4),
    "miss n=3 lam=0.5": (2.0, 0.5, 1.5, 1e-4),
}


def time_call(fn, repeats):
    out = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        res = fn()
        out.append(time.perf_counter() - t0)
    return statistics.median(out), res


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args(argv)

    impls = kernels.backends()
    if "cython" not in impls:
        print("compiled extension not available; timing the pure-Python kernel only")
    print(f"{'case':24s} {'steps':>7s} " + " ".join(f"{k:>12s}" for k in impls) + "  speedup  identical")
    for name, (nm1, lam, delta, h) in CASES.items():
        times = {}
        results = {}
        for key, mod in impls.items():
            times[key], results[key] = time_call(
                lambda: mod.shoot(0.0, delta, 0.0, nm1, lam, h, 100.0, 1e-8, 1e-10), args.repeats)
        steps = len(results["python"][0]) - 1
        cols = " ".join(f"{times[k] * 1e3:10.2f}ms" for k in impls)
        if "cython" in impls:
            a, b = results["python"], results["cython"]
            same = a[-1] == b[-1] and all(np.array_equal(u, v) for u, v in zip(a[:-1], b[:-1]))
            print(f"{name:24s} {steps:7d} {cols}  {times['python'] / times['cython']:6.1f}x  {same}")
        else:
            print(f"{name:24s} {steps:7d} {cols}")

    t_lim = {k: time_call(lambda: m.limit_shoot(1.0, 50.0, 1e-4), args.repeats)[0] for k, m in impls.items()}
    cols = " ".join(f"{t_lim[k] * 1e3:10.2f}ms" for k in impls)
    print(f"{'limit n=2 t=50':24s} {500000:7d} {cols}")


if __name__ == "__main__":
    main()
