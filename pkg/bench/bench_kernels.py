"""Time the compiled and pure-Python special-function kernels side by side.

Usage::

    python3 bench/bench_kernels.py [--repeat 5] [--n 2000]

Each kernel is called on the same fixed pseudo-random parameter points for
every backend; the table reports the best wall time per call and the maximum
relative disagreement between backends.
"""
import argparse
import time

import numpy as np

from anomal._kernels import backends


def _points(n, seed=7):
    rng = np.random.default_rng(seed)
    a = rng.uniform(-4.0, 4.0, n)
    b = rng.uniform(0.1, 4.0, n)
    z = rng.uniform(-20.0, 20.0, n)
    x = rng.uniform(0.1, 20.0, n)
    return a, b, z, x


CASES = {
    "gamma": lambda k, a, b, z, x: [k.gamma(ai) for ai in a],
    "hyp1f1": lambda k, a, b, z, x: [k.hyp1f1(ai, bi, zi) for ai, bi, zi in zip(a, b, z)],
    "hyperu": lambda k, a, b, z, x: [k.hyperu(ai, bi, xi) for ai, bi, xi in zip(a, b, x)],
    "hyperu_pair": lambda k, a, b, z, x: [k.hyperu_pair(ai, bi, xi)[0]
                                          for ai, bi, xi in zip(a, b, x)],
}


def run(n=2000, repeat=5):
    pts = _points(n)
    mods = backends()
    rows = []
    for name, fn in CASES.items():
        times, values = {}, {}
        for label, mod in mods.items():
            best = np.inf
            for _ in range(repeat):
                t0 = time.perf_counter()
                out = fn(mod, *pts)
                best = min(best, time.perf_counter() - t0)
            times[label] = best / n
            values[label] = np.asarray(out, dtype=float)
        if "cython" in values:
            ref = values["python"]
            dev = np.abs(values["cython"] - ref) / np.maximum(np.abs(ref), 1e-300)
            dev = float(np.nanmax(dev))
        else:
            dev = float("nan")
        rows.append((name, times, dev))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rows = run(args.n, args.repeat)
    print(f"{'kernel':<12} {'python us':>10} {'cython us':>10} {'speedup':>8} {'max rel diff':>13}")
    for name, t, dev in rows:
        py = t["python"] * 1e6
        cy = t.get("cython", float("nan")) * 1e6
        print(f"{name:<12} {py:10.2f} {cy:10.2f} {py / cy:8.1f} {dev:13.2e}")


if __name__ == "__main__":
    main()
