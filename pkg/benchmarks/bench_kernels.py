"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs on the same inputs in both backends; results are checked
for agreement before timing.
"""

import argparse
import timeit

import numpy as np

from castanet import kernels


def cases(rng):
    p = np.sort(rng.uniform(0, 600, 2000))
    g = np.sort(rng.uniform(0, 600, 2000))
    scores = rng.random(100_000)
    x = rng.normal(size=(32, 16, 8))
    w = rng.normal(size=(3, 8, 8))
    b = rng.normal(size=8)
    grad = rng.normal(size=(32, 16, 8))
    return {
        "match_sweep (2000 x 2000)": lambda k: k.match_sweep(p, g, 600.0, 0.002),
        "threshold_runs (100k)": lambda k: k.threshold_runs(scores, 0.5, False),
        "dilated_conv_forward (32x16x8, d=4)": lambda k: k.dilated_conv_forward(x, w, b, 4),
        "dilated_conv_backward (32x16x8, d=4)": lambda k: k.dilated_conv_backward(x, w, 4, grad),
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, atol=1e-12)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if "native" not in kernels.BACKENDS:
        print("compiled extension not built; only the numpy fallback is available")
        return
    py, nat = kernels.get_backend("python"), kernels.get_backend("native")
    print(f"{'kernel':<40}{'numpy ms':>10}{'native ms':>11}{'speedup':>9}")
    for name, fn in cases(np.random.default_rng(args.seed)).items():
        if not same(fn(py), fn(nat)):
            raise SystemExit(f"{name}: backends disagree")
        times = []
        for k in (py, nat):
            t = timeit.Timer(lambda: fn(k))
            n, _ = t.autorange()
            times.append(min(t.repeat(args.repeat, n)) / n * 1e3)
        print(f"{name:<40}{times[0]:>10.3f}{times[1]:>11.3f}{times[0] / times[1]:>8.1f}x")


if __name__ == "__main__":
    main()
