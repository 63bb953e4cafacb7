"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--size 1000000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from rearrangement import kernels


def cases(size, rng):
    samples = np.sort(rng.normal(size=size))
    y = rng.uniform(0, 1, size)
    F = np.cumsum(rng.exponential(size=4096))
    F /= F[-1]
    return {
        "spline_eval": lambda b: kernels.spline_eval(samples, y, backend=b),
        "step_eval": lambda b: kernels.step_eval(samples, y, backend=b),
        "inverse_cdf": lambda b: kernels.inverse_cdf(F, y, backend=b),
        "jitter_unit": lambda b: kernels.jitter_unit(12345, 0, size // 2, 2, backend=b),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels are not built; only the python backend is timed")
    table = cases(args.size, np.random.default_rng(0))
    print(f"{'kernel':<14}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in table.items():
        times = []
        for b in backends:
            fn(b)  # warm up
            times.append(min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat)))
        row = f"{name:<14}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) > 1:
            row += f"{times[0] / times[1]:>11.1f}x"
        print(row)
        if len(backends) > 1:
            results = [fn(b) for b in backends]
            assert all(np.array_equal(results[0], r) for r in results[1:]), f"{name}: backends disagree"


if __name__ == "__main__":
    main()
