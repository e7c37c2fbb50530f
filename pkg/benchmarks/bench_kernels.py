"""Time the compiled and pure-Python kernels on representative inputs.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from bscount.antisym import permutations_with_signs
from bscount._kernels import _pykernels

try:
    from bscount._kernels import _ckernels
except ImportError:
    _ckernels = None


def cases(rng):
    z = rng.standard_normal(2000) + 1j * rng.standard_normal(2000)
    z[::7] = z[1::7][: z[::7].size]  # exact duplicates to exercise merging
    vecs = rng.standard_normal((4, 8)) + 1j * rng.standard_normal((4, 8))
    perms, signs = permutations_with_signs(4)
    vals = rng.standard_normal(100_000)
    weights = np.ones_like(vals)
    xs = rng.uniform(0.01, 50.0, 2000)
    return {
        "cluster_labels (2000 pts)": lambda k: k.cluster_labels(z, 1e-8),
        "wedge_coefficients (N=4, d=8)": lambda k: k.wedge_coefficients(vecs, perms, signs),
        "negative_part_power_sum (1e5)": lambda k: k.negative_part_power_sum(vals, weights, 1.5),
        "lanczos_gamma (2000 calls)": lambda k: [k.lanczos_gamma(float(x)) for x in xs],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels is not None else [])
    print(f"{'kernel':34} " + " ".join(f"{name + ' [ms]':>14}" for name, _ in backends) + f" {'speedup':>9}")
    for label, fn in cases(np.random.default_rng(0)).items():
        times = []
        for _, mod in backends:
            fn(mod)  # warm up
            times.append(min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)) * 1e3)
        speed = f"{times[0] / times[1]:9.1f}" if len(times) == 2 else f"{'-':>9}"
        print(f"{label:34} " + " ".join(f"{t:14.3f}" for t in times) + f" {speed}")
    if _ckernels is None:
        print("(extension not built; only the fallback was timed)")


if __name__ == "__main__":
    main()
