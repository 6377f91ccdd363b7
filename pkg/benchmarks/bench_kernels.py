"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--n 1025] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from collapse_kit import kernels
from collapse_kit.radial_data import FamilySpec, build_family, tabulate


def cases(n):
    data = tabulate(build_family(FamilySpec("painleve_gullstrand", n=n, r_min=3.0, r_max=10.0)))
    p = data.primitives()
    fields = np.vstack([p[k] for k in ("g11", "g11_r", "rho", "rho_r", "rho_rr", "ka", "kb")])
    r = data.r
    y = np.sin(r)
    v0 = -np.sqrt(2.0 / 3.0)
    return {
        "diff1": lambda m: m.diff1(r, y),
        "diff2": lambda m: m.diff2(r, y),
        "cumsimpson": lambda m: m.cumsimpson(r, y),
        "running_min": lambda m: m.running_min(y),
        "jang_tabulated": lambda m: m.jang_tabulated(r, fields, 0, r[0], v0, 0.0, 1e-9, 1e-12, 1e-6),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1025)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = kernels.backends()
    if "cython" not in impls:
        print("compiled extension not built; only the Python fallback is available")
    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':<16}" + "".join(f"{name:>14}" for name in impls) + f"{'speedup':>10}")
    for name, fn in cases(args.n).items():
        times = {}
        for impl, mod in impls.items():
            number = 1 if impl == "python" and name == "jang_tabulated" else 20
            t = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
            times[impl] = t
        row = f"{name:<16}" + "".join(f"{times[k] * 1e3:>11.3f} ms" for k in impls)
        if "cython" in times:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
