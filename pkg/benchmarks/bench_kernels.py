"""Compare the compiled and pure-Python enumeration kernels.

    python benchmarks/bench_kernels.py [--repeat 3]

Each case enumerates one level with both backends, checks that the point sets
agree and prints the best wall time of each.
"""

import argparse
import time

from levelpoints import kernels
from levelpoints.enumeration import Window, enumerate_points
from levelpoints.varieties import PolynomialFamily

CASES = [
    ("det n=2", PolynomialFamily.determinant(2), 5000, Window.cube(4, 1.5)),
    ("det n=2", PolynomialFamily.determinant(2), 20000, Window.cube(4, 1.5)),
    ("pff n=2", PolynomialFamily.pfaffian(2), 60, Window.cube(6, 1.25)),
    ("quad (2,2)", PolynomialFamily.quadratic(2, 2, [1, 0, 0, 0, 1, 0, 0, -1, 0, -1]), 1997, Window.cube(4, 3)),
    ("quad (3,1)", PolynomialFamily.quadratic(3, 1, [1, 0, 0, 0, 1, 0, 0, 1, 0, -1]), 997, Window.cube(4, 3)),
]


def best_time(fn, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if kernels.compiled is None:
        print("compiled kernels not built; only the Python backend is available")
        return 1
    print(f"{'case':<12} {'m':>6} {'points':>8} {'cython s':>9} {'python s':>9} {'speedup':>8}")
    for name, fam, m, w in CASES:
        tc, pc = best_time(lambda: enumerate_points(fam, m, w, backend="cython"), args.repeat)
        tp, pp = best_time(lambda: enumerate_points(fam, m, w, backend="python"), args.repeat)
        if pc != pp:
            raise SystemExit(f"backends disagree on {name} m={m}")
        print(f"{name:<12} {m:>6} {len(pc):>8} {tc:>9.3f} {tp:>9.3f} {tp / tc:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
