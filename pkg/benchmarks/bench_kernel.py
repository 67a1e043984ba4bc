#!/usr/bin/env python3
"""Benchmark the two elimination kernels on the octonionic weight blocks.

The blocked coboundary ranks over the 15-dimensional two-step model are
the heaviest exact computation in the package; this script times the
compiled kernel against the pure-Python twin on the same inputs.

Usage: python benchmarks/bench_kernel.py [--degrees 6,7,8]
"""

import argparse
import time

from ruminbgg._kernel import ffelim_py
from ruminbgg.algebra import builtin
from ruminbgg.fiber import FiberContext

try:
    from ruminbgg._kernel import _ffelim
except ImportError:
    _ffelim = None


def block_rows(ctx, k, w):
    """Integer rows of the d0 block (k, w) -> (k+1, w)."""
    src = ctx.block(k, w)
    dst = {m: i for i, m in enumerate(ctx.block(k + 1, w))}
    rows = {}
    for j, m in enumerate(src):
        for out, c in ctx.d0_of_monomial(m).items():
            assert c.denominator == 1
            rows.setdefault(dst[out], {})[j] = c.numerator
    return list(rows.values())


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--degrees", default="6,7,8")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    degrees = [int(x) for x in args.degrees.split(",")]

    alg = builtin("octonionic")
    ctx = FiberContext(alg)
    kernels = [("python", ffelim_py.rank_sparse)]
    if _ffelim is not None:
        kernels.append(("cython", _ffelim.rank_sparse))
    else:
        print("compiled kernel not built; timing the pure kernel only")

    print(f"{'block':>16} {'dim':>6} {'rank':>6} " + " ".join(f"{n:>10}" for n, _ in kernels))
    totals = {name: 0.0 for name, _ in kernels}
    for k in degrees:
        for w in sorted(ctx.blocks(k)):
            rows = block_rows(ctx, k, w)
            if not rows:
                continue
            dim = len(ctx.block(k, w))
            if dim < 200:
                continue
            times = []
            rank = None
            for name, kernel in kernels:
                best = float("inf")
                for _ in range(args.repeat):
                    inputs = [dict(r) for r in rows]
                    t0 = time.perf_counter()
                    rank = kernel(inputs, dim)
                    best = min(best, time.perf_counter() - t0)
                times.append(best)
                totals[name] += best
            print(
                f"{f'({k},{w})':>16} {dim:>6} {rank:>6} "
                + " ".join(f"{t * 1000:>9.1f}ms" for t in times)
            )
    print()
    for name in totals:
        print(f"total {name}: {totals[name]:.3f}s")
    if len(kernels) == 2 and totals["cython"] > 0:
        print(f"speedup: {totals['python'] / totals['cython']:.2f}x")


if __name__ == "__main__":
    main()
