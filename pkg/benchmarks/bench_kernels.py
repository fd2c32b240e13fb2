#!/usr/bin/env python3
"""Compare the compiled and pure kernel backends on the hot operations.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from oscillab.kernels import available_backends


def median_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return sorted(times)[len(times) // 2]


def bench_case(name, make_args, call, sizes, repeats, backends):
    print(f"\n{name}")
    header = f"  {'n':>6}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}"
    print(header)
    for n in sizes:
        args = make_args(n)
        row = f"  {n:>6}"
        times = {}
        for b, impl in backends.items():
            times[b] = median_time(lambda: call(impl, *args), repeats)
            row += f"{times[b] * 1e3:>12.3f}ms"
        if "pure" in times and "compiled" in times:
            row += f"{times['pure'] / times['compiled']:>9.1f}x"
        print(row)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()
    backends = available_backends()
    if len(backends) < 2:
        print("note: compiled backend not available, timing pure only")
    rng = np.random.default_rng(99)

    def solve_args(n):
        dl = rng.normal(size=n - 1)
        du = rng.normal(size=n - 1)
        d = 4.0 + np.abs(rng.normal(size=n)) + np.abs(dl).max() + np.abs(du).max()
        return dl, d, du, rng.normal(size=n)

    bench_case(
        "thomas_solve",
        solve_args,
        lambda impl, dl, d, du, b: impl.thomas_solve(dl, d, du, b),
        (100, 1000, 10000, 100000),
        args.repeats,
        backends,
    )

    def matvec_args(n):
        return rng.normal(size=n - 1), rng.normal(size=n), rng.normal(size=n - 1), rng.normal(size=n)

    bench_case(
        "tridiag_matvec",
        matvec_args,
        lambda impl, dl, d, du, x: impl.tridiag_matvec(dl, d, du, x),
        (100, 1000, 10000, 100000),
        args.repeats,
        backends,
    )

    def eig_args(n):
        return np.full(n, -2.0) + 0.3 * rng.random(n), np.ones(n - 1)

    bench_case(
        "tridiag_eigenvalues",
        eig_args,
        lambda impl, d, e: impl.tridiag_eigenvalues(d, e),
        (100, 400, 800),
        args.repeats,
        backends,
    )

    def vec_args(n):
        d = np.full(n, -2.0) + 0.3 * rng.random(n)
        e = np.ones(n - 1)
        vals = {b: impl.tridiag_eigenvalues(d, e) for b, impl in backends.items()}
        return d, e, vals

    bench_case(
        "full eigendecomposition (values + vectors)",
        vec_args,
        lambda impl, d, e, vals: impl.tridiag_eigenvectors(
            d, e, vals["compiled" if impl.__name__.endswith("_cy") else "pure"]
        ),
        (100, 400),
        args.repeats,
        backends,
    )

    print("\ntrajectory stepping (Crank-Nicolson, k=400, 2000 steps)")
    import oscillab.kernels as kernel_mod
    from oscillab.schemes import BoundaryData, Discretization, StepOperator, crank_nicolson

    disc = Discretization.from_r(400, 0.8)
    u0 = rng.random(400)
    saved = (kernel_mod.thomas_solve, kernel_mod.tridiag_matvec)
    try:
        for b, impl in backends.items():
            kernel_mod.thomas_solve = impl.thomas_solve
            kernel_mod.tridiag_matvec = impl.tridiag_matvec
            op = StepOperator(crank_nicolson(), disc, BoundaryData(1.0, 0.0))

            def run_steps():
                u = u0
                for _ in range(2000):
                    u = op.apply(u)
                return u

            t = median_time(run_steps, max(args.repeats // 2, 1))
            print(f"  {b:>9}: {t * 1e3:8.1f}ms")
    finally:
        kernel_mod.thomas_solve, kernel_mod.tridiag_matvec = saved


if __name__ == "__main__":
    main()
