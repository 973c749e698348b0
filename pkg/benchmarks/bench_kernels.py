"""Compare the compiled kernels against the SciPy-backed fallback.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from cglwaves._kernels import _fallback

try:
    from cglwaves._kernels import _core
except ImportError:
    _core = None

from cglwaves.grid import Domain, ProblemParams, assemble_laplacian, build_grid


def time_call(fn, *args, repeat=3, **kwargs):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_tridiag(backend, n=2000, solves=2000):
    rng = np.random.default_rng(0)
    dl = rng.standard_normal(n) * 0.1
    d = 4.0 + rng.standard_normal(n) * 0.1
    du = rng.standard_normal(n) * 0.1
    b = rng.standard_normal(n)

    def run():
        fact = backend.tridiag_factor(dl, d, du)
        x = b
        for _ in range(solves):
            x = backend.tridiag_solve(fact, b)
        return x

    return time_call(run)


def bench_evolve(backend, n, steps=5000):
    params = ProblemParams(Domain.WHOLE_SPACE, 1, 2.0, 1.0, theta=0.3)
    grid = build_grid(params, n, 15.0)
    lap = assemble_laplacian(grid)
    sub, diag, sup = lap.as_tridiag_bands()
    phi0 = np.sqrt(2.0) / np.cosh(grid.r) + 0j

    def run():
        return backend.cn_evolve(
            sub, diag, sup, grid.w, 1.0, 0.3, np.exp(0.45j), 2.0,
            phi0, 1e-4, steps, 100,
        )

    return time_call(run, repeat=2)


def main():
    print(f"{'benchmark':<36}{'fallback':>12}{'compiled':>12}{'speedup':>10}")
    rows = [("tridiag factor+2000 solves (n=2000)", lambda be: bench_tridiag(be))]
    for n in (200, 500, 2000, 4000):
        rows.append(
            (f"cn_evolve 5000 steps (n={n})", lambda be, n=n: bench_evolve(be, n))
        )
    for name, bench in rows:
        t_fb, out_fb = bench(_fallback)
        if _core is None:
            print(f"{name:<36}{t_fb:>11.3f}s{'n/a':>12}{'n/a':>10}")
            continue
        t_co, out_co = bench(_core)
        if isinstance(out_fb, tuple):  # evolve output: compare final fields
            gap = float(np.max(np.abs(out_fb[3] - out_co[3])))
        else:
            gap = float(np.max(np.abs(out_fb - out_co)))
        print(
            f"{name:<36}{t_fb:>11.3f}s{t_co:>11.3f}s{t_fb / t_co:>9.1f}x"
            f"   (max result gap {gap:.2e})"
        )


if __name__ == "__main__":
    main()
