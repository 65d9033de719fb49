"""Time the numpy and numba kernel backends side by side.

    python3 benchmarks/bench_kernels.py [--repeat 20] [--n 1000000]

Each kernel is called once before timing so numba compilation is excluded;
the reported figure is the best of ``--repeat`` runs.
"""

import argparse
import time

import numpy as np

from ckptmerge import kernels


def best_of(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(n, rng):
    a = rng.standard_normal(n).astype(np.float32)
    b = rng.standard_normal(n).astype(np.float32)
    acc = np.zeros(n)
    x_obs = np.sort(rng.uniform(0.5, 1.0, 15))
    k = kernels.get_backend("numpy").se_cross(x_obs, x_obs, 1.0, 0.1) + 1e-6 * np.eye(15)
    chol = np.linalg.cholesky(k)
    alpha = np.linalg.solve(k, rng.standard_normal(15))
    grid = np.linspace(0.5, 1.0, 1001)
    mean, var = rng.standard_normal(1001), rng.random(1001)
    return {
        f"lerp_f32 (n={n})": lambda m: m.lerp_f32(a, b, 0.37),
        f"axpy_f64 (n={n})": lambda m: m.axpy_f64(acc, 0.25, a),
        f"sq_dist (n={n})": lambda m: m.sq_dist(a, b),
        "se_cross (15x1001)": lambda m: m.se_cross(x_obs, grid, 1.0, 0.1),
        "gp_predict (15 obs, 1001 grid)": lambda m: m.gp_predict(chol, alpha, x_obs, grid, 1.0, 0.1, 0.0),
        "acq_grid (1001)": lambda m: m.acq_grid(mean, var, 0.2, 0.0, 2.0),
    }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=20)
    p.add_argument("--n", type=int, default=1_000_000)
    args = p.parse_args()
    names = ["numpy"] + (["numba"] if kernels.numba_available() else [])
    impls = {name: kernels.get_backend(name) for name in names}
    rng = np.random.default_rng(0)
    print(f"{'kernel':34s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, call in cases(args.n, rng).items():
        times = [best_of(lambda m=impls[n]: call(m), args.repeat) for n in names]
        row = f"{label:34s}" + "".join(f"{t * 1e3:10.3f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:11.2f}x"
        print(row)
    if len(names) == 1:
        print("numba is not installed; only the numpy backend was timed")


if __name__ == "__main__":
    main()
