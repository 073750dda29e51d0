"""Time the numba kernels against the numpy fallbacks on growing int64 tables.

    python benchmarks/bench_kernels.py --sizes 8 32 128 --repeat 5
"""

import argparse
import time

import numpy as np

from trimspan import _kernels as K


def random_metric(rng, n, scale=1000):
    pts = rng.integers(0, scale, size=(n, 3))
    return np.abs(pts[:, None, :] - pts[None, :, :]).sum(axis=2).astype(np.int64)


def timed(fn, args, repeat):
    fn(*args)  # warm-up (and JIT compile)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[8, 32, 128])
    parser.add_argument("--samples", type=int, default=200, help="rows of F for the projection kernels")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if K.numba is None:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<20}{'n':>6}{'numpy s':>12}{'numba s':>12}{'speedup':>10}")
    for n in args.sizes:
        M = random_metric(rng, n)
        F = rng.integers(0, 2000, size=(args.samples, n)).astype(np.int64)
        cases = [
            ("underline_twice", K.np_underline_twice, K.nb_underline_twice, (M,)),
            ("triangle_violation", K.np_triangle_violation, K.nb_triangle_violation, (M,)),
            ("best_response", K.np_best_response, K.nb_best_response, (M, F)),
            ("project_pass", K.np_project_pass, K.nb_project_pass, (M, F)),
            ("sup_distances", K.np_sup_distances, K.nb_sup_distances, (F,)),
            ("metric_closure", K.np_metric_closure, K.nb_metric_closure, (M,)),
        ]
        for name, slow, fast, fargs in cases:
            t_np = timed(slow, fargs, args.repeat)
            t_nb = timed(fast, fargs, args.repeat)
            print(f"{name:<20}{n:>6}{t_np:>12.2e}{t_nb:>12.2e}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
