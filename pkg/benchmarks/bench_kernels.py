"""Time the dense simplex kernel: numba build against the numpy build.

Usage: python benchmarks/bench_kernels.py [--sizes 10x20,30x60] [--repeat 200]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qsolve import _kernels


def random_lp(rng: np.random.Generator, m: int, n: int):
    A = rng.integers(-3, 4, size=(m, n)).astype(float)
    x0 = rng.random(n)
    b = A @ x0 + rng.random(m)
    c = rng.integers(-3, 4, size=n).astype(float)
    return A, b, c, np.zeros(n), np.ones(n)


def run(fn, problems, tol=1e-9):
    start = time.perf_counter()
    out = [fn(*p, 5000, tol) for p in problems]
    return time.perf_counter() - start, out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="10x20,30x60,60x120")
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"numba active: {_kernels.USING_NUMBA}")
    for size in args.sizes.split(","):
        m, n = (int(v) for v in size.split("x"))
        problems = [random_lp(rng, m, n) for _ in range(args.repeat)]
        t_np, out_np = run(_kernels.simplex_numpy, problems)
        if _kernels.USING_NUMBA:
            run(_kernels._simplex_impl, problems[:1])  # warm-up
            t_nb, out_nb = run(_kernels._simplex_impl, problems)
            agree = all(a[0] == b[0] and abs(a[3] - b[3]) <= 1e-7 * (1 + abs(a[3])) for a, b in zip(out_np, out_nb))
            print(f"{m}x{n}: numpy {t_np * 1e3 / len(problems):.3f} ms/lp  numba {t_nb * 1e3 / len(problems):.3f} ms/lp"
                  f"  speedup {t_np / t_nb:.1f}x  agree={agree}")
        else:
            print(f"{m}x{n}: numpy {t_np * 1e3 / len(problems):.3f} ms/lp")


if __name__ == "__main__":
    main()
