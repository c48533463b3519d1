"""Time the compiled and pure-Python Jacobi backends on random Hermitian matrices.

    python benchmarks/bench_eigensolver.py --dims 16 64 128 256 --repeat 3
"""

import argparse
import time

import numpy as np

from belldistill import linalg


def random_hermitian(dim, rng):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--dims", type=int, nargs="+", default=[16, 64, 128, 256])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    backends = linalg.available_backends()
    rng = np.random.default_rng(args.seed)
    print(f"{'dim':>5} " + " ".join(f"{b:>12}" for b in backends) + f" {'lapack':>12} {'max |diff|':>11}")
    for dim in args.dims:
        m = random_hermitian(dim, rng)
        reference = np.linalg.eigvalsh(m)
        times, diff = [], 0.0
        for backend in backends:
            times.append(best_time(lambda: linalg.hermitian_eigenvalues(m, backend=backend), args.repeat))
            diff = max(diff, float(np.max(np.abs(linalg.hermitian_eigenvalues(m, backend=backend) - reference))))
        lapack = best_time(lambda: np.linalg.eigvalsh(m), args.repeat)
        print(f"{dim:>5} " + " ".join(f"{t:>11.4f}s" for t in times) + f" {lapack:>11.4f}s {diff:>11.1e}")


if __name__ == "__main__":
    main()
