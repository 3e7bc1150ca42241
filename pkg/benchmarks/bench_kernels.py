"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs once untimed (JIT warm-up), then the best of ``--repeat``
runs is reported.  Outputs are compared so a speed-up never hides a bug.
"""

import argparse
import time

import numpy as np

from unsharp import _kernels
from unsharp.experiments.chsh import correlation_matrix, fibonacci_sphere, singlet


def cases(rng):
    h = rng.normal(size=(200_000, 2, 2)) + 1j * rng.normal(size=(200_000, 2, 2))
    h = h + np.conj(np.swapaxes(h, 1, 2))
    alphas = (rng.normal(size=48 * 48) + 1j * rng.normal(size=48 * 48)) * 2
    probs = rng.random(2305)
    probs /= probs.sum()
    return {
        "qubit_eigh_batch": (h,),
        "coherent_matrix": (alphas, 60),
        "sample_inverse_cdf": (probs, rng.random(200_000)),
        "chsh_pair_scan": (correlation_matrix(singlet()), fibonacci_sphere(400)),
    }


def best_time(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.allclose(np.abs(a), np.abs(b), atol=1e-9)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not _kernels.NUMBA_KERNELS:
        raise SystemExit("numba kernels unavailable")

    print(f"{'kernel':<20} {'numpy [ms]':>11} {'numba [ms]':>11} {'speed-up':>9}  match")
    for name, call in cases(np.random.default_rng(args.seed)).items():
        np_fn, nb_fn = _kernels.NUMPY_KERNELS[name], _kernels.NUMBA_KERNELS[name]
        t_np = best_time(np_fn, call, args.repeat)
        t_nb = best_time(nb_fn, call, args.repeat)
        ok = same(np_fn(*call), nb_fn(*call))
        print(f"{name:<20} {1e3 * t_np:11.2f} {1e3 * t_nb:11.2f} {t_np / t_nb:8.1f}x  {ok}")


if __name__ == "__main__":
    main()
