"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from psgarch import _pykernels

try:
    from psgarch import _ckernels
except ImportError:
    _ckernels = None


def cases(rng):
    xi2 = rng.standard_normal(7641) ** 2
    eps = rng.standard_normal(7641)
    x = rng.standard_normal(2000)
    gamma = np.array([x[: x.size - k] @ x[k:] / x.size for k in range(60)])
    omegas = np.linspace(-np.pi, np.pi, 2001)
    return {
        "garch11_filter (n=7641)": lambda m: m.garch11_filter(xi2, 0.05, 0.08, 0.87, 1.0),
        "garch11_simulate (n=7641)": lambda m: m.garch11_simulate(eps, 0.05, 0.08, 0.87, 1.0),
        "garch11_nll normal (n=7641)": lambda m: m.garch11_nll(xi2, 0.08, 0.87, 0.0),
        "garch11_nll t (n=7641)": lambda m: m.garch11_nll(xi2, 0.08, 0.87, 6.0),
        "lag_cosine_sum (m=59, 2001 freqs)": lambda m: m.lag_cosine_sum(gamma, 59, omegas, 1, False),
    }


def best_time(fn, repeat):
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; run `python3 setup.py build_ext --inplace`")
    print(f"{'kernel':36s} {'python (us)':>12s} {'cython (us)':>12s} {'speed-up':>9s}")
    for name, call in cases(np.random.default_rng(0)).items():
        t_py = best_time(lambda: call(_pykernels), args.repeat) * 1e6
        if _ckernels is None:
            print(f"{name:36s} {t_py:12.1f} {'-':>12s} {'-':>9s}")
            continue
        t_c = best_time(lambda: call(_ckernels), args.repeat) * 1e6
        print(f"{name:36s} {t_py:12.1f} {t_c:12.1f} {t_py / t_c:8.1f}x")


if __name__ == "__main__":
    main()
