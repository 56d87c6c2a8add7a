"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from hilbcolim import _pykernels

try:
    from hilbcolim import _ckernels
except ImportError:
    _ckernels = None


def _gaussian(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def cases(rng):
    for d, steps in ((2, 512), (8, 512), (32, 256)):
        M = _gaussian(rng, (d, d))
        M /= np.linalg.norm(M, 2)
        x, y = _gaussian(rng, d), _gaussian(rng, d)
        yield f"orbit_moments d={d} steps={steps}", "orbit_moments", (M, x, y, steps)
    for k, m, n in ((1000, 4, 4), (10000, 16, 16)):
        G = _gaussian(rng, (k, m, n)) / (2 * np.sqrt(n))
        X, Y = _gaussian(rng, (k, n)), _gaussian(rng, (k, n))
        yield f"lemma_residuals k={k} {m}x{n}", "lemma_residuals", (G, X, Y)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'case':36} {'numpy ms':>10} {'cython ms':>10} {'speedup':>8}")
    for label, fn, call_args in cases(rng):
        t_py = min(timeit.repeat(lambda: getattr(_pykernels, fn)(*call_args), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{label:36} {1e3 * t_py:10.3f} {'n/a':>10} {'':>8}")
            continue
        t_c = min(timeit.repeat(lambda: getattr(_ckernels, fn)(*call_args), number=1, repeat=args.repeat))
        print(f"{label:36} {1e3 * t_py:10.3f} {1e3 * t_c:10.3f} {t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
