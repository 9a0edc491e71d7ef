"""Compare the compiled (Cython) kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-N wall times and the max elementwise difference per kernel.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from catgkp import kernels
from catgkp.states import CatSpec, cat


def _cases():
    beta = 1.7 - 0.9j
    psi = cat(CatSpec(2.0, 0.3, "even", 60)).amplitudes[None, :]
    w = np.ones(1)
    coarse = np.linspace(-5, 5, 101)
    fine = np.linspace(-5, 5, 201)
    return [
        ("displacement 60x60", lambda impl: impl.displacement_elements(beta, 60, 60)),
        ("displacement 200x200", lambda impl: impl.displacement_elements(beta, 200, 200)),
        ("wigner cutoff 60, 101^2 grid", lambda impl: impl.wigner_pure(psi, w, coarse, coarse)),
        ("wigner cutoff 60, 201^2 grid", lambda impl: impl.wigner_pure(psi, w, fine, fine)),
    ]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    py, cy = kernels.python_backend, kernels.compiled_backend
    if cy is None:
        print("compiled backend unavailable; build with `pip install -e . --no-build-isolation`")
    print(f"{'kernel':32s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s} {'max |diff|':>11s}")
    for name, fn in _cases():
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat)) * 1e3
        if cy is None:
            print(f"{name:32s} {t_py:12.2f} {'-':>12s} {'-':>8s} {'-':>11s}")
            continue
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat)) * 1e3
        diff = float(np.abs(np.asarray(fn(py)) - np.asarray(fn(cy))).max())
        print(f"{name:32s} {t_py:12.2f} {t_cy:12.2f} {t_py / t_cy:7.1f}x {diff:11.1e}")


if __name__ == "__main__":
    main()
