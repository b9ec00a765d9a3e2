"""Compiled against pure-numpy kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Times the Clausen series, the Laplacian-symbol log-det on a few lattices
and one full ``entropy_logdet`` run per backend.
"""
import argparse
import math
import time

import numpy as np

from latvol import _pykernels, catalog, kernels
from latvol.entropy import entropy_logdet, laplacian_symbol

try:
    from latvol import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def symbol_args(m):
    s = laplacian_symbol(m)
    return (s.tails, s.heads, s.shifts[:, 0].astype(float), s.shifts[:, 1].astype(float), s.degrees.astype(float))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels is None:
        raise SystemExit("compiled extension not built; run pip install -e . --no-build-isolation")

    rng = np.random.default_rng(1)
    rows = []
    x = rng.uniform(0, math.pi, 200_000)
    rows.append(("clausen 2e5", best_of(lambda: _pykernels.clausen_reduced(x), args.repeat),
                 best_of(lambda: _kernels.clausen_reduced(x), args.repeat)))
    th, ph = rng.uniform(-math.pi, math.pi, (2, 20_000))
    for name in ("square", "kagome", "4-6-12"):
        a = symbol_args(catalog.get(name).map)
        rows.append((f"logdet 2e4 {name}", best_of(lambda: _pykernels.symbol_logdet(th, ph, *a), args.repeat),
                     best_of(lambda: _kernels.symbol_logdet(th, ph, *a), args.repeat)))

    m = catalog.get("4-6-12").map
    saved = kernels.symbol_logdet
    full = []
    for impl in (_pykernels.symbol_logdet, _kernels.symbol_logdet):
        kernels.symbol_logdet = impl
        full.append(best_of(lambda: entropy_logdet(m, tol=1e-6), max(1, args.repeat // 2)))
    kernels.symbol_logdet = saved
    rows.append(("entropy_logdet 4-6-12", *full))

    print(f"{'kernel':28s} {'python s':>10s} {'compiled s':>11s} {'speedup':>8s}")
    for label, py, c in rows:
        print(f"{label:28s} {py:10.4f} {c:11.4f} {py / c:8.1f}")


if __name__ == "__main__":
    main()
