"""Time the compiled kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``; prints one row per
workload with the best-of-N wall time for each backend and the speedup.
"""

import argparse
import timeit

import numpy as np

from htlab import _backend
from htlab.besov import besov_si_norm
from htlab.symbols import FourierSymbol


def _workloads(grid):
    rng = np.random.default_rng(0)
    f = FourierSymbol.from_real(rng.uniform(-1, 1, 16), start=1)
    x = rng.uniform(0, 1, 1_000_000)
    return {
        f"si_norm q=4 grid={grid}": lambda: besov_si_norm(f, 4.0, grid),
        f"si_norm q=3 grid={grid}": lambda: besov_si_norm(f, 3.0, grid),
        "compensated_cumsum n=1e6": lambda: _backend.compensated_cumsum(x),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=2048)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = ["python"]
    try:
        _backend.use("cython")
        backends.insert(0, "cython")
    except ImportError:
        print("compiled extension not built; timing the fallback only")

    print(f"{'workload':32s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup")
    for name, fn in _workloads(args.grid).items():
        times = {}
        for b in backends:
            _backend.use(b)
            fn()  # warm-up
            times[b] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
        cols = " ".join(f"{times[b]:10.4f}" for b in backends)
        speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else ""
        print(f"{name:32s} {cols}   {speed}")


if __name__ == "__main__":
    main()
