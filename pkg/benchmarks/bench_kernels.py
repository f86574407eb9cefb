"""Time the compiled search kernels against the pure-Python fallback on synthetic graphs.

    python benchmarks/bench_kernels.py [--sizes 100 200 400] [--repeat 3]
"""

import argparse
import importlib
import time

import numpy as np

from fedscan import _pykernels
from fedscan.synth import ScenarioSpec, generate_scenario


def _instance(n: int, seed: int):
    sc = generate_scenario(ScenarioSpec(rng_seed=seed, n_owners=1, nodes_per_owner=n, public_nodes=n))
    net = sc.owners[0].network
    indptr, indices = net.csr
    sig = (net.pvalue_array <= 0.15).astype(np.int32)
    cnt = np.zeros(len(net.order), dtype=np.int32)
    seeds = np.argsort(net.pvalue_array, kind="stable")[:16].astype(np.int32)
    scale = float(n)  # any positive value; both backends get the same one
    return indptr, indices, sig, cnt, seeds, scale


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    try:
        ck = importlib.import_module("fedscan._ckernels")
    except ImportError:
        ck = None
        print("compiled extension not built; timing the Python fallback only")

    print(f"{'kernel':<12}{'n':>6}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for n in args.sizes:
        indptr, indices, sig, cnt, seeds, scale = _instance(n, args.seed)
        common = (0, 0.15, 1, scale, 1.0, 0.5, 15)
        py_g = _time(lambda: _pykernels.greedy_search(indptr, indices, sig, cnt, seeds, *common, 2), args.repeat)
        row = f"{'greedy':<12}{n:>6}{py_g:>12.4f}"
        if ck is not None:
            c_g = _time(lambda: ck.greedy_search(indptr, indices, sig, cnt, seeds, *common, 2), args.repeat)
            assert ck.greedy_search(indptr, indices, sig, cnt, seeds, *common, 2)[0] == \
                _pykernels.greedy_search(indptr, indices, sig, cnt, seeds, *common, 2)[0]
            row += f"{c_g:>12.4f}{py_g / c_g:>9.1f}x"
        print(row)

    # exhaustive enumeration over a 14-node connected graph
    sc = generate_scenario(ScenarioSpec(rng_seed=args.seed, n_owners=1, nodes_per_owner=14, public_nodes=14,
                                        planted_private_size=5, planted_public_size=5, edge_density=0.2))
    net = sc.owners[0].network
    indptr, indices = net.csr
    sig = (net.pvalue_array <= 0.15).astype(np.int32)
    cnt = np.zeros(14, dtype=np.int32)
    common = (0, 0.15, 1, 14.0, 1.0, 0.0, 1)
    py_e = _time(lambda: _pykernels.exhaustive_search(indptr, indices, sig, cnt, *common), 1)
    row = f"{'exhaustive':<12}{14:>6}{py_e:>12.4f}"
    if ck is not None:
        c_e = _time(lambda: ck.exhaustive_search(indptr, indices, sig, cnt, *common), args.repeat)
        row += f"{c_e:>12.4f}{py_e / c_e:>9.1f}x"
    print(row)


if __name__ == "__main__":
    main()
