"""Time each kernel under the numba and numpy backends on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Outputs must match exactly; the script exits nonzero if they do not.
"""
import argparse
import json
import sys
import time

import numpy as np

from steiner_degree import kernels
from steiner_degree.generators import bounded_tw_graph, random_tree, rng_for
from steiner_degree.instance import GstInstance
from steiner_degree.rounding import fractional_solution, _membership


def rounding_inputs(n=400, trials=2000, seed=0):
    rng = rng_for(seed, 0)
    g = random_tree(n, rng, 10)
    groups = [sorted(int(v) for v in rng.choice(np.arange(1, n), size=16, replace=False)) for _ in range(8)]
    sol = fractional_solution(GstInstance.build(g, groups, 0), 0)
    u = rng.random((trials, len(sol.edges)))
    member, root_member = _membership(sol, sol.instance.groups)
    return sol, u, member, root_member


def separator_inputs(n=40, w=3, seed=0):
    g = bounded_tw_graph(n, w, rng_for(seed, 1))
    indptr, indices = [0], []
    for v in range(n):
        indices.extend(g.adj[v])
        indptr.append(len(indices))
    # separator of size w+1 with a tight limit forces a long combination scan
    return np.array(indptr), np.array(indices, dtype=np.int64), w + 1, (4 * n + 4) // 5


def cases():
    sol, u, member, root_member = rounding_inputs()
    conn = kernels._connect_mask_np(sol.parent, sol.ratios(), u)
    indptr, indices, size, limit = separator_inputs()
    r_star = np.arange(0, 64, 4)
    return {
        "connect_mask": lambda: kernels.connect_mask(sol.parent, sol.ratios(), u),
        "group_hits": lambda: kernels.group_hits(conn, sol.child, member, root_member),
        "full_bin_counts": lambda: kernels.full_bin_counts(r_star, 16, 37),
        "first_separator": lambda: kernels.first_separator(indptr, indices, size, limit),
    }


def timeit(fn, repeat):
    fn()  # warm-up (jit compilation for numba)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write results here")
    args = ap.parse_args(argv)
    if kernels.numba is None:
        print("numba not installed; only the numpy backend can run", file=sys.stderr)
        return 1
    rows, mismatch = [], False
    prev = kernels.backend()
    try:
        for name, fn in cases().items():
            kernels.use_backend("numpy")
            t_np, out_np = timeit(fn, args.repeat)
            kernels.use_backend("numba")
            t_jit, out_jit = timeit(fn, args.repeat)
            same = bool(np.array_equal(out_np, out_jit))
            mismatch |= not same
            rows.append({"kernel": name, "numpy_s": t_np, "numba_s": t_jit,
                         "speedup": t_np / t_jit if t_jit > 0 else float("inf"), "identical": same})
    finally:
        kernels.use_backend(prev)
    print(f"{'kernel':<16} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}  identical")
    for r in rows:
        print(f"{r['kernel']:<16} {1e3 * r['numpy_s']:>10.2f} {1e3 * r['numba_s']:>10.2f} "
              f"{r['speedup']:>7.1f}x  {r['identical']}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 1 if mismatch else 0


if __name__ == "__main__":
    sys.exit(main())
