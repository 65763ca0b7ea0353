"""Compare the compiled and pure-Python kernels on the same inputs.

    python benchmarks/bench_kernels.py [--n 100] [--d 3] [--delta 2] [--repeat 3]
"""

import argparse
import time

import numpy as np

from dfactor import counting, kernels
from dfactor.graph_core import load_instance
from dfactor.regular_gen import pairing_sample, random_regular_forbidden
from dfactor.rng import RngStream
from dfactor.switchings import III, INV_A, INV_B2, THREE_FWD, TYPE_I_CLASS


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def count_job(state, pattern, impl):
    fr = counting.Frame(state)
    inst = state.instance
    plan = counting.compile_plan(pattern, inst.n, inst.d, inst.delta)
    degM = fr.deg_for(plan[3][plan[0] - 1])
    gptr, gidx = fr.csr()
    return lambda: kernels.count_plan(fr, gptr, gidx, degM, int(degM.sum()), plan, impl=impl)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--delta", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not kernels.compiled_available():
        raise SystemExit("compiled kernels are not built; run pip install -e . --no-build-isolation")
    py, cc = kernels.implementation("python"), kernels.implementation("compiled")

    inst = load_instance(args.n, args.d, random_regular_forbidden(args.n, args.delta, RngStream(1)))
    state = pairing_sample(args.n, args.d, RngStream(2), inst)
    jobs = [("count " + p.name, count_job(state, p, py), count_job(state, p, cc))
            for p in (THREE_FWD, III, INV_B2, TYPE_I_CLASS["B1+"], INV_A)]

    m = 20 * args.n * args.d
    perm = np.ascontiguousarray(RngStream(3).np.permutation(m), dtype=np.int64)
    jobs.append((f"pair_points n={20 * args.n}", lambda: py.pair_points(perm, args.d, 20 * args.n),
                 lambda: cc.pair_points(perm, args.d, 20 * args.n)))

    print(f"{'kernel':<28}{'python s':>12}{'compiled s':>12}{'speedup':>10}")
    for name, slow, fast in jobs:
        ts, a = best_of(slow, args.repeat)
        tf, b = best_of(fast, args.repeat)
        same = (a is None and b is None) or np.array_equal(np.asarray(a), np.asarray(b))
        if not same:
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<28}{ts:>12.4f}{tf:>12.4f}{ts / tf:>10.1f}")


if __name__ == "__main__":
    main()
