"""Benchmark the compiled kernels against their pure-Python twins.

Runs positions_from_sorted and route_hops_many on identical inputs through
both backends, checks the outputs agree, and prints a timing table.
"""

import argparse
import random
import time

import numpy as np

from dhtvote import _fast_py
from dhtvote.dht_overlay import Overlay

try:
    from dhtvote import _fast
except ImportError:
    _fast = None


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100_000, help="overlay size")
    ap.add_argument("--pairs", type=int, default=20_000, help="routing probes")
    ap.add_argument("--repeat", type=int, default=3, help="timing repetitions")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if _fast is None:
        print("compiled backend not built; nothing to compare")
        return 1

    rng = random.Random(args.seed)
    ov = Overlay.build(args.n, 32, "symmetric", args.seed)
    addrs = np.asarray(ov.addrs, dtype=np.uint64)
    fingers = ov.finger_matrix()
    srcs = np.asarray(
        [rng.randrange(args.n) for _ in range(args.pairs)], dtype=np.int64
    )
    dests = np.asarray(
        [rng.randrange(1 << 32) for _ in range(args.pairs)], dtype=np.uint64
    )

    cases = [
        (
            f"positions_from_sorted (n={args.n})",
            lambda impl: impl.positions_from_sorted(addrs, 32),
        ),
        (
            f"route_hops_many ({args.pairs} probes)",
            lambda impl: impl.route_hops_many(addrs, fingers, srcs, dests, 32, True),
        ),
    ]
    print(f"{'kernel':<38} {'python':>10} {'cython':>10} {'speedup':>9}")
    for name, call in cases:
        t_py, out_py = _time(lambda: call(_fast_py), args.repeat)
        t_cy, out_cy = _time(lambda: call(_fast), args.repeat)
        assert np.array_equal(out_py, out_cy), name
        print(f"{name:<38} {t_py:>9.4f}s {t_cy:>9.4f}s {t_py / t_cy:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
