"""Time the numba kernels against their numpy / pure-python twins.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each row runs both paths on the same input, checks the outputs agree and
prints the best wall time of ``--repeat`` runs. The first numba call is
timed separately as compile (or cache load) time.
"""

from __future__ import annotations

import argparse
import importlib
import time

import numpy as np

from dbtile import asymptotics as asy
from dbtile._accel import HAS_NUMBA, py_func
from dbtile.stratification import block_span, saturated_edges
from dbtile.tilesearch import score_levels

score_mod = importlib.import_module("dbtile.tilesearch.score")


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def cases(quick):
    K, M = (2, 14) if quick else (2, 18)
    yield (f"score levels K={K} M={M}",
           lambda: score_mod._levels_loop(K, M), lambda: score_mod._levels_numpy(K, M))

    lv = score_levels(K, M)
    yield (f"internal count K={K} M={M}",
           lambda: score_mod._internal_loop(lv, K), lambda: score_mod._internal_numpy(lv, K))

    steps = 200_000 if quick else 2_000_000
    x = np.random.Generator(np.random.PCG64(1)).bit_generator.random_raw(steps)
    for W in (4, 16):
        yield (f"window argmax W={W} n={steps}",
               lambda W=W: asy._argmax_moves_deque(x, W), lambda W=W: asy._argmax_moves_numpy(x, W))

    Kb, Mb = (3, 5) if quick else (3, 7)
    levels = score_levels(Kb, Mb)
    edges = sorted(saturated_edges(Kb, Mb, levels))
    src = np.array([u for u, _ in edges], dtype=np.int64)
    dst = np.array([v for _, v in edges], dtype=np.int64)
    n = Kb**Mb
    yield (f"block span K={Kb} M={Mb} ({len(edges)} edges)",
           lambda: block_span(n, src, dst, levels), lambda: py_func(block_span)(n, src, dst, levels))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args(argv)

    if not HAS_NUMBA:
        print("numba disabled: both columns run the fallback path")
    print(f"{'kernel':<40} {'first':>9} {'numba':>9} {'fallback':>9} {'speedup':>8}  agree")
    for name, fast, slow in cases(args.quick):
        t0 = time.perf_counter()
        fast()
        first = time.perf_counter() - t0
        t_fast, a = best_of(fast, args.repeat)
        t_slow, b = best_of(slow, args.repeat)
        speedup = t_slow / t_fast if t_fast > 0 else float("inf")
        print(f"{name:<40} {first:9.4f} {t_fast:9.4f} {t_slow:9.4f} {speedup:7.1f}x  {same(a, b)}")


if __name__ == "__main__":
    main()
