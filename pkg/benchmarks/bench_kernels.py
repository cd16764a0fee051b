#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-Python fallback.

Runs each hot kernel on identical inputs at sizes where the inner loops
dominate, and prints per-kernel timings plus speedup.  Exercise:

    python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import random
import sys
import time

from xcover import _kernels_py

try:
    from xcover import _kernels
except ImportError:
    _kernels = None


def timed(fn, *args, repeat=1):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_cover(n, m, seed, p_frac=1.0):
    rng = random.Random(seed)
    masks = [rng.getrandbits(n) | (1 << rng.randrange(n)) for _ in range(m)]
    full = (1 << n) - 1
    union = 0
    for s in masks:
        union |= s
    masks.append(full & ~union | (1 << 0))  # keep the instance feasible
    p = max(1, int(n * p_frac))
    return ("cover_optimum", f"n={n} m={m} p={p}",
            lambda mod: mod.cover_optimum(masks, n, p))


def bench_exact(n, m, seed):
    rng = random.Random(seed)
    masks = []
    # block partition plus noise so an exact cover exists
    block = max(1, n // 6)
    for lo in range(0, n, block):
        masks.append(((1 << min(block, n - lo)) - 1) << lo)
    while len(masks) < m:
        masks.append(rng.getrandbits(n))
    return ("exact_cover_optimum", f"n={n} m={m}",
            lambda mod: mod.exact_cover_optimum(masks, n))


def bench_ham(n, seed):
    rng = random.Random(seed)
    succ = [0] * n
    order = list(range(n))
    rng.shuffle(order)
    for i in range(n):
        succ[order[i]] |= 1 << order[(i + 1) % n]
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < 0.3:
                succ[u] |= 1 << v
    return ("ham_cycle", f"n={n}", lambda mod: mod.ham_cycle(succ, n))


def bench_colorful(k, n, trials, seed):
    rng = random.Random(seed)
    parent = [-1] + [rng.randrange(v) for v in range(1, k)]
    orient = [0] + [rng.choice([0, 1, 2]) for _ in range(k - 1)]
    children = [[] for _ in range(k)]
    for v in range(1, k):
        children[parent[v]].append(v)
    post = []
    stack = [(0, False)]
    while stack:
        v, done = stack.pop()
        if done:
            post.append(v)
        else:
            stack.append((v, True))
            stack.extend((c, False) for c in children[v])
    out_adj = [0] * n
    in_adj = [0] * n
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < 0.3:
                out_adj[u] |= 1 << v
                in_adj[v] |= 1 << u

    def run(mod):
        hits = 0
        for t in range(trials):
            trng = random.Random(seed * 1_000_003 + t)
            colors = [trng.randrange(k) for _ in range(n)]
            if mod.colorful_trial_yes(k, post, parent, orient,
                                      out_adj, in_adj, colors) >= 0:
                hits += 1
        return hits

    return ("colorful_trial_yes", f"k={k} n={n} trials={trials}", run)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller sizes")
    args = parser.parse_args()
    if _kernels is None:
        print("compiled kernels unavailable; build with "
              "`python setup.py build_ext --inplace` first", file=sys.stderr)
        return 1
    if args.quick:
        cases = [
            bench_cover(14, 40, 1),
            bench_cover(14, 40, 2, p_frac=0.6),
            bench_exact(14, 40, 3),
            bench_ham(13, 4),
            bench_colorful(6, 14, 400, 5),
        ]
    else:
        cases = [
            bench_cover(18, 60, 1),
            bench_cover(20, 60, 2, p_frac=0.6),
            bench_exact(18, 60, 3),
            bench_ham(17, 4),
            bench_colorful(7, 16, 2000, 5),
        ]
    width = max(len(f"{name} ({detail})") for name, detail, _ in cases)
    print(f"{'kernel':<{width + 2}} {'cython':>10} {'python':>10} {'speedup':>9}")
    for name, detail, run in cases:
        t_c, r_c = timed(run, _kernels)
        t_p, r_p = timed(run, _kernels_py)
        label = f"{name} ({detail})"
        same = "ok" if _comparable(r_c) == _comparable(r_p) else "MISMATCH"
        print(f"{label:<{width + 2}} {t_c:>9.3f}s {t_p:>9.3f}s {t_p / t_c:>8.1f}x  {same}")
    return 0


def _comparable(result):
    if isinstance(result, tuple):
        return result[0]  # optimum value; certificates may differ in ties
    if isinstance(result, list):
        return len(result)
    return result


if __name__ == "__main__":
    sys.exit(main())
