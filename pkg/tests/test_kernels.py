"""Backend parity: the compiled kernels must agree with the pure fallback."""

import random

import pytest

from xcover import _kernels_py
from xcover import kernels

try:
    from xcover import _kernels
except ImportError:
    _kernels = None

needs_compiled = pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")


def test_backend_reported():
    assert kernels.backend_name() in ("cython", "python")


@needs_compiled
def test_cover_optimum_parity():
    rng = random.Random(10)
    for _ in range(400):
        n = rng.randint(0, 10)
        m = rng.randint(0, 12)
        masks = [rng.getrandbits(n) for _ in range(m)]
        p = rng.randint(0, n)
        a = _kernels.cover_optimum(masks, n, p)
        b = _kernels_py.cover_optimum(masks, n, p)
        assert (a is None) == (b is None)
        if a is not None:
            assert a[0] == b[0]
            for res in (a, b):
                got = 0
                for j in res[1]:
                    got |= masks[j]
                assert bin(got).count("1") >= p
                assert len(res[1]) == res[0]


@needs_compiled
def test_exact_cover_parity():
    rng = random.Random(11)
    for _ in range(400):
        n = rng.randint(0, 10)
        m = rng.randint(0, 12)
        masks = [rng.getrandbits(n) for _ in range(m)]
        a = _kernels.exact_cover_optimum(masks, n)
        b = _kernels_py.exact_cover_optimum(masks, n)
        assert (a is None) == (b is None)
        if a is not None:
            assert a[0] == b[0]
            for res in (a, b):
                got = 0
                for j in res[1]:
                    assert got & masks[j] == 0
                    got |= masks[j]
                assert got == (1 << n) - 1


@needs_compiled
def test_ham_cycle_parity():
    rng = random.Random(12)
    for _ in range(300):
        n = rng.randint(2, 9)
        succ = [0] * n
        for u in range(n):
            for v in range(n):
                if u != v and rng.random() < 0.35:
                    succ[u] |= 1 << v
        a = _kernels.ham_cycle(succ, n)
        b = _kernels_py.ham_cycle(succ, n)
        assert (a is None) == (b is None)
        for order in (a, b):
            if order is None:
                continue
            assert sorted(order) == list(range(n))
            assert order[0] == 0
            for i in range(n):
                assert succ[order[i]] >> order[(i + 1) % n] & 1


@needs_compiled
def test_colorful_trial_parity():
    rng = random.Random(13)
    for _ in range(300):
        k = rng.randint(1, 7)
        n = rng.randint(1, 10)
        # random tree over 0..k-1 rooted at 0, random orientations
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
                if u != v and rng.random() < 0.4:
                    out_adj[u] |= 1 << v
                    in_adj[v] |= 1 << u
        colors = [rng.randrange(k) for _ in range(n)]
        a = _kernels.colorful_trial_yes(k, post, parent, orient, out_adj, in_adj, colors)
        b = _kernels_py.colorful_trial_yes(k, post, parent, orient, out_adj, in_adj, colors)
        assert (a >= 0) == (b >= 0), (k, n, parent, orient, colors)
