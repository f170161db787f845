import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffsquares import _pykernels, kernels
from diffsquares.numtheory import jacobi, primes_up_to

from oracles import clique_number_naive

BACKENDS = [_pykernels]
try:
    from diffsquares import _ckernels

    BACKENDS.append(_ckernels)
except ImportError:  # pragma: no cover - compiled extension missing
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


def _pack(adj: list[list[bool]]) -> np.ndarray:
    n = len(adj)
    words = max(1, (n + 63) // 64)
    out = np.zeros((n, words), dtype=np.uint64)
    for i in range(n):
        for j in range(n):
            if adj[i][j]:
                out[i, j // 64] |= np.uint64(1) << np.uint64(j % 64)
    return out


def _random_graph(rng: random.Random, n: int, p: float) -> list[list[bool]]:
    adj = [[False] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                adj[i][j] = adj[j][i] = True
    return adj


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__)
def test_max_clique_matches_oracle(mod):
    rng = random.Random(11)
    for _ in range(40):
        n = rng.randint(1, 40)
        adj = _random_graph(rng, n, rng.choice([0.2, 0.5, 0.8]))
        w, nodes, stopped, bound = mod.max_clique(_pack(adj), n, 0, 10**7)
        assert not stopped
        assert len(w) == bound == clique_number_naive(adj)
        assert all(adj[a][b] for a in w for b in w if a != b)


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__)
def test_max_clique_lower_bound_and_budget(mod):
    rng = random.Random(5)
    adj = _random_graph(rng, 60, 0.6)
    omega = clique_number_naive(adj)
    w, _, stopped, bound = mod.max_clique(_pack(adj), 60, omega, 10**7)
    assert w == [] and not stopped and bound == omega
    w, nodes, stopped, bound = mod.max_clique(_pack(adj), 60, 0, 3)
    assert stopped and nodes == 3 and bound >= omega


@needs_ext
def test_kernel_parity_on_random_graphs():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 130)
        adj = _random_graph(rng, n, rng.random())
        packed = _pack(adj)
        for budget in (50, 10**6):
            a = _ckernels.max_clique(packed, n, 0, budget)
            b = _pykernels.max_clique(packed, n, 0, budget)
            assert a == b


@needs_ext
def test_time_limit_stops_search():
    rng = random.Random(1)
    adj = _random_graph(rng, 400, 0.9)
    w, nodes, stopped, bound = _ckernels.max_clique(_pack(adj), 400, 0, 10**12, 0.2)
    assert stopped and nodes < 10**12 and bound >= len(w)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-10**12, 10**12), min_size=1, max_size=30),
       st.integers(1, 10**6).map(lambda k: 2 * k + 1))
def test_jacobi_many_backends(values, n):
    expect = [jacobi(v, n) for v in values]
    for mod in BACKENDS:
        assert mod.jacobi_many(np.array(values, dtype=np.int64), n).tolist() == expect


def _scan_reference(lo, hi, log_x, llb, x_eps, variant, y, ylim):
    """Per-m recomputation of the block tallies with plain trial division."""
    K = len(x_eps)
    J = len(y) - 1
    counts = [0] * (5 + K)
    for m in range(max(lo, 1), hi):
        f, r, p = [], m, 2
        while p * p <= r:
            if r % p == 0:
                e = 0
                while r % p == 0:
                    r //= p
                    e += 1
                f.append((p, e))
            p += 1
        if r > 1:
            f.append((r, 1))
        counts[0] += 1
        counts[1] += math.prod(p**e for p, e in f if e >= 2) > log_x
        counts[2] += len(f) > llb
        qs = sorted((p for p, e in f if e == 1 and p % 4 == 3), reverse=True)
        for k in range(K):
            ok = False
            for j in range(0, len(qs), 2):
                if variant == 0:
                    s = math.prod(qs[j + 1 :])
                else:
                    s = math.prod(p**e for p, e in f if p % 4 == 3 and p < qs[j])
                if qs[j] > x_eps[k] and qs[j] > s * s:
                    ok = True
                    break
            counts[5 + k] += not ok
        if J >= 0:
            counts[3] += any(
                math.prod(p**e for p, e in f if p % 4 == 3 and p < y[j]) > ylim[j] for j in range(J + 1)
            )
            if J >= 4:
                vec = [sum(1 for p, _ in f if p % 4 == 3 and y[j] < p <= y[j - 1]) for j in range(1, J + 1)]
                counts[4] += any(vec[i : i + 4] == [1, 0, 1, 0] for i in range(J - 3))
    return counts


GRIDS = [
    ([], []),
    ([3000.0, 700.0, 150.0, 40.0, 12.0, 5.0], [3000.0**1.1, 700.0**1.1, 150.0**1.1, 40.0, 12.0, 5.0]),
    ([500.0, 100.0, 30.0, 8.0, 3.5, 3.1, 2.0], [1e4, 50.0, 30.0, 8.0, 3.5, 3.1, 2.0]),
]


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__)
@pytest.mark.parametrize("grid", range(len(GRIDS)))
@pytest.mark.parametrize("variant", [0, 1])
def test_scan_block_matches_reference(mod, grid, variant):
    y, ylim = GRIDS[grid]
    lo, hi = 1, 6000
    base = primes_up_to(100)
    args = (math.log(1e5), 4.9, [3.0, 30.0, 300.0], variant, y, ylim)
    got = mod.scan_block(lo, hi, base, *args)
    assert got.tolist() == _scan_reference(lo, hi, *args)


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__)
def test_scan_block_offset_blocks_add_up(mod):
    base = primes_up_to(200)
    args = (math.log(4e4), 4.5, [10.0], 0, GRIDS[1][0], GRIDS[1][1])
    whole = mod.scan_block(1, 40001, base, *args)
    parts = sum(mod.scan_block(lo, min(lo + 7777, 40001), base, *args) for lo in range(1, 40001, 7777))
    assert whole.tolist() == parts.tolist()
    assert mod.scan_block(10, 10, base, *args).tolist() == [0] * 6


def test_pure_fallback_selected_by_env():
    import os
    import subprocess
    import sys

    code = ("import diffsquares as d; from diffsquares.search import max_avoiding; "
            "print(d.BACKEND, max_avoiding(65).best_size, max_avoiding(101).best_size)")
    env = dict(os.environ, DIFFSQUARES_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "7", "5"]
