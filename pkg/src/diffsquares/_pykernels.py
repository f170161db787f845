"""Pure-Python implementations of the hot kernels.

These mirror ``_ckernels.pyx`` call for call and are used when the compiled
extension is unavailable or ``DIFFSQUARES_PURE=1`` is set.
"""

from __future__ import annotations

import time

import numpy as np


def jacobi_many(values, n: int) -> np.ndarray:
    out = np.empty(len(values), dtype=np.int8)
    for i, a in enumerate(np.asarray(values, dtype=np.int64).tolist()):
        a %= n
        k = n
        t = 1
        while a:
            while a % 2 == 0:
                a //= 2
                if k % 8 in (3, 5):
                    t = -t
            a, k = k, a
            if a % 4 == 3 and k % 4 == 3:
                t = -t
            a %= k
        out[i] = t if k == 1 else 0
    return out


def _rows_to_ints(adj: np.ndarray) -> list[int]:
    n, words = adj.shape
    rows = []
    for i in range(n):
        v = 0
        for w in range(words - 1, -1, -1):
            v = (v << 64) | int(adj[i, w])
        rows.append(v)
    return rows


class _Abort(Exception):
    pass


def max_clique(adj: np.ndarray, n: int, lower: int, budget: int, time_limit: float = 0.0):
    """Branch-and-bound maximum clique on packed bit rows.

    Returns ``(best_vertices, nodes, exhausted, root_bound)`` where
    ``best_vertices`` is empty unless a clique larger than ``lower`` was
    found, ``exhausted`` means the budget ran out, and ``root_bound`` is a
    proven upper bound on the clique number of the whole graph.
    """
    rows = _rows_to_ints(adj) if n else []
    deadline = time.monotonic() + time_limit if time_limit > 0 else 0.0
    state = {"best": lower, "witness": [], "nodes": 0, "root_class": n}
    stack: list[int] = []

    def expand(P: int, depth: int) -> None:
        state["nodes"] += 1
        if state["nodes"] > budget:
            raise _Abort
        if deadline and state["nodes"] % 1024 == 0 and time.monotonic() > deadline:
            raise _Abort
        csize = len(stack)
        kmin = state["best"] - csize
        # greedy sequential colouring; classes[k-1] lists colour-k vertices
        classes: list[list[int]] = []
        U = P
        k = 0
        while U:
            k += 1
            Q = U
            cls = []
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                U &= ~low
                Q &= ~low
                Q &= ~rows[v]
                if k > kmin:
                    cls.append(v)
            classes.append(cls)
        for k in range(len(classes), 0, -1):
            if csize + k <= state["best"]:
                return
            if depth == 0:
                state["root_class"] = k
            for v in classes[k - 1]:
                if csize + k <= state["best"]:
                    return
                newP = P & rows[v]
                stack.append(v)
                if newP:
                    expand(newP, depth + 1)
                elif csize + 1 > state["best"]:
                    state["best"] = csize + 1
                    state["witness"] = list(stack)
                stack.pop()
                P &= ~(1 << v)

    exhausted = False
    try:
        if n:
            expand((1 << n) - 1, 0)
        root_bound = state["best"]
    except _Abort:
        exhausted = True
        state["nodes"] = min(state["nodes"], budget)
        root_bound = max(state["best"], state["root_class"])
    return state["witness"], state["nodes"], exhausted, root_bound


def scan_block(lo: int, hi: int, base_primes, log_x: float, loglog_bound: float,
               x_eps, variant: int, y, ylim):
    """Tally density-condition failures for ``lo <= m < hi``.

    ``x_eps`` holds thresholds ``x**eps`` (one per epsilon); ``variant`` is 0
    for the d_{2j-1} smooth part and 1 for ``D(m, q)``.  ``y``/``ylim`` are
    the grid ``y_0..y_J`` and ``y_j**(theta/2)`` (empty: skip (iv) and E).

    Returns int64 counts ``[total, fail_i, fail_ii, fail_iv, E_hits, fail_iii[0..K-1]]``.
    """
    x_eps = [float(t) for t in x_eps]
    y = [float(t) for t in y]
    ylim = [float(t) for t in ylim]
    K = len(x_eps)
    J = len(y) - 1
    counts = np.zeros(5 + K, dtype=np.int64)
    n = hi - lo
    if n <= 0:
        return counts
    rem = list(range(lo, hi))
    facs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for p in np.asarray(base_primes).tolist():
        if p * p >= hi:
            break
        start = (-lo) % p
        for i in range(start, n, p):
            r = rem[i]
            e = 0
            while r % p == 0:
                r //= p
                e += 1
            rem[i] = r
            facs[i].append((p, e))
    for i in range(n):
        m = lo + i
        if m < 1:
            continue
        f = facs[i]
        if rem[i] > 1:
            f.append((rem[i], 1))
        counts[0] += 1
        pw = 1
        for p, e in f:
            if e >= 2:
                pw *= p**e
        if pw > log_x:
            counts[1] += 1
        if len(f) > loglog_bound:
            counts[2] += 1
        qs = sorted((p for p, e in f if e == 1 and p % 4 == 3), reverse=True)
        for k in range(K):
            ok = False
            for j in range(0, len(qs), 2):
                q = qs[j]
                if variant == 0:
                    s = 1
                    for t in qs[j + 1:]:
                        s *= t
                else:
                    s = 1
                    for p, e in f:
                        if p % 4 == 3 and p < q:
                            s *= p**e
                if q > x_eps[k] and q > s * s:
                    ok = True
                    break
            if not ok:
                counts[5 + k] += 1
        if J >= 0 and y:
            fail = False
            for j in range(J + 1):
                d = 1
                for p, e in f:
                    if p % 4 == 3 and p < y[j]:
                        d *= p**e
                if d > ylim[j]:
                    fail = True
                    break
            if fail:
                counts[3] += 1
            if J >= 4:
                vec = [0] * (J + 1)
                for p, _ in f:
                    if p % 4 != 3:
                        continue
                    for j in range(1, J + 1):
                        if y[j] < p <= y[j - 1]:
                            vec[j] += 1
                            break
                for j in range(1, J - 2):
                    if vec[j] == 1 and vec[j + 1] == 0 and vec[j + 2] == 1 and vec[j + 3] == 0:
                        counts[4] += 1
                        break
    return counts
