# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: bit-parallel clique search, density block scan, Jacobi symbols.

Semantics match ``_pykernels`` exactly, including branching order.
"""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free, calloc
from libc.string cimport memcpy
from libc.stdint cimport uint64_t, int64_t
from posix.time cimport clock_gettime, timespec, CLOCK_MONOTONIC

cnp.import_array()


cdef inline int _jacobi(int64_t a, int64_t n) nogil:
    cdef int t = 1
    cdef int64_t r
    a %= n
    if a < 0:
        a += n
    while a != 0:
        while (a & 1) == 0:
            a >>= 1
            r = n & 7
            if r == 3 or r == 5:
                t = -t
        a, n = n, a
        if (a & 3) == 3 and (n & 3) == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def jacobi_many(values, long long n):
    cdef cnp.int64_t[::1] v = np.ascontiguousarray(values, dtype=np.int64)
    cdef Py_ssize_t i, k = v.shape[0]
    out = np.empty(k, dtype=np.int8)
    cdef cnp.int8_t[::1] o = out
    with nogil:
        for i in range(k):
            o[i] = _jacobi(v[i], n)
    return out


# ---------------------------------------------------------------- clique search

cdef struct Search:
    int n
    int W
    uint64_t* adj
    int best
    int* witness
    int* stack
    int csize
    long long nodes
    long long budget
    int aborted
    int root_class
    double deadline
    uint64_t** P
    uint64_t** U
    uint64_t** Q
    int** order
    int** start


cdef inline double _now() nogil:
    cdef timespec ts
    clock_gettime(CLOCK_MONOTONIC, &ts)
    return ts.tv_sec + 1e-9 * ts.tv_nsec


cdef int _alloc_depth(Search* S, int d) nogil:
    if S.P[d] != NULL:
        return 0
    S.P[d] = <uint64_t*> malloc(S.W * sizeof(uint64_t))
    S.U[d] = <uint64_t*> malloc(S.W * sizeof(uint64_t))
    S.Q[d] = <uint64_t*> malloc(S.W * sizeof(uint64_t))
    S.order[d] = <int*> malloc((S.n + 1) * sizeof(int))
    S.start[d] = <int*> malloc((S.n + 2) * sizeof(int))
    if S.P[d] == NULL or S.U[d] == NULL or S.Q[d] == NULL or S.order[d] == NULL or S.start[d] == NULL:
        return -1
    return 0


cdef int _expand(Search* S, int d) nogil:
    cdef int W = S.W
    cdef uint64_t* P = S.P[d]
    cdef uint64_t* U = S.U[d]
    cdef uint64_t* Q = S.Q[d]
    cdef int* order = S.order[d]
    cdef int* start = S.start[d]
    cdef uint64_t* row
    cdef uint64_t* NP
    cdef int w, k, v, i, cnt, kmin, ncls, csize, wi
    cdef uint64_t low, x
    cdef bint any_u, nonempty

    S.nodes += 1
    if S.nodes > S.budget:
        S.aborted = 1
        return 0
    if S.deadline > 0 and (S.nodes & 1023) == 0 and _now() > S.deadline:
        S.aborted = 2
        return 0
    csize = S.csize
    kmin = S.best - csize
    memcpy(U, P, W * sizeof(uint64_t))
    k = 0
    cnt = 0
    ncls = 0
    while True:
        any_u = False
        for w in range(W):
            if U[w]:
                any_u = True
                break
        if not any_u:
            break
        k += 1
        start[k] = cnt
        memcpy(Q, U, W * sizeof(uint64_t))
        for wi in range(W):
            while Q[wi]:
                x = Q[wi]
                low = x & (~x + 1)
                v = wi * 64 + __builtin_ctzll(x)
                U[wi] &= ~low
                Q[wi] &= ~low
                row = S.adj + <Py_ssize_t> v * W
                for w in range(wi, W):
                    Q[w] &= ~row[w]
                if k > kmin:
                    order[cnt] = v
                    cnt += 1
    ncls = k
    start[ncls + 1] = cnt

    if S.P[d + 1] == NULL:
        if _alloc_depth(S, d + 1) != 0:
            return -1
    NP = S.P[d + 1]
    for k in range(ncls, 0, -1):
        if csize + k <= S.best:
            return 0
        if d == 0:
            S.root_class = k
        for i in range(start[k], start[k + 1]):
            if csize + k <= S.best:
                return 0
            v = order[i]
            row = S.adj + <Py_ssize_t> v * W
            nonempty = False
            for w in range(W):
                NP[w] = P[w] & row[w]
                if NP[w]:
                    nonempty = True
            S.stack[csize] = v
            if nonempty:
                S.csize = csize + 1
                if _expand(S, d + 1) != 0:
                    return -1
                S.csize = csize
                if S.aborted:
                    return 0
            elif csize + 1 > S.best:
                S.best = csize + 1
                memcpy(S.witness, S.stack, (csize + 1) * sizeof(int))
            P[v >> 6] &= ~((<uint64_t> 1) << (v & 63))
    return 0


cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


def max_clique(adj, int n, int lower, long long budget, double time_limit=0.0):
    """Branch-and-bound maximum clique; see ``_pykernels.max_clique``."""
    cdef cnp.uint64_t[:, ::1] A = np.ascontiguousarray(adj, dtype=np.uint64)
    cdef Search S
    cdef int d, rc, i
    if n == 0:
        return [], 0, False, lower
    S.n = n
    S.W = A.shape[1]
    S.adj = <uint64_t*> &A[0, 0]
    S.best = lower
    S.csize = 0
    S.nodes = 0
    S.budget = budget
    S.aborted = 0
    S.root_class = n
    S.deadline = _now() + time_limit if time_limit > 0 else 0.0
    S.witness = <int*> malloc((n + 1) * sizeof(int))
    S.stack = <int*> malloc((n + 1) * sizeof(int))
    S.P = <uint64_t**> calloc(n + 2, sizeof(uint64_t*))
    S.U = <uint64_t**> calloc(n + 2, sizeof(uint64_t*))
    S.Q = <uint64_t**> calloc(n + 2, sizeof(uint64_t*))
    S.order = <int**> calloc(n + 2, sizeof(int*))
    S.start = <int**> calloc(n + 2, sizeof(int*))
    found = []
    try:
        if _alloc_depth(&S, 0) != 0:
            raise MemoryError
        for i in range(S.W):
            S.P[0][i] = 0
        for i in range(n):
            S.P[0][i >> 6] |= (<uint64_t> 1) << (i & 63)
        with nogil:
            rc = _expand(&S, 0)
        if rc != 0:
            raise MemoryError
        if S.best > lower:
            found = [S.witness[i] for i in range(S.best)]
        if S.aborted:
            return found, min(S.nodes, budget), True, max(S.best, S.root_class)
        return found, S.nodes, False, S.best
    finally:
        for d in range(n + 2):
            if S.P[d] != NULL:
                free(S.P[d]); free(S.U[d]); free(S.Q[d]); free(S.order[d]); free(S.start[d])
        free(S.P); free(S.U); free(S.Q); free(S.order); free(S.start)
        free(S.witness); free(S.stack)


# ---------------------------------------------------------------- density scan

cdef enum:
    MAXF = 16


def scan_block(long long lo, long long hi, base_primes, double log_x, double loglog_bound,
               x_eps, int variant, y, ylim):
    """Tally density-condition failures for ``lo <= m < hi``; see ``_pykernels.scan_block``."""
    cdef cnp.int64_t[::1] bp = np.ascontiguousarray(base_primes, dtype=np.int64)
    cdef double[::1] xe = np.ascontiguousarray(x_eps, dtype=np.float64)
    cdef double[::1] yy = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] yl = np.ascontiguousarray(ylim, dtype=np.float64)
    cdef int K = xe.shape[0]
    cdef int J = yy.shape[0] - 1
    counts_arr = np.zeros(5 + K, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = counts_arr
    cdef Py_ssize_t n = hi - lo
    if n <= 0:
        return counts_arr
    rem_arr = np.arange(lo, hi, dtype=np.int64)
    cdef cnp.int64_t[::1] rem = rem_arr
    fp_arr = np.zeros((n, MAXF), dtype=np.int64)
    fe_arr = np.zeros((n, MAXF), dtype=np.int32)
    nf_arr = np.zeros(n, dtype=np.int32)
    cdef cnp.int64_t[:, ::1] fp = fp_arr
    cdef cnp.int32_t[:, ::1] fe = fe_arr
    cdef cnp.int32_t[::1] nf = nf_arr
    cdef Py_ssize_t i, s, bi, nbp = bp.shape[0]
    cdef long long p, r, m, pw, q, sm, d, tpow
    cdef int e, a, b, k, j, c, nq, ok, fail
    cdef long long qs[MAXF]
    cdef int vec[128]
    if J >= 127:
        raise ValueError("grid too long")
    with nogil:
        for bi in range(nbp):
            p = bp[bi]
            if p * p >= hi:
                break
            s = (p - lo % p) % p
            i = s
            while i < n:
                r = rem[i]
                e = 0
                while r % p == 0:
                    r = r // p
                    e += 1
                rem[i] = r
                c = nf[i]
                fp[i, c] = p
                fe[i, c] = e
                nf[i] = c + 1
                i += p
        for i in range(n):
            m = lo + i
            if m < 1:
                continue
            if rem[i] > 1:
                c = nf[i]
                fp[i, c] = rem[i]
                fe[i, c] = 1
                nf[i] = c + 1
            counts[0] += 1
            pw = 1
            for a in range(nf[i]):
                if fe[i, a] >= 2:
                    tpow = 1
                    for b in range(fe[i, a]):
                        tpow *= fp[i, a]
                    pw *= tpow
            if pw > log_x:
                counts[1] += 1
            if nf[i] > loglog_bound:
                counts[2] += 1
            # 3 mod 4 primes of m / P(m), descending (factors are stored ascending)
            nq = 0
            for a in range(nf[i] - 1, -1, -1):
                if fe[i, a] == 1 and (fp[i, a] & 3) == 3:
                    qs[nq] = fp[i, a]
                    nq += 1
            for k in range(K):
                ok = 0
                j = 0
                while j < nq:
                    q = qs[j]
                    sm = 1
                    if variant == 0:
                        for b in range(j + 1, nq):
                            sm *= qs[b]
                    else:
                        for a in range(nf[i]):
                            if (fp[i, a] & 3) == 3 and fp[i, a] < q:
                                for b in range(fe[i, a]):
                                    sm *= fp[i, a]
                    if q > xe[k] and q > sm * sm:
                        ok = 1
                        break
                    j += 2
                if not ok:
                    counts[5 + k] += 1
            if J >= 0:
                fail = 0
                for j in range(J + 1):
                    d = 1
                    for a in range(nf[i]):
                        if (fp[i, a] & 3) == 3 and fp[i, a] < yy[j]:
                            for b in range(fe[i, a]):
                                d *= fp[i, a]
                    if d > yl[j]:
                        fail = 1
                        break
                if fail:
                    counts[3] += 1
                if J >= 4:
                    for j in range(J + 1):
                        vec[j] = 0
                    for a in range(nf[i]):
                        p = fp[i, a]
                        if (p & 3) != 3:
                            continue
                        for j in range(1, J + 1):
                            if yy[j] < p and p <= yy[j - 1]:
                                vec[j] += 1
                                break
                    for j in range(1, J - 2):
                        if vec[j] == 1 and vec[j + 1] == 0 and vec[j + 2] == 1 and vec[j + 3] == 0:
                            counts[4] += 1
                            break
    return counts_arr
