"""Compare the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Times maximum-clique search on avoidance graphs and a sieve-block scan; both
backends must return identical results.
"""

import argparse
import math
import time

from diffsquares import _pykernels
from diffsquares.numtheory import primes_up_to
from diffsquares.residues import avoidance_graph

try:
    from diffsquares import _ckernels
except ImportError:  # extension not built
    _ckernels = None

CLIQUE_MODULI = (65, 101, 145, 221, 257)
SCAN_X = 200_000


def _best(fn, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def bench_clique(impl, m):
    G = avoidance_graph(m)
    vs = G.neighbors(0)
    rows = G.induced_bitrows(vs)
    return lambda: impl.max_clique(rows, len(vs), 0, 10**9)[:2]


def bench_scan(impl, x):
    base = primes_up_to(math.isqrt(x) + 1)
    lx = math.log(x)
    return lambda: impl.scan_block(1, x + 1, base, lx, 2 * math.log(lx), [x**0.5, x**0.3], 0, [], []).tolist()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()
    impls = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'case':<22}" + "".join(f"{n:>12}" for n, _ in impls) + "     speedup")
    cases = [(f"max_clique m={m}", lambda impl, m=m: bench_clique(impl, m)) for m in CLIQUE_MODULI]
    cases.append((f"scan_block x={SCAN_X}", lambda impl: bench_scan(impl, SCAN_X)))
    for name, make in cases:
        times, outs = [], []
        for _, impl in impls:
            t, out = _best(make(impl), a.repeat)
            times.append(t)
            outs.append(out)
        if len(outs) == 2 and outs[0] != outs[1]:
            raise SystemExit(f"backends disagree on {name}")
        speed = f"{times[0] / times[1]:10.1f}x" if len(times) == 2 else "       n/a"
        print(f"{name:<22}" + "".join(f"{t:12.4f}" for t in times) + speed)


if __name__ == "__main__":
    main()
