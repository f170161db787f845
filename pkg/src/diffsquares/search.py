"""Maximum avoiding sets by branch-and-bound clique search.

The avoidance graph is a Cayley graph, so a maximum clique may be assumed to
contain 0; the search runs on the neighbourhood of 0.  When the connection
set is periodic with period ``h | m`` the graph is a blow-up of the Cayley
graph on ``Z_h`` by independent twin classes, and the search runs there.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np

from . import kernels
from .bounds import bound_report
from .constructions import best_construction
from .numtheory import factorize
from .residues import (
    GRAPH_LIMIT,
    AvoidanceGraph,
    ModulusError,
    avoidance_graph,
    is_avoiding,
    lift_from_odd_part,
)

__all__ = [
    "DEFAULT_BUDGET",
    "SearchResult",
    "ResultCache",
    "max_avoiding",
    "scan_table",
    "connection_period",
    "CACHE_ENV",
]

DEFAULT_BUDGET = 10_000_000
CACHE_ENV = "DIFFSQUARES_CACHE"
CACHE_FILE = "max_avoiding.csv"


@dataclass
class SearchResult:
    m: int
    best_size: int
    witness: list[int]
    lower_bound: int
    upper_bound: int
    exact: bool
    nodes_explored: int = 0
    elapsed: float = 0.0
    conventional: bool = False
    cached: bool = False
    error: str | None = None
    schema: int = field(default=1)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "SearchResult":
        return cls(**d)

    def cache_line(self) -> str:
        wit = "-".join(str(a) for a in self.witness)
        return f"{self.m},{self.best_size},{int(self.exact)},{self.upper_bound},{wit}"

    @classmethod
    def from_cache_line(cls, line: str) -> "SearchResult":
        m, size, exact, ub, wit = line.strip().split(",")
        witness = [int(a) for a in wit.split("-")] if wit else []
        size_i = int(size)
        return cls(int(m), size_i, witness, size_i, int(ub), exact == "1", cached=True)

    @property
    def failed(self) -> bool:
        return self.error is not None


def connection_period(G: AvoidanceGraph) -> int:
    """Smallest ``h | m`` with ``S + h = S`` for the connection set ``S``."""
    m = G.m
    S = G.connection
    for h in sorted(d for d in range(1, m + 1) if m % d == 0):
        if h == m or np.array_equal(S, np.roll(S, h)):
            return h
    return m


def _validate(m: int, budget: int) -> None:
    if budget <= 0:
        raise ValueError(f"budget must be positive, got {budget}")
    if m < 1:
        raise ModulusError(f"modulus must be positive, got {m}")
    if m > GRAPH_LIMIT:
        raise ModulusError(f"m={m} exceeds the search bound {GRAPH_LIMIT}")


def max_avoiding(m: int, budget: int = DEFAULT_BUDGET, time_limit: float | None = None,
                 seed: bool = True) -> SearchResult:
    """Largest ``A`` in ``Z_m`` with ``(A - A) & R_m = {0}``.

    ``budget`` counts search nodes; with ``time_limit`` (seconds) the search
    may also stop on the clock, which makes the outcome timing dependent.
    A stopped search returns ``exact=False`` with the best proven upper bound.
    The lower bound is seeded from the best explicit construction.
    """
    m = int(m)
    _validate(m, budget)
    t0 = time.perf_counter()
    if m == 1:
        return SearchResult(1, 1, [0], 1, 1, True, 0, 0.0, conventional=True)
    G = avoidance_graph(m)
    h = connection_period(G)
    S = G.connection[:h]
    # the quotient by the period has the same maximum, so its bounds apply too
    analytic = min(bound_report(factorize(m)).best, bound_report(factorize(h)).best)
    upper = min(int(math.floor(analytic + 1e-9)), h)
    seed_set: list[int] = [0]
    if seed:
        c = best_construction(m)
        if len(c.set) > 1:
            seed_set = sorted(c.set)
    lower = len(seed_set)
    if lower > upper:
        raise AssertionError(f"construction of size {lower} exceeds the proven bound {upper} for m={m}")
    nbrs = np.flatnonzero(S).tolist()
    witness = seed_set
    nodes = 0
    stopped = False
    if lower >= upper or not nbrs:
        proven = lower if not nbrs else upper
    else:
        Gh = G if h == m else AvoidanceGraph(h, S)
        rows = Gh.induced_bitrows(nbrs)
        # look for cliques of size >= lower so the witness comes from the search
        found, nodes, stopped, sub_bound = kernels.max_clique(
            rows, len(nbrs), lower - 2, budget, time_limit or 0.0
        )
        if found and len(found) + 1 >= lower:
            witness = [0] + sorted(nbrs[i] for i in found)
        proven = min(upper, 1 + sub_bound) if stopped else len(witness)
    best = len(witness)
    proven = max(proven, best)
    if not is_avoiding(witness, m):
        raise AssertionError(f"search produced a non-avoiding witness for m={m}")
    return SearchResult(
        m=m,
        best_size=best,
        witness=sorted(witness),
        lower_bound=best,
        upper_bound=proven,
        exact=best == proven,
        nodes_explored=nodes,
        elapsed=time.perf_counter() - t0,
    )


SHIPPED_CACHE = Path(__file__).with_name("data") / CACHE_FILE


class ResultCache:
    """Append-only cache of search results, one ``m,best,exact,upper,witness`` line per modulus.

    The directory comes from the argument, else the ``DIFFSQUARES_CACHE``
    environment variable; with neither the cache lives in memory.  Results
    shipped with the package are preloaded unless ``shipped=False``.  An
    exact entry is never replaced by an inexact one.
    """

    def __init__(self, directory: str | os.PathLike | None = None, shipped: bool = True):
        directory = directory or os.environ.get(CACHE_ENV)
        self.path = Path(directory) / CACHE_FILE if directory else None
        self._entries: dict[int, SearchResult] = {}
        sources = [SHIPPED_CACHE] if shipped else []
        if self.path is not None:
            sources.append(self.path)
        for src in sources:
            if src.exists():
                for line in src.read_text().splitlines():
                    if line.strip():
                        self._add(SearchResult.from_cache_line(line))

    def _add(self, r: SearchResult) -> None:
        prev = self._entries.get(r.m)
        if prev is None or r.exact or not prev.exact:
            self._entries[r.m] = r

    def get(self, m: int) -> SearchResult | None:
        return self._entries.get(m)

    def put(self, r: SearchResult) -> None:
        if r.failed or r.conventional:
            return
        self._add(r)
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a") as fh:
                fh.write(r.cache_line() + "\n")

    def __len__(self) -> int:
        return len(self._entries)


def _is_squarefree(m: int) -> bool:
    return factorize(m).is_squarefree


FILTERS: dict[str, Callable[[int], bool]] = {
    "squarefree": _is_squarefree,
    "odd": lambda m: m % 2 == 1,
    "prime": lambda m: len(factorize(m).factors) == 1 and factorize(m).factors[0][1] == 1,
}


def _solve(args) -> SearchResult:
    m, budget, time_limit = args
    try:
        return max_avoiding(m, budget, time_limit)
    except (ValueError, AssertionError) as exc:
        return SearchResult(m, 0, [], 0, 0, False, error=f"{type(exc).__name__}: {exc}")


def lift_result(r: SearchResult, m: int) -> SearchResult:
    """Result for ``m = 2 r.m`` (``r.m`` odd) from the one for ``r.m``; both have the same maximum."""
    w = lift_from_odd_part(r.witness, m)
    if not is_avoiding(w, m):
        raise AssertionError(f"lifted witness is not avoiding for m={m}")
    return SearchResult(m, r.best_size, w, r.best_size, r.upper_bound, r.exact)


def scan_table(lo: int, hi: int, budget: int = DEFAULT_BUDGET, filters: Iterable[str] = (),
               cache: ResultCache | None = None, threads: int = 1, time_limit: float | None = None,
               retry_inexact: bool = False) -> list[SearchResult]:
    """One result per ``m`` in ``[lo, hi]`` passing every filter, ascending in ``m``.

    Cached exact results are reused; cached inexact ones too unless
    ``retry_inexact``.  Per-``m`` errors become failure records.  For
    ``m = 2 mod 4`` an available result for ``m/2`` is lifted instead of
    searching again.
    """
    preds = [FILTERS[f] for f in filters]
    ms = [m for m in range(max(lo, 1), hi + 1) if all(p(m) for p in preds)]
    out: dict[int, SearchResult] = {}
    todo = []
    for m in ms:
        hit = cache.get(m) if cache is not None else None
        if hit is not None and (hit.exact or not retry_inexact):
            out[m] = hit
        else:
            todo.append(m)
    def usable(m1: int) -> SearchResult | None:
        r = out.get(m1) or (cache.get(m1) if cache is not None else None)
        if r is None or r.failed or (retry_inexact and not r.exact):
            return None
        return r

    def record(r: SearchResult) -> None:
        out[r.m] = r
        if cache is not None:
            cache.put(r)

    # odd moduli first so their even doubles can be lifted
    doubles = {m for m in todo if m % 4 == 2 and m > 2}
    for batch in ([m for m in todo if m not in doubles], sorted(doubles)):
        jobs = []
        for m in batch:
            half = usable(m // 2) if m in doubles else None
            if half is not None:
                record(lift_result(half, m))
            else:
                jobs.append((m, budget, time_limit))
        if threads > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                results: Iterator[SearchResult] = pool.map(_solve, jobs, chunksize=1)
                for r in results:
                    record(r)
        else:
            for job in jobs:
                record(_solve(job))
    return [out[m] for m in ms]
