"""Explicit avoiding sets.

* ``cohen_set``: two-colour Ramsey recursion on ``Z_p``, ``p = 1 mod 4``.
* ``transitive_chain`` / ``two_prime_set``: transitive subtournaments of the
  quadratic-residue tournament mod ``q = 3 mod 4``, paired antidiagonally
  over ``Z_{q1 q2}``.
* ``p_square_set``: the multiples of ``p`` in ``Z_{p^2}``.
* ``ruzsa65``: a fixed 7-element avoiding subset of ``Z_65``.
* ``product_set``: CRT product of the above over the factorization of ``m``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .kernels import jacobi_many
from .numtheory import Factorization, factorize, is_prime, least_nonresidue
from .residues import is_avoiding

__all__ = [
    "ConstructionError",
    "ConstructionOutput",
    "cohen_set",
    "transitive_chain",
    "two_prime_set",
    "p_square_set",
    "ruzsa65",
    "product_set",
    "best_construction",
    "crt_combine",
]

# Above these sizes the recursions run on a window instead of all of Z_p.
FULL_RECURSION_LIMIT = 1 << 22
# Witness from exhaustive branch-and-bound over Z_65 (the maximum there is 7).
RUZSA65 = (0, 5, 11, 17, 32, 38, 59)


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class ConstructionOutput:
    m: int
    set: tuple[int, ...]
    method: str
    guaranteed_size: float

    def __len__(self) -> int:
        return len(self.set)

    def to_json(self) -> dict:
        d = asdict(self)
        d["set"] = list(self.set)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ConstructionOutput":
        return cls(int(d["m"]), tuple(int(a) for a in d["set"]), d["method"], float(d["guaranteed_size"]))


@lru_cache(maxsize=64)
def _square_table(p: int) -> np.ndarray:
    t = np.zeros(p, dtype=bool)
    a = np.arange(p // 2 + 1, dtype=np.int64)
    t[(a * a) % p] = True
    return t


def _is_square(values: np.ndarray, p: int) -> np.ndarray:
    """Membership in ``R_p`` for an array of residues (zero counts as a square)."""
    if p <= FULL_RECURSION_LIMIT:
        return _square_table(p)[values % p]
    return jacobi_many(values % p, p) >= 0


def _check_prime(p: int, cls: int | None, name: str) -> None:
    if not is_prime(p) or (cls is not None and p % 4 != cls):
        want = f"a prime = {cls} mod 4" if cls is not None else "a prime"
        raise ConstructionError(f"{name} needs {want}, got {p}")


def _ramsey_pivots(p: int) -> tuple[list[int], list[bool]]:
    """Pivots of the two-colour recursion and whether each pivot's class was 'square'."""
    live = np.arange(p, dtype=np.int64)
    pivots: list[int] = []
    colours: list[bool] = []
    while live.size:
        v = int(live[0])
        rest = live[1:]
        sq = _is_square(rest - v, p)
        squares, nonsquares = rest[sq], rest[~sq]
        pivots.append(v)
        # ties go to the square class
        if squares.size >= nonsquares.size:
            colours.append(True)
            live = squares
        else:
            colours.append(False)
            live = nonsquares
    return pivots, colours


def _greedy_window(p: int, target: int) -> list[int]:
    """Greedy nonsquare-difference clique in ``{0, .., N-1}``, doubling ``N`` until ``target``."""
    N = 1 << (target + 3)
    while True:
        live = np.arange(min(N, p), dtype=np.int64)
        chosen: list[int] = []
        while live.size:
            v = int(live[0])
            chosen.append(v)
            rest = live[1:]
            live = rest[jacobi_many((rest - v) % p, p) == -1]
        if len(chosen) >= target or N >= p:
            return chosen
        N *= 2


@lru_cache(maxsize=4096)
def cohen_set(p: int) -> ConstructionOutput:
    """Avoiding set in ``Z_p`` of size at least ``log p / (2 log 2)``, ``p = 1 mod 4``.

    Each step takes the smallest live residue as pivot and keeps the larger
    of its square-difference and nonsquare-difference classes.  Pivots of the
    majority colour plus the last pivot form a monochromatic clique; a
    square-coloured clique is multiplied by the least nonresidue.

    For ``p`` beyond ``FULL_RECURSION_LIMIT`` a greedy nonsquare clique on a
    window ``{0, .., N-1}`` is used instead, with ``N`` doubled until the
    same size floor is met.
    """
    _check_prime(p, 1, "cohen_set")
    floor = math.log(p) / (2 * math.log(2))
    if p <= FULL_RECURSION_LIMIT:
        pivots, colours = _ramsey_pivots(p)
        head, last = pivots[:-1], pivots[-1]
        sq = [v for v, c in zip(head, colours) if c]
        ns = [v for v, c in zip(head, colours) if not c]
        if len(ns) >= len(sq):
            out = ns + [last]
        else:
            xi = least_nonresidue(p)
            out = [v * xi % p for v in sq + [last]]
    else:
        out = _greedy_window(p, math.ceil(floor))
    res = ConstructionOutput(p, tuple(sorted(out)), "cohen", floor)
    if len(res.set) < floor:
        raise AssertionError(f"cohen_set({p}) below its floor")
    return res


@lru_cache(maxsize=65536)
def transitive_chain(q: int, window: int | None = None) -> tuple[int, ...]:
    """Chain ``a_1, .., a_k`` in ``Z_q`` with ``a_s - a_t`` a nonzero square for all ``s < t``.

    Halving on the residue tournament (``-1`` is a nonsquare, so exactly one
    of ``d, -d`` is a square).  With ``window`` the recursion starts from
    ``{0, .., window-1}``; the length is at least ``floor(log2 n) + 1`` for
    ``n`` starting vertices.
    """
    _check_prime(q, 3, "transitive_chain")
    n = q if window is None else min(q, window)
    live = np.arange(n, dtype=np.int64)
    table = _square_table(q) if q <= FULL_RECURSION_LIMIT else None
    head: list[int] = []
    tail: list[int] = []
    while live.size:
        v = int(live[0])
        rest = live[1:]
        d = v - rest
        d[d < 0] += q
        # v - u is a square: v precedes u
        beaten = table[d] if table is not None else jacobi_many(d, q) >= 0
        after = rest[beaten]
        if 2 * after.size >= rest.size:
            head.append(v)
            live = after
        else:
            tail.append(v)
            live = rest[~beaten]
    return tuple(head + tail[::-1])


def crt_combine(parts: Sequence[tuple[int, Sequence[int]]]) -> tuple[int, list[int]]:
    """All CRT combinations of sets ``A_i`` in ``Z_{n_i}`` (pairwise coprime ``n_i``)."""
    M = 1
    xs = [0]
    for k, A in parts:
        inv = pow(M, -1, k) if k > 1 else 0
        xs = [x + M * ((a - x) * inv % k) for x in xs for a in A]
        M *= k
    return M, sorted(xs)


def two_prime_set(q1: int, q2: int) -> ConstructionOutput:
    """Avoiding set in ``Z_{q1 q2}`` of size at least ``log q2 / log 2`` (``q1 > q2``, both ``3 mod 4``).

    Chains of both primes are truncated to the shorter length ``k`` and
    paired antidiagonally: ``(a1_s, a2_{k+1-s})``.
    """
    if q1 <= q2:
        raise ConstructionError(f"two_prime_set needs q1 > q2, got {q1}, {q2}")
    _check_prime(q1, 3, "two_prime_set")
    _check_prime(q2, 3, "two_prime_set")
    c2 = transitive_chain(q2)
    window = None if q1 <= FULL_RECURSION_LIMIT else 1 << q2.bit_length()
    c1 = transitive_chain(q1, window)
    k = min(len(c1), len(c2))
    pairs = [(c1[s], c2[k - 1 - s]) for s in range(k)]
    inv = pow(q1, -1, q2)
    A = sorted(a1 + q1 * ((a2 - a1) * inv % q2) for a1, a2 in pairs)
    return ConstructionOutput(q1 * q2, tuple(A), "two_prime", math.log(q2) / math.log(2))


def p_square_set(p: int) -> ConstructionOutput:
    _check_prime(p, None, "p_square_set")
    return ConstructionOutput(p * p, tuple(range(0, p * p, p)), "p_square", float(p))


def ruzsa65() -> ConstructionOutput:
    return ConstructionOutput(65, RUZSA65, "ruzsa65", 7.0)


def product_set(f: Factorization | int, check: bool = True) -> ConstructionOutput:
    """CRT product of per-factor constructions over ``m``.

    Primes ``p = 1 mod 4`` dividing ``m`` once contribute ``cohen_set(p)``;
    primes ``3 mod 4`` dividing ``m`` once are sorted descending and paired,
    each pair contributing ``two_prime_set``; everything else (2, squared
    primes, an unpaired ``q``) is folded into one factor contributing ``{0}``.
    """
    if not isinstance(f, Factorization):
        f = factorize(f)
    parts: list[tuple[int, Sequence[int]]] = []
    guarantee = 1.0
    rest = 1
    qs = []
    for p, e in f.factors:
        if e == 1 and p % 4 == 1:
            c = cohen_set(p)
            parts.append((p, c.set))
            guarantee *= c.guaranteed_size
        elif e == 1 and p % 4 == 3:
            qs.append(p)
        else:
            rest *= p**e
    qs.sort(reverse=True)
    for i in range(0, len(qs) - 1, 2):
        c = two_prime_set(qs[i], qs[i + 1])
        parts.append((c.m, c.set))
        guarantee *= c.guaranteed_size
    if len(qs) % 2:
        rest *= qs[-1]
    parts.append((rest, (0,)))
    M, A = crt_combine(parts)
    assert M == f.m
    out = ConstructionOutput(f.m, tuple(A), "product", guarantee)
    if check and not is_avoiding(out.set, f.m):
        raise AssertionError(f"product_set({f.m}) is not avoiding")
    return out


def best_construction(m: int) -> ConstructionOutput:
    """Largest of the applicable constructions for ``m`` (ties keep the first found)."""
    f = factorize(m)
    best = product_set(f)
    cands = []
    if m == 65:
        cands.append(ruzsa65())
    if len(f.factors) == 1 and f.factors[0][1] == 2:
        cands.append(p_square_set(f.factors[0][0]))
    for c in cands:
        if len(c.set) > len(best.set):
            best = c
    return best
