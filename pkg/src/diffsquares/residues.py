"""Squares modulo m, the avoidance predicate and the avoidance graph.

A set ``A`` of residues mod ``m`` is *avoiding* when no difference of two
distinct elements is a square mod ``m``.  Avoiding sets are exactly the
cliques of the Cayley graph on ``Z_m`` whose connection set is
``{d : d and -d are both non-squares}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .numtheory import Factorization, crt, factorize, jacobi

__all__ = [
    "ENUMERATION_LIMIT",
    "GRAPH_LIMIT",
    "ResidueSet",
    "AvoidanceGraph",
    "residue_set",
    "is_avoiding",
    "avoidance_graph",
    "odd_part_reduction",
    "lift_from_odd_part",
    "nonresidue_pairs",
    "ModulusError",
]

ENUMERATION_LIMIT = 1 << 25
GRAPH_LIMIT = 1 << 17
# Primes up to this size get a full residue lookup table in the per-prime test.
_TABLE_PRIME_LIMIT = 1 << 20
# Below this the full table of squares is cheaper than factoring.
_SMALL_MODULUS = 1 << 16


class ModulusError(ValueError):
    pass


def _squares_table(m: int) -> np.ndarray:
    members = np.zeros(m, dtype=bool)
    a = np.arange(m // 2 + 1, dtype=np.int64)
    members[(a * a) % m] = True
    return members


@dataclass(frozen=True, eq=False)
class ResidueSet:
    """Membership structure for ``R_m = {a^2 mod m}``.

    ``mode`` is ``"enumerated"`` (a boolean table of length ``m``) or
    ``"crt-backed"`` (per-prime Legendre tests, squarefree ``m`` only).
    """

    m: int
    mode: str
    members: np.ndarray | None = None
    odd_primes: tuple[int, ...] = ()

    def __contains__(self, a: int) -> bool:
        a %= self.m
        if self.members is not None:
            return bool(self.members[a])
        return all(jacobi(a, p) >= 0 for p in self.odd_primes)

    def __len__(self) -> int:
        if self.members is not None:
            return int(self.members.sum())
        n = 1
        for p in self.odd_primes:
            n *= (p + 1) // 2
        return n

    def to_list(self) -> list[int]:
        if self.members is None:
            raise ModulusError("crt-backed residue sets are not materialized")
        return np.flatnonzero(self.members).tolist()


@lru_cache(maxsize=16)
def residue_set(m: int) -> ResidueSet:
    """Squares mod ``m``; enumerated when ``m <= 2**25``, otherwise CRT-backed."""
    m = int(m)
    if m < 1:
        raise ModulusError(f"modulus must be positive, got {m}")
    if m <= ENUMERATION_LIMIT:
        members = _squares_table(m)
        members.setflags(write=False)
        return ResidueSet(m, "enumerated", members)
    f = factorize(m)
    if not f.is_squarefree:
        raise ModulusError(f"m={m} is above the enumeration bound and not squarefree")
    return ResidueSet(m, "crt-backed", None, tuple(p for p in f.primes if p != 2))


@lru_cache(maxsize=256)
def _residue_table(p: int) -> np.ndarray:
    return _squares_table(p)


def nonresidue_pairs(A: Sequence[int], f: Factorization) -> np.ndarray:
    """Boolean matrix ``M[i, j] = (A[i] - A[j]) is not a square mod m`` for squarefree ``m``.

    Works one prime at a time: a difference is a square mod a squarefree
    ``m`` iff it is a square (or zero) modulo every odd prime factor.
    """
    n = len(A)
    out = np.zeros((n, n), dtype=bool)
    for p in f.primes:
        if p == 2:
            continue
        vals = np.fromiter((a % p for a in A), dtype=np.int64, count=n)
        u, inv = np.unique(vals, return_inverse=True)
        diff = (u[:, None] - u[None, :]) % p
        if p <= _TABLE_PRIME_LIMIT:
            nonres = ~_residue_table(p)[diff]
        else:
            flat = [jacobi(int(d), p) == -1 for d in diff.ravel().tolist()]
            nonres = np.array(flat, dtype=bool).reshape(diff.shape)
        out |= nonres[inv][:, inv]
    return out


def is_avoiding(A: Iterable[int], m: int) -> bool:
    """True iff ``(A - A) & R_m == {0}``.

    Squarefree ``m`` is checked prime by prime without materializing
    ``R_m``, so moduli near ``10**18`` are fine.
    """
    A = sorted(set(int(a) for a in A))
    m = int(m)
    if any(a < 0 or a >= m for a in A):
        raise ValueError(f"elements of A must lie in [0, {m})")
    if len(A) <= 1:
        return True
    f = factorize(m) if m > _SMALL_MODULUS else None
    if f is None or (not f.is_squarefree and m <= ENUMERATION_LIMIT):
        members = residue_set(m).members
        arr = np.asarray(A, dtype=np.int64)
        diff = (arr[:, None] - arr[None, :]) % m
        hit = members[diff]
        np.fill_diagonal(hit, False)
        return not hit.any()
    if not f.is_squarefree:
        raise ModulusError(f"m={m} is above the enumeration bound and not squarefree")
    nonres = nonresidue_pairs(A, f)
    np.fill_diagonal(nonres, True)
    return bool(nonres.all())


@dataclass(frozen=True, eq=False)
class AvoidanceGraph:
    """Cayley graph on ``Z_m`` with connection set ``S = {d : d, -d not in R_m}``.

    ``a ~ b`` iff ``(a - b) mod m`` lies in ``S``; rows are shifts of ``S``,
    so only ``S`` is stored and dense rows are built on demand.
    """

    m: int
    connection: np.ndarray

    def adjacent(self, a: int, b: int) -> bool:
        return a != b and bool(self.connection[(a - b) % self.m])

    def row(self, a: int) -> np.ndarray:
        return np.roll(self.connection, a)

    def neighbors(self, a: int) -> list[int]:
        return ((np.flatnonzero(self.connection) + a) % self.m).tolist()

    def is_clique(self, A: Iterable[int]) -> bool:
        arr = np.asarray(sorted(set(A)), dtype=np.int64)
        if len(arr) <= 1:
            return True
        diff = (arr[:, None] - arr[None, :]) % self.m
        ok = self.connection[diff]
        np.fill_diagonal(ok, True)
        return bool(ok.all())

    @property
    def degree(self) -> int:
        return int(self.connection.sum())

    def induced_bitrows(self, vertices: Sequence[int]) -> np.ndarray:
        """Adjacency among ``vertices`` as packed uint64 rows (bit ``j`` of row ``i``)."""
        v = np.asarray(vertices, dtype=np.int64)
        n = len(v)
        words = max(1, (n + 63) // 64)
        rows = np.zeros((n, words * 64), dtype=bool)
        for i in range(n):
            rows[i, :n] = self.connection[(v - v[i]) % self.m]
        packed = np.packbits(rows, axis=1, bitorder="little")
        return packed.view(np.uint64).reshape(n, words).copy()


def avoidance_graph(m: int) -> AvoidanceGraph:
    m = int(m)
    if m < 1:
        raise ModulusError(f"modulus must be positive, got {m}")
    if m > GRAPH_LIMIT:
        raise ModulusError(f"m={m} exceeds the graph size bound {GRAPH_LIMIT}")
    members = residue_set(m).members
    nonres = ~members
    conn = nonres & nonres[(-np.arange(m)) % m]
    conn.setflags(write=False)
    return AvoidanceGraph(m, conn)


def odd_part_reduction(m: int) -> int:
    """For ``m = 2 m1`` with ``m1`` odd return ``m1``; both moduli have the same maximum."""
    if m % 2 == 1 or m % 4 == 0:
        raise ModulusError(f"odd_part_reduction needs m = 2 mod 4, got {m}")
    return m // 2


def lift_from_odd_part(A1: Iterable[int], m: int) -> list[int]:
    """Embed an avoiding set mod ``m/2`` into ``Z_m`` as ``{(0, x)}`` under CRT."""
    m1 = odd_part_reduction(m)
    return sorted(crt((0, x), (2, m1)) for x in A1)
