"""Integer and modular-arithmetic primitives.

Factorization of 64-bit integers, prime sieves restricted to classes mod 4,
Legendre/Jacobi symbols, the 3-mod-4 smooth part ``D(m, y)``, the least
quadratic nonresidue and prime-reciprocal sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Factorization",
    "PrimeClassSet",
    "factorize",
    "is_prime",
    "omega",
    "omega3",
    "powerful_part",
    "smooth_part_3mod4",
    "jacobi",
    "legendre",
    "least_nonresidue",
    "primes_up_to",
    "primes_in_class",
    "h1",
    "h2",
    "spf_sieve",
    "crt",
]

MAX_M = 1 << 64
TRIAL_LIMIT = 10**6
SEGMENT = 1 << 22

# Deterministic Miller-Rabin witnesses for n < 3.3e24, in particular all 64-bit n.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def primes_up_to(n: int) -> np.ndarray:
    """All primes ``p <= n`` as an int64 array (plain Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    return np.flatnonzero(sieve).astype(np.int64)


_SMALL_PRIMES: list[int] = primes_up_to(1000).tolist()
_TRIAL_PRIMES: np.ndarray | None = None


def _trial_primes() -> np.ndarray:
    global _TRIAL_PRIMES
    if _TRIAL_PRIMES is None:
        _TRIAL_PRIMES = primes_up_to(TRIAL_LIMIT)
    return _TRIAL_PRIMES


def is_prime(n: int) -> bool:
    """Deterministic primality test, exact for every ``n < 2**64``."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:12]:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int) -> int:
    """Return a nontrivial factor of the odd composite ``n`` (Pollard-Brent)."""
    # c runs through 1, 2, ... so the factor found is reproducible.
    for c in range(1, 1000):
        y, r, q = 2, 1, 1
        g = 1
        m = 128
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"Pollard-Brent failed on {n}")


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split(r, out)
        _split(r, out)
        return
    d = _brent(n)
    _split(d, out)
    _split(n // d, out)


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition ``m = prod p**e`` with primes increasing."""

    m: int
    factors: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self) -> None:
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"malformed factor list {self.factors!r}")
            prod *= p**e
            last = p
        if prod != self.m:
            raise ValueError(f"factors multiply to {prod}, not {self.m}")

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    @classmethod
    def from_dict(cls, m: int, d: dict[int, int]) -> "Factorization":
        return cls(m, tuple(sorted(d.items())))

    def __int__(self) -> int:
        return self.m


def factorize(m: int) -> Factorization:
    """Factor ``1 <= m < 2**64``.

    Trial division by primes below ``10**6`` (stopping at the square root of
    the cofactor), then Pollard-Brent on whatever composite remains.
    """
    m = int(m)
    if not 1 <= m < MAX_M:
        raise ValueError(f"m must satisfy 1 <= m < 2**64, got {m}")
    out: dict[int, int] = {}
    n = m
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1 and n >= 1000 * 1000 and not is_prime(n):
        for p in _trial_primes()[168:].tolist():
            if p * p > n:
                break
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out[p] = e
                if is_prime(n):
                    break
    if n > 1:
        _split(n, out)
    return Factorization.from_dict(m, out)


def _as_factorization(f: Factorization | int) -> Factorization:
    return f if isinstance(f, Factorization) else factorize(f)


def omega(f: Factorization | int) -> int:
    return len(_as_factorization(f).factors)


def omega3(f: Factorization | int) -> int:
    """Number of distinct prime divisors congruent to 3 mod 4."""
    return sum(1 for p, _ in _as_factorization(f).factors if p % 4 == 3)


def powerful_part(f: Factorization | int) -> int:
    out = 1
    for p, e in _as_factorization(f).factors:
        if e >= 2:
            out *= p**e
    return out


def smooth_part_3mod4(f: Factorization | int, y: float, exclude_powerful: bool = False) -> int:
    """``D(m, y)``: product of the full powers ``q**a || m`` over ``q < y``, ``q = 3 mod 4``.

    With ``exclude_powerful`` only primes dividing ``m`` exactly once count,
    i.e. the product is taken over the 3-mod-4 primes of ``m / P(m)``.
    """
    out = 1
    for p, e in _as_factorization(f).factors:
        if p % 4 == 3 and p < y and not (exclude_powerful and e >= 2):
            out *= p**e
    return out


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol ``(a/n)`` for odd positive ``n``."""
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs odd positive n, got {n}")
    a %= n
    t = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def legendre(a: int, p: int) -> int:
    """Legendre symbol ``(a/p)`` for an odd prime ``p``; raises otherwise."""
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise ValueError(f"Legendre symbol needs an odd prime, got {p}")
    return jacobi(a, p)


def least_nonresidue(p: int) -> int:
    """Smallest ``n >= 2`` with ``(n/p) = -1``."""
    if p < 3 or not is_prime(p):
        raise ValueError(f"least_nonresidue needs an odd prime, got {p}")
    n = 2
    while jacobi(n, p) != -1:
        n += 1
    return n


@dataclass(frozen=True)
class PrimeClassSet:
    """Primes in ``(lo, hi]`` restricted to a residue class mod 4."""

    label: str
    primes: tuple[int, ...]
    lo: float
    hi: float
    residue_class: int | str = "all"

    def __post_init__(self) -> None:
        for p in self.primes:
            if not self.lo < p <= self.hi:
                raise ValueError(f"prime {p} outside ({self.lo}, {self.hi}]")
            if self.residue_class != "all" and p % 4 != self.residue_class:
                raise ValueError(f"prime {p} not in class {self.residue_class} mod 4")

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self) -> Iterator[int]:
        return iter(self.primes)

    def __contains__(self, p: object) -> bool:
        return p in self._set

    @property
    def _set(self) -> frozenset[int]:
        s = self.__dict__.get("_cached_set")
        if s is None:
            s = frozenset(self.primes)
            object.__setattr__(self, "_cached_set", s)
        return s


def _segmented_primes(lo: int, hi: int) -> np.ndarray:
    """Primes in ``(lo, hi]``, sieving windows of ``SEGMENT`` integers."""
    base = primes_up_to(math.isqrt(hi))
    chunks = []
    start = lo + 1
    while start <= hi:
        stop = min(hi + 1, start + SEGMENT)
        mark = np.ones(stop - start, dtype=bool)
        for p in base.tolist():
            if p * p >= stop:
                break
            first = max(p * p, -(-start // p) * p)
            mark[first - start :: p] = False
        vals = np.arange(start, stop, dtype=np.int64)[mark]
        chunks.append(vals[vals >= 2])
        start = stop
    return np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)


def primes_in_class(lo: float, hi: float, residue_class: int | str = "all", label: str = "") -> PrimeClassSet:
    """All primes ``lo < p <= hi`` with ``p = residue_class (mod 4)``.

    ``residue_class`` is 1, 3 or ``"all"``; 2 belongs to neither odd class.
    """
    if hi < lo:
        raise ValueError(f"empty interval: hi={hi} < lo={lo}")
    if residue_class not in (1, 3, "all"):
        raise ValueError(f"residue_class must be 1, 3 or 'all', got {residue_class!r}")
    ilo = math.floor(lo)
    ihi = math.floor(hi)
    if ihi <= SEGMENT:
        ps = primes_up_to(ihi)
        ps = ps[ps > ilo]
    else:
        ps = _segmented_primes(max(ilo, 1), ihi)
    if residue_class != "all":
        ps = ps[ps % 4 == residue_class]
    return PrimeClassSet(label or f"({lo}, {hi}]", tuple(ps.tolist()), lo, hi, residue_class)


def h1(T: Iterable[int]) -> float:
    total = 0.0
    for p in sorted(T):
        total += 1.0 / p
    return total


def h2(T: Iterable[int]) -> float:
    total = 0.0
    for p in sorted(T):
        total += 1.0 / (p * p)
    return total


def spf_sieve(limit: int) -> np.ndarray:
    """Smallest-prime-factor table ``spf[n]`` for ``0 <= n <= limit`` (``spf[0]=spf[1]=0``)."""
    dtype = np.int32 if limit < 2**31 else np.int64
    spf = np.zeros(limit + 1, dtype=dtype)
    if limit < 2:
        return spf
    spf[2::2] = 2
    for p in range(3, math.isqrt(limit) + 1, 2):
        if spf[p] == 0:
            view = spf[p * p :: 2 * p]
            view[view == 0] = p
    rest = spf == 0
    rest[:2] = False
    spf[rest] = np.flatnonzero(rest)
    return spf


def factorize_with_spf(m: int, spf: np.ndarray) -> Factorization:
    """Factor ``m`` using a precomputed smallest-prime-factor table."""
    out: dict[int, int] = {}
    n = m
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out[p] = e
    return Factorization(m, tuple(sorted(out.items())))


def crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Unique ``x mod prod(moduli)`` with ``x = r_i (mod n_i)``; moduli pairwise coprime."""
    x, n = 0, 1
    for r, k in zip(residues, moduli):
        # x + n*t = r (mod k)
        t = (r - x) * pow(n, -1, k) % k
        x += n * t
        n *= k
    return x % n
