"""Closed-form upper bounds on avoiding sets and the ``M_eps`` membership test."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .numtheory import Factorization, factorize, is_prime, powerful_part, primes_up_to

__all__ = [
    "InapplicableBound",
    "BoundEntry",
    "BoundReport",
    "theorem11_q",
    "theorem11_bound",
    "prior_work_bound",
    "trivial_prime_bound",
    "hanson_petridis_bound",
    "compose_bound",
    "m_epsilon_member",
    "bound_report",
    "truncation_check",
    "count_m_epsilon_members",
    "count_m_epsilon_members_by_primes",
    "reports_to_csv",
]


class InapplicableBound(ValueError):
    """The bound's hypotheses do not hold for this modulus."""


def _fact(f: Factorization | int) -> Factorization:
    return f if isinstance(f, Factorization) else factorize(f)


def theorem11_q(f: Factorization) -> int:
    """Least prime ``q = 3 mod 4`` dividing ``m`` if there are an odd number of them, else 1."""
    qs = [p for p, _ in f.factors if p % 4 == 3]
    return qs[0] if len(qs) % 2 == 1 else 1


def theorem11_bound(f: Factorization | int) -> float:
    """``m^(1/2) q^(-1/2) (10 w)^(2 w)`` for squarefree ``m`` (may exceed ``m``)."""
    f = _fact(f)
    if not f.is_squarefree:
        raise InapplicableBound(f"m={f.m} is not squarefree")
    w = len(f.factors)
    q = theorem11_q(f)
    return math.sqrt(f.m / q) * float(10 * w) ** (2 * w)


def prior_work_bound(f: Factorization | int) -> float:
    """Earlier squarefree bound ``m^(1/2) (3 w)^(3 w / 2)`` (prior work, comparison only)."""
    f = _fact(f)
    if not f.is_squarefree:
        raise InapplicableBound(f"m={f.m} is not squarefree")
    w = len(f.factors)
    return math.sqrt(f.m) * float(3 * w) ** (1.5 * w)


def trivial_prime_bound(p: int) -> float:
    """1 for ``p = 2`` or ``p = 3 mod 4``; ``sqrt(p)`` for ``p = 1 mod 4``."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p % 4 == 1:
        return math.sqrt(p)
    return 1.0


def hanson_petridis_bound(p: int) -> float:
    if not (is_prime(p) and p % 4 == 1):
        raise InapplicableBound(f"{p} is not a prime = 1 mod 4")
    return math.sqrt(p / 2) + 1


def compose_bound(m1: int, g_m2: float) -> float:
    """``|A| <= m1 * g(m2)`` for ``m = m1 m2`` with coprime factors."""
    if m1 < 1:
        raise ValueError(f"m1 must be >= 1, got {m1}")
    if g_m2 < 1:
        raise ValueError(f"g(m2) must be >= 1, got {g_m2}")
    return m1 * g_m2


def _exact_fraction(eps: float | Fraction) -> Fraction:
    return eps if isinstance(eps, Fraction) else Fraction(repr(float(eps)))


def _q_at_least_power(q: int, m: int, eps: Fraction) -> bool:
    """Exact test of ``q >= m^(1 - eps)``."""
    a, b = eps.numerator, eps.denominator
    return q**b >= m ** (b - a)


def m_epsilon_member(f: Factorization | int, eps: float | Fraction) -> bool:
    """True iff some prime ``q = 3 mod 4`` dividing ``m`` has ``q >= m^(1-eps)``.

    ``eps`` is read as the decimal it prints as (0.45 means 45/100) and the
    comparison is done in integers.
    """
    e = _exact_fraction(eps)
    if not 0 < e < Fraction(1, 2):
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    f = _fact(f)
    return any(p % 4 == 3 and _q_at_least_power(p, f.m, e) for p, _ in f.factors)


@dataclass(frozen=True)
class BoundEntry:
    name: str
    value: float | None
    applicable: bool
    reason: str = ""
    prior_work: bool = False


@dataclass(frozen=True)
class BoundReport:
    m: int
    bounds: tuple[BoundEntry, ...]
    best: float
    best_name: str
    schema: int = field(default=1)

    def effective(self, name: str) -> float | None:
        for b in self.bounds:
            if b.name == name and b.applicable and b.value is not None:
                return min(b.value, float(self.m))
        return None

    def get(self, name: str) -> BoundEntry:
        for b in self.bounds:
            if b.name == name:
                return b
        raise KeyError(name)

    def to_json(self) -> dict:
        d = asdict(self)
        d["bounds"] = [asdict(b) for b in self.bounds]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "BoundReport":
        return cls(
            int(d["m"]),
            tuple(BoundEntry(**b) for b in d["bounds"]),
            float(d["best"]),
            d["best_name"],
            int(d.get("schema", 1)),
        )


def _entry(name, fn, *args, prior_work=False) -> BoundEntry:
    try:
        return BoundEntry(name, float(fn(*args)), True, "", prior_work)
    except InapplicableBound as exc:
        return BoundEntry(name, None, False, str(exc), prior_work)


def bound_report(f: Factorization | int) -> BoundReport:
    """Every bound that applies to ``m``, plus the trivial clamp ``|A| <= m``.

    ``best`` is the smallest applicable value; prior-work comparison bounds
    are listed but never chosen as ``best``.
    """
    f = _fact(f)
    m = f.m
    entries = [BoundEntry("modulus", float(m), True, "|A| <= m")]
    entries.append(_entry("theorem11", theorem11_bound, f))
    if is_prime(m):
        entries.append(BoundEntry("trivial_prime", trivial_prime_bound(m), True))
    else:
        entries.append(BoundEntry("trivial_prime", None, False, "m is not prime"))
    entries.append(_entry("hanson_petridis", hanson_petridis_bound, m))
    qs = [p for p, e in f.factors if e == 1 and p % 4 == 3]
    if qs and not is_prime(m):
        q = qs[-1]
        entries.append(BoundEntry("compose_q", compose_bound(m // q, 1.0), True, f"m/q with q={q}"))
    else:
        entries.append(BoundEntry("compose_q", None, False, "no composite split off a prime q = 3 mod 4"))
    if m % 4 == 2 and m > 2:
        # avoiding sets in Z_m and Z_{m/2} have the same maximum size
        half = bound_report(m // 2)
        entries.append(BoundEntry("odd_part", half.best, True, f"bound for m/2 via {half.best_name}"))
    else:
        entries.append(BoundEntry("odd_part", None, False, "m is not 2 mod 4"))
    entries.append(_entry("prior_work", prior_work_bound, f, prior_work=True))
    if f.is_squarefree and m > 1 and all(p % 4 == 1 for p in f.primes):
        entries.append(BoundEntry("matolcsi_ruzsa", math.sqrt(m), True, "", True))
    else:
        entries.append(BoundEntry("matolcsi_ruzsa", None, False, "needs squarefree m with all primes = 1 mod 4", True))
    best, best_name = float(m), "modulus"
    for b in entries:
        if b.applicable and not b.prior_work and b.value is not None and min(b.value, m) < best:
            best, best_name = min(b.value, float(m)), b.name
    return BoundReport(m, tuple(entries), best, best_name)


def reports_to_csv(reports) -> str:
    names = [b.name for b in reports[0].bounds] if reports else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", *names, "best", "best_name"])
    for r in reports:
        vals = []
        for b in r.bounds:
            vals.append("" if not b.applicable else repr(b.value))
        w.writerow([r.m, *vals, repr(r.best), r.best_name])
    return buf.getvalue()


def truncation_check(f: Factorization | int, x: float, eps: float) -> dict:
    """Evaluate the truncation argument for one ``m``.

    Takes the odd-indexed 3-mod-4 primes ``q`` of ``m / P(m)`` (descending),
    splits off ``m1 = P(m) d`` with ``d`` the product of the smaller ones,
    applies the composition bound with the squarefree bound on ``m2 = m / m1`` and
    reports the smallest assembled bound next to ``m^(1/2 - eps/5)`` and the
    hypotheses (i), (ii), (iii) and the explicit-factor threshold.
    """
    f = _fact(f)
    m = f.m
    log_x = math.log(x)
    P = powerful_part(f)
    w = len(f.factors)
    qs = sorted((p for p, e in f.factors if e == 1 and p % 4 == 3), reverse=True)
    best = None
    best_q = None
    iii = False
    for j in range(0, len(qs), 2):
        q = qs[j]
        d = math.prod(qs[j + 1 :])
        m2 = m // (P * d)
        w2 = len(factorize(m2).factors)
        bound = P * d * math.sqrt(m2 / q) * float(10 * w2) ** (2 * w2)
        if best is None or bound < best:
            best, best_q = bound, q
        if q > x**eps and q > d * d:
            iii = True
    target = m ** (0.5 - eps / 5)
    return {
        "m": m,
        "hyp_i": P <= log_x,
        "hyp_ii": w <= 2 * math.log(log_x),
        "hyp_iii": iii,
        "explicit_factor_small": float(10 * w) ** (2 * w) * math.sqrt(P) <= m ** (eps / 20),
        "assembled_bound": best,
        "q": best_q,
        "target": target,
        "bound_met": best is not None and best <= target,
    }


def _largest_prime_factor(x: int) -> np.ndarray:
    lpf = np.zeros(x + 1, dtype=np.int32 if x < 2**31 else np.int64)
    for p in primes_up_to(x).tolist():
        lpf[p::p] = p
    return lpf


def count_m_epsilon_members(x: int, eps: float | Fraction) -> int:
    """``#{m <= x : m_epsilon_member(m, eps)}`` via a largest-prime-factor sieve.

    A qualifying ``q`` exceeds ``sqrt(m)``, so it is the largest prime factor.
    """
    e = _exact_fraction(eps)
    lpf = _largest_prime_factor(x)
    m = np.arange(x + 1, dtype=np.float64)
    q = lpf.astype(np.int64)
    cand = (q % 4 == 3)
    cand[:2] = False
    idx = np.flatnonzero(cand)
    lhs = np.log(q[idx].astype(np.float64))
    rhs = float(1 - e) * np.log(m[idx])
    sure = lhs - rhs > 1e-9
    unsure = np.abs(lhs - rhs) <= 1e-9
    total = int(sure.sum())
    for i in idx[unsure].tolist():
        total += _q_at_least_power(int(q[i]), i, e)
    return total


def _iroot(n: int, k: int) -> int:
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def count_m_epsilon_members_by_primes(x: int, eps: float | Fraction) -> int:
    """Same count summed over primes: ``m = q k`` qualifies iff ``k^(b-a) <= q^a`` (``eps = a/b``)."""
    e = _exact_fraction(eps)
    a, b = e.numerator, e.denominator
    total = 0
    for q in primes_up_to(x).tolist():
        if q % 4 != 3:
            continue
        total += min(x // q, _iroot(q**a, b - a))
    return total
