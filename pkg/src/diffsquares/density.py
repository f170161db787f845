"""Statistics of prime divisors ``= 3 mod 4`` of typical integers.

Per-``m`` conditions (i)-(iv), the ``theta / y_j / J`` parameter grid, the
pattern event ``E`` on the counts ``omega(m, T_j)``, exact total-variation
distances against independent Poisson vectors, and streaming scans over
``1..x``.  All logarithms are natural.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import poisson

from . import kernels
from .numtheory import (
    Factorization,
    PrimeClassSet,
    factorize,
    h1,
    powerful_part,
    primes_in_class,
    primes_up_to,
    smooth_part_3mod4,
)

__all__ = [
    "GridError",
    "ParamGrid",
    "DensityReport",
    "VARIANTS",
    "check_i",
    "check_ii",
    "condition_iii",
    "check_iv",
    "build_grid",
    "event_E",
    "omega_vector",
    "tv_distance_empirical",
    "poisson_pattern_probability",
    "pattern_probability_closed_form",
    "c_eps",
    "density_scan",
    "density_scan_many",
    "reports_to_csv",
    "divisor_regularity_conditions",
]

VARIANTS = ("section3", "lemma32")
SCAN_LIMIT = 10**8
# Grids whose T_j would need primes beyond this are left unsieved.
SIEVE_CAP = 10**8
BLOCK = 1 << 18


class GridError(ValueError):
    """The parameter grid is invalid or degenerate at this scale."""


def _fact(f: Factorization | int) -> Factorization:
    return f if isinstance(f, Factorization) else factorize(f)


def _need_x(x: float) -> None:
    if x < 16:
        raise ValueError(f"x must be at least 16, got {x}")


def eps_range(x: float) -> tuple[float, float]:
    return 1.0 / math.sqrt(math.log(x)), 1.0


def _check_eps(x: float, eps: float) -> None:
    lo, hi = eps_range(x)
    if not lo <= eps <= hi:
        raise ValueError(f"eps={eps} outside [{lo:.6g}, 1] for x={x}")


def c_eps(eps: float) -> float:
    return math.exp(-math.log(1.0 / eps) ** 0.1)


def check_i(f: Factorization | int, x: float) -> bool:
    """Powerful part of ``m`` at most ``log x``."""
    _need_x(x)
    return powerful_part(_fact(f)) <= math.log(x)


def check_ii(f: Factorization | int, x: float) -> bool:
    """``omega(m) <= 2 log log x``."""
    _need_x(x)
    return len(_fact(f).factors) <= 2 * math.log(math.log(x))


def _q_list(f: Factorization) -> list[int]:
    return sorted((p for p, e in f.factors if e == 1 and p % 4 == 3), reverse=True)


def condition_iii(f: Factorization | int, x: float, eps: float, variant: str = "section3",
                  check_range: bool = True) -> bool:
    """Some odd-indexed ``q_(2j-1)`` exceeds both ``x^eps`` and ``S^2``.

    ``q_1 > q_2 > ...`` are the primes ``= 3 mod 4`` dividing ``m / P(m)``.
    ``S`` is the product of the later ``q_i`` (``section3``) or the 3-mod-4
    smooth part ``D(m, q)`` (``lemma32``).  With ``check_range=False`` eps
    outside ``[(log x)^(-1/2), 1]`` is accepted.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    _need_x(x)
    if check_range:
        _check_eps(x, eps)
    elif not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    f = _fact(f)
    qs = _q_list(f)
    thr = x**eps
    for j in range(0, len(qs), 2):
        q = qs[j]
        s = math.prod(qs[j + 1 :]) if variant == "section3" else smooth_part_3mod4(f, q)
        if q > thr and q > s * s:
            return True
    return False


@dataclass(frozen=True)
class ParamGrid:
    x: float
    eps: float
    C: float
    theta: float
    y: tuple[float, ...]
    J: int
    T: tuple[PrimeClassSet | None, ...]
    lam: tuple[float | None, ...]
    synthetic: bool = False
    schema: int = field(default=1)

    @property
    def ylim(self) -> tuple[float, ...]:
        return tuple(yj ** (self.theta / 2) for yj in self.y)

    def lambda_in_expected_range(self) -> list[bool | None]:
        """Whether each ``lambda_j`` lies in ``(log(theta)/3, log(theta))``; recorded, not asserted."""
        lt = math.log(self.theta)
        return [None if l is None else lt / 3 < l < lt for l in self.lam]

    def to_json(self) -> dict:
        return {
            "schema": self.schema,
            "x": self.x,
            "eps": self.eps,
            "C": self.C,
            "theta": self.theta,
            "y": list(self.y),
            "J": self.J,
            "T": [None if t is None else {"label": t.label, "lo": t.lo, "hi": t.hi, "primes": list(t.primes)}
                  for t in self.T],
            "lambda": list(self.lam),
            "synthetic": self.synthetic,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ParamGrid":
        T = tuple(None if t is None else PrimeClassSet(t["label"], tuple(t["primes"]), t["lo"], t["hi"], 3)
                  for t in d["T"])
        return cls(d["x"], d["eps"], d["C"], d["theta"], tuple(d["y"]), d["J"], T,
                   tuple(d["lambda"]), d["synthetic"], d.get("schema", 1))


def build_grid(x: float, eps: float, C: float = 3.0, synthetic: bool = False,
               sieve_cap: float = SIEVE_CAP) -> ParamGrid:
    """``theta = C (log 1/eps)^(1/10)``, ``y_j = x^(sqrt(eps) theta^-j)`` for ``j <= J``.

    In synthetic mode ``x`` is only a formal parameter: neither
    ``eps < (log x)^(-1/2)`` nor ``y_J < 3`` is an error, and ``T_j`` above
    ``sieve_cap`` are left as ``None``.
    """
    if not x > 1:
        raise GridError(f"x must exceed 1, got {x}")
    if C <= 0:
        raise GridError(f"C must be positive, got {C}")
    if not 0 < eps <= 1:
        raise GridError(f"eps must lie in (0, 1], got {eps}")
    L = math.log(1.0 / eps)
    theta = C * L**0.1 if L > 0 else 0.0
    if theta <= 1:
        raise GridError(f"theta={theta:.6g} <= 1; eps={eps} is too large for C={C}")
    lt = math.log(theta)
    J = int(math.floor(L / (2 * lt)))
    # guard the floor against rounding in the defining inequality theta^-J >= eps^(1/2)
    while J > 0 and J * lt > L / 2:
        J -= 1
    while (J + 1) * lt <= L / 2:
        J += 1
    if J < 1:
        raise GridError(f"degenerate grid: J=0 for x={x}, eps={eps}, C={C}")
    lo, _ = eps_range(x)
    if eps < lo and not synthetic:
        raise GridError(f"eps={eps} below (log x)^(-1/2)={lo:.6g} for x={x}")
    log_y0 = math.sqrt(eps) * math.log(x)
    y = tuple(math.exp(log_y0 * theta ** (-j)) for j in range(J + 1))
    if y[J] < 3 and not synthetic:
        raise GridError(f"degenerate grid: y_J={y[J]:.6g} < 3")
    T: list[PrimeClassSet | None] = []
    lam: list[float | None] = []
    for j in range(1, J + 1):
        if y[j - 1] > sieve_cap:
            T.append(None)
            lam.append(None)
            continue
        t = primes_in_class(y[j], y[j - 1], 3, label=f"T_{j}")
        T.append(t)
        lam.append(h1(t.primes))
    return ParamGrid(float(x), float(eps), float(C), theta, y, J, tuple(T), tuple(lam), synthetic)


def check_iv(f: Factorization | int, grid: ParamGrid) -> bool:
    """``D(m, y_j) <= y_j^(theta/2)`` for every ``0 <= j <= J``."""
    f = _fact(f)
    return all(smooth_part_3mod4(f, yj) <= lim for yj, lim in zip(grid.y, grid.ylim))


def event_E(counts: Sequence[int]) -> bool:
    """``counts[j-1] = omega(m, T_j)``; true iff ``(1, 0, 1, 0)`` starts at some ``j <= J - 3``."""
    c = list(counts)
    return any(c[j] == 1 and c[j + 1] == 0 and c[j + 2] == 1 and c[j + 3] == 0 for j in range(len(c) - 3))


def _check_disjoint(T: Sequence[Sequence[int]]) -> None:
    seen: set[int] = set()
    for t in T:
        s = set(t)
        if seen & s:
            raise ValueError(f"prime sets overlap at {sorted(seen & s)[:5]}")
        seen |= s


def omega_vector(f: Factorization | int, T: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Number of distinct primes of each ``T_j`` dividing ``m``."""
    _check_disjoint(T)
    ps = _fact(f).primes
    return tuple(sum(1 for p in ps if p in t) for t in T)


def tv_distance_empirical(x: int, T: Sequence[Sequence[int]]) -> float:
    """Exact TV distance between ``(omega(m, T_j))_j`` for uniform ``m <= x`` and independent Poissons.

    The Poisson parameters are ``H_1(T_j)``.  Poisson mass off the empirical
    support is added in full as ``1 - (mass on the support)``.
    """
    x = int(x)
    if x < 2:
        raise ValueError(f"x must be at least 2, got {x}")
    sets = [sorted(int(p) for p in t) for t in T]
    if not sets:
        raise ValueError("need at least one prime set")
    for j, t in enumerate(sets):
        if not t:
            raise ValueError(f"T_{j + 1} is empty")
        if t[-1] > x:
            raise ValueError(f"T_{j + 1} contains {t[-1]} > x={x}")
    _check_disjoint(sets)
    r = len(sets)
    counts = np.zeros((x, r), dtype=np.int16)
    for j, t in enumerate(sets):
        col = counts[:, j]
        for p in t:
            col[p - 1 :: p] += 1
    support, freq = np.unique(counts, axis=0, return_counts=True)
    emp = freq / x
    lam = np.array([h1(t) for t in sets])
    pois = np.prod(poisson.pmf(support, lam[None, :]), axis=1)
    return 0.5 * (float(np.abs(emp - pois).sum()) + max(0.0, 1.0 - float(pois.sum())))


def poisson_pattern_probability(lams: Sequence[float], pattern: Sequence[int]) -> float:
    """``P(Y_j = pattern_j for all j)`` for independent ``Y_j ~ Poisson(lams_j)``."""
    if len(lams) != len(pattern):
        raise ValueError("lams and pattern differ in length")
    return float(np.prod(poisson.pmf(np.asarray(pattern), np.asarray(lams, dtype=float))))


def pattern_probability_closed_form(theta: float) -> float:
    """``lambda^2 e^(-4 lambda)`` with ``lambda = log(theta)/2``."""
    lam = math.log(theta) / 2
    return lam * lam * math.exp(-4 * lam)


@dataclass
class DensityReport:
    x: int
    eps: float
    C: float
    variant: str
    total: int
    fail_i: int
    fail_ii: int
    fail_iii: int
    fail_iv: int | None
    e_hits: int | None
    c_eps: float
    eps_in_range: bool
    grid_error: str | None = None
    schema: int = field(default=1)

    def fraction(self, name: str) -> float | None:
        v = getattr(self, name)
        return None if v is None or self.total == 0 else v / self.total

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "DensityReport":
        return cls(**d)


def _scan_job(args) -> np.ndarray:
    lo, hi, base, log_x, llb, x_eps, variant, y, ylim = args
    return kernels.scan_block(lo, hi, base, log_x, llb, x_eps, variant, y, ylim)


def _scan(x: int, x_eps: list[float], variant: str, y: Sequence[float], ylim: Sequence[float],
          threads: int) -> np.ndarray:
    base = primes_up_to(math.isqrt(x) + 1)
    log_x = math.log(x)
    llb = 2 * math.log(log_x)
    v = VARIANTS.index(variant)
    jobs = [(lo, min(lo + BLOCK, x + 1), base, log_x, llb, x_eps, v, list(y), list(ylim))
            for lo in range(1, x + 1, BLOCK)]
    total = np.zeros(5 + len(x_eps), dtype=np.int64)
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for c in pool.map(_scan_job, jobs):
                total += c
    else:
        for job in jobs:
            total += _scan_job(job)
    return total


def density_scan_many(x: int, eps_values: Sequence[float], C: float = 3.0, variant: str = "section3",
                      threads: int = 1, strict: bool = False) -> list[DensityReport]:
    """One report per eps from a shared pass over ``m = 1..x``.

    Counts for (iv) and ``E`` need a non-degenerate grid; otherwise they are
    ``None`` and ``grid_error`` says why (``strict`` raises instead).  Eps
    outside ``[(log x)^(-1/2), 1]`` is allowed for (iii) and flagged.
    """
    x = int(x)
    _need_x(x)
    if x > SCAN_LIMIT:
        raise ValueError(f"x={x} exceeds the scan limit {SCAN_LIMIT}")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    eps_values = [float(e) for e in eps_values]
    for e in eps_values:
        if not 0 < e <= 1:
            raise ValueError(f"eps must lie in (0, 1], got {e}")
    base_counts = _scan(x, [x**e for e in eps_values], variant, [], [], threads)
    lo, hi = eps_range(x)
    out = []
    for k, e in enumerate(eps_values):
        fail_iv = e_hits = None
        err = None
        try:
            grid = build_grid(x, e, C)
        except GridError as exc:
            if strict:
                raise
            err = str(exc)
        else:
            c = _scan(x, [], variant, grid.y, grid.ylim, threads)
            fail_iv = int(c[3])
            e_hits = int(c[4]) if grid.J >= 4 else 0
        out.append(DensityReport(
            x=x, eps=e, C=float(C), variant=variant, total=int(base_counts[0]),
            fail_i=int(base_counts[1]), fail_ii=int(base_counts[2]), fail_iii=int(base_counts[5 + k]),
            fail_iv=fail_iv, e_hits=e_hits, c_eps=c_eps(e),
            eps_in_range=lo <= e <= hi, grid_error=err,
        ))
    return out


def density_scan(x: int, eps: float, C: float = 3.0, variant: str = "section3", threads: int = 1,
                 strict: bool = False) -> DensityReport:
    return density_scan_many(x, [eps], C, variant, threads, strict)[0]


REPORT_COLUMNS = ("x", "eps", "C", "variant", "total", "fail_i", "fail_ii", "fail_iii", "fail_iv",
                  "e_hits", "frac_i", "frac_ii", "frac_iii", "frac_iv", "c_eps", "eps_in_range", "grid_error")


def reports_to_csv(reports: Sequence[DensityReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in reports:
        fr = {n: r.fraction(n) for n in ("fail_i", "fail_ii", "fail_iii", "fail_iv")}
        row = [r.x, r.eps, r.C, r.variant, r.total, r.fail_i, r.fail_ii, r.fail_iii, r.fail_iv, r.e_hits,
               fr["fail_i"], fr["fail_ii"], fr["fail_iii"], fr["fail_iv"], r.c_eps, int(r.eps_in_range),
               r.grid_error]
        w.writerow(["" if v is None else v for v in row])
    return buf.getvalue()


def divisor_regularity_conditions(f: Factorization | int, x: float) -> dict:
    """Conditions (a) and (b) used for the product lower bound.

    (a): ``p^2 | m`` implies ``p > log x``.
    (b): ``|omega_j(m, t) - 0.5 log log t| < (log log x)^(2/3)`` for
    ``3 <= t <= m`` and ``j in {1, 3}``, where ``omega_j(m, t)`` counts primes
    ``p <= t``, ``p = j mod 4`` dividing ``m``.  The count is a step function
    and ``log log t`` is increasing, so the extremes over ``[3, m]`` occur at
    ``t = 3``, ``t = m`` and on either side of each prime divisor; checking
    those points decides (b) for every real ``t``.
    """
    _need_x(x)
    f = _fact(f)
    m = f.m
    log_x = math.log(x)
    a = all(p > log_x for p, e in f.factors if e >= 2)
    bound = math.log(log_x) ** (2 / 3)
    worst = 0.0
    b = True
    if m >= 3:
        for j in (1, 3):
            ps = [p for p in f.primes if p % 4 == j and p <= m]
            # (t, count at t); left limits at a prime p use the count before p
            pts = [(3.0, sum(1 for p in ps if p <= 3)), (float(m), len(ps))]
            for i, p in enumerate(ps):
                if p > 3:
                    pts.append((float(p), i))
                    pts.append((float(p), i + 1))
            for t, c in pts:
                dev = abs(c - 0.5 * math.log(math.log(t)))
                worst = max(worst, dev)
                if dev >= bound:
                    b = False
    return {"m": m, "a": a, "b": b, "max_deviation": worst, "b_bound": bound}
