"""Acceptance criteria 1-13, each at its stated tolerance.

The terminal summary prints one PASS/FAIL line per criterion.
"""

import json
import math
import random
from pathlib import Path

import pytest

from diffsquares.bounds import count_m_epsilon_members, theorem11_bound
from diffsquares.constructions import (
    cohen_set,
    p_square_set,
    product_set,
    two_prime_set,
)
from diffsquares.density import (
    density_scan_many,
    pattern_probability_closed_form,
    poisson_pattern_probability,
    tv_distance_empirical,
)
from diffsquares.numtheory import factorize, primes_up_to
from diffsquares.residues import is_avoiding
from diffsquares.search import ResultCache, max_avoiding, scan_table

from oracles import count_large_3mod4_factor, max_avoiding_naive

DATA = Path(__file__).with_name("data")
# exhaustive oracle values for m <= 200, produced once by oracles.max_avoiding_ostergard
# and cross-checked against oracles.max_avoiding_naive where that finishes
ORACLE = {int(k): v for k, v in json.loads((DATA / "oracle_max_avoiding.json").read_text()).items()}

PRIMES_1000 = primes_up_to(1000).tolist()
MAX_Z65 = 7
M_EPS_COUNT_1E7 = 1973335
FAIL_III_X4 = {0.6: 7803, 0.4: 6356, 0.2: 4800}
TV_X6 = 0.0021282515177578724


@pytest.mark.criterion(1)
def test_c01_primes_3_mod_4():
    ps = [p for p in PRIMES_1000 if p <= 500 and p % 4 == 3]
    for p in ps:
        r = max_avoiding(p)
        assert r.exact and r.best_size == 1, p
    print(f"criterion 1: {len(ps)} primes = 3 mod 4 up to 500, all exactly 1")


@pytest.mark.criterion(2)
def test_c02_primes_1_mod_4():
    ps = [p for p in PRIMES_1000 if p % 4 == 1]
    for p in ps:
        r = max_avoiding(p)
        assert r.exact, p
        assert r.best_size <= math.sqrt(p / 2) + 1
        assert r.best_size <= math.sqrt(p)
    print(f"criterion 2: {len(ps)} primes = 1 mod 4 up to 1000, all exact and within both bounds")


@pytest.mark.criterion(3)
def test_c03_z65():
    r = max_avoiding(65)
    assert r.best_size >= 7 and is_avoiding(r.witness, 65) and len(r.witness) == r.best_size
    assert r.exact and r.best_size == MAX_Z65 == ORACLE[65]


@pytest.mark.criterion(4)
def test_c04_p_square_grids():
    for p in (2, 3, 5, 7, 11, 13):
        A = [k * p for k in range(p)]
        assert is_avoiding(A, p * p)
        assert sorted(p_square_set(p).set) == A
        assert max_avoiding(p * p, budget=10**5).best_size >= p


@pytest.mark.criterion(5)
def test_c05_squarefree_bound_consistency():
    rs = scan_table(3, 5000, filters=["squarefree"], cache=ResultCache())
    exact = [r for r in rs if r.exact]
    for r in exact:
        assert r.best_size <= theorem11_bound(r.m)
        assert r.best_size <= r.m
    print(f"criterion 5: {len(exact)}/{len(rs)} squarefree m in [3, 5000] exact; inequality holds on all")


@pytest.mark.criterion(5)
@pytest.mark.xfail(strict=True, reason=(
    "exhaustive search does not finish for every squarefree m <= 5000 on one core: "
    "products of primes = 1 mod 4 (e.g. 2501 = 41 * 61) and large Paley moduli stay open "
    "at 2e6 nodes each; 1852 of 3040 are exact"))
def test_c05_scan_is_complete():
    rs = scan_table(3, 5000, filters=["squarefree"], cache=ResultCache())
    missing = [r.m for r in rs if not r.exact]
    assert not missing, f"{len(missing)} inexact, first {missing[:10]}"


@pytest.mark.criterion(6)
def test_c06_cohen():
    n = 0
    for p in primes_up_to(10**5).tolist():
        if p % 4 != 1:
            continue
        c = cohen_set(p)
        assert is_avoiding(c.set, p)
        assert len(c.set) >= math.log(p) / (2 * math.log(2))
        n += 1
    print(f"criterion 6: {n} primes checked")


@pytest.mark.criterion(7)
def test_c07_two_prime():
    qs = [q for q in primes_up_to(10**6 // 3).tolist() if q % 4 == 3]
    n = 0
    for i, q1 in enumerate(qs):
        for q2 in qs[:i]:
            if q1 * q2 > 10**6:
                break
            c = two_prime_set(q1, q2)
            assert is_avoiding(c.set, q1 * q2)
            assert len(c.set) >= math.log(q2) / math.log(2)
            n += 1
    print(f"criterion 7: {n} prime pairs checked")


def _nonres(d, p):
    d %= p
    return d != 0 and pow(d, (p - 1) // 2, p) == p - 1


def _per_prime_avoiding(A, primes):
    """Each pair differs by a nonresidue modulo at least one prime (Euler's criterion)."""
    return all(any(_nonres(a - b, p) for p in primes) for i, a in enumerate(A) for b in A[i + 1 :])


@pytest.mark.criterion(8)
def test_c08_product():
    rng = random.Random(8)
    n = 0
    while n < 1000:
        m = rng.randrange(3, 10**9, 2)
        f = factorize(m)
        if not f.is_squarefree:
            continue
        c = product_set(f)
        assert c.m == m and _per_prime_avoiding(list(c.set), f.primes)
        size = 1
        qs = sorted((p for p in f.primes if p % 4 == 3), reverse=True)
        for p in f.primes:
            if p % 4 == 1:
                size *= len(cohen_set(p).set)
        for i in range(0, len(qs) - 1, 2):
            size *= len(two_prime_set(qs[i], qs[i + 1]).set)
        assert len(c.set) == size
        n += 1


@pytest.mark.criterion(9)
def test_c09_m_epsilon_density():
    x, eps = 10**7, 0.3
    got = count_m_epsilon_members(x, eps)
    assert got == M_EPS_COUNT_1E7
    main_term = x / 2 * math.log(1 / (1 - eps))
    assert abs(got - main_term) <= 0.2 * main_term
    print(f"criterion 9: count {got}, main term {main_term:.2f}, ratio {got / main_term:.4f}")


@pytest.mark.criterion(9)
def test_c09_oracle_reproduces_pin():
    # independent plain-sieve count with eps = 3/10 compared in integers
    assert count_large_3mod4_factor(10**7, 3, 10) == M_EPS_COUNT_1E7


@pytest.mark.criterion(10)
def test_c10_condition_iii_monotone():
    rs = density_scan_many(10**4, [0.6, 0.4, 0.2])
    fr = [r.fraction("fail_iii") for r in rs]
    assert fr[0] >= fr[1] >= fr[2]
    assert [r.fail_iii for r in rs] == [FAIL_III_X4[e] for e in (0.6, 0.4, 0.2)]


@pytest.mark.criterion(11)
def test_c11_poisson_pattern():
    for k in range(95):
        theta = 3 + 0.5 * k
        lam = math.log(theta) / 2
        closed = lam**2 * math.exp(-4 * lam)
        for pattern in ((0, 1, 0, 1), (1, 0, 1, 0)):
            assert abs(poisson_pattern_probability([lam] * 4, pattern) - closed) <= 1e-12
        assert abs(pattern_probability_closed_form(theta) - closed) <= 1e-12
        assert closed >= theta**-4


@pytest.mark.criterion(12)
def test_c12_tv_regression():
    T = [p for p in primes_up_to(1000).tolist() if p > 100 and p % 4 == 3]
    d = tv_distance_empirical(10**6, [T])
    assert abs(d - TV_X6) <= 1e-12
    assert d < 0.1


@pytest.mark.criterion(13)
def test_c13_oracle_equivalence():
    assert sorted(ORACLE) == list(range(1, 201))
    for m in range(1, 201):
        r = max_avoiding(m)
        assert r.exact and r.best_size == ORACLE[m], m


@pytest.mark.criterion(13)
def test_c13_live_naive_oracle():
    # the frozen table is reproduced live by plain subset enumeration on the cheap range
    for m in range(1, 120):
        assert max_avoiding_naive(m)[0] == ORACLE[m] == max_avoiding(m).best_size, m
