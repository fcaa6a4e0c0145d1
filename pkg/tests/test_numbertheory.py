import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_lpf, trial_division_is_prime
from dirichlet_sup.numbertheory import (
    TableTooSmall,
    divisor_count,
    divisor_counts,
    e_tau,
    exponent_matrix,
    factor_exponents,
    l_j,
    largest_prime_factor,
    lpf_table,
    psi,
    sieve_primes,
    smooth_set,
)


def test_sieve_small():
    assert sieve_primes(10).primes.tolist() == [2, 3, 5, 7]
    assert sieve_primes(2).primes.tolist() == [2]
    with pytest.raises(ValueError):
        sieve_primes(1)


def test_sieve_against_trial_division():
    t = sieve_primes(100)
    assert t.primes.tolist() == [n for n in range(2, 101) if trial_division_is_prime(n)]
    assert t.pi(100) == 25 and t.p(0) == 1 and t.p(1) == 2


def test_largest_prime_factor_examples():
    assert largest_prime_factor(12) == 3
    assert largest_prime_factor(97) == 97
    assert largest_prime_factor(1) == 1
    with pytest.raises(ValueError):
        largest_prime_factor(0)
    with pytest.raises(OverflowError):
        largest_prime_factor(2**63)


def test_lpf_table_matches_brute_force():
    tab = lpf_table(400)
    assert all(tab[n] == brute_lpf(n) for n in range(1, 401))


def test_factor_exponents_examples(table):
    assert factor_exponents(12, table).exponents == {1: 2, 2: 1}
    assert factor_exponents(360, table).exponents == {1: 3, 2: 2, 3: 1}
    assert factor_exponents(97, table).exponents == {table.index[97]: 1}
    with pytest.raises(TableTooSmall):
        factor_exponents(2 * 104729, sieve_primes(1000))


def test_round_trip_and_divisor_identity_exhaustive():
    n_max = 10**5
    tab = sieve_primes(n_max)
    support = np.arange(2, n_max + 1)
    A = exponent_matrix(support, tab, len(tab))
    logs = np.log(tab.primes.astype(float))
    assert np.allclose(A @ logs, np.log(support.astype(float)), rtol=0, atol=1e-9)
    # exact recomposition on a strided subset, divisor identity on all n
    for n in support[::997]:
        assert factor_exponents(int(n), tab).value(tab) == n
    d = divisor_counts(n_max)
    prod = np.ones(len(support), dtype=np.int64)
    A = A.tocsr()
    for r in range(len(support)):
        prod[r] = np.prod(A.data[A.indptr[r] : A.indptr[r + 1]] + 1)
    assert np.array_equal(prod, d[2:])


def test_smooth_set_examples(table):
    s = smooth_set(20, 3, table)
    assert s.members.tolist() == [2, 3, 4, 6, 8, 9, 12, 16, 18] and s.psi == 9
    assert smooth_set(10, 2, table).members.tolist() == [2, 4, 8]
    for N in (2, 17, 100):
        assert smooth_set(N, N).psi == N - 1


def test_generate_matches_scan(table):
    for N, M in [(1000, 7), (5000, 50), (4096, 2)]:
        a, b = smooth_set(N, M, table, "scan"), smooth_set(N, M, table, "generate")
        assert np.array_equal(a.members, b.members) and np.array_equal(a.tops, b.tops)


def test_e_tau_examples(table):
    assert e_tau(10, 2, table).members.tolist() == [2, 3, 4, 6, 8, 9]
    assert e_tau(10, 1, table).members.tolist() == [2, 4, 8]
    assert e_tau(60, table.pi(60), table).members.tolist() == list(range(2, 61))
    with pytest.raises(ValueError):
        e_tau(10, 5, table)


def test_l_j_examples(table):
    assert l_j(50, 4, 3, table) == {5, 10, 15, 20, 30, 40, 45}
    assert l_j(10, 2, 2, table) == {3, 6}
    assert l_j(10, 8, 8, table) == frozenset()
    with pytest.raises(ValueError):
        l_j(50, 4, 2, table)


def test_divisor_count_examples():
    assert divisor_count(12) == 6 and divisor_count(1) == 1 and divisor_count(101) == 2


def test_partition_exhaustive(table):
    for N in range(2, 501):
        for M in range(2, 51):
            s = smooth_set(N, M, table)
            cells = s.partition
            assert sum(len(c) for c in cells.values()) == s.psi
            for j, cell in cells.items():
                assert np.all(np.isin(cell, s.members))
                assert all(largest_prime_factor(int(n)) == table.p(j) for n in cell[:3])


def test_l_j_disjoint_and_inside_e_j(table):
    for N in (30, 97, 210, 500):
        mu = table.pi(N)
        for tau in range(1, mu + 1):
            seen: set[int] = set()
            for j in range(tau // 2 + 1, tau + 1):
                L = l_j(N, tau, j, table)
                assert not (L & seen)
                seen |= L
                assert all(largest_prime_factor(n) == table.p(j) and n <= N for n in L)


@given(st.integers(2, 3000), st.integers(2, 3000), st.integers(2, 200), st.integers(2, 200))
def test_psi_monotone(n1, n2, m1, m2):
    (a, b), (c, d) = sorted((n1, n2)), sorted((m1, m2))
    assert psi(a, c) <= psi(b, c) and psi(a, c) <= psi(a, d)


@given(st.integers(2, 2000), st.integers(2, 60))
def test_psi_matches_bruteforce(N, M):
    assert psi(N, M) == sum(1 for n in range(2, N + 1) if largest_prime_factor(n) <= M)


@given(st.integers(1, 10**12))
def test_lpf_divides_and_is_prime(n):
    q = largest_prime_factor(n)
    assert n % q == 0
    assert q == 1 or all(q % d for d in range(2, min(q, 2000)) if d * d <= q)
