"""Primes, factorizations and smooth-number sets.

Ordinals are 1-based throughout: ``p_1 = 2``, ``p_2 = 3`` and so on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np
from scipy import sparse

MAX_N = 2**62
# above this the lpf table would be too large; switch to product generation
DIRECT_SCAN_LIMIT = 10**7


class TableTooSmall(ValueError):
    """A prime factor exceeds the limit of the prime table in use."""


def _check_size(n: int, name: str = "N") -> None:
    if n > MAX_N:
        raise OverflowError(f"{name}={n} exceeds 2**62")


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray
    index: Mapping[int, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.primes)

    def p(self, j: int) -> int:
        """The j-th prime. ``p(0)`` is 1 by convention (empty smoothness bound)."""
        if j == 0:
            return 1
        if not 1 <= j <= len(self.primes):
            raise IndexError(f"ordinal {j} outside 1..{len(self.primes)}")
        return int(self.primes[j - 1])

    def pi(self, x: float) -> int:
        """Number of primes <= x, for x within the table."""
        if x > self.limit:
            raise TableTooSmall(f"pi({x}) needs a table past {self.limit}")
        return int(np.searchsorted(self.primes, math.floor(x), side="right"))


def sieve_primes(limit: int) -> PrimeTable:
    if limit < 2:
        raise ValueError("limit must be >= 2")
    _check_size(limit, "limit")
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if is_p[q]:
            is_p[q * q :: q] = False
    primes = np.flatnonzero(is_p).astype(np.int64)
    primes.setflags(write=False)
    index = {int(q): j for j, q in enumerate(primes, start=1)}
    return PrimeTable(limit=limit, primes=primes, index=index)


def largest_prime_factor(n: int) -> int:
    """P+(n), with P+(1) = 1."""
    if n <= 0:
        raise ValueError("n must be positive")
    _check_size(n, "n")
    if n == 1:
        return 1
    best = 1
    while n % 2 == 0:
        best, n = 2, n // 2
    q = 3
    while q * q <= n:
        while n % q == 0:
            best, n = q, n // q
        q += 2
    return n if n > 1 else best


def lpf_table(n_max: int) -> np.ndarray:
    """Array ``a`` with ``a[n] = P+(n)`` for 0 <= n <= n_max (a[0] = 0, a[1] = 1)."""
    _check_size(n_max)
    out = np.ones(n_max + 1, dtype=np.int64)
    out[0] = 0
    if n_max < 2:
        return out
    is_p = np.ones(n_max + 1, dtype=bool)
    is_p[:2] = False
    for q in range(2, math.isqrt(n_max) + 1):
        if is_p[q]:
            is_p[q * q :: q] = False
    # ascending primes: the last write at each multiple is its largest prime
    for q in np.flatnonzero(is_p):
        out[q::q] = q
    return out


_LPF_CACHE: list[np.ndarray] = []


def _lpf_upto(n_max: int) -> np.ndarray:
    """Read-only view of a shared, grow-on-demand P+ table."""
    if not _LPF_CACHE or len(_LPF_CACHE[0]) <= n_max:
        grown = 2 * len(_LPF_CACHE[0]) if _LPF_CACHE else 4096
        size = max(n_max, min(grown, DIRECT_SCAN_LIMIT))
        tab = lpf_table(size)
        tab.setflags(write=False)
        _LPF_CACHE[:] = [tab]
    return _LPF_CACHE[0][: n_max + 1]


@dataclass(frozen=True)
class ExponentVector:
    n: int
    exponents: Mapping[int, int]

    def value(self, table: PrimeTable) -> int:
        out = 1
        for j, a in self.exponents.items():
            out *= table.p(j) ** a
        return out


def factor_exponents(n: int, table: PrimeTable) -> ExponentVector:
    if n < 2:
        raise ValueError("n must be >= 2")
    _check_size(n, "n")
    exps: dict[int, int] = {}
    m = n
    for j, q in enumerate(table.primes, start=1):
        q = int(q)
        if q * q > m:
            break
        if m % q == 0:
            a = 0
            while m % q == 0:
                m //= q
                a += 1
            exps[j] = a
    if m > 1:
        j = table.index.get(m)
        if j is None:
            raise TableTooSmall(f"prime factor {m} of {n} exceeds table limit {table.limit}")
        exps[j] = exps.get(j, 0) + 1
    return ExponentVector(n=n, exponents=dict(sorted(exps.items())))


def exponent_matrix(support, table: PrimeTable, dim: int) -> sparse.csr_matrix:
    """Sparse ``len(support) x dim`` matrix of a_j(n); column j-1 holds p_j.

    Raises ValueError when some n has a prime factor beyond p_dim.
    """
    support = np.asarray(support, dtype=np.int64)
    if support.size and support.min() < 1:
        raise ValueError("support must be positive")
    top = int(support.max()) if support.size else 1
    rows, cols = [], []
    if top <= DIRECT_SCAN_LIMIT:
        lpf = _lpf_upto(top)
        rem, idx = support.copy(), np.arange(len(support))
        while rem.size:
            alive = rem > 1
            rem, idx = rem[alive], idx[alive]
            if not rem.size:
                break
            q = lpf[rem]
            rows.append(idx)
            cols.append(np.searchsorted(table.primes, q))
            rem = rem // q
    else:
        for i, n in enumerate(support):
            for j, a in factor_exponents(int(n), table).exponents.items():
                rows.append(np.full(a, i))
                cols.append(np.full(a, j - 1))
    rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    if cols.size and cols.max() >= dim:
        bad = int(support[rows[np.argmax(cols)]])
        raise ValueError(f"{bad} has a prime factor beyond p_{dim}")
    data = np.ones(len(rows), dtype=np.int64)
    out = sparse.coo_matrix((data, (rows, cols)), shape=(len(support), dim)).tocsr()
    out.sum_duplicates()
    out.sort_indices()
    return out


@dataclass(frozen=True)
class SmoothSet:
    N: int
    M: int
    members: np.ndarray
    tops: np.ndarray = field(repr=False)  # P+(n) for each member
    table: PrimeTable = field(repr=False)

    @property
    def psi(self) -> int:
        return len(self.members)

    @cached_property
    def partition(self) -> dict[int, np.ndarray]:
        """Ordinal j -> E_j = members with P+(n) = p_j."""
        order = np.argsort(self.tops, kind="stable")
        keys, starts = np.unique(self.tops[order], return_index=True)
        ends = list(starts[1:]) + [len(order)]
        out = {}
        for k, lo, hi in zip(keys, starts, ends):
            cell = self.members[np.sort(order[lo:hi])]
            cell.setflags(write=False)
            out[self.table.index[int(k)]] = cell
        return out

    def __contains__(self, n: int) -> bool:
        i = np.searchsorted(self.members, n)
        return bool(i < len(self.members) and self.members[i] == n)


def _smooth_products(N: int, primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All n in [1, N] composed of the given primes, with P+(n), sorted by n."""
    vals = np.array([1], dtype=np.int64)
    tops = np.array([1], dtype=np.int64)
    for q in primes:
        q = int(q)
        if q > N:
            break
        parts, cur = [vals], vals
        while True:
            cur = cur[cur <= N // q] * q
            if cur.size == 0:
                break
            parts.append(cur)
        # primes arrive in ascending order, so every new product has P+ = q
        tops = np.concatenate([tops, np.full(sum(map(len, parts[1:])), q, dtype=np.int64)])
        vals = np.concatenate(parts)
    order = np.argsort(vals, kind="stable")
    return vals[order], tops[order]


def smooth_set(N: int, M: int, table: PrimeTable | None = None, method: str = "auto") -> SmoothSet:
    """S(N, M) = {2 <= n <= N : P+(n) <= M}, partitioned by ordinal of P+(n).

    ``method`` is ``"scan"`` (P+ table over [0, N]), ``"generate"`` (products of
    admissible primes) or ``"auto"``.
    """
    if N < 2 or M < 2:
        raise ValueError("N and M must be >= 2")
    _check_size(N)
    bound = min(M, N)
    if table is None or table.limit < bound:
        table = sieve_primes(bound)
    if method == "auto":
        method = "scan" if N <= DIRECT_SCAN_LIMIT else "generate"
    if method == "scan":
        lpf = _lpf_upto(N)
        members = np.flatnonzero(lpf[2:] <= bound) + 2
        member_lpf = lpf[members]
    elif method == "generate":
        vals, tops = _smooth_products(N, table.primes[table.primes <= bound])
        members, member_lpf = vals[1:], tops[1:]
    else:
        raise ValueError(f"unknown method {method!r}")
    members.setflags(write=False)
    member_lpf.setflags(write=False)
    return SmoothSet(N=N, M=M, members=members, tops=member_lpf, table=table)


def psi(N: int, M: int) -> int:
    """Psi(N, M) = #{2 <= n <= N : P+(n) <= M}; zero when N < 2 or M < 2."""
    N, M = int(N), int(M)
    if N < 2 or M < 2:
        return 0
    _check_size(N)
    if N <= DIRECT_SCAN_LIMIT:
        return int(np.count_nonzero(_lpf_upto(N)[2:] <= M))
    return smooth_set(N, M, method="generate").psi


def psi_star(x: float, y: float) -> float:
    """Smooth density Psi(x, y) / x, counting integers 2 <= n <= x."""
    if x < 1:
        return 0.0
    return psi(math.floor(x), math.floor(y)) / x


def e_tau(N: int, tau: int, table: PrimeTable) -> SmoothSet:
    mu = table.pi(N)
    if not 1 <= tau <= mu:
        raise ValueError(f"tau={tau} outside 1..pi(N)={mu}")
    return smooth_set(N, table.p(tau), table)


def l_j(N: int, tau: int, j: int, table: PrimeTable) -> frozenset[int]:
    """L_j = {p_j * m : m <= N / p_j, P+(m) <= p_{floor(tau/2)}}, with m = 1 allowed."""
    half = tau // 2
    if tau > len(table) or not half < j <= tau:
        raise ValueError(f"need floor(tau/2) < j <= tau <= {len(table)}, got tau={tau}, j={j}")
    _check_size(N)
    pj = table.p(j)
    if pj > N:
        return frozenset()
    smalls = table.primes[:half]
    cofactors, _ = _smooth_products(N // pj, smalls)
    return frozenset(int(pj * m) for m in cofactors)


def divisor_count(n: int) -> int:
    if n <= 0:
        raise ValueError("n must be positive")
    _check_size(n, "n")
    out = 1
    q = 2
    while q * q <= n:
        a = 0
        while n % q == 0:
            n //= q
            a += 1
        out *= a + 1
        q += 1 if q == 2 else 2
    if n > 1:
        out *= 2
    return out


def divisor_counts(n_max: int) -> np.ndarray:
    """``d[n]`` = number of divisors of n for 0 <= n <= n_max (d[0] = 0)."""
    out = np.zeros(n_max + 1, dtype=np.int64)
    for k in range(1, n_max + 1):
        out[k::k] += 1
    return out
