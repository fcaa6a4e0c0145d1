"""Seeded Rademacher sampling and Monte Carlo estimates of E sup |D|.

Signs come from a counter-based generator: eps_n for replicate r under seed s
is a pure function of (s, r, n), so results do not depend on evaluation order
or on how replicates are spread over threads.  Means and variances are reduced
over a fixed pairwise tree in replicate order.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import bounds
from .numbertheory import PrimeTable
from .polynomial import (
    DirichletSpec,
    SignAssignment,
    e_tau_spec,
    exact_sup_Z,
    sup_line_grid,
    sup_torus,
)

METHODS = ("torus-grid", "z-exact", "line-grid")
SANDWICH_RTOL = 1e-12

_M64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)


def _mix64(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer (bijective avalanche on uint64)."""
    x = np.asarray(x, dtype=np.uint64).copy()
    with np.errstate(over="ignore"):
        x ^= x >> np.uint64(30)
        x *= np.uint64(0xBF58476D1CE4E5B9)
        x ^= x >> np.uint64(27)
        x *= np.uint64(0x94D049BB133111EB)
        x ^= x >> np.uint64(31)
    return x


def _stream_key(seed: int, replicate) -> np.ndarray:
    """Per-replicate stream key; ``replicate`` may be an int or an array of ints."""
    rep = np.atleast_1d(np.asarray(replicate, dtype=np.int64))
    if seed < 0 or np.any(rep < 0):
        raise ValueError("seed and replicate index must be non-negative")
    with np.errstate(over="ignore"):
        k = _mix64(np.array([seed % 2**64], dtype=np.uint64) + _GAMMA)
        return _mix64(k ^ _mix64(rep.astype(np.uint64) * _GAMMA + _GAMMA))


def _key_hash(keys) -> np.ndarray:
    with np.errstate(over="ignore"):
        return _mix64(np.asarray(keys, dtype=np.uint64) * _GAMMA + np.uint64(1))


def _to_signs(bits: np.ndarray) -> np.ndarray:
    return np.where(bits >> np.uint64(63), -1, 1).astype(np.int8)


def rademacher(seed: int, replicate: int, keys) -> np.ndarray:
    """+-1 (int8) for each key, a pure function of (seed, replicate, key)."""
    return _to_signs(_mix64(_stream_key(seed, replicate) ^ _key_hash(keys)))


def rademacher_block(seed: int, replicates, keys) -> np.ndarray:
    """Row r equals ``rademacher(seed, replicates[r], keys)``."""
    sk = _stream_key(seed, replicates)
    return _to_signs(_mix64(sk[:, None] ^ _key_hash(keys)[None, :]))


def sample_signs(spec: DirichletSpec, seed: int, replicate: int) -> SignAssignment:
    """Independent Rademacher signs keyed by the integers n of the support."""
    return SignAssignment(rademacher(seed, replicate, spec.support), seed, replicate)


def pairwise_stats(x: np.ndarray) -> tuple[int, float, float]:
    """(count, mean, sum of squared deviations), combined over a fixed binary tree."""
    n = len(x)
    if n == 0:
        return 0, 0.0, 0.0
    if n == 1:
        return 1, float(x[0]), 0.0
    h = n // 2
    na, ma, sa = pairwise_stats(x[:h])
    nb, mb, sb = pairwise_stats(x[h:])
    d = mb - ma
    return n, ma + d * nb / n, sa + sb + d * d * na * nb / n


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    n, mean, m2 = pairwise_stats(np.asarray(x, dtype=float))
    if n < 2:
        return mean, 0.0
    return mean, math.sqrt(m2 / (n - 1)) / math.sqrt(n)


@dataclass(frozen=True)
class EstimateRecord:
    method: str
    N: int
    tau: int
    sigma: float
    replicates: int
    seed: int
    estimate: float
    stderr: float
    gap: float  # mean certificate gap (torus-grid), else mean of l1 - value
    lower_z: float  # mean exact Z-lattice supremum
    l1: float
    violations: int
    draws: np.ndarray = field(repr=False, compare=False)

    @property
    def bracket(self) -> tuple[float, float]:
        return self.estimate, self.estimate + self.gap


@dataclass(frozen=True)
class _Draw:
    value: float
    gap: float
    z: float
    violation: bool


def _one_draw(spec, tau, method, seed, r, grid_budget, refine_steps, line_window, line_steps) -> _Draw:
    signs = sample_signs(spec, seed, r)
    l1 = spec.l1
    z = exact_sup_Z(spec, signs, tau) if len(spec.support) else 0.0
    slack = SANDWICH_RTOL * max(l1, 1.0)
    if method == "torus-grid":
        res = sup_torus(spec, signs, grid_budget, refine_steps, seed=seed)
        bad = z > res.upper + slack or res.upper > l1 + slack
        return _Draw(res.value, res.gap, z, bad)
    if method == "line-grid":
        v = sup_line_grid(spec, signs, line_window[0], line_window[1], line_steps) if len(spec.support) else 0.0
        return _Draw(v, max(l1 - v, 0.0), z, v > l1 + slack)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def estimate_esup(
    spec: DirichletSpec,
    tau: int,
    method: str = "z-exact",
    R: int = 100,
    seed: int = 0,
    grid_budget: int = 1024,
    refine_steps: int = 1,
    line_window: tuple[float, float] = (0.0, 1000.0),
    line_steps: int = 20001,
    workers: int = 1,
) -> EstimateRecord:
    """Monte Carlo mean of the per-draw supremum.

    Every draw also computes the exact Z-lattice supremum and checks the
    sandwich ``sup_Z <= torus upper <= l1`` (or the parts of it the method
    produces); failures are counted in ``violations``.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")

    if method == "z-exact":
        return _z_exact_block(spec, tau, R, seed)

    def run(r: int) -> _Draw:
        return _one_draw(spec, tau, method, seed, r, grid_budget, refine_steps, line_window, line_steps)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            draws = list(pool.map(run, range(R)))
    else:
        draws = [run(r) for r in range(R)]
    values = np.array([d.value for d in draws])
    est, se = _mean_se(values)
    gap = _mean_se(np.array([d.gap for d in draws]))[0]
    lower_z = _mean_se(np.array([d.z for d in draws]))[0]
    values.setflags(write=False)
    return EstimateRecord(
        method=method,
        N=spec.N,
        tau=tau,
        sigma=spec.sigma,
        replicates=R,
        seed=seed,
        estimate=est,
        stderr=se,
        gap=gap,
        lower_z=lower_z,
        l1=spec.l1,
        violations=sum(d.violation for d in draws),
        draws=values,
    )


def _z_exact_block(spec: DirichletSpec, tau: int, R: int, seed: int, chunk: int = 4096) -> EstimateRecord:
    """z-exact estimate with signs drawn in blocks of replicates (same values as per-draw)."""
    from .polynomial import z_groups

    l1 = spec.l1
    values = np.zeros(R)
    if len(spec.support):
        g = z_groups(spec, tau)
        keep = np.flatnonzero(g)
        onehot = np.zeros((len(keep), tau))
        onehot[np.arange(len(keep)), g[keep] - 1] = spec.coef[keep]
        for lo in range(0, R, chunk):
            reps = np.arange(lo, min(R, lo + chunk))
            eps = rademacher_block(seed, reps, spec.support[keep]).astype(float)
            sums = np.abs(eps @ onehot)
            values[lo : lo + len(reps)] = [math.fsum(row) for row in sums]
    est, se = _mean_se(values)
    slack = SANDWICH_RTOL * max(l1, 1.0)
    values.setflags(write=False)
    return EstimateRecord(
        method="z-exact",
        N=spec.N,
        tau=tau,
        sigma=spec.sigma,
        replicates=R,
        seed=seed,
        estimate=est,
        stderr=se,
        gap=0.0,
        lower_z=est,
        l1=l1,
        violations=int(np.count_nonzero(values > l1 + slack)),
        draws=values,
    )


def z_exact_expectation(spec: DirichletSpec, tau: int) -> float:
    """E sup_Z |Q'| by enumerating all sign patterns inside each L_j (small cases only)."""
    from .polynomial import z_groups

    g = z_groups(spec, tau)
    total = 0.0
    for j in range(tau // 2 + 1, tau + 1):
        w = spec.coef[g == j]
        if len(w) > 20:
            raise ValueError("too many terms for exhaustive enumeration")
        pats = np.array(list(itertools.product((-1, 1), repeat=len(w))))
        total += float(np.mean(np.abs(pats @ w))) if len(w) else 0.0
    return total


# --- sup over a finite index set of Rademacher families ---


@dataclass(frozen=True)
class Lemma31Report:
    mean_with: float
    se_with: float
    mean_without: float
    se_without: float
    R: int

    @property
    def flagged(self) -> bool:
        """Mean with Y falls more than 3 combined standard errors below the mean without."""
        combined = math.hypot(self.se_with, self.se_without)
        return self.mean_with < self.mean_without - 3 * combined


def lemma31_check(X: np.ndarray, Y: np.ndarray, R: int = 10_000, seed: int = 0) -> Lemma31Report:
    """Compare E sup_z |X_z + Y_z| with E sup_z |X_z| by Monte Carlo.

    ``X[z, i]`` is the coefficient of eps_i in X_z and ``Y[z, k]`` that of an
    independent eta_k in Y_z (Y is centered by construction).
    """
    X, Y = np.atleast_2d(np.asarray(X, dtype=float)), np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[0] != Y.shape[0]:
        raise ValueError("X and Y must share the index set")
    nx, ny = X.shape[1], Y.shape[1]
    eps = rademacher_block(seed, np.arange(R), np.arange(nx + ny)).astype(float)
    xs = eps[:, :nx] @ X.T
    ys = eps[:, nx:] @ Y.T
    with_y = np.abs(xs + ys).max(axis=1)
    without = np.abs(xs).max(axis=1)
    (m1, s1), (m0, s0) = _mean_se(with_y), _mean_se(without)
    return Lemma31Report(m1, s1, m0, s0, R)


def lemma31_exact(X: Sequence[Sequence], Y: Sequence[Sequence]) -> tuple:
    """Exact (E sup|X+Y|, E sup|X|) by enumerating every sign vector.

    Integer or Fraction coefficients give exact rational results.
    """
    nx, ny = len(X[0]), len(Y[0])
    with_y, without = [], []
    for e in itertools.product((-1, 1), repeat=nx + ny):
        xs = [sum(c * s for c, s in zip(row, e[:nx])) for row in X]
        ys = [sum(c * s for c, s in zip(row, e[nx:])) for row in Y]
        with_y.append(max(abs(a + b) for a, b in zip(xs, ys)))
        without.append(max(abs(a) for a in xs))
    count = 2 ** (nx + ny)
    return _average(with_y, count), _average(without, count)


def _average(vals: list, count: int):
    total = sum(vals)
    return Fraction(total) / count if isinstance(total, (int, Fraction)) else total / count


# --- grids of estimates ---


def resolve_tau(rule, N: int, table: PrimeTable) -> int:
    """Map a tau rule ("pi(N)", "sqrt(N)", "rs-optimal", an int, or a callable) to an ordinal."""
    mu = table.pi(N)
    if callable(rule):
        tau = int(rule(N))
    elif isinstance(rule, (int, np.integer)):
        tau = int(rule)
    elif rule == "pi(N)":
        tau = mu
    elif rule == "sqrt(N)":
        tau = math.isqrt(N)
    elif rule == "rs-optimal":
        tau = round(bounds.rudin_shapiro_tau(N))
    else:
        raise ValueError(f"unknown tau rule {rule!r}")
    return max(1, min(tau, mu))


@dataclass(frozen=True)
class RatioRow:
    N: int
    tau: int
    sigma: float
    record: EstimateRecord
    rate: float  # N^(1 - sigma) / log N
    ratio: float  # estimate / rate
    thm11_upper: float
    thm11_lower: float
    l1: float


def ratio_table(
    N_grid: Sequence[int],
    tau_rule,
    sigma: float,
    method: str,
    R: int,
    seed: int,
    table: PrimeTable,
    **kwargs,
) -> list[RatioRow]:
    """One row per N: the estimate, its ratio to N^(1-sigma)/log N, and the bound values."""
    rows = []
    for N in N_grid:
        tau = resolve_tau(tau_rule, N, table)
        spec = e_tau_spec(N, tau, table, sigma)
        rec = estimate_esup(spec, tau, method, R, seed, **kwargs)
        rate = N ** (1 - sigma) / math.log(N)
        lower = (
            bounds.lower_thm11(N, tau, sigma, bounds.thm11_psi_star(N, tau, table)).value if tau >= 2 else 0.0
        )
        rows.append(
            RatioRow(
                N=N,
                tau=tau,
                sigma=sigma,
                record=rec,
                rate=rate,
                ratio=rec.estimate / rate,
                thm11_upper=bounds.upper_thm11(N, tau, sigma).value,
                thm11_lower=lower,
                l1=bounds.l1_bound(N, tau, sigma, table).value,
            )
        )
    return rows
