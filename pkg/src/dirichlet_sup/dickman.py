"""Dickman's function, the smooth density it approximates, and the semi-asymptotic exponent.

rho is tabulated once per unit interval [k, k+1] by Chebyshev collocation of

    u * rho(u) = integral_{u-1}^{u} rho(t) dt,

which is the integrated form of ``u rho'(u) + rho(u - 1) = 0`` with the
constant of integration pinned to zero.  Each interval stores ``rho / rho(k)``
together with ``log rho(k)``, so values far below double-precision range are
still available in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as C

from .numbertheory import psi as exact_psi

DEFAULT_DEGREE = 32


class TableRangeError(ValueError):
    """Argument beyond the tabulated range of the Dickman table."""


def _collocation_ops(degree: int):
    x = np.cos(np.pi * np.arange(degree + 1) / degree)[::-1]  # ascending, includes +-1
    s = (x + 1) / 2
    to_coef = np.linalg.inv(C.chebvander(x, degree))
    integ = np.empty((degree + 1, degree + 1))
    for i in range(degree + 1):
        # integral from s=0 of the i-th cardinal function; ds = dx / 2
        integ[:, i] = C.chebval(x, C.chebint(to_coef[:, i], lbnd=-1, scl=0.5))
    return x, s, to_coef, integ


@dataclass(frozen=True)
class DickmanTable:
    u_max: float
    tolerance: float
    degree: int
    log_scale: np.ndarray = field(repr=False)  # log rho(k), k = 0..K-1
    coefs: np.ndarray = field(repr=False)  # row k: Chebyshev coefficients of rho / rho(k) on [k, k+1]

    @classmethod
    def build(cls, u_max: float = 50.0, tolerance: float = 1e-9, degree: int = DEFAULT_DEGREE) -> "DickmanTable":
        if u_max <= 0:
            raise ValueError("u_max must be positive")
        n_int = max(1, math.ceil(u_max))
        x, s, to_coef, integ = _collocation_ops(degree)
        log_scale = np.zeros(n_int)
        coefs = np.zeros((n_int, degree + 1))
        coefs[0, 0] = 1.0
        for k in range(1, n_int):
            prev = coefs[k - 1]
            anti = C.chebint(prev, lbnd=-1, scl=0.5)
            # integral over [u-1, k] of the previous piece, in units of rho(k-1)
            rhs = C.chebval(1.0, anti) - C.chebval(x, anti)
            h = np.linalg.solve(np.diag(k + s) - integ, rhs)
            log_scale[k] = log_scale[k - 1] + math.log(h[0])
            coefs[k] = to_coef @ (h / h[0])
        log_scale.setflags(write=False)
        coefs.setflags(write=False)
        return cls(u_max=float(u_max), tolerance=tolerance, degree=degree, log_scale=log_scale, coefs=coefs)

    def _locate(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u < 0):
            raise ValueError("rho is defined for u >= 0")
        if np.any(u > self.u_max):
            raise TableRangeError(f"u beyond table range {self.u_max}")
        k = np.minimum(np.floor(u).astype(int), len(self.log_scale) - 1)
        return u, k, 2 * (u - k) - 1

    def log_rho(self, u):
        u, k, x = self._locate(u)
        g = np.array([C.chebval(xi, self.coefs[ki]) for xi, ki in zip(np.ravel(x), np.ravel(k))])
        out = self.log_scale[np.ravel(k)] + np.log(g)
        return out.reshape(u.shape) if u.shape else float(out[0])

    def rho(self, u):
        return np.exp(self.log_rho(u))

    def derivative(self, u):
        u, k, x = self._locate(u)
        out = np.array([
            math.exp(self.log_scale[ki]) * 2 * C.chebval(xi, C.chebder(self.coefs[ki]))
            for xi, ki in zip(np.ravel(x), np.ravel(k))
        ])
        return out.reshape(u.shape) if u.shape else float(out[0])

    def residual_max(self) -> float:
        """Largest |v rho'(v) + rho(v - 1)| over collocation nodes with v > 1."""
        x, s, _, _ = _collocation_ops(self.degree)
        worst = 0.0
        for k in range(1, len(self.log_scale)):
            v = k + s
            v = v[(v > 1) & (v <= self.u_max)]
            if v.size:
                worst = max(worst, float(np.max(np.abs(v * self.derivative(v) + self.rho(v - 1)))))
        return worst


@lru_cache(maxsize=4)
def default_table(u_max: float = 50.0) -> DickmanTable:
    return DickmanTable.build(u_max=u_max)


def rho(u, table: DickmanTable | None = None, log: bool = False):
    """Dickman rho(u) (or its logarithm when ``log`` is set)."""
    table = table or default_table()
    return table.log_rho(u) if log else table.rho(u)


def psi_star_dickman(N: float, M: float, table: DickmanTable | None = None) -> float:
    if not N >= M >= 2:
        raise ValueError("need N >= M >= 2")
    return float(rho(math.log(N) / math.log(M), table))


def semiasymptotic_alpha(x: float, y: float) -> float:
    """alpha(x, y) = log(1 + y / log x) / log y."""
    if not (x > math.e and y > 1):
        raise ValueError("need x > e and y > 1")
    return math.log1p(y / math.log(x)) / math.log(y)


def in_alpha_zone(x: float, y: float) -> bool:
    """Whether (x, y) lies in the zone y > log x where alpha is used."""
    return y > math.log(x)


@dataclass(frozen=True)
class SemiAsymptoticReport:
    x: int
    a: int
    y: int
    alpha: float
    psi_ax: int
    psi_x: int
    ratio: float
    inv_ubar: float
    in_zone: bool

    @property
    def within_band(self) -> bool:
        """ratio in [1 - 5/u_bar, 1 + 5/u_bar]."""
        return abs(self.ratio - 1) <= 5 * self.inv_ubar


def check_semiasymptotic(x: int, a: int, y: int, counter: Callable[[int, int], int] = exact_psi) -> SemiAsymptoticReport:
    """Compare Psi(a x, y) against a^alpha(x, y) Psi(x, y) using exact counts."""
    if a < 1:
        raise ValueError("a must be >= 1")
    alpha = semiasymptotic_alpha(x, y)
    psi_ax, psi_x = counter(a * x, y), counter(x, y)
    ratio = psi_ax / (a**alpha * psi_x)
    inv_ubar = math.log(y) / min(math.log(x), y)
    return SemiAsymptoticReport(x, a, y, alpha, psi_ax, psi_x, ratio, inv_ubar, in_alpha_zone(x, y))
