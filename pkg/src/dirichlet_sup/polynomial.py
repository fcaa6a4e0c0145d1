"""Dirichlet polynomials, their Bohr lift to the torus, and suprema.

A polynomial is ``D(t) = sum_n eps_n d_n n^(-sigma - i t)``.  Writing
``n = prod_j p_j^a_j(n)`` it lifts to the torus as
``Q(z) = sum_n eps_n d_n n^(-sigma) exp(2 pi i <a(n), z>)`` and the two have the
same supremum.  Suprema on the torus are reported as a bracket
``[value, value + gap]``; ``value`` is attained at an evaluated point and ``gap``
comes from a Lipschitz certificate (or from the l1 envelope, whichever is
tighter).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple

import numpy as np
from scipy import sparse
from scipy.stats import qmc

from .numbertheory import PrimeTable, exponent_matrix, smooth_set

TWO_PI = 2 * math.pi
_CHUNK_ELEMS = 2_000_000  # terms x points per vectorized block


@dataclass(frozen=True, eq=False)
class DirichletSpec:
    N: int
    support: np.ndarray
    weights: np.ndarray
    sigma: float
    dimension: int
    table: PrimeTable = field(repr=False)
    exponents: sparse.csr_matrix = field(repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(
        cls,
        support: Iterable[int],
        table: PrimeTable,
        weights=None,
        sigma: float = 0.0,
        dimension: int | None = None,
        N: int | None = None,
    ) -> "DirichletSpec":
        """``weights`` may be None (all ones), a sequence aligned with ``support``, or a callable n -> d_n."""
        support = np.unique(np.asarray(list(support), dtype=np.int64))
        if support.size and support[0] < 2:
            raise ValueError("support must consist of integers >= 2")
        if not 0 <= sigma < 0.5:
            raise ValueError("sigma must lie in [0, 1/2)")
        if weights is None:
            w = np.ones(len(support))
        elif callable(weights):
            w = np.array([float(weights(int(n))) for n in support])
        else:
            w = np.asarray(weights, dtype=float)
            if w.shape != support.shape:
                raise ValueError("weights must align with the sorted support")
        n_top = int(support[-1]) if support.size else 1
        N = n_top if N is None else N
        if N < n_top:
            raise ValueError("N is below the largest support element")
        if dimension is None:
            dimension = table.pi(N) if N >= 2 else 0
        A = exponent_matrix(support, table, dimension)
        for arr in (support, w):
            arr.setflags(write=False)
        return cls(N=N, support=support, weights=w, sigma=float(sigma), dimension=dimension, table=table, exponents=A)

    @property
    def coef(self) -> np.ndarray:
        """Effective coefficients w_n = d_n n^(-sigma)."""
        if "coef" not in self._cache:
            c = self.weights * self.support.astype(float) ** (-self.sigma)
            if not np.all(np.isfinite(c)):
                raise ValueError("non-finite effective coefficient")
            c.setflags(write=False)
            self._cache["coef"] = c
        return self._cache["coef"]

    @property
    def l1(self) -> float:
        """sum_n |w_n|: an upper bound for the supremum under every sign choice."""
        return math.fsum(np.abs(self.coef))

    @property
    def coordinate_weights(self) -> np.ndarray:
        """L_j = sum_n a_j(n) |w_n|, the Lipschitz constant of Q in coordinate j (over 2 pi)."""
        if "colw" not in self._cache:
            self._cache["colw"] = np.asarray(self.exponents.T @ np.abs(self.coef)).ravel()
        return self._cache["colw"]

    def columns(self):
        """Per coordinate: (row indices, exponents) of the terms that depend on it."""
        if "cols" not in self._cache:
            csc = self.exponents.tocsc()
            self._cache["cols"] = [
                (csc.indices[csc.indptr[j] : csc.indptr[j + 1]], csc.data[csc.indptr[j] : csc.indptr[j + 1]])
                for j in range(self.dimension)
            ]
        return self._cache["cols"]


def e_tau_spec(N: int, tau: int, table: PrimeTable, sigma: float = 0.0, weights=None) -> DirichletSpec:
    """Polynomial supported on E_tau = {2 <= n <= N : P+(n) <= p_tau}, on the tau-torus."""
    mu = table.pi(N)
    if not 1 <= tau <= mu:
        raise ValueError(f"tau={tau} outside 1..pi(N)={mu}")
    members = smooth_set(N, table.p(tau), table).members
    return DirichletSpec.build(members, table, weights=weights, sigma=sigma, dimension=tau, N=N)


@dataclass(frozen=True, eq=False)
class SignAssignment:
    signs: np.ndarray  # aligned with spec.support
    seed: int | None = None
    replicate: int | None = None

    def as_dict(self, spec: DirichletSpec) -> dict[int, int]:
        return {int(n): int(e) for n, e in zip(spec.support, self.signs)}


def constant_signs(spec: DirichletSpec, value: int = 1) -> SignAssignment:
    return SignAssignment(np.full(len(spec.support), value, dtype=np.int8))


@dataclass(frozen=True, eq=False)
class TorusPoint:
    coordinates: np.ndarray

    def __post_init__(self):
        z = np.mod(np.asarray(self.coordinates, dtype=float), 1.0)
        z[z >= 1.0] = 0.0  # mod can round up to 1.0 for tiny negatives
        z.setflags(write=False)
        object.__setattr__(self, "coordinates", z)

    def __len__(self) -> int:
        return len(self.coordinates)


def circle_distance(a, b) -> np.ndarray:
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), 1.0)
    return np.minimum(d, 1.0 - d)


def _signed(spec: DirichletSpec, signs: SignAssignment) -> np.ndarray:
    if len(signs.signs) != len(spec.support):
        raise ValueError("sign assignment does not match the support")
    return spec.coef * signs.signs


def eval_line(spec: DirichletSpec, signs: SignAssignment, t):
    """D(sigma + i t) = sum_n eps_n d_n n^(-sigma) e^(-i t log n); ``t`` scalar or array."""
    c = _signed(spec, signs)
    logs = np.log(spec.support.astype(float))
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(ts.shape, dtype=complex)
    step = max(1, _CHUNK_ELEMS // max(1, len(c)))
    for i in range(0, len(ts), step):
        out[i : i + step] = np.exp(-1j * np.outer(ts[i : i + step], logs)) @ c
    return out if np.ndim(t) else complex(out[0])


def bohr_lift_point(t: float, table: PrimeTable, dim: int) -> TorusPoint:
    """z_j = -t log(p_j) / (2 pi) mod 1, so that eval_torus(z) == eval_line(t)."""
    if dim > len(table):
        raise ValueError("dimension exceeds the prime table")
    logs = np.log(table.primes[:dim].astype(float))
    return TorusPoint(-t * logs / TWO_PI)


def _phases(spec: DirichletSpec, z: np.ndarray) -> np.ndarray:
    return np.mod(spec.exponents @ z, 1.0)


def eval_torus(spec: DirichletSpec, signs: SignAssignment, z: TorusPoint) -> complex:
    if len(z) != spec.dimension:
        raise ValueError(f"point has dimension {len(z)}, polynomial has {spec.dimension}")
    c = _signed(spec, signs)
    return complex(np.exp(2j * np.pi * _phases(spec, z.coordinates)) @ c)


def lipschitz_certificate(spec: DirichletSpec, signs: SignAssignment, z: TorusPoint, z2: TorusPoint) -> float:
    """2 pi sum_n |w_n| sum_j a_j(n) dist(z_j, z2_j) >= |Q(z) - Q(z2)|."""
    if len(z) != spec.dimension or len(z2) != spec.dimension:
        raise ValueError("dimension mismatch")
    dist = circle_distance(z.coordinates, z2.coordinates)
    return TWO_PI * float(spec.coordinate_weights @ dist)


class TorusSup(NamedTuple):
    value: float
    gap: float
    point: TorusPoint

    @property
    def upper(self) -> float:
        return self.value + self.gap


def lattice_levels(weights: np.ndarray, budget: int) -> list[np.ndarray]:
    """Nested dyadic lattices: level k doubles the coordinate with largest weight/mesh.

    The doubling order depends only on ``weights``, so the levels for a smaller
    budget are a prefix of the levels for a larger one.
    """
    m = np.ones(len(weights), dtype=np.int64)
    levels = [m.copy()]
    if not np.any(weights > 0):
        return levels
    while 2 * int(np.prod(m, dtype=object)) <= budget:
        j = int(np.argmax(weights / m))  # first maximum: smallest index on ties
        m[j] *= 2
        levels.append(m.copy())
    return levels


def _lattice(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Active coordinates and lattice points over them, in lexicographic order."""
    active = np.flatnonzero(m > 1)
    if active.size == 0:
        return active, np.zeros((1, 0))
    grids = [np.arange(m[j]) / m[j] for j in active]
    pts = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, len(active))
    return active, pts


def _moduli(c: np.ndarray, A: sparse.csr_matrix, Z: np.ndarray) -> np.ndarray:
    """|Q| at each row of Z (full-dimensional points)."""
    out = np.empty(len(Z))
    step = max(1, _CHUNK_ELEMS // max(1, len(c)))
    for i in range(0, len(Z), step):
        ph = np.mod(A @ Z[i : i + step].T, 1.0)
        out[i : i + step] = np.abs(c @ np.exp(2j * np.pi * ph))
    return out


def _golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float) -> tuple[float, float]:
    g = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    x1, x2 = b - g * (b - a), a + g * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - g * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + g * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def coordinate_ascent(spec: DirichletSpec, signs: SignAssignment, z: np.ndarray, sweeps: int, tol: float = 1e-9) -> np.ndarray:
    """Round-robin golden-section ascent of |Q| one coordinate at a time.

    Along coordinate j, Q is ``rest + sum_b S_b e^(2 pi i b delta)`` with b the
    exponents of p_j, so each line search only touches the terms divisible by p_j.
    """
    c = _signed(spec, signs)
    z = np.array(z, dtype=float)
    terms = c * np.exp(2j * np.pi * _phases(spec, z))
    active = [j for j in range(spec.dimension) if spec.coordinate_weights[j] > 0]
    cols = spec.columns()
    for _ in range(sweeps):
        total = terms.sum()
        for j in active:
            rows, b = cols[j]
            bs, inv = np.unique(b, return_inverse=True)
            S = np.bincount(inv, weights=terms[rows].real, minlength=len(bs)) + 1j * np.bincount(
                inv, weights=terms[rows].imag, minlength=len(bs)
            )
            rest = total - S.sum()

            def f(delta: float, S=S, bs=bs, rest=rest) -> float:
                return abs(rest + S @ np.exp(2j * np.pi * bs * delta))

            grid_n = 16 * int(bs[-1]) + 1
            grid = np.arange(grid_n) / grid_n
            vals = np.abs(rest + np.exp(2j * np.pi * np.outer(grid, bs)) @ S)
            k = int(np.argmax(vals))
            delta, fd = _golden_max(f, grid[k] - 1 / grid_n, grid[k] + 1 / grid_n, tol)
            if fd <= abs(total):
                continue
            z[j] = (z[j] + delta) % 1.0
            terms[rows] *= np.exp(2j * np.pi * b * delta)
            total = rest + S @ np.exp(2j * np.pi * bs * delta)
        terms = c * np.exp(2j * np.pi * _phases(spec, z))
    return z


def sup_torus(
    spec: DirichletSpec,
    signs: SignAssignment,
    grid_budget: int = 4096,
    refine_steps: int = 2,
    seed: int = 0,
) -> TorusSup:
    """Certified bracket for sup_z |Q(z)|.

    Half the budget goes to a nested dyadic lattice whose per-coordinate mesh
    follows the coordinate weights, the other half to scrambled Sobol points.
    The best point of every lattice level is refined by coordinate ascent.  The
    gap combines the lattice mesh with the Lipschitz bound and is capped by the
    l1 envelope.
    """
    if grid_budget < 1:
        raise ValueError("grid_budget must be >= 1")
    dim = spec.dimension
    c = _signed(spec, signs)
    if len(c) == 0:
        return TorusSup(0.0, 0.0, TorusPoint(np.zeros(dim)))
    lattice_budget = 1 << (max(1, (grid_budget + 1) // 2).bit_length() - 1)
    levels = lattice_levels(spec.coordinate_weights, lattice_budget)
    m = levels[-1]
    active, pts = _lattice(m)
    full = np.zeros((len(pts), dim))
    full[:, active] = pts
    vals = _moduli(c, spec.exponents, full)

    # best point of each nested level, found by masking the finest lattice
    idx = np.rint(pts * m[active]).astype(np.int64)
    starts: list[int] = []
    for lev in levels:
        stride = m[active] // lev[active]
        mask = np.all(idx % stride == 0, axis=1)
        k = int(np.flatnonzero(mask)[np.argmax(vals[mask])])
        if k not in starts:
            starts.append(k)
    lattice_max = float(vals.max())
    best_val, best_pt = lattice_max, full[int(np.argmax(vals))]

    n_sobol = grid_budget // 2
    if n_sobol and dim:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # non power-of-two sample sizes
            sob = qmc.Sobol(dim, scramble=True, seed=seed).random(n_sobol)
        svals = _moduli(c, spec.exponents, sob)
        k = int(np.argmax(svals))
        if svals[k] > best_val:
            best_val, best_pt = float(svals[k]), sob[k]

    if refine_steps > 0:
        for k in starts:
            zr = coordinate_ascent(spec, signs, full[k], refine_steps)
            v = abs(eval_torus(spec, signs, TorusPoint(zr)))
            if v > best_val:
                best_val, best_pt = v, zr

    mesh_gap = math.pi * float(spec.coordinate_weights @ (1.0 / m))
    upper = min(lattice_max + mesh_gap, spec.l1)
    return TorusSup(best_val, max(upper - best_val, 0.0), TorusPoint(best_pt))


def z_groups(spec: DirichletSpec, tau: int) -> np.ndarray:
    """Ordinal j when term n lies in L_j (floor(tau/2) < j <= tau), else 0."""
    key = ("zgroups", tau)
    if key in spec._cache:
        return spec._cache[key]
    if not 1 <= tau <= spec.dimension:
        raise ValueError(f"tau={tau} outside 1..{spec.dimension}")
    half = tau // 2
    A = spec.exponents
    out = np.zeros(len(spec.support), dtype=np.int64)
    for r in range(len(spec.support)):
        cols = A.indices[A.indptr[r] : A.indptr[r + 1]]
        data = A.data[A.indptr[r] : A.indptr[r + 1]]
        if cols.size == 0:
            continue
        j = int(cols[-1]) + 1
        if half < j <= tau and data[-1] == 1 and (cols.size == 1 or cols[-2] + 1 <= half):
            out[r] = j
    out.setflags(write=False)
    spec._cache[key] = out
    return out


def exact_sup_Z(spec: DirichletSpec, signs: SignAssignment, tau: int) -> float:
    """sup over the Z lattice of |Q'| in closed form: sum_j |sum_{n in L_j} eps_n w_n|."""
    g = z_groups(spec, tau)
    c = _signed(spec, signs)
    sums = np.bincount(g, weights=c, minlength=tau + 1)[1:]
    return math.fsum(np.abs(sums))


def restrict_to_z(spec: DirichletSpec, signs: SignAssignment, tau: int) -> tuple[DirichletSpec, SignAssignment]:
    """Q' : the terms of ``spec`` lying in the union of L_j, floor(tau/2) < j <= tau."""
    keep = z_groups(spec, tau) > 0
    sub = DirichletSpec.build(
        spec.support[keep], spec.table, weights=spec.weights[keep], sigma=spec.sigma, dimension=spec.dimension, N=spec.N
    )
    return sub, SignAssignment(np.asarray(signs.signs)[keep], signs.seed, signs.replicate)


def z_lattice(tau: int, dim: int) -> Iterable[TorusPoint]:
    """All points with z_j = 0 for j <= floor(tau/2) or j > tau, z_j in {0, 1/2} otherwise."""
    half = tau // 2
    for bits in itertools.product((0.0, 0.5), repeat=tau - half):
        z = np.zeros(dim)
        z[half:tau] = bits
        yield TorusPoint(z)


def sup_Z_bruteforce(spec: DirichletSpec, signs: SignAssignment, tau: int) -> float:
    """max over the Z lattice of |Q'(z)|, by evaluating Q' at every lattice point."""
    sub, s = restrict_to_z(spec, signs, tau)
    return max(abs(eval_torus(sub, s, z)) for z in z_lattice(tau, spec.dimension))


def sup_line_grid(spec: DirichletSpec, signs: SignAssignment, t_min: float, t_max: float, steps: int) -> float:
    """max |D(sigma + i t)| over a uniform grid of ``steps`` points in [t_min, t_max]."""
    if steps < 2 or not t_min < t_max:
        raise ValueError("need steps >= 2 and t_min < t_max")
    if len(spec.support) == 0:
        return 0.0
    return float(np.max(np.abs(eval_line(spec, signs, np.linspace(t_min, t_max, steps)))))
