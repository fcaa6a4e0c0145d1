"""Closed-form evaluators for the upper and lower bounds on E sup |D|.

The bounds hold up to constants whose values are not known.  Every report
carries the multiplicative constant it used (``constant``, default 1) so callers
compare shapes and ratios, never absolute values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .dickman import DickmanTable, rho
from .numbertheory import PrimeTable, psi, smooth_set

KHINTCHINE_L1 = 1 / math.sqrt(2)  # sharp constant in E|sum a_n eps_n| >= c (sum a_n^2)^(1/2)


@dataclass(frozen=True)
class BoundReport:
    tag: str
    inputs: Mapping[str, float]
    value: float
    constant: float = 1.0
    khintchine: float | None = None
    flags: Mapping[str, bool] = field(default_factory=dict)

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError(f"{self.tag}: negative or NaN bound {self.value}")


def _check_sigma(sigma: float) -> None:
    if not 0 <= sigma < 0.5:
        raise ValueError("sigma must lie in [0, 1/2)")


def thm11_case(N: float, tau: float) -> str:
    """'I' for sqrt(N) <= tau, 'II' for sqrt(N)/log N <= tau < sqrt(N), else 'III'."""
    root = math.sqrt(N)
    if tau >= root:
        return "I"
    if tau >= root / math.log(N):
        return "II"
    return "III"


def upper_thm11(N: float, tau: float, sigma: float, constant: float = 1.0) -> BoundReport:
    if N < 2 or tau < 1:
        raise ValueError("need N >= 2 and tau >= 1")
    _check_sigma(sigma)
    case = thm11_case(N, tau)
    logn = math.log(N)
    if case == "I":
        v = N ** (0.5 - sigma) * math.sqrt(tau / logn)
    elif case == "II":
        v = N ** (0.75 - sigma) / math.sqrt(logn)
    else:
        v = N ** (0.5 - sigma) * math.sqrt(tau)
    return BoundReport(f"thm1.1-upper-{case}", {"N": N, "tau": tau, "sigma": sigma}, constant * v, constant)


def lower_thm11(
    N: float, tau: float, sigma: float, psi_star: float, constant: float = 1.0, log_form: str = "theorem"
) -> BoundReport:
    """N^(1/2 - sigma) (tau / log tau)^(1/2) psi_star^(1/2).

    With ``log_form="sharpness"`` the log tau is replaced by log N in cases I
    and II (where log tau ~ log N), which is the form used when comparing the
    lower bound against the upper bound case by case.
    """
    if not 0 <= psi_star <= 1:
        raise ValueError("psi_star must lie in [0, 1]")
    if N < 2 or tau < 2:
        raise ValueError("need N >= 2 and tau >= 2 (log tau must be positive)")
    _check_sigma(sigma)
    case = thm11_case(N, tau)
    if log_form == "theorem":
        denom = math.log(tau)
    elif log_form == "sharpness":
        denom = math.log(N) if case in ("I", "II") else math.log(tau)
    else:
        raise ValueError(f"unknown log_form {log_form!r}")
    v = N ** (0.5 - sigma) * math.sqrt(tau / denom) * math.sqrt(psi_star)
    return BoundReport(
        f"thm1.1-lower-{case}",
        {"N": N, "tau": tau, "sigma": sigma, "psi_star": psi_star},
        constant * v,
        constant,
        flags={"sharpness_form": log_form == "sharpness"},
    )


def thm12_valid(N: float, tau: float) -> bool:
    """tau > exp((log log N)^2)."""
    return N > math.e and tau > math.exp(math.log(math.log(N)) ** 2)


def bounds_thm12(
    N: float, tau: float, sigma: float, psi_star_lower: float, psi_star_upper: float, constant: float = 1.0
) -> tuple[BoundReport, BoundReport]:
    """Lower and upper bounds with Dickman-type factors.

    ``psi_star_lower`` is Psi*(N / p_tau, p_{tau/2}) and ``psi_star_upper`` is
    Psi*(N / p_tau^2, p_tau).  Both reports carry a ``valid`` flag for the
    hypothesis tau > exp((log log N)^2); outside it the formulas still evaluate.
    """
    _check_sigma(sigma)
    for v in (psi_star_lower, psi_star_upper):
        if not 0 <= v <= 1:
            raise ValueError("Dickman-type factors must lie in [0, 1]")
    if tau < 2:
        raise ValueError("need tau >= 2")
    valid = thm12_valid(N, tau)
    base = N ** (0.5 - sigma) * math.sqrt(tau)
    inputs = {"N": N, "tau": tau, "sigma": sigma, "psi_star_lower": psi_star_lower, "psi_star_upper": psi_star_upper}
    lo = BoundReport(
        "thm1.2-lower", inputs, constant * base * math.sqrt(psi_star_lower / math.log(tau)), constant, flags={"valid": valid}
    )
    hi = BoundReport("thm1.2-upper", inputs, constant * base * math.sqrt(psi_star_upper), constant, flags={"valid": valid})
    return lo, hi


def thm11_psi_star(N: int, tau: int, table: PrimeTable, dickman: DickmanTable | None = None) -> float:
    """Psi*(N / p_tau, p_{floor(tau/2)}), exactly or (with ``dickman``) via rho."""
    x, y = N / table.p(tau), table.p(tau // 2)
    return _psi_star(x, y, dickman)


def thm12_psi_stars(N: int, tau: int, table: PrimeTable, dickman: DickmanTable | None = None) -> tuple[float, float]:
    """(Psi*(N/p_tau, p_{tau/2}), Psi*(N/p_tau^2, p_tau))."""
    pt = table.p(tau)
    return thm11_psi_star(N, tau, table, dickman), _psi_star(N / pt**2, pt, dickman)


def _psi_star(x: float, y: float, dickman: DickmanTable | None) -> float:
    if x < 1:
        return 0.0
    if dickman is None:
        return psi(math.floor(x), math.floor(y)) / x
    if y < 2:
        return 0.0
    return float(rho(max(math.log(x), 0.0) / math.log(y), dickman))


def l1_bound(N: int, tau: int, sigma: float, table: PrimeTable) -> BoundReport:
    """L(N, tau) = sum_{n in E_tau} n^(-sigma)."""
    _check_sigma(sigma)
    members = smooth_set(N, table.p(tau), table).members
    v = math.fsum(members.astype(float) ** (-sigma))
    return BoundReport("l1", {"N": N, "tau": tau, "sigma": sigma}, v)


def rudin_shapiro_log_tau(log_n: float) -> float:
    """log of the optimal tau, sqrt(log N / 2 * log log N)."""
    if log_n < math.log(16):
        raise ValueError("need N >= 16")
    return math.sqrt(log_n / 2 * math.log(log_n))


def rudin_shapiro_tau(N: float | None = None, log_n: float | None = None) -> float:
    """Optimal tau of the random Rudin-Shapiro construction: exp(sqrt(log N / 2 * log log N)).

    Pass ``log_n`` instead of ``N`` for N beyond float range.
    """
    if log_n is None:
        if N is None:
            raise ValueError("give N or log_n")
        log_n = math.log(N)
    return math.exp(rudin_shapiro_log_tau(log_n))


def rs_envelope_exponent(log_n: float) -> float:
    """log of E sup / (sum |a_n| / sqrt N) for the random Rudin-Shapiro polynomials.

    Uses the optimal tau, p_tau ~ tau log tau, the Dickman-factor upper bound for
    the numerator, the smooth density for the l1 mass and log rho(u) ~ -u log u.
    The result is compared against sqrt(log N log log N / 2).
    """
    log_tau = rudin_shapiro_log_tau(log_n)
    log_pt = log_tau + math.log(log_tau)

    def log_rho(u: float) -> float:
        return -u * math.log(u) if u > 1 else 0.0

    upper = 0.5 * log_tau + 0.5 * log_rho((log_n - 2 * log_pt) / log_pt)
    mass = log_rho(log_n / log_pt)
    return upper - mass


def prop34_lower(
    N: int,
    sigma: float,
    weights: Callable[[int], float] | Sequence[float],
    table: PrimeTable,
    constant: float = 1.0,
    sample_pairs: int = 200,
    seed: int = 0,
) -> BoundReport:
    """N^(-sigma) sum_{mu/2 < j <= mu} d_{p_j} B_{N/p_j}^(1/2), B_m = sum_{2<=n<=m} d_n^2.

    ``weights`` is a callable or an array indexed by n (entry 0 and 1 ignored).
    A random sample of coprime pairs is checked for multiplicativity; a failure
    sets the ``non_multiplicative`` flag but the value is still computed.
    """
    _check_sigma(sigma)
    d = _weight_array(weights, N)
    B = np.concatenate([[0.0, 0.0], np.cumsum(d[2:] ** 2)])
    mu = table.pi(N)
    terms = [d[table.p(j)] * math.sqrt(B[N // table.p(j)]) for j in range(mu // 2 + 1, mu + 1)]
    v = N ** (-sigma) * math.fsum(terms)
    flags = {"non_multiplicative": not _looks_multiplicative(d, N, sample_pairs, seed)}
    return BoundReport("prop3.4-lower", {"N": N, "sigma": sigma}, constant * v, constant, flags=flags)


def _weight_array(weights, N: int) -> np.ndarray:
    if callable(weights):
        return np.array([0.0] + [float(weights(n)) for n in range(1, N + 1)])
    d = np.asarray(weights, dtype=float)
    if len(d) < N + 1:
        raise ValueError("weight array must be indexed up to N")
    return d[: N + 1]


def _looks_multiplicative(d: np.ndarray, N: int, pairs: int, seed: int) -> bool:
    rng = np.random.default_rng(seed)
    checked = 0
    for _ in range(50 * pairs):
        if checked >= pairs:
            break
        a = int(rng.integers(2, max(3, math.isqrt(N) + 1)))
        b = int(rng.integers(2, max(3, N // a + 1)))
        if a * b > N or math.gcd(a, b) != 1:
            continue
        checked += 1
        if not math.isclose(d[a * b], d[a] * d[b], rel_tol=1e-12, abs_tol=1e-300):
            return False
    return True


def prop35_lower(P: Sequence[int], sigma: float, constant: float = 1.0) -> BoundReport:
    """prod_k (1 + P_k^(-2 sigma))^(1/2) times the max over nonempty proper G of
    sum_{j in G} P_j^(-sigma) / prod_{k in G} (1 + P_k^(-2 sigma))^(1/2).
    """
    P = [int(p) for p in P]
    if any(p < 2 for p in P):
        raise ValueError("elements must be >= 2")
    if len(P) > 30:
        raise ValueError("at most 30 elements (exhaustive subset search)")
    for a, b in itertools.combinations(P, 2):
        if math.gcd(a, b) != 1:
            raise ValueError(f"{a} and {b} are not coprime")
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    inputs = {"sigma": sigma, "K": len(P)}
    if len(P) < 2:
        return BoundReport("prop3.5-lower", inputs, 0.0, constant, flags={"degenerate": True})
    x = np.array(P, dtype=float) ** (-sigma)
    logy = 0.5 * np.log1p(x**2)
    best = _best_subset_ratio(x, logy)
    v = math.exp(float(logy.sum())) * best
    return BoundReport("prop3.5-lower", inputs, constant * v, constant, flags={"degenerate": False})


def _subset_sums(vals: np.ndarray) -> np.ndarray:
    """Sums over all subsets; entry at bitmask b sums vals[i] for the set bits of b."""
    out = np.zeros(1)
    for v in vals:
        out = np.concatenate([out, out + v])
    return out


def _best_subset_ratio(x: np.ndarray, logy: np.ndarray) -> float:
    """max over nonempty proper G of sum_G x / exp(sum_G logy), split into low/high halves."""
    k = len(x)
    lo = min(k, 20)
    sx_lo, sl_lo = _subset_sums(x[:lo]), _subset_sums(logy[:lo])
    sx_hi, sl_hi = _subset_sums(x[lo:]), _subset_sums(logy[lo:])
    full_lo, full_hi = len(sx_lo) - 1, len(sx_hi) - 1
    best = 0.0
    for h in range(len(sx_hi)):
        r = (sx_lo + sx_hi[h]) / np.exp(sl_lo + sl_hi[h])
        if h == 0:
            r[0] = -np.inf  # empty set
        if h == full_hi:
            r[full_lo] = -np.inf  # G = K
        best = max(best, float(r.max()))
    return best
