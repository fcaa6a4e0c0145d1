import pytest
from hypothesis import HealthCheck, settings

from dirichlet_sup.numbertheory import sieve_primes

settings.register_profile("repo", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def table():
    return sieve_primes(20_000)


def trial_division_is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


def brute_lpf(n: int) -> int:
    """Largest prime factor by testing every d <= n; 1 for n = 1."""
    return max((d for d in range(2, n + 1) if n % d == 0 and trial_division_is_prime(d)), default=1)


# --- acceptance reporting: one PASS/FAIL line per criterion in the summary ---

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
