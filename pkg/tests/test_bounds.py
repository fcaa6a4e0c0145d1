import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dirichlet_sup import bounds as B
from dirichlet_sup.numbertheory import psi, sieve_primes


def test_upper_examples(table):
    r = B.upper_thm11(1e4, 200, 0)
    assert r.value == pytest.approx(100 * math.sqrt(200 / math.log(1e4))) and r.tag.endswith("-I")
    assert r.value == pytest.approx(466.0, abs=0.1)
    N = 10**4
    full = B.upper_thm11(N, table.pi(N), 0).value
    assert 0.5 < full / (N / math.log(N)) < 2
    with pytest.raises(ValueError):
        B.upper_thm11(1e4, 10, 0.5)


def test_seams_continuous():
    for N in (1e3, 1e6, 1e10):
        for tau in (math.sqrt(N), math.sqrt(N) / math.log(N)):
            lo = B.upper_thm11(N, tau * (1 - 1e-12), 0).value
            hi = B.upper_thm11(N, tau, 0).value
            assert lo == pytest.approx(hi, rel=1e-9)


def test_lower_examples(table):
    assert B.lower_thm11(1e4, 200, 0, 0.0).value == 0.0
    N, tau = 10**4, 25
    ps = B.thm11_psi_star(N, tau, table)
    x, y = N / table.p(tau), table.p(tau // 2)
    assert ps == psi(int(x), y) / x
    expect = 100 * math.sqrt(tau / math.log(tau)) * math.sqrt(ps)
    assert B.lower_thm11(N, tau, 0, ps).value == pytest.approx(expect, rel=1e-14)
    with pytest.raises(ValueError):
        B.lower_thm11(N, tau, 0, 1.5)


def test_thm12():
    lo, hi = B.bounds_thm12(1e6, 2000, 0.1, 0.3, 1.0)
    assert hi.value == pytest.approx(1e6 ** 0.4 * math.sqrt(2000))
    assert lo.flags["valid"] and hi.flags["valid"]
    assert not B.thm12_valid(1e6, 987) and B.thm12_valid(1e6, 988)


def test_l1_examples(table):
    assert B.l1_bound(100, 2, 0, table).value == psi(100, 3) == 19
    assert B.l1_bound(300, table.pi(300), 0, table).value == 299
    v = B.l1_bound(100, 3, 0.25, table).value
    assert v == pytest.approx(sum(n**-0.25 for n in range(2, 101) if all(p in (2, 3, 5) for p in _primes(n))))


def _primes(n):
    out, d = [], 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    return out + ([n] if n > 1 else [])


def test_rudin_shapiro():
    assert B.rudin_shapiro_log_tau(200) == pytest.approx(math.sqrt(100 * math.log(200)))
    assert B.rudin_shapiro_log_tau(200) == pytest.approx(23.0, abs=0.05)
    with pytest.raises(ValueError):
        B.rudin_shapiro_tau(10)


def test_rs_envelope_normalized_exponent_approaches_one():
    ratios = []
    # lower-order terms decay like loglog / log, so the approach is slow
    for log_n in (1e4, 1e6, 1e9, 1e20, 1e80):
        ref = math.sqrt(log_n * math.log(log_n) / 2)
        ratios.append(B.rs_envelope_exponent(log_n) / ref)
    assert ratios == sorted(ratios)
    assert 0.9 < ratios[0] and abs(ratios[-1] - 1) < 0.02


def test_prop34_constant_weights(table):
    N = 200
    r = B.prop34_lower(N, 0.0, lambda n: 1.0, table)
    mu = table.pi(N)
    expect = sum(math.sqrt(N // table.p(j) - 1) for j in range(mu // 2 + 1, mu + 1))
    assert r.value == pytest.approx(expect) and not r.flags["non_multiplicative"]
    bad = B.prop34_lower(N, 0.0, lambda n: float(n % 3), table)
    assert bad.flags["non_multiplicative"]


def test_prop35():
    r = B.prop35_lower([2, 3, 5, 7], 0.0)
    assert r.value == pytest.approx(4 * 3 / 2**1.5)
    assert B.prop35_lower([5], 0.2).flags["degenerate"]
    with pytest.raises(ValueError):
        B.prop35_lower([4, 6], 0.0)


@given(st.lists(st.sampled_from([2, 3, 5, 7, 11, 13, 17, 19, 23]), min_size=2, max_size=9, unique=True), st.floats(0, 0.49))
def test_prop35_matches_plain_enumeration(P, sigma):
    import itertools

    x = [p**-sigma for p in P]
    y = [math.sqrt(1 + v * v) for v in x]
    best = max(
        sum(x[i] for i in G) / math.prod(y[i] for i in G)
        for k in range(1, len(P))
        for G in itertools.combinations(range(len(P)), k)
    )
    assert B.prop35_lower(P, sigma).value == pytest.approx(math.prod(y) * best, rel=1e-12)


@given(st.floats(10, 1e12), st.floats(0, 1), st.floats(0, 0.49))
def test_scale_law(N, frac, sigma):
    tau = max(1.0, frac * N)
    a = B.upper_thm11(N, tau, sigma).value
    b = B.upper_thm11(N, tau, 0).value
    assert a == pytest.approx(N**-sigma * b, rel=1e-12)


@given(st.floats(100, 1e15), st.floats(0, 1))
def test_gap_shape(N, frac):
    tau = max(2.0, frac * N)
    up = B.upper_thm11(N, tau, 0).value
    lo = B.lower_thm11(N, tau, 0, 1.0, log_form="sharpness").value
    case = B.thm11_case(N, tau)
    if case == "I":
        assert up / lo == pytest.approx(1.0, rel=1e-12)
    elif case == "II":
        assert up / lo <= math.sqrt(math.log(N)) * (1 + 1e-12)
    else:
        assert up / lo <= math.sqrt(math.log(tau)) * (1 + 1e-12)
