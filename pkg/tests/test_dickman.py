import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dirichlet_sup.dickman import (
    DickmanTable,
    TableRangeError,
    check_semiasymptotic,
    default_table,
    in_alpha_zone,
    psi_star_dickman,
    rho,
    semiasymptotic_alpha,
)


def rho_on_2_3(u: float) -> float:
    """Independent oracle: rho(u) = 1 - log u + int_2^u log(t - 1) / t dt for 2 <= u <= 3."""
    mpmath.mp.dps = 30
    return float(1 - mpmath.log(u) + mpmath.quad(lambda t: mpmath.log(t - 1) / t, [2, u]))


def test_rho_examples():
    assert rho(0.5) == 1.0
    assert rho(1.5) == pytest.approx(1 - math.log(1.5), abs=1e-12)
    lr = rho(10, log=True)
    assert 0.5 * (-10 * math.log(10)) >= lr >= 2 * (-10 * math.log(10))


def test_rho_against_quadrature_oracle():
    for u in np.linspace(2, 3, 11):
        assert rho(u) == pytest.approx(rho_on_2_3(u), rel=1e-11)


def test_rho_range_errors():
    with pytest.raises(TableRangeError):
        rho(51)
    with pytest.raises(ValueError):
        rho(-0.1)


def test_residual_and_log_space():
    t = DickmanTable.build(u_max=300)
    assert t.residual_max() < 1e-9
    # rho(300) underflows doubles but its log is finite and follows -u log u
    lr = t.log_rho(300.0)
    assert math.isfinite(lr) and lr < -1500


def test_rho_decreasing_positive():
    u = np.linspace(1, 50, 2000)
    v = rho(u, log=True)
    assert np.all(np.diff(v) < 0)
    assert np.all(np.isfinite(v))


def test_psi_star_dickman_examples():
    assert psi_star_dickman(1000, 1000) == 1.0
    assert psi_star_dickman(10**6, 10**3) == pytest.approx(1 - math.log(2), abs=1e-12)
    a = psi_star_dickman(10**6, 10**2)
    b = psi_star_dickman(10**9, 10**3)
    assert a == pytest.approx(b, rel=1e-12)


def test_alpha_examples():
    x = 1e8
    y = math.log(x)
    assert semiasymptotic_alpha(x, y) == pytest.approx(math.log(2) / math.log(y))
    assert not in_alpha_zone(x, y) and in_alpha_zone(x, 2 * y)
    # y = sqrt(x): 1 - alpha ~ log log x / log y shrinks toward 0
    gaps = [1 - semiasymptotic_alpha(10.0**k, 10.0 ** (k / 2)) for k in (20, 50, 100, 300)]
    assert all(g > 0 for g in gaps) and gaps == sorted(gaps, reverse=True) and gaps[-1] < 0.02
    with pytest.raises(ValueError):
        semiasymptotic_alpha(2.0, 10.0)


@given(st.floats(6, 12), st.floats(0, 1))
def test_alpha_bounds(log10_x, frac):
    x = 10.0**log10_x
    lx = math.log(x)
    y = math.exp(math.log(2 * lx) + frac * (lx - math.log(2 * lx)))  # y in [2 log x, x]
    a = semiasymptotic_alpha(x, y)
    assert 0 < a <= 1
    if y >= lx**3:
        assert a >= 2 / 3


def test_semiasymptotic_examples():
    r = check_semiasymptotic(10**4, 1, 100)
    assert r.ratio == 1.0
    r = check_semiasymptotic(10**4, 10, 100)
    assert r.within_band and r.in_zone
    x, a = 500, 3
    r = check_semiasymptotic(x, a, a * x)
    assert r.ratio == pytest.approx((a * x - 1) / (a**r.alpha * (x - 1)), rel=1e-15)


def test_default_table_is_shared():
    assert default_table() is default_table()
