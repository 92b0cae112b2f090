import math
from fractions import Fraction

import mpmath
import pytest

from matula_asym import constants
from matula_asym.asymptotics import ExpansionCoefficients
from matula_asym.constants import (
    C2m,
    Dm,
    Dprime,
    Km,
    bernoulli,
    c2m_detail,
    c2m_tail_bound,
    constants_report,
    euler_gamma,
    finite_part_constants,
    gamma_fn,
    stieltjes_gamma1,
    zeta,
)
from matula_asym.errors import DomainError
from matula_asym.primes import loglog_prime_expansion

mpmath.mp.dps = 30


def test_euler_gamma():
    assert euler_gamma() == pytest.approx(float(mpmath.euler), abs=1e-15)
    assert abs(euler_gamma() - 0.577215664902) < 1e-12


def test_euler_gamma_partial_sum():
    n = 10**6
    h = math.fsum(1.0 / k for k in range(1, n + 1)) - math.log(n)
    assert abs(h - euler_gamma()) < 1e-6


def test_gamma_derivative_at_one():
    h = 1e-5
    d = (gamma_fn(1 + h) - gamma_fn(1 - h)) / (2 * h)
    assert abs(d + euler_gamma()) < 1e-6


def test_stieltjes_gamma1():
    g1 = stieltjes_gamma1()
    assert g1 == pytest.approx(float(mpmath.stieltjes(1)), abs=1e-14)
    assert abs(g1 - -0.0728158455) < 1e-10
    assert g1 < 0


def test_stieltjes_partial_sum():
    n = 10**6
    s = math.fsum(math.log(k) / k for k in range(1, n + 1)) - math.log(n) ** 2 / 2
    assert abs(s - stieltjes_gamma1()) < 1e-5


@pytest.mark.parametrize("s", [1.001, 1.1, 1.5, 2, 3, 4, 7.5, 30])
def test_zeta_vs_mpmath(s):
    assert zeta(s) == pytest.approx(float(mpmath.zeta(s)), rel=1e-13)


def test_zeta_examples():
    assert abs(zeta(2) - math.pi**2 / 6) < 1e-12
    assert abs(zeta(4) - math.pi**4 / 90) < 1e-12
    assert abs(zeta(3) - 1.202056903160) < 1e-12
    with pytest.raises(DomainError):
        zeta(1)
    with pytest.raises(DomainError):
        zeta(0.5)


@pytest.mark.parametrize("s", [0.01, 0.5, 1, 1.5, 2, 5, 10.25, 40])
def test_gamma_vs_mpmath(s):
    assert gamma_fn(s) == pytest.approx(float(mpmath.gamma(s)), rel=1e-13)


def test_gamma_examples():
    assert gamma_fn(1) == pytest.approx(1, abs=1e-14)
    assert abs(gamma_fn(0.5) - math.sqrt(math.pi)) < 1e-12
    assert abs(gamma_fn(5) - 24) < 1e-12
    with pytest.raises(DomainError):
        gamma_fn(0)


def test_bernoulli():
    for n in (2, 4, 10, 20):
        num, den = mpmath.bernfrac(n)
        assert bernoulli(n) == Fraction(int(num), int(den))


def test_laurent_coefficient():
    """s Gamma(s+1) zeta(s+1) = 1 + K' s^2 + ..., so its second difference gives K'."""
    _, Kp = finite_part_constants()
    h = 1e-3

    def g(s):
        z, _ = constants._zeta_em(s + 1)
        return s * gamma_fn(s + 1) * z

    second = (g(h) - 2 * 1.0 + g(-h)) / (2 * h * h)
    assert abs(second - Kp) < 1e-4


def test_finite_part_constants():
    K, Kp = finite_part_constants()
    assert K == 0
    g, g1 = float(mpmath.euler), float(mpmath.stieltjes(1))
    assert Kp == pytest.approx(math.pi**2 / 12 - g1 - g * g / 2, abs=1e-14)
    assert abs(Kp - 0.728694) < 1e-6


def test_dprime():
    assert Dprime(ExpansionCoefficients(1, 1, 0, 0.3, -0.7)) == -0.7
    assert Dprime(ExpansionCoefficients(1, 1, 1, 0, 0)) == pytest.approx(1.457388, abs=1e-6)
    # D' = D + 2BK' + CK with K = 0
    K, Kp = finite_part_constants()
    c = ExpansionCoefficients(1, 2, -0.4, 0.5, 1.25)
    assert Dprime(c) == pytest.approx(c.D + 2 * c.B * Kp + c.C * K, abs=1e-14)


def test_c2m_first_term(table):
    t1 = math.log(math.log(3)) - loglog_prime_expansion(2, 1)
    assert t1 == pytest.approx(0.98932, abs=1e-5)
    assert c2m_detail(2, table=table).partial_sums[1] == pytest.approx(t1, abs=1e-15)


def test_c2m_tail_bound_formula():
    c, K = 0.7, 1000
    lk = math.log(K)
    direct = mpmath.quad(lambda t: c * mpmath.log(t) ** 2 / t**2, [K, mpmath.inf])
    assert c2m_tail_bound(c, K) == pytest.approx(c * (lk * lk + 2 * lk + 2) / K)
    assert c2m_tail_bound(c, K) >= float(direct)


def test_c2m_partial_sums_cauchy(table):
    d = c2m_detail(2, table=table)
    ks = sorted(d.partial_sums)
    c = d.remainder_constant
    for a, b in zip(ks[3:], ks[4:]):
        assert abs(d.partial_sums[b] - d.partial_sums[a]) <= c2m_tail_bound(c, a) + d.approx_error


def test_c2m_tail_estimate_matches_sum(table):
    """The tail estimate at K/2 predicts the sum of terms from K/2 to K."""
    d = c2m_detail(2, table=table)
    K = max(d.partial_sums)
    half = K // 2
    observed = d.partial_sums[K] - d.partial_sums[half]
    predicted = constants.c2m_tail_estimate(2, half) - constants.c2m_tail_estimate(2, K)
    assert abs(observed - predicted) < 0.1 * abs(predicted) + d.approx_error


def test_c2m_reports_honest_bound(table):
    r = C2m(2, 1e-8, table)
    assert r.error_bound > 0
    assert r.tol_met == (r.error_bound <= 1e-8)
    loose = C2m(2, 1e-2, table)
    assert loose.tol_met
    assert abs(loose.value - r.value) <= loose.error_bound + r.error_bound


def test_dm_assembly(table):
    g = float(mpmath.euler)
    g1 = float(mpmath.stieltjes(1))
    for m in (2, 3):
        lm, llm = math.log(m), math.log(math.log(m))
        c = C2m(m, table=table).value
        expected = (
            llm**2 / (2 * lm)
            + math.log(math.sqrt(lm / (2 * math.pi)) / math.log(2))
            - c - g1 / lm - llm / lm * g
        )
        assert Dm(m, table).value == pytest.approx(expected, abs=1e-13)


def test_km_assembly(table):
    g = float(mpmath.euler)
    for m in (2, 5):
        lm, llm = math.log(m), math.log(math.log(m))
        lp = math.log(math.pi / math.sqrt(6 * lm))
        closed = (llm**2 + g * g - 2 * g * llm - math.pi**2 / 6 - lp**2) / (2 * lm)
        assert Km(m, table).value + C2m(m, table=table).value == pytest.approx(closed, abs=1e-13)


def test_report_deterministic(table):
    a = [r.to_dict() for r in constants_report(3, table=table)]
    constants._c2m_cache.clear()
    b = [r.to_dict() for r in constants_report(3, table=table)]
    assert a == b
    names = [r["name"] for r in a]
    assert {"euler_gamma", "stieltjes_gamma1", "K", "K'", "C_2,3", "D_3", "K_3", "c_3"} <= set(names)
