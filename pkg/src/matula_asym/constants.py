"""Special constants: gamma, gamma_1, zeta, Gamma and the derived C_{2,m}, D_m, K_m.

zeta, gamma_1 and Euler's gamma are evaluated by Euler-Maclaurin summation
and Gamma by a shifted Stirling series, all in double precision with the
first omitted term as the truncation estimate.
"""
from __future__ import annotations

import math
import threading
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .counting import PrimeLambdaSystem
from .errors import DomainError
from .primes import (
    VECTOR_LOG_N_MIN,
    bracketed_log_nth_prime,
    bracketed_log_nth_prime_array,
    default_table,
    loglog_prime_expansion,
    loglog_remainder_ratios,
    REMAINDER_SAFETY,
)

_EM_N = 20
_EM_TERMS = 10
_ROUNDING = 4e-16


@dataclass(frozen=True)
class ConstantReport:
    name: str
    value: float
    error_bound: float
    method: str
    tol_met: bool | None = None

    def to_dict(self):
        return asdict(self)


@lru_cache(maxsize=None)
def bernoulli(n):
    """B_n as a Fraction (B_1 = -1/2 convention; only even n are used)."""
    b = [Fraction(1)]
    for k in range(1, n + 1):
        b.append(-sum(math.comb(k + 1, j) * b[j] for j in range(k)) / (k + 1))
    return b[n]


def _b2j_over_fact(j):
    return float(bernoulli(2 * j) / math.factorial(2 * j))


# -- Euler's constant -----------------------------------------------------------

def euler_gamma_report():
    n = _EM_N
    h = math.fsum(1.0 / k for k in range(1, n + 1))
    corr = [float(bernoulli(2 * k)) / (2 * k * n ** (2 * k)) for k in range(1, _EM_TERMS + 1)]
    val = h - math.log(n) - 1.0 / (2 * n) + math.fsum(corr)
    nxt = abs(float(bernoulli(2 * _EM_TERMS + 2))) / ((2 * _EM_TERMS + 2) * n ** (2 * _EM_TERMS + 2))
    return ConstantReport("euler_gamma", val, nxt + 2 * _ROUNDING, f"Euler-Maclaurin on H_n, n={n}")


def euler_gamma():
    return euler_gamma_report().value


# -- Stieltjes gamma_1 ------------------------------------------------------------

def _log_over_x_derivative(order, x):
    """d^order/dx^order of log(x)/x = (-1)^order order! (log x - H_order) / x^(order+1)."""
    h = math.fsum(1.0 / i for i in range(1, order + 1))
    return (-1) ** order * math.factorial(order) * (math.log(x) - h) / x ** (order + 1)


def stieltjes_gamma1_report():
    n = _EM_N
    s = math.fsum(math.log(k) / k for k in range(2, n + 1))
    f_n = math.log(n) / n
    corr = [_b2j_over_fact(j) * _log_over_x_derivative(2 * j - 1, n) for j in range(1, _EM_TERMS + 1)]
    val = s - math.log(n) ** 2 / 2 - f_n / 2 - math.fsum(corr)
    j = _EM_TERMS + 1
    nxt = abs(_b2j_over_fact(j) * _log_over_x_derivative(2 * j - 1, n))
    return ConstantReport("stieltjes_gamma1", val, nxt + 4 * _ROUNDING, f"Euler-Maclaurin on sum log k/k, n={n}")


def stieltjes_gamma1():
    return stieltjes_gamma1_report().value


# -- zeta and Gamma -----------------------------------------------------------------

def _zeta_em(s):
    """Euler-Maclaurin zeta for real s > 0, s != 1; returns (value, next-term)."""
    if s <= 0 or s == 1:
        raise DomainError(f"Euler-Maclaurin zeta needs s > 0, s != 1, got {s}")
    n = _EM_N
    head = math.fsum(k ** -s for k in range(1, n))
    tail = n ** (1 - s) / (s - 1) + 0.5 * n**-s
    terms = []
    rising = s  # s (s+1) ... (s+2j-2)
    for j in range(1, _EM_TERMS + 1):
        terms.append(_b2j_over_fact(j) * rising * n ** (-s - 2 * j + 1))
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    j = _EM_TERMS + 1
    nxt = abs(_b2j_over_fact(j) * rising * n ** (-s - 2 * j + 1))
    return head + tail + math.fsum(terms), nxt


def zeta(s):
    """Riemann zeta for real s > 1."""
    if s <= 1:
        raise DomainError(f"zeta needs s > 1, got {s}")
    return _zeta_em(s)[0]


_STIRLING_SHIFT = 20.0


def log_gamma(s):
    """log Gamma(s) for s > 0 via the Stirling series after shifting s >= 20."""
    if s <= 0:
        raise DomainError(f"Gamma needs s > 0, got {s}")
    shift = 0.0
    z = s
    while z < _STIRLING_SHIFT:
        shift += math.log(z)
        z += 1.0
    series = math.fsum(
        float(bernoulli(2 * k)) / (2 * k * (2 * k - 1) * z ** (2 * k - 1)) for k in range(1, _EM_TERMS + 1)
    )
    return (z - 0.5) * math.log(z) - z + 0.5 * math.log(2 * math.pi) + series - shift


def gamma_fn(s):
    """Euler Gamma for real s > 0."""
    if s <= 0:
        raise DomainError(f"Gamma needs s > 0, got {s}")
    if s == int(s) and s <= 25:
        return float(math.factorial(int(s) - 1))
    return math.exp(log_gamma(s))


def gamma_zeta_product(s):
    """Gamma(s+1) zeta(s+1) for real s > -1, s != 0."""
    return gamma_fn(s + 1) * _zeta_em(s + 1)[0]


def finite_part_constants():
    """(K, K') = finite parts of int 1/(e^u-1) and int log u/(e^u-1) over (0, inf).

    They are the constant and linear Laurent coefficients of
    Gamma(s+1) zeta(s+1) at s = 0: K = 0, K' = pi^2/12 - gamma_1 - gamma^2/2.
    """
    g = euler_gamma()
    g1 = stieltjes_gamma1()
    return 0.0, math.pi**2 / 12 - g1 - g * g / 2


def dprime_factor():
    """pi^2/6 - 2 gamma_1 - gamma^2, the multiplier of B in D'."""
    g = euler_gamma()
    return math.pi**2 / 6 - 2 * stieltjes_gamma1() - g * g


def Dprime(coeffs):
    """D' = D + (pi^2/6 - 2 gamma_1 - gamma^2) B."""
    return coeffs.D + dprime_factor() * coeffs.B


# -- C_{2,m} and friends ------------------------------------------------------------

DEFAULT_TOL = 1e-8
_MAX_TERMS = 1 << 20


def c2m_term(m, k, loglog_p):
    return loglog_p - loglog_prime_expansion(m, k)


def remainder_constant(m, table):
    """1.5 x max(observed remainder ratio, its k -> infinity limit 1/(2 log^2 m))."""
    ratios = loglog_remainder_ratios(m, table)
    observed = max(ratios.values()) if ratios else 0.0
    return REMAINDER_SAFETY * max(observed, 1.0 / (2 * math.log(m) ** 2))


def c2m_tail_bound(c, K):
    """Bound on sum_{k > K} c log^2 k / k^2 by integral comparison."""
    lk = math.log(K)
    return c * (lk * lk + 2 * lk + 2) / K


def c2m_tail_estimate(m, K):
    """Leading asymptotic of sum_{k > K} of the series terms.

    The terms behave like -(l^2 - 2l + 2) / (2 L^2) with L = k log m and
    l = log L; integrating from K and subtracting half the K-th term gives
    -(l^2/2 + 1)/(L log m) + g(K)/2.
    """
    lm = math.log(m)
    L = K * lm
    ll = math.log(L)
    g = -(ll * ll - 2 * ll + 2) / (2 * L * L)
    return -(ll * ll / 2 + 1) / (L * lm) - g / 2


@dataclass(frozen=True)
class C2mDetail:
    value: float
    error_bound: float
    exact_terms: int
    approx_terms: int
    exact_sum: float
    approx_sum: float
    tail_estimate: float
    tail_bound: float
    approx_error: float
    remainder_constant: float
    partial_sums: dict


def _series_terms(m, system, kmax):
    """Terms k = 1..kmax with per-term error bounds (zero on the exact range)."""
    K0 = system.K0
    ks = np.arange(1, kmax + 1, dtype=np.float64)
    lam = np.empty(kmax)
    err = np.zeros(kmax)
    for k in range(1, min(K0, kmax) + 1):
        lam[k - 1] = system.lam(k)
    lm = math.log(m)
    if kmax > K0:
        kvec = max(K0 + 1, math.ceil(VECTOR_LOG_N_MIN / lm))
        for k in range(K0 + 1, min(kvec, kmax + 1)):
            lam[k - 1], err[k - 1] = bracketed_log_nth_prime(k * lm)
        if kmax >= kvec:
            v, e = bracketed_log_nth_prime_array(ks[kvec - 1 :] * lm)
            lam[kvec - 1 :] = v
            err[kvec - 1 :] = e
    llm = math.log(lm)
    lk = np.log(ks)
    klm = ks * lm
    terms = np.log(lam) - (lk + llm + lk / klm + llm / klm)
    term_err = err / (lam - err)
    return terms, term_err


_c2m_lock = threading.Lock()
_c2m_cache = {}


def c2m_detail(m, tol=DEFAULT_TOL, table=None):
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    if table is None:
        table = default_table()
    key = (m, tol, id(table), table.limit)
    with _c2m_lock:
        hit = _c2m_cache.get(key)
    if hit is not None:
        return hit
    system = PrimeLambdaSystem(m, table)
    c = remainder_constant(m, table)
    K1 = 1024
    while K1 < _MAX_TERMS and c2m_tail_bound(c, K1) > tol / 2:
        K1 *= 2
    K1 = max(K1, system.K0)
    terms, term_err = _series_terms(m, system, K1)
    K0 = min(system.K0, K1)
    exact_sum = math.fsum(terms[:K0])
    approx_sum = math.fsum(terms[K0:])
    approx_error = math.fsum(term_err) + K1 * 1e-16
    tail_est = c2m_tail_estimate(m, K1)
    tail_bound = c2m_tail_bound(c, K1)
    value = exact_sum + approx_sum + tail_est
    # true tail and estimate share a sign, so |true - est| <= max(|true|, |est|)
    error_bound = approx_error + max(tail_bound, abs(tail_est))
    partial = {}
    k = 1
    cums = np.cumsum(terms)
    while k <= K1:
        partial[k] = float(cums[k - 1])
        k *= 2
    detail = C2mDetail(
        value, error_bound, K0, K1 - K0, exact_sum, approx_sum, tail_est,
        tail_bound, approx_error, c, partial,
    )
    with _c2m_lock:
        _c2m_cache[key] = detail
    return detail


def C2m(m, tol=DEFAULT_TOL, table=None):
    d = c2m_detail(m, tol, table)
    method = (
        f"{d.exact_terms} sieve-exact terms + {d.approx_terms} bracketed R^-1 terms"
        f" + asymptotic tail (c={d.remainder_constant:.4g})"
    )
    return ConstantReport(f"C_2,{m}", d.value, d.error_bound, method, d.error_bound <= tol)


def _dm_closed_part(m):
    lm = math.log(m)
    llm = math.log(lm)
    g = euler_gamma()
    g1 = stieltjes_gamma1()
    return (
        llm * llm / (2 * lm)
        + math.log(math.sqrt(lm / (2 * math.pi)) / math.log(2))
        - g1 / lm
        - llm / lm * g
    )


def Dm(m, table=None, tol=DEFAULT_TOL):
    """D_m, the constant term of the averaged counting expansion."""
    c = C2m(m, tol, table)
    val = _dm_closed_part(m) - c.value
    err = c.error_bound + 1e-14
    return ConstantReport(f"D_{m}", val, err, "closed form minus C_2,m", err <= tol)


def _km_closed_part(m):
    lm = math.log(m)
    llm = math.log(lm)
    g = euler_gamma()
    lp = math.log(math.pi / math.sqrt(6 * lm))
    return (llm * llm + g * g - 2 * g * llm - math.pi**2 / 6 - lp * lp) / (2 * lm)


def Km(m, table=None, tol=DEFAULT_TOL):
    """K_m, the constant in the strong asymptotic of M_{2,m}."""
    c = C2m(m, tol, table)
    val = _km_closed_part(m) - c.value
    err = c.error_bound + 1e-14
    return ConstantReport(f"K_{m}", val, err, "closed form minus C_2,m", err <= tol)


def Dprime_m(m, table=None, tol=DEFAULT_TOL):
    d = Dm(m, table, tol)
    val = d.value + dprime_factor() * (-1.0 / (2 * math.log(m)))
    return ConstantReport(f"D'_{m}", val, d.error_bound, "D_m + (pi^2/6 - 2 gamma_1 - gamma^2) B", d.tol_met)


def constants_report(m, tol=DEFAULT_TOL, table=None):
    """Every constant the formulas consume, as a list of reports."""
    g = euler_gamma_report()
    g1 = stieltjes_gamma1_report()
    z2, z2err = _zeta_em(2.0)
    K, Kp = finite_part_constants()
    detail = c2m_detail(m, tol, table)
    return [
        g,
        g1,
        ConstantReport("zeta(2)", z2, z2err + 4 * _ROUNDING, f"Euler-Maclaurin, n={_EM_N}"),
        ConstantReport("K", K, 0.0, "Laurent coefficient of Gamma(s+1)zeta(s+1), exact"),
        ConstantReport("K'", Kp, g.error_bound + g1.error_bound, "pi^2/12 - gamma_1 - gamma^2/2"),
        ConstantReport(
            f"c_{m}", detail.remainder_constant, 0.0,
            "loglog remainder constant: 1.5 x max(observed ratio, 1/(2 log^2 m))",
        ),
        C2m(m, tol, table),
        Dm(m, table, tol),
        Km(m, table, tol),
        Dprime_m(m, table, tol),
    ]
