"""Partition asymptotics for additive systems and the strong formula for M_{2,m}.

Everything is evaluated in the log domain; the counts involved overflow a
double long before the interesting range of x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import constants
from .counting import IntegerLambdaSystem, PrimeLambdaSystem, avg_integral_exact
from .errors import ContractError, DomainError


@dataclass(frozen=True)
class ExpansionCoefficients:
    """(alpha, A, B, C, D) of

        int_0^u N(t)/t dt = (A/alpha) u^alpha + B log^2 u + C log u + D + o(1).
    """

    alpha: float
    A: float
    B: float
    C: float
    D: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be > 0, got {self.alpha}")
        if not self.A > 0:
            raise DomainError(f"A must be > 0, got {self.A}")


@dataclass(frozen=True)
class SaddleData:
    beta: float
    M: float
    Dprime: float


PARTITION_COEFFS = ExpansionCoefficients(1.0, 1.0, 0.0, -0.5, -0.5 * math.log(2 * math.pi))


def derive_saddle(coeffs):
    a = coeffs.alpha
    beta = a / (a + 1)
    M = (coeffs.A * a * constants.gamma_fn(a + 1) * constants.zeta(a + 1)) ** (1 / (a + 1))
    return SaddleData(beta, M, constants.Dprime(coeffs))


def sigma_saddle(sd, coeffs, u):
    """sigma(u) = M u^(-1/(alpha+1)), the inverse of -phi'."""
    if u <= 0:
        raise DomainError(f"u must be > 0, got {u}")
    return sd.M * u ** (-1 / (coeffs.alpha + 1))


def ingham_logP(coeffs, u):
    """log of the extended Ingham asymptotic for P(u).

    P(u) ~ ((1-b)/(2 pi))^(1/2) e^D' M^-(C+1/2) u^(C - bC - b/2)
           * exp(M u^b / b + B log^2(u^(1-b) / M)),   b = alpha/(alpha+1).
    """
    if u <= 1:
        raise DomainError(f"u must be > 1, got {u}")
    sd = derive_saddle(coeffs)
    b, M, C, B = sd.beta, sd.M, coeffs.C, coeffs.B
    lu = math.log(u)
    return (
        0.5 * math.log((1 - b) / (2 * math.pi))
        + sd.Dprime
        - (C + 0.5) * math.log(M)
        + (C - b * C - b / 2) * lu
        + M * u**b / b
        + B * ((1 - b) * lu - math.log(M)) ** 2
    )


def corollary1_logP(coeffs, u):
    """The alpha = 1 specialisation, written with s = pi sqrt(A/6).

    P(u) ~ e^(D' + B log^2 s) / (2 sqrt pi) s^-(C+1/2) u^(C/2 - 1/4 - B log s)
           * exp(pi sqrt(2Au/3) + (B/4) log^2 u).
    """
    if coeffs.alpha != 1:
        raise ContractError(f"corollary form needs alpha = 1, got {coeffs.alpha}")
    if u <= 1:
        raise DomainError(f"u must be > 1, got {u}")
    A, B, C = coeffs.A, coeffs.B, coeffs.C
    ls = math.log(math.pi * math.sqrt(A / 6))
    lu = math.log(u)
    return (
        constants.Dprime(coeffs)
        + B * ls * ls
        - math.log(2 * math.sqrt(math.pi))
        - (C + 0.5) * ls
        + (C / 2 - 0.25 - B * ls) * lu
        + math.pi * math.sqrt(2 * A * u / 3)
        + B / 4 * lu * lu
    )


def theorem1_logM(m, x=None, table=None, K=None, log_x=None):
    """log of the strong asymptotic for M_{2,m}(x).

    Pass ``log_x`` instead of ``x`` when x itself overflows a double.
    ``K`` overrides the constant K_m for callers that already hold it.
    """
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    lx = _log(x) if log_x is None else float(log_x)
    if lx <= 1:
        raise DomainError(f"x must exceed e, got log x = {lx}")
    if K is None:
        K = constants.Km(m, table).value
    lm = math.log(m)
    llx = math.log(lx)
    power = math.log(math.pi / math.sqrt(6 * lm)) / (2 * lm)
    return (
        K
        + math.log(math.sqrt(3) * lm / (2 * math.pi**2 * math.log(2)))
        + power * llx
        + math.pi * math.sqrt(2 * lx / (3 * lm))
        - llx * llx / (8 * lm)
    )


def weak_logM(m, x):
    """Leading term pi sqrt(2 log x / (3 log m)); for m = 2 the classical weak asymptotic."""
    return math.pi * math.sqrt(2 * _log(x) / (3 * math.log(m)))


def _log(x):
    if isinstance(x, int):
        if x <= 0:
            raise DomainError(f"x must be positive, got {x}")
        # exact ints may exceed float range
        n = x.bit_length()
        if n > 1000:
            return math.log(x >> (n - 64)) + (n - 64) * math.log(2)
        return math.log(x)
    return math.log(x)


def lemma44_coeffs(m, table=None):
    """alpha = 1, A = 1/log m, B = -1/(2 log m), C = 1/2, D = D_m."""
    lm = math.log(m)
    return ExpansionCoefficients(1.0, 1 / lm, -1 / (2 * lm), 0.5, constants.Dm(m, table).value)


def system_coeffs(sys):
    if isinstance(sys, PrimeLambdaSystem):
        return lemma44_coeffs(sys.m, sys.table)
    if isinstance(sys, IntegerLambdaSystem):
        return PARTITION_COEFFS
    raise ContractError(f"no known expansion coefficients for {sys!r}")


def hardy_ramanujan_logp(n):
    """log of p(n) ~ e^(pi sqrt(2n/3)) / (4 sqrt(3) n)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return math.pi * math.sqrt(2 * n / 3) - math.log(4 * math.sqrt(3) * n)


# -- Laplace side ---------------------------------------------------------------

@dataclass(frozen=True)
class LaplaceValue:
    value: float
    terms: int
    tail_bound: float
    approx_error: float


def laplace_f_detail(sys, sigma, eps=1e-14):
    """f(sigma) = sum_k -log(1 - e^(-sigma lambda_k)), the log of the Euler product.

    Terms are added until the geometric bound on everything after them
    drops below eps; errors of estimated lambdas are tracked separately.
    """
    if sigma <= 0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    gap = sys.min_gap()
    q = math.exp(-sigma * gap)
    total = []
    approx = 0.0
    k = 0
    chunk = 256
    while True:
        vals, errs = sys.lams_count(k + chunk) if k == 0 else _chunk(sys, k, chunk)
        x = np.exp(-sigma * vals)
        terms = -np.log1p(-x)
        total.append(terms)
        approx += float(np.sum(sigma * x / (1 - x) * errs))
        k += chunk
        last = float(x[-1])
        tail = last / ((1 - last) * (1 - q))
        if tail < eps:
            break
    value = math.fsum(np.concatenate(total))
    return LaplaceValue(value, k, tail, approx)


def _chunk(sys, start, count):
    vals = np.array([sys.lam(k) for k in range(start, start + count)])
    errs = np.array([sys.lam_error(k) for k in range(start, start + count)])
    return vals, errs


def laplace_f(sys, sigma, eps=1e-14):
    return laplace_f_detail(sys, sigma, eps).value


def lemma31_main(coeffs, sigma):
    """A Gamma(alpha+1) zeta(alpha+1) / sigma^alpha + B log^2 sigma - C log sigma."""
    a = coeffs.alpha
    ls = math.log(sigma)
    return (
        coeffs.A * constants.gamma_fn(a + 1) * constants.zeta(a + 1) / sigma**a
        + coeffs.B * ls * ls
        - coeffs.C * ls
    )


def lemma31_residual(sys, sigma, coeffs=None):
    """f(sigma) minus the singular part of its expansion; tends to D' as sigma -> 0+."""
    if coeffs is None:
        coeffs = system_coeffs(sys)
    return laplace_f(sys, sigma) - lemma31_main(coeffs, sigma)


def lemma44_main(m, u):
    lm = math.log(m)
    lu = math.log(u)
    return u / lm - lu * lu / (2 * lm) + 0.5 * lu


def lemma44_residual(sys, u):
    """Exact average integral minus its growing terms; tends to D_m."""
    if u <= math.log(2):
        raise DomainError(f"u must exceed log 2, got {u}")
    return avg_integral_exact(sys, u) - lemma44_main(sys.m, u)
