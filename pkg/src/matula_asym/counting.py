"""Exact counting of A_m, the step counter N(u) and exact partition oracles.

A_m is the set of integers >= 2 whose prime factors all have index m^k,
i.e. lie in {p_1, p_m, p_{m^2}, ...}.  ``count_M2m`` counts it by recursive
descent over those primes, largest first, with exact integer floors.
"""
from __future__ import annotations

import math
import threading
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ContractError, DomainError
from .primes import (
    bracketed_log_nth_prime,
    default_table,
    exact_nth_prime,
    exact_prime_index_upper,
)

ENUMERATE_CAP = 10**7
PARTITION_CAP = 2 * 10**4


@dataclass(frozen=True)
class CountResult:
    value: int
    nodes_visited: int


# -- lambda systems ----------------------------------------------------------

class LambdaSystem:
    """An increasing sequence lambda_0 < lambda_1 < ... of positive reals.

    Subclasses provide ``lam(k)`` and ``lam_error(k)``; the array helpers
    below are used by the numeric routines.
    """

    m = None

    def lam(self, k):
        raise NotImplementedError

    def lam_error(self, k):
        return 0.0

    def is_exact(self, k):
        return self.lam_error(k) == 0.0

    def min_gap(self):
        raise NotImplementedError

    def lams_upto(self, u):
        """Array of all lambda_k <= u (ascending) and their error bounds."""
        vals, errs = [], []
        k = 0
        while True:
            v = self.lam(k)
            if v > u:
                break
            vals.append(v)
            errs.append(self.lam_error(k))
            k += 1
        return np.array(vals), np.array(errs)

    def lams_count(self, count):
        vals = np.array([self.lam(k) for k in range(count)])
        errs = np.array([self.lam_error(k) for k in range(count)])
        return vals, errs


class PrimeLambdaSystem(LambdaSystem):
    """lambda_k = log p_{m^k}: exact from the sieve for k <= K0, estimated above.

    Above the crossover the value is log R^{-1}(m^k), clipped into explicit
    bounds on p_n; ``lam_error`` is the distance to the farther bound.
    """

    def __init__(self, m, table=None):
        if m < 2:
            raise DomainError(f"m must be >= 2, got {m}")
        self.m = int(m)
        self.table = table if table is not None else default_table()
        self._cache = {}
        self._lock = threading.Lock()
        self.K0 = self._find_crossover()

    def __repr__(self):
        return f"PrimeLambdaSystem(m={self.m}, K0={self.K0})"

    def _find_crossover(self):
        k = 0
        while True:
            try:
                p = self.table.nth_prime(self.m ** (k + 1))
            except CapacityError:
                return k
            self._cache[k + 1] = (math.log(p), 0.0)
            k += 1

    def _entry(self, k):
        hit = self._cache.get(k)
        if hit is not None:
            return hit
        if k < 0:
            raise DomainError(f"lambda index must be >= 0, got {k}")
        if k == 0:
            entry = (math.log(2), 0.0)
        else:
            entry = bracketed_log_nth_prime(k * math.log(self.m))
        with self._lock:
            self._cache[k] = entry
        return entry

    def lam(self, k):
        return self._entry(k)[0]

    def lam_error(self, k):
        return self._entry(k)[1]

    def min_gap(self):
        # log p_{m^{k+1}} - log p_{m^k} is near log m; the first gap is the smallest
        return min(self.lam(1) - self.lam(0), 0.5 * math.log(self.m))

    def y_diagnostic(self, u):
        """y = log(pi(e^u)) / log m, so that p_{m^k} <= e^u iff k <= y."""
        from .primes import exact_prime_pi

        x = math.floor(math.exp(u))
        pi = exact_prime_pi(x, self.table)
        if pi == 0:
            return float("-inf")
        return math.log(pi) / math.log(self.m)


class IntegerLambdaSystem(LambdaSystem):
    """lambda_k = k + 1: the system of unrestricted partitions."""

    def lam(self, k):
        return float(k + 1)

    def min_gap(self):
        return 1.0


# -- N(u) and its average integral -------------------------------------------

def N_of_u(sys, u):
    """#{k >= 0 : lambda_k <= u}."""
    if u < sys.lam(0):
        return 0
    k = 0
    while sys.lam(k + 1) <= u:
        k += 1
    return k + 1


def avg_integral_exact(sys, u):
    """Integral of N(t)/t over (0, u], as N(u) log u - sum over lambda_k <= u of log lambda_k."""
    vals, _ = sys.lams_upto(u)
    if vals.size == 0:
        return 0.0
    return vals.size * math.log(u) - float(np.sum(np.log(vals)))


def avg_integral_error(sys, u):
    """Bound on the error of ``avg_integral_exact`` from estimated lambdas."""
    vals, errs = sys.lams_upto(u)
    if vals.size == 0:
        return 0.0
    return float(np.sum(errs / np.maximum(vals - errs, 1e-300)))


# -- exact counting ------------------------------------------------------------

def _allowed_primes(m, x, table):
    kmax = exact_prime_index_upper(x, m, table)
    return [exact_nth_prime(m**k, table) for k in range(kmax + 1)]


_LEAF_CUTOFF = 1 << 24


def _smooth_prefix_lists(qs, bound):
    """For each j, the sorted products <= bound of q_0..q_j (1 included)."""
    out = []
    cur = [1]
    for q in qs:
        nxt = list(cur)
        for v in cur:
            w = v * q
            while w <= bound:
                nxt.append(w)
                w *= q
        nxt.sort()
        out.append(nxt)
        cur = nxt
    return out


def count_M2m(m, x, table=None):
    """M_{2,m}(x) = #{n in A_m : n <= x}, exactly.

    count(y, j) counts products <= y of q_0..q_j (1 included) and satisfies
    count(y, j) = sum over e of count(floor(y / q_j^e), j - 1).  Subproblems
    with y below a fixed cutoff are answered by bisection in precomputed
    sorted lists, and j = 0 (q_0 = 2) in closed form.
    """
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    x = int(x)
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if x < 2:
        return CountResult(0, 1)
    if table is None:
        table = default_table()
    qs = _allowed_primes(m, x, table)
    cutoff = min(x, _LEAF_CUTOFF)
    leaves = _smooth_prefix_lists([q for q in qs if q <= cutoff], cutoff)
    nodes = 0

    def count(y, j):
        nonlocal nodes
        nodes += 1
        if j == 0:
            return y.bit_length()  # #{e >= 0 : 2^e <= y}
        if y <= cutoff and j < len(leaves):
            return bisect_right(leaves[j], y)
        while qs[j] > y:
            j -= 1
            if j == 0:
                return y.bit_length()
            if y <= cutoff and j < len(leaves):
                return bisect_right(leaves[j], y)
        q = qs[j]
        total = 0
        while y:
            total += count(y, j - 1)
            y //= q
        return total

    return CountResult(count(x, len(qs) - 1) - 1, nodes)


def enumerate_Am(m, x, table=None):
    """Sorted members of A_m up to x, by boolean multiplicative closure.

    Independent of ``count_M2m``: marks 1, then for each allowed prime q
    (ascending) marks i * q^e for every already-marked i.
    """
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    x = int(x)
    if x > ENUMERATE_CAP:
        raise ContractError(f"enumerate_Am is capped at x <= {ENUMERATE_CAP}, got {x}")
    if x < 2:
        return []
    if table is None:
        table = default_table()
    mark = np.zeros(x + 1, dtype=bool)
    mark[1] = True
    k = 0
    while True:
        q = table.nth_prime(m**k)
        if q > x:
            break
        prev = mark.copy()
        qe = q
        while qe <= x:
            idx = np.arange(1, x // qe + 1)
            mark[idx * qe] |= prev[idx]
            qe *= q
        k += 1
    return (np.flatnonzero(mark[2:]) + 2).tolist()


def is_prime_power_index(idx, m):
    """True iff idx = m^k for some k >= 0."""
    while idx % m == 0:
        idx //= m
    return idx == 1


# -- unrestricted partitions ---------------------------------------------------

def partition_numbers(n):
    """[p(0), ..., p(n)] by Euler's pentagonal recurrence."""
    p = [1] + [0] * n
    for i in range(1, n + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > i:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[i - g1]
            g2 = g1 + k
            if g2 <= i:
                total += sign * p[i - g2]
            k += 1
        p[i] = total
    return p


def partition_sum_exact(u):
    """sum_{n <= u} p(n), with the empty partition p(0) = 1 included."""
    u = int(u)
    if u < 0:
        raise DomainError(f"u must be >= 0, got {u}")
    if u > PARTITION_CAP:
        raise ContractError(f"partition_sum_exact is capped at u <= {PARTITION_CAP}, got {u}")
    return sum(partition_numbers(u))
