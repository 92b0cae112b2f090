"""Compiled inner loops: odd-only segment sieving and Lucy-style prime counting."""
import numba
import numpy as np


@numba.njit(cache=True)
def sieve_odd_segment(lo, count, base_primes):
    """Primality flags for the odd numbers 2*(lo+i)+1, i < count.

    ``base_primes`` must hold every odd prime up to the square root of the
    largest number in the segment (2 is never included).
    """
    flags = np.ones(count, np.uint8)
    if lo == 0:
        flags[0] = 0  # the number 1
    hi_val = 2 * (lo + count) - 1
    for j in range(base_primes.shape[0]):
        p = base_primes[j]
        p2 = p * p
        if p2 > hi_val:
            break
        first = 2 * lo + 1
        if p2 >= first:
            start = p2
        else:
            start = ((first + p - 1) // p) * p
            if start % 2 == 0:
                start += p
        i = (start - 1) // 2 - lo
        while i < count:
            flags[i] = 0
            i += p
    return flags


@numba.njit(cache=True)
def lucy_prime_pi(n, r):
    """pi(n) with r = isqrt(n), O(n^(3/4)) time and O(sqrt n) memory.

    ``lo[v]`` tracks the sieve count S(v) for v <= r and ``hi[i]`` tracks
    S(n // i).  Values of ``lo`` never exceed pi(r), so int32 is enough and
    halves the memory traffic of the random reads.
    """
    lo = np.empty(r + 1, np.int32)
    hi = np.empty(r + 1, np.int64)
    lo[0] = 0
    for v in range(1, r + 1):
        lo[v] = v - 1
    hi[0] = 0
    nf = float(n)
    for i in range(1, r + 1):
        hi[i] = n // i - 1
    for p in range(2, r + 1):
        if lo[p] == lo[p - 1]:
            continue
        sp = np.int64(lo[p - 1])
        p2 = p * p
        if p2 > n:
            break
        imax = min(r, n // p2)
        j = min(imax, r // p)
        for i in range(1, j + 1):
            hi[i] -= hi[i * p] - sp
        for i in range(j + 1, imax + 1):
            d = i * p
            q = np.int64(nf / d)
            # float quotient may be off by one near 2^53 rounding
            if q * d > n:
                q -= 1
            elif (q + 1) * d <= n:
                q += 1
            hi[i] -= lo[q] - sp
        for q in range(r // p, p - 1, -1):
            c = np.int32(lo[q] - sp)
            vstart = q * p
            vend = min(vstart + p - 1, r)
            for v in range(vstart, vend + 1):
                lo[v] -= c
    return hi[1]
