"""Exact prime data (bit-packed sieve, prime counting) and prime approximations.

The sieve stores one bit per odd number and answers nth-prime, prime-index
and prime-counting queries up to a configured ``limit``.  Tables built with
``lazy=True`` only sieve as far as the queries made so far require, which
keeps short CLI invocations cheap while honouring the same capacity.

Primes beyond the sieve are available exactly through :func:`exact_nth_prime`
(Lucy-style counting plus a local window sieve), and approximately through
:func:`approx_log_nth_prime`, whose error is bracketed by explicit
Cipolla-form bounds (:func:`log_prime_bracket`).
"""
from __future__ import annotations

import json
import math
import os
import struct
import threading
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import CapacityError, ContractError, DomainError

DEFAULT_SIEVE_LIMIT = 2**30
SIEVE_LIMIT_ENV = "MATULA_SIEVE_LIMIT"
CACHE_ENV = "MATULA_ASYM_CACHE"

# exact counting beyond the sieve needs O(sqrt x) memory: 10^15 -> ~380 MB
EXACT_PI_CAP = 10**15

_BLOCK = 64  # bytes per rank block (512 odd numbers)
_SEGMENT_ODDS = 1 << 23
_SMALL_LIST_LIMIT = 1 << 21
_SMALL_LIST_COUNT = 155611  # pi(2^21)
_MAGIC = b"MAPT"
_FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIQQQ")  # magic, version, limit, count, nbytes


def configured_sieve_limit(default=DEFAULT_SIEVE_LIMIT):
    raw = os.environ.get(SIEVE_LIMIT_ENV)
    if not raw:
        return default
    try:
        return int(float(raw)) if "e" in raw.lower() else int(raw)
    except ValueError:
        raise ContractError(f"{SIEVE_LIMIT_ENV}={raw!r} is not an integer") from None


def _simple_odd_primes(n):
    """Odd primes <= n, plain numpy sieve (used for sieving base primes)."""
    if n < 3:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    out = np.flatnonzero(flags).astype(np.int64)
    return out[1:]  # drop 2


class PrimeTable:
    """Bit-packed odd-only sieve with rank/select support.

    Bit ``i`` of the packed array (little bit order) says whether ``2*i + 1``
    is prime.  ``_counts[b]`` holds the number of set bits in the first
    ``b`` blocks, so rank is one lookup plus a short popcount and select is a
    binary search plus a scan of one block.
    """

    def __init__(self, limit, lazy=False):
        limit = int(limit)
        if limit < 2:
            raise ContractError(f"sieve limit must be >= 2, got {limit}")
        self.limit = limit
        self._lock = threading.Lock()
        self._bits = np.zeros(0, dtype=np.uint8)
        self._counts = np.zeros(1, dtype=np.int64)
        self._sieved_to = 1
        self._base = _simple_odd_primes(math.isqrt(limit) + 1)
        self._small_list = None
        self._small_index = None
        if not lazy:
            self._ensure(limit)

    def __repr__(self):
        return f"PrimeTable(limit={self.limit}, sieved_to={self._sieved_to})"

    # -- construction -----------------------------------------------------

    @property
    def sieved_to(self):
        return self._sieved_to

    def _ensure(self, n):
        if n > self.limit:
            raise CapacityError(f"value {n} exceeds sieve limit {self.limit}")
        if n <= self._sieved_to:
            return
        with self._lock:
            if n <= self._sieved_to:
                return
            target = min(self.limit, max(n, 2 * self._sieved_to, 1 << 20))
            self._grow(target)

    def _grow(self, target):
        old_bytes = self._bits.shape[0]
        n_odds = (target + 1) // 2  # odd numbers 1, 3, ..., <= target
        new_bytes = -(-n_odds // 8)
        new_bytes = -(-new_bytes // _BLOCK) * _BLOCK
        lo = old_bytes * 8
        hi = new_bytes * 8
        chunks = [self._bits]
        while lo < hi:
            count = min(_SEGMENT_ODDS, hi - lo)
            flags = _kernels.sieve_odd_segment(lo, count, self._base)
            chunks.append(np.packbits(flags, bitorder="little"))
            lo += count
        bits = np.concatenate(chunks)
        sieved_to = min(self.limit, 16 * new_bytes - 1)
        if sieved_to == self.limit:
            # clear odd numbers above the limit that share the final block
            first_bad = (self.limit + 1) // 2
            if first_bad < 8 * new_bytes:
                unpacked = np.unpackbits(bits[first_bad // 8 :], bitorder="little")
                unpacked[first_bad % 8 :] = 0
                bits[first_bad // 8 :] = np.packbits(unpacked, bitorder="little")
        self._bits = bits
        per_block = np.bitwise_count(bits).reshape(-1, _BLOCK).sum(axis=1, dtype=np.int64)
        counts = np.zeros(per_block.shape[0] + 1, dtype=np.int64)
        np.cumsum(per_block, out=counts[1:])
        self._counts = counts
        self._sieved_to = sieved_to

    # -- queries ----------------------------------------------------------

    def _odd_rank(self, idx):
        """Set bits among odd indices 0..idx inclusive."""
        nbits = idx + 1
        full = nbits // 8
        rem = nbits % 8
        block = full // _BLOCK
        c = int(self._counts[block])
        c += int(np.bitwise_count(self._bits[block * _BLOCK : full]).sum())
        if rem:
            c += int(self._bits[full] & ((1 << rem) - 1)).bit_count()
        return c

    def prime_pi(self, n):
        n = int(n)
        if n > self.limit:
            raise CapacityError(f"prime_pi({n}) beyond sieve limit {self.limit}")
        if n < 2:
            return 0
        self._ensure(n)
        return 1 + self._odd_rank((n - 1) // 2)

    def is_prime(self, n):
        n = int(n)
        if n == 2:
            return True
        if n < 2 or n % 2 == 0:
            return False
        self._ensure(n)
        i = (n - 1) // 2
        return bool((self._bits[i // 8] >> (i % 8)) & 1)

    def _small(self):
        # plain-list copy of the first primes: scalar numpy calls dominate small queries
        if self._small_list is None:
            lst = self.primes_upto(min(self.limit, _SMALL_LIST_LIMIT)).tolist()
            self._small_index = {p: i + 1 for i, p in enumerate(lst)}
            self._small_list = lst
        return self._small_list

    def nth_prime(self, i):
        i = int(i)
        if i < 1:
            raise DomainError(f"prime index must be >= 1, got {i}")
        if i == 1:
            return 2
        if i <= _SMALL_LIST_COUNT:
            small = self._small()
            if i <= len(small):
                return small[i - 1]
        if i >= 6:
            lg = math.log(i)
            bound = int(i * (lg + math.log(lg))) + 1
        else:
            bound = 13
        self._ensure(min(bound, self.limit))
        j = i - 1  # j-th odd prime
        if j > self._counts[-1]:
            raise CapacityError(f"p_{i} exceeds sieve limit {self.limit}")
        b = int(np.searchsorted(self._counts, j, side="left")) - 1
        need = j - int(self._counts[b])
        chunk = self._bits[b * _BLOCK : (b + 1) * _BLOCK]
        cum = np.cumsum(np.bitwise_count(chunk))
        byte = int(np.searchsorted(cum, need, side="left"))
        need -= int(cum[byte - 1]) if byte else 0
        val = int(chunk[byte])
        for bit in range(8):
            if (val >> bit) & 1:
                need -= 1
                if need == 0:
                    return 2 * (8 * (b * _BLOCK + byte) + bit) + 1
        raise AssertionError("rank/select tables out of sync")

    def prime_index(self, p):
        """Rank of the prime ``p`` (p_1 = 2); never extrapolated past the limit."""
        p = int(p)
        if p <= _SMALL_LIST_LIMIT:
            self._small()
            hit = self._small_index.get(p)
            if hit is not None:
                return hit
        if p > self.limit:
            raise CapacityError(f"prime {p} exceeds sieve limit {self.limit}")
        if not self.is_prime(p):
            raise DomainError(f"{p} is not prime")
        return self.prime_pi(p)

    def primes_upto(self, n):
        n = min(int(n), self.limit)
        if n < 2:
            return np.zeros(0, dtype=np.int64)
        self._ensure(n)
        nodds = (n + 1) // 2
        flags = np.unpackbits(self._bits[: -(-nodds // 8)], bitorder="little")[:nodds]
        odd = 2 * np.flatnonzero(flags).astype(np.int64) + 1
        return np.concatenate([np.array([2], dtype=np.int64), odd])

    def __len__(self):
        """Number of primes sieved so far (all primes <= limit once complete)."""
        return 1 + int(self._counts[-1]) if self._sieved_to >= 2 else 0

    # -- persistence ------------------------------------------------------

    def save(self, path):
        """Write the full table: little-endian header then the packed bits."""
        self._ensure(self.limit)
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(_MAGIC, _FORMAT_VERSION, self.limit, len(self), self._bits.shape[0]))
            fh.write(self._bits.tobytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            head = fh.read(_HEADER.size)
            if len(head) != _HEADER.size:
                raise ContractError(f"{path}: truncated header")
            magic, version, limit, count, nbytes = _HEADER.unpack(head)
            if magic != _MAGIC or version != _FORMAT_VERSION:
                raise ContractError(f"{path}: not a prime table (v{_FORMAT_VERSION})")
            bits = np.frombuffer(fh.read(nbytes), dtype=np.uint8).copy()
        if bits.shape[0] != nbytes or nbytes % _BLOCK:
            raise ContractError(f"{path}: truncated bit array")
        table = cls(limit, lazy=True)
        table._bits = bits
        per_block = np.bitwise_count(bits).reshape(-1, _BLOCK).sum(axis=1, dtype=np.int64)
        counts = np.zeros(per_block.shape[0] + 1, dtype=np.int64)
        np.cumsum(per_block, out=counts[1:])
        table._counts = counts
        table._sieved_to = limit
        if len(table) != count:
            raise ContractError(f"{path}: prime count mismatch ({len(table)} != {count})")
        return table


def build_prime_table(limit):
    """Eagerly sieve every prime <= limit."""
    return PrimeTable(limit)


_default_lock = threading.Lock()
_default_tables = {}


def default_table(limit=None):
    """Process-wide lazily grown table, one per limit."""
    if limit is None:
        limit = configured_sieve_limit()
    with _default_lock:
        table = _default_tables.get(limit)
        if table is None:
            table = _default_tables[limit] = PrimeTable(limit, lazy=True)
        return table


def nth_prime(table, i):
    return table.nth_prime(i)


def prime_pi(table, n):
    return table.prime_pi(n)


# -- factorization ----------------------------------------------------------

_TRIAL_BOUND = 1 << 16
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_EXTRA = (41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


def is_probable_prime(n):
    """Miller-Rabin; deterministic below 3.3e24, 25 fixed bases above."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = _MR_BASES if n < 3_317_044_064_679_887_385_961_981 else _MR_BASES + _MR_EXTRA
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n):
    if n % 2 == 0:
        return 2
    for c in range(1, 1000):
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        m = 128
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed to split {n}")


def _split(n, out):
    if n == 1:
        return
    if is_probable_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _brent_rho(n)
    _split(d, out)
    _split(n // d, out)


_small_primes_cache = {}


def _small_primes(table):
    key = id(table)
    cached = _small_primes_cache.get(key)
    if cached is None or cached[0] is not table:
        cached = (table, table.primes_upto(min(_TRIAL_BOUND, table.limit)).tolist())
        _small_primes_cache[key] = cached
    return cached[1]


def factorize(n, table=None):
    """Prime factorization as an ascending list of (prime, exponent) pairs."""
    n = int(n)
    if n < 1:
        raise DomainError(f"factorize needs n >= 1, got {n}")
    if table is None:
        table = default_table()
    out = {}
    for p in _small_primes(table):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        _split(n, out)
    return sorted(out.items())


# -- asymptotic approximations ----------------------------------------------

def cipolla_log_prime(n):
    """Two-term approximation log p_n ~ log n + log log n.

    Error is O(log log n / log n); at n = 1000 it is about 0.14.
    """
    if n < 2:
        raise DomainError(f"cipolla_log_prime needs n >= 2, got {n}")
    ln = math.log(n)
    return ln + math.log(ln)


def loglog_prime_expansion(m, k):
    """Four-term expansion of log log p_{m^k}.

    log k + log log m + (log k)/(k log m) + (log log m)/(k log m); the
    remainder is O(log^2 k / k^2), so small k (and k = 1 in particular)
    carries a large error.
    """
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    lk = math.log(k)
    llm = math.log(math.log(m))
    klm = k * math.log(m)
    return lk + llm + lk / klm + llm / klm


def loglog_remainder_bound(k, c):
    """c * log^2 k / k^2 with a calibrated constant c."""
    return c * math.log(k) ** 2 / k**2


def loglog_remainder_ratios(m, table):
    """k -> k^2 |log log p_{m^k} - expansion| / log^2 k over the sieve-exact k >= 2."""
    ratios = {}
    k = 2
    while True:
        try:
            p = table.nth_prime(m**k)
        except CapacityError:
            break
        err = abs(math.log(math.log(p)) - loglog_prime_expansion(m, k))
        ratios[k] = k * k * err / math.log(k) ** 2
        k += 1
    return ratios


REMAINDER_SAFETY = 1.5


def calibrate_remainder_constant(m, table):
    """Max observed remainder ratio on the exact range, times a 1.5 margin."""
    ratios = loglog_remainder_ratios(m, table)
    if not ratios:
        raise CapacityError(f"sieve limit {table.limit} too small to calibrate m={m}")
    return REMAINDER_SAFETY * max(ratios.values())


def log_prime_bracket(log_n):
    """Explicit bounds (lo, hi) on log p_n for n >= 6, from log n.

    Lower: p_n >= n(L + ll - 1 + (ll - 2.1)/L) for n >= 3.
    Upper: p_n <= n(L + ll - 1 + (ll - 2)/L) for n >= 688383, else the
    weaker p_n <= n(L + ll) valid for n >= 6.
    """
    L = float(log_n)
    if L < math.log(6):
        raise DomainError("bracket needs n >= 6")
    ll = math.log(L)
    lo = L + math.log(L + ll - 1 + (ll - 2.1) / L)
    if L >= math.log(688383):
        hi = L + math.log(L + ll - 1 + (ll - 2.0) / L)
    else:
        hi = L + math.log(L + ll)
    return lo, hi


def _ei(t):
    """Exponential integral Ei(t) for 0 < t <= 700 in double precision."""
    if t <= 40.0:
        term = 1.0
        total = 0.0
        k = 1
        while True:
            term *= t / k
            add = term / k
            total += add
            if add < 1e-17 * total:
                break
            k += 1
        return 0.5772156649015329 + math.log(t) + total
    return math.exp(_log_ei_asymptotic(t))


def _log_ei_asymptotic(t):
    # e^t/t * sum j!/t^j truncated at the smallest term
    s = 1.0
    term = 1.0
    j = 1
    while j < t:
        nxt = term * j / t
        if nxt > term or nxt < 1e-18:
            break
        term = nxt
        s += term
        j += 1
    return t - math.log(t) + math.log(s)


def approx_log_nth_prime(log_n):
    """log of R^{-1}(n) (three-term Riemann R), from log n; for n >= 6.

    Uses li(x) - li(x^(1/2))/2 - li(x^(1/3))/3 while x fits a double and
    plain li beyond, where the correction is below double resolution.
    """
    L = float(log_n)
    lo, hi = log_prime_bracket(L)
    t = 0.5 * (lo + hi)
    for _ in range(60):
        if t <= 700.0:
            val = _ei(t) - _ei(t / 2) / 2 - _ei(t / 3) / 3
            g = math.log(val) - L
            deriv = math.exp(t - math.log(t)) / val
        else:
            le = _log_ei_asymptotic(t)
            g = le - L
            deriv = math.exp(t - math.log(t) - le)
        step = g / deriv
        t -= step
        if abs(step) < 1e-15 * t:
            break
    return t


def bracketed_log_nth_prime(log_n):
    """(value, error_bound): the R^{-1} estimate clipped into the bracket."""
    lo, hi = log_prime_bracket(log_n)
    val = min(max(approx_log_nth_prime(log_n), lo), hi)
    return val, max(val - lo, hi - val)


# above this log n the li^{-1} root exceeds e^75, where the R corrections
# are below double resolution and 40 asymptotic Ei terms suffice
VECTOR_LOG_N_MIN = 70.0


def bracketed_log_nth_prime_array(log_n):
    """Vectorized ``bracketed_log_nth_prime`` for log n >= VECTOR_LOG_N_MIN."""
    L = np.asarray(log_n, dtype=np.float64)
    if L.size and L.min() < VECTOR_LOG_N_MIN:
        raise DomainError(f"vectorized estimate needs log n >= {VECTOR_LOG_N_MIN}")
    ll = np.log(L)
    lo = L + np.log(L + ll - 1 + (ll - 2.1) / L)
    hi = L + np.log(L + ll - 1 + (ll - 2.0) / L)
    t = 0.5 * (lo + hi)
    for _ in range(8):
        s = np.ones_like(t)
        term = np.ones_like(t)
        for j in range(1, 41):
            term = term * j / t
            s += term
        le = t - np.log(t) + np.log(s)
        deriv = np.exp(t - np.log(t) - le)
        t = t - (le - L) / deriv
    val = np.clip(t, lo, hi)
    return val, np.maximum(val - lo, hi - val)


# -- exact primes beyond the sieve -------------------------------------------

def exact_prime_pi(x, table=None):
    """pi(x) exactly: sieve lookup when possible, Lucy counting otherwise."""
    x = int(x)
    if table is not None and x <= table.limit:
        return table.prime_pi(x)
    if x > EXACT_PI_CAP:
        raise CapacityError(f"exact prime counting capped at {EXACT_PI_CAP}, got {x}")
    if x < 2:
        return 0
    return int(_kernels.lucy_prime_pi(x, math.isqrt(x)))


def _window_primes(table, lo, hi):
    """Primes in [lo, hi] by sieving odd numbers with base primes from the table."""
    lo = max(lo, 2)
    out = []
    if lo <= 2 <= hi:
        out.append(2)
    first = max(lo, 3) | 1
    if first > hi:
        return out
    root = math.isqrt(hi)
    base = table.primes_upto(root)[1:]
    if root > table.limit:
        raise CapacityError(f"window sieve near {hi} needs primes to {root}")
    start = (first - 1) // 2
    count = (hi - 1) // 2 - start + 1
    flags = _kernels.sieve_odd_segment(start, count, base)
    out.extend((2 * (np.flatnonzero(flags).astype(np.int64) + start) + 1).tolist())
    return out


_WINDOW = 1 << 22


class _NthPrimeCache:
    def __init__(self):
        self._lock = threading.Lock()
        self._data = None

    def _path(self):
        root = os.environ.get(CACHE_ENV)
        if root and root.lower() in ("0", "off", "none"):
            return None
        base = Path(root) if root else Path.home() / ".cache" / "matula_asym"
        return base / "nth_primes.json"

    def _load(self):
        if self._data is None:
            self._data = {}
            path = self._path()
            if path is not None and path.exists():
                try:
                    self._data = {int(k): int(v) for k, v in json.loads(path.read_text()).items()}
                except (OSError, ValueError):
                    self._data = {}
        return self._data

    def get(self, n):
        with self._lock:
            return self._load().get(n)

    def put(self, n, p):
        with self._lock:
            data = self._load()
            data[n] = p
            path = self._path()
            if path is None:
                return
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                tmp = path.with_suffix(".tmp")
                tmp.write_text(json.dumps({str(k): v for k, v in sorted(data.items())}))
                os.replace(tmp, path)
            except OSError:
                pass


_nth_cache = _NthPrimeCache()


def exact_nth_prime(n, table=None):
    """p_n exactly, from the sieve or by prime counting plus a window sieve.

    Results beyond the sieve are memoized on disk (see MATULA_ASYM_CACHE).
    """
    n = int(n)
    if table is None:
        table = default_table()
    try:
        return table.nth_prime(n)
    except CapacityError:
        pass
    cached = _nth_cache.get(n)
    if cached is not None:
        return cached
    _, hi = log_prime_bracket(math.log(n))
    if math.exp(hi) > EXACT_PI_CAP:
        raise CapacityError(f"p_{n} lies beyond the exact counting cap {EXACT_PI_CAP}")
    y = int(math.exp(approx_log_nth_prime(math.log(n))))
    c = exact_prime_pi(y)
    if c >= n:
        # p_n <= y: walk windows downward; c counts primes <= y
        while True:
            ps = _window_primes(table, y - _WINDOW + 1, y)
            if c - len(ps) < n:
                p = ps[n - (c - len(ps)) - 1]
                break
            c -= len(ps)
            y -= _WINDOW
    else:
        while True:
            ps = _window_primes(table, y + 1, y + _WINDOW)
            if c + len(ps) >= n:
                p = ps[n - c - 1]
                break
            c += len(ps)
            y += _WINDOW
    _nth_cache.put(n, p)
    return p


def exact_prime_index_upper(x, m, table=None):
    """Largest k with p_{m^k} <= x, resolving near-ties exactly."""
    k = 0
    while True:
        idx = m ** (k + 1)
        if idx >= 6:
            lo, _ = log_prime_bracket(math.log(idx))
            if lo > math.log(x) + 1e-9:
                return k
        if exact_nth_prime(idx, table) > x:
            return k
        k += 1
