"""Matula coding of rooted trees.

The leaf gets code 1 and a tree whose root has subtrees T_1..T_l gets
p_{n(T_1)} * ... * p_{n(T_l)}.  Codes grow very fast with depth, so encode
returns Python ints and every prime lookup goes through a PrimeTable, which
raises CapacityError instead of guessing.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

from .errors import CapacityError, DomainError, ParseError
from .primes import default_table, factorize


def _signature(children):
    return "(" + "".join(c._sig for c in children) + ")"


@dataclass(frozen=True)
class RootedTree:
    """Non-planar rooted tree; ``children`` is a multiset kept in a fixed order.

    The stored order is structural (by canonical bracket string) so trees can
    be built without a prime table; ``format_tree`` re-orders by code.
    """

    children: tuple = ()
    _sig: str = field(default="", init=False, repr=False, compare=False)

    def __post_init__(self):
        kids = tuple(sorted(self.children, key=lambda c: (len(c._sig), c._sig)))
        object.__setattr__(self, "children", kids)
        object.__setattr__(self, "_sig", _signature(kids))

    @property
    def size(self):
        return len(self._sig) // 2

    @property
    def height(self):
        if not self.children:
            return 0
        return 1 + max(c.height for c in self.children)

    def __str__(self):
        return self._sig


LEAF = RootedTree()


def star(k):
    """Root with k leaf children."""
    return RootedTree((LEAF,) * k)


def encode(tree, table=None):
    if table is None:
        table = default_table()
    memo = {}

    def code(t):
        hit = memo.get(t._sig)
        if hit is not None:
            return hit
        n = 1
        for c in t.children:
            i = code(c)
            try:
                n *= table.nth_prime(i)
            except CapacityError:
                raise CapacityError(
                    f"subtree code {i} needs p_{i}, beyond sieve limit {table.limit}"
                ) from None
        memo[t._sig] = n
        return n

    return code(tree)


def decode(n, table=None):
    n = int(n)
    if n < 1:
        raise DomainError(f"Matula codes are >= 1, got {n}")
    if table is None:
        table = default_table()
    memo = {1: LEAF}

    def tree(c):
        hit = memo.get(c)
        if hit is not None:
            return hit
        kids = []
        for p, e in factorize(c, table):
            kids.extend([tree(_index(p, table))] * e)
        t = memo[c] = RootedTree(tuple(kids))
        return t

    return tree(n)


def _index(p, table):
    try:
        return table.prime_index(p)
    except CapacityError:
        raise CapacityError(
            f"prime factor {p} is beyond sieve limit {table.limit}; its index is unknown"
        ) from None


HEIGHT_MEMO_CAP = 10**6
_height_memo = {1: 0}
_height_lock = threading.Lock()


def height_of_code(n, table=None):
    """Height of decode(n), from the factorization alone."""
    n = int(n)
    if n < 1:
        raise DomainError(f"Matula codes are >= 1, got {n}")
    hit = _height_memo.get(n)
    if hit is not None:
        return hit
    if table is None:
        table = default_table()
    h = 1 + max(height_of_code(_index(p, table), table) for p, _ in factorize(n, table))
    if n <= HEIGHT_MEMO_CAP:
        with _height_lock:
            _height_memo.setdefault(n, h)
    return h


def _is_power(i, m):
    while i % m == 0:
        i //= m
    return i == 1


def is_in_Am(n, m, table=None):
    """True iff n >= 2 and every prime factor of n is p_{m^k} for some k >= 0."""
    n = int(n)
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n == 1:
        return False
    if table is None:
        table = default_table()
    return all(_is_power(_index(p, table), m) for p, _ in factorize(n, table))


def count_height_le2(x, table=None):
    """#{1 <= n <= x : height_of_code(n) <= 2}; code 1 (the leaf) is counted."""
    x = int(x)
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if table is None:
        table = default_table()
    return sum(1 for n in range(1, x + 1) if height_of_code(n, table) <= 2)


def parse_tree(text):
    """Parse the bracket notation tree := "(" tree* ")"."""
    stack = []
    root = None
    for pos, ch in enumerate(text):
        if root is not None:
            raise ParseError("trailing input after tree", pos)
        if ch == "(":
            stack.append([])
        elif ch == ")":
            if not stack:
                raise ParseError("unbalanced ')'", pos)
            node = RootedTree(tuple(stack.pop()))
            if stack:
                stack[-1].append(node)
            else:
                root = node
        else:
            raise ParseError(f"unexpected character {ch!r}", pos)
    if root is None:
        raise ParseError("unterminated tree" if stack else "empty input", len(text))
    return root


def format_tree(tree, table=None):
    """Bracket notation with each node's children in ascending code order."""
    if table is None:
        table = default_table()
    codes = {}

    def code(t):
        c = codes.get(t._sig)
        if c is None:
            c = codes[t._sig] = encode(t, table)
        return c

    def fmt(t):
        kids = sorted(t.children, key=code)
        return "(" + "".join(fmt(c) for c in kids) + ")"

    return fmt(tree)


def rooted_trees(n):
    """All rooted trees with n vertices, one per isomorphism class."""
    if n < 1:
        raise DomainError(f"a tree has at least one vertex, got {n}")
    by_size = {1: [LEAF]}
    for s in range(2, n + 1):
        # forests of total size s-1 with parts taken in nonincreasing (size, index) order
        keyed = [(sz, i, t) for sz in range(1, s) for i, t in enumerate(by_size[sz])]
        out = []

        def grow(rest, start, kids):
            if rest == 0:
                out.append(RootedTree(tuple(kids)))
                return
            for j in range(start, len(keyed)):
                sz, _, t = keyed[j]
                if sz <= rest:
                    kids.append(t)
                    grow(rest - sz, j, kids)
                    kids.pop()

        grow(s - 1, 0, [])
        by_size[s] = out
    return by_size[n]
