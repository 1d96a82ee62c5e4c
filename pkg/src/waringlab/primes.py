"""Prime utilities: sieve, deterministic 64-bit primality, Pollard rho."""

from __future__ import annotations

import math
import random

import numpy as np

# Deterministic Miller-Rabin base set for n < 2^64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def sieve_bools(limit: int) -> np.ndarray:
    """Boolean array b with b[i] true iff i is prime, for 0 <= i <= limit."""
    if limit < 0:
        raise ValueError("limit must be nonnegative")
    b = np.ones(limit + 1, dtype=bool)
    b[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if b[p]:
            b[p * p :: p] = False
    return b


def primes_up_to(limit: int) -> list[int]:
    """All primes <= limit, ascending."""
    if limit < 2:
        return []
    return [int(p) for p in np.flatnonzero(sieve_bools(limit))]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 2^64."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """One nontrivial factor of composite odd n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    rng = random.Random(0xC0FFEE ^ n)
    while True:
        c = rng.randrange(1, n)
        f = lambda x: (x * x + c) % n
        x, y, d = rng.randrange(n), 0, 1
        y = x
        while d == 1:
            x = f(x)
            y = f(f(y))
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def factorize_int(n: int) -> list[tuple[int, int]]:
    """Sorted (prime, exponent) factorization of n >= 1 via trial division
    with wheel mod 6, falling back to Miller-Rabin + Pollard rho for large
    cofactors. Desk scale: n < 2^64."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out: dict[int, int] = {}

    def add(p: int) -> None:
        out[p] = out.get(p, 0) + 1

    for p in (2, 3):
        while n % p == 0:
            add(p)
            n //= p
    d = 5
    while d * d <= n and d < 100_000:
        for q in (d, d + 2):
            while n % q == 0:
                add(q)
                n //= q
        d += 6
    # large cofactor: split recursively
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            add(m)
            continue
        g = _pollard_rho(m)
        stack.append(g)
        stack.append(m // g)
    return sorted(out.items())
