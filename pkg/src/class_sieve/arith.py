"""Exact integer primitives: primes, Moebius, Kronecker, squarefree tests."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt, prod

import numpy as np

# Exact rationals throughout the package are plain fractions.Fraction values.
Rational = Fraction


class BoundExceeded(ValueError):
    """Requested size exceeds a configured resource bound."""


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: tuple[int, ...]

    def __iter__(self):
        return iter(self.primes)

    def __len__(self):
        return len(self.primes)

    def __getitem__(self, i):
        return self.primes[i]

    def primorial(self) -> int:
        return prod(self.primes)

    def as_array(self) -> np.ndarray:
        return np.array(self.primes, dtype=np.int64)


def prime_sieve(limit: int) -> np.ndarray:
    """Boolean array ``is_prime[0..limit]``."""
    flags = np.ones(max(limit + 1, 2), dtype=bool)
    flags[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return flags[: limit + 1]


def primes_up_to(limit: int) -> PrimeTable:
    if limit < 0:
        raise ValueError("limit must be non-negative")
    if limit < 2:
        return PrimeTable(limit, ())
    ps = np.flatnonzero(prime_sieve(limit))
    return PrimeTable(limit, tuple(int(p) for p in ps))


def prime_count(x: float) -> int:
    return len(primes_up_to(int(x))) if x >= 2 else 0


def factorize(n: int) -> dict[int, int]:
    """Trial division; fine for the sizes used here."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    # 2-3-5 wheel
    steps = (4, 2, 4, 2, 4, 6, 2, 6)
    p, i = 7, 0
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += steps[i]
        i = (i + 1) % 8
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def omega(n: int) -> int:
    """Number of distinct prime divisors."""
    return len(factorize(n))


def moebius(n: int) -> int:
    if n < 1:
        raise ValueError("moebius needs n >= 1")
    f = factorize(n) if n > 1 else {}
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factorize(n).values()) if abs(n) > 1 else True


def squarefree_range(lo: int, hi: int, odd_only: bool = False) -> np.ndarray:
    """Boolean mask over [lo, hi): n has no square factor p^2 (p odd if odd_only)."""
    if lo < 1 or hi < lo:
        raise ValueError("need 1 <= lo <= hi")
    mask = np.ones(hi - lo, dtype=bool)
    for p in primes_up_to(isqrt(max(hi - 1, 1))):
        if odd_only and p == 2:
            continue
        q = p * p
        start = (-lo) % q
        mask[start::q] = False
    return mask


def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError("jacobi needs odd positive n")
    a %= n
    t = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def kronecker(D: int, n: int) -> int:
    if n < 1:
        raise ValueError("kronecker needs n >= 1")
    if n == 1:
        return 1
    v = (n & -n).bit_length() - 1
    m = n >> v
    if v and D % 2 == 0:
        return 0
    t = 1
    if v % 2 and D % 8 in (3, 5):
        t = -1
    return t * jacobi(D, m) if m > 1 else t


def kronecker_table(p: int) -> np.ndarray:
    """Values of (D/p) indexed by D mod p (odd p) or D mod 8 (p = 2)."""
    m = 8 if p == 2 else p
    return np.array([kronecker(r, p) for r in range(m)], dtype=np.int8)


def kronecker_array(D: np.ndarray, p: int) -> np.ndarray:
    m = 8 if p == 2 else p
    return kronecker_table(p)[np.mod(D, m)]


def is_fundamental_discriminant(D: int) -> bool:
    if D == 0:
        raise ValueError("D must be nonzero")
    if D == 1:
        return False
    r = D % 4
    if r == 1:
        return is_squarefree(D)
    if r == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def parse_rational(s: str | int | float | Fraction) -> Fraction:
    """Accepts '1/6', '0.1667', ints and Fractions."""
    if isinstance(s, float):
        return Fraction(str(s))
    return Fraction(s)
