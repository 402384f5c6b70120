"""Brute-force reference implementations, independent of the library.

Everything here favours obviousness over speed: trial division, divisor
enumeration, exact rational arithmetic.  Tests compare the fast sieved /
chunked paths against these.
"""

from __future__ import annotations

import math
from fractions import Fraction


def mobius_naive(n: int) -> int:
    if n == 1:
        return 1
    count = 0
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            m //= d
            count += 1
            if m % d == 0:
                return 0
        d += 1
    if m > 1:
        count += 1
    return -1 if count % 2 else 1


def divisors(n: int) -> list:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def tau_naive(n: int) -> int:
    return len(divisors(n))


def sigma_naive(n: int) -> int:
    return sum(divisors(n))


def is_prime_naive(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_count_naive(x: int) -> int:
    return sum(1 for n in range(2, x + 1) if is_prime_naive(n))


def mangoldt_naive(n: int) -> float:
    """log p when n is a power of the prime p, else 0."""
    if n < 2:
        return 0.0
    for p in range(2, n + 1):
        if n % p == 0:
            # p is the least factor of n, hence prime
            m = n
            while m % p == 0:
                m //= p
            return math.log(p) if m == 1 else 0.0
    return 0.0


def weighted_sum_fsum(values, x: float, k: int) -> float:
    """Direct sum_{n<=x} values[n-1]/n^k with math.fsum (exact rounding)."""
    m = int(math.floor(x))
    return math.fsum(values[n - 1] / n**k for n in range(1, m + 1))


def weighted_sum_fraction(int_values, x: float, k: int = 1) -> Fraction:
    """Exact rational sum_{n<=x} a_n/n^k for integer sequences."""
    m = int(math.floor(x))
    total = Fraction(0)
    for n in range(1, m + 1):
        total += Fraction(int(int_values[n - 1]), n**k)
    return total


def abel_total_fraction(int_values, x) -> tuple[Fraction, Fraction, Fraction]:
    """Exact rational boundary, step integral, and their sum at x."""
    x = Fraction(x)
    m = int(math.floor(x))
    prefix = 0
    integral = Fraction(0)
    for n in range(1, m):
        prefix += int(int_values[n - 1])
        integral += prefix * (Fraction(1, n) - Fraction(1, n + 1))
    prefix += int(int_values[m - 1])
    integral += prefix * (Fraction(1, m) - 1 / x)
    boundary = prefix / x
    return boundary, integral, boundary + integral
