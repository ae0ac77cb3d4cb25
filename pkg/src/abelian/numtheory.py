"""Small exact integer helpers: factorization and invariant-factor arithmetic."""

from __future__ import annotations

import math


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of n >= 1 by trial division, as {prime: exponent}."""
    if n < 1:
        raise ValueError(f"cannot factorize {n}")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 5
    while d * d <= n:
        for p in (d, d + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        d += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_factors(n: int) -> list[int]:
    """Sorted distinct primes dividing n."""
    return sorted(factorize(n))


def canonical_invariant_factors(factors) -> list[int]:
    """Invariant factors of Z_f1 x ... x Z_fk, ascending divisibility chain.

    Splits every fi into prime powers and recombines greedily: the largest
    invariant factor takes the highest power of each prime, and so on down.
    Unit factors never appear in the output.  This is the ground-truth route,
    independent of any matrix normal form.
    """
    buckets: dict[int, list[int]] = {}
    for f in factors:
        if f < 1:
            raise ValueError(f"group factor must be >= 1, got {f}")
        for p, e in factorize(f).items():
            buckets.setdefault(p, []).append(e)
    for exps in buckets.values():
        exps.sort(reverse=True)
    chain: list[int] = []
    level = 0
    while True:
        m = 1
        for p, exps in buckets.items():
            if level < len(exps):
                m *= p ** exps[level]
        if m == 1:
            break
        chain.append(m)
        level += 1
    chain.reverse()
    return chain


def lcm(a: int, b: int) -> int:
    return abs(a * b) // math.gcd(a, b) if a and b else 0
