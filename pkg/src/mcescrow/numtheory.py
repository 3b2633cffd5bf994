"""Arbitrary-precision number theory used by every other module.

All functions are pure. Randomized ones take an explicit ``random.Random``;
passing ``None`` draws from the operating system instead of a module global.
"""

from __future__ import annotations

import math
import random
import re

from .errors import (
    InvalidInput,
    InvalidModulus,
    NotCoprime,
    NotCoprimeModuli,
    WorkBudgetExceeded,
)

# Deterministic Miller-Rabin witnesses, correct for every n < 3.3 * 10**24.
DETERMINISTIC_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
DETERMINISTIC_LIMIT = 1 << 64

DEFAULT_RHO_BUDGET = 1 << 22

_SMALL_PRIMES = [p for p in range(2, 1000) if all(p % d for d in range(2, int(p**0.5) + 1))]

_HEX_RE = re.compile(r"0|[1-9a-f][0-9a-f]*")


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    if modulus < 2:
        raise InvalidModulus(f"modulus must be >= 2, got {modulus}")
    if exponent < 0:
        raise InvalidInput("exponent must be non-negative")
    # builtin pow is square-and-multiply on arbitrary precision ints
    return pow(base, exponent, modulus)


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b)``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        quot, rem = divmod(a, b)
        a, b = b, rem
        x0, x1 = x1, x0 - quot * x1
        y0, y1 = y1, y0 - quot * y1
    return a, x0, y0


def mod_inv(a: int, modulus: int) -> int:
    """Inverse of ``a`` modulo ``modulus`` via extended Euclid.

    Raises ``NotCoprime`` carrying the gcd when no inverse exists. For a
    McCurley modulus that gcd is a prime factor, so callers must treat it
    as sensitive.
    """
    if modulus < 2:
        raise InvalidModulus(f"modulus must be >= 2, got {modulus}")
    g, x, _ = egcd(a % modulus, modulus)
    if g != 1:
        raise NotCoprime(g)
    return x % modulus


def is_probable_prime(n: int, rounds: int = 40, rng: random.Random | None = None) -> bool:
    """Miller-Rabin test.

    Exact for ``n < 2**64`` using a fixed witness set. Larger inputs get the
    fixed witnesses plus ``rounds`` random ones, for error at most
    ``4**-rounds``.
    """
    if rounds < 1:
        raise InvalidInput("rounds must be >= 1")
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:25]:
        if n == p:
            return True
        if n % p == 0:
            return False

    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1

    def composite_witness(a: int) -> bool:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            return False
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                return False
        return True

    if any(composite_witness(a) for a in DETERMINISTIC_WITNESSES):
        return False
    if n < DETERMINISTIC_LIMIT:
        return True
    if rng is None:
        rng = random.SystemRandom()
    return not any(composite_witness(rng.randrange(2, n - 1)) for _ in range(rounds))


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    """Unique ``x`` in ``[0, m1*m2)`` with ``x = r1 (mod m1)`` and ``x = r2 (mod m2)``."""
    if m1 < 1 or m2 < 1:
        raise InvalidModulus("CRT moduli must be positive")
    g = math.gcd(m1, m2)
    if g != 1:
        raise NotCoprimeModuli(g)
    if not (0 <= r1 < m1 and 0 <= r2 < m2):
        raise InvalidInput("CRT residues must be reduced")
    if m1 == 1:
        return r2
    if m2 == 1:
        return r1
    lift = (r2 - r1) * mod_inv(m1, m2) % m2
    return r1 + m1 * lift


def _pollard_brent(n: int, c: int, budget: int) -> tuple[int, int]:
    """One Brent-variant rho run for a factor of odd composite ``n``.

    Returns ``(divisor, iterations)``; divisor may equal ``n`` on failure.
    """
    y, r, q, g = 2, 1, 1, 1
    x = ys = y
    used = 0
    batch = 128
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        used += r
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(batch, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            used += min(batch, r - k)
            g = math.gcd(q, n)
            k += batch
        r *= 2
        if used > budget:
            raise WorkBudgetExceeded(f"rho factorization of {n} exceeded {budget} iterations")
    if g == n:
        # batched product overshot; replay one step at a time
        while True:
            ys = (ys * ys + c) % n
            used += 1
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g, used


def factorize(n: int, budget: int = DEFAULT_RHO_BUDGET) -> dict[int, int]:
    """Prime factorization by trial division then Pollard rho (Brent).

    ``budget`` caps the total number of rho iterations.
    """
    if n < 1:
        raise InvalidInput("can only factor positive integers")
    factors: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    if 1 < n < _SMALL_PRIMES[-1] ** 2:
        # no factor below the trial-division bound, so n is prime
        factors[n] = factors.get(n, 0) + 1
        return factors
    pending = [n] if n > 1 else []
    spent = 0
    while pending:
        m = pending.pop()
        if is_probable_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        root = math.isqrt(m)
        if root * root == m:
            pending += [root, root]
            continue
        c = 1
        while True:
            d, used = _pollard_brent(m, c, budget - spent)
            spent += used
            if d != m:
                break
            c += 1
        pending += [d, m // d]
    return factors


def largest_prime_factor(n: int, budget: int = DEFAULT_RHO_BUDGET) -> int:
    """Largest prime dividing ``n``. Meant for inputs up to roughly 80 bits."""
    if n < 2:
        raise InvalidInput(f"largest_prime_factor needs n >= 2, got {n}")
    return max(factorize(n, budget))


def to_hex(value: int) -> str:
    """Lowercase big-endian hex, no leading zeros, ``"0"`` for zero."""
    if value < 0:
        raise InvalidInput("only non-negative integers serialize")
    return format(value, "x")


def from_hex(text: str) -> int:
    """Strict inverse of :func:`to_hex`; rejects prefixes, case and padding."""
    if not _HEX_RE.fullmatch(text):
        raise InvalidInput(f"not canonical lowercase hex: {text!r}")
    return int(text, 16)
