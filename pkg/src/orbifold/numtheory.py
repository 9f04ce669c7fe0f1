"""Elementary integer arithmetic: primality, factorisation, valuations."""

import math
from functools import lru_cache, reduce

import numpy as np

from .errors import IntegerOverflow, NotPrime, ZeroInput

MAX_ABS = 2**63

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = None


def _check_range(x):
    if abs(x) > MAX_ABS:
        raise IntegerOverflow(f"|{x}| exceeds 2^63")


def primes_up_to(n):
    """Sieve of Eratosthenes; returns a sorted list of primes <= n."""
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).tolist()


def _small_primes():
    global _SMALL_PRIMES
    if _SMALL_PRIMES is None:
        _SMALL_PRIMES = primes_up_to(10_000)
    return _SMALL_PRIMES


def is_prime(n):
    """Deterministic Miller-Rabin; exact for every n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n):
    # n is odd, composite, free of small factors
    for c in range(1, 100):
        y, r, q, g = 2, 1, 1, 1
        m = 128
        f = lambda v: (v * v + c) % n  # noqa: E731
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = f(y)
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = f(y)
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = f(ys)
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"no factor found for {n}")


def _split(n, out):
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _split(d, out)
    _split(n // d, out)


@lru_cache(maxsize=1 << 16)
def _factor_abs(n):
    out = {}
    for p in _small_primes():
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
    return tuple(sorted(out.items()))


def factorize(x):
    """Factorisation of |x| as a sorted tuple of (prime, exponent) pairs.

    Trial division by primes below 10^4, then Miller-Rabin and
    Pollard-Brent on the cofactor. ``factorize(1) == ()``.
    """
    if x == 0:
        raise ZeroInput("cannot factorize 0")
    _check_range(x)
    return _factor_abs(abs(x))


def val_p(x, p):
    """Largest e with p^e | x."""
    if x == 0:
        raise ZeroInput("val_p(0) is undefined")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    x = abs(x)
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return e


def is_squarefree(x):
    if x < 1:
        raise ValueError("is_squarefree expects a positive integer")
    return all(e == 1 for _, e in factorize(x))


def squarefree_sieve(n):
    """Boolean array a with a[k] == True iff k is squarefree (a[0] False)."""
    flags = np.ones(n + 1, dtype=bool)
    flags[0] = False
    for p in primes_up_to(math.isqrt(n)):
        flags[p * p :: p * p] = False
    return flags


def lcm(*values):
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


def is_in_Qm(p, m):
    """True iff lcm(gcd(m_i, p-1)) equals prod(gcd(m_i, p-1))."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if any(mi < 2 for mi in m):
        raise ValueError("all exponents must be >= 2")
    g = [math.gcd(mi, p - 1) for mi in m]
    return lcm(*g) == math.prod(g)


def iroot(x, k):
    """Floor of the k-th root of x >= 0, exact (binary search on integers)."""
    if x < 0:
        raise ValueError("iroot expects x >= 0")
    if k == 1 or x < 2:
        return x
    lo, hi = 0, 1 << (x.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**k <= x:
            lo = mid
        else:
            hi = mid - 1
    return lo


def radical(x):
    return math.prod(p for p, _ in factorize(x))
