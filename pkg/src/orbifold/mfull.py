"""m-full integers and their canonical (sign, u, v_1..v_{m-1}) form.

Every nonzero m-full x is uniquely

    x = sign * u^m * prod_{r=1}^{m-1} v_r^(m+r)

with each v_r squarefree and the v_r pairwise coprime.
"""

import math
from dataclasses import dataclass

from .errors import IntegerOverflow, InvariantViolation, NotMFull, ZeroInput
from .numtheory import MAX_ABS, factorize, iroot, is_squarefree, squarefree_sieve


@dataclass(frozen=True)
class MFullDecomposition:
    sign: int
    m: int
    u: int
    v: tuple

    def value(self):
        return compose(self)

    def weight(self):
        """prod_r v_r^(m+r), the part of |x| carried by the v-tuple."""
        return math.prod(vr ** (self.m + r) for r, vr in enumerate(self.v, start=1))


def is_mfull(x, m):
    if x == 0:
        raise ZeroInput("0 is not m-full")
    if m < 2:
        raise ValueError("m must be >= 2")
    return all(e >= m for _, e in factorize(x))


def decompose(x, m):
    if x == 0:
        raise ZeroInput("0 has no decomposition")
    if m < 2:
        raise ValueError("m must be >= 2")
    u = 1
    v = [1] * (m - 1)
    for p, e in factorize(x):
        if e < m:
            raise NotMFull(f"{x} is not {m}-full ({p}^{e})")
        # e = k*m + (m + r) with 0 <= r < m; r == 0 folds into u
        k, r = divmod(e - m, m)
        if r == 0:
            u *= p ** (k + 1)
        else:
            u *= p**k
            v[r - 1] *= p
    return MFullDecomposition(1 if x > 0 else -1, m, u, tuple(v))


def compose(d):
    if d.sign not in (1, -1):
        raise InvariantViolation("sign must be +1 or -1")
    if d.m < 2 or len(d.v) != d.m - 1:
        raise InvariantViolation("v must have m - 1 entries, m >= 2")
    if d.u < 1 or any(vr < 1 for vr in d.v):
        raise InvariantViolation("u and v_r must be positive")
    for i, vi in enumerate(d.v):
        if not is_squarefree(vi):
            raise InvariantViolation(f"v_{i + 1} = {vi} is not squarefree")
        for vj in d.v[i + 1 :]:
            if math.gcd(vi, vj) != 1:
                raise InvariantViolation(f"v entries {vi}, {vj} share a factor")
    x = d.u**d.m * d.weight()
    if x > MAX_ABS:
        raise IntegerOverflow(f"composed value {x} exceeds 2^63")
    return d.sign * x


def _v_tuples(B, m, flags):
    """Yield (v, weight) for squarefree pairwise-coprime v with weight <= B."""
    v = [1] * (m - 1)

    def rec(r, bound, weight):
        # fill v_r for r = m-1 down to 1 (largest exponent first)
        if r == 0:
            yield tuple(v), weight
            return
        e = m + r
        top = iroot(bound, e)
        for vr in range(1, top + 1):
            if not flags[vr]:
                continue
            if vr > 1 and any(math.gcd(vr, w) != 1 for w in v[r:]):
                continue
            v[r - 1] = vr
            yield from rec(r - 1, bound // vr**e, weight * vr**e)
        v[r - 1] = 1

    yield from rec(m - 1, B, 1)


def enumerate_decomposed(B, m):
    """All positive m-full x <= B as MFullDecomposition, sorted by value."""
    if B < 1:
        raise ValueError("B must be >= 1")
    if B > MAX_ABS:
        raise IntegerOverflow("B exceeds 2^63")
    if m < 2:
        raise ValueError("m must be >= 2")
    flags = squarefree_sieve(max(1, iroot(B, m + 1)))
    out = []
    for v, weight in _v_tuples(B, m, flags):
        for u in range(1, iroot(B // weight, m) + 1):
            out.append((u**m * weight, MFullDecomposition(1, m, u, v)))
    out.sort(key=lambda item: item[0])
    return [d for _, d in out]


def enumerate_mfull(B, m):
    """Sorted positive m-full integers <= B, built from (u, v) tuples."""
    return [d.u**d.m * d.weight() for d in enumerate_decomposed(B, m)]
