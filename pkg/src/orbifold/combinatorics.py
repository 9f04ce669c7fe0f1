"""Inclusion-exclusion weight varpi(s, t) over collections of marked triples.

A marked triple (g; p; I) has 1 <= g_j <= m_j - 1 and I a subset of
{0..n}. It forces p | u_j for j in I and p | v_{j, g_j} for j not in I.
A collection R maps to the pattern (a(R), b(R)); varpi(s, t) is the signed
number of nonempty collections with a given pattern.

At one prime the pattern is the set of "positions" ('s', j) or ('t', j, r)
carrying p, and only the shape of that set matters, not p itself.
"""

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import TooLargeToEnumerate
from .numtheory import factorize, is_prime

ENUM_GUARD = 24


@dataclass(frozen=True)
class MarkedTriple:
    g: tuple
    p: int
    I: frozenset

    def __post_init__(self):
        object.__setattr__(self, "I", frozenset(self.I))
        object.__setattr__(self, "g", tuple(self.g))


@dataclass(frozen=True)
class DivisorPattern:
    s: tuple
    t: tuple  # t[j] = (t_{j,1}, ..., t_{j,m_j-1})

    @classmethod
    def ones(cls, m):
        return cls((1,) * len(m), tuple((1,) * (mj - 1) for mj in m))

    def is_ones(self):
        return all(x == 1 for x in self.s) and all(x == 1 for row in self.t for x in row)

    def coordinates(self):
        return list(self.s) + [x for row in self.t for x in row]

    def primes(self):
        ps = set()
        for x in self.coordinates():
            ps.update(p for p, _ in factorize(x))
        return sorted(ps)

    def local(self, p):
        """(s^[p], t^[p]): each coordinate replaced by its p-part."""
        part = lambda x: p ** _val(x, p)  # noqa: E731
        return DivisorPattern(tuple(part(x) for x in self.s), tuple(tuple(part(x) for x in row) for row in self.t))

    def sizes(self, m):
        """tau_j = s_j^m_j prod_r t_{j,r}^(m_j + r), a lower bound for x_j."""
        return [self.s[j] ** mj * math.prod(tr ** (mj + r) for r, tr in enumerate(self.t[j], start=1))
                for j, mj in enumerate(m)]


def _val(x, p):
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return e


def grid(m):
    """All g with 1 <= g_j <= m_j - 1."""
    return list(itertools.product(*[range(1, mj) for mj in m]))


def positions(m):
    """Position labels ('s', j) and ('t', j, r) in a fixed order."""
    out = [("s", j) for j in range(len(m))]
    out += [("t", j, r) for j, mj in enumerate(m) for r in range(1, mj)]
    return out


def footprint(g, I, n):
    return frozenset([("s", j) for j in I] + [("t", j, g[j]) for j in range(n + 1) if j not in I])


def derive_pattern(R, m):
    """(a(R), b(R)) for a finite collection of MarkedTriple."""
    n = len(m) - 1
    s = [1] * (n + 1)
    t = [[1] * (mj - 1) for mj in m]
    seen_s, seen_t = set(), set()
    for trip in R:
        if len(trip.g) != n + 1 or any(not 1 <= gj <= mj - 1 for gj, mj in zip(trip.g, m)):
            raise ValueError(f"g={trip.g} out of range for m={m}")
        for pos in footprint(trip.g, trip.I, n):
            if pos[0] == "s":
                key = (trip.p, pos[1])
                if key not in seen_s:
                    seen_s.add(key)
                    s[pos[1]] *= trip.p
            else:
                key = (trip.p, pos[1], pos[2])
                if key not in seen_t:
                    seen_t.add(key)
                    t[pos[1]][pos[2] - 1] *= trip.p
    return DivisorPattern(tuple(s), tuple(tuple(row) for row in t))


def local_positions(pattern, p, m):
    """Set of positions where p divides the pattern, or None if some p^2 does."""
    out = set()
    for j, sj in enumerate(pattern.s):
        e = _val(sj, p)
        if e > 1:
            return None
        if e:
            out.add(("s", j))
    for j, row in enumerate(pattern.t):
        for r, tr in enumerate(row, start=1):
            e = _val(tr, p)
            if e > 1:
                return None
            if e:
                out.add(("t", j, r))
    return frozenset(out)


def restricted_universe(T, m):
    """Triples (g, I) at one prime whose footprint lies inside T."""
    n = len(m) - 1
    out = []
    for g in grid(m):
        for k in range(n + 2):
            for I in itertools.combinations(range(n + 1), k):
                fp = footprint(g, I, n)
                if fp <= T:
                    out.append((g, frozenset(I), fp))
    return out


def _omega_bruteforce(T, m):
    universe = restricted_universe(T, m)
    if len(universe) > ENUM_GUARD:
        raise TooLargeToEnumerate(f"{len(universe)} triples > {ENUM_GUARD}")
    pos = sorted(T)
    bit = {q: 1 << i for i, q in enumerate(pos)}
    target = (1 << len(pos)) - 1
    fps = np.array([sum(bit[q] for q in e[2]) for e in universe], dtype=np.int64)
    total = 0
    size = len(universe)
    masks = np.arange(1, 1 << size, dtype=np.int64)
    acc = np.zeros(masks.shape, dtype=np.int64)
    parity = np.zeros(masks.shape, dtype=np.int64)
    for i in range(size):
        on = (masks >> i) & 1
        acc |= on * fps[i]
        parity ^= on
    hit = acc == target
    total = int(np.count_nonzero(hit & (parity == 0))) - int(np.count_nonzero(hit & (parity == 1)))
    return total


def _omega_dp(T, m):
    """Signed subset count aggregated by footprint: one pass per triple."""
    universe = restricted_universe(T, m)
    pos = sorted(T)
    bit = {q: 1 << i for i, q in enumerate(pos)}
    dp = {0: 1}
    for e in universe:
        f = sum(bit[q] for q in e[2])
        new = dict(dp)
        for mask, val in dp.items():
            key = mask | f
            new[key] = new.get(key, 0) - val
        dp = new
    total = dp.get((1 << len(pos)) - 1, 0)
    if not T:
        total -= 1  # drop the empty collection
    return total


def _covers(S, m):
    """Some triple has footprint inside S iff every block j is touched by S."""
    for j, mj in enumerate(m):
        if ("s", j) in S:
            continue
        if not any(("t", j, r) in S for r in range(1, mj)):
            return False
    return True


def _omega_inversion(T, m):
    T = sorted(T)
    total = 0
    for k in range(len(T) + 1):
        for S in itertools.combinations(T, k):
            if not _covers(set(S), m):
                total += (-1) ** (len(T) - k)
    if not T:
        total -= 1
    return total


@lru_cache(maxsize=None)
def omega_positions(T, m, method="auto"):
    """Local varpi for a position set T (frozenset) and exponents m."""
    m = tuple(m)
    if method == "bruteforce":
        return _omega_bruteforce(T, m)
    if method == "dp":
        return _omega_dp(T, m)
    if method == "inversion":
        return _omega_inversion(T, m)
    if method == "auto":
        if len(restricted_universe(T, m)) <= 16:
            return _omega_bruteforce(T, m)
        return _omega_inversion(T, m)
    raise ValueError(f"unknown method {method!r}")


def omega_local(pattern, p, m, method="auto"):
    """varpi(s^[p], t^[p]) by the definition at a single prime."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    T = local_positions(pattern, p, m)
    if T is None:
        return 0
    return omega_positions(T, tuple(m), method)


def omega(pattern, m, ones_value=1, method="auto"):
    """varpi(s, t) as the product of its local factors.

    ``ones_value`` is what the all-ones pattern returns: the definition
    gives 0 (it sums over nonempty collections only), while the
    leading-constant assembly uses 1.
    """
    if pattern.is_ones():
        return ones_value
    out = 1
    for p in pattern.primes():
        out *= omega_local(pattern, p, m, method)
        if out == 0:
            return 0
    return out


def omega_direct(pattern, m):
    """Definition-level varpi over all primes at once (no factorisation into locals).

    Collections range over triples at every prime dividing the pattern;
    the signed count is aggregated by the joint footprint.
    """
    n = len(m) - 1
    target = set()
    for p in pattern.primes():
        T = local_positions(pattern, p, m)
        if T is None:
            return 0
        target |= {(p,) + q for q in T}
    universe = []
    for p in pattern.primes():
        T = local_positions(pattern, p, m)
        for g, I, fp in restricted_universe(T, m):
            universe.append(frozenset((p,) + q for q in fp))
    pos = sorted(target)
    bit = {q: 1 << i for i, q in enumerate(pos)}
    dp = {0: 1}
    for fp in universe:
        f = sum(bit[q] for q in fp)
        new = dict(dp)
        for mask, val in dp.items():
            new[mask | f] = new.get(mask | f, 0) - val
        dp = new
    total = dp.get((1 << len(pos)) - 1, 0)
    return total - 1 if not pos else total


def local_patterns(m):
    """Every position set at one prime (all subsets of the positions)."""
    pos = positions(m)
    for k in range(len(pos) + 1):
        for S in itertools.combinations(pos, k):
            yield frozenset(S)


def pattern_from_positions(T, p, m):
    s = [p if ("s", j) in T else 1 for j in range(len(m))]
    t = [tuple(p if ("t", j, r) in T else 1 for r in range(1, mj)) for j, mj in enumerate(m)]
    return DivisorPattern(tuple(s), tuple(t))


def combine(patterns):
    """Coordinatewise product of patterns."""
    patterns = list(patterns)
    s = tuple(math.prod(pt.s[j] for pt in patterns) for j in range(len(patterns[0].s)))
    t = tuple(tuple(math.prod(pt.t[j][r] for pt in patterns) for r in range(len(patterns[0].t[j])))
              for j in range(len(patterns[0].t)))
    return DivisorPattern(s, t)


def omega_bound(m, method="auto"):
    """max |local varpi| over every position set for exponents m."""
    return max(abs(omega_positions(T, tuple(m), method)) for T in local_patterns(m))


def nonzero_local_shapes(m):
    """Position sets with nonzero local varpi, with their values."""
    return [(T, w) for T in local_patterns(m) if (w := omega_positions(T, tuple(m))) != 0]
