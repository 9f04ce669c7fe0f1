import itertools

import pytest

from orbifold import combinatorics as comb
from orbifold.combinatorics import DivisorPattern, MarkedTriple, derive_pattern, omega, omega_local
from orbifold.errors import TooLargeToEnumerate


def test_derive_pattern_examples():
    m = (2, 3, 2)
    assert derive_pattern([], m) == DivisorPattern.ones(m)
    full = derive_pattern([MarkedTriple((1, 2, 1), 5, {0, 1, 2})], m)
    assert full == DivisorPattern((5, 5, 5), ((1,), (1, 1), (1,)))
    none = derive_pattern([MarkedTriple((1, 2, 1), 5, set())], m)
    assert none == DivisorPattern((1, 1, 1), ((5,), (1, 5), (5,)))


def test_derive_pattern_merges_primes():
    m = (2, 2)
    R = [MarkedTriple((1, 1), 2, {0}), MarkedTriple((1, 1), 3, {0, 1}), MarkedTriple((1, 1), 2, {1})]
    assert derive_pattern(R, m) == DivisorPattern((6, 6), ((2,), (2,)))


def test_omega_local_examples():
    m = (2, 2)
    assert omega_local(DivisorPattern.ones(m), 3, m) == 0
    assert omega_local(DivisorPattern((3, 3), ((1,), (1,))), 3, m, method="bruteforce") == -1
    untouched = DivisorPattern((3, 1), ((1,), (1,)))
    assert omega_local(untouched, 3, m) == 0


def test_ones_convention_flag():
    m = (2, 2, 2)
    assert omega(DivisorPattern.ones(m), m) == 1
    assert omega(DivisorPattern.ones(m), m, ones_value=0) == 0
    assert comb.omega_direct(DivisorPattern.ones(m), m) == 0


def test_bruteforce_guard():
    m = (3, 3, 3)
    T = frozenset(comb.positions(m))
    with pytest.raises(TooLargeToEnumerate):
        comb.omega_positions(T, m, "bruteforce")


def explicit_omega(pattern, primes, m):
    """Signed count over every nonempty collection of triples at the given primes."""
    n = len(m) - 1
    universe = [MarkedTriple(g, p, I) for p in primes for g in comb.grid(m)
                for k in range(n + 2) for I in itertools.combinations(range(n + 1), k)]
    total = 0
    for size in range(1, len(universe) + 1):
        for R in itertools.combinations(universe, size):
            if derive_pattern(R, m) == pattern:
                total += (-1) ** size
    return total


@pytest.mark.parametrize("m", [(2, 2), (2, 3)])
def test_methods_agree_with_explicit_collections(m):
    # definition chased over the whole (unrestricted) universe at one prime
    for T in comb.local_patterns(m):
        pattern = comb.pattern_from_positions(T, 2, m)
        if T:
            assert comb.omega_positions(T, m, "dp") == explicit_omega(pattern, [2], m)


@pytest.mark.parametrize("m", [(2, 2), (2, 3), (3, 3), (2, 2, 2), (2, 2, 3), (2, 3, 3), (3, 3, 3)])
def test_all_methods_agree(m):
    for T in comb.local_patterns(m):
        ref = comb.omega_positions(T, m, "inversion")
        assert comb.omega_positions(T, m, "dp") == ref
        if len(comb.restricted_universe(T, m)) <= 16:
            assert comb.omega_positions(T, m, "bruteforce") == ref


def test_multiplicativity_spot_check():
    m = (2, 2)
    a = DivisorPattern((2, 2), ((1,), (1,)))
    b = DivisorPattern((1, 3), ((3,), (1,)))
    both = comb.combine([a, b])
    assert comb.omega_direct(both, m) == comb.omega_direct(a, m) * comb.omega_direct(b, m)
    assert omega(both, m) == omega_local(both, 2, m) * omega_local(both, 3, m)


def test_squarefull_coordinate_vanishes():
    m = (2, 2, 2)
    assert omega(DivisorPattern((4, 2, 2), ((1,), (1,), (1,))), m) == 0
    assert omega(DivisorPattern((2, 2, 2), ((9,), (1,), (1,))), m) == 0


def test_local_value_independent_of_prime():
    m = (2, 3)
    for T in comb.local_patterns(m):
        vals = {omega_local(comb.pattern_from_positions(T, p, m), p, m) for p in (2, 3, 5, 7)}
        assert len(vals) == 1


def test_bound_recorded():
    assert comb.omega_bound((2, 2, 2)) == 1
    assert comb.omega_bound((3, 3, 3)) == 1
