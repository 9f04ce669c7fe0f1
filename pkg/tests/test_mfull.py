import math

import pytest
from hypothesis import given, strategies as st

from orbifold.errors import IntegerOverflow, InvariantViolation, NotMFull, ZeroInput
from orbifold.mfull import MFullDecomposition, compose, decompose, enumerate_decomposed, enumerate_mfull, is_mfull
from orbifold.numtheory import factorize


def brute_mfull(B, m):
    return [x for x in range(1, B + 1) if all(e >= m for _, e in factorize(x))]


def test_powerful_up_to_50():
    assert enumerate_mfull(50, 2) == [1, 4, 8, 9, 16, 25, 27, 32, 36, 49]


@pytest.mark.parametrize("B,m", [(10**4, 2), (10**4, 3), (5000, 4), (3000, 5)])
def test_enumeration_matches_brute_force(B, m):
    assert enumerate_mfull(B, m) == brute_mfull(B, m)


def test_cube_full_count_1e6():
    assert len(enumerate_mfull(10**6, 3)) == 307


def test_decompose_examples():
    assert decompose(72, 2) == MFullDecomposition(1, 2, 3, (2,))
    d = decompose(-108, 2)
    assert (d.sign, d.u, d.v) == (-1, 3, (2,)) or (d.sign, d.u, d.v) == (-1, 2, (3,))
    assert compose(d) == -108
    assert decompose(1, 3) == MFullDecomposition(1, 3, 1, (1, 1))


def test_decompose_errors():
    with pytest.raises(ZeroInput):
        decompose(0, 2)
    with pytest.raises(NotMFull):
        decompose(12, 2)
    with pytest.raises(ZeroInput):
        is_mfull(0, 2)


def test_compose_invariants():
    with pytest.raises(InvariantViolation):
        compose(MFullDecomposition(1, 2, 1, (4,)))
    with pytest.raises(InvariantViolation):
        compose(MFullDecomposition(1, 3, 1, (2, 6)))
    with pytest.raises(InvariantViolation):
        compose(MFullDecomposition(2, 2, 1, (1,)))
    with pytest.raises(IntegerOverflow):
        compose(MFullDecomposition(1, 2, 2**32, (1,)))


@given(st.integers(min_value=1, max_value=1500), st.integers(min_value=2, max_value=5),
       st.sampled_from([1, -1]))
def test_round_trip(base, m, sign):
    # base^m times a cube-ish factor is always m-full
    x = sign * base**m * (2 ** (m + 1))
    d = decompose(x, m)
    assert compose(d) == x
    assert all(math.gcd(a, b) == 1 for i, a in enumerate(d.v) for b in d.v[i + 1:])


def test_enumerate_decomposed_sorted_and_consistent():
    ds = enumerate_decomposed(5000, 3)
    vals = [d.value() for d in ds]
    assert vals == sorted(vals)
    assert all(decompose(x, 3) == d for x, d in zip(vals, ds))


def test_powerful_density_trend():
    # counts / sqrt(B) approach zeta(3/2)/zeta(3) ~ 2.173 from below
    ratios = [len(enumerate_mfull(B, 2)) / math.sqrt(B) for B in (10**4, 10**5, 10**6)]
    assert ratios == sorted(ratios)
    assert 1.8 < ratios[0] < ratios[-1] < 2.173
