import itertools
import math

import mpmath
import pytest

from orbifold.counting import count_campana, representation_table
from orbifold.integral import singular_integral_numeric
from orbifold.singular import (ProblemInstance, gamma_ratio, leading_constant, predict, series_tail_bound,
                               singular_series_euler, singular_series_qsum, waring_main_term)


def five_squares(N):
    return ProblemInstance(m=(2,) * 5, c=(1,) * 5, N=N, B=max(N, 1))


def test_instance_sorting_and_validation():
    inst = ProblemInstance(m=(3, 2, 4), c=(5, 6, 7), gamma=(1, 2, 3), H=5, h=(1, 2, 3))
    assert inst.m == (2, 3, 4)
    assert inst.c == (6, 5, 7)
    assert inst.gamma == (2, 1, 3)
    assert inst.h == (2, 1, 3)
    assert abs(inst.gamma_exponent() - (1 / 2 + 1 / 3 + 1 / 4 - 1)) < 1e-15
    for bad in (dict(m=(1, 2), c=(1, 1)), dict(m=(2, 2), c=(0, 1)), dict(m=(2, 2), c=(1, 1), H=2, h=(0, 2))):
        with pytest.raises(ValueError):
            ProblemInstance(**bad)


def test_qsum_first_term():
    assert singular_series_qsum(five_squares(3), 1).value == 1.0
    assert singular_series_qsum(ProblemInstance(m=(3, 3, 4), c=(2, -1, 5), N=7), 1).value == 1.0


def test_qsum_is_real():
    for N in (3, 10, 17):
        assert abs(singular_series_qsum(five_squares(N), 300).imag) < 1e-9
    inst = ProblemInstance(m=(2, 3, 3, 4), c=(3, -1, 2, 5), gamma=(1, 2, 1, 1), H=3, h=(1, 0, 2, 1), N=11)
    assert abs(singular_series_qsum(inst, 200).imag) < 1e-9


def test_five_squares_methods_agree():
    a = singular_series_qsum(five_squares(3), 200)
    b = singular_series_euler(five_squares(3), 100)
    assert math.isinf(a.tail_bound)  # sum of 1/m is 5/2 < 3
    assert abs(a.value - b.value) < 5e-4
    assert b.value > 0


def test_euler_empty_range():
    assert singular_series_euler(five_squares(5), 1).value == 1.0


def test_two_squares_local_obstruction():
    inst = ProblemInstance(m=(2, 2), c=(1, 1), N=3, B=3)
    assert singular_series_euler(inst, 2).value == 0.0
    assert abs(singular_series_qsum(inst, 800).value) < 0.05


def test_tail_bound_finite_iff_convergent():
    assert math.isinf(series_tail_bound(ProblemInstance(m=(2,) * 6, c=(1,) * 6), 100))
    seven = ProblemInstance(m=(2,) * 7, c=(1,) * 7)
    assert 0 < series_tail_bound(seven, 100) < series_tail_bound(seven, 10)


def test_qsum_and_euler_within_tails_seven_variables():
    inst = ProblemInstance(m=(2,) * 7, c=(1, 2, -1, 3, 1, 1, 2), gamma=(1, 2, 1, 1, 3, 1, 1), N=5, B=5)
    a = singular_series_qsum(inst, 500)
    b = singular_series_euler(inst, 100)
    assert abs(a.value - b.value) <= a.tail_bound + b.tail_bound
    assert abs(a.value - b.value) < 1e-3


def test_gamma_ratio():
    assert abs(gamma_ratio((2, 2, 2, 2)) - float(mpmath.pi**2 / 16)) < 1e-12
    ref = mpmath.gamma(1.5) * mpmath.gamma(mpmath.mpf(4) / 3) / mpmath.gamma(mpmath.mpf(5) / 6)
    assert abs(gamma_ratio((2, 3)) - float(ref)) < 1e-12
    with pytest.raises(ValueError):
        gamma_ratio((1, 2))


def test_waring_main_term_structure():
    pred = waring_main_term(10**4, (2,) * 5, Q=1)
    assert pred.exponent == 1.5
    assert pred.main_term == pytest.approx(gamma_ratio((2,) * 5) * 10**6, rel=1e-12)


def test_waring_prediction_against_counts():
    table = representation_table(10**4, 10**4 + 100, (2,) * 5)
    ratios = [table[N] / waring_main_term(N, (2,) * 5).main_term for N in table]
    assert 0.85 <= sum(ratios) / len(ratios) <= 1.15


def test_prediction_scaling():
    inst = ProblemInstance(m=(2, 2, 3), c=(1, 1, -1), N=0, B=1000)
    pred = predict(inst, Q=50)
    assert pred.main_term_at(2000) / pred.main_term_at(1000) == pytest.approx(2**pred.exponent, rel=1e-14)
    assert pred.main_term == pytest.approx(pred.main_term_at(1000), rel=1e-14)


def test_leading_constant_structure():
    c, m = (1, 1, -1), (2, 2, 2)
    lc = leading_constant(c, m, V=1, p_max=1)
    half_sum = 0.5 * sum(float(singular_integral_numeric(tuple(e * x for e, x in zip(eps, c)), m, 0.0))
                         for eps in itertools.product((1, -1), repeat=3))
    assert lc.value == pytest.approx(half_sum, rel=1e-12)


def test_leading_constant_lower_bound_regime():
    # growth of N(B) / (c B^(1/2)) for the Pythagorean-type orbifold is not bounded
    lc = leading_constant((1, 1, -1), (2, 2, 2), V=1, p_max=1)
    ratios = [count_campana((1, 1), (2, 2, 2), B).count / (lc.value * B**0.5) for B in (10**3, 10**4, 10**5)]
    assert ratios == sorted(ratios)


@pytest.mark.slow
def test_leading_constant_v_tail_consistency():
    c = (1,) * 6 + (-1,)
    small = leading_constant(c, (2,) * 7, V=1, p_max=3)
    large = leading_constant(c, (2,) * 7, V=8, p_max=3)
    assert large.v_count > small.v_count
    assert abs(large.value - small.value) <= small.v_tail


def test_leading_constant_rejects_bad_sign():
    with pytest.raises(ValueError):
        leading_constant((1, 1, 1), (2, 2, 2), V=1, p_max=1)
