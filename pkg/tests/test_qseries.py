import random

import pytest
from gmpy2 import mpq

from src.errors import NonUnitError, ShapeError, UnsupportedQuotientError
from src.exponents import ExponentSeries, exponents_from_eigenform
from src.qseries import (EtaQuotient, PowerSeries, eta_coefficients, eta_expand, expand_product,
                         expand_product_binomial, invert, log_deriv, mul)


def test_mul_and_invert():
    a = PowerSeries([1, -1, 0, 0, 0])
    inv = invert(a)
    assert inv == PowerSeries([1, 1, 1, 1, 1])
    assert mul(a, inv) == PowerSeries.one(4)
    half = PowerSeries([2, 1, 0])
    assert invert(half).coeffs == [mpq(1, 2), mpq(-1, 4), mpq(1, 8)]


def test_invert_non_unit():
    with pytest.raises(NonUnitError):
        invert(PowerSeries([0, 1, 2]))
    with pytest.raises(NonUnitError):
        log_deriv(PowerSeries([0, 1]))


def test_order_mismatch():
    with pytest.raises(ShapeError):
        PowerSeries([1, 2]) + PowerSeries([1, 2, 3])
    with pytest.raises(ShapeError):
        mul(PowerSeries([1]), PowerSeries([1, 1]))


def test_scalar_arithmetic():
    a = PowerSeries([1, 2, 3])
    assert (a * mpq(1, 2)).coeffs == [mpq(1, 2), 1, mpq(3, 2)]
    assert a - a == PowerSeries([0, 0, 0])
    assert (-a)[2] == -3


def test_log_deriv_of_geometric():
    # q·d/dq log(1/(1-q)) = ∑ q^n
    a = PowerSeries([1] * 8)
    assert log_deriv(a) == PowerSeries([0] + [1] * 7)


def test_expand_single_factor():
    c = ExponentSeries.from_list(1, [-1, 0, 0, 0, 0])
    assert expand_product(c, 5) == PowerSeries([1] * 6)
    c = ExponentSeries.from_list(1, [mpq(1, 2), 0, 0, 0])
    # (1-q)^{1/2} = 1 - q/2 - q^2/8 - q^3/16 - ...
    assert expand_product(c, 3).coeffs == [1, mpq(-1, 2), mpq(-1, 8), mpq(-1, 16)]


def test_expand_matches_binomial():
    c = ExponentSeries.from_list(1, [mpq(3, 2), -2, mpq(1, 3), 0, 5, mpq(-7, 4), 1, 0, mpq(2, 5), -1])
    assert expand_product(c, 10) == expand_product_binomial(c, 10)


def test_expand_requires_enough_exponents():
    c = ExponentSeries.from_list(1, [1, 1, 1])
    with pytest.raises(ShapeError):
        expand_product(c, 5)
    c.c0 = mpq(2)
    with pytest.raises(ShapeError):
        expand_product(c, 2)


def test_eta_quotient_validation():
    e = EtaQuotient(((1, 2), (11, 2)))
    assert e.h == 1 and e.weight == 2
    with pytest.raises(UnsupportedQuotientError):
        EtaQuotient(((0, 1),))
    with pytest.raises(UnsupportedQuotientError):
        EtaQuotient(((2, 1), (2, 3)))
    with pytest.raises(UnsupportedQuotientError):
        eta_coefficients(EtaQuotient(((1, 1),)), 10)


def test_eta_level_11():
    coeffs = eta_coefficients(EtaQuotient(((1, 2), (11, 2))), 10)
    assert coeffs.tolist() == [0, 1, -2, -1, 2, 1, 2, -2, 0, -2, -2]


def test_eta_negative_power_gives_partitions():
    # q·η(25z)/η(z) 在 q^25 之前的系数是分拆数
    coeffs = eta_coefficients(EtaQuotient(((1, -1), (25, 1))), 10)
    assert coeffs.tolist() == [0, 1, 1, 2, 3, 5, 7, 11, 15, 22, 30]


def test_eta_expand_is_exact_series():
    series = eta_expand(EtaQuotient(((6, 4),)), 13)
    assert series[7] == -4 and series[13] == 2
    assert series.is_integral()


def test_log_deriv_recovers_eigenform(form11, form14):
    M = 300
    for g in (form11, form14):
        c = exponents_from_eigenform(g, M)
        assert log_deriv(expand_product(c, M)) == PowerSeries([0] + g.as_list()[:M])


@pytest.mark.slow
def test_product_derivative_identity_order_2000(form11, form14):
    # q·f' = g·f，与 log_deriv 等价但不需要求逆
    M = 2000
    for g in (form11, form14):
        f = expand_product(exponents_from_eigenform(g, M), M)
        q_derivative = PowerSeries(n * a for n, a in enumerate(f.coeffs))
        assert q_derivative == mul(PowerSeries([0] + g.as_list()[:M]), f)


def test_product_derivative_identity(form11, form14):
    M = 500
    for g in (form11, form14):
        f = expand_product(exponents_from_eigenform(g, M), M)
        q_derivative = PowerSeries(n * a for n, a in enumerate(f.coeffs))
        assert q_derivative == mul(PowerSeries([0] + g.as_list()[:M]), f)


def test_invert_is_two_sided():
    rng = random.Random(20240101)
    for _ in range(100):
        a = PowerSeries([rng.choice((1, -1))] + [rng.randint(-3, 3) for _ in range(200)])
        inv = invert(a)
        assert mul(a, inv) == PowerSeries.one(200)
        assert mul(inv, a) == PowerSeries.one(200)
