import random

import numpy as np
import pytest
from gmpy2 import mpq

from config.settings import CATALOGUE_LEVELS
from src.eigenforms import load_eigenform
from src.errors import ShapeError
from src.exponents import (ExponentSeries, eigenform_from_exponents, exponent_rows,
                           exponents_from_eigenform, exponents_from_series, prime_exponent,
                           prime_exponents)
from src.qseries import PowerSeries, expand_product


def test_level_11_first_exponents(form11):
    c = exponents_from_eigenform(form11, 4)
    assert [c[n] for n in range(1, 5)] == [-1, mpq(3, 2), mpq(2, 3), -1]
    assert list(exponent_rows(c)) == [(1, -1, 1), (2, 3, 2), (3, 2, 3), (4, -1, 1)]


def test_first_exponent_is_minus_one():
    for key in CATALOGUE_LEVELS:
        c = exponents_from_eigenform(load_eigenform(key, 1, backend="eta"))
        assert c.limit == 1 and c[1] == -1


def test_inverse_transform():
    c = ExponentSeries.from_list(11, [-1, mpq(3, 2), mpq(2, 3), -1])
    assert eigenform_from_exponents(c) == [1, -2, -1, 2]


@pytest.mark.parametrize("key", CATALOGUE_LEVELS)
def test_mobius_round_trip(key):
    M = 10000
    g = load_eigenform(key, M, backend="eta", crosscheck_limit=200)
    assert eigenform_from_exponents(exponents_from_eigenform(g)) == g.as_list()


def test_weighted_exponents_are_integral(form14):
    assert exponents_from_eigenform(form14, 500).weighted_integral()


def test_prime_exponent():
    assert prime_exponent(-2, 2) == mpq(3, 2)
    assert prime_exponent(1, 5) == 0
    assert prime_exponent(0, 7) == mpq(1, 7)


def test_prime_view(form11):
    view = prime_exponents(form11, 100)
    assert 11 not in view.primes.tolist()
    assert view.c(2) == mpq(3, 2)
    assert view.c(5) == 0
    assert view.signs(7).tolist() == [1, 1, 0, 1]
    with pytest.raises(ShapeError):
        view.c(11)
    with pytest.raises(ShapeError):
        view.restrict(1000)


def test_exponents_from_series(form11):
    c = exponents_from_eigenform(form11, 60)
    recovered = exponents_from_series(expand_product(c, 60), level=11)
    assert recovered.values == c.values
    with pytest.raises(ShapeError):
        exponents_from_series(PowerSeries([2, 1]))


def test_exponent_bounds():
    c = ExponentSeries.from_list(1, [1, 2])
    with pytest.raises(ShapeError):
        c[3]
    with pytest.raises(ShapeError):
        c.truncate(5)
    assert c.truncate(1).values == [0, 1]


def test_exponents_recovered_from_random_products():
    rng = random.Random(11)
    for _ in range(3):
        values = [mpq(rng.randint(-5, 5), rng.randint(1, 6)) for _ in range(200)]
        c = ExponentSeries.from_list(1, values)
        assert exponents_from_series(expand_product(c, 200)).values == c.values


def test_sign_flip_at_primes(catalogue_forms):
    for g in catalogue_forms.values():
        view = prime_exponents(g, 10000)
        _, bp = view.restrict(10000)
        signs = view.signs()
        flip = (bp != 0) & (bp != 1)
        assert (signs[flip] == -np.sign(bp[flip])).all()
        assert (signs[bp == 0] == 1).all()
        assert (signs[bp == 1] == 0).all()
