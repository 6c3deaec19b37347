import math
import random

import numpy as np
import pytest

from src.arith_core import (mobius, mobius_values, psi2, shared_table, sieve_primes, sigma0,
                            sigma0_values)
from src.errors import ArithmeticDomainError, EmptyRangeError


def test_sieve_small():
    table = sieve_primes(30)
    assert list(table) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert table.pi(30) == 10
    assert table.pi(1) == 0
    assert 29 in table and 27 not in table


def test_sieve_counts():
    assert len(sieve_primes(2)) == 1
    assert len(sieve_primes(100000)) == 9592
    primes = sieve_primes(10000).primes
    assert np.all(np.diff(primes) > 0)


def test_sieve_empty_range():
    with pytest.raises(EmptyRangeError):
        sieve_primes(1)
    with pytest.raises(ArithmeticDomainError):
        sieve_primes(0)


def test_factorize():
    table = shared_table(1000)
    assert table.factorize(360) == [(2, 3), (3, 2), (5, 1)]
    assert table.factorize(1) == []
    assert table.factorize(997) == [(997, 1)]


def test_mobius_and_sigma0():
    assert [mobius(n) for n in range(1, 13)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]
    assert [sigma0(n) for n in range(1, 13)] == [1, 2, 2, 3, 2, 4, 2, 4, 3, 4, 2, 6]
    with pytest.raises(ArithmeticDomainError):
        mobius(0)
    with pytest.raises(ArithmeticDomainError):
        sigma0(-3)


def test_vectorized_tables_agree():
    M = 2000
    mu = mobius_values(M)
    d = sigma0_values(M)
    assert mu[0] == 0 and d[0] == 0
    assert all(int(mu[n]) == mobius(n) for n in range(1, M + 1))
    assert all(int(d[n]) == sigma0(n) for n in range(1, M + 1))


def test_mobius_sums_to_zero():
    mu = mobius_values(500)
    for n in range(2, 501):
        assert sum(int(mu[k]) for k in range(1, n + 1) if n % k == 0) == 0


def test_psi2():
    assert psi2(1) == 1.0
    assert psi2(11) == pytest.approx(math.log(22) / math.log(11))
    assert psi2(11) == pytest.approx(1.2891, abs=1e-4)
    assert psi2(14) == pytest.approx(math.log(28) ** 2 / (math.log(2) * math.log(7)))
    with pytest.raises(ArithmeticDomainError):
        psi2(0)


def test_sieve_prefix_stable():
    small = sieve_primes(1000)
    large = sieve_primes(100000)
    assert np.array_equal(large.primes[:len(small)], small.primes)
    assert np.array_equal(large.primes_upto(1000), small.primes)


def test_sieve_one_million():
    assert len(sieve_primes(10 ** 6)) == 78498


def test_sigma0_multiplicative():
    rng = random.Random(7)
    checked = 0
    while checked < 500:
        m, n = rng.randint(1, 3000), rng.randint(1, 3000)
        if math.gcd(m, n) != 1:
            continue
        assert sigma0(m * n) == sigma0(m) * sigma0(n)
        checked += 1
    assert sigma0(720) == 30
