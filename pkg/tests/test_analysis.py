import math

import numpy as np
import pytest
from gmpy2 import mpq

from src.analysis import (boundary_band_count, cm_value_scan, distinct_values_count,
                          first_sign_change, integrality_scan, n0_expression, normalize_bp,
                          pair_joint_histogram, pair_quadrants, pair_sign_density,
                          product_integrality, sign_density, st_histogram, st_measure)
from src.eigenforms import Eigenform
from src.errors import (ArithmeticDomainError, CMFormError, DegeneratePairError, IntegrityError,
                        NotCMError)
from src.exponents import ExponentSeries, exponents_from_eigenform, prime_exponents
from src.report_writer import dumps_json

XMAX = 100000


def test_st_measure():
    assert st_measure(-1, 1) == pytest.approx(1.0, abs=1e-12)
    assert st_measure(0, 1) == pytest.approx(0.5, abs=1e-12)
    assert st_measure(0, 0.1) == pytest.approx(0.06356, abs=1e-4)
    assert st_measure(0.3, 0.3) == 0
    with pytest.raises(ArithmeticDomainError):
        st_measure(-1.5, 0)


def test_normalize_bp():
    assert normalize_bp(4, 4) == 1.0
    assert normalize_bp(-2, 2) == pytest.approx(-1 / math.sqrt(2))
    with pytest.raises(IntegrityError):
        normalize_bp(3, 2)


def test_sato_tate_level_11(form11):
    report = st_histogram(form11, XMAX, 20)
    assert len(report.bins) == 20
    assert sum(b['count'] for b in report.bins) == report.prime_count == 9591
    assert report.discrepancy < 0.05
    assert report.checks == {'discrepancy_within_tol': True}
    assert '"discrepancy"' in dumps_json(report.to_dict())


def test_sato_tate_single_bin(form11):
    report = st_histogram(form11, 1000, 1)
    assert report.bins[0]['empirical'] == 1.0
    assert report.bins[0]['sato_tate'] == pytest.approx(1.0)
    assert report.discrepancy == pytest.approx(0.0, abs=1e-12)


def test_sato_tate_refuses_cm(form36):
    with pytest.raises(CMFormError):
        st_histogram(form36, 1000, 20)


def test_sign_density_level_11(form11):
    report = sign_density(prime_exponents(form11, XMAX), XMAX)
    assert report.pi_x == 9592
    assert report.excluded_primes == [11]
    r = report.ratios
    assert abs(r['positive'] - 0.5) < 0.02
    assert abs(r['negative'] - 0.5) < 0.02
    assert r['zero'] < 0.01
    assert all(report.checks.values())
    assert report.counts['positive'] + report.counts['negative'] + report.counts['zero'] == 9591
    assert report.estimate == "natural density estimate"
    assert [row['x'] for row in report.checkpoints] == [100, 1000, 10000, 100000]


def test_sign_density_small_range(form11):
    report = sign_density(prime_exponents(form11, 7), 7)
    assert report.counts == {'positive': 3, 'negative': 0, 'zero': 1,
                             'nonnegative': 4, 'nonpositive': 1}
    assert report.pi_x == 4


def test_sign_density_cm_is_informational(form36):
    report = sign_density(prime_exponents(form36, 10000), 10000)
    assert report.checks == {}
    assert any("CM" in note for note in report.notes)
    assert report.excluded_primes == [2, 3]


def test_pair_11_14(form11, form14):
    v1, v2 = prime_exponents(form11, XMAX), prime_exponents(form14, XMAX)
    report = pair_sign_density(v1, v2, XMAX)
    assert report.excluded_primes == [2, 7, 11]
    assert abs(report.ratios['negative'] - 0.5) < 0.03
    assert abs(report.ratios['positive'] - 0.5) < 0.03
    assert report.extra['disagreement_ratio'] > 6 / 25
    quadrants = pair_quadrants(v1, v2, XMAX)
    assert len(quadrants.quadrants) == 4
    assert all(abs(q['empirical'] - 0.25) < 0.05 for q in quadrants.quadrants)


def test_pair_refusals(form11, form36):
    v = prime_exponents(form11, 1000)
    with pytest.raises(DegeneratePairError):
        pair_sign_density(v, v, 1000)
    with pytest.raises(CMFormError):
        pair_sign_density(v, prime_exponents(form36, 1000), 1000)


def test_joint_histogram(form11, form14):
    v1, v2 = prime_exponents(form11, 10000), prime_exponents(form14, 10000)
    report = pair_joint_histogram(v1, v2, 10000, (-1, 1), (-1, 1))
    assert report.product == pytest.approx(1.0)
    assert report.count == report.pi_x - 3
    with pytest.raises(ArithmeticDomainError):
        pair_joint_histogram(v1, v2, 10000, (0.5, 0.2), (0, 1))


def test_band_count(form11):
    report = boundary_band_count(form11, 1000)
    g = form11
    expected = [p for p in range(2, 1001) if p != 11 and all(p % d for d in range(2, int(p ** 0.5) + 1))
                and g.b(p) == 0]
    assert report.first_primes == expected[:20]
    assert report.count == len(expected)
    assert 19 in report.first_primes


def test_cm_scan_level_36(form36):
    report = cm_value_scan(form36, XMAX)
    assert abs(report.vanishing_ratio - 0.5) < 0.02
    assert all(c == mpq(1, p) for p, c in report.entries)
    assert all(p % 3 == 2 for p, _ in report.entries)
    assert report.checks['vanishing_near_half']


def test_cm_scan_refuses_non_cm(form11):
    with pytest.raises(NotCMError):
        cm_value_scan(form11, 1000)


def test_distinct_values(form11):
    report = distinct_values_count(prime_exponents(form11, 1000), 1000)
    assert report.positive_count + report.negative_count + report.zero_count == 167
    assert report.distinct_positive <= report.positive_count
    # c(p) = (1-b(p))/p 为非零整数只可能在 p <= 5
    assert report.integral_positive + report.integral_negative <= 3


def test_integrality_level_11(form11):
    c = exponents_from_eigenform(form11, 10000)
    report = integrality_scan(c)
    assert (1, -1) in report.integral_exponents
    assert (4, -1) in report.integral_exponents
    assert report.growth_violations == []
    assert report.weighted_integral
    assert all(report.checks.values())


def test_integrality_rejects_impossible_exponent():
    # 257 为素数，4·σ0(257)^6 = 256 < 257
    values = [0] * 300
    values[0] = -1
    values[256] = 1
    with pytest.raises(IntegrityError):
        integrality_scan(ExponentSeries.from_list(1, values))


def test_first_sign_change_level_11(form11):
    report = first_sign_change(exponents_from_eigenform(form11, 1000))
    assert report.d1 == 2 and report.d2 == 1
    assert report.d0 == 2
    assert report.first_negative_b == 2
    assert report.bound_38 == pytest.approx(4.13, abs=0.01)
    assert report.psi2 == pytest.approx(1.2891, abs=1e-4)
    assert report.n0 == pytest.approx(n0_expression(11))
    assert report.conclusive and report.squarefree_level
    assert report.checks == {'d1_within_bound_38': True, 'd0_le_first_negative_b': True}


def test_first_sign_change_non_squarefree():
    g = Eigenform(level=20, coeffs=np.array([0, 1, 0, -2, 0, -1, 0, 2]))
    report = first_sign_change(exponents_from_eigenform(g))
    assert not report.squarefree_level
    assert report.notes


def test_product_level_11(form11):
    report, series = product_integrality(exponents_from_eigenform(form11, 20), 20)
    assert series[1] == 1 and series[2] == mpq(-1, 2)
    assert report.first_non_integral == 2
    assert not report.all_integral


def test_product_of_integer_exponents_is_integral():
    c = ExponentSeries.from_list(1, [-1, 2, 0, -3, 1])
    report, series = product_integrality(c, 5)
    assert report.all_integral and series.is_integral()


NON_CM = ["11", "14", "15", "20", "24"]


def test_st_measure_additive():
    points = [-1.0, -0.7, -0.25, 0.0, 0.1, 0.55, 0.9, 1.0]
    for a, b, c in zip(points, points[1:], points[2:]):
        assert st_measure(a, b) + st_measure(b, c) == pytest.approx(st_measure(a, c), abs=1e-12)
    assert sum(st_measure(a, b) for a, b in zip(points, points[1:])) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("key", NON_CM)
def test_sign_density_non_cm_catalogue(catalogue_forms, key):
    report = sign_density(prime_exponents(catalogue_forms[key], XMAX), XMAX)
    assert abs(report.ratios['positive'] - 0.5) < 0.02
    assert abs(report.ratios['negative'] - 0.5) < 0.02
    assert report.ratios['zero'] < 0.01


def test_opposite_sign_count(form11):
    view = prime_exponents(form11, XMAX)
    _, bp = view.restrict(XMAX)
    report = sign_density(view, XMAX)
    assert report.extra['opposite_sign'] == int(np.count_nonzero((bp != 0) & (bp != 1)))


@pytest.mark.parametrize("key", NON_CM)
def test_first_sign_change_non_cm_catalogue(catalogue_forms, key):
    report = first_sign_change(exponents_from_eigenform(catalogue_forms[key], 1000))
    assert report.conclusive
    assert report.d1 is not None and report.d2 == 1
    assert report.checks['d0_le_first_negative_b']


@pytest.mark.parametrize("key,d0", [("14", 3), ("24", 5)])
def test_first_negative_b_skips_bad_primes(catalogue_forms, key, d0):
    report = first_sign_change(exponents_from_eigenform(catalogue_forms[key], 1000))
    assert report.d0 == d0
    assert report.first_negative_b == d0
    assert math.gcd(report.first_negative_b, int(key)) == 1
    assert all(report.checks.values())


def test_level_14_bound_38(form14):
    report = first_sign_change(exponents_from_eigenform(form14, 500))
    assert report.bound_38 == pytest.approx(4.52, abs=0.01)
    assert report.d1 == 2


def test_band_ratio_shrinks(form11):
    assert boundary_band_count(form11, XMAX).ratio < boundary_band_count(form11, 1000).ratio
    assert boundary_band_count(form11, 2).count == 0


def test_band_for_cm_form(form36):
    assert abs(boundary_band_count(form36, XMAX).ratio - 0.5) < 0.02


def test_cm_scan_checks_exponent_pipeline(form36, monkeypatch):
    import src.analysis as analysis

    real = analysis.exponents_from_eigenform

    def corrupted(g, M=None):
        c = real(g, M)
        c.values[5] = mpq(2, 5)
        return c

    monkeypatch.setattr(analysis, "exponents_from_eigenform", corrupted)
    with pytest.raises(IntegrityError):
        cm_value_scan(form36, 1000)
