"""
统计与界的检验：Sato-Tate 直方图、符号密度、成对统计、CM 扫描、整性扫描、首次变号

所有密度都是在最大计算范围 x 处的比值，即自然密度的估计值；p | N 的素数一律排除。
"""
import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from gmpy2 import mpq

from config.settings import ANALYSIS_CONFIG
from .arith_core import mobius, psi2, shared_table, sigma0_values
from .eigenforms import Eigenform, deligne_violations
from .errors import (ArithmeticDomainError, CMFormError, DegeneratePairError, IntegrityError,
                     NotCMError, ShapeError)
from .exponents import (ExponentSeries, PrimeExponents, eigenform_from_exponents, exponents_from_eigenform,
                        prime_exponents)
from .qseries import PowerSeries, expand_product

logger = logging.getLogger(__name__)

ESTIMATE = "natural density estimate"


class _Report:
    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}


@dataclass
class SatoTateReport(_Report):
    label: str
    level: int
    xmax: int
    nbins: int
    prime_count: int
    bins: List[Dict[str, float]]
    discrepancy: float
    tolerance: float
    checks: Dict[str, bool] = field(default_factory=dict)


@dataclass
class SignDensityReport(_Report):
    kind: str                    # single | pair
    labels: List[str]
    levels: List[int]
    xmax: int
    pi_x: int
    counts: Dict[str, int]
    ratios: Dict[str, float]
    excluded_primes: List[int]
    extra: Dict[str, Any] = field(default_factory=dict)
    checkpoints: List[Dict[str, Any]] = field(default_factory=list)
    tolerances: Dict[str, float] = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    estimate: str = ESTIMATE


@dataclass
class JointHistogramReport(_Report):
    labels: List[str]
    xmax: int
    interval1: Tuple[float, float]
    interval2: Tuple[float, float]
    count: int
    pi_x: int
    empirical: float
    product: float
    estimate: str = ESTIMATE


@dataclass
class QuadrantReport(_Report):
    labels: List[str]
    xmax: int
    quadrants: List[Dict[str, Any]]
    tolerance: float
    checks: Dict[str, bool] = field(default_factory=dict)
    estimate: str = ESTIMATE


@dataclass
class BandReport(_Report):
    label: str
    level: int
    xmax: int
    count: int
    pi_x: int
    ratio: float
    first_primes: List[int]
    estimate: str = ESTIMATE


@dataclass
class CMScanReport(_Report):
    label: str
    level: int
    xmax: int
    entries: List[Tuple[int, mpq]]
    count: int
    good_prime_count: int
    vanishing_ratio: float
    tolerance: float
    checks: Dict[str, bool] = field(default_factory=dict)


@dataclass
class DistinctValuesReport(_Report):
    label: str
    level: int
    xmax: int
    positive_count: int
    negative_count: int
    zero_count: int
    distinct_positive: int
    distinct_negative: int
    integral_positive: int
    integral_negative: int


@dataclass
class IntegralityReport(_Report):
    label: str
    level: int
    limit: int
    integral_exponents: List[Tuple[int, int]]
    growth_violations: List[int]
    weighted_integral: bool
    checks: Dict[str, bool] = field(default_factory=dict)


@dataclass
class BoundReport(_Report):
    label: str
    level: int
    limit: int
    d1: Optional[int]
    d2: Optional[int]
    d0: Optional[int]
    first_negative_b: Optional[int]
    bound_38: float
    psi2: float
    n0: float
    n0_constant: float
    conclusive: bool
    squarefree_level: bool
    integral_exponents: List[Tuple[int, int]]
    checks: Dict[str, bool] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)


@dataclass
class ProductReport(_Report):
    label: str
    level: int
    order: int
    first_non_integral: Optional[int]
    all_integral: bool
    leading: List[mpq]


def _pi(x: int) -> int:
    return shared_table(max(x, 2)).pi(x) if x >= 2 else 0


def _excluded(levels: Sequence[int], xmax: int) -> List[int]:
    if xmax < 2:
        return []
    primes = shared_table(xmax).primes_upto(xmax)
    mask = np.zeros(len(primes), dtype=bool)
    for N in levels:
        mask |= (N % primes == 0)
    return [int(p) for p in primes[mask]]


def _squarefree(N: int) -> bool:
    return mobius(N) != 0


def _ratio(count: int, total: int) -> float:
    return count / total if total else 0.0


def _check_interval(interval: Tuple[float, float]):
    lo, hi = interval
    if not (-1.0 <= lo <= hi <= 1.0):
        raise ArithmeticDomainError(f"区间 [{lo}, {hi}] 不在 [-1, 1] 内")


def _st_cdf(t: float) -> float:
    return (math.asin(t) + t * math.sqrt(max(0.0, 1.0 - t * t))) / math.pi


def st_measure(a: float, b: float) -> float:
    """μ_ST([a, b])，μ_ST = (2/π)√(1-t²)dt"""
    _check_interval((a, b))
    return _st_cdf(b) - _st_cdf(a)


def normalize_bp(bp: int, p: int) -> float:
    """B(p) = b(p)/(2√p)"""
    if bp * bp > 4 * p:
        raise IntegrityError(f"|b({p})| = {abs(bp)} 超出 Deligne 界 2√p")
    return bp / (2.0 * math.sqrt(p))


def _normalized(view: PrimeExponents, xmax: int) -> np.ndarray:
    primes, bp = view.restrict(xmax)
    bad = primes[bp * bp > 4 * primes]
    if len(bad):
        raise IntegrityError(f"{view.label}: Deligne 界在 p={bad[:10].tolist()} 处不成立")
    return bp / (2.0 * np.sqrt(primes))


def st_histogram(g: Eigenform, xmax: int, nbins: int, tolerance: Optional[float] = None) -> SatoTateReport:
    """
    B(p) 在 [-1, 1] 上等宽分箱，与 μ_ST 比较

    Args:
        g: 无 CM 本征形式
        xmax: 素数上界
        nbins: 箱数

    Returns:
        SatoTateReport
    """
    if g.cm:
        raise CMFormError(f"{g.label} 有 CM，Sato-Tate 等分布不适用")
    if nbins < 1:
        raise ArithmeticDomainError(f"箱数必须 >= 1，收到 {nbins}")
    tolerance = ANALYSIS_CONFIG['tol_discrepancy'] if tolerance is None else tolerance
    B = _normalized(prime_exponents(g, xmax), xmax)
    edges = np.linspace(-1.0, 1.0, nbins + 1)
    counts, _ = np.histogram(B, bins=edges)
    total = int(counts.sum())
    bins = []
    discrepancy = 0.0
    for i in range(nbins):
        lo, hi = float(edges[i]), float(edges[i + 1])
        empirical = _ratio(int(counts[i]), total)
        expected = st_measure(lo, hi)
        discrepancy = max(discrepancy, abs(empirical - expected))
        bins.append({'lo': lo, 'hi': hi, 'count': int(counts[i]),
                     'empirical': empirical, 'sato_tate': expected})
    logger.info(f"{g.label}: Sato-Tate 直方图 x={xmax}, {nbins} 箱, 最大偏差 {discrepancy:.4f}")
    return SatoTateReport(
        label=g.label, level=g.level, xmax=xmax, nbins=nbins, prime_count=total,
        bins=bins, discrepancy=discrepancy, tolerance=tolerance,
        checks={'discrepancy_within_tol': discrepancy < tolerance},
    )


def _bucket_counts(signs: np.ndarray) -> Dict[str, int]:
    pos = int(np.count_nonzero(signs > 0))
    neg = int(np.count_nonzero(signs < 0))
    zero = int(np.count_nonzero(signs == 0))
    return {'positive': pos, 'negative': neg, 'zero': zero,
            'nonnegative': pos + zero, 'nonpositive': neg + zero}


def _checkpoints(primes: np.ndarray, signs: np.ndarray, xmax: int,
                 checkpoints: Optional[Sequence[int]]) -> List[Dict[str, Any]]:
    checkpoints = ANALYSIS_CONFIG['checkpoints'] if checkpoints is None else checkpoints
    rows = []
    for x in checkpoints:
        if x > xmax:
            break
        k = int(np.searchsorted(primes, x, side='right'))
        counts = _bucket_counts(signs[:k])
        pi_x = _pi(x)
        rows.append({'x': int(x), 'pi_x': pi_x,
                     'ratio_positive': _ratio(counts['positive'], pi_x),
                     'ratio_negative': _ratio(counts['negative'], pi_x)})
    return rows


def sign_density(view: PrimeExponents, xmax: int, tolerance: Optional[float] = None,
                 checkpoints: Optional[Sequence[int]] = None,
                 zero_ratio_max: Optional[float] = None) -> SignDensityReport:
    """
    c(p) > 0、< 0、= 0 的素数个数及其与 π(x) 的比值

    另外统计 c(p) 与 b(p) 符号恰好相反的素数（只有 b(p) ∈ {0, 1} 会破坏这一点）。
    """
    tolerance = ANALYSIS_CONFIG['tol_single'] if tolerance is None else tolerance
    zero_max = ANALYSIS_CONFIG['zero_ratio_max'] if zero_ratio_max is None else zero_ratio_max
    primes, bp = view.restrict(xmax)
    signs = np.sign(1 - bp)
    counts = _bucket_counts(signs)
    pi_x = _pi(xmax)
    ratios = {k: _ratio(v, pi_x) for k, v in counts.items()}
    opposite = int(np.count_nonzero((signs == -np.sign(bp)) & (bp != 0)))
    checks: Dict[str, bool] = {}
    notes = []
    if view.cm:
        notes.append("CM 形式：密度定理不覆盖，只记录观测值")
    else:
        checks = {
            'positive_near_half': abs(ratios['positive'] - 0.5) < tolerance,
            'negative_near_half': abs(ratios['negative'] - 0.5) < tolerance,
            'zero_ratio_small': ratios['zero'] < zero_max,
        }
    if not _squarefree(view.level):
        notes.append(f"水平 {view.level} 不是无平方因子数，密度结论的前提不满足，仅作记录")
    return SignDensityReport(
        kind='single', labels=[view.label], levels=[view.level], xmax=xmax, pi_x=pi_x,
        counts=counts, ratios=ratios, excluded_primes=_excluded([view.level], xmax),
        extra={'opposite_sign': opposite, 'opposite_sign_ratio': _ratio(opposite, pi_x)},
        checkpoints=_checkpoints(primes, signs, xmax, checkpoints),
        tolerances={'single': tolerance, 'zero_ratio_max': zero_max},
        checks=checks, notes=notes,
    )


def _common(v1: PrimeExponents, v2: PrimeExponents, xmax: int):
    if v1.cm or v2.cm:
        label = v1.label if v1.cm else v2.label
        raise CMFormError(f"{label} 有 CM，成对 Sato-Tate 统计不适用")
    p1, b1 = v1.restrict(xmax)
    p2, b2 = v2.restrict(xmax)
    primes, i1, i2 = np.intersect1d(p1, p2, assume_unique=True, return_indices=True)
    b1, b2 = b1[i1], b2[i2]
    if (v1.label and v1.label == v2.label and v1.level == v2.level) or \
            (v1.level == v2.level and np.array_equal(b1, b2)):
        raise DegeneratePairError(f"{v1.label} 与 {v2.label} 是同一个形式")
    return primes, b1, b2


def pair_sign_density(v1: PrimeExponents, v2: PrimeExponents, xmax: int,
                      tolerance: Optional[float] = None) -> SignDensityReport:
    """乘积 c1(p)·c2(p) 在 ℙ_{>0}、ℙ_{<0}、ℙ_{=0}（及 ≥0、≤0）上的计数"""
    tolerance = ANALYSIS_CONFIG['tol_pair'] if tolerance is None else tolerance
    kappa = ANALYSIS_CONFIG['kappa_threshold']
    primes, b1, b2 = _common(v1, v2, xmax)
    s1, s2 = np.sign(1 - b1), np.sign(1 - b2)
    product = s1 * s2
    counts = _bucket_counts(product)
    pi_x = _pi(xmax)
    ratios = {k: _ratio(v, pi_x) for k, v in counts.items()}
    agreement = int(np.count_nonzero((s1 == s2) & (s1 != 0)))
    disagreement_ratio = ratios['negative']
    notes = []
    for N in sorted({v1.level, v2.level}):
        if not _squarefree(N):
            notes.append(f"水平 {N} 不是无平方因子数，密度结论的前提不满足，仅作记录")
    return SignDensityReport(
        kind='pair', labels=[v1.label, v2.label], levels=[v1.level, v2.level], xmax=xmax, pi_x=pi_x,
        counts=counts, ratios=ratios, excluded_primes=_excluded([v1.level, v2.level], xmax),
        extra={'agreement': agreement, 'agreement_ratio': _ratio(agreement, pi_x),
               'disagreement_ratio': disagreement_ratio, 'kappa_threshold': kappa},
        checkpoints=_checkpoints(primes, product, xmax, None),
        tolerances={'pair': tolerance},
        checks={
            'negative_near_half': abs(ratios['negative'] - 0.5) < tolerance,
            'positive_near_half': abs(ratios['positive'] - 0.5) < tolerance,
            'disagreement_exceeds_kappa': disagreement_ratio > kappa,
        },
        notes=notes,
    )


def pair_joint_histogram(v1: PrimeExponents, v2: PrimeExponents, xmax: int,
                         interval1: Tuple[float, float], interval2: Tuple[float, float]) -> JointHistogramReport:
    """#S(I1, I2)(x)/π(x) 与 μ_ST(I1)·μ_ST(I2)"""
    _check_interval(interval1)
    _check_interval(interval2)
    primes, b1, b2 = _common(v1, v2, xmax)
    root = 2.0 * np.sqrt(primes)
    B1, B2 = b1 / root, b2 / root
    inside = ((B1 >= interval1[0]) & (B1 <= interval1[1]) &
              (B2 >= interval2[0]) & (B2 <= interval2[1]))
    count = int(np.count_nonzero(inside))
    pi_x = _pi(xmax)
    return JointHistogramReport(
        labels=[v1.label, v2.label], xmax=xmax,
        interval1=(float(interval1[0]), float(interval1[1])),
        interval2=(float(interval2[0]), float(interval2[1])),
        count=count, pi_x=pi_x, empirical=_ratio(count, pi_x),
        product=st_measure(*interval1) * st_measure(*interval2),
    )


def pair_quadrants(v1: PrimeExponents, v2: PrimeExponents, xmax: int,
                   tolerance: Optional[float] = None) -> QuadrantReport:
    """[0,1]/[-1,0] 四个象限的联合质量，与 1/4 比较"""
    tolerance = ANALYSIS_CONFIG['tol_joint'] if tolerance is None else tolerance
    halves = [(0.0, 1.0), (-1.0, 0.0)]
    quadrants = []
    checks = {}
    for i1 in halves:
        for i2 in halves:
            joint = pair_joint_histogram(v1, v2, xmax, i1, i2)
            quadrants.append({'interval1': list(i1), 'interval2': list(i2),
                              'empirical': joint.empirical, 'product': joint.product})
            checks[f"quadrant_{i1[0]:+.0f}_{i2[0]:+.0f}"] = abs(joint.empirical - 0.25) < tolerance
    return QuadrantReport(labels=[v1.label, v2.label], xmax=xmax, quadrants=quadrants,
                          tolerance=tolerance, checks=checks)


def boundary_band_count(g: Eigenform, xmax: int) -> BandReport:
    """
    满足 0 <= B(p) < 1/(2√p) 的好素数个数

    两边同乘 2√p 得 0 <= b(p) < 1，整数系数时即 b(p) = 0。
    """
    view = prime_exponents(g, xmax)
    primes, bp = view.restrict(xmax)
    band = primes[(bp >= 0) & (bp < 1)]
    pi_x = _pi(xmax)
    return BandReport(label=g.label, level=g.level, xmax=xmax, count=len(band), pi_x=pi_x,
                      ratio=_ratio(len(band), pi_x), first_primes=[int(p) for p in band[:20]])


def cm_value_scan(g: Eigenform, xmax: int, tolerance: Optional[float] = None) -> CMScanReport:
    """CM 形式中 b(p) = 0 的好素数，逐个核对 c(p) = 1/p"""
    if not g.cm:
        raise NotCMError(f"{g.label} 没有 CM")
    tolerance = ANALYSIS_CONFIG['tol_cm'] if tolerance is None else tolerance
    primes, bp = prime_exponents(g, xmax).restrict(xmax)
    # c(p) 取自 Möbius 反演的完整结果
    c = exponents_from_eigenform(g, xmax)
    entries = []
    for p in primes[bp == 0]:
        p = int(p)
        if c[p] != mpq(1, p):
            raise IntegrityError(f"{g.label}: c({p}) = {c[p]} ≠ 1/{p}")
        entries.append((p, c[p]))
    ratio = _ratio(len(entries), len(primes))
    return CMScanReport(label=g.label, level=g.level, xmax=xmax, entries=entries, count=len(entries),
                        good_prime_count=len(primes), vanishing_ratio=ratio, tolerance=tolerance,
                        checks={'vanishing_near_half': abs(ratio - 0.5) < tolerance})


def distinct_values_count(view: PrimeExponents, xmax: int) -> DistinctValuesReport:
    """c(p) 取到的不同正值、负值个数，以及其中整数值的个数"""
    positive, negative = set(), set()
    pos = neg = zero = int_pos = int_neg = 0
    for _, c in view.values(xmax):
        if c > 0:
            pos += 1
            positive.add(c)
            int_pos += c.denominator == 1
        elif c < 0:
            neg += 1
            negative.add(c)
            int_neg += c.denominator == 1
        else:
            zero += 1
    return DistinctValuesReport(
        label=view.label, level=view.level, xmax=xmax, positive_count=pos, negative_count=neg,
        zero_count=zero, distinct_positive=len(positive), distinct_negative=len(negative),
        integral_positive=int_pos, integral_negative=int_neg,
    )


def integrality_scan(c: ExponentSeries, M: Optional[int] = None) -> IntegralityReport:
    """
    找出 c(n) ∈ ℤ∖{0} 的全部 n <= M

    每个这样的 n 必须满足 n <= 2√n·σ0(n)³（平方后比较 n <= 4σ0(n)⁶）；
    同时标出违反 |n·c(n)| <= √n·σ0(n)² 的 n。
    """
    M = c.limit if M is None else M
    if M > c.limit:
        raise ShapeError(f"指数只到 {c.limit}，无法扫描到 {M}")
    sig = sigma0_values(M)
    integral = []
    violations = []
    for n in range(1, M + 1):
        value = c[n]
        s = int(sig[n])
        if value != 0 and value.denominator == 1:
            if n > 4 * s ** 6:
                raise IntegrityError(f"c({n}) = {value} 为非零整数，但 n > 2√n·σ0(n)³")
            integral.append((n, int(value)))
        weighted = n * value
        if weighted * weighted > n * s ** 4:
            violations.append(n)
    if violations:
        logger.warning(f"⚠️ {c.label}: |n·c(n)| <= √n·σ0(n)² 在 {len(violations)} 个 n 处不成立")
    return IntegralityReport(
        label=c.label, level=c.level, limit=M, integral_exponents=integral,
        growth_violations=violations, weighted_integral=c.truncate(M).weighted_integral(),
        checks={'integral_bound_holds': True, 'growth_bound_holds': not violations},
    )


def n0_expression(N: int, constant: float = 1.0) -> float:
    """N^5·log^10(N)·exp(c·log(N+1)/loglog(N+2))·max{ψ2(N), 4√N·log^16(2N)}"""
    return (N ** 5 * math.log(N) ** 10
            * math.exp(constant * math.log(N + 1) / math.log(math.log(N + 2)))
            * max(psi2(N), 4 * math.sqrt(N) * math.log(2 * N) ** 16))


def first_sign_change(c: ExponentSeries, N: Optional[int] = None) -> BoundReport:
    """
    d1 = 首个 n > 1 使 c(n) > 0，d2 = 首个 n 使 c(n) < 0（规范化后恒为 1）

    附带 d0（要求 (n, N) = 1）、首个与 N 互素且 b(n) < 0 的 n（记为 n0），以及 (4N)^{3/8}、ψ2(N)、N0（常数取 1）。
    这些界带有未知的隐含常数，只作对照，不做断言。
    """
    N = c.level if N is None else N
    M = c.limit
    d1 = next((n for n in range(2, M + 1) if c[n] > 0), None)
    d2 = next((n for n in range(1, M + 1) if c[n] < 0), None)
    d0 = next((n for n in range(2, M + 1) if math.gcd(n, N) == 1 and c[n] > 0), None)
    b = eigenform_from_exponents(c)
    # n0 的因子都与 N 互素时才有 d0 <= n0
    first_negative_b = next((n for n, v in enumerate(b, start=1) if v < 0 and math.gcd(n, N) == 1), None)
    bound_38 = (4 * N) ** 0.375
    scan = integrality_scan(c)
    checks = {}
    if d1 is not None:
        checks['d1_within_bound_38'] = d1 <= bound_38
    if d0 is not None and first_negative_b is not None:
        checks['d0_le_first_negative_b'] = d0 <= first_negative_b
    notes = []
    squarefree = _squarefree(N)
    if not squarefree:
        notes.append(f"水平 {N} 不是无平方因子数，N0 界的前提不满足，仅作记录")
    if d1 is None or d2 is None:
        notes.append(f"在 n <= {M} 内没有找到变号，结果不确定")
    return BoundReport(
        label=c.label, level=N, limit=M, d1=d1, d2=d2, d0=d0, first_negative_b=first_negative_b,
        bound_38=bound_38, psi2=psi2(N), n0=n0_expression(N), n0_constant=1.0,
        conclusive=d1 is not None and d2 is not None, squarefree_level=squarefree,
        integral_exponents=scan.integral_exponents, checks=checks, notes=notes,
    )


def product_integrality(c: ExponentSeries, M: int) -> Tuple[ProductReport, PowerSeries]:
    """展开 ∏(1-q^n)^{c(n)} 到 M 阶，报告首个非整数系数 a(n)"""
    series = expand_product(c, M)
    first = series.first_non_integral()
    report = ProductReport(label=c.label, level=c.level, order=M, first_non_integral=first,
                           all_integral=first is None, leading=list(series.coeffs[:10]))
    return report, series


def deligne_report(g: Eigenform, xmax: Optional[int] = None) -> Dict[str, Any]:
    violations = deligne_violations(g, xmax)
    return {'label': g.label, 'xmax': g.limit if xmax is None else xmax,
            'violations': violations, 'checks': {'deligne_bound_holds': not violations}}
