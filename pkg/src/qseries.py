"""
精确截断形式幂级数（有理系数）与 eta 商展开
"""
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, List, Optional, Tuple

import numpy as np
from gmpy2 import mpq

from .errors import NonUnitError, ShapeError, UnsupportedQuotientError

if TYPE_CHECKING:
    from .exponents import ExponentSeries


def _as_rational(value) -> mpq:
    if isinstance(value, np.integer):
        value = int(value)
    return mpq(value)


class PowerSeries:
    """系数下标 0..M 的截断幂级数，M 为 order"""

    __slots__ = ('coeffs',)

    def __init__(self, coeffs: Iterable):
        self.coeffs: List[mpq] = [_as_rational(c) for c in coeffs]
        if not self.coeffs:
            raise ShapeError("幂级数至少需要常数项")

    @classmethod
    def one(cls, order: int) -> "PowerSeries":
        return cls([1] + [0] * order)

    @classmethod
    def from_ints(cls, values) -> "PowerSeries":
        return cls(int(v) for v in values)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n):
        return self.coeffs[n]

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeffs[:6])
        return f"PowerSeries(order={self.order}, [{head}{', ...' if self.order > 5 else ''}])"

    def _same_order(self, other: "PowerSeries"):
        if self.order != other.order:
            raise ShapeError(f"截断阶不一致: {self.order} vs {other.order}")

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        self._same_order(other)
        return PowerSeries(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        self._same_order(other)
        return PowerSeries(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self) -> "PowerSeries":
        return PowerSeries(-a for a in self.coeffs)

    def __mul__(self, other) -> "PowerSeries":
        if isinstance(other, PowerSeries):
            return mul(self, other)
        scalar = _as_rational(other)
        return PowerSeries(a * scalar for a in self.coeffs)

    __rmul__ = __mul__

    def is_integral(self) -> bool:
        return self.first_non_integral() is None

    def first_non_integral(self) -> Optional[int]:
        for n, c in enumerate(self.coeffs):
            if c.denominator != 1:
                return n
        return None


def mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """截断 Cauchy 积"""
    a._same_order(b)
    M = a.order
    out = [mpq(0)] * (M + 1)
    support_b = [(j, c) for j, c in enumerate(b.coeffs) if c != 0]
    for i, ai in enumerate(a.coeffs):
        if ai == 0:
            continue
        for j, bj in support_b:
            if i + j > M:
                break
            out[i + j] += ai * bj
    return PowerSeries(out)


def invert(a: PowerSeries) -> PowerSeries:
    a0 = a[0]
    if a0 == 0:
        raise NonUnitError("常数项为 0，幂级数不可逆")
    inv0 = mpq(1) / a0
    support = [(k, c) for k, c in enumerate(a.coeffs) if k > 0 and c != 0]
    b = [inv0]
    for n in range(1, a.order + 1):
        acc = mpq(0)
        for k, ak in support:
            if k > n:
                break
            acc += ak * b[n - k]
        b.append(-acc * inv0)
    return PowerSeries(b)


def log_deriv(a: PowerSeries) -> PowerSeries:
    """q·a'/a"""
    if a[0] == 0:
        raise NonUnitError("常数项为 0，无法取对数导数")
    q_derivative = PowerSeries(n * c for n, c in enumerate(a.coeffs))
    return mul(q_derivative, invert(a))


def _check_exponents(c: "ExponentSeries", M: int):
    if c.limit < M:
        raise ShapeError(f"指数只到 n={c.limit}，不足以展开到 {M} 阶")
    if c.c0 != 1 or c.h != 0:
        raise ShapeError("乘积展开只支持 c0 = 1, h = 0 的规范化")


def expand_product(c: "ExponentSeries", M: int) -> PowerSeries:
    """
    展开 ∏_{n>=1} (1-q^n)^{c(n)} 到 M 阶

    使用对数导数递推 n·a(n) = -∑_{m=1}^{n} a(n-m)·s(m)，其中 s(m) = ∑_{d|m} d·c(d)
    """
    _check_exponents(c, M)
    s = [mpq(0)] * (M + 1)
    for d in range(1, M + 1):
        cd = c[d]
        if cd == 0:
            continue
        weight = d * cd
        for m in range(d, M + 1, d):
            s[m] += weight
    support = [(m, s[m]) for m in range(1, M + 1) if s[m] != 0]
    a = [mpq(1)]
    for n in range(1, M + 1):
        acc = mpq(0)
        for m, sm in support:
            if m > n:
                break
            acc += sm * a[n - m]
        a.append(-acc / n)
    return PowerSeries(a)


def expand_product_binomial(c: "ExponentSeries", M: int) -> PowerSeries:
    """逐个因子做广义二项展开再相乘，慢，用作 expand_product 的对照"""
    _check_exponents(c, M)
    result = [mpq(1)] + [mpq(0)] * M
    for n in range(1, M + 1):
        alpha = c[n]
        if alpha == 0:
            continue
        terms = []
        binom = mpq(1)
        k = 0
        while n * k <= M:
            terms.append((n * k, binom if k % 2 == 0 else -binom))
            binom = binom * (alpha - k) / (k + 1)
            k += 1
        new = [mpq(0)] * (M + 1)
        for i, r in enumerate(result):
            if r == 0:
                continue
            for e, t in terms:
                if i + e > M:
                    break
                new[i + e] += r * t
        result = new
    return PowerSeries(result)


@dataclass(frozen=True)
class EtaQuotient:
    """∏_m η(mz)^{r_m}"""
    factors: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        factors = tuple((int(m), int(r)) for m, r in self.factors)
        ms = [m for m, _ in factors]
        if any(m < 1 for m in ms):
            raise UnsupportedQuotientError(f"eta 因子的 m 必须 >= 1: {factors}")
        if len(set(ms)) != len(ms):
            raise UnsupportedQuotientError(f"eta 因子的 m 不能重复: {factors}")
        object.__setattr__(self, 'factors', factors)

    @property
    def h(self) -> mpq:
        return mpq(sum(m * r for m, r in self.factors), 24)

    @property
    def weight(self) -> mpq:
        return mpq(sum(r for _, r in self.factors), 2)


def _euler_terms(m: int, L: int) -> List[Tuple[int, int]]:
    """∏_{n>=1}(1-q^{mn}) 在 L 阶内的非零项（五边形数定理）"""
    terms = [(0, 1)]
    k = 1
    while m * k * (3 * k - 1) // 2 <= L:
        sign = -1 if k % 2 else 1
        terms.append((m * k * (3 * k - 1) // 2, sign))
        e2 = m * k * (3 * k + 1) // 2
        if e2 <= L:
            terms.append((e2, sign))
        k += 1
    terms.sort()
    return terms


def _mul_sparse(arr: np.ndarray, terms: List[Tuple[int, int]]) -> np.ndarray:
    L = len(arr) - 1
    out = np.zeros_like(arr)
    for e, sign in terms:
        if sign > 0:
            out[e:] += arr[:L + 1 - e]
        else:
            out[e:] -= arr[:L + 1 - e]
    return out


def _divide_euler(arr: np.ndarray, m: int) -> np.ndarray:
    # 逐个乘 1/(1-q^s)，即按步长 s 的剩余类做累加
    size = len(arr)
    for step in range(m, size, m):
        rows = -(-size // step)
        padded = np.zeros(rows * step, dtype=arr.dtype)
        padded[:size] = arr
        arr = np.cumsum(padded.reshape(rows, step), axis=0).reshape(-1)[:size]
    return arr


def eta_coefficients(e: EtaQuotient, M: int) -> np.ndarray:
    """
    eta 商 q^h ∏_m ∏_n (1-q^{mn})^{r_m} 的前 M+1 个整系数

    Args:
        e: eta 商
        M: 截断阶

    Returns:
        长度 M+1 的 int64 数组
    """
    h = e.h
    if h.denominator != 1 or h < 0:
        raise UnsupportedQuotientError(f"q 的首项次数 h={h} 不是非负整数")
    h = int(h)
    out = np.zeros(M + 1, dtype=np.int64)
    if h > M:
        return out
    L = M - h
    prod = np.zeros(L + 1, dtype=np.int64)
    prod[0] = 1
    for m, r in e.factors:
        if r > 0:
            terms = _euler_terms(m, L)
            for _ in range(r):
                prod = _mul_sparse(prod, terms)
        elif r < 0:
            for _ in range(-r):
                prod = _divide_euler(prod, m)
    out[h:] = prod
    return out


def eta_expand(e: EtaQuotient, M: int) -> PowerSeries:
    return PowerSeries.from_ints(eta_coefficients(e, M))
