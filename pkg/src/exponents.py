"""
本征形式系数 b(n) 与 GMF 的 q-指数 c(n) 之间的互相转换

    b(n) = -∑_{d|n} d·c(d)
    n·c(n) = -∑_{d|n} μ(d)·b(n/d)
"""
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np
from gmpy2 import mpq

from .arith_core import mobius_values
from .eigenforms import Eigenform
from .errors import ShapeError
from .qseries import PowerSeries, log_deriv


@dataclass
class ExponentSeries:
    """f = c0·q^h·∏(1-q^n)^{c(n)}，固定 c0 = 1, h = 0"""
    level: int
    values: List[mpq]           # values[n] = c(n)，values[0] 不使用
    c0: mpq = mpq(1)
    h: int = 0
    label: str = ''

    @classmethod
    def from_list(cls, level: int, c: List, label: str = '') -> "ExponentSeries":
        """c 为 c(1..M)"""
        return cls(level=level, values=[mpq(0)] + [mpq(v) for v in c], label=label)

    @property
    def limit(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n: int) -> mpq:
        if n < 1 or n > self.limit:
            raise ShapeError(f"c({n}) 超出已计算范围 1..{self.limit}")
        return self.values[n]

    def items(self) -> Iterator[Tuple[int, mpq]]:
        return ((n, self.values[n]) for n in range(1, self.limit + 1))

    def truncate(self, M: int) -> "ExponentSeries":
        if M > self.limit:
            raise ShapeError(f"无法把 {self.limit} 项截断为 {M} 项")
        return ExponentSeries(self.level, self.values[:M + 1], self.c0, self.h, self.label)

    def weighted_integral(self) -> bool:
        """n·c(n) 是否全为整数"""
        return all((n * c).denominator == 1 for n, c in self.items())


def exponents_from_eigenform(g: Eigenform, M: Optional[int] = None) -> ExponentSeries:
    """
    c(n) = -(1/n)·∑_{d|n} μ(d)·b(n/d)，精确有理数

    Args:
        g: 本征形式
        M: 指数个数，None 表示使用 g 的全部系数

    Returns:
        ExponentSeries
    """
    M = g.limit if M is None else M
    if g.limit < M:
        raise ShapeError(f"{g.label}: 只有 {g.limit} 个系数，需要 {M}")
    mu = mobius_values(M)
    b = [int(v) for v in g.coeffs[:M + 1]]
    acc = [0] * (M + 1)
    for d in range(1, M + 1):
        md = int(mu[d])
        if md == 0:
            continue
        for n in range(d, M + 1, d):
            acc[n] += md * b[n // d]
    values = [mpq(0)] + [mpq(-acc[n], n) for n in range(1, M + 1)]
    return ExponentSeries(level=g.level, values=values, label=g.label)


def _simplify(value: mpq) -> Union[int, mpq]:
    return int(value) if value.denominator == 1 else value


def eigenform_from_exponents(c: ExponentSeries, M: Optional[int] = None) -> List[Union[int, mpq]]:
    """b(n) = -∑_{d|n} d·c(d)，返回 b(1..M)；整数值返回 int"""
    M = c.limit if M is None else M
    if c.limit < M:
        raise ShapeError(f"指数只到 {c.limit}，需要 {M}")
    acc = [mpq(0)] * (M + 1)
    for d in range(1, M + 1):
        cd = c[d]
        if cd == 0:
            continue
        weight = d * cd
        for n in range(d, M + 1, d):
            acc[n] += weight
    return [_simplify(-acc[n]) for n in range(1, M + 1)]


def prime_exponent(bp: int, p: int) -> mpq:
    """c(p) = (1 - b(p))/p"""
    return mpq(1 - int(bp), int(p))


@dataclass
class PrimeExponents:
    """
    素数处指数的惰性视图：只保存好素数 p <= xmax 及 b(p)，c(p) 按需生成

    c(p) 的符号等于整数 1 - b(p) 的符号，计数时不经过有理数
    """
    level: int
    label: str
    cm: bool
    xmax: int
    primes: np.ndarray
    bp: np.ndarray

    def restrict(self, xmax: int) -> Tuple[np.ndarray, np.ndarray]:
        if xmax > self.xmax:
            raise ShapeError(f"{self.label}: 素数视图只覆盖到 {self.xmax}，无法取到 {xmax}")
        k = int(np.searchsorted(self.primes, xmax, side='right'))
        return self.primes[:k], self.bp[:k]

    def c(self, p: int) -> mpq:
        k = int(np.searchsorted(self.primes, p))
        if k >= len(self.primes) or int(self.primes[k]) != p:
            raise ShapeError(f"{self.label}: {p} 不是视图中的好素数")
        return prime_exponent(int(self.bp[k]), p)

    def values(self, xmax: Optional[int] = None) -> Iterator[Tuple[int, mpq]]:
        primes, bp = self.restrict(self.xmax if xmax is None else xmax)
        return ((int(p), prime_exponent(int(b), int(p))) for p, b in zip(primes, bp))

    def signs(self, xmax: Optional[int] = None) -> np.ndarray:
        _, bp = self.restrict(self.xmax if xmax is None else xmax)
        return np.sign(1 - bp)

    def normalized(self, xmax: Optional[int] = None) -> np.ndarray:
        """B(p) = b(p)/(2√p)"""
        primes, bp = self.restrict(self.xmax if xmax is None else xmax)
        return bp / (2.0 * np.sqrt(primes))


def prime_exponents(g: Eigenform, xmax: Optional[int] = None) -> PrimeExponents:
    xmax = g.limit if xmax is None else xmax
    primes = g.good_primes(xmax)
    return PrimeExponents(level=g.level, label=g.label, cm=g.cm, xmax=xmax,
                          primes=primes, bp=g.coeffs[primes].copy())


def exponents_from_series(a: PowerSeries, level: int = 1, label: str = '') -> ExponentSeries:
    """
    从规范化（a[0] = 1）幂级数恢复乘积指数：先取对数导数得到 b(m)，再做 Möbius 反演
    """
    if a[0] != 1:
        raise ShapeError("只能从常数项为 1 的幂级数恢复乘积指数")
    M = a.order
    b = log_deriv(a)
    mu = mobius_values(M)
    acc = [mpq(0)] * (M + 1)
    for d in range(1, M + 1):
        md = int(mu[d])
        if md == 0:
            continue
        for n in range(d, M + 1, d):
            acc[n] += md * b[n // d]
    values = [mpq(0)] + [-acc[n] / n for n in range(1, M + 1)]
    return ExponentSeries(level=level, values=values, label=label)


def exponent_rows(c: ExponentSeries) -> Iterator[Tuple[int, int, int]]:
    """导出用的 (n, num, den) 行"""
    return ((n, int(v.numerator), int(v.denominator)) for n, v in c.items())