"""
素数筛与乘性算术函数（μ、σ0、ψ2），其余模块都依赖这里
"""
import math
import threading
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import ArithmeticDomainError, EmptyRangeError


@dataclass(frozen=True)
class PrimeTable:
    """不超过 bound 的全部素数，以及同一范围内的最小素因子表"""
    bound: int
    primes: np.ndarray
    spf: np.ndarray

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return (int(p) for p in self.primes)

    def __contains__(self, n: int) -> bool:
        return self.is_prime(n)

    def _check(self, n: int):
        if n < 1:
            raise ArithmeticDomainError(f"需要正整数，收到 {n}")
        if n > self.bound:
            raise ArithmeticDomainError(f"{n} 超出筛的范围 {self.bound}")

    def is_prime(self, n: int) -> bool:
        if n < 2 or n > self.bound:
            return False
        return int(self.spf[n]) == n

    def pi(self, x: float) -> int:
        """π(x)，x 不得超过 bound"""
        return int(np.searchsorted(self.primes, int(x), side='right'))

    def primes_upto(self, x: int) -> np.ndarray:
        return self.primes[:self.pi(x)]

    def factorize(self, n: int) -> List[Tuple[int, int]]:
        self._check(n)
        factors = []
        while n > 1:
            p = int(self.spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
        return factors

    def mobius(self, n: int) -> int:
        factors = self.factorize(n)
        if any(e > 1 for _, e in factors):
            return 0
        return -1 if len(factors) % 2 else 1

    def sigma0(self, n: int) -> int:
        count = 1
        for _, e in self.factorize(n):
            count *= e + 1
        return count


def sieve_primes(bound: int) -> PrimeTable:
    """
    埃氏筛，同时记录最小素因子

    Args:
        bound: 上界（含）

    Returns:
        PrimeTable
    """
    if bound < 2:
        raise EmptyRangeError(f"筛的上界必须 >= 2，收到 {bound}")
    spf = np.zeros(bound + 1, dtype=np.int64)
    for p in range(2, math.isqrt(bound) + 1):
        if spf[p] == 0:
            seg = spf[p * p::p]
            seg[seg == 0] = p
    idx = np.arange(bound + 1, dtype=np.int64)
    unset = spf == 0
    spf[unset] = idx[unset]
    primes = np.flatnonzero((spf == idx) & (idx >= 2)).astype(np.int64)
    return PrimeTable(bound=bound, primes=primes, spf=spf)


_shared_lock = threading.Lock()
_shared: Optional[PrimeTable] = None


def shared_table(n: int) -> PrimeTable:
    """返回至少覆盖到 n 的共享素数表，必要时在锁内扩建"""
    global _shared
    table = _shared
    if table is None or table.bound < n:
        with _shared_lock:
            table = _shared
            if table is None or table.bound < n:
                old = table.bound if table is not None else 0
                table = sieve_primes(max(n, 2 * old, 1 << 16))
                _shared = table
    return table


def mobius(n: int) -> int:
    if n < 1:
        raise ArithmeticDomainError(f"μ(n) 需要 n >= 1，收到 {n}")
    return shared_table(n).mobius(n)


def sigma0(n: int) -> int:
    if n < 1:
        raise ArithmeticDomainError(f"σ0(n) 需要 n >= 1，收到 {n}")
    return shared_table(n).sigma0(n)


def psi2(N: int) -> float:
    """ψ2(N) = ∏_{p|N} log(2N)/log p，空积为 1"""
    if N < 1:
        raise ArithmeticDomainError(f"ψ2(N) 需要 N >= 1，收到 {N}")
    value = 1.0
    log2n = math.log(2 * N)
    for p, _ in shared_table(N).factorize(N):
        value *= log2n / math.log(p)
    return value


def mobius_values(M: int) -> np.ndarray:
    """μ(0..M)，下标 0 处为 0"""
    mu = np.ones(M + 1, dtype=np.int64)
    mu[0] = 0
    if M < 2:
        return mu
    for p in shared_table(M).primes_upto(M):
        p = int(p)
        mu[p::p] *= -1
        mu[p * p::p * p] = 0
    return mu


def sigma0_values(M: int) -> np.ndarray:
    """σ0(0..M)，下标 0 处为 0"""
    d = np.zeros(M + 1, dtype=np.int64)
    for k in range(1, M + 1):
        d[k::k] += 1
    return d
