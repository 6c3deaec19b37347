"""
权 2 规范化 Hecke 本征形式的系数 b(n)：eta 商与椭圆曲线点计数两个后端
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from config.settings import EIGENFORM_CONFIG, SERIES_CONFIG
from .arith_core import shared_table
from .catalogue import CATALOGUE_DATA
from .errors import (ArithmeticDomainError, CatalogueError, IntegrityError,
                     MissingDataError, ShapeError, UsageError)
from .qseries import EtaQuotient, eta_coefficients
from .report_writer import read_coefficients

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EllipticCurve:
    """y^2 + a1·xy + a3·y = x^3 + a2·x^2 + a4·x + a6"""
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    conductor: int
    bad_ap: Dict[int, int] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.discriminant == 0:
            raise ArithmeticDomainError(f"曲线 {self.key} 的判别式为 0")
        bad = {p for p, _ in shared_table(max(self.conductor, 2)).factorize(self.conductor)} \
            if self.conductor > 1 else set()
        if set(self.bad_ap) != bad:
            raise ArithmeticDomainError(
                f"bad_ap 的键 {sorted(self.bad_ap)} 必须恰为导子 {self.conductor} 的素因子 {sorted(bad)}")

    @property
    def key(self) -> Tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self) -> int:
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self) -> int:
        return (self.a1 * self.a1 * self.a6 + 4 * self.a2 * self.a6 - self.a1 * self.a3 * self.a4
                + self.a2 * self.a3 * self.a3 - self.a4 * self.a4)

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def _ap_enumerate(E: EllipticCurve, p: int) -> int:
    points = 1
    for x in range(p):
        rhs = x ** 3 + E.a2 * x * x + E.a4 * x + E.a6
        for y in range(p):
            if (y * y + E.a1 * x * y + E.a3 * y - rhs) % p == 0:
                points += 1
    return p + 1 - points


def _ap_residue_table(E: EllipticCurve, p: int) -> int:
    # 配方后 (2y + a1·x + a3)^2 = 4x^3 + b2·x^2 + 2b4·x + b6
    x = np.arange(p, dtype=np.int64)
    f = (4 * x + E.b2 % p) % p
    f = (f * x + (2 * E.b4) % p) % p
    f = (f * x + E.b6 % p) % p
    chi = np.full(p, -1, dtype=np.int64)
    chi[(x * x) % p] = 1
    chi[0] = 0
    return -int(chi[f].sum())


def curve_ap(E: EllipticCurve, p: int) -> int:
    """
    a_p = p + 1 - #E(F_p)

    Args:
        E: 椭圆曲线
        p: 素数；导子的素因子从 bad_ap 读取

    Returns:
        a_p
    """
    if E.conductor % p == 0:
        if p not in E.bad_ap:
            raise MissingDataError(f"坏素数 p={p} 没有 bad_ap 数据")
        return int(E.bad_ap[p])
    if E.discriminant % p == 0:
        raise MissingDataError(f"模型在 p={p} 处约化奇异，但 p 不整除导子，缺少 a_p 数据")
    if p <= 3:
        return _ap_enumerate(E, p)
    return _ap_residue_table(E, p)


def _ap_chunk(task: Tuple[EllipticCurve, List[int]]) -> List[int]:
    curve, primes = task
    return [curve_ap(curve, p) for p in primes]


def count_primes(E: EllipticCurve, primes: List[int], workers: int = 1, chunk_size: int = 512) -> List[int]:
    """按给定顺序返回 a_p；多进程时用有序 map，结果与进程数无关"""
    if workers <= 1 or len(primes) <= chunk_size:
        return _ap_chunk((E, primes))
    chunks = [(E, primes[i:i + chunk_size]) for i in range(0, len(primes), chunk_size)]
    values: List[int] = []
    with ProcessPoolExecutor(max_workers=workers) as executor:
        for part in executor.map(_ap_chunk, chunks):
            values.extend(part)
    return values


def ap_table(E: EllipticCurve, bound: int, workers: Optional[int] = None, cache=None,
             chunk_size: Optional[int] = None) -> Dict[int, int]:
    """
    不超过 bound 的全部素数的 a_p，优先读缓存，只补算缺失部分

    Args:
        E: 椭圆曲线
        bound: 素数上界
        workers: 进程数（None 表示使用配置）
        cache: ApCache 或 None

    Returns:
        {p: a_p}
    """
    if bound < 2:
        return {}
    workers = EIGENFORM_CONFIG['workers'] if workers is None else workers
    chunk_size = chunk_size or EIGENFORM_CONFIG['chunk_size']
    table: Dict[int, int] = {}
    covered = 1
    if cache is not None:
        covered, cached = cache.load(E)
        if covered >= bound:
            return {p: a for p, a in cached.items() if p <= bound}
        table.update(cached)
    missing = [int(p) for p in shared_table(bound).primes_upto(bound) if p > covered]
    if missing:
        logger.info(f"曲线 {E.key}: 点计数 {len(missing)} 个素数 ({covered} < p <= {bound}), workers={workers}")
        table.update(zip(missing, count_primes(E, missing, workers, chunk_size)))
        if cache is not None:
            cache.store(E, bound, table)
    return table


def hecke_extend(ap: Mapping[int, int], N: int, M: int) -> np.ndarray:
    """
    由 a_p 按 Hecke 关系生成 b(0..M)，下标 n 处为 b(n)，b(0) 置 0

    b(p^{r+1}) = b(p)b(p^r) - p·b(p^{r-1})（p ∤ N），b(p^r) = b(p)^r（p | N），
    互素时 b(mn) = b(m)b(n)
    """
    b = [0] * (M + 1)
    if M >= 1:
        b[1] = 1
    if M < 2:
        return np.array(b, dtype=np.int64)
    spf = shared_table(M).spf
    for n in range(2, M + 1):
        p = int(spf[n])
        m, pe = n, 1
        while m % p == 0:
            m //= p
            pe *= p
        if m > 1:
            b[n] = b[pe] * b[m]
        elif pe == p:
            if p not in ap:
                raise MissingDataError(f"缺少 p={p} 的 a_p")
            b[p] = int(ap[p])
        elif N % p == 0:
            b[n] = b[p] * b[n // p]
        else:
            b[n] = b[p] * b[n // p] - p * b[n // (p * p)]
    return np.array(b, dtype=np.int64)


@dataclass
class Eigenform:
    level: int
    coeffs: np.ndarray          # 下标 n 处为 b(n)，下标 0 不使用
    cm: bool = False
    source: str = 'eta'         # eta | curve | file
    label: str = ''

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.int64)
        if len(self.coeffs) < 2 or int(self.coeffs[1]) != 1:
            raise IntegrityError(f"{self.label or self.level}: 本征形式未规范化，b(1) 必须为 1")
        if not self.label:
            self.label = str(self.level)

    @property
    def limit(self) -> int:
        return len(self.coeffs) - 1

    def b(self, n: int) -> int:
        if n < 1 or n > self.limit:
            raise ShapeError(f"b({n}) 超出已计算范围 1..{self.limit}")
        return int(self.coeffs[n])

    def as_list(self) -> List[int]:
        return [int(v) for v in self.coeffs[1:]]

    def good_primes(self, xmax: Optional[int] = None) -> np.ndarray:
        """不超过 xmax 且不整除水平的素数"""
        xmax = self.limit if xmax is None else xmax
        if xmax > self.limit:
            raise ShapeError(f"系数只算到 {self.limit}，无法覆盖 x={xmax}")
        if xmax < 2:
            return np.zeros(0, dtype=np.int64)
        primes = shared_table(xmax).primes_upto(xmax)
        return primes[self.level % primes != 0]


def deligne_violations(g: Eigenform, xmax: Optional[int] = None) -> List[int]:
    primes = g.good_primes(xmax)
    bp = g.coeffs[primes]
    return [int(p) for p in primes[bp * bp > 4 * primes]]


@dataclass(frozen=True)
class CatalogueEntry:
    key: str
    label: str
    level: int
    eta: EtaQuotient
    curve: EllipticCurve
    cm: bool


def catalogue_entry(key: Union[str, int]) -> CatalogueEntry:
    key = str(key)
    if key not in CATALOGUE_DATA:
        raise CatalogueError(f"目录中没有水平 {key}（可用: {', '.join(CATALOGUE_DATA)}）")
    data = CATALOGUE_DATA[key]
    level = int(key)
    return CatalogueEntry(
        key=key,
        label=data['label'],
        level=level,
        eta=EtaQuotient(data['eta']),
        curve=EllipticCurve(*data['curve'], conductor=level, bad_ap=dict(data['bad_ap'])),
        cm=data['cm'],
    )


def curve_coefficients(entry: CatalogueEntry, M: int, cache=None, workers: Optional[int] = None) -> np.ndarray:
    return hecke_extend(ap_table(entry.curve, M, workers=workers, cache=cache), entry.level, M)


def _first_mismatch(a: np.ndarray, b: np.ndarray) -> int:
    return int(np.flatnonzero(a != b)[0])


def _check_deligne(g: Eigenform):
    violations = deligne_violations(g)
    if violations:
        raise IntegrityError(f"{g.label}: Deligne 界在 p={violations[:10]} 处不成立")


def load_eigenform(spec: Union[str, int, Path], M: int, *, backend: Optional[str] = None,
                   level: Optional[int] = None, cm: bool = False, cache=None,
                   workers: Optional[int] = None, crosscheck_limit: Optional[int] = None) -> Eigenform:
    """
    读取目录中的本征形式或 `n,bn` 系数文件

    Args:
        spec: 目录键（如 "11"）或 CSV 路径
        M: 需要的系数个数
        backend: 'curve' 或 'eta'，None 表示使用配置
        level: 文件来源时的水平
        cm: 文件来源时的 CM 标记
        cache: ApCache 或 None
        crosscheck_limit: 交叉校验范围，None 表示使用配置

    Returns:
        Eigenform
    """
    key = str(spec)
    if key in CATALOGUE_DATA:
        entry = catalogue_entry(key)
        backend = backend or EIGENFORM_CONFIG['backend']
        check = min(M, crosscheck_limit or SERIES_CONFIG['crosscheck_limit'])
        if backend == 'eta':
            coeffs = eta_coefficients(entry.eta, M)
            other = curve_coefficients(entry, check, cache=cache, workers=workers)
        elif backend == 'curve':
            coeffs = curve_coefficients(entry, M, cache=cache, workers=workers)
            other = eta_coefficients(entry.eta, check)
        else:
            raise UsageError(f"未知后端 {backend}（可选 curve | eta）")
        if not np.array_equal(coeffs[:check + 1], other[:check + 1]):
            n = _first_mismatch(coeffs[:check + 1], other[:check + 1])
            raise IntegrityError(f"{entry.label}: 两个后端在 n={n} 处不一致 ({coeffs[n]} vs {other[n]})")
        g = Eigenform(level=entry.level, coeffs=coeffs, cm=entry.cm, source=backend, label=entry.label)
        logger.info(f"已加载 {entry.label} (后端 {backend}, M={M}, 交叉校验到 {check})")
    else:
        path = Path(key)
        if not path.exists():
            raise CatalogueError(f"既不是目录中的水平，也不是存在的文件: {key}")
        coeffs = read_coefficients(path)
        if len(coeffs) - 1 < M:
            raise ShapeError(f"{path} 只有 {len(coeffs) - 1} 个系数，需要 {M}")
        if level is None:
            logger.warning(f"⚠️ 文件 {path.name} 未指定水平，按水平 1 处理")
        g = Eigenform(level=level or 1, coeffs=coeffs[:M + 1], cm=cm, source='file', label=path.stem)
    _check_deligne(g)
    return g
