import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from config.settings import ANALYSIS_CONFIG, CACHE_DIR, EIGENFORM_CONFIG, LOG_CONFIG, SERIES_CONFIG
from .analysis import (boundary_band_count, cm_value_scan, distinct_values_count, first_sign_change,
                       integrality_scan, pair_joint_histogram, pair_quadrants, pair_sign_density,
                       product_integrality, sign_density, st_histogram)
from .cache_manager import ApCache
from .eigenforms import load_eigenform
from .errors import DataIOError, GMFError, IntegrityError, UsageError
from .exponents import exponent_rows, exponents_from_eigenform, prime_exponents
from .report_writer import ReportWriter

logger = logging.getLogger(__name__)

COMMANDS = ['exponents', 'coefficients', 'satotate', 'signs', 'pair', 'joint', 'band', 'cmscan',
            'distinct', 'integrality', 'firstsign', 'product']
# 只用到前 limit 个系数的命令；其余命令按 xmax 计算
SERIES_COMMANDS = {'exponents', 'coefficients', 'integrality', 'firstsign', 'product'}
PAIR_COMMANDS = {'pair', 'joint'}
# 其余命令只输出 JSON 报告
CSV_COMMANDS = {'exponents', 'coefficients', 'satotate', 'product'}


@dataclass
class RunConfig:
    command: str
    level: Optional[str] = None
    levels: List[str] = field(default_factory=list)
    file: Optional[str] = None
    xmax: int = ANALYSIS_CONFIG['xmax']
    limit: int = SERIES_CONFIG['limit']
    bins: int = ANALYSIS_CONFIG['bins']
    tolerance: Optional[float] = None
    tol_joint: Optional[float] = None
    zero_ratio_max: Optional[float] = None
    cache_dir: Optional[str] = CACHE_DIR
    out: Optional[str] = None
    fmt: str = 'json'
    backend: str = EIGENFORM_CONFIG['backend']
    workers: int = EIGENFORM_CONFIG['workers']
    strict: bool = False
    interval1: Tuple[float, float] = (0.0, 1.0)
    interval2: Tuple[float, float] = (0.0, 1.0)

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"未知命令 {self.command}")
        if self.xmax < 2:
            raise UsageError(f"--xmax 必须 >= 2，收到 {self.xmax}")
        if self.limit < 1:
            raise UsageError(f"--limit 必须 >= 1，收到 {self.limit}")
        if self.bins < 1:
            raise UsageError(f"--bins 必须 >= 1，收到 {self.bins}")
        if self.fmt not in ('json', 'csv'):
            raise UsageError(f"--format 只能是 json 或 csv，收到 {self.fmt}")
        if self.fmt == 'csv' and self.command not in CSV_COMMANDS:
            raise UsageError(f"{self.command} 只输出 JSON 报告，--format csv 仅用于 {', '.join(sorted(CSV_COMMANDS))}")
        if self.workers < 1:
            raise UsageError(f"--workers 必须 >= 1，收到 {self.workers}")
        if self.command in PAIR_COMMANDS:
            if len(self.levels) != 2:
                raise UsageError(f"{self.command} 需要 --levels A,B")
        elif not (self.level or self.file):
            raise UsageError(f"{self.command} 需要 --level 或 --file")
        if self.out:
            parent = Path(self.out).resolve().parent
            while not parent.exists():
                parent = parent.parent
            if not os.access(parent, os.W_OK):
                raise DataIOError(f"输出路径不可写: {self.out}")

    @property
    def bound(self) -> int:
        return self.limit if self.command in SERIES_COMMANDS else self.xmax


def _interval(text: str) -> Tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f"区间格式应为 lo,hi，收到 {text}")
    return lo, hi


def _levels(text: str) -> List[str]:
    return [v.strip() for v in text.split(',') if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='GMF q-指数实验工具：由权 2 Hecke 本征形式计算乘积指数并做符号统计')
    parser.add_argument('command', choices=COMMANDS, help='要执行的分析')
    parser.add_argument('--level', type=str, help='目录水平，如 11')
    parser.add_argument('--levels', type=_levels, default=[], help='成对分析的两个水平，如 11,14')
    parser.add_argument('--file', type=str, help='`n,bn` 系数文件（代替 --level）')
    parser.add_argument('--file-level', type=int, help='系数文件对应的水平')
    parser.add_argument('--cm', action='store_true', help='系数文件对应 CM 形式')
    parser.add_argument('--xmax', type=int, default=ANALYSIS_CONFIG['xmax'], help='素数上界')
    parser.add_argument('--limit', type=int, help='指数截断 M（product 默认取较小的阶数）')
    parser.add_argument('--bins', type=int, default=ANALYSIS_CONFIG['bins'], help='Sato-Tate 直方图箱数')
    parser.add_argument('--tol', type=float, help='覆盖该分析的主容差（signs、pair、satotate、cmscan）')
    parser.add_argument('--tol-joint', type=float, help='pair 四个象限质量的容差')
    parser.add_argument('--zero-ratio-max', type=float, help='signs 中 c(p)=0 比例的上限')
    parser.add_argument('--cache-dir', type=str, default=CACHE_DIR, help='a_p 缓存目录，传空串关闭缓存')
    parser.add_argument('--out', type=str, help='输出文件，缺省写到标准输出')
    parser.add_argument('--format', dest='fmt', choices=['json', 'csv'], default='json', help='输出格式')
    parser.add_argument('--backend', choices=['curve', 'eta'], default=EIGENFORM_CONFIG['backend'], help='系数后端')
    parser.add_argument('--workers', type=int, default=EIGENFORM_CONFIG['workers'], help='点计数进程数')
    parser.add_argument('--strict', action='store_true', help='任何检查未通过即以完整性错误退出')
    parser.add_argument('--interval1', type=_interval, default=(0.0, 1.0), help='joint 的第一个区间 lo,hi')
    parser.add_argument('--interval2', type=_interval, default=(0.0, 1.0), help='joint 的第二个区间 lo,hi')
    parser.add_argument('--log-level', default=LOG_CONFIG['level'], help='日志级别')
    return parser


def _default_limit(args: argparse.Namespace) -> int:
    if args.limit is not None:
        return args.limit
    return SERIES_CONFIG['product_limit'] if args.command == 'product' else SERIES_CONFIG['limit']


class PairBundle:
    """pair 命令把符号密度与象限质量合并成一份 JSON"""

    def __init__(self, **reports):
        self.reports = reports

    @property
    def checks(self) -> Dict[str, bool]:
        return {f"{name}.{k}": v for name, r in self.reports.items() for k, v in r.checks.items()}

    def to_dict(self) -> Dict[str, dict]:
        return {name: r.to_dict() for name, r in self.reports.items()}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command, level=args.level, levels=args.levels, file=args.file,
        xmax=args.xmax, limit=_default_limit(args), bins=args.bins, tolerance=args.tol,
        tol_joint=args.tol_joint, zero_ratio_max=args.zero_ratio_max,
        cache_dir=args.cache_dir or None, out=args.out, fmt=args.fmt, backend=args.backend,
        workers=args.workers, strict=args.strict, interval1=args.interval1, interval2=args.interval2,
    )


class Runner:
    """按 RunConfig 加载本征形式、执行分析并输出"""

    def __init__(self, config: RunConfig, file_level: Optional[int] = None, file_cm: bool = False):
        self.config = config
        self.file_level = file_level
        self.file_cm = file_cm
        self.cache = ApCache(config.cache_dir) if config.cache_dir else None
        self.writer = ReportWriter(config.out, config.fmt)

    def load(self, spec: Optional[str] = None):
        spec = spec or self.config.file or self.config.level
        return load_eigenform(spec, self.config.bound, backend=self.config.backend,
                              level=self.file_level, cm=self.file_cm,
                              cache=self.cache, workers=self.config.workers)

    def _finish(self, report):
        failed = [name for name, ok in getattr(report, 'checks', {}).items() if not ok]
        self.writer.emit_report(report)
        if failed:
            logger.warning(f"⚠️ 未通过的检查: {', '.join(failed)}")
            if self.config.strict:
                raise IntegrityError(f"--strict: 检查未通过 {failed}")

    def run(self):
        config = self.config
        command = config.command
        if command in PAIR_COMMANDS:
            g1, g2 = (self.load(spec) for spec in config.levels)
            v1, v2 = prime_exponents(g1, config.xmax), prime_exponents(g2, config.xmax)
            if command == 'pair':
                self._finish(PairBundle(signs=pair_sign_density(v1, v2, config.xmax, config.tolerance),
                                        quadrants=pair_quadrants(v1, v2, config.xmax, config.tol_joint)))
            else:
                self._finish(pair_joint_histogram(v1, v2, config.xmax, config.interval1, config.interval2))
            return

        g = self.load()
        if command == 'coefficients':
            self.writer.emit_rows(['n', 'bn'], enumerate(g.as_list(), start=1))
        elif command == 'exponents':
            self.writer.emit_rows(['n', 'num', 'den'], exponent_rows(exponents_from_eigenform(g, config.limit)))
        elif command == 'satotate':
            report = st_histogram(g, config.xmax, config.bins, config.tolerance)
            if config.fmt == 'csv':
                self.writer.emit_rows(['lo', 'hi', 'count', 'empirical', 'sato_tate'],
                                      ([b['lo'], b['hi'], b['count'], b['empirical'], b['sato_tate']]
                                       for b in report.bins))
            else:
                self._finish(report)
        elif command == 'signs':
            self._finish(sign_density(prime_exponents(g, config.xmax), config.xmax, config.tolerance,
                                      zero_ratio_max=config.zero_ratio_max))
        elif command == 'band':
            self._finish(boundary_band_count(g, config.xmax))
        elif command == 'cmscan':
            self._finish(cm_value_scan(g, config.xmax, config.tolerance))
        elif command == 'distinct':
            self._finish(distinct_values_count(prime_exponents(g, config.xmax), config.xmax))
        elif command == 'integrality':
            self._finish(integrality_scan(exponents_from_eigenform(g, config.limit)))
        elif command == 'firstsign':
            self._finish(first_sign_change(exponents_from_eigenform(g, config.limit)))
        elif command == 'product':
            report, series = product_integrality(exponents_from_eigenform(g, config.limit), config.limit)
            if config.fmt == 'csv':
                self.writer.emit_rows(['n', 'num', 'den'],
                                      ((n, int(a.numerator), int(a.denominator))
                                       for n, a in enumerate(series.coeffs)))
            else:
                self._finish(report)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.INFO),
                        format=LOG_CONFIG['format'], stream=sys.stderr)
    try:
        config = config_from_args(args)
        config.validate()
        Runner(config, file_level=args.file_level, file_cm=args.cm).run()
    except GMFError as e:
        logger.error(f"❌ {e}")
        return e.exit_code
    return 0


if __name__ == '__main__':
    sys.exit(main())
