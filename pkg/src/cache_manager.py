"""
a_p 缓存管理：每条曲线一个 `p,ap` CSV，文件名记录已覆盖的素数上界
"""
import logging
import re
from pathlib import Path
from typing import Dict, List, Tuple

from .arith_core import shared_table
from .errors import DataIOError
from .report_writer import read_csv_rows, write_csv

logger = logging.getLogger(__name__)


class ApCache:
    """a_p 缓存目录管理器，负责读取、增量扩展和清理缓存文件"""

    _BOUND_PATTERN = re.compile(r'_upto(\d+)\.csv$')

    def __init__(self, cache_dir):
        """
        Args:
            cache_dir: 缓存目录路径（首次写入时创建）
        """
        self.cache_dir = Path(cache_dir)

    def _stem(self, curve) -> str:
        return "ap_" + "_".join(str(a) for a in curve.key)

    def path_for(self, curve, bound: int) -> Path:
        return self.cache_dir / f"{self._stem(curve)}_upto{bound}.csv"

    def _files(self, curve) -> List[Tuple[int, Path]]:
        if not self.cache_dir.is_dir():
            return []
        found = []
        for path in self.cache_dir.glob(f"{self._stem(curve)}_upto*.csv"):
            match = self._BOUND_PATTERN.search(path.name)
            if match:
                found.append((int(match.group(1)), path))
        return sorted(found)

    def load(self, curve) -> Tuple[int, Dict[int, int]]:
        """
        读取覆盖范围最大的缓存文件

        Returns:
            (已覆盖的上界, {p: a_p})；没有缓存时返回 (1, {})
        """
        files = self._files(curve)
        if not files:
            return 1, {}
        bound, path = files[-1]
        table: Dict[int, int] = {}
        for row in read_csv_rows(path, ['p', 'ap']):
            try:
                table[int(row[0])] = int(row[1])
            except (ValueError, IndexError) as e:
                raise DataIOError(f"{path}: 行格式错误: {row}") from e
        expected = [int(p) for p in shared_table(max(bound, 2)).primes_upto(bound)] if bound >= 2 else []
        if list(table) != expected:
            raise DataIOError(f"{path}: 素数不连续或未升序，缓存已损坏")
        logger.debug(f"读取缓存 {path.name}: {len(table)} 个素数")
        return bound, table

    def store(self, curve, bound: int, table: Dict[int, int]):
        """写入新的缓存文件并删除覆盖范围更小的旧文件"""
        rows = sorted((p, a) for p, a in table.items() if p <= bound)
        path = self.path_for(curve, bound)
        write_csv(path, ['p', 'ap'], rows)
        for old_bound, old_path in self._files(curve):
            if old_bound < bound:
                old_path.unlink()

    def clear(self) -> int:
        """删除全部缓存文件，返回删除个数"""
        if not self.cache_dir.is_dir():
            return 0
        removed = 0
        for path in self.cache_dir.glob("ap_*_upto*.csv"):
            path.unlink()
            removed += 1
        logger.info(f"清理缓存完成，共删除 {removed} 个文件")
        return removed
