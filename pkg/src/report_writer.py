"""
报告与数据文件的读写：JSON 报告、CSV 表格、`n,bn` 系数文件
"""
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Union

import numpy as np
from gmpy2 import mpq

from .errors import DataIOError, UsageError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path, None]


def jsonable(value: Any) -> Any:
    """把报告里的 mpq / numpy 标量 / 元组转换为 JSON 可序列化的值"""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, type(mpq())):
        if value.denominator == 1:
            return int(value.numerator)
        return f"{int(value.numerator)}/{int(value.denominator)}"
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def dumps_json(payload: Any) -> str:
    return json.dumps(jsonable(payload), ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def _write_text(path: PathLike, text: str):
    if path is None:
        sys.stdout.write(text)
        return
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
    except OSError as e:
        raise DataIOError(f"无法写入 {path}: {e}") from e
    logger.info(f"已写入 {path}")


def write_json(path: PathLike, payload: Any):
    _write_text(path, dumps_json(payload))


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow(jsonable(list(row)))
    _write_text(path, buffer.getvalue())


def read_csv_rows(path: Union[str, Path], header: Sequence[str]) -> List[List[str]]:
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8', newline='') as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise DataIOError(f"无法读取 {path}: {e}") from e
    if not rows or [c.strip() for c in rows[0]] != list(header):
        raise DataIOError(f"{path}: 表头应为 {','.join(header)}")
    return [r for r in rows[1:] if r]


def read_coefficients(path: Union[str, Path]) -> np.ndarray:
    """
    读取 `n,bn` 系数文件，n 必须从 1 起连续

    Returns:
        下标 n 处为 b(n) 的 int64 数组，下标 0 为 0
    """
    rows = read_csv_rows(path, ['n', 'bn'])
    values = [0]
    for expected, row in enumerate(rows, start=1):
        try:
            n, bn = int(row[0]), int(row[1])
        except (ValueError, IndexError) as e:
            raise DataIOError(f"{path}: 第 {expected} 行格式错误: {row}") from e
        if n != expected:
            raise DataIOError(f"{path}: 系数下标应为 {expected}，读到 {n}")
        values.append(bn)
    if len(values) < 2:
        raise DataIOError(f"{path}: 没有系数")
    return np.array(values, dtype=np.int64)


class ReportWriter:
    """按命令行的 --out / --format 输出报告或表格，out 为空时写到标准输出"""

    def __init__(self, out: PathLike = None, fmt: Optional[str] = None):
        self.out = Path(out) if out else None
        self.fmt = fmt

    def emit_report(self, report):
        if self.fmt == 'csv':
            raise UsageError("报告只能输出为 JSON")
        write_json(self.out, report.to_dict())

    def emit_rows(self, header: Sequence[str], rows: Iterable[Sequence[Any]]):
        write_csv(self.out, header, rows)
