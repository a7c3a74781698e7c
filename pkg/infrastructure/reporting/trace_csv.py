"""
CSV-трасса запуска: iter,f_z,f_x,grad_norm,queries_cum,x1..xd
"""
import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple, Union

import structlog

from domain.entities import RunTrace
from infrastructure.exceptions import ReportIOError, TraceParseError

logger = structlog.get_logger(__name__)

TRACE_COLUMNS = ["iter", "f_z", "f_x", "grad_norm", "queries_cum"]


def fmt(value: float) -> str:
    """Десятичная запись с 12 значащими цифрами"""
    return f"{value:.12g}"


@dataclass(frozen=True)
class TraceRow:
    """Строка трассы, прочитанная из CSV"""
    k: int
    f_z: float
    f_x: float
    grad_norm: float
    queries_cum: int
    x: Tuple[float, ...]


def trace_header(dim: int) -> List[str]:
    return TRACE_COLUMNS + [f"x{i + 1}" for i in range(dim)]


def write_trace(trace: RunTrace, path: Union[str, Path]) -> Path:
    """Записать трассу, одна строка на итерацию"""
    path = Path(path)
    dim = trace.final.x.dim if trace.records else 0
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(trace_header(dim))
            for r in trace.records:
                writer.writerow(
                    [r.k, fmt(r.f_z), fmt(r.f_x), fmt(r.grad_norm), r.queries_cum]
                    + [fmt(c) for c in r.x.coords]
                )
    except OSError as e:
        raise ReportIOError(str(path), str(e)) from e
    logger.debug("Трасса сохранена", path=str(path), rows=len(trace.records))
    return path


def _parse_row(row: List[str], width: int, line: int) -> TraceRow:
    if len(row) != width:
        raise TraceParseError(f"ожидалось {width} столбцов, получено {len(row)}", line)
    try:
        k = int(row[0])
        f_z, f_x, grad_norm = (float(v) for v in row[1:4])
        queries = int(row[4])
        x = tuple(float(v) for v in row[5:])
    except ValueError as e:
        raise TraceParseError(f"нечисловое значение: {e}", line) from None
    if not all(math.isfinite(v) for v in (f_z, f_x, grad_norm) + x):
        raise TraceParseError("значения должны быть конечными", line)
    return TraceRow(k, f_z, f_x, grad_norm, queries, x)


def read_trace(path: Union[str, Path]) -> List[TraceRow]:
    """
    Прочитать трассу.

    Raises:
        ReportIOError: файл недоступен
        TraceParseError: неверный заголовок или строка (с номером строки файла)
    """
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise ReportIOError(str(path), str(e)) from e

    if not rows:
        raise TraceParseError("пустой файл, нет заголовка", 1)
    header = rows[0]
    dim = len(header) - len(TRACE_COLUMNS)
    if dim < 1 or header != trace_header(dim):
        raise TraceParseError(f"неверный заголовок: {','.join(header)}", 1)
    return [
        _parse_row(row, len(header), line)
        for line, row in enumerate(rows[1:], start=2)
        if row
    ]
