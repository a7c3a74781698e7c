"""
Сводная таблица запусков (CSV). Время выполнения в таблицу не попадает,
чтобы повторные запуски давали побайтно одинаковые файлы.
"""
import csv
from pathlib import Path
from typing import Iterable, List, Union

import structlog

from domain.entities import RunSummary
from infrastructure.exceptions import ReportIOError
from infrastructure.reporting.trace_csv import fmt

logger = structlog.get_logger(__name__)

SUMMARY_HEADER = [
    "benchmark", "dim", "grid_mode", "step_size", "basin_bound", "seed", "status",
    "iterations", "queries", "start_f", "final_f", "gap", "terminal_reason",
    "final_point", "error",
]


def summary_row(s: RunSummary) -> List[str]:
    point = ";".join(fmt(c) for c in s.final_point.coords) if s.final_point else ""
    return [
        s.benchmark,
        str(s.dim),
        s.grid_mode.value,
        fmt(s.step_size),
        fmt(s.basin_bound),
        str(s.seed),
        s.status,
        str(s.iterations),
        str(s.queries),
        fmt(s.start_f) if s.ok else "",
        fmt(s.final_f) if s.ok else "",
        fmt(s.gap) if s.ok else "",
        s.terminal_reason.value if s.terminal_reason else "",
        point,
        s.error,
    ]


def write_summary(rows: Iterable[RunSummary], path: Union[str, Path]) -> Path:
    """Записать сводную таблицу"""
    path = Path(path)
    rows = list(rows)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(SUMMARY_HEADER)
            writer.writerows(summary_row(s) for s in rows)
    except OSError as e:
        raise ReportIOError(str(path), str(e)) from e
    logger.info("Сводная таблица сохранена", path=str(path), rows=len(rows))
    return path
