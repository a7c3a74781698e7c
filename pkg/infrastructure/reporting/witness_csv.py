"""
Выборка функции-свидетеля в CSV: x1..xd,w
"""
import csv
from pathlib import Path
from typing import Union

import numpy as np
import structlog

from infrastructure.exceptions import ReportIOError
from infrastructure.reporting.trace_csv import fmt

logger = structlog.get_logger(__name__)


def write_witness_samples(samples: np.ndarray, path: Union[str, Path]) -> Path:
    """Записать массив (n, d + 1): координаты точки и значение свидетеля"""
    path = Path(path)
    dim = samples.shape[1] - 1
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow([f"x{i + 1}" for i in range(dim)] + ["w"])
            writer.writerows([fmt(v) for v in row] for row in samples)
    except OSError as e:
        raise ReportIOError(str(path), str(e)) from e
    logger.info("Выборка свидетеля сохранена", path=str(path), rows=samples.shape[0])
    return path
