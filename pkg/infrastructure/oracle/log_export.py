"""
Экспорт журнала запросов в CSV: seq,kind,k,point,response
"""
import csv
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Union

import structlog

from domain.entities import QueryRecord
from domain.precision import canonical, from_numerator
from infrastructure.exceptions import ReportIOError

logger = structlog.get_logger(__name__)

QUERY_LOG_HEADER = ["seq", "kind", "k", "point", "response"]


def _fixed_text(value: Fraction, k: int) -> str:
    # ответы оракула точно представимы при 10^-k
    return canonical(from_numerator(value.numerator * 10 ** k // value.denominator, k))


def format_record(record: QueryRecord) -> list:
    """Строка CSV для одной записи журнала"""
    point = ";".join(canonical(c) for c in record.point)
    if isinstance(record.response, tuple):
        response = ";".join(_fixed_text(r, record.precision_k) for r in record.response)
    else:
        response = _fixed_text(record.response, record.precision_k)
    return [record.seq, record.kind.value, record.precision_k, point, response]


def write_query_log(records: Iterable[QueryRecord], path: Union[str, Path]) -> Path:
    """Записать журнал запросов в CSV"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(QUERY_LOG_HEADER)
            count = 0
            for record in records:
                writer.writerow(format_record(record))
                count += 1
    except OSError as e:
        raise ReportIOError(str(path), str(e)) from e
    logger.info("Журнал запросов сохранён", path=str(path), records=count)
    return path
