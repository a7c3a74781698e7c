"""
Сессия оракула: запросы значения и градиента с конечной точностью и журнал запросов
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

import numpy as np

from domain.entities import BoxDomain, Point, QueryKind, QueryRecord, Response
from domain.objectives import IObjective
from domain.precision import floor_scaled, from_numerator, numerator, scaled_to_float
from infrastructure.exceptions import (
    InvalidInputError,
    QueryBudgetExceeded,
    UnsupportedQueryError,
)

PointLike = Union[Point, np.ndarray, Tuple[float, ...], float]


@dataclass(frozen=True)
class _QueryBatch:
    """Пакет записей журнала в компактной форме (числители при 10^-k)"""
    start_seq: int
    kind: QueryKind
    precision_k: int
    input_k: int
    point_numerators: np.ndarray
    response_numerators: np.ndarray

    def __len__(self) -> int:
        return self.point_numerators.shape[0]

    def record(self, i: int) -> QueryRecord:
        point = tuple(from_numerator(n, self.input_k) for n in self.point_numerators[i])
        scale = 10 ** self.precision_k
        if self.kind == QueryKind.VALUE:
            response: Response = Fraction(int(self.response_numerators[i]), scale)
        else:
            response = tuple(Fraction(int(n), scale) for n in self.response_numerators[i])
        return QueryRecord(
            seq=self.start_seq + i,
            point=point,
            precision_k=self.precision_k,
            kind=self.kind,
            response=response,
        )


class OracleSession:
    """
    Доступ к целевой функции только через запросы.

    Точка запроса переводится в форму конечной точности (input_precision_k знаков),
    ответ - усечение f(x) до precision_k знаков, так что |r - f(x)| < 10^-k.
    Журнал только дополняется.
    """

    def __init__(
        self,
        target: IObjective,
        domain: BoxDomain,
        default_precision_k: int = 12,
        input_precision_k: Optional[int] = None,
        retain_log: bool = True,
        max_queries: Optional[int] = None,
    ):
        """
        Args:
            target: Целевая функция
            domain: Объявленная область определения
            default_precision_k: Точность ответа по умолчанию
            input_precision_k: Точность записи точки запроса (по умолчанию = default_precision_k)
            retain_log: Хранить записи журнала (иначе только счётчик)
            max_queries: Бюджет запросов, превышение - QueryBudgetExceeded
        """
        if target.dim != domain.dim:
            raise InvalidInputError(
                f"Размерность цели {target.dim} не совпадает с областью {domain.dim}"
            )
        self._check_k(default_precision_k)
        self._target = target
        self.domain = domain
        self.default_precision_k = default_precision_k
        self.input_precision_k = default_precision_k if input_precision_k is None else input_precision_k
        self._check_k(self.input_precision_k)
        self.retain_log = retain_log
        self.max_queries = max_queries
        self._batches: List[_QueryBatch] = []
        self._count = 0

    @staticmethod
    def _check_k(k: int) -> None:
        if not isinstance(k, (int, np.integer)) or not 1 <= k <= 15:
            raise InvalidInputError(f"Точность k должна быть целым 1..15: {k}")

    @property
    def has_gradient(self) -> bool:
        return self._target.has_gradient

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def query_count(self) -> int:
        return self._count

    def _as_points(self, points: Union[PointLike, np.ndarray]) -> np.ndarray:
        if isinstance(points, Point):
            arr = points.as_array()[None, :]
        else:
            arr = np.asarray(points, dtype=np.float64)
            if arr.ndim <= 1:
                arr = arr.reshape(1, -1)
        if arr.shape[1] != self.dim:
            raise InvalidInputError(f"Ожидалась размерность {self.dim}, получено {arr.shape[1]}")
        self.domain.require(arr)
        return arr

    def _prepare(self, points) -> Tuple[np.ndarray, np.ndarray]:
        arr = self._as_points(points)
        numerators = floor_scaled(arr, self.input_precision_k)
        return numerators, scaled_to_float(numerators, self.input_precision_k)

    def _reserve(self, n: int) -> int:
        if self.max_queries is not None and self._count + n > self.max_queries:
            raise QueryBudgetExceeded(self.max_queries)
        start = self._count
        self._count += n
        return start

    def _append(self, start, kind, k, point_numerators, response_numerators) -> None:
        if self.retain_log:
            self._batches.append(_QueryBatch(
                start_seq=start,
                kind=kind,
                precision_k=k,
                input_k=self.input_precision_k,
                point_numerators=point_numerators,
                response_numerators=response_numerators,
            ))

    def _resolve_k(self, k: Optional[int]) -> int:
        k = self.default_precision_k if k is None else k
        self._check_k(k)
        return k

    def _values(self, points, k: int) -> np.ndarray:
        numerators, eval_points = self._prepare(points)
        start = self._reserve(eval_points.shape[0])
        responses = floor_scaled(self._target.values(eval_points), k)
        self._append(start, QueryKind.VALUE, k, numerators, responses)
        return responses

    def _gradients(self, points, k: int) -> np.ndarray:
        if not self._target.has_gradient:
            raise UnsupportedQueryError("Цель не предоставляет градиентный оракул")
        numerators, eval_points = self._prepare(points)
        start = self._reserve(eval_points.shape[0])
        grads = np.asarray(self._target.gradients(eval_points), dtype=np.float64)
        responses = floor_scaled(grads, k)
        self._append(start, QueryKind.GRADIENT, k, numerators, responses)
        return responses

    def query_values(self, points, k: Optional[int] = None) -> np.ndarray:
        """Пакетный запрос значений, возвращает усечённые значения как float64"""
        k = self._resolve_k(k)
        return scaled_to_float(self._values(points, k), k)

    def query_value(self, x: PointLike, k: Optional[int] = None) -> Fraction:
        """Запрос значения в одной точке, точный рациональный ответ"""
        k = self._resolve_k(k)
        return Fraction(int(self._values(x, k)[0]), 10 ** k)

    def query_gradients(self, points, k: Optional[int] = None) -> np.ndarray:
        """Пакетный запрос градиентов (покоординатное усечение), форма (n, d)"""
        k = self._resolve_k(k)
        return scaled_to_float(self._gradients(points, k), k)

    def query_gradient(self, x: PointLike, k: Optional[int] = None) -> Tuple[Fraction, ...]:
        """Запрос градиента в одной точке, точные рациональные координаты"""
        k = self._resolve_k(k)
        return tuple(Fraction(int(n), 10 ** k) for n in self._gradients(x, k)[0])

    def export_log(self) -> Tuple[QueryRecord, ...]:
        """Неизменяемый снимок журнала"""
        if not self.retain_log:
            raise UnsupportedQueryError("Сессия создана без хранения журнала")
        return tuple(batch.record(i) for batch in self._batches for i in range(len(batch)))

    def queried_points(self) -> np.ndarray:
        """Все точки запросов (в форме конечной точности) как массив (n, d)"""
        if not self.retain_log:
            raise UnsupportedQueryError("Сессия создана без хранения журнала")
        if not self._batches:
            return np.empty((0, self.dim), dtype=np.float64)
        return np.vstack([
            scaled_to_float(b.point_numerators, b.input_k) for b in self._batches
        ])

    def replay(self, record: QueryRecord) -> Response:
        """Повторно вычислить ответ на записанный запрос (без записи в журнал)"""
        numerators = np.array(
            [[numerator(c) for c in record.point]],
            dtype=np.int64,
        )
        point = scaled_to_float(numerators, record.point[0].precision_k)
        scale = 10 ** record.precision_k
        if record.kind == QueryKind.VALUE:
            n = floor_scaled(self._target.values(point), record.precision_k)[0]
            return Fraction(int(n), scale)
        grads = floor_scaled(np.asarray(self._target.gradients(point)), record.precision_k)[0]
        return tuple(Fraction(int(n), scale) for n in grads)
