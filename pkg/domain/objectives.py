"""
Интерфейс целевой функции, скрытой за оракулом
"""
from abc import ABC, abstractmethod

import numpy as np

from domain.entities import Benchmark
from infrastructure.exceptions import UnsupportedQueryError


class IObjective(ABC):
    """Интерфейс вычислимой целевой функции (значение и, возможно, градиент)"""

    @property
    @abstractmethod
    def dim(self) -> int:
        """Размерность аргумента"""
        pass

    @abstractmethod
    def values(self, points: np.ndarray) -> np.ndarray:
        """Значения в точках массива формы (n, d)"""
        pass

    @property
    def has_gradient(self) -> bool:
        return False

    def gradients(self, points: np.ndarray) -> np.ndarray:
        """Градиенты в точках, форма (n, d)"""
        raise UnsupportedQueryError(f"{type(self).__name__} не предоставляет градиент")


class BenchmarkObjective(IObjective):
    """Тестовая функция как цель оракула"""

    def __init__(self, benchmark: Benchmark):
        self.benchmark = benchmark

    @property
    def dim(self) -> int:
        return self.benchmark.dim

    @property
    def has_gradient(self) -> bool:
        return True

    def values(self, points: np.ndarray) -> np.ndarray:
        return self.benchmark.value_fn(points)

    def gradients(self, points: np.ndarray) -> np.ndarray:
        return self.benchmark.grad_fn(points)


class CallableObjective(IObjective):
    """Произвольная векторизованная функция f(points) -> values, градиент опционален"""

    def __init__(self, dim: int, value_fn, grad_fn=None):
        self._dim = dim
        self._value_fn = value_fn
        self._grad_fn = grad_fn

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def has_gradient(self) -> bool:
        return self._grad_fn is not None

    def values(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(self._value_fn(points), dtype=np.float64)

    def gradients(self, points: np.ndarray) -> np.ndarray:
        if self._grad_fn is None:
            return super().gradients(points)
        return np.asarray(self._grad_fn(points), dtype=np.float64)


class ValueOnlyObjective(CallableObjective):
    """Цель без градиентного оракула"""

    def __init__(self, dim: int, value_fn):
        super().__init__(dim, value_fn, None)


class ZeroObjective(IObjective):
    """Тождественный нуль: ответ оракула на любой запрос равен 0"""

    def __init__(self, dim: int):
        self._dim = dim

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def has_gradient(self) -> bool:
        return True

    def values(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(points.shape[0], dtype=np.float64)

    def gradients(self, points: np.ndarray) -> np.ndarray:
        return np.zeros_like(points, dtype=np.float64)


class CountingObjective(IObjective):
    """Обёртка, считающая число вычисленных точек (проверка доступа только через оракул)"""

    def __init__(self, inner: IObjective):
        self.inner = inner
        self.value_evaluations = 0
        self.gradient_evaluations = 0

    @property
    def dim(self) -> int:
        return self.inner.dim

    @property
    def has_gradient(self) -> bool:
        return self.inner.has_gradient

    def values(self, points: np.ndarray) -> np.ndarray:
        self.value_evaluations += points.shape[0]
        return self.inner.values(points)

    def gradients(self, points: np.ndarray) -> np.ndarray:
        self.gradient_evaluations += points.shape[0]
        return self.inner.gradients(points)

    @property
    def evaluations(self) -> int:
        return self.value_evaluations + self.gradient_evaluations
