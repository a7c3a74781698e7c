"""
Решатели-чёрные ящики с бюджетом запросов, используемые противником
"""
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np
import structlog

from application.services.optimizer_service import BasinDescentOptimizer
from domain.entities import AlgoConfig, BoxDomain, Point
from infrastructure.exceptions import InvalidInputError
from infrastructure.oracle.session import OracleSession

logger = structlog.get_logger(__name__)


def _per_axis(budget: int, dim: int) -> int:
    """Наибольшее n с n^d <= budget"""
    n = max(int(round(budget ** (1.0 / dim))), 1)
    while n ** dim > budget:
        n -= 1
    while (n + 1) ** dim <= budget:
        n += 1
    return n


class ISolver(ABC):
    """
    Решатель получает только сессию оракула и возвращает точку,
    объявленную ε-оптимальной.

    Контракт знаков: ответы оракула не несут информации о знаке цели,
    решатель не вправе предполагать f <= 0.
    """

    name: str = "solver"

    @abstractmethod
    def solve(self, session: OracleSession, domain: BoxDomain, budget: int) -> Point:
        """Найти точку, не превышая budget запросов"""
        pass


class UniformGridSolver(ISolver):
    """Равномерная решётка из floor(budget^(1/d)) узлов по оси, минимум по ней"""

    name = "grid"

    def solve(self, session: OracleSession, domain: BoxDomain, budget: int) -> Point:
        n = _per_axis(budget, domain.dim)
        if n < 2:
            axis = np.array([domain.center()[0]])
        else:
            axis = domain.lo + domain.width * (np.arange(n) / (n - 1))
        mesh = np.meshgrid(*([axis] * domain.dim), indexing="ij")
        points = np.stack([g.ravel() for g in mesh], axis=1)
        values = session.query_values(points)
        return Point.of(points[int(np.argmin(values))])


class RandomSearchSolver(ISolver):
    """Случайный поиск: budget равномерных точек"""

    name = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def solve(self, session: OracleSession, domain: BoxDomain, budget: int) -> Point:
        rng = np.random.default_rng(self.seed)
        points = rng.uniform(domain.lo, domain.hi, size=(budget, domain.dim))
        values = session.query_values(points)
        return Point.of(points[int(np.argmin(values))])


class BasinDescentSolver(ISolver):
    """
    Спуск с решёткой как решатель: шаг решётки m подобран так, чтобы
    (max_iters + 1) итераций по (решётка + градиент + значение) уложились в бюджет.
    """

    name = "basin"

    def __init__(self, step_size: float = 0.01, max_iters: int = 3):
        self.step_size = step_size
        self.max_iters = max_iters

    def config_for(self, domain: BoxDomain, budget: int) -> AlgoConfig:
        per_iteration = budget // (self.max_iters + 1) - 2
        n = _per_axis(per_iteration, domain.dim) if per_iteration > 0 else 0
        if n < 2:
            raise InvalidInputError(
                f"Бюджет {budget} мал для {self.max_iters + 1} итераций в размерности {domain.dim}"
            )
        return AlgoConfig(
            basin_bound=domain.width / (n - 1),
            step_size=self.step_size,
            max_iters=self.max_iters,
            grid_budget=n ** domain.dim,
        )

    def solve(self, session: OracleSession, domain: BoxDomain, budget: int) -> Point:
        trace = BasinDescentOptimizer(self.config_for(domain, budget)).minimize(session, domain)
        return trace.best.x


class SolverFactory:
    """Фабрика решателей по имени"""

    @staticmethod
    def names():
        return [UniformGridSolver.name, RandomSearchSolver.name, BasinDescentSolver.name]

    @staticmethod
    def create(name: str, seed: Optional[int] = None) -> ISolver:
        """
        Создать решатель

        Args:
            name: grid, random или basin
            seed: Зерно для случайного поиска
        """
        key = name.lower()
        logger.debug("Создание решателя", solver=key, seed=seed)
        if key == UniformGridSolver.name:
            return UniformGridSolver()
        if key == RandomSearchSolver.name:
            return RandomSearchSolver(seed=seed or 0)
        if key == BasinDescentSolver.name:
            return BasinDescentSolver()
        raise InvalidInputError(f"Неизвестный решатель: {name}. Доступны: {', '.join(SolverFactory.names())}")
