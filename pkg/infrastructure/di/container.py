"""
Контейнер зависимостей (Dependency Injection Container)
"""
from typing import Optional

import structlog

from application.services.experiment_service import ExperimentService
from application.services.solvers import ISolver, SolverFactory
from config.settings import Settings, get_settings
from domain.entities import Benchmark
from domain.objectives import BenchmarkObjective
from infrastructure.oracle.session import OracleSession

logger = structlog.get_logger(__name__)


class DIContainer:
    """Контейнер зависимостей (Singleton)"""

    _instance: Optional["DIContainer"] = None

    def __init__(self, settings: Optional[Settings] = None):
        """Инициализация контейнера"""
        if DIContainer._instance is not None:
            raise RuntimeError("DIContainer уже инициализирован. Используйте get_instance()")

        self.settings = settings or get_settings()
        self._experiment_service: Optional[ExperimentService] = None

        DIContainer._instance = self

    @classmethod
    def get_instance(cls) -> "DIContainer":
        """Получить экземпляр контейнера (Singleton)"""
        if cls._instance is None:
            cls._instance = cls()
        return cls._instance

    @classmethod
    def reset(cls) -> None:
        """Сбросить экземпляр (используется в тестах)"""
        cls._instance = None

    def get_experiment_service(self) -> ExperimentService:
        """Получить сервис экспериментов"""
        if self._experiment_service is None:
            self._experiment_service = ExperimentService(self.settings)
            logger.info("Сервис экспериментов инициализирован", output_dir=self.settings.output_dir)
        return self._experiment_service

    def get_solver(self, name: str, seed: Optional[int] = None) -> ISolver:
        """Получить решатель для опровержения"""
        return SolverFactory.create(name, seed=self.settings.default_seed if seed is None else seed)

    def oracle_for(self, benchmark: Benchmark, retain_log: bool = True) -> OracleSession:
        """Сессия оракула над тестовой функцией с точностью из настроек"""
        return OracleSession(
            BenchmarkObjective(benchmark),
            benchmark.domain,
            default_precision_k=self.settings.default_precision_k,
            retain_log=retain_log,
        )


def get_container() -> DIContainer:
    """Получить контейнер зависимостей"""
    return DIContainer.get_instance()
