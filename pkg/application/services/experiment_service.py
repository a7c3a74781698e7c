"""
Сервис экспериментов (Application Service): запуск алгоритма на тестовых функциях,
трассы, сводные таблицы и графики
"""
import time
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from application.services.optimizer_service import minimize
from config.settings import Settings, get_settings
from domain.entities import AlgoConfig, Benchmark, GridMode, Point, RunSummary
from domain.objectives import BenchmarkObjective
from infrastructure.benchmarks.factory import BenchmarkFactory
from infrastructure.exceptions import GlobalOptException, InvalidInputError, ReportIOError
from infrastructure.oracle.log_export import write_query_log
from infrastructure.oracle.session import OracleSession
from infrastructure.reporting.plotter import render_plot
from infrastructure.reporting.summary import write_summary
from infrastructure.reporting.trace_csv import write_trace

logger = structlog.get_logger(__name__)

SWEEP_2D = ["rastrigin", "ackley", "sphere", "rosenbrock", "beale", "booth"]
SWEEP_HIGH_DIM = ["rastrigin", "sphere", "rosenbrock"]
HIGH_DIM = 20


class StartMode(str, Enum):
    """Начальная точка: нижний угол области, случайная точка или заданная"""
    CORNER = "corner"
    RANDOM = "random"
    POINT = "point"


class ExperimentConfig(BaseModel):
    """Конфигурация одного запуска; незаданные поля берутся из таблицы параметров и настроек"""

    model_config = ConfigDict(extra="forbid")

    function: str = Field(..., description="Имя тестовой функции")
    dim: int = Field(default=2, ge=1, description="Размерность")
    step_size: Optional[float] = Field(default=None, gt=0, description="Шаг спуска t")
    basin_bound: Optional[float] = Field(default=None, gt=0, description="Граница бассейна m")
    max_iters: Optional[int] = Field(default=None, ge=0, description="Число итераций L")
    grid_mode: Optional[GridMode] = Field(default=None, description="full или sampled")
    n_samples: Optional[int] = Field(default=None, ge=0, description="Случайные узлы в режиме sampled")
    grad_tolerance: float = Field(default=0.0, ge=0, description="Порог нормы градиента (0 - выкл.)")
    precision_k: Optional[int] = Field(default=None, ge=1, le=15, description="Точность ответов оракула")
    grid_budget: Optional[int] = Field(default=None, ge=1, description="Наибольший размер решётки")
    stall_window: Optional[int] = Field(default=None, ge=0, description="Окно остановки по застою")
    stall_tolerance: Optional[float] = Field(default=None, ge=0, description="Порог улучшения за окно")
    start: StartMode = Field(default=StartMode.CORNER, description="Режим начальной точки")
    start_point: Optional[List[float]] = Field(default=None, description="Начальная точка для start=point")
    seed: int = Field(default=0, ge=0, description="Зерно генератора")
    out_dir: Optional[str] = Field(default=None, description="Каталог результатов")
    plot: bool = Field(default=False, description="Построить SVG-график")
    query_log: bool = Field(default=False, description="Сохранить журнал запросов к оракулу")

    @field_validator("function")
    @classmethod
    def _known_function(cls, v: str) -> str:
        name = v.strip().lower()
        if name not in BenchmarkFactory.names():
            raise ValueError(f"неизвестная функция {v}")
        return name

    @field_validator("start_point", mode="before")
    @classmethod
    def _split_point(cls, v: Any) -> Any:
        if isinstance(v, str):
            return [float(c) for c in v.replace(";", ",").split(",") if c.strip()]
        return v

    @model_validator(mode="after")
    def _start_consistent(self) -> "ExperimentConfig":
        if self.start == StartMode.POINT:
            if not self.start_point or len(self.start_point) != self.dim:
                raise ValueError(f"start=point требует start_point из {self.dim} координат")
        return self

    @classmethod
    def build(cls, **values: Any) -> "ExperimentConfig":
        """Создать конфигурацию, ошибки валидации - InvalidInputError"""
        try:
            return cls.model_validate({k: v for k, v in values.items() if v is not None})
        except ValidationError as e:
            raise InvalidInputError(f"Некорректная конфигурация эксперимента: {e}") from None

    def run_name(self, grid_mode: GridMode) -> str:
        return f"{self.function}_d{self.dim}_{grid_mode.value}_s{self.seed}"


def load_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Плоский файл конфигурации: одна пара `key = value` на строку,
    пустые строки и строки с # пропускаются.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ReportIOError(str(path), str(e)) from e
    values: Dict[str, str] = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise InvalidInputError(f"{path}:{number}: ожидалось `key = value`")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


class ExperimentService:
    """Сервис запуска экспериментов"""

    def __init__(self, settings: Optional[Settings] = None):
        """
        Args:
            settings: Настройки (по умолчанию глобальные)
        """
        self.settings = settings or get_settings()

    def resolve(self, cfg: ExperimentConfig) -> Tuple[Benchmark, AlgoConfig, Point]:
        """Тестовая функция, конфигурация алгоритма и начальный якорь"""
        s = self.settings
        benchmark, params = BenchmarkFactory.lookup(cfg.function, cfg.dim)
        high_dim = cfg.dim >= s.high_dim_threshold
        grid_mode = cfg.grid_mode or (GridMode.SAMPLED if high_dim else GridMode.FULL)
        default_iters = s.max_iters_high_dim if high_dim else s.max_iters_low_dim
        algo = AlgoConfig(
            basin_bound=cfg.basin_bound or params.basin_bound,
            step_size=cfg.step_size or params.step_size,
            max_iters=default_iters if cfg.max_iters is None else cfg.max_iters,
            grid_mode=grid_mode,
            n_samples=s.high_dim_samples if cfg.n_samples is None else cfg.n_samples,
            grad_tolerance=cfg.grad_tolerance,
            query_precision_k=cfg.precision_k or s.default_precision_k,
            grid_budget=cfg.grid_budget or s.grid_budget,
            stall_window=s.stall_window if cfg.stall_window is None else cfg.stall_window,
            stall_tolerance=s.stall_tolerance if cfg.stall_tolerance is None else cfg.stall_tolerance,
            seed=cfg.seed,
        )

        domain = benchmark.domain
        if cfg.start == StartMode.RANDOM:
            rng = np.random.default_rng(cfg.seed)
            anchor = Point.of(rng.uniform(domain.lo, domain.hi, size=domain.dim))
        elif cfg.start == StartMode.POINT:
            anchor = Point.of(cfg.start_point)
            domain.require(anchor)
        else:
            anchor = domain.lower_corner()
        return benchmark, algo, anchor

    def run_experiment(self, cfg: ExperimentConfig) -> RunSummary:
        """
        Запустить алгоритм, записать трассу (и, по запросу, график и журнал запросов)

        Returns:
            RunSummary с итоговым значением, разрывом до известного минимума и числом запросов
        """
        benchmark, algo, anchor = self.resolve(cfg)
        out_dir = Path(cfg.out_dir or self.settings.output_dir)
        name = cfg.run_name(algo.grid_mode)

        session = OracleSession(
            BenchmarkObjective(benchmark),
            benchmark.domain,
            default_precision_k=algo.query_precision_k,
            retain_log=cfg.query_log,
        )
        started = time.perf_counter()
        trace = minimize(session, benchmark.domain, algo, anchor)
        wall_time = time.perf_counter() - started

        trace_path = write_trace(trace, out_dir / f"{name}.csv")
        if cfg.plot:
            render_plot(trace_path, out_dir / f"{name}.svg", title=f"{benchmark.name} d={benchmark.dim}")
        if cfg.query_log:
            write_query_log(session.export_log(), out_dir / f"{name}_queries.csv")

        final = trace.final
        summary = RunSummary(
            benchmark=benchmark.name,
            dim=benchmark.dim,
            grid_mode=algo.grid_mode,
            step_size=algo.step_size,
            basin_bound=algo.basin_bound,
            seed=cfg.seed,
            iterations=len(trace),
            queries=trace.total_queries,
            start_f=trace.start_value,
            final_f=final.f_x,
            gap=final.f_x - benchmark.min_value,
            terminal_reason=trace.terminal_reason,
            final_point=final.x,
            trace_path=str(trace_path),
            wall_time=wall_time,
        )
        logger.info(
            "Эксперимент завершён",
            benchmark=benchmark.name,
            dim=benchmark.dim,
            gap=summary.gap,
            queries=summary.queries,
            seconds=round(wall_time, 3),
        )
        return summary

    def run_safely(self, cfg: ExperimentConfig) -> RunSummary:
        """Запуск, при котором ошибка превращается в строку таблицы со статусом error"""
        try:
            return self.run_experiment(cfg)
        except GlobalOptException as e:
            logger.warning("Запуск завершился ошибкой", benchmark=cfg.function, dim=cfg.dim, error=str(e))
            return self._error_row(cfg, e)
        except Exception as e:
            logger.exception("Непредвиденная ошибка запуска", benchmark=cfg.function, dim=cfg.dim)
            return self._error_row(cfg, e)

    def _error_row(self, cfg: ExperimentConfig, error: Exception) -> RunSummary:
        mode = cfg.grid_mode or (
            GridMode.SAMPLED if cfg.dim >= self.settings.high_dim_threshold else GridMode.FULL
        )
        params = BenchmarkFactory.spec(cfg.function).params
        return RunSummary(
            benchmark=cfg.function,
            dim=cfg.dim,
            grid_mode=mode,
            step_size=cfg.step_size or params.step_size,
            basin_bound=cfg.basin_bound or params.basin_bound,
            seed=cfg.seed,
            status="error",
            error=f"{type(error).__name__}: {error}",
        )

    def sweep_configs(self, **overrides: Any) -> List[ExperimentConfig]:
        """Девять запусков: шесть функций в 2-D и три в 20-D с выборочной решёткой"""
        configs = [ExperimentConfig.build(function=f, dim=2, **overrides) for f in SWEEP_2D]
        configs += [
            ExperimentConfig.build(function=f, dim=HIGH_DIM, grid_mode=GridMode.SAMPLED, **overrides)
            for f in SWEEP_HIGH_DIM
        ]
        return configs

    def reproduce_all(
        self,
        out_dir: Optional[Union[str, Path]] = None,
        workers: Optional[int] = None,
        **overrides: Any,
    ) -> List[RunSummary]:
        """
        Полный прогон таблицы параметров, строки в фиксированном порядке.

        Args:
            out_dir: Каталог результатов
            workers: Число процессов (1 - последовательно)
            **overrides: Поля ExperimentConfig, общие для всех запусков
        """
        out_dir = Path(out_dir or self.settings.output_dir)
        configs = self.sweep_configs(out_dir=str(out_dir), **overrides)
        workers = workers or self.settings.workers
        logger.info("Запуск полного прогона", runs=len(configs), workers=workers)

        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_run_isolated, configs, [self.settings] * len(configs)))
        else:
            rows = [self.run_safely(cfg) for cfg in configs]

        write_summary(rows, out_dir / "summary.csv")
        failed = sum(not r.ok for r in rows)
        logger.info("Полный прогон завершён", runs=len(rows), failed=failed)
        return rows


def _run_isolated(cfg: ExperimentConfig, settings: Settings) -> RunSummary:
    return ExperimentService(settings).run_safely(cfg)
