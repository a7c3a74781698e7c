"""
Алгоритм глобальной оптимизации с известной нижней границей бассейна притяжения:
минимум по решётке шага m, затем шаг градиентного спуска из найденной точки.
"""
import math
import time
from typing import List, Optional, Tuple

import numpy as np
import structlog

from domain.entities import (
    AlgoConfig,
    BoxDomain,
    GridMode,
    IterationRecord,
    Point,
    RunTrace,
    TerminalReason,
)
from infrastructure.exceptions import GridBudgetError, InvalidInputError
from infrastructure.oracle.session import OracleSession

logger = structlog.get_logger(__name__)

_COUNT_SLACK = 1e-9
_PROGRESS_EVERY = 1000


def _axis_coordinates(lo: float, hi: float, anchor: float, m: float) -> Tuple[np.ndarray, int]:
    """Координаты решётки по одной оси, сдвинутой так, что она проходит через anchor"""
    offset = anchor - lo
    phase = math.fmod(offset, m)
    if m - phase <= _COUNT_SLACK * m:
        phase = 0.0
    count = int(math.floor((hi - lo - phase) / m + _COUNT_SLACK)) + 1
    j_anchor = min(int(round((offset - phase) / m)), count - 1)
    coords = np.clip(anchor + (np.arange(count) - j_anchor) * m, lo, hi)
    coords[j_anchor] = anchor
    return coords, j_anchor


def _build_grid(
    domain: BoxDomain,
    anchor: np.ndarray,
    m: float,
    mode: GridMode,
    n_samples: int,
    rng: Optional[np.random.Generator],
    budget: Optional[int],
) -> Tuple[np.ndarray, int]:
    """Точки решётки и индекс якоря среди них"""
    if not m > 0:
        raise InvalidInputError(f"Шаг решётки должен быть положительным: {m}")
    anchor = domain.clip(np.asarray(anchor, dtype=np.float64))
    axes, anchor_idx = zip(*(_axis_coordinates(domain.lo, domain.hi, a, m) for a in anchor))
    counts = [len(a) for a in axes]

    if mode == GridMode.FULL:
        required = math.prod(counts)
        if budget is not None and required > budget:
            raise GridBudgetError(required, budget)
        mesh = np.meshgrid(*axes, indexing="ij")
        points = np.stack([g.ravel() for g in mesh], axis=1)
        return points, int(np.ravel_multi_index(anchor_idx, counts))

    # Выборочный режим: якорь, координатные линии через якорь и равномерная выборка узлов
    required = 1 + sum(c - 1 for c in counts) + n_samples
    if budget is not None and required > budget:
        raise GridBudgetError(required, budget)
    blocks: List[np.ndarray] = [anchor[None, :]]
    for i, axis in enumerate(axes):
        others = np.delete(axis, anchor_idx[i])
        line = np.repeat(anchor[None, :], len(others), axis=0)
        line[:, i] = others
        blocks.append(line)
    if n_samples > 0:
        rng = rng if rng is not None else np.random.default_rng(0)
        picks = np.stack(
            [axis[rng.integers(0, len(axis), size=n_samples)] for axis in axes], axis=1
        )
        blocks.append(picks)
    return np.vstack(blocks), 0


def grid_points(
    domain: BoxDomain,
    anchor: Point,
    m: float,
    mode: GridMode = GridMode.FULL,
    n_samples: int = 0,
    rng: Optional[np.random.Generator] = None,
    budget: Optional[int] = None,
) -> np.ndarray:
    """
    Решётка шага m, проходящая через якорь.

    Args:
        domain: Куб [a, b]^d
        anchor: Якорь (обрезается до области)
        m: Шаг решётки (нижняя граница стороны бассейна)
        mode: full - декартово произведение в лексикографическом порядке,
              sampled - якорь, координатные линии через него и n_samples случайных узлов
        n_samples: Число случайных узлов для выборочного режима
        rng: Генератор случайных чисел
        budget: Максимальное число точек

    Returns:
        Массив точек формы (n, d)
    """
    points, _ = _build_grid(domain, Point.of(anchor).as_array(), m, mode, n_samples, rng, budget)
    return points


def _grid_argmin(
    session: OracleSession, points: np.ndarray, k: Optional[int]
) -> Tuple[int, np.ndarray, float, np.ndarray]:
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.shape[0] == 0:
        raise InvalidInputError("Пустая последовательность точек")
    values = session.query_values(points, k)
    idx = int(np.argmin(values))
    return idx, points[idx], float(values[idx]), values


def grid_argmin(
    session: OracleSession, points: np.ndarray, k: Optional[int] = None
) -> Tuple[int, Point, float]:
    """Первая точка с минимальным ответом оракула (каждая точка запрашивается один раз)"""
    idx, point, value, _ = _grid_argmin(session, points, k)
    return idx, Point.of(point), value


def _descend(
    session: OracleSession, x: np.ndarray, t: float, k: Optional[int] = None
) -> Tuple[np.ndarray, np.ndarray]:
    g = session.query_gradients(x, k)[0]
    return session.domain.clip(x - t * g), g


def gd_step(session: OracleSession, x: Point, t: float, k: Optional[int] = None) -> Point:
    """Шаг градиентного спуска x - t * grad f(x) с покоординатным обрезанием до области"""
    if not t > 0:
        raise InvalidInputError(f"Шаг должен быть положительным: {t}")
    new_x, _ = _descend(session, Point.of(x).as_array(), t, k)
    return Point.of(new_x)


class BasinDescentOptimizer:
    """Спуск с решёткой, привязанной к текущей итерации"""

    def __init__(self, config: AlgoConfig):
        self.config = config

    def minimize(
        self,
        session: OracleSession,
        domain: BoxDomain,
        anchor: Optional[Point] = None,
    ) -> RunTrace:
        """
        Запуск алгоритма

        Args:
            session: Сессия оракула (единственный доступ к цели)
            domain: Область [a, b]^d
            anchor: Якорь начальной решётки (по умолчанию нижний угол области)

        Returns:
            Трасса всех итераций
        """
        cfg = self.config.validate(domain)
        rng = np.random.default_rng(cfg.seed)
        k_q = cfg.query_precision_k
        t = cfg.step_size
        start_anchor = (anchor or domain.lower_corner()).as_array()

        logger.info(
            "Запуск спуска с решёткой",
            dim=domain.dim,
            m=cfg.basin_bound,
            t=t,
            max_iters=cfg.max_iters,
            grid_mode=cfg.grid_mode.value,
        )
        started = time.perf_counter()

        records: List[IterationRecord] = []
        best_history: List[float] = []
        reason = TerminalReason.MAX_ITERS
        start_value = math.nan
        x = start_anchor

        for k in range(cfg.max_iters + 1):
            grid, anchor_idx = _build_grid(
                domain, x, cfg.basin_bound, cfg.grid_mode, cfg.n_samples, rng, cfg.grid_budget
            )
            idx, _, f_z, values = _grid_argmin(session, grid, k_q)
            if k == 0:
                start_value = float(values[anchor_idx])
            z = grid[idx]

            x, g = _descend(session, z, t, k_q)
            f_x = float(session.query_values(x, k_q)[0])
            grad_norm = float(np.linalg.norm(g))
            records.append(IterationRecord(
                k=k,
                z=Point.of(z),
                x=Point.of(x),
                f_z=f_z,
                f_x=f_x,
                grad_norm=grad_norm,
                queries_cum=session.query_count,
            ))
            best_history.append(min(f_x, best_history[-1]) if best_history else f_x)

            if k and k % _PROGRESS_EVERY == 0:
                logger.debug("Итерация", k=k, f_x=f_x, grad_norm=grad_norm)
            if cfg.grad_tolerance > 0 and grad_norm <= cfg.grad_tolerance:
                reason = TerminalReason.GRAD_TOLERANCE
                break
            w = cfg.stall_window
            if w > 0 and k >= w and best_history[k - w] - best_history[k] <= cfg.stall_tolerance:
                reason = TerminalReason.STALLED
                break

        trace = RunTrace(
            records=tuple(records),
            total_queries=session.query_count,
            terminal_reason=reason,
            start_value=start_value,
        )
        logger.info(
            "Спуск завершён",
            iterations=len(records),
            final_f=trace.final.f_x,
            queries=trace.total_queries,
            reason=reason.value,
            seconds=round(time.perf_counter() - started, 3),
        )
        return trace


def minimize(
    session: OracleSession,
    domain: BoxDomain,
    config: AlgoConfig,
    anchor: Optional[Point] = None,
) -> RunTrace:
    """Функциональная обёртка над BasinDescentOptimizer"""
    return BasinDescentOptimizer(config).minimize(session, domain, anchor)
