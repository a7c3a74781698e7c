"""
Вычислимые предикаты: сертификат Липшица, сертификат бассейна притяжения
и поиск по решётке, который сертификат Липшица делает корректным.
"""
import math
from typing import Optional, Tuple, Union

import numpy as np
import structlog
from scipy import optimize

from domain.entities import Benchmark, BoxDomain, CheckReport, Point
from infrastructure.benchmarks.factory import evaluate, gradient
from infrastructure.exceptions import GridBudgetError, InvalidInputError
from infrastructure.oracle.session import OracleSession

logger = structlog.get_logger(__name__)

Real = Union[float, int]

_CHUNK = 65536
_ROOT_TOLERANCE = 1e-8
_ROOT_MIN_DISTANCE = 1e-6
_REFINE_COUNT = 20


def lipschitz_holds(L: Real, x: Point, y: Point, fx: Real, fy: Real) -> bool:
    """Q(L, x, y): |f(x) - f(y)| <= L * ||x - y||"""
    x, y = Point.of(x), Point.of(y)
    return abs(fx - fy) <= L * x.distance(y)


def lattice_spacing(dim: int, L: float, eps: float) -> float:
    """δ = 2ε / (L √d): любая точка куба ближе ε/L к узлу решётки"""
    if not L > 0 or not eps > 0:
        raise InvalidInputError(f"L и ε должны быть положительными: L={L}, ε={eps}")
    return 2 * eps / (L * math.sqrt(dim))


def _axis_count(domain: BoxDomain, delta: float) -> int:
    return int(math.ceil(domain.width / delta - 1e-12)) + 1


def predicted_lattice_size(domain: BoxDomain, L: float, eps: float) -> int:
    """Число запросов поиска по решётке: ⌈(b - a)/δ + 1⌉^d"""
    return _axis_count(domain, lattice_spacing(domain.dim, L, eps)) ** domain.dim


def lipschitz_grid_minimize(
    session: OracleSession,
    domain: BoxDomain,
    L: float,
    eps: float,
    budget: Optional[int] = 1_000_000,
    k: Optional[int] = None,
) -> Tuple[Point, float]:
    """
    Минимум по решётке шага δ = 2ε/(L√d), значение не больше f(x*) + ε
    для L-липшицевой цели.

    Решётка обходится порциями в лексикографическом порядке, каждая точка
    запрашивается ровно один раз.
    """
    delta = lattice_spacing(domain.dim, L, eps)
    per_axis = _axis_count(domain, delta)
    total = per_axis ** domain.dim
    if budget is not None and total > budget:
        raise GridBudgetError(total, budget)

    axis = np.minimum(domain.lo + np.arange(per_axis) * delta, domain.hi)
    logger.info("Поиск по решётке Липшица", dim=domain.dim, delta=delta, queries=total)

    best_value = math.inf
    best_point: Optional[np.ndarray] = None
    shape = (per_axis,) * domain.dim
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        points = axis[np.stack(np.unravel_index(flat, shape), axis=1)]
        values = session.query_values(points, k)
        idx = int(np.argmin(values))
        if values[idx] < best_value:
            best_value = float(values[idx])
            best_point = points[idx]
    return Point.of(best_point), best_value


def lipschitz_sample_check(
    b: Benchmark, L: float, n_pairs: int, seed: int = 0
) -> CheckReport:
    """Проверка Q(L, x, y) на случайных парах точек области"""
    rng = np.random.default_rng(seed)
    dom = b.domain
    xs = rng.uniform(dom.lo, dom.hi, size=(n_pairs, b.dim))
    ys = rng.uniform(dom.lo, dom.hi, size=(n_pairs, b.dim))
    gaps = np.abs(evaluate(b, xs) - evaluate(b, ys))
    bounds = L * np.linalg.norm(xs - ys, axis=1)
    bad = np.flatnonzero(gaps > bounds)
    if bad.size:
        i = int(bad[0])
        return CheckReport(
            passed=False,
            checked=i + 1,
            first_violation=i,
            detail=f"|f(x)-f(y)|={gaps[i]:.6g} > L||x-y||={bounds[i]:.6g}",
        )
    return CheckReport(passed=True, checked=n_pairs)


def basin_certificate_check(
    b: Benchmark,
    m: float,
    n_samples: int,
    seed: int = 0,
    grad_floor: float = 1e-12,
) -> CheckReport:
    """
    Опровергающая проверка предиката бассейна: grad f != 0 в кубе со стороной m
    вокруг минимума (кроме самого минимума).

    Выборка дополняется уточнением методом scipy.optimize.root из точек
    с наименьшей нормой градиента, так что стационарные точки, попавшие
    в куб, находятся и без точного попадания выборки.

    Args:
        b: Тестовая функция с известным минимумом
        m: Сторона куба
        n_samples: Число случайных точек
        seed: Зерно генератора
        grad_floor: Порог нулевого градиента для точек выборки

    Returns:
        CheckReport, first_violation - индекс точки выборки
    """
    if not m > 0 or m > b.domain.width:
        raise InvalidInputError(f"m={m} вне (0, {b.domain.width}]")
    if n_samples < 1:
        raise InvalidInputError("Нужна хотя бы одна точка выборки")

    center = b.minimizer.as_array()
    half = m / 2
    rng = np.random.default_rng(seed)
    samples = center + rng.uniform(-half, half, size=(n_samples, b.dim))
    samples = samples[np.any(samples != center, axis=1)]
    norms = np.linalg.norm(gradient(b, samples), axis=1)

    flat = np.flatnonzero(norms <= grad_floor)
    if flat.size:
        i = int(flat[0])
        return CheckReport(
            passed=False, checked=i + 1, first_violation=i,
            detail=f"нулевой градиент в {samples[i].tolist()}",
        )

    def grad_fn(x: np.ndarray) -> np.ndarray:
        return gradient(b, x)

    # у минимума |grad f| мал пропорционально расстоянию, поэтому ранжируем по отношению
    dist = np.linalg.norm(samples - center, axis=1)
    away = np.flatnonzero(dist > _ROOT_MIN_DISTANCE)
    seeds = away[np.argsort(norms[away] / dist[away])[:_REFINE_COUNT]]
    for i in seeds:
        sol = optimize.root(grad_fn, samples[i], method="hybr", options={"xtol": 1e-12})
        root = sol.x
        if not sol.success or np.max(np.abs(root - center)) > half:
            continue
        if np.linalg.norm(root - center) <= _ROOT_MIN_DISTANCE:
            continue
        if np.linalg.norm(grad_fn(root)) <= _ROOT_TOLERANCE:
            logger.info("Найдена стационарная точка в кубе", benchmark=b.name, m=m)
            return CheckReport(
                passed=False, checked=len(samples), first_violation=int(i),
                detail=f"стационарная точка {root.tolist()}",
            )
    return CheckReport(passed=True, checked=len(samples))
